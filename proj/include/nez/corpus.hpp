#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nez/grammar.hpp"
#include "nez/packrat.hpp"

namespace nez {

enum class Expectation { Accept, Reject, Note };

struct GoldenCase {
	std::string name;
	/// Empty means the grammar's start production.
	std::string start;
	std::string input;
	std::map<std::string, bool, std::less<>> flags;
	Expectation expect = Expectation::Accept;
	std::optional<std::size_t> consumed;
	bool require_eof = false;
	/// Expected S-expression of the tree, when the case pins one.
	std::optional<std::string> tree;
	std::string note;
};

struct CorpusGrammar {
	std::string name;
	std::filesystem::path path;
	Grammar grammar;
	/// Generator producing valid inputs for this grammar's start, if any.
	std::optional<std::string> generator;
	std::vector<GoldenCase> cases;
};

/// Reads every `*.json` manifest in `dir`. Each names a `.nez` file next to
/// it and lists its cases. Malformed manifests, unreadable files and grammars
/// that fail the static check raise E_FIXTURE_MALFORMED.
std::vector<CorpusGrammar> load_corpus(const std::filesystem::path& dir);

struct CaseResult {
	std::string grammar;
	std::string name;
	bool passed = false;
	bool note = false;
	std::string detail;
};

struct CorpusReport {
	std::vector<CaseResult> results;

	std::size_t failures() const;
	bool ok() const { return failures() == 0; }
};

/// Runs one case. With `eliminate`, the grammar is first passed through
/// eliminate_conditions with the case's flags as the entry context.
CaseResult run_case(const CorpusGrammar& g, const GoldenCase& c, Mode mode, bool eliminate = false);
CorpusReport run_corpus(const std::vector<CorpusGrammar>& corpus, Mode mode, bool eliminate = false);

} // namespace nez
