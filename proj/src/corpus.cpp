#include "nez/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nez/dsl.hpp"
#include "nez/error.hpp"
#include "nez/transforms.hpp"

namespace nez {

namespace {

using json = nlohmann::json;

[[noreturn]] void malformed(const std::filesystem::path& where, const std::string& what)
{
	throw error("E_FIXTURE_MALFORMED", where.string() + ": " + what);
}

std::string read_file(const std::filesystem::path& path, const std::filesystem::path& manifest)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		malformed(manifest, "cannot read " + path.string());
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

GoldenCase read_case(const json& j, const std::filesystem::path& manifest, const std::filesystem::path& dir)
{
	if (!j.is_object() || !j.contains("name") || !j.contains("expect"))
		malformed(manifest, "case needs name and expect");
	GoldenCase c;
	c.name = j.at("name").get<std::string>();
	c.start = j.value("start", std::string{});
	if (j.contains("input"))
		c.input = j.at("input").get<std::string>();
	else if (j.contains("input_file"))
		c.input = read_file(dir / j.at("input_file").get<std::string>(), manifest);
	else
		malformed(manifest, "case " + c.name + " has no input");
	if (j.contains("flags"))
		for (const auto& [k, v] : j.at("flags").items())
			c.flags[k] = v.get<bool>();
	std::string expect = j.at("expect").get<std::string>();
	if (expect == "accept")
		c.expect = Expectation::Accept;
	else if (expect == "reject")
		c.expect = Expectation::Reject;
	else if (expect == "note")
		c.expect = Expectation::Note;
	else
		malformed(manifest, "case " + c.name + ": unknown expectation " + expect);
	if (j.contains("consumed"))
		c.consumed = j.at("consumed").get<std::size_t>();
	c.require_eof = j.value("require_eof", false);
	if (j.contains("tree"))
		c.tree = j.at("tree").get<std::string>();
	c.note = j.value("note", std::string{});
	return c;
}

CorpusGrammar read_manifest(const std::filesystem::path& manifest)
{
	json doc;
	try {
		std::ifstream in(manifest);
		doc = json::parse(in);
	}
	catch (const json::exception& e) {
		malformed(manifest, e.what());
	}
	try {
		if (!doc.is_object() || !doc.contains("grammar") || !doc.contains("cases") || !doc.at("cases").is_array())
			malformed(manifest, "expected {\"grammar\": ..., \"cases\": [...]}");
		const auto dir = manifest.parent_path();
		CorpusGrammar g;
		g.name = manifest.stem().string();
		g.path = dir / doc.at("grammar").get<std::string>();
		GrammarLoad load = parse_grammar_text(read_file(g.path, manifest));
		if (!load.ok()) {
			std::string first = load.diagnostics.empty() ? "invalid grammar" : load.diagnostics.front().code + " " + load.diagnostics.front().message;
			malformed(manifest, g.path.filename().string() + ": " + first);
		}
		g.grammar = std::move(*load.grammar);
		if (doc.contains("generator"))
			g.generator = doc.at("generator").get<std::string>();
		for (const auto& jc : doc.at("cases")) {
			GoldenCase c = read_case(jc, manifest, dir);
			if (!c.start.empty() && !g.grammar.find(c.start))
				malformed(manifest, "case " + c.name + ": unknown start " + c.start);
			g.cases.push_back(std::move(c));
		}
		return g;
	}
	catch (const json::exception& e) {
		malformed(manifest, e.what());
	}
}

} // namespace

std::vector<CorpusGrammar> load_corpus(const std::filesystem::path& dir)
{
	std::error_code ec;
	if (!std::filesystem::is_directory(dir, ec))
		throw error("E_FIXTURE_MALFORMED", dir.string() + ": not a directory");
	std::vector<std::filesystem::path> manifests;
	for (const auto& entry : std::filesystem::directory_iterator(dir))
		if (entry.is_regular_file() && entry.path().extension() == ".json")
			manifests.push_back(entry.path());
	std::sort(manifests.begin(), manifests.end());
	std::vector<CorpusGrammar> out;
	for (const auto& m : manifests)
		out.push_back(read_manifest(m));
	return out;
}

std::size_t CorpusReport::failures() const
{
	return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const CaseResult& r) { return !r.passed; }));
}

CaseResult run_case(const CorpusGrammar& g, const GoldenCase& c, Mode mode, bool eliminate)
{
	CaseResult r{g.name, c.name, false, c.expect == Expectation::Note, {}};
	std::string start = c.start.empty() ? g.grammar.start : c.start;
	ParseOptions opt;
	opt.require_eof = c.require_eof;
	opt.build_tree = c.tree.has_value();
	ParseOutcome out;
	try {
		if (eliminate) {
			EliminationOptions eo;
			eo.entry_flags = {c.flags.begin(), c.flags.end()};
			Grammar e = eliminate_conditions(g.grammar, eo);
			start = specialized_name(g.grammar, start, eo.entry_flags);
			out = parse_with(mode, Program::compile(e), start, c.input, opt);
		}
		else {
			opt.flags = c.flags;
			out = parse_with(mode, Program::compile(g.grammar), start, c.input, opt);
		}
	}
	catch (const error& e) {
		r.detail = e.code() + " " + e.what();
		return r;
	}

	std::ostringstream detail;
	if (out.success)
		detail << "consumed " << out.consumed;
	else
		detail << "fail at " << out.furthest_failure;
	switch (c.expect) {
	case Expectation::Note:
		r.passed = true;
		break;
	case Expectation::Reject:
		r.passed = !out.success;
		break;
	case Expectation::Accept:
		r.passed = out.success && (!c.consumed || *c.consumed == out.consumed);
		if (r.passed && c.tree) {
			std::string got = out.tree ? to_sexpr(*out.tree) : std::string("<none>");
			if (got != *c.tree) {
				r.passed = false;
				detail << "; tree " << got;
			}
		}
		break;
	}
	r.detail = detail.str();
	return r;
}

CorpusReport run_corpus(const std::vector<CorpusGrammar>& corpus, Mode mode, bool eliminate)
{
	CorpusReport report;
	for (const auto& g : corpus)
		for (const auto& c : g.cases)
			report.results.push_back(run_case(g, c, mode, eliminate));
	return report;
}

} // namespace nez
