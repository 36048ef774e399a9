// nezx: command-line front end for the nez engine.
//
// Exit codes: 0 ok, 1 parse failure, 2 grammar error, 3 I/O or usage error.

#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "nez/analysis.hpp"
#include "nez/corpus.hpp"
#include "nez/dsl.hpp"
#include "nez/error.hpp"
#include "nez/generators.hpp"
#include "nez/packrat.hpp"
#include "nez/transforms.hpp"

namespace {

enum Exit { kOk = 0, kParseFailure = 1, kGrammarError = 2, kUsage = 3 };

struct Failure {
	int code;
};

std::string read_file(const std::string& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		std::cerr << "ERROR E_IO " << path << ":0:0 cannot read file\n";
		throw Failure{kUsage};
	}
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void print_diagnostics(const std::string& file, const std::vector<nez::Diagnostic>& diags)
{
	for (const auto& d : diags) {
		std::cerr << (d.severity == nez::Severity::Error ? "ERROR " : "WARNING ") << d.code << ' ' << file << ':'
				  << d.span.line << ':' << d.span.column << ' ' << d.message << '\n';
	}
}

nez::Grammar load_grammar(const std::string& path)
{
	nez::GrammarLoad load = nez::parse_grammar_text(read_file(path));
	print_diagnostics(path, load.diagnostics);
	if (!load.ok())
		throw Failure{kGrammarError};
	return std::move(*load.grammar);
}

[[noreturn]] void usage(const std::string& message)
{
	std::cerr << "ERROR E_USAGE " << message << '\n';
	throw Failure{kUsage};
}

std::map<std::string, bool, std::less<>> read_flags(const std::vector<std::string>& specs, const nez::Grammar& g)
{
	std::map<std::string, bool, std::less<>> flags;
	for (const auto& s : specs) {
		auto eq = s.find('=');
		if (eq == std::string::npos)
			usage("flag preset must be NAME=VALUE: " + s);
		std::string name = s.substr(0, eq);
		std::string value = s.substr(eq + 1);
		bool v;
		if (value == "true" || value == "t" || value == "1")
			v = true;
		else if (value == "false" || value == "f" || value == "0")
			v = false;
		else
			usage("flag value must be true or false: " + s);
		if (!g.flags.count(name))
			std::cerr << "WARNING W_UNKNOWN_FLAG " << name << " is not used by the grammar\n";
		flags[name] = v;
	}
	return flags;
}

struct ParseArgs {
	std::string grammar;
	std::string input;
	std::string start;
	std::string mode = "naive";
	std::string format = "sexpr";
	std::vector<std::string> flags;
	bool require_eof = false;
	std::optional<std::uint64_t> step_budget;
};

int cmd_check(const std::string& path)
{
	load_grammar(path);
	return kOk;
}

int cmd_parse(const ParseArgs& a)
{
	nez::Grammar g = load_grammar(a.grammar);
	std::string input = read_file(a.input);
	nez::Mode mode = nez::parse_mode(a.mode);
	nez::ParseOptions opt;
	opt.require_eof = a.require_eof;
	opt.build_tree = a.format != "quiet";
	opt.step_budget = a.step_budget;
	opt.flags = read_flags(a.flags, g);
	std::string start = a.start.empty() ? g.start : a.start;
	if (!g.find(start))
		usage("unknown start production " + start);

	nez::ParseOutcome out = nez::parse_with(mode, nez::Program::compile(g), start, input, opt);
	if (!out.success) {
		std::cout << "fail at " << out.furthest_failure << '\n';
		return kParseFailure;
	}
	if (a.format == "quiet")
		return kOk;
	std::cout << "consumed " << out.consumed << '\n';
	if (out.tree)
		std::cout << (a.format == "json" ? nez::to_json(*out.tree) : nez::to_sexpr(*out.tree)) << '\n';
	return kOk;
}

std::vector<std::size_t> parse_sizes(const std::string& csv)
{
	std::vector<std::size_t> sizes;
	std::stringstream ss(csv);
	std::string item;
	while (std::getline(ss, item, ',')) {
		try {
			std::size_t used = 0;
			unsigned long long v = std::stoull(item, &used);
			if (used != item.size() || v == 0)
				throw std::invalid_argument(item);
			sizes.push_back(static_cast<std::size_t>(v));
		}
		catch (const std::exception&) {
			usage("bad size list " + csv);
		}
	}
	if (sizes.empty())
		usage("empty size list");
	return sizes;
}

struct BenchArgs {
	std::string grammar;
	std::string gen;
	std::string sizes;
	std::vector<std::string> files;
	std::string mode = "packrat";
	std::string start;
	int repetitions = 1;
	std::uint64_t seed = 0;
	std::optional<std::uint64_t> step_budget;
};

int cmd_bench(const BenchArgs& a)
{
	nez::Grammar g = load_grammar(a.grammar);
	nez::Mode mode = nez::parse_mode(a.mode);
	std::vector<nez::BenchInput> inputs;
	if (!a.gen.empty()) {
		if (!a.files.empty())
			usage("use either --gen or input files, not both");
		if (a.sizes.empty())
			usage("--gen needs --sizes");
		for (std::size_t size : parse_sizes(a.sizes)) {
			try {
				inputs.push_back({a.gen + "-" + std::to_string(size), nez::generate_input(a.gen, size, a.seed)});
			}
			catch (const nez::error& e) {
				usage(e.what());
			}
		}
	}
	else {
		if (a.files.empty())
			usage("bench needs --gen or input files");
		for (const auto& f : a.files)
			inputs.push_back({f, read_file(f)});
	}
	std::string start = a.start.empty() ? g.start : a.start;
	if (!g.find(start))
		usage("unknown start production " + start);
	nez::ParseOptions opt;
	opt.require_eof = true;
	// Measuring superlinear naive runs is the point here, so no budget by default.
	opt.step_budget = a.step_budget.value_or(std::numeric_limits<std::uint64_t>::max());
	auto records = nez::bench_run(nez::Program::compile(g), start, inputs, mode, a.repetitions, opt);
	nez::write_bench_csv(std::cout, records);
	return kOk;
}

int cmd_export(const std::string& path, const std::string& passes, const std::vector<std::string>& flag_specs)
{
	nez::Grammar g = load_grammar(path);
	nez::EliminationOptions eo;
	for (const auto& [k, v] : read_flags(flag_specs, g))
		eo.entry_flags[k] = v;
	std::stringstream ss(passes);
	std::string pass;
	while (std::getline(ss, pass, ',')) {
		if (pass == "desugar")
			g = nez::desugar(g);
		else if (pass == "elim-cond")
			g = nez::eliminate_conditions(g, eo);
		else if (pass == "prune")
			g = nez::prune_unreachable(g);
		else if (!pass.empty())
			usage("unknown pass " + pass);
	}
	std::cout << nez::print_grammar(g);
	return kOk;
}

int cmd_corpus(const std::string& dir, const std::string& mode_name, bool eliminate)
{
	nez::Mode mode = nez::parse_mode(mode_name);
	auto corpus = nez::load_corpus(dir);
	auto report = nez::run_corpus(corpus, mode, eliminate);
	for (const auto& r : report.results) {
		std::cout << (r.passed ? (r.note ? "NOTE " : "PASS ") : "FAIL ") << r.grammar << '/' << r.name << ' ' << r.detail
				  << '\n';
	}
	return report.ok() ? kOk : kParseFailure;
}

int run(int argc, char** argv)
{
	CLI::App app{"nezx: PEG engine with symbol tables and parsing conditions"};
	app.require_subcommand(1);

	std::string check_path;
	auto* check = app.add_subcommand("check", "Validate a grammar");
	check->add_option("grammar", check_path, "Grammar file")->required();

	ParseArgs pa;
	auto* parse = app.add_subcommand("parse", "Parse an input file");
	parse->add_option("grammar", pa.grammar, "Grammar file")->required();
	parse->add_option("input", pa.input, "Input file")->required();
	parse->add_option("--start", pa.start, "Start production");
	parse->add_option("--mode", pa.mode, "naive or packrat")->check(CLI::IsMember({"naive", "packrat"}));
	parse->add_option("--flag", pa.flags, "Condition preset NAME=true|false");
	parse->add_option("--format", pa.format, "sexpr, json or quiet")->check(CLI::IsMember({"sexpr", "json", "quiet"}));
	parse->add_flag("--require-eof", pa.require_eof, "Fail unless the whole input is consumed");
	parse->add_option("--step-budget", pa.step_budget, "Abort after this many evaluation steps");

	BenchArgs ba;
	auto* bench = app.add_subcommand("bench", "Benchmark parsing; CSV on stdout");
	bench->add_option("grammar", ba.grammar, "Grammar file")->required();
	bench->add_option("files", ba.files, "Input files");
	bench->add_option("--gen", ba.gen, "Generator id");
	bench->add_option("--sizes", ba.sizes, "Comma-separated sizes in bytes");
	bench->add_option("--mode", ba.mode, "naive or packrat")->check(CLI::IsMember({"naive", "packrat"}));
	bench->add_option("--repetitions", ba.repetitions, "Runs per input; best time is kept")->check(CLI::PositiveNumber);
	bench->add_option("--start", ba.start, "Start production");
	bench->add_option("--seed", ba.seed, "Generator seed");
	bench->add_option("--step-budget", ba.step_budget, "Abort a parse after this many evaluation steps (default: unbounded)");

	std::string export_path, passes = "desugar";
	std::vector<std::string> export_flags;
	auto* exp = app.add_subcommand("export", "Print a transformed grammar");
	exp->add_option("grammar", export_path, "Grammar file")->required();
	exp->add_option("--pass", passes, "Comma-separated passes: desugar, elim-cond, prune");
	exp->add_option("--flag", export_flags, "Entry condition NAME=true|false for elim-cond");

	std::string corpus_dir, corpus_mode = "naive";
	bool eliminate = false;
	auto* corpus = app.add_subcommand("corpus", "Run golden cases from a fixture directory");
	corpus->add_option("dir", corpus_dir, "Fixture directory")->required();
	corpus->add_option("--mode", corpus_mode, "naive or packrat")->check(CLI::IsMember({"naive", "packrat"}));
	corpus->add_flag("--eliminate", eliminate, "Run against condition-eliminated grammars");

	try {
		app.parse(argc, argv);
	}
	catch (const CLI::CallForHelp& e) {
		return app.exit(e);
	}
	catch (const CLI::ParseError& e) {
		app.exit(e);
		return kUsage;
	}

	try {
		if (*check)
			return cmd_check(check_path);
		if (*parse)
			return cmd_parse(pa);
		if (*bench)
			return cmd_bench(ba);
		if (*exp)
			return cmd_export(export_path, passes, export_flags);
		return cmd_corpus(corpus_dir, corpus_mode, eliminate);
	}
	catch (const Failure& f) {
		return f.code;
	}
	catch (const nez::error& e) {
		std::cerr << "ERROR " << e.code() << ' ' << e.what() << '\n';
		const std::string& c = e.code();
		if (c == "E_FLAG_EXPLOSION" || c == "E_CONDITIONAL_TABLE" || c == "E_GRAMMAR_INVALID")
			return kGrammarError;
		if (c == "E_PARSE_FAILED" || c == "E_STEP_LIMIT" || c == "E_DEPTH_LIMIT")
			return kParseFailure;
		return kUsage;
	}
}

} // namespace

int main(int argc, char** argv)
{
	return run(argc, argv);
}
