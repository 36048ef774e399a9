#include <doctest.h>

#include <fstream>
#include <sstream>

#include "nez/corpus.hpp"
#include "nez/dsl.hpp"
#include "nez/engine.hpp"
#include "nez/error.hpp"
#include "support/oracle.hpp"

using namespace nez;

namespace {

Grammar read(const std::string& text)
{
	auto l = parse_grammar_text(text);
	REQUIRE(l.ok());
	return *l.grammar;
}

ParseOutcome run(const std::string& grammar, const std::string& input, ParseOptions o = {})
{
	Grammar g = read(grammar);
	return parse(g, g.start, input, o);
}

// Evaluates one expression against a program built from `grammar`, starting
// from the given table contents.
struct Probe {
	Program program;
	explicit Probe(const std::string& grammar) : program(Program::compile(read(grammar))) {}

	struct Result {
		bool ok;
		std::size_t pos;
		std::vector<std::string> table;
	};

	Result eval(const std::string& expr, const std::string& input, const std::string& table = "T",
		std::vector<std::string> symbols = {})
	{
		auto e = parse_expression(expr);
		REQUIRE(e.ok());
		NodeId id = program.add(*e.expression);
		Machine m(program, input);
		auto t = program.table_index(table);
		REQUIRE(t);
		for (auto& s : symbols)
			m.push_symbol(*t, s);
		bool ok = m.eval(id);
		return {ok, m.position(), m.table(*t)};
	}
};

const char* kXml = R"(
INNER = <block TAG XML>
XML   = '<' <def TAG NAME> '>' INNER? '</' <is TAG> '>'
NAME  = [A-z] [A-z0-9]*
)";

} // namespace

TEST_CASE("scoped xml")
{
	auto good = run(kXml, "<a><b></b></a>");
	CHECK(good.success);
	CHECK(good.consumed == 14);

	auto bad = run(kXml, "<a></b>");
	CHECK_FALSE(bad.success);
	// The <is TAG> check starts right after "</".
	CHECK(bad.furthest_failure == 5);

	auto plain = run("XML = '<' NAME '>' XML? '</' NAME '>'\nNAME = [A-z] [A-z0-9]*", "<a></b>");
	CHECK(plain.success);
	CHECK(plain.consumed == 7);

	// Every pair of tags over {a, b}: accepted iff the names agree.
	for (std::string open : {"a", "b", "ab", "ba"})
		for (std::string close : {"a", "b", "ab", "ba"}) {
			CAPTURE(open);
			CAPTURE(close);
			CHECK(run(kXml, "<" + open + "></" + close + ">").success == (open == close));
		}

	std::string local = kXml;
	local.replace(local.find("block"), 5, "local");
	CHECK(run(local, "<a><b></b></a>").success);
	CHECK_FALSE(run(local, "<a><b></a></b>").success);
}

TEST_CASE("choice, predicates and repetition")
{
	const char* math = R"(Expr    = Sum
Sum     = Product (( '+'  / '-' ) Product )*
Product = Value (( '*' / '/' ) Value )*
Value   = [0-9]+ / '(' Expr ')'
)";
	auto paren = run(math, "(7)");
	CHECK(paren.success);
	CHECK(paren.consumed == 3);

	CHECK(run("A = !'a' .", "b").consumed == 1);
	CHECK_FALSE(run("A = !'a' .", "a").success);
	CHECK(run("A = &'a' .", "a").consumed == 1);
	CHECK(run("A = 'ab' / 'a'", "ac").consumed == 1);
	CHECK(run("A = 'a'* 'b'", "aaab").consumed == 4);
	CHECK_FALSE(run("A = 'a'+", "b").success);
}

TEST_CASE("zero-progress repetition stops after one iteration")
{
	auto out = run("A = ('x'?)*", "yyy");
	CHECK(out.success);
	CHECK(out.consumed == 0);
	// Repeat, then one iteration: Choice, failed Byte, Empty.
	CHECK(out.steps == 4);

	// A zero-progress iteration is dropped even when it touched a table.
	Probe p("D = <def T 'x'?>");
	auto r = p.eval("(<def T 'x'?>)*", "y");
	CHECK(r.ok);
	CHECK(r.pos == 0);
	CHECK(r.table.empty());
}

TEST_CASE("step counting matches a hand count")
{
	// A: NonTerminal is not counted for the start; Seq 1, Byte 1, Repeat 1,
	// two progressing iterations (Byte + 1 each) and a failed Byte.
	auto out = run("A = 'a' 'b'*", "abb");
	CHECK(out.steps == 1 + 1 + 1 + 2 * 2 + 1);
	auto ref = oracle::run(read("A = 'a' 'b'*"), "A", "abb");
	REQUIRE(ref);
	CHECK(ref->steps == out.steps);
}

TEST_CASE("def pushes the matched text")
{
	Probe p("N = [a-z]+\nD = <def TAG N> <def T [0-9]*>");
	auto a = p.eval("<def TAG N>", "a>", "TAG");
	CHECK(a.ok);
	CHECK(a.pos == 1);
	CHECK(a.table == std::vector<std::string>{"a"});

	auto empty = p.eval("<def T [0-9]*>", "xyz");
	CHECK(empty.ok);
	CHECK(empty.pos == 0);
	CHECK(empty.table == std::vector<std::string>{""});

	auto two = p.eval("<def TAG N> ' ' <def TAG N>", "x y", "TAG");
	CHECK(two.table == std::vector<std::string>{"x", "y"}); // top is last
}

TEST_CASE("is, isa, match, exists")
{
	Probe p("NAME = [a-z]+\nD = <def TAG NAME> <def INDENT [ \\t]*> <def DELIM NAME>");
	CHECK(p.eval("<is TAG>", "a>", "TAG", {"a"}).pos == 1);
	CHECK_FALSE(p.eval("<is TAG>", "a>", "TAG", {"a", "b"}).ok);
	CHECK_FALSE(p.eval("<is TAG>", "a>", "TAG").ok);

	CHECK(p.eval("<isa TAG>", "a>", "TAG", {"a", "b"}).pos == 1);
	CHECK_FALSE(p.eval("<isa TAG>", "ab", "TAG", {"a"}).ok); // e^T reads "ab"
	CHECK_FALSE(p.eval("<isa TAG>", "a", "TAG").ok);

	CHECK(p.eval("<match INDENT>", "  x", "INDENT", {"  "}).pos == 2);
	CHECK_FALSE(p.eval("<match INDENT>", "  ", "INDENT", {"\t"}).ok);
	auto e = p.eval("<match INDENT>", "zz", "INDENT", {""});
	CHECK(e.ok);
	CHECK(e.pos == 0);

	CHECK_FALSE(p.eval("<exists DELIM>", "x", "DELIM").ok);
	auto end = p.eval("<exists DELIM>", "x", "DELIM", {"END"});
	CHECK(end.ok);
	CHECK(end.pos == 0);
	CHECK_FALSE(p.eval("<block DELIM <def DELIM NAME>> <exists DELIM>", "END", "DELIM").ok);
}

TEST_CASE("block and local")
{
	Probe p("D = <def T 'a'>");
	auto kept = p.eval("<block T 'x'>", "x", "T", {"a", "b"});
	CHECK(kept.table == std::vector<std::string>{"a", "b"});

	auto vis = run("A = <def T 'a'> <block T <is T>>", "aa");
	CHECK(vis.success);
	CHECK(vis.consumed == 2);

	CHECK_FALSE(run("A = <def T 'a'> <local T <exists T>>", "a").success);
	auto restored = p.eval("<local T <def T 'a'>>", "a", "T", {"z"});
	CHECK(restored.ok);
	CHECK(restored.table == std::vector<std::string>{"z"});
}

TEST_CASE("conditions")
{
	const char* ws = "WS = [ \\t] / <if NL> [\\n]\nOn = <on NL WS>\nNested = <on NL <on !NL WS>>\nX = <if X> 'x'";
	Grammar g = read(ws);
	ParseOptions t, f;
	t.flags["NL"] = true;
	f.flags["NL"] = false;
	CHECK(parse(g, "WS", "\n", t).success);
	CHECK_FALSE(parse(g, "WS", "\n", f).success);
	CHECK(parse(g, "WS", "\n").success);
	CHECK(parse(g, "X", "x").success);
	CHECK(parse(g, "On", "\n", f).success); // <on> wins over the preset
	CHECK_FALSE(parse(g, "Nested", "\n").success);

	// A failing body still restores the flag.
	Program p = Program::compile(read("A = <if F> 'a' / 'b'"));
	NodeId id = p.add(*parse_expression("<on !F 'q'>").expression);
	Machine m(p, "a");
	CHECK_FALSE(m.eval(id));
	CHECK(m.flag(*p.flag_index("F")));
}

TEST_CASE("trees")
{
	ParseOptions o;
	o.build_tree = true;
	auto num = run("N = { [0-9]+ #Num }", "42", o);
	REQUIRE(num.tree);
	CHECK(to_sexpr(*num.tree) == "(#Num 0:2)");
	CHECK(to_json(*num.tree) == R"({"tag":"Num","start":0,"end":2,"children":[]})");

	auto linked = run("A = { $({ 'a' #A }) #B }", "a", o);
	REQUIRE(linked.tree);
	CHECK(to_sexpr(*linked.tree) == "(#B 0:1 (#A 0:1))");

	// Nodes from a failed alternative disappear.
	auto alt = run("A = { $({ 'a' #X }) 'q' } / { $({ 'a' #Y }) }", "a", o);
	REQUIRE(alt.tree);
	CHECK(to_sexpr(*alt.tree) == "(#token 0:1 (#Y 0:1))");

	CHECK_FALSE(run("A = 'a'", "a", o).tree);
}

TEST_CASE("tree building does not change matching on the corpus")
{
	for (const auto& cg : load_corpus(NEZ_CORPUS_DIR)) {
		Program p = Program::compile(cg.grammar);
		for (const auto& c : cg.cases) {
			ParseOptions on, off;
			on.build_tree = true;
			on.flags = off.flags = c.flags;
			on.require_eof = off.require_eof = c.require_eof;
			std::string start = c.start.empty() ? cg.grammar.start : c.start;
			auto a = parse(p, start, c.input, on);
			auto b = parse(p, start, c.input, off);
			CAPTURE(cg.name + "/" + c.name);
			CHECK(a.success == b.success);
			CHECK(a.consumed == b.consumed);
			CHECK(a.furthest_failure == b.furthest_failure);
			CHECK(a.steps == b.steps);
		}
	}
}

TEST_CASE("failed alternatives roll back tables unless asked not to")
{
	const char* g = "A = (<def T 'a'> 'x' / 'a') <exists T>";
	CHECK_FALSE(run(g, "a").success);
	ParseOptions keep;
	keep.keep_failed_table_state = true;
	CHECK(run(g, "a", keep).success);
}

TEST_CASE("require_eof")
{
	ParseOptions o;
	o.require_eof = true;
	auto out = run("A = 'ab'", "abc", o);
	CHECK_FALSE(out.success);
	CHECK(out.furthest_failure == 2);
	CHECK(run("A = 'ab'", "abc").success);
}

TEST_CASE("limits")
{
	ParseOptions tight;
	tight.step_budget = 10;
	try {
		run("A = 'a'*", std::string(100, 'a'), tight);
		FAIL("expected E_STEP_LIMIT");
	}
	catch (const nez::error& e) {
		CHECK(e.code() == "E_STEP_LIMIT");
	}

	std::string deep(20000, '(');
	try {
		run("P = '(' P? ')'", deep);
		FAIL("expected E_DEPTH_LIMIT");
	}
	catch (const nez::error& e) {
		CHECK(e.code() == "E_DEPTH_LIMIT");
	}

	std::string ok_depth = std::string(5000, '(') + std::string(5000, ')');
	CHECK(run("P = '(' P? ')'", ok_depth).consumed == 10000);

	CHECK(default_step_budget(0, 1) == 256);
	CHECK(default_step_budget(10, 3) == 256 * 10 * 3);
}

TEST_CASE("unknown start")
{
	Grammar g = read("A = 'a'");
	try {
		parse(g, "B", "a");
		FAIL("expected E_UNKNOWN_START");
	}
	catch (const nez::error& e) {
		CHECK(e.code() == "E_UNKNOWN_START");
	}
}

TEST_CASE("snapshot and restore")
{
	Program p = Program::compile(read("A = <def T [a-z]> A?"));
	Machine m(p, "abc");
	auto s = m.snapshot();
	CHECK(m.call(0));
	CHECK(m.position() == 3);
	CHECK(m.table(0).size() == 3);
	m.restore(s);
	CHECK(m.position() == 0);
	CHECK(m.table(0).empty());
}
