#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nez/dsl.hpp"
#include "nez/error.hpp"
#include "nez/generators.hpp"
#include "nez/packrat.hpp"

using namespace nez;

namespace {

Grammar read(const std::string& text)
{
	auto l = parse_grammar_text(text);
	REQUIRE(l.ok());
	return *l.grammar;
}

const char* kBacktrack = "Q = T* 'y'\nT = A 'x' / 'a'\nA = 'a' A / 'a'\nS = A 'x' / A 'y'\n";

std::string a_then_y(std::size_t n) { return std::string(n, 'a') + "y"; }

} // namespace

TEST_CASE("packrat matches naive on the backtracking grammar")
{
	Program p = Program::compile(read(kBacktrack));
	for (std::size_t n : {1, 2, 7, 64}) {
		for (const char* start : {"Q", "S"}) {
			ParseOptions o;
			o.build_tree = true;
			auto a = parse(p, start, a_then_y(n), o);
			auto b = parse_packrat(p, start, a_then_y(n), o);
			CAPTURE(n);
			CHECK(a.success);
			CHECK(a.success == b.success);
			CHECK(a.consumed == b.consumed);
			CHECK(a.furthest_failure == b.furthest_failure);
			CHECK(b.steps <= a.steps);
		}
	}
}

TEST_CASE("packrat steps stay linear where naive goes quadratic")
{
	Program p = Program::compile(read(kBacktrack));
	ParseOptions o;
	o.step_budget = std::uint64_t{1} << 40;
	std::uint64_t naive_prev = 0;
	for (std::size_t n : {256, 512, 1024, 2048}) {
		auto naive = parse(p, "Q", a_then_y(n), o);
		auto packrat = parse_packrat(p, "Q", a_then_y(n), o);
		REQUIRE(packrat.success);
		CHECK(packrat.steps <= 16 * (n + 1));
		if (naive_prev)
			CHECK(static_cast<double>(naive.steps) / static_cast<double>(naive_prev) > 3.0);
		naive_prev = naive.steps;
	}
	// S alone re-parses A once; packrat answers the second call from the memo.
	MemoTable memo;
	auto s = parse_packrat(p, "S", a_then_y(100), o, &memo);
	CHECK(s.success);
	CHECK(memo.stats().hits > 0);
}

TEST_CASE("stateless grammar: identical results, memo hits on a repeated prefix")
{
	Program p = Program::compile(read("S = X 'b' / X 'c'\nX = 'a'+"));
	MemoTable memo;
	std::vector<CallKey> hits;
	memo.on_hit([&](const CallKey& k) { hits.push_back(k); });
	auto b = parse_packrat(p, "S", "aaac", {}, &memo);
	auto a = parse(p, "S", "aaac");
	CHECK(a.success == b.success);
	CHECK(a.consumed == b.consumed);
	REQUIRE(hits.size() == 1);
	CHECK(hits[0].position == 0);
	CHECK(hits[0].production == *p.production_index("X"));
}

TEST_CASE("memo entries are keyed by state version and flags")
{
	// The same nonterminal at the same position must be re-run when the
	// table or a flag has changed in between.
	Program p = Program::compile(read(
		"S = <def T [a-z]> (C '!' / <def T [a-z]> C) / <on !F D '!'> / <on F D>\nC = <match T>\nD = <if F> 'q' / 'r'"));
	for (const char* in : {"aa", "aba", "q", "r", "r!"}) {
		CAPTURE(in);
		auto a = parse(p, "S", in);
		auto b = parse_packrat(p, "S", in);
		CHECK(a.success == b.success);
		CHECK(a.consumed == b.consumed);
	}
}

TEST_CASE("table-changing calls are not replayed from the memo")
{
	Program p = Program::compile(read("S = (D '!' / D) <is T> <is T>\nD = <def T [a-z]>"));
	MemoTable memo;
	// The second D must push again; a replayed success would leave T empty.
	auto out = parse_packrat(p, "S", "aaa", {}, &memo);
	CHECK(out.success);
	CHECK(out.consumed == 3);
	CHECK(parse(p, "S", "aaa").consumed == 3);
	CHECK(parse_packrat(p, "S", "a!aa").consumed == 4);
}

TEST_CASE("bench_run and CSV")
{
	auto g = read("S = .*");
	Program p = Program::compile(g);
	std::vector<BenchInput> inputs;
	for (std::size_t n : {1024, 2048, 4096})
		inputs.push_back({"in-" + std::to_string(n), std::string(n, 'z')});
	auto records = bench_run(p, "S", inputs, Mode::Packrat, 3);
	REQUIRE(records.size() == 3);
	CHECK(records[0].steps < records[1].steps);
	CHECK(records[1].steps < records[2].steps);
	CHECK(records[2].bytes == 4096);

	std::ostringstream csv;
	write_bench_csv(csv, records);
	std::string text = csv.str();
	CHECK(text.rfind("input_id,bytes,mode,steps,nanos\n", 0) == 0);
	CHECK(std::count(text.begin(), text.end(), '\n') == 4);
	CHECK(text.find("in-2048,2048,packrat,") != std::string::npos);
	CHECK(text.find('\r') == std::string::npos);

	Program strict = Program::compile(read("S = 'x'"));
	try {
		bench_run(strict, "S", {{"bad", "y"}}, Mode::Naive, 1);
		FAIL("expected E_PARSE_FAILED");
	}
	catch (const nez::error& e) {
		CHECK(e.code() == "E_PARSE_FAILED");
	}
}

TEST_CASE("typedef generator input bench is monotone")
{
	std::ifstream in(std::string(NEZ_CORPUS_DIR) + "/c-typedef.nez");
	std::ostringstream ss;
	ss << in.rdbuf();
	Grammar g = read(ss.str());
	Program p = Program::compile(g);
	std::vector<BenchInput> inputs;
	for (std::size_t n : {1024, 2048, 4096})
		inputs.push_back({std::to_string(n), generate_input("typedef-C-mini", n)});
	ParseOptions o;
	o.require_eof = true;
	auto records = bench_run(p, g.start, inputs, Mode::Packrat, 1, o);
	CHECK(records[0].steps < records[1].steps);
	CHECK(records[1].steps < records[2].steps);
}

TEST_CASE("mode names")
{
	CHECK(parse_mode("naive") == Mode::Naive);
	CHECK(mode_name(Mode::Packrat) == "packrat");
	CHECK_THROWS_AS(parse_mode("lazy"), nez::error);
}

TEST_CASE("memo capacity overflow resets")
{
	MemoTable memo(4);
	Program p = Program::compile(read("S = X*\nX = 'a'"));
	auto out = parse_packrat(p, "S", std::string(50, 'a'), {}, &memo);
	CHECK(out.consumed == 50);
	CHECK(memo.stats().resets > 0);
	CHECK(memo.size() <= 4);
}
