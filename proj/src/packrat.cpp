#include "nez/packrat.hpp"

#include <chrono>
#include <limits>
#include <ostream>

#include "nez/error.hpp"

namespace nez {

const CallResult* MemoTable::lookup(const CallKey& key)
{
	++stats_.lookups;
	auto it = entries_.find(key);
	if (it == entries_.end())
		return nullptr;
	++stats_.hits;
	if (observer_)
		observer_(key);
	return &it->second;
}

void MemoTable::store(const CallKey& key, CallResult result)
{
	if (entries_.size() >= capacity_) {
		entries_.clear();
		++stats_.resets;
	}
	++stats_.stores;
	entries_.insert_or_assign(key, std::move(result));
}

ParseOutcome parse_packrat(const Program& program, std::string_view start, std::string_view input,
	const ParseOptions& options, MemoTable* memo)
{
	MemoTable local;
	return parse(program, start, input, options, memo ? memo : &local);
}

ParseOutcome parse_packrat(const Grammar& g, std::string_view start, std::string_view input, const ParseOptions& options)
{
	Program p = Program::compile(g);
	return parse_packrat(p, start, input, options);
}

std::string_view mode_name(Mode m) { return m == Mode::Naive ? "naive" : "packrat"; }

Mode parse_mode(std::string_view name)
{
	if (name == "naive")
		return Mode::Naive;
	if (name == "packrat")
		return Mode::Packrat;
	throw error("E_USAGE", "unknown mode " + std::string(name));
}

ParseOutcome parse_with(Mode mode, const Program& program, std::string_view start, std::string_view input,
	const ParseOptions& options)
{
	return mode == Mode::Naive ? parse(program, start, input, options) : parse_packrat(program, start, input, options);
}

std::vector<BenchRecord> bench_run(const Program& program, std::string_view start, const std::vector<BenchInput>& inputs,
	Mode mode, int repetitions, const ParseOptions& options)
{
	std::vector<BenchRecord> records;
	for (const auto& in : inputs) {
		BenchRecord rec;
		rec.input_id = in.id;
		rec.bytes = in.bytes.size();
		rec.mode = mode;
		rec.nanos = std::numeric_limits<std::uint64_t>::max();
		for (int r = 0; r < std::max(1, repetitions); ++r) {
			auto t0 = std::chrono::steady_clock::now();
			ParseOutcome out = parse_with(mode, program, start, in.bytes, options);
			auto t1 = std::chrono::steady_clock::now();
			if (!out.success)
				throw error("E_PARSE_FAILED", "benchmark input " + in.id + " failed to parse at " + std::to_string(out.furthest_failure));
			rec.steps = out.steps;
			auto ns = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
			rec.nanos = std::min(rec.nanos, ns);
		}
		records.push_back(std::move(rec));
	}
	return records;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records)
{
	out << "input_id,bytes,mode,steps,nanos\n";
	for (const auto& r : records)
		out << r.input_id << ',' << r.bytes << ',' << mode_name(r.mode) << ',' << r.steps << ',' << r.nanos << '\n';
}

} // namespace nez
