#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "nez/engine.hpp"

namespace nez {

struct CallKeyHash {
	std::size_t operator()(const CallKey& k) const noexcept
	{
		std::size_t h = k.position * 0x9e3779b97f4a7c15ULL;
		h ^= (static_cast<std::size_t>(k.production) << 32) + k.state_version * 0xbf58476d1ce4e5b9ULL + (h << 6) + (h >> 2);
		h ^= k.flags * 0x94d049bb133111ebULL + (h << 6) + (h >> 2);
		return h;
	}
};

struct MemoStats {
	std::uint64_t lookups = 0;
	std::uint64_t hits = 0;
	std::uint64_t stores = 0;
	std::uint64_t resets = 0;
};

/// (production, position, state version, flags) -> outcome. Bounded; on
/// overflow the whole table is dropped.
class MemoTable final : public CallCache {
public:
	/// Called on every hit; instrumentation for tests.
	using HitObserver = std::function<void(const CallKey&)>;

	explicit MemoTable(std::size_t capacity = 4u << 20) : capacity_(capacity) {}

	const CallResult* lookup(const CallKey& key) override;
	void store(const CallKey& key, CallResult result) override;

	const MemoStats& stats() const { return stats_; }
	std::size_t size() const { return entries_.size(); }
	void on_hit(HitObserver fn) { observer_ = std::move(fn); }

private:
	std::size_t capacity_;
	std::unordered_map<CallKey, CallResult, CallKeyHash> entries_;
	MemoStats stats_;
	HitObserver observer_;
};

/// Same outcome as parse() (success, consumed, tree, furthest failure);
/// only the step count differs.
ParseOutcome parse_packrat(const Program& program, std::string_view start, std::string_view input,
	const ParseOptions& options = {}, MemoTable* memo = nullptr);
ParseOutcome parse_packrat(const Grammar& g, std::string_view start, std::string_view input, const ParseOptions& options = {});

enum class Mode { Naive, Packrat };

std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view name);

ParseOutcome parse_with(Mode mode, const Program& program, std::string_view start, std::string_view input,
	const ParseOptions& options = {});

struct BenchInput {
	std::string id;
	std::string bytes;
};

struct BenchRecord {
	std::string input_id;
	std::size_t bytes = 0;
	Mode mode = Mode::Packrat;
	std::uint64_t steps = 0;
	std::uint64_t nanos = 0;
};

/// Parses every input `repetitions` times and keeps the best wall time.
/// Throws nez::error(E_PARSE_FAILED) if an input does not parse.
std::vector<BenchRecord> bench_run(const Program& program, std::string_view start, const std::vector<BenchInput>& inputs,
	Mode mode, int repetitions, const ParseOptions& options = {});

/// CSV with header `input_id,bytes,mode,steps,nanos`, LF line endings.
void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records);

} // namespace nez
