#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nez/grammar.hpp"

namespace nez {

struct ParseOptions {
	bool require_eof = false;
	bool build_tree = false;
	/// Runaway guard; nullopt means 256 * max(1, input length) * productions.
	std::optional<std::uint64_t> step_budget;
	/// Guard against native stack exhaustion on deeply nested input.
	std::size_t max_depth = 6000;
	/// Initial condition values for the outermost scope. Absent flags are true.
	std::map<std::string, bool, std::less<>> flags;
	/// Keep symbol-table effects of failed speculative attempts instead of
	/// rolling them back. Experimental; off by default.
	bool keep_failed_table_state = false;
};

struct SyntaxTree {
	std::string tag = "token";
	std::size_t start = 0;
	std::size_t end = 0;
	std::vector<SyntaxTree> children;

	friend bool operator==(const SyntaxTree&, const SyntaxTree&) = default;
};

std::string to_sexpr(const SyntaxTree& t);
std::string to_json(const SyntaxTree& t);

struct ParseOutcome {
	bool success = false;
	std::size_t consumed = 0;
	std::size_t furthest_failure = 0;
	std::uint64_t steps = 0;
	std::optional<SyntaxTree> tree;
};

// ---------------------------------------------------------------------------
// Compiled form. Productions, tables and flags are resolved to indices and
// sugar is removed, so evaluation never touches strings or maps.

using NodeId = std::uint32_t;

struct Node {
	Op op = Op::Empty;
	std::uint8_t byte = 0;
	bool negated = false;
	NodeId left = 0;
	NodeId right = 0;
	/// Production index, table index, flag index, tag index or class index.
	std::uint32_t arg = 0;
};

class Program {
public:
	/// Compiles a validated grammar. Throws nez::error(E_GRAMMAR_INVALID)
	/// when validation reports errors.
	static Program compile(const Grammar& g);

	/// Compiles an extra expression against this program's names.
	NodeId add(const Expr& e);

	const Node& node(NodeId id) const { return nodes_[id]; }
	std::size_t node_count() const { return nodes_.size(); }

	std::size_t production_count() const { return productions_.size(); }
	std::optional<std::size_t> production_index(std::string_view name) const;
	const std::string& production_name(std::size_t i) const { return productions_[i].name; }
	NodeId production_body(std::size_t i) const { return productions_[i].body; }

	std::size_t table_count() const { return tables_.size(); }
	std::optional<std::size_t> table_index(std::string_view name) const;
	const std::string& table_name(std::size_t i) const { return tables_[i].name; }
	/// Body of e^T, or nullopt when the table has no <def>.
	std::optional<NodeId> table_body(std::size_t i) const { return tables_[i].body; }

	std::size_t flag_count() const { return flags_.size(); }
	std::optional<std::size_t> flag_index(std::string_view name) const;
	const std::string& flag_name(std::size_t i) const { return flags_[i]; }

	const std::string& tag(std::uint32_t i) const { return tags_[i]; }
	bool class_contains(std::uint32_t cls, std::uint8_t b) const
	{
		return (classes_[cls][b >> 6] >> (b & 63)) & 1u;
	}

private:
	struct ProductionSlot {
		std::string name;
		NodeId body = 0;
	};
	struct TableSlot {
		std::string name;
		std::optional<NodeId> body;
	};

	NodeId emit(const Expr& e);
	std::uint32_t intern_table(const std::string& name);
	std::uint32_t intern_flag(const std::string& name);

	std::vector<Node> nodes_;
	std::vector<ProductionSlot> productions_;
	std::vector<TableSlot> tables_;
	std::vector<std::string> flags_;
	std::vector<std::string> tags_;
	std::vector<std::array<std::uint64_t, 4>> classes_;
};

struct StateSnapshot {
	std::size_t position = 0;
	std::vector<std::size_t> table_depths;
	std::size_t tree_mark = 0;
};

/// One entry of the tree construction log. Backtracking truncates the log;
/// the tree is assembled from it once the parse succeeds.
struct TreeOp {
	enum Kind : std::uint8_t { Open, Close, Tag, LinkOpen, LinkClose } kind;
	std::uint32_t value; // position for Open/Close, tag index for Tag
};

/// Memoization hook consulted on every nonterminal call. Failures are always
/// stored; successes only when the call left every symbol table as it found
/// it, since replaying a hit skips the body's side effects.
struct CallKey {
	std::uint32_t production;
	std::size_t position;
	std::uint64_t state_version;
	std::uint64_t flags;

	friend bool operator==(const CallKey&, const CallKey&) = default;
};

struct CallResult {
	bool success = false;
	std::size_t end = 0;
	std::size_t furthest_failure = 0;
	std::vector<TreeOp> tree;
};

class CallCache {
public:
	virtual ~CallCache() = default;
	virtual const CallResult* lookup(const CallKey& key) = 0;
	virtual void store(const CallKey& key, CallResult result) = 0;
};

/// Evaluation state for one parse over one input: position, per-table
/// symbol stacks, condition flags, state version and step counter.
class Machine {
public:
	Machine(const Program& program, std::string_view input, const ParseOptions& options = {}, CallCache* cache = nullptr);

	/// Evaluates one compiled node at the current position. Throws
	/// nez::error(E_STEP_LIMIT) when the step budget is exhausted.
	bool eval(NodeId id);
	bool call(std::size_t production);

	StateSnapshot snapshot() const;
	void restore(const StateSnapshot& s);

	std::string_view input() const { return input_; }
	std::size_t position() const { return pos_; }
	void set_position(std::size_t p) { pos_ = p; }

	const std::vector<std::string>& table(std::size_t t) const { return tables_[t]; }
	void push_symbol(std::size_t t, std::string symbol);

	bool flag(std::size_t f) const { return flags_[f]; }
	void set_flag(std::size_t f, bool value) { flags_[f] = value; }

	std::uint64_t state_version() const { return version_; }
	std::uint64_t steps() const { return steps_; }
	std::size_t furthest_failure() const { return furthest_; }
	const std::vector<TreeOp>& tree_log() const { return tree_log_; }

	/// Assembles the tree recorded in the log, if any node was produced.
	std::optional<SyntaxTree> build_tree() const;

private:
	struct Mark {
		std::size_t pos;
		std::size_t tree;
		std::uint64_t version;
		std::size_t depth_base;
	};

	// Speculation marks nest LIFO; table depths go to depth_buf_.
	Mark mark();
	void rewind(const Mark& m);
	void release(const Mark& m) { depth_buf_.resize(m.depth_base); }

	bool eval_node(const Node& n);
	bool repeat(NodeId body);
	bool check_symbol(const Node& n);
	void fail_at(std::size_t p)
	{
		if (suppress_failures_ == 0 && p > furthest_)
			furthest_ = p;
	}
	std::uint64_t flag_mask() const;

	const Program& program_;
	std::string_view input_;
	std::size_t pos_ = 0;
	std::vector<std::vector<std::string>> tables_;
	std::vector<bool> flags_;
	std::uint64_t version_ = 0;
	std::uint64_t steps_ = 0;
	std::uint64_t budget_;
	std::size_t depth_ = 0;
	std::size_t max_depth_;
	std::size_t furthest_ = 0;
	int suppress_failures_ = 0;
	bool build_tree_;
	bool rollback_tables_;
	std::vector<TreeOp> tree_log_;
	std::vector<std::size_t> depth_buf_;
	CallCache* cache_;
};

std::uint64_t default_step_budget(std::size_t input_length, std::size_t production_count);

/// Runs the start production over `input`. Throws nez::error for an invalid
/// grammar (E_GRAMMAR_INVALID), an unknown start (E_UNKNOWN_START) or an
/// exhausted budget (E_STEP_LIMIT / E_DEPTH_LIMIT).
ParseOutcome parse(const Grammar& g, std::string_view start, std::string_view input, const ParseOptions& options = {});
ParseOutcome parse(const Program& program, std::string_view start, std::string_view input, const ParseOptions& options = {},
	CallCache* cache = nullptr);

} // namespace nez
