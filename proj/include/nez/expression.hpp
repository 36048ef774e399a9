#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace nez {

// Parsing expression constructors. Sugar forms (Option, OneOrMore) survive
// until desugar() so diagnostics and printing can refer to what was written.
enum class Op : std::uint8_t {
	Empty,
	Byte,        // terminal octet
	Class,       // set of inclusive byte ranges
	Any,
	NonTerminal,
	Seq,
	Choice,
	Option,
	Repeat,      // zero or more
	OneOrMore,
	And,
	Not,
	TreeNew,     // { e }
	TreeLink,    // $( e )
	TreeTag,     // #name
	Def,         // <def T e>
	Exists,
	Match,
	Is,
	Isa,
	Block,
	Local,
	If,          // <if C> / <if !C>
	On,          // <on C e> / <on !C e>
};

std::string_view op_name(Op op);

struct ByteRange {
	std::uint8_t lo;
	std::uint8_t hi;
	friend bool operator==(ByteRange, ByteRange) = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node. Which fields are meaningful depends on `op`:
/// `byte` for Byte, `ranges` for Class, `name` for NonTerminal / TreeTag
/// (tag) / table ops (table) / If, On (flag), `negated` for If and On,
/// `left` for every unary form and the left operand of Seq/Choice, `right`
/// for the right operand.
struct Expr {
	Op op = Op::Empty;
	std::uint8_t byte = 0;
	bool negated = false;
	std::string name;
	std::vector<ByteRange> ranges;
	ExprPtr left;
	ExprPtr right;

	const Expr& body() const { return *left; }
};

namespace ex {

ExprPtr empty();
ExprPtr byte(std::uint8_t b);
/// Literal string; "" is Empty, multi-byte literals become a right-nested
/// sequence of Byte nodes.
ExprPtr literal(std::string_view bytes);
ExprPtr cls(std::vector<ByteRange> ranges);
ExprPtr any();
ExprPtr nt(std::string name);
ExprPtr seq(ExprPtr a, ExprPtr b);
/// Right-nested sequence of all items; empty list yields Empty.
ExprPtr seq(std::vector<ExprPtr> items);
ExprPtr choice(ExprPtr a, ExprPtr b);
ExprPtr choice(std::vector<ExprPtr> items);
ExprPtr option(ExprPtr e);
ExprPtr repeat(ExprPtr e);
ExprPtr one_or_more(ExprPtr e);
ExprPtr and_(ExprPtr e);
ExprPtr not_(ExprPtr e);
ExprPtr tree_new(ExprPtr e);
ExprPtr tree_link(ExprPtr e);
ExprPtr tree_tag(std::string tag);
ExprPtr def(std::string table, ExprPtr e);
ExprPtr exists(std::string table);
ExprPtr match(std::string table);
ExprPtr is(std::string table);
ExprPtr isa(std::string table);
ExprPtr block(std::string table, ExprPtr e);
ExprPtr local(std::string table, ExprPtr e);
ExprPtr if_(std::string flag, bool negated = false);
ExprPtr on(std::string flag, bool negated, ExprPtr e);

/// Never matches and consumes nothing: Not(Empty).
ExprPtr fail();

} // namespace ex

/// Node with the same op and scalar fields as `proto` but new children.
ExprPtr rebuild(const Expr& proto, ExprPtr left, ExprPtr right = nullptr);

bool structurally_equal(const Expr& a, const Expr& b);
std::size_t structural_hash(const Expr& e);

bool is_unary(Op op);
bool is_binary(Op op);

/// Pre-order visit of every node in the tree (not following nonterminals).
void for_each_node(const Expr& e, const std::function<void(const Expr&)>& fn);

/// Bottom-up rewrite; `fn` receives a node whose children were already
/// rewritten and returns the replacement.
ExprPtr transform(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&)>& fn);

} // namespace nez
