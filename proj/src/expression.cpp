#include "nez/expression.hpp"

#include <cassert>

namespace nez {

std::string_view op_name(Op op)
{
	switch (op) {
	case Op::Empty: return "Empty";
	case Op::Byte: return "Byte";
	case Op::Class: return "Class";
	case Op::Any: return "Any";
	case Op::NonTerminal: return "NonTerminal";
	case Op::Seq: return "Seq";
	case Op::Choice: return "Choice";
	case Op::Option: return "Option";
	case Op::Repeat: return "Repeat";
	case Op::OneOrMore: return "OneOrMore";
	case Op::And: return "And";
	case Op::Not: return "Not";
	case Op::TreeNew: return "TreeNew";
	case Op::TreeLink: return "TreeLink";
	case Op::TreeTag: return "TreeTag";
	case Op::Def: return "Def";
	case Op::Exists: return "Exists";
	case Op::Match: return "Match";
	case Op::Is: return "Is";
	case Op::Isa: return "Isa";
	case Op::Block: return "Block";
	case Op::Local: return "Local";
	case Op::If: return "If";
	case Op::On: return "On";
	}
	return "?";
}

bool is_unary(Op op)
{
	switch (op) {
	case Op::Option:
	case Op::Repeat:
	case Op::OneOrMore:
	case Op::And:
	case Op::Not:
	case Op::TreeNew:
	case Op::TreeLink:
	case Op::Def:
	case Op::Block:
	case Op::Local:
	case Op::On:
		return true;
	default:
		return false;
	}
}

bool is_binary(Op op) { return op == Op::Seq || op == Op::Choice; }

namespace {

ExprPtr make(Op op, std::string name = {}, ExprPtr left = nullptr, ExprPtr right = nullptr)
{
	auto e = std::make_shared<Expr>();
	e->op = op;
	e->name = std::move(name);
	e->left = std::move(left);
	e->right = std::move(right);
	return e;
}

} // namespace

namespace ex {

ExprPtr empty()
{
	static const ExprPtr shared = make(Op::Empty);
	return shared;
}

ExprPtr byte(std::uint8_t b)
{
	auto e = std::make_shared<Expr>();
	e->op = Op::Byte;
	e->byte = b;
	return e;
}

ExprPtr literal(std::string_view bytes)
{
	if (bytes.empty())
		return empty();
	ExprPtr tail = byte(static_cast<std::uint8_t>(bytes.back()));
	for (std::size_t i = bytes.size() - 1; i-- > 0;)
		tail = seq(byte(static_cast<std::uint8_t>(bytes[i])), tail);
	return tail;
}

ExprPtr cls(std::vector<ByteRange> ranges)
{
	assert(!ranges.empty());
	auto e = std::make_shared<Expr>();
	e->op = Op::Class;
	e->ranges = std::move(ranges);
	return e;
}

ExprPtr any() { return make(Op::Any); }
ExprPtr nt(std::string name) { return make(Op::NonTerminal, std::move(name)); }
ExprPtr seq(ExprPtr a, ExprPtr b) { return make(Op::Seq, {}, std::move(a), std::move(b)); }

ExprPtr seq(std::vector<ExprPtr> items)
{
	if (items.empty())
		return empty();
	ExprPtr tail = items.back();
	for (std::size_t i = items.size() - 1; i-- > 0;)
		tail = seq(items[i], tail);
	return tail;
}

ExprPtr choice(ExprPtr a, ExprPtr b) { return make(Op::Choice, {}, std::move(a), std::move(b)); }

ExprPtr choice(std::vector<ExprPtr> items)
{
	assert(!items.empty());
	ExprPtr tail = items.back();
	for (std::size_t i = items.size() - 1; i-- > 0;)
		tail = choice(items[i], tail);
	return tail;
}

ExprPtr option(ExprPtr e) { return make(Op::Option, {}, std::move(e)); }
ExprPtr repeat(ExprPtr e) { return make(Op::Repeat, {}, std::move(e)); }
ExprPtr one_or_more(ExprPtr e) { return make(Op::OneOrMore, {}, std::move(e)); }
ExprPtr and_(ExprPtr e) { return make(Op::And, {}, std::move(e)); }
ExprPtr not_(ExprPtr e) { return make(Op::Not, {}, std::move(e)); }
ExprPtr tree_new(ExprPtr e) { return make(Op::TreeNew, {}, std::move(e)); }
ExprPtr tree_link(ExprPtr e) { return make(Op::TreeLink, {}, std::move(e)); }
ExprPtr tree_tag(std::string tag) { return make(Op::TreeTag, std::move(tag)); }
ExprPtr def(std::string table, ExprPtr e) { return make(Op::Def, std::move(table), std::move(e)); }
ExprPtr exists(std::string table) { return make(Op::Exists, std::move(table)); }
ExprPtr match(std::string table) { return make(Op::Match, std::move(table)); }
ExprPtr is(std::string table) { return make(Op::Is, std::move(table)); }
ExprPtr isa(std::string table) { return make(Op::Isa, std::move(table)); }
ExprPtr block(std::string table, ExprPtr e) { return make(Op::Block, std::move(table), std::move(e)); }
ExprPtr local(std::string table, ExprPtr e) { return make(Op::Local, std::move(table), std::move(e)); }

ExprPtr if_(std::string flag, bool negated)
{
	auto e = std::make_shared<Expr>();
	e->op = Op::If;
	e->name = std::move(flag);
	e->negated = negated;
	return e;
}

ExprPtr on(std::string flag, bool negated, ExprPtr body)
{
	auto e = std::make_shared<Expr>();
	e->op = Op::On;
	e->name = std::move(flag);
	e->negated = negated;
	e->left = std::move(body);
	return e;
}

ExprPtr fail() { return not_(empty()); }

} // namespace ex

ExprPtr rebuild(const Expr& proto, ExprPtr left, ExprPtr right)
{
	auto e = std::make_shared<Expr>(proto);
	e->left = std::move(left);
	e->right = std::move(right);
	return e;
}

bool structurally_equal(const Expr& a, const Expr& b)
{
	if (&a == &b)
		return true;
	if (a.op != b.op || a.byte != b.byte || a.negated != b.negated || a.name != b.name || a.ranges != b.ranges)
		return false;
	if (static_cast<bool>(a.left) != static_cast<bool>(b.left) || static_cast<bool>(a.right) != static_cast<bool>(b.right))
		return false;
	if (a.left && !structurally_equal(*a.left, *b.left))
		return false;
	return !a.right || structurally_equal(*a.right, *b.right);
}

std::size_t structural_hash(const Expr& e)
{
	std::size_t h = static_cast<std::size_t>(e.op) * 0x9e3779b97f4a7c15ULL;
	auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
	mix(e.byte);
	mix(e.negated);
	mix(std::hash<std::string>{}(e.name));
	for (auto r : e.ranges)
		mix(static_cast<std::size_t>(r.lo) << 8 | r.hi);
	if (e.left)
		mix(structural_hash(*e.left));
	if (e.right)
		mix(structural_hash(*e.right));
	return h;
}

void for_each_node(const Expr& e, const std::function<void(const Expr&)>& fn)
{
	fn(e);
	if (e.left)
		for_each_node(*e.left, fn);
	if (e.right)
		for_each_node(*e.right, fn);
}

ExprPtr transform(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&)>& fn)
{
	if (!e->left && !e->right)
		return fn(e);
	ExprPtr l = e->left ? transform(e->left, fn) : nullptr;
	ExprPtr r = e->right ? transform(e->right, fn) : nullptr;
	if (l == e->left && r == e->right)
		return fn(e);
	return fn(rebuild(*e, std::move(l), std::move(r)));
}

} // namespace nez
