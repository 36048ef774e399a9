#include "nez/transforms.hpp"

#include <deque>

#include "nez/analysis.hpp"
#include "nez/error.hpp"

namespace nez {

namespace {

using FlagSets = std::map<std::string, std::set<std::string>, std::less<>>;

std::set<std::string> flags_of(const Expr& e, const Grammar& g, const FlagSets& rel)
{
	std::set<std::string> out;
	switch (e.op) {
	case Op::If:
		out.insert(e.name);
		break;
	case Op::On:
		out = flags_of(*e.left, g, rel);
		out.erase(e.name);
		break;
	case Op::NonTerminal:
		if (auto it = rel.find(e.name); it != rel.end())
			out = it->second;
		break;
	case Op::Is:
	case Op::Isa:
		if (const auto* body = g.table_body(e.name))
			out = flags_of(**body, g, rel);
		break;
	default:
		if (e.left)
			out = flags_of(*e.left, g, rel);
		if (e.right) {
			auto r = flags_of(*e.right, g, rel);
			out.insert(r.begin(), r.end());
		}
		break;
	}
	return out;
}

FlagSets all_relevant_flags(const Grammar& g)
{
	FlagSets rel;
	for (const auto& p : g.productions)
		rel[p.name];
	for (bool changed = true; changed;) {
		changed = false;
		for (const auto& p : g.productions) {
			auto next = flags_of(*p.body, g, rel);
			auto& cur = rel[p.name];
			if (next.size() != cur.size()) {
				cur = std::move(next);
				changed = true;
			}
		}
	}
	return rel;
}

std::string clone_name(const std::string& base, const std::set<std::string>& relevant, const FlagContext& env)
{
	if (relevant.empty())
		return base;
	std::string out = base + "@";
	bool first = true;
	for (const auto& f : relevant) {
		auto it = env.find(f);
		bool v = it == env.end() || it->second;
		if (!first)
			out += ',';
		out += f + (v ? "=t" : "=f");
		first = false;
	}
	return out;
}

enum class Shape { Normal, Unit, Fail };

struct Specialized {
	ExprPtr expr;
	Shape shape = Shape::Normal;
};

class Specializer {
public:
	Specializer(const Grammar& g, const FlagSets& rel, std::size_t max_flags)
		: g_(g), rel_(rel), max_flags_(max_flags)
	{
		for (std::size_t i = 0; i < g.productions.size(); ++i)
			index_[g.productions[i].name] = i;
	}

	// Returns the clone name and queues it if new.
	std::string request(const std::string& production, const FlagContext& env)
	{
		const auto& relevant = rel_.at(production);
		if (relevant.size() > max_flags_)
			throw error("E_FLAG_EXPLOSION", "production " + production + " depends on " + std::to_string(relevant.size())
				+ " flags (limit " + std::to_string(max_flags_) + ")");
		std::string name = clone_name(production, relevant, env);
		if (seen_.insert(name).second) {
			FlagContext ctx;
			for (const auto& f : relevant) {
				auto it = env.find(f);
				ctx[f] = it == env.end() || it->second;
			}
			work_.push_back({production, name, std::move(ctx)});
		}
		return name;
	}

	Grammar run(const std::string& start_name)
	{
		// (original index, clone name) -> body, so output order is stable.
		std::map<std::pair<std::size_t, std::string>, Production> out;
		while (!work_.empty()) {
			Item item = std::move(work_.front());
			work_.pop_front();
			const Production& p = g_.productions[index_.at(item.production)];
			Specialized s = specialize(p.body, item.ctx);
			ExprPtr body = s.shape == Shape::Fail ? ex::fail() : s.shape == Shape::Unit ? ex::empty() : s.expr;
			out[{index_.at(item.production), item.name}] = Production{item.name, body, p.span};
		}
		std::vector<Production> prods;
		for (auto& [key, prod] : out)
			prods.push_back(std::move(prod));
		return Grammar::make(std::move(prods), start_name);
	}

private:
	struct Item {
		std::string production;
		std::string name;
		FlagContext ctx;
	};

	Specialized specialize(const ExprPtr& e, const FlagContext& env)
	{
		switch (e->op) {
		case Op::If: {
			auto it = env.find(e->name);
			bool value = it == env.end() || it->second;
			if (value == !e->negated)
				return {ex::empty(), Shape::Unit};
			return {ex::fail(), Shape::Fail};
		}
		case Op::On: {
			FlagContext inner = env;
			inner[e->name] = !e->negated;
			return specialize(e->left, inner);
		}
		case Op::NonTerminal:
			return {ex::nt(request(e->name, env)), Shape::Normal};
		case Op::Seq: {
			Specialized a = specialize(e->left, env);
			Specialized b = specialize(e->right, env);
			if (a.shape == Shape::Fail || b.shape == Shape::Fail)
				return {ex::fail(), Shape::Fail};
			if (a.shape == Shape::Unit)
				return b;
			if (b.shape == Shape::Unit)
				return a;
			return {same(e, a.expr, b.expr), Shape::Normal};
		}
		case Op::Choice: {
			Specialized a = specialize(e->left, env);
			if (a.shape == Shape::Unit)
				return a;
			Specialized b = specialize(e->right, env);
			if (a.shape == Shape::Fail)
				return b;
			if (b.shape == Shape::Fail)
				return a;
			return {same(e, a.expr, b.expr), Shape::Normal};
		}
		default:
			if (e->left) {
				Specialized body = specialize(e->left, env);
				return {same(e, body.expr, nullptr), Shape::Normal};
			}
			return {e, Shape::Normal};
		}
	}

	static ExprPtr same(const ExprPtr& proto, ExprPtr l, ExprPtr r)
	{
		if (l == proto->left && r == proto->right)
			return proto;
		return rebuild(*proto, std::move(l), std::move(r));
	}

	const Grammar& g_;
	const FlagSets& rel_;
	std::size_t max_flags_;
	std::map<std::string, std::size_t> index_;
	std::set<std::string> seen_;
	std::deque<Item> work_;
};

} // namespace

std::set<std::string> relevant_flags(const Grammar& g, const std::string& production)
{
	auto rel = all_relevant_flags(g);
	auto it = rel.find(production);
	return it == rel.end() ? std::set<std::string>{} : it->second;
}

std::string specialized_name(const Grammar& g, const std::string& production, const FlagContext& flags)
{
	auto rel = all_relevant_flags(g);
	return clone_name(production, rel.at(production), flags);
}

Grammar eliminate_conditions(const Grammar& g, const EliminationOptions& options)
{
	auto rel = all_relevant_flags(g);
	for (const auto& [table, body] : g.tables)
		if (!flags_of(*body, g, rel).empty())
			throw error("E_CONDITIONAL_TABLE", "definition expression of table " + table + " depends on parsing conditions");

	Specializer spec(g, rel, options.max_flags);
	std::string start = spec.request(g.start, options.entry_flags);
	if (options.roots.empty()) {
		for (const auto& p : g.productions)
			spec.request(p.name, options.entry_flags);
	}
	else {
		for (const auto& r : options.roots)
			spec.request(r, options.entry_flags);
	}
	return spec.run(start);
}

Grammar prune_unreachable(const Grammar& g)
{
	auto keep = reachable_productions(g, g.start);
	std::vector<Production> prods;
	for (const auto& p : g.productions)
		if (keep.count(p.name))
			prods.push_back(p);
	return Grammar::make(std::move(prods), g.start);
}

bool has_conditions(const Grammar& g)
{
	bool found = false;
	for (const auto& p : g.productions)
		for_each_node(*p.body, [&](const Expr& e) { found = found || e.op == Op::If || e.op == Op::On; });
	return found;
}

} // namespace nez
