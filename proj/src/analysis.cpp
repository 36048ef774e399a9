#include "nez/analysis.hpp"

#include <algorithm>
#include <deque>

namespace nez {

ExprPtr desugar(const ExprPtr& e)
{
	return transform(e, [](const ExprPtr& n) -> ExprPtr {
		switch (n->op) {
		case Op::OneOrMore:
			return ex::seq(n->left, ex::repeat(n->left));
		case Op::Option:
			return ex::choice(n->left, ex::empty());
		default:
			return n;
		}
	});
}

Grammar desugar(const Grammar& g)
{
	std::vector<Production> out;
	out.reserve(g.productions.size());
	for (const auto& p : g.productions)
		out.push_back({p.name, desugar(p.body), p.span});
	return Grammar::make(std::move(out), g.start);
}

TableRegistry collect_tables(const std::vector<Production>& productions)
{
	TableRegistry reg;
	std::map<std::string, const Production*, std::less<>> first_use;
	std::set<std::string, std::less<>> reported;
	std::vector<std::pair<std::string, const Production*>> lookups;

	for (const auto& p : productions) {
		for_each_node(*p.body, [&](const Expr& e) {
			if (e.op == Op::Is || e.op == Op::Isa)
				lookups.emplace_back(e.name, &p);
			if (e.op != Op::Def)
				return;
			auto [it, inserted] = reg.tables.try_emplace(e.name, e.left);
			if (inserted) {
				first_use[e.name] = &p;
				return;
			}
			if (structurally_equal(*desugar(it->second), *desugar(e.left)) || reported.count(e.name))
				return;
			reported.insert(e.name);
			reg.diagnostics.push_back({Severity::Error, "E_TABLE_CONFLICT", p.name, p.span,
				"table " + e.name + " has two different definition expressions (first in " + first_use[e.name]->name + ")"});
		});
	}
	std::set<std::string, std::less<>> missing;
	for (const auto& [table, prod] : lookups) {
		if (reg.tables.count(table) || missing.count(table))
			continue;
		missing.insert(table);
		reg.diagnostics.push_back({Severity::Error, "E_TABLE_NO_DEF", prod->name, prod->span,
			"table " + table + " is matched by <is>/<isa> but never defined with <def>"});
	}
	return reg;
}

bool nullable(const Expr& e, const std::map<std::string, bool, std::less<>>& prods,
	const std::map<std::string, ExprPtr, std::less<>>& tables)
{
	switch (e.op) {
	case Op::Byte:
	case Op::Class:
	case Op::Any:
		return false;
	case Op::NonTerminal: {
		auto it = prods.find(e.name);
		return it != prods.end() && it->second;
	}
	case Op::Seq:
		return nullable(*e.left, prods, tables) && nullable(*e.right, prods, tables);
	case Op::Choice:
		return nullable(*e.left, prods, tables) || nullable(*e.right, prods, tables);
	case Op::OneOrMore:
	case Op::TreeNew:
	case Op::TreeLink:
	case Op::Def:
	case Op::Block:
	case Op::Local:
	case Op::On:
		return nullable(*e.left, prods, tables);
	case Op::Is:
	case Op::Isa: {
		auto it = tables.find(e.name);
		return it != tables.end() && nullable(*it->second, prods, tables);
	}
	default:
		// Empty, Option, Repeat, predicates, tags, Exists, Match, If
		return true;
	}
}

std::map<std::string, bool, std::less<>> nullable_productions(const Grammar& g)
{
	std::map<std::string, bool, std::less<>> result;
	for (const auto& p : g.productions)
		result[p.name] = false;
	for (bool changed = true; changed;) {
		changed = false;
		for (const auto& p : g.productions) {
			if (result[p.name])
				continue;
			if (nullable(*p.body, result, g.tables)) {
				result[p.name] = true;
				changed = true;
			}
		}
	}
	return result;
}

namespace {

void leftmost_refs(const Expr& e, const std::map<std::string, bool, std::less<>>& nul,
	const std::map<std::string, ExprPtr, std::less<>>& tables, std::set<std::string>& out, int depth = 0)
{
	switch (e.op) {
	case Op::NonTerminal:
		out.insert(e.name);
		break;
	case Op::Seq:
		leftmost_refs(*e.left, nul, tables, out, depth);
		if (nullable(*e.left, nul, tables))
			leftmost_refs(*e.right, nul, tables, out, depth);
		break;
	case Op::Choice:
		leftmost_refs(*e.left, nul, tables, out, depth);
		leftmost_refs(*e.right, nul, tables, out, depth);
		break;
	case Op::Is:
	case Op::Isa:
		// e^T runs at the current position; a table body that refers back
		// to itself through <is> would recurse without consuming.
		if (depth < 8)
			if (auto it = tables.find(e.name); it != tables.end())
				leftmost_refs(*it->second, nul, tables, out, depth + 1);
		break;
	default:
		if (is_unary(e.op))
			leftmost_refs(*e.left, nul, tables, out, depth);
		break;
	}
}

} // namespace

std::vector<Diagnostic> detect_left_recursion(const Grammar& g)
{
	auto nul = nullable_productions(g);
	std::map<std::string, std::set<std::string>> edges;
	for (const auto& p : g.productions)
		leftmost_refs(*p.body, nul, g.tables, edges[p.name]);

	std::vector<Diagnostic> out;
	for (const auto& p : g.productions) {
		std::set<std::string> seen;
		std::deque<std::string> work(edges[p.name].begin(), edges[p.name].end());
		bool cyclic = false;
		while (!work.empty() && !cyclic) {
			std::string n = work.front();
			work.pop_front();
			if (n == p.name)
				cyclic = true;
			else if (seen.insert(n).second)
				for (const auto& m : edges[n])
					work.push_back(m);
		}
		if (cyclic)
			out.push_back({Severity::Error, "E_LEFT_RECURSION", p.name, p.span,
				"production " + p.name + " can reach itself without consuming input"});
	}
	return out;
}

namespace {

bool contains_def(const Expr& e, const Grammar& g, std::set<std::string>& visited)
{
	bool found = false;
	for_each_node(e, [&](const Expr& n) {
		if (found)
			return;
		if (n.op == Op::Def) {
			found = true;
		}
		else if (n.op == Op::NonTerminal && visited.insert(n.name).second) {
			if (const auto* p = g.find(n.name))
				found = contains_def(*p->body, g, visited);
		}
	});
	return found;
}

} // namespace

std::vector<Diagnostic> check_repetition_bodies(const Grammar& g)
{
	auto nul = nullable_productions(g);
	std::vector<Diagnostic> out;
	for (const auto& p : g.productions) {
		for_each_node(*p.body, [&](const Expr& e) {
			if (e.op != Op::Repeat && e.op != Op::OneOrMore)
				return;
			if (!nullable(*e.left, nul, g.tables))
				return;
			std::set<std::string> visited;
			if (contains_def(*e.left, g, visited))
				return;
			out.push_back({Severity::Warning, "W_NULLABLE_REPETITION", p.name, p.span,
				"repetition body in " + p.name + " can succeed without consuming input"});
		});
	}
	return out;
}

std::set<std::string> reachable_productions(const Grammar& g, const std::string& from)
{
	std::set<std::string> seen;
	std::vector<std::string> work{from};
	while (!work.empty()) {
		std::string name = std::move(work.back());
		work.pop_back();
		if (!seen.insert(name).second)
			continue;
		const auto* p = g.find(name);
		if (!p)
			continue;
		for_each_node(*p->body, [&](const Expr& e) {
			if (e.op == Op::NonTerminal && !seen.count(e.name))
				work.push_back(e.name);
		});
		// Table bodies run from <is>/<isa> and count as references.
		for_each_node(*p->body, [&](const Expr& e) {
			if (e.op != Op::Is && e.op != Op::Isa)
				return;
			if (const auto* body = g.table_body(e.name))
				for_each_node(**body, [&](const Expr& n) {
					if (n.op == Op::NonTerminal && !seen.count(n.name))
						work.push_back(n.name);
				});
		});
	}
	return seen;
}

std::vector<Diagnostic> validate(const Grammar& g)
{
	std::vector<Diagnostic> out;
	if (g.productions.empty()) {
		out.push_back({Severity::Error, "E_EMPTY_GRAMMAR", {}, {}, "grammar has no productions"});
		return out;
	}
	std::set<std::string, std::less<>> names;
	for (const auto& p : g.productions)
		if (!names.insert(p.name).second)
			out.push_back({Severity::Error, "E_DUPLICATE_PRODUCTION", p.name, p.span, "production " + p.name + " is defined twice"});
	if (!names.count(g.start))
		out.push_back({Severity::Error, "E_UNDEFINED_START", g.start, {}, "start production " + g.start + " is not defined"});
	for (const auto& p : g.productions) {
		std::set<std::string> reported;
		for_each_node(*p.body, [&](const Expr& e) {
			if (e.op == Op::NonTerminal && !names.count(e.name) && reported.insert(e.name).second)
				out.push_back({Severity::Error, "E_UNDEFINED_NONTERMINAL", p.name, p.span,
					"reference to undefined production " + e.name});
		});
	}
	auto tables = collect_tables(g.productions);
	out.insert(out.end(), tables.diagnostics.begin(), tables.diagnostics.end());
	if (has_errors(out))
		return out;

	Grammar plain = desugar(g);
	auto lr = detect_left_recursion(plain);
	out.insert(out.end(), lr.begin(), lr.end());
	auto reps = check_repetition_bodies(g);
	out.insert(out.end(), reps.begin(), reps.end());
	return out;
}

} // namespace nez
