#include "nez/grammar.hpp"

#include <algorithm>

#include "nez/analysis.hpp"

namespace nez {

bool has_errors(const std::vector<Diagnostic>& diags)
{
	return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

Grammar Grammar::make(std::vector<Production> productions, std::string start)
{
	Grammar g;
	if (start.empty() && !productions.empty())
		start = productions.front().name;
	g.start = std::move(start);
	g.tables = collect_tables(productions).tables;
	g.flags = collect_flags(productions);
	g.productions = std::move(productions);
	return g;
}

const Production* Grammar::find(std::string_view name) const
{
	for (const auto& p : productions)
		if (p.name == name)
			return &p;
	return nullptr;
}

const ExprPtr* Grammar::table_body(std::string_view table) const
{
	auto it = tables.find(table);
	return it == tables.end() ? nullptr : &it->second;
}

bool structurally_equal(const Grammar& a, const Grammar& b)
{
	if (a.start != b.start || a.productions.size() != b.productions.size())
		return false;
	for (std::size_t i = 0; i < a.productions.size(); ++i) {
		const auto& pa = a.productions[i];
		const auto& pb = b.productions[i];
		if (pa.name != pb.name || !structurally_equal(*pa.body, *pb.body))
			return false;
	}
	return true;
}

std::set<std::string, std::less<>> collect_flags(const std::vector<Production>& productions)
{
	std::set<std::string, std::less<>> flags;
	for (const auto& p : productions)
		for_each_node(*p.body, [&](const Expr& e) {
			if (e.op == Op::If || e.op == Op::On)
				flags.insert(e.name);
		});
	return flags;
}

} // namespace nez
