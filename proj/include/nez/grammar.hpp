#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nez/expression.hpp"

namespace nez {

/// Location in grammar source text. line/column are 1-based; a default
/// span (line 0) means "no source location".
struct SourceSpan {
	std::size_t line = 0;
	std::size_t column = 0;
	std::size_t offset = 0;
	std::size_t length = 0;
};

enum class Severity { Error, Warning };

struct Diagnostic {
	Severity severity = Severity::Error;
	std::string code;
	std::string production;
	SourceSpan span;
	std::string message;
};

bool has_errors(const std::vector<Diagnostic>& diags);

struct Production {
	std::string name;
	ExprPtr body;
	SourceSpan span;
};

/// Named productions plus the derived table registry (table -> e^T) and the
/// set of condition flags referenced anywhere. Use Grammar::make so the
/// derived fields stay consistent with the productions.
struct Grammar {
	std::vector<Production> productions;
	std::string start;
	std::map<std::string, ExprPtr, std::less<>> tables;
	std::set<std::string, std::less<>> flags;

	static Grammar make(std::vector<Production> productions, std::string start = {});

	const Production* find(std::string_view name) const;
	const ExprPtr* table_body(std::string_view table) const;
};

/// Structural equality over productions (order included) and start.
bool structurally_equal(const Grammar& a, const Grammar& b);

/// Every flag name used by an If or On node.
std::set<std::string, std::less<>> collect_flags(const std::vector<Production>& productions);

} // namespace nez
