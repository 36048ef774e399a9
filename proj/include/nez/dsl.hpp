#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nez/grammar.hpp"

namespace nez {

struct GrammarLoad {
	std::optional<Grammar> grammar;
	std::vector<Diagnostic> diagnostics;

	bool ok() const { return grammar.has_value(); }
};

struct ExpressionLoad {
	ExprPtr expression;
	std::vector<Diagnostic> diagnostics;

	bool ok() const { return expression != nullptr; }
};

/// Parses `.nez` grammar text. A grammar is returned only if it also
/// passes validate(); warnings travel alongside it.
GrammarLoad parse_grammar_text(std::string_view text);

/// Parses a single expression with the same rules as a production body.
/// Names are not resolved.
ExpressionLoad parse_expression(std::string_view text);

/// Canonical printer. Re-parsing the output yields a structurally equal
/// expression / grammar.
std::string print_expression(const Expr& e);
std::string print_grammar(const Grammar& g);

} // namespace nez
