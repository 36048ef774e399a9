#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "nez/grammar.hpp"

namespace nez {

/// Rewrites OneOrMore(e) to e e* and Option(e) to e / ''. Idempotent.
ExprPtr desugar(const ExprPtr& e);
Grammar desugar(const Grammar& g);

struct TableRegistry {
	std::map<std::string, ExprPtr, std::less<>> tables;
	std::vector<Diagnostic> diagnostics;
};

/// Finds the single body of every <def T e>, kept as first written. Bodies are compared after
/// desugaring; unequal bodies for one table raise E_TABLE_CONFLICT, and
/// <is>/<isa> on a table with no <def> raise E_TABLE_NO_DEF.
TableRegistry collect_tables(const std::vector<Production>& productions);

/// Least fixpoint of "can succeed without consuming input" per production.
std::map<std::string, bool, std::less<>> nullable_productions(const Grammar& g);
bool nullable(const Expr& e, const std::map<std::string, bool, std::less<>>& productions,
	const std::map<std::string, ExprPtr, std::less<>>& tables);

std::vector<Diagnostic> detect_left_recursion(const Grammar& g);
std::vector<Diagnostic> check_repetition_bodies(const Grammar& g);
std::set<std::string> reachable_productions(const Grammar& g, const std::string& from);

/// Full static check: names resolve, start exists, tables are consistent,
/// no left recursion; plus repetition warnings.
std::vector<Diagnostic> validate(const Grammar& g);

} // namespace nez
