#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "nez/grammar.hpp"

namespace nez {

/// Partial assignment of condition flags; absent flags are true.
using FlagContext = std::map<std::string, bool, std::less<>>;

/// Flags the production's language can depend on: those tested by an <if>
/// reachable from it, minus flags fixed by an enclosing <on> on every path.
std::set<std::string> relevant_flags(const Grammar& g, const std::string& production);

struct EliminationOptions {
	/// A production whose relevant-flag set is larger raises E_FLAG_EXPLOSION.
	std::size_t max_flags = 12;
	/// Productions kept as entry points; empty means every production.
	std::vector<std::string> roots;
	/// Flag values in effect at every entry point.
	FlagContext entry_flags;
};

/// Compiles <if>/<on> away by cloning each production per assignment of its
/// relevant flags. Clones are named `Name@FLAG=t,FLAG2=f` (flags sorted);
/// productions with no relevant flags keep their name.
Grammar eliminate_conditions(const Grammar& g, const EliminationOptions& options = {});

/// Name of the clone that stands for `production` under `flags` in the
/// output of eliminate_conditions.
std::string specialized_name(const Grammar& g, const std::string& production, const FlagContext& flags = {});

/// Drops productions not reachable from the start production.
Grammar prune_unreachable(const Grammar& g);

/// True if any <if> or <on> node remains.
bool has_conditions(const Grammar& g);

} // namespace nez
