#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nez {

/// Synthetic program text for a corpus grammar, roughly `size` bytes long.
/// Output depends only on (kind, size, seed). Known kinds are listed by
/// generator_kinds(); anything else raises E_UNKNOWN_GENERATOR.
std::string generate_input(std::string_view kind, std::size_t size, std::uint64_t seed = 0);

std::vector<std::string> generator_kinds();

} // namespace nez
