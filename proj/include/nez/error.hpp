#pragma once

#include <stdexcept>
#include <string>

namespace nez {

/// Error raised by the engine and tooling. `code()` is one of the stable
/// E_* identifiers (E_STEP_LIMIT, E_GRAMMAR_INVALID, ...).
class error : public std::runtime_error {
public:
	error(std::string code, const std::string& message)
		: std::runtime_error(message), code_(std::move(code)) {}

	const std::string& code() const noexcept { return code_; }

private:
	std::string code_;
};

} // namespace nez
