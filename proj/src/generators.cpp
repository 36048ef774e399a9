#include "nez/generators.hpp"

#include <array>
#include <random>

#include "nez/error.hpp"

namespace nez {

namespace {

// std distributions are implementation-defined, so draw from the raw engine.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : engine_(seed) {}

	std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
	bool chance(std::size_t one_in) { return below(one_in) == 0; }

	template <class C>
	const auto& pick(const C& items) { return items[below(items.size())]; }

private:
	std::mt19937_64 engine_;
};

const std::array<const char*, 12> kWords = {"alpha", "beta", "gamma", "delta", "omega", "kappa", "sigma", "zeta",
	"theta", "lambda", "rho", "tau"};

// ---------------------------------------------------------------------------

class TypedefProgram {
public:
	TypedefProgram(Rng& rng) : rng_(rng) {}

	std::string run(std::size_t size)
	{
		while (out_.size() < size) {
			std::size_t r = rng_.below(10);
			if (r < 3)
				typedef_line("", "T" + std::to_string(counter_++), types_);
			else if (r < 5)
				global();
			else
				function();
			if (rng_.chance(8))
				out_ += "/* generated */\n";
		}
		return std::move(out_);
	}

private:
	std::string type_name(const std::vector<std::string>& scoped)
	{
		static const std::array<const char*, 6> builtin = {"int", "long", "float", "double", "char", "unsigned int"};
		if (!scoped.empty() && rng_.chance(2))
			return rng_.pick(scoped);
		if (!types_.empty() && rng_.chance(2))
			return rng_.pick(types_);
		return rng_.pick(builtin);
	}

	void typedef_line(const std::string& indent, const std::string& name, std::vector<std::string>& scope)
	{
		out_ += indent + "typedef " + type_name(scope) + " " + name + ";\n";
		scope.push_back(name);
	}

	std::string atom(const std::vector<std::string>& vars, const std::vector<std::string>& scoped, int depth)
	{
		std::size_t r = rng_.below(depth > 1 ? 3 : 6);
		if (r == 0 || vars.empty())
			return std::to_string(rng_.below(1000));
		if (r == 1 || r == 2)
			return rng_.pick(vars);
		if (r == 3)
			return "(" + type_name(scoped) + ") -" + atom(vars, scoped, depth + 1);
		if (r == 4)
			return "(" + expr(vars, scoped, depth + 1) + ")";
		return "-" + atom(vars, scoped, depth + 1);
	}

	std::string expr(const std::vector<std::string>& vars, const std::vector<std::string>& scoped, int depth = 0)
	{
		static const std::array<const char*, 4> ops = {" + ", " - ", " * ", " / "};
		std::string e = atom(vars, scoped, depth);
		for (std::size_t n = rng_.below(3); n > 0; --n)
			e += rng_.pick(ops) + atom(vars, scoped, depth);
		return e;
	}

	void global()
	{
		std::string name = "g" + std::to_string(counter_++);
		out_ += type_name({}) + " " + name + " = " + expr(globals_, {}) + ";\n";
		globals_.push_back(name);
	}

	void function()
	{
		out_ += "int f" + std::to_string(counter_++) + "() {\n";
		std::vector<std::string> vars = globals_;
		body("  ", vars, {}, 0);
		out_ += "  return " + expr(vars, {}) + ";\n}\n";
	}

	void body(const std::string& indent, std::vector<std::string> vars, std::vector<std::string> scoped, int depth)
	{
		for (std::size_t n = 1 + rng_.below(5); n > 0; --n) {
			std::size_t r = rng_.below(depth < 2 ? 4 : 3);
			if (r == 0 || vars.empty()) {
				std::string name = "v" + std::to_string(counter_++);
				out_ += indent + type_name(scoped) + " " + name + " = " + expr(vars, scoped) + ";\n";
				vars.push_back(name);
			}
			else if (r == 1) {
				out_ += indent + rng_.pick(vars) + " = " + expr(vars, scoped) + ";\n";
			}
			else if (r == 2) {
				out_ += indent + "printf(\"%d\\n\", " + expr(vars, scoped) + ");\n";
			}
			else {
				out_ += indent + "{\n";
				std::vector<std::string> inner = scoped;
				typedef_line(indent + "  ", "L" + std::to_string(counter_++), inner);
				body(indent + "  ", vars, inner, depth + 1);
				out_ += indent + "}\n";
			}
		}
	}

	Rng& rng_;
	std::string out_;
	std::vector<std::string> types_;
	std::vector<std::string> globals_;
	std::size_t counter_ = 0;
};

// ---------------------------------------------------------------------------

std::string heredoc_program(std::size_t size, Rng& rng)
{
	std::string out;
	std::size_t k = 0;
	auto word = [&] { return std::string(rng.pick(kWords)); };
	auto words = [&](std::size_t n, const char* sep) {
		std::string s = word();
		while (--n > 0)
			s += sep + word();
		return s;
	};
	while (out.size() < size) {
		std::size_t r = rng.below(3);
		if (r == 0) {
			out += "puts " + words(1 + rng.below(3), ", ") + "\n";
			continue;
		}
		std::string delim = "EOT" + std::to_string(k++);
		if (r == 1)
			out += "print <<" + delim + "\n";
		else
			out += "puts " + word() + ", <<" + delim + ", " + word() + "\n";
		for (std::size_t n = 1 + rng.below(5); n > 0; --n) {
			std::size_t kind = rng.below(6);
			if (kind == 0)
				out += "\n";
			else if (kind == 1)
				out += delim + "x " + words(2, " ") + "\n";
			else
				out += words(1 + rng.below(6), " ") + "\n";
		}
		out += delim + "\n";
	}
	return out;
}

// ---------------------------------------------------------------------------

class IndentProgram {
public:
	IndentProgram(Rng& rng) : rng_(rng) {}

	std::string run(std::size_t size)
	{
		while (out_.size() < size)
			statement("", 0);
		return std::move(out_);
	}

private:
	std::string name()
	{
		static const std::array<const char*, 6> names = {"a", "b", "count", "x1", "total", "item_2"};
		return rng_.pick(names);
	}

	std::string term()
	{
		if (rng_.chance(2))
			return name();
		return std::to_string(rng_.below(100));
	}

	std::string expr()
	{
		static const std::array<const char*, 3> ops = {" + ", " - ", " * "};
		std::string e = term();
		for (std::size_t n = rng_.below(3); n > 0; --n)
			e += rng_.pick(ops) + term();
		return e;
	}

	void simple(const std::string& indent)
	{
		if (rng_.chance(6)) {
			out_ += indent + "pass\n";
			return;
		}
		out_ += indent + name() + " = ";
		if (rng_.chance(5))
			// Continuation line inside parentheses ignores the layout.
			out_ += "(" + term() + " +\n" + std::string(rng_.below(9), ' ') + expr() + ")\n";
		else
			out_ += expr() + "\n";
	}

	void block(const std::string& indent, int depth)
	{
		std::string inner = indent + std::string(2 + 2 * rng_.below(2), ' ');
		for (std::size_t n = 1 + rng_.below(4); n > 0; --n)
			statement(inner, depth + 1);
	}

	void statement(const std::string& indent, int depth)
	{
		if (rng_.chance(10))
			out_ += "\n";
		std::size_t r = rng_.below(depth < 3 ? 6 : 1);
		if (r == 1 || r == 2) {
			out_ += indent + (r == 1 ? "if " : "while ") + expr() + ":\n";
			block(indent, depth);
			if (r == 1 && rng_.chance(3)) {
				out_ += indent + "else:\n";
				block(indent, depth);
			}
		}
		else if (r == 3) {
			out_ += indent + "if " + expr() + ": " + name() + " = " + expr() + "\n";
		}
		else {
			simple(indent);
		}
	}

	Rng& rng_;
	std::string out_;
};

// ---------------------------------------------------------------------------

std::string element(const std::vector<std::string>& names, std::size_t level)
{
	if (level == names.size())
		return {};
	const std::string& n = names[level];
	return "<" + n + ">" + element(names, level + 1) + "</" + n + ">";
}

std::size_t element_cost(const std::vector<std::string>& names)
{
	std::size_t c = 0;
	for (const auto& n : names)
		c += 5 + 2 * n.size();
	return c;
}

std::string xml_document(std::size_t size, Rng& rng)
{
	constexpr std::size_t max_depth = 8;
	std::string out;
	// The first element uses one-letter names a, b, c, ... so small sizes give
	// the smallest nesting that fits.
	std::vector<std::string> names;
	for (std::size_t d = 0; d < std::max<std::size_t>(1, std::min(max_depth, size / 7)); ++d)
		names.push_back(std::string(1, static_cast<char>('a' + d)));
	out += element(names, 0);
	static const char alnum[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
	while (out.size() < size) {
		std::size_t remaining = size - out.size();
		names.clear();
		std::size_t depth = 1 + rng.below(max_depth);
		for (std::size_t d = 0; d < depth; ++d) {
			std::string n(1, alnum[rng.below(52)]);
			for (std::size_t extra = rng.below(3); extra > 0; --extra)
				n += alnum[rng.below(62)];
			names.push_back(std::move(n));
		}
		while (names.size() > 1 && element_cost(names) > remaining)
			names.pop_back();
		out += element(names, 0);
	}
	return out;
}

} // namespace

std::vector<std::string> generator_kinds()
{
	return {"typedef-C-mini", "heredoc-mini", "indent-mini", "xml-nested", "backtrack"};
}

std::string generate_input(std::string_view kind, std::size_t size, std::uint64_t seed)
{
	if (size == 0)
		throw error("E_USAGE", "generator size must be positive");
	Rng rng(seed * 0x9e3779b97f4a7c15ULL + size);
	if (kind == "typedef-C-mini")
		return TypedefProgram(rng).run(size);
	if (kind == "heredoc-mini")
		return heredoc_program(size, rng);
	if (kind == "indent-mini")
		return IndentProgram(rng).run(size);
	if (kind == "xml-nested")
		return xml_document(size, rng);
	if (kind == "backtrack")
		return std::string(size > 1 ? size - 1 : 1, 'a') + "y";
	throw error("E_UNKNOWN_GENERATOR", "unknown generator " + std::string(kind));
}

} // namespace nez
