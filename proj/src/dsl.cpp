#include "nez/dsl.hpp"

#include <cctype>
#include <cstdio>

#include "nez/analysis.hpp"

namespace nez {

namespace {

struct SyntaxError {
	std::size_t offset;
	std::size_t length;
	std::string message;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

int hex_value(char c)
{
	if (c >= '0' && c <= '9')
		return c - '0';
	if (c >= 'a' && c <= 'f')
		return c - 'a' + 10;
	if (c >= 'A' && c <= 'F')
		return c - 'A' + 10;
	return -1;
}

class Reader {
public:
	explicit Reader(std::string_view text) : text_(text) {}

	std::vector<Production> grammar(std::string& start)
	{
		std::vector<Production> prods;
		skip();
		while (!eof()) {
			if (peek() == '@') {
				std::size_t at = pos_;
				++pos_;
				std::string word = plain_name("directive");
				if (word != "start")
					throw SyntaxError{at, word.size() + 1, "unknown directive @" + word};
				skip();
				start = production_name();
				skip();
				continue;
			}
			std::size_t header = pos_;
			if (!ident_start(peek()))
				throw SyntaxError{pos_, 1, "expected production name"};
			std::string name = production_name();
			std::size_t header_len = pos_ - header;
			skip();
			expect('=', "expected '=' after production name");
			ExprPtr body = choice();
			skip();
			if (peek() == ';') {
				++pos_;
				skip();
			}
			prods.push_back({std::move(name), std::move(body), span_at(header, header_len)});
		}
		return prods;
	}

	ExprPtr single()
	{
		ExprPtr e = choice();
		skip();
		if (!eof())
			throw SyntaxError{pos_, 1, std::string("unexpected '") + peek() + "'"};
		return e;
	}

	SourceSpan span_at(std::size_t offset, std::size_t length) const
	{
		SourceSpan s;
		s.offset = std::min(offset, text_.size());
		s.length = std::min(length, text_.size() - s.offset);
		s.line = 1;
		s.column = 1;
		for (std::size_t i = 0; i < s.offset; ++i) {
			if (text_[i] == '\n') {
				++s.line;
				s.column = 1;
			}
			else {
				++s.column;
			}
		}
		return s;
	}

private:
	bool eof() const { return pos_ >= text_.size(); }
	char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

	void skip()
	{
		while (!eof()) {
			char c = peek();
			if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
				++pos_;
			}
			else if (c == '/' && peek(1) == '/') {
				while (!eof() && peek() != '\n')
					++pos_;
			}
			else if (c == '/' && peek(1) == '*') {
				std::size_t open = pos_;
				pos_ += 2;
				while (!eof() && !(peek() == '*' && peek(1) == '/'))
					++pos_;
				if (eof())
					throw SyntaxError{open, 2, "unterminated comment"};
				pos_ += 2;
			}
			else {
				break;
			}
		}
	}

	void expect(char c, const char* message)
	{
		skip();
		if (peek() != c)
			throw SyntaxError{pos_, eof() ? 0u : 1u, message};
		++pos_;
	}

	std::string plain_name(const char* what)
	{
		if (!ident_start(peek()))
			throw SyntaxError{pos_, eof() ? 0u : 1u, std::string("expected ") + what + " name"};
		std::size_t begin = pos_;
		while (ident_char(peek()))
			++pos_;
		return std::string(text_.substr(begin, pos_ - begin));
	}

	// Production names may carry a specialization suffix such as
	// `WS@NL=t,LO=f`, produced by condition elimination.
	std::string production_name()
	{
		std::size_t begin = pos_;
		plain_name("production");
		if (peek() == '@') {
			++pos_;
			for (;;) {
				plain_name("flag");
				if (peek() != '=' || (peek(1) != 't' && peek(1) != 'f') || ident_char(peek(2)))
					throw SyntaxError{pos_, 1, "malformed specialization suffix"};
				pos_ += 2;
				if (peek() != ',')
					break;
				++pos_;
			}
		}
		return std::string(text_.substr(begin, pos_ - begin));
	}

	// A name followed by '=' starts the next production.
	bool at_production_header()
	{
		if (peek() == '@')
			return true;
		if (!ident_start(peek()))
			return false;
		std::size_t save = pos_;
		bool header = false;
		try {
			production_name();
			skip();
			header = peek() == '=';
		}
		catch (const SyntaxError&) {
			header = false;
		}
		pos_ = save;
		return header;
	}

	ExprPtr choice()
	{
		std::vector<ExprPtr> alts{sequence()};
		for (;;) {
			skip();
			if (peek() != '/')
				break;
			++pos_;
			alts.push_back(sequence());
		}
		return ex::choice(std::move(alts));
	}

	ExprPtr sequence()
	{
		std::vector<ExprPtr> items;
		for (;;) {
			skip();
			char c = peek();
			if (eof() || c == '/' || c == ')' || c == '>' || c == '}' || c == ';')
				break;
			if (at_production_header())
				break;
			items.push_back(prefix());
		}
		if (items.empty())
			throw SyntaxError{pos_, eof() ? 0u : 1u, "expected expression"};
		return ex::seq(std::move(items));
	}

	ExprPtr prefix()
	{
		skip();
		if (peek() == '&') {
			++pos_;
			return ex::and_(prefix());
		}
		if (peek() == '!') {
			++pos_;
			return ex::not_(prefix());
		}
		return suffix();
	}

	ExprPtr suffix()
	{
		ExprPtr e = primary();
		for (;;) {
			char c = peek();
			if (c == '?')
				e = ex::option(e);
			else if (c == '*')
				e = ex::repeat(e);
			else if (c == '+')
				e = ex::one_or_more(e);
			else
				break;
			++pos_;
		}
		return e;
	}

	ExprPtr primary()
	{
		skip();
		std::size_t begin = pos_;
		char c = peek();
		if (c == '\'')
			return literal();
		if (c == '[')
			return char_class();
		if (c == '.') {
			++pos_;
			return ex::any();
		}
		if (c == '(') {
			++pos_;
			ExprPtr e = choice();
			expect(')', "expected ')'");
			return e;
		}
		if (c == '{') {
			++pos_;
			ExprPtr e = choice();
			expect('}', "expected '}'");
			return ex::tree_new(e);
		}
		if (c == '$') {
			++pos_;
			if (peek() != '(')
				throw SyntaxError{pos_, 1, "expected '(' after '$'"};
			++pos_;
			ExprPtr e = choice();
			expect(')', "expected ')'");
			return ex::tree_link(e);
		}
		if (c == '#') {
			++pos_;
			return ex::tree_tag(plain_name("tag"));
		}
		if (c == '<')
			return angle();
		if (ident_start(c))
			return ex::nt(production_name());
		throw SyntaxError{begin, eof() ? 0u : 1u, eof() ? "unexpected end of input" : std::string("unexpected '") + c + "'"};
	}

	ExprPtr angle()
	{
		std::size_t open = pos_;
		++pos_;
		skip();
		std::string keyword = plain_name("operator");
		skip();
		ExprPtr e;
		if (keyword == "def" || keyword == "block" || keyword == "local") {
			std::string table = plain_name("table");
			ExprPtr body = choice();
			if (keyword == "def")
				e = ex::def(table, body);
			else if (keyword == "block")
				e = ex::block(table, body);
			else
				e = ex::local(table, body);
		}
		else if (keyword == "exists" || keyword == "match" || keyword == "is" || keyword == "isa") {
			std::string table = plain_name("table");
			if (keyword == "exists")
				e = ex::exists(table);
			else if (keyword == "match")
				e = ex::match(table);
			else if (keyword == "is")
				e = ex::is(table);
			else
				e = ex::isa(table);
		}
		else if (keyword == "if" || keyword == "on") {
			bool negated = false;
			if (peek() == '!') {
				negated = true;
				++pos_;
				skip();
			}
			std::string flag = plain_name("flag");
			e = keyword == "if" ? ex::if_(flag, negated) : ex::on(flag, negated, choice());
		}
		else {
			throw SyntaxError{open, keyword.size() + 1, "unknown operator <" + keyword + ">"};
		}
		skip();
		if (peek() != '>')
			throw SyntaxError{eof() ? pos_ : pos_, eof() ? 0u : 1u, "expected '>' to close <" + keyword + ">"};
		++pos_;
		return e;
	}

	int escape(std::size_t quote_open)
	{
		std::size_t at = pos_;
		++pos_; // backslash
		if (eof())
			throw SyntaxError{quote_open, 1, "unterminated escape"};
		char c = text_[pos_++];
		switch (c) {
		case 'n': return '\n';
		case 'r': return '\r';
		case 't': return '\t';
		case '\\': return '\\';
		case '\'': return '\'';
		case '"': return '"';
		case ']': return ']';
		case '[': return '[';
		case '-': return '-';
		case 'x': {
			int hi = hex_value(peek());
			int lo = hex_value(peek(1));
			if (hi < 0 || lo < 0)
				throw SyntaxError{at, 2, "malformed \\x escape"};
			pos_ += 2;
			return hi * 16 + lo;
		}
		default:
			throw SyntaxError{at, 2, std::string("unknown escape \\") + c};
		}
	}

	ExprPtr literal()
	{
		std::size_t open = pos_;
		++pos_;
		std::string bytes;
		for (;;) {
			if (eof() || peek() == '\n')
				throw SyntaxError{open, 1, "unterminated literal"};
			char c = peek();
			if (c == '\'') {
				++pos_;
				break;
			}
			if (c == '\\')
				bytes.push_back(static_cast<char>(escape(open)));
			else {
				bytes.push_back(c);
				++pos_;
			}
		}
		return ex::literal(bytes);
	}

	ExprPtr char_class()
	{
		std::size_t open = pos_;
		++pos_;
		std::vector<ByteRange> ranges;
		auto next = [&]() -> int {
			if (eof() || peek() == '\n')
				throw SyntaxError{open, 1, "unterminated character class"};
			if (peek() == '\\')
				return escape(open);
			return static_cast<unsigned char>(text_[pos_++]);
		};
		while (peek() != ']') {
			std::size_t item = pos_;
			int lo = next();
			int hi = lo;
			if (peek() == '-' && peek(1) != ']' && pos_ + 1 < text_.size()) {
				++pos_;
				hi = next();
				if (hi < lo)
					throw SyntaxError{item, pos_ - item, "character range is reversed"};
			}
			ranges.push_back({static_cast<std::uint8_t>(lo), static_cast<std::uint8_t>(hi)});
		}
		++pos_;
		if (ranges.empty())
			throw SyntaxError{open, 2, "empty character class"};
		return ex::cls(std::move(ranges));
	}

	std::string_view text_;
	std::size_t pos_ = 0;
};

Diagnostic syntax_diagnostic(const Reader& r, const SyntaxError& err)
{
	return {Severity::Error, "E_SYNTAX", {}, r.span_at(err.offset, err.length), err.message};
}

} // namespace

GrammarLoad parse_grammar_text(std::string_view text)
{
	GrammarLoad out;
	Reader reader(text);
	std::vector<Production> prods;
	std::string start;
	try {
		prods = reader.grammar(start);
	}
	catch (const SyntaxError& err) {
		out.diagnostics.push_back(syntax_diagnostic(reader, err));
		return out;
	}
	Grammar g = Grammar::make(std::move(prods), std::move(start));
	out.diagnostics = validate(g);
	if (!has_errors(out.diagnostics))
		out.grammar = std::move(g);
	return out;
}

ExpressionLoad parse_expression(std::string_view text)
{
	ExpressionLoad out;
	Reader reader(text);
	try {
		out.expression = reader.single();
	}
	catch (const SyntaxError& err) {
		out.diagnostics.push_back(syntax_diagnostic(reader, err));
	}
	return out;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

enum Level { LChoice = 0, LSeq = 1, LPrefix = 2, LSuffix = 3, LPrimary = 4 };

bool is_chain(const Expr& e)
{
	if (e.op != Op::Seq || e.left->op != Op::Byte)
		return false;
	return e.right->op == Op::Byte || is_chain(*e.right);
}

void put_byte(std::string& out, std::uint8_t b, bool in_class)
{
	switch (b) {
	case '\n': out += "\\n"; return;
	case '\r': out += "\\r"; return;
	case '\t': out += "\\t"; return;
	case '\\': out += "\\\\"; return;
	default: break;
	}
	if (!in_class && b == '\'') {
		out += "\\'";
		return;
	}
	if (in_class && (b == ']' || b == '[' || b == '-')) {
		out += '\\';
		out += static_cast<char>(b);
		return;
	}
	if (b >= 0x20 && b < 0x7f) {
		out += static_cast<char>(b);
		return;
	}
	char buf[5];
	std::snprintf(buf, sizeof buf, "\\x%02X", b);
	out += buf;
}

Level level_of(const Expr& e)
{
	switch (e.op) {
	case Op::Choice: return LChoice;
	case Op::Seq: return is_chain(e) ? LPrimary : LSeq;
	case Op::And:
	case Op::Not: return LPrefix;
	case Op::Option:
	case Op::Repeat:
	case Op::OneOrMore: return LSuffix;
	default: return LPrimary;
	}
}

void print(std::string& out, const Expr& e, Level ctx);

void print_at(std::string& out, const Expr& e, Level need)
{
	if (level_of(e) < need) {
		out += '(';
		print(out, e, LChoice);
		out += ')';
	}
	else {
		print(out, e, need);
	}
}

void print(std::string& out, const Expr& e, Level ctx)
{
	(void)ctx;
	switch (e.op) {
	case Op::Empty:
		out += "''";
		break;
	case Op::Byte:
		out += '\'';
		put_byte(out, e.byte, false);
		out += '\'';
		break;
	case Op::Class:
		out += '[';
		for (auto r : e.ranges) {
			put_byte(out, r.lo, true);
			if (r.hi != r.lo) {
				out += '-';
				put_byte(out, r.hi, true);
			}
		}
		out += ']';
		break;
	case Op::Any:
		out += '.';
		break;
	case Op::NonTerminal:
		out += e.name;
		break;
	case Op::Seq:
		if (is_chain(e)) {
			out += '\'';
			for (const Expr* n = &e;; n = n->right.get()) {
				if (n->op == Op::Byte) {
					put_byte(out, n->byte, false);
					break;
				}
				put_byte(out, n->left->byte, false);
			}
			out += '\'';
			break;
		}
		print_at(out, *e.left, LPrefix);
		out += ' ';
		print_at(out, *e.right, LSeq);
		break;
	case Op::Choice:
		print_at(out, *e.left, LSeq);
		out += " / ";
		print_at(out, *e.right, LChoice);
		break;
	case Op::Option:
	case Op::Repeat:
	case Op::OneOrMore:
		print_at(out, *e.left, LPrimary);
		out += e.op == Op::Option ? '?' : e.op == Op::Repeat ? '*' : '+';
		break;
	case Op::And:
	case Op::Not:
		out += e.op == Op::And ? '&' : '!';
		print_at(out, *e.left, LSuffix);
		break;
	case Op::TreeNew:
		out += "{ ";
		print(out, *e.left, LChoice);
		out += " }";
		break;
	case Op::TreeLink:
		out += "$(";
		print(out, *e.left, LChoice);
		out += ')';
		break;
	case Op::TreeTag:
		out += '#';
		out += e.name;
		break;
	case Op::Def:
	case Op::Block:
	case Op::Local:
		out += e.op == Op::Def ? "<def " : e.op == Op::Block ? "<block " : "<local ";
		out += e.name;
		out += ' ';
		print(out, *e.left, LChoice);
		out += '>';
		break;
	case Op::Exists:
	case Op::Match:
	case Op::Is:
	case Op::Isa:
		out += '<';
		out += e.op == Op::Exists ? "exists" : e.op == Op::Match ? "match" : e.op == Op::Is ? "is" : "isa";
		out += ' ';
		out += e.name;
		out += '>';
		break;
	case Op::If:
		out += e.negated ? "<if !" : "<if ";
		out += e.name;
		out += '>';
		break;
	case Op::On:
		out += e.negated ? "<on !" : "<on ";
		out += e.name;
		out += ' ';
		print(out, *e.left, LChoice);
		out += '>';
		break;
	}
}

} // namespace

std::string print_expression(const Expr& e)
{
	std::string out;
	print(out, e, LChoice);
	return out;
}

std::string print_grammar(const Grammar& g)
{
	std::string out;
	if (!g.productions.empty() && g.start != g.productions.front().name)
		out += "@start " + g.start + "\n";
	for (const auto& p : g.productions) {
		out += p.name;
		out += " = ";
		out += print_expression(*p.body);
		out += '\n';
	}
	return out;
}

} // namespace nez
