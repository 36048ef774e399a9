#include "nez/engine.hpp"

#include <algorithm>

#include "nez/analysis.hpp"
#include "nez/error.hpp"

namespace nez {

// ---------------------------------------------------------------------------
// Program

Program Program::compile(const Grammar& g)
{
	auto diags = validate(g);
	if (has_errors(diags)) {
		std::string msg = "grammar has errors";
		for (const auto& d : diags)
			if (d.severity == Severity::Error) {
				msg += ": " + d.code + " " + d.message;
				break;
			}
		throw error("E_GRAMMAR_INVALID", msg);
	}
	Grammar plain = desugar(g);
	Program p;
	p.nodes_.push_back(Node{}); // node 0 is a shared Empty
	for (const auto& prod : plain.productions)
		p.productions_.push_back({prod.name, 0});
	for (const auto& [name, body] : plain.tables)
		p.tables_.push_back({name, std::nullopt});
	for (const auto& flag : plain.flags)
		p.flags_.push_back(flag);
	for (std::size_t i = 0; i < plain.productions.size(); ++i)
		p.productions_[i].body = p.emit(*plain.productions[i].body);
	std::size_t t = 0;
	for (const auto& [name, body] : plain.tables)
		p.tables_[t++].body = p.emit(*body);
	return p;
}

NodeId Program::add(const Expr& e) { return emit(*desugar(std::make_shared<Expr>(e))); }

std::optional<std::size_t> Program::production_index(std::string_view name) const
{
	for (std::size_t i = 0; i < productions_.size(); ++i)
		if (productions_[i].name == name)
			return i;
	return std::nullopt;
}

std::optional<std::size_t> Program::table_index(std::string_view name) const
{
	for (std::size_t i = 0; i < tables_.size(); ++i)
		if (tables_[i].name == name)
			return i;
	return std::nullopt;
}

std::optional<std::size_t> Program::flag_index(std::string_view name) const
{
	for (std::size_t i = 0; i < flags_.size(); ++i)
		if (flags_[i] == name)
			return i;
	return std::nullopt;
}

std::uint32_t Program::intern_table(const std::string& name)
{
	if (auto i = table_index(name))
		return static_cast<std::uint32_t>(*i);
	tables_.push_back({name, std::nullopt});
	return static_cast<std::uint32_t>(tables_.size() - 1);
}

std::uint32_t Program::intern_flag(const std::string& name)
{
	if (auto i = flag_index(name))
		return static_cast<std::uint32_t>(*i);
	flags_.push_back(name);
	return static_cast<std::uint32_t>(flags_.size() - 1);
}

NodeId Program::emit(const Expr& e)
{
	Node n;
	n.op = e.op;
	n.byte = e.byte;
	n.negated = e.negated;
	if (e.left)
		n.left = emit(*e.left);
	if (e.right)
		n.right = emit(*e.right);
	switch (e.op) {
	case Op::Option:
	case Op::OneOrMore:
		throw error("E_GRAMMAR_INVALID", "sugar survived desugaring");
	case Op::Class: {
		std::array<std::uint64_t, 4> bits{};
		for (auto r : e.ranges)
			for (int b = r.lo; b <= r.hi; ++b)
				bits[b >> 6] |= std::uint64_t{1} << (b & 63);
		classes_.push_back(bits);
		n.arg = static_cast<std::uint32_t>(classes_.size() - 1);
		break;
	}
	case Op::NonTerminal: {
		auto i = production_index(e.name);
		if (!i)
			throw error("E_GRAMMAR_INVALID", "reference to undefined production " + e.name);
		n.arg = static_cast<std::uint32_t>(*i);
		break;
	}
	case Op::TreeTag:
		tags_.push_back(e.name);
		n.arg = static_cast<std::uint32_t>(tags_.size() - 1);
		break;
	case Op::Def:
	case Op::Exists:
	case Op::Match:
	case Op::Is:
	case Op::Isa:
	case Op::Block:
	case Op::Local:
		// Tables with a <def> are registered before any body is emitted.
		if ((e.op == Op::Is || e.op == Op::Isa) && !table_index(e.name))
			throw error("E_GRAMMAR_INVALID", "table " + e.name + " has no definition expression");
		n.arg = intern_table(e.name);
		break;
	case Op::If:
	case Op::On:
		n.arg = intern_flag(e.name);
		break;
	default:
		break;
	}
	if (e.op == Op::Empty)
		return 0;
	nodes_.push_back(n);
	return static_cast<NodeId>(nodes_.size() - 1);
}

// ---------------------------------------------------------------------------
// Machine

std::uint64_t default_step_budget(std::size_t input_length, std::size_t production_count)
{
	return 256u * std::max<std::uint64_t>(1, input_length) * std::max<std::uint64_t>(1, production_count);
}

Machine::Machine(const Program& program, std::string_view input, const ParseOptions& options, CallCache* cache)
	: program_(program)
	, input_(input)
	, tables_(program.table_count())
	, flags_(program.flag_count(), true)
	, budget_(options.step_budget.value_or(default_step_budget(input.size(), program.production_count())))
	, max_depth_(options.max_depth)
	, build_tree_(options.build_tree)
	, rollback_tables_(!options.keep_failed_table_state)
	, cache_(program.flag_count() <= 64 ? cache : nullptr)
{
	for (const auto& [name, value] : options.flags)
		if (auto f = program.flag_index(name))
			flags_[*f] = value;
}

StateSnapshot Machine::snapshot() const
{
	StateSnapshot s;
	s.position = pos_;
	s.tree_mark = tree_log_.size();
	s.table_depths.reserve(tables_.size());
	for (const auto& t : tables_)
		s.table_depths.push_back(t.size());
	return s;
}

void Machine::restore(const StateSnapshot& s)
{
	pos_ = s.position;
	tree_log_.resize(std::min(tree_log_.size(), s.tree_mark));
	bool changed = false;
	for (std::size_t t = 0; t < tables_.size() && t < s.table_depths.size(); ++t) {
		if (tables_[t].size() > s.table_depths[t]) {
			tables_[t].resize(s.table_depths[t]);
			changed = true;
		}
	}
	if (changed)
		++version_;
}

void Machine::push_symbol(std::size_t t, std::string symbol)
{
	tables_[t].push_back(std::move(symbol));
	++version_;
}

std::uint64_t Machine::flag_mask() const
{
	std::uint64_t m = 0;
	for (std::size_t i = 0; i < flags_.size(); ++i)
		if (flags_[i])
			m |= std::uint64_t{1} << i;
	return m;
}

Machine::Mark Machine::mark()
{
	Mark m{pos_, tree_log_.size(), version_, depth_buf_.size()};
	for (const auto& t : tables_)
		depth_buf_.push_back(t.size());
	return m;
}

void Machine::rewind(const Mark& m)
{
	pos_ = m.pos;
	tree_log_.resize(m.tree);
	if (version_ == m.version || !rollback_tables_)
		return;
	bool changed = false;
	for (std::size_t t = 0; t < tables_.size(); ++t) {
		std::size_t depth = depth_buf_[m.depth_base + t];
		if (tables_[t].size() > depth) {
			tables_[t].resize(depth);
			changed = true;
		}
	}
	if (changed)
		++version_;
}

bool Machine::eval(NodeId id)
{
	if (++steps_ > budget_)
		throw error("E_STEP_LIMIT", "step budget of " + std::to_string(budget_) + " exceeded");
	return eval_node(program_.node(id));
}

bool Machine::call(std::size_t production)
{
	if (++depth_ > max_depth_)
		throw error("E_DEPTH_LIMIT", "nonterminal nesting exceeds " + std::to_string(max_depth_));
	NodeId body = program_.production_body(production);
	bool ok;
	if (cache_ && suppress_failures_ == 0) {
		CallKey key{static_cast<std::uint32_t>(production), pos_, version_, flag_mask()};
		if (const CallResult* hit = cache_->lookup(key)) {
			ok = hit->success;
			if (ok) {
				pos_ = hit->end;
				tree_log_.insert(tree_log_.end(), hit->tree.begin(), hit->tree.end());
			}
			furthest_ = std::max(furthest_, hit->furthest_failure);
		}
		else {
			std::size_t outer_furthest = furthest_;
			furthest_ = 0;
			std::size_t tree_start = tree_log_.size();
			Mark m = mark();
			ok = eval(body);
			bool net_unchanged = true;
			for (std::size_t t = 0; t < tables_.size(); ++t)
				net_unchanged = net_unchanged && tables_[t].size() == depth_buf_[m.depth_base + t];
			release(m);
			// A successful call that left symbols behind cannot be replayed.
			if (net_unchanged || !ok) {
				CallResult r;
				r.success = ok;
				r.end = pos_;
				r.furthest_failure = furthest_;
				if (ok)
					r.tree.assign(tree_log_.begin() + static_cast<std::ptrdiff_t>(tree_start), tree_log_.end());
				cache_->store(key, std::move(r));
			}
			furthest_ = std::max(furthest_, outer_furthest);
		}
	}
	else {
		ok = eval(body);
	}
	--depth_;
	return ok;
}

bool Machine::repeat(NodeId body)
{
	for (;;) {
		Mark m = mark();
		bool ok = eval(body);
		bool progressed = ok && pos_ != m.pos;
		// An iteration must consume input; a zero-progress iteration counts
		// as failed and its effects are undone.
		if (ok && !progressed)
			rewind(m);
		release(m);
		if (!progressed)
			return true;
		if (++steps_ > budget_)
			throw error("E_STEP_LIMIT", "step budget of " + std::to_string(budget_) + " exceeded");
	}
}

bool Machine::check_symbol(const Node& n)
{
	auto body = program_.table_body(n.arg);
	const auto& stack = tables_[n.arg];
	std::size_t start = pos_;
	Mark m = mark();
	++suppress_failures_;
	bool ok = eval(*body);
	--suppress_failures_;
	std::size_t end = pos_;
	// e^T only delimits the candidate; its own effects are discarded.
	rewind(m);
	release(m);
	if (ok && !stack.empty()) {
		std::string_view candidate = input_.substr(start, end - start);
		if (n.op == Op::Is)
			ok = stack.back() == candidate;
		else
			ok = std::find(stack.begin(), stack.end(), candidate) != stack.end();
	}
	else {
		ok = false;
	}
	if (ok)
		pos_ = end;
	else
		fail_at(start);
	return ok;
}

bool Machine::eval_node(const Node& n)
{
	switch (n.op) {
	case Op::Empty:
		return true;
	case Op::Byte:
		if (pos_ < input_.size() && static_cast<std::uint8_t>(input_[pos_]) == n.byte) {
			++pos_;
			return true;
		}
		fail_at(pos_);
		return false;
	case Op::Class:
		if (pos_ < input_.size() && program_.class_contains(n.arg, static_cast<std::uint8_t>(input_[pos_]))) {
			++pos_;
			return true;
		}
		fail_at(pos_);
		return false;
	case Op::Any:
		if (pos_ < input_.size()) {
			++pos_;
			return true;
		}
		fail_at(pos_);
		return false;
	case Op::NonTerminal:
		return call(n.arg);
	case Op::Seq: {
		Mark m = mark();
		bool ok = eval(n.left) && eval(n.right);
		if (!ok)
			rewind(m);
		release(m);
		return ok;
	}
	case Op::Choice:
		// A failed alternative leaves the state untouched.
		return eval(n.left) || eval(n.right);
	case Op::Repeat:
		return repeat(n.left);
	case Op::And:
	case Op::Not: {
		Mark m = mark();
		bool ok = eval(n.left);
		if (ok)
			rewind(m);
		release(m);
		return n.op == Op::And ? ok : !ok;
	}
	case Op::TreeNew: {
		if (!build_tree_)
			return eval(n.left);
		std::size_t mark = tree_log_.size();
		tree_log_.push_back({TreeOp::Open, static_cast<std::uint32_t>(pos_)});
		if (!eval(n.left)) {
			tree_log_.resize(mark);
			return false;
		}
		tree_log_.push_back({TreeOp::Close, static_cast<std::uint32_t>(pos_)});
		return true;
	}
	case Op::TreeLink: {
		if (!build_tree_)
			return eval(n.left);
		std::size_t mark = tree_log_.size();
		tree_log_.push_back({TreeOp::LinkOpen, 0});
		if (!eval(n.left)) {
			tree_log_.resize(mark);
			return false;
		}
		tree_log_.push_back({TreeOp::LinkClose, 0});
		return true;
	}
	case Op::TreeTag:
		if (build_tree_)
			tree_log_.push_back({TreeOp::Tag, n.arg});
		return true;
	case Op::Def: {
		std::size_t start = pos_;
		if (!eval(n.left))
			return false;
		tables_[n.arg].emplace_back(input_.substr(start, pos_ - start));
		++version_;
		return true;
	}
	case Op::Exists:
		if (!tables_[n.arg].empty())
			return true;
		fail_at(pos_);
		return false;
	case Op::Match: {
		const auto& stack = tables_[n.arg];
		if (!stack.empty() && input_.substr(pos_).starts_with(stack.back())) {
			pos_ += stack.back().size();
			return true;
		}
		fail_at(pos_);
		return false;
	}
	case Op::Is:
	case Op::Isa:
		return check_symbol(n);
	case Op::Block: {
		std::size_t depth = tables_[n.arg].size();
		bool ok = eval(n.left);
		if (tables_[n.arg].size() > depth) {
			tables_[n.arg].resize(depth);
			++version_;
		}
		return ok;
	}
	case Op::Local: {
		std::vector<std::string> outer;
		outer.swap(tables_[n.arg]);
		if (!outer.empty())
			++version_;
		bool ok = eval(n.left);
		if (!outer.empty() || !tables_[n.arg].empty())
			++version_;
		tables_[n.arg].swap(outer);
		return ok;
	}
	case Op::If:
		return flags_[n.arg] == !n.negated;
	case Op::On: {
		bool saved = flags_[n.arg];
		flags_[n.arg] = !n.negated;
		bool ok = eval(n.left);
		flags_[n.arg] = saved;
		return ok;
	}
	case Op::Option:
	case Op::OneOrMore:
		break;
	}
	throw error("E_GRAMMAR_INVALID", "unexpected node in compiled program");
}

std::optional<SyntaxTree> Machine::build_tree() const
{
	std::vector<SyntaxTree> open;
	struct Link {
		std::size_t depth;
		std::optional<SyntaxTree> last;
	};
	std::vector<Link> links;
	std::optional<SyntaxTree> root;
	for (const auto& op : tree_log_) {
		switch (op.kind) {
		case TreeOp::Open:
			open.push_back(SyntaxTree{"token", op.value, op.value, {}});
			break;
		case TreeOp::Tag:
			if (!open.empty())
				open.back().tag = program_.tag(op.value);
			break;
		case TreeOp::Close: {
			SyntaxTree node = std::move(open.back());
			open.pop_back();
			node.end = op.value;
			if (!links.empty() && links.back().depth == open.size())
				links.back().last = std::move(node);
			else if (open.empty())
				root = std::move(node);
			break;
		}
		case TreeOp::LinkOpen:
			links.push_back({open.size(), std::nullopt});
			break;
		case TreeOp::LinkClose: {
			Link l = std::move(links.back());
			links.pop_back();
			if (!l.last)
				break;
			if (!open.empty())
				open.back().children.push_back(std::move(*l.last));
			else if (!links.empty() && links.back().depth == 0)
				links.back().last = std::move(l.last);
			else
				root = std::move(l.last);
			break;
		}
		}
	}
	return root;
}

// ---------------------------------------------------------------------------

namespace {

void escape_json(std::string& out, std::string_view s)
{
	for (char c : s) {
		if (c == '"' || c == '\\') {
			out += '\\';
			out += c;
		}
		else if (static_cast<unsigned char>(c) < 0x20) {
			char buf[8];
			std::snprintf(buf, sizeof buf, "\\u%04x", c);
			out += buf;
		}
		else {
			out += c;
		}
	}
}

void sexpr(std::string& out, const SyntaxTree& t)
{
	out += "(#" + t.tag + " " + std::to_string(t.start) + ":" + std::to_string(t.end);
	for (const auto& c : t.children) {
		out += ' ';
		sexpr(out, c);
	}
	out += ')';
}

void json(std::string& out, const SyntaxTree& t)
{
	out += "{\"tag\":\"";
	escape_json(out, t.tag);
	out += "\",\"start\":" + std::to_string(t.start) + ",\"end\":" + std::to_string(t.end) + ",\"children\":[";
	for (std::size_t i = 0; i < t.children.size(); ++i) {
		if (i)
			out += ',';
		json(out, t.children[i]);
	}
	out += "]}";
}

} // namespace

std::string to_sexpr(const SyntaxTree& t)
{
	std::string out;
	sexpr(out, t);
	return out;
}

std::string to_json(const SyntaxTree& t)
{
	std::string out;
	json(out, t);
	return out;
}

ParseOutcome parse(const Grammar& g, std::string_view start, std::string_view input, const ParseOptions& options)
{
	Program p = Program::compile(g);
	return parse(p, start, input, options);
}

ParseOutcome parse(const Program& program, std::string_view start, std::string_view input, const ParseOptions& options,
	CallCache* cache)
{
	auto index = program.production_index(start);
	if (!index)
		throw error("E_UNKNOWN_START", "start production " + std::string(start) + " is not defined");
	Machine m(program, input, options, cache);
	ParseOutcome out;
	out.success = m.call(*index);
	out.furthest_failure = m.furthest_failure();
	if (out.success && options.require_eof && m.position() != input.size()) {
		out.success = false;
		out.furthest_failure = std::max(out.furthest_failure, m.position());
	}
	out.steps = m.steps();
	if (out.success) {
		out.consumed = m.position();
		if (options.build_tree)
			out.tree = m.build_tree();
	}
	return out;
}

} // namespace nez
