#include "mathrender/tex/parser.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include "mathrender/stack_guard.hpp"

namespace mathrender::tex {
namespace {

struct Failure {
  ParseError error;
};

// What ends the row currently being parsed.
enum class Context {
  Top,        // end of input
  Group,      // }
  Cell,       // & or \\ or \end
  LeftBody,   // \right
  Index,      // ] of \sqrt[...]
};

constexpr std::array kDelimiterCommands = {
    std::string_view{"\\{"}, std::string_view{"\\}"},      std::string_view{"\\|"},
    std::string_view{"\\langle"}, std::string_view{"\\rangle"}, std::string_view{"\\lfloor"},
    std::string_view{"\\rfloor"}, std::string_view{"\\lceil"},  std::string_view{"\\rceil"},
    std::string_view{"\\backslash"}, std::string_view{"\\uparrow"}, std::string_view{"\\downarrow"},
    std::string_view{"\\updownarrow"}, std::string_view{"\\Uparrow"}, std::string_view{"\\Downarrow"},
    std::string_view{"\\Updownarrow"},
};
constexpr std::string_view kDelimiterChars = "()[]|/.";

bool is_command(const Token& t, std::string_view name) {
  return t.kind == TokenKind::Command && t.text == name;
}

class Parser {
 public:
  Parser(std::span<const Token> tokens, const CommandWhitelist& wl, const ParseOptions& opt)
      : toks_(tokens), wl_(wl), opt_(opt) {
    if (!toks_.empty()) input_end_ = toks_.back().offset + toks_.back().text.size();
  }

  Node run() {
    check_commands();
    Node root = parse_row(Context::Top);
    if (root.kind == NodeKind::Row && root.children.empty()) root.span = {0, input_end_};
    return root;
  }

 private:
  // RAII nesting counter; every construct that adds a tree level holds one.
  class DepthGuard {
   public:
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > p_.opt_.max_depth) {
        p_.fail(ParseErrorCode::DepthLimitExceeded,
                "nesting deeper than " + std::to_string(p_.opt_.max_depth) + " levels", p_.here());
      }
      if (stack_remaining() < kStackReserve) {
        p_.fail(ParseErrorCode::DepthLimitExceeded, "nesting too deep for the available stack", p_.here());
      }
    }
    ~DepthGuard() { --p_.depth_; }
    DepthGuard(const DepthGuard&) = delete;
    DepthGuard& operator=(const DepthGuard&) = delete;

   private:
    Parser& p_;
  };

  [[noreturn]] void fail(ParseErrorCode code, std::string message, std::size_t offset,
                         std::vector<std::string> offending = {}) const {
    throw Failure{ParseError{code, std::move(message), std::min(offset, input_end_), std::move(offending)}};
  }

  // ---- token cursor ----

  bool at_end() const { return pos_ >= toks_.size(); }
  const Token& cur() const { return toks_[pos_]; }
  std::size_t here() const { return at_end() ? input_end_ : cur().offset; }
  std::size_t last_offset() const { return toks_.empty() ? 0 : toks_.back().offset; }

  void advance() {
    last_end_ = cur().offset + cur().text.size();
    ++pos_;
  }

  void skip_ws() {
    while (!at_end() && cur().kind == TokenKind::Whitespace) ++pos_;
  }

  // ---- validation pass ----

  void check_commands() const {
    std::vector<std::string> unknown;
    std::size_t first = 0;
    auto note = [&](std::string name, std::size_t offset) {
      if (std::find(unknown.begin(), unknown.end(), name) != unknown.end()) return;
      if (unknown.empty()) first = offset;
      unknown.push_back(std::move(name));
    };
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      const Token& t = toks_[i];
      if (t.kind != TokenKind::Command) continue;
      const WhitelistEntry* e = wl_.find(t.text);
      if (!e || e->category == CommandCategory::Environment) {
        note(t.text, t.offset);
        continue;
      }
      if (t.text == "\\begin" || t.text == "\\end") {
        std::size_t j = i + 1;
        while (j < toks_.size() && toks_[j].kind == TokenKind::Whitespace) ++j;
        if (j >= toks_.size() || toks_[j].kind != TokenKind::OpenBrace) continue;
        std::string name;
        for (++j; j < toks_.size() && toks_[j].kind != TokenKind::CloseBrace; ++j) name += toks_[j].text;
        const WhitelistEntry* env = wl_.find(name);
        if (!env || env->category != CommandCategory::Environment) note(t.text + "{" + name + "}", t.offset);
      }
    }
    if (!unknown.empty()) {
      std::string msg = "unknown command";
      msg += unknown.size() > 1 ? "s: " : ": ";
      for (std::size_t i = 0; i < unknown.size(); ++i) msg += (i ? ", " : "") + unknown[i];
      fail(ParseErrorCode::UnknownCommand, std::move(msg), first, std::move(unknown));
    }
  }

  // ---- rows ----

  bool is_stop(const Token& t, Context ctx) const {
    switch (ctx) {
      case Context::Top: return false;
      case Context::Group: return t.kind == TokenKind::CloseBrace;
      case Context::Cell:
        return t.kind == TokenKind::Ampersand || is_command(t, "\\\\") || is_command(t, "\\end");
      case Context::LeftBody: return is_command(t, "\\right");
      case Context::Index: return t.kind == TokenKind::Symbol && t.text == "]";
    }
    return false;
  }

  [[noreturn]] void fail_unterminated(Context ctx) const {
    switch (ctx) {
      case Context::Group:
        fail(ParseErrorCode::UnbalancedBraces, "missing closing brace", last_offset());
      case Context::Cell:
        fail(ParseErrorCode::UnbalancedDelimiters, "\\begin without matching \\end", last_offset());
      case Context::LeftBody:
        fail(ParseErrorCode::UnbalancedDelimiters, "\\left without matching \\right", last_offset());
      case Context::Index:
        fail(ParseErrorCode::UnbalancedDelimiters, "missing ] after root index", last_offset());
      case Context::Top: break;
    }
    fail(ParseErrorCode::UnbalancedBraces, "unexpected end of input", last_offset());
  }

  static bool is_switch(const WhitelistEntry* e) {
    return e && e->category == CommandCategory::Style && e->arity == 0;
  }

  static Node make_row(std::vector<Node> items, Span span) {
    if (items.size() == 1) return std::move(items.front());
    Node row;
    row.kind = NodeKind::Row;
    row.span = span;
    row.children = std::move(items);
    return row;
  }

  Node parse_row(Context ctx) {
    std::vector<Node> items;
    // Per item: +1 literal "(" / "[", -1 literal ")" / "]", 0 otherwise;
    // used to find the base of scripts written after a closing parenthesis.
    std::vector<int> fence;
    const std::size_t begin = here();
    while (true) {
      if (opt_.budget && opt_.budget->expired()) fail(ParseErrorCode::Timeout, "parse time budget exceeded", here());
      skip_ws();
      if (at_end()) {
        if (ctx != Context::Top) fail_unterminated(ctx);
        break;
      }
      const Token& t = cur();
      if (is_stop(t, ctx)) break;
      if (t.kind == TokenKind::CloseBrace) fail(ParseErrorCode::UnbalancedBraces, "unmatched }", t.offset);
      if (t.kind == TokenKind::Ampersand || is_command(t, "\\\\") || is_command(t, "\\end")) {
        fail(ParseErrorCode::UnbalancedDelimiters, t.text + " outside of an environment", t.offset);
      }
      if (is_command(t, "\\right")) fail(ParseErrorCode::UnbalancedDelimiters, "\\right without \\left", t.offset);
      if (is_command(t, "\\limits") || is_command(t, "\\nolimits")) {
        advance();
        continue;
      }
      if (t.kind == TokenKind::Command && is_switch(wl_.find(t.text))) {
        DepthGuard guard(*this);
        const std::size_t start = t.offset;
        advance();
        Node styled;
        styled.kind = NodeKind::Styled;
        styled.command = t.text;
        styled.switch_style = true;
        styled.children.push_back(parse_row(ctx));
        styled.span = {start, std::max(last_end_, start + styled.command.size())};
        items.push_back(std::move(styled));
        fence.push_back(0);
        break;  // the switch consumed the rest of the row
      }

      int literal_fence = 0;
      Node base = parse_base(&literal_fence);
      if (literal_fence < 0 && script_follows()) {
        regroup_parenthesized(items, fence, base);
        literal_fence = 0;
      }
      Node atom = parse_scripts(std::move(base));
      if (atom.kind == NodeKind::Script) literal_fence = 0;
      items.push_back(std::move(atom));
      fence.push_back(literal_fence);
    }
    return make_row(std::move(items), {begin, std::max(begin, last_end_)});
  }

  bool script_follows() {
    std::size_t j = pos_;
    while (j < toks_.size() && toks_[j].kind == TokenKind::Whitespace) ++j;
    return j < toks_.size() &&
           (toks_[j].kind == TokenKind::SuperscriptMark || toks_[j].kind == TokenKind::SubscriptMark);
  }

  // "(x-h)^{2}": the script applies to the whole parenthesized group.
  static void regroup_parenthesized(std::vector<Node>& items, std::vector<int>& fence, Node& base) {
    const std::string open = base.text == ")" ? "(" : "[";
    int level = 0;
    for (std::size_t j = items.size(); j-- > 0;) {
      if (fence[j] == 0) continue;
      const bool same_pair = fence[j] < 0 ? items[j].text == base.text : items[j].text == open;
      if (!same_pair) continue;
      if (fence[j] < 0) {
        ++level;
      } else if (level > 0) {
        --level;
      } else {
        Node group;
        group.kind = NodeKind::Row;
        group.span = {items[j].span.begin, base.span.end};
        for (std::size_t k = j; k < items.size(); ++k) group.children.push_back(std::move(items[k]));
        group.children.push_back(std::move(base));
        items.resize(j);
        fence.resize(j);
        base = std::move(group);
        return;
      }
    }
  }

  // ---- atoms ----

  Node parse_base(int* literal_fence) {
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::Letter:
        advance();
        return make_leaf(NodeKind::Identifier, t.text, {t.offset, last_end_});
      case TokenKind::Digit:
        return parse_number(/*single_digit=*/false);
      case TokenKind::Symbol:
        advance();
        if (t.text == "(" || t.text == "[") *literal_fence = 1;
        if (t.text == ")" || t.text == "]") *literal_fence = -1;
        return make_leaf(NodeKind::Operator, t.text, {t.offset, last_end_});
      case TokenKind::OpenBrace: {
        DepthGuard guard(*this);
        return parse_group();
      }
      case TokenKind::SubscriptMark:
      case TokenKind::SuperscriptMark: {
        Node empty;
        empty.span = {t.offset, t.offset};
        return empty;
      }
      case TokenKind::Command:
        return parse_command();
      default:
        break;
    }
    fail(ParseErrorCode::EmptyArgument, "unexpected " + t.text, t.offset);
  }

  Node parse_number(bool single_digit) {
    const std::size_t start = cur().offset;
    std::string text = cur().text;
    advance();
    if (!single_digit) {
      while (!at_end() && cur().kind == TokenKind::Digit) {
        text += cur().text;
        advance();
      }
      if (pos_ + 1 < toks_.size() && cur().kind == TokenKind::Symbol && cur().text == "." &&
          toks_[pos_ + 1].kind == TokenKind::Digit) {
        text += '.';
        advance();
        while (!at_end() && cur().kind == TokenKind::Digit) {
          text += cur().text;
          advance();
        }
      }
    }
    return make_leaf(NodeKind::Number, std::move(text), {start, last_end_});
  }

  // Current token is "{".  Braces that merely group collapse to their content.
  Node parse_group() {
    const std::size_t start = cur().offset;
    advance();
    Node inner = parse_row(Context::Group);
    advance();  // "}"
    if (inner.kind == NodeKind::Row) inner.span = {start, last_end_};
    return inner;
  }

  Node parse_argument() {
    skip_ws();
    if (at_end()) fail(ParseErrorCode::EmptyArgument, "missing argument at end of input", input_end_);
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::OpenBrace:
        return parse_group();
      case TokenKind::Letter:
      case TokenKind::Symbol: {
        int ignored = 0;
        return parse_base(&ignored);
      }
      case TokenKind::Digit:
        return parse_number(/*single_digit=*/true);
      case TokenKind::Command: {
        if (is_command(t, "\\right") || is_command(t, "\\end") || is_command(t, "\\\\") ||
            is_command(t, "\\limits") || is_command(t, "\\nolimits") || is_switch(wl_.find(t.text))) {
          fail(ParseErrorCode::EmptyArgument, t.text + " cannot be used as an argument", t.offset);
        }
        return parse_command();
      }
      default:
        break;
    }
    fail(ParseErrorCode::EmptyArgument, "missing argument", t.offset);
  }

  Node parse_scripts(Node base) {
    Node script;
    script.kind = NodeKind::Script;
    const std::size_t start = base.span.begin;
    Node sub, sup;
    std::optional<DepthGuard> guard;
    while (true) {
      skip_ws();
      if (at_end()) break;
      const Token& t = cur();
      if (is_command(t, "\\limits") || is_command(t, "\\nolimits")) {
        advance();
        continue;
      }
      const bool is_sub = t.kind == TokenKind::SubscriptMark;
      if (!is_sub && t.kind != TokenKind::SuperscriptMark) break;
      if (is_sub ? script.has_sub : script.has_sup) {
        fail(ParseErrorCode::DoubleScript, is_sub ? "double subscript" : "double superscript", t.offset);
      }
      if (!guard) guard.emplace(*this);
      advance();
      (is_sub ? sub : sup) = parse_argument();
      (is_sub ? script.has_sub : script.has_sup) = true;
    }
    if (!script.has_sub && !script.has_sup) return base;
    script.children.push_back(std::move(base));
    if (script.has_sub) script.children.push_back(std::move(sub));
    if (script.has_sup) script.children.push_back(std::move(sup));
    script.span = {start, last_end_};
    return script;
  }

  // ---- commands ----

  Node parse_command() {
    const Token& t = cur();
    const WhitelistEntry* e = wl_.find(t.text);
    if (!e) fail(ParseErrorCode::UnknownCommand, "unknown command: " + t.text, t.offset, {t.text});
    const std::size_t start = t.offset;
    switch (e->category) {
      case CommandCategory::Symbol: {
        advance();
        const std::string canonical(wl_.canonical(t.text));
        const auto kind = canonical.front() == '\\' ? NodeKind::Symbol : NodeKind::Operator;
        return make_leaf(kind, canonical, {start, last_end_});
      }
      case CommandCategory::SemanticMacro:
        advance();
        return make_leaf(NodeKind::Symbol, t.text, {start, last_end_});
      case CommandCategory::FunctionName: {
        advance();
        if (e->arity == 0) return make_leaf(NodeKind::Function, t.text, {start, last_end_});
        Node fn = make_leaf(NodeKind::Function, read_literal(t), {});
        fn.command = t.text;
        fn.span = {start, last_end_};
        return fn;
      }
      case CommandCategory::Accent: {
        DepthGuard guard(*this);
        advance();
        Node n;
        n.kind = NodeKind::Accent;
        n.command = t.text;
        n.children.push_back(parse_argument());
        n.span = {start, last_end_};
        return n;
      }
      case CommandCategory::Style: {
        DepthGuard guard(*this);
        advance();
        Node n;
        n.kind = NodeKind::Styled;
        n.command = t.text;
        n.children.push_back(parse_argument());
        n.span = {start, last_end_};
        return n;
      }
      case CommandCategory::Layout:
        return parse_layout(*e);
      case CommandCategory::Environment:
        break;
    }
    fail(ParseErrorCode::UnknownCommand, "unknown command: " + t.text, t.offset, {t.text});
  }

  Node parse_layout(const WhitelistEntry& e) {
    const Token& t = cur();
    const std::string_view name = e.name;
    const std::size_t start = t.offset;
    Node n;
    n.command = t.text;

    if (name.ends_with("frac") || name.ends_with("binom")) {
      DepthGuard guard(*this);
      advance();
      n.kind = NodeKind::Fraction;
      n.children.push_back(parse_argument());
      n.children.push_back(parse_argument());
    } else if (name == "\\overset" || name == "\\underset" || name == "\\stackrel") {
      DepthGuard guard(*this);
      advance();
      n.kind = NodeKind::Stack;
      n.children.push_back(parse_argument());
      n.children.push_back(parse_argument());
    } else if (name == "\\sqrt") {
      DepthGuard guard(*this);
      advance();
      n.kind = NodeKind::Radical;
      skip_ws();
      std::optional<Node> index;
      if (!at_end() && cur().kind == TokenKind::Symbol && cur().text == "[") {
        advance();
        index = parse_row(Context::Index);
        advance();  // "]"
      }
      n.children.push_back(parse_argument());
      if (index) {
        n.has_index = true;
        n.children.push_back(std::move(*index));
      }
    } else if (name == "\\left") {
      DepthGuard guard(*this);
      advance();
      n.kind = NodeKind::Delimited;
      n.command.clear();
      n.left = parse_delimiter(t);
      n.children.push_back(parse_row(Context::LeftBody));
      const Token& right = cur();
      advance();
      n.right = parse_delimiter(right);
    } else if (name == "\\begin") {
      DepthGuard guard(*this);
      return parse_environment();
    } else if (name == "\\text" || name == "\\mbox" || name.starts_with("\\text")) {
      advance();
      n.kind = NodeKind::Text;
      n.text = read_literal(t);
    } else if (name.starts_with("\\big") || name.starts_with("\\Big")) {
      advance();
      n.kind = NodeKind::Operator;
      n.text = parse_delimiter(t);
    } else {
      fail(ParseErrorCode::UnknownCommand, std::string(name) + " is not valid here", start, {std::string(name)});
    }
    n.span = {start, last_end_};
    return n;
  }

  std::string parse_delimiter(const Token& owner) {
    skip_ws();
    if (at_end()) fail(ParseErrorCode::UnbalancedDelimiters, "missing delimiter after " + owner.text, input_end_);
    const Token& t = cur();
    if (t.kind == TokenKind::Symbol && t.text.size() == 1 && kDelimiterChars.find(t.text[0]) != std::string_view::npos) {
      advance();
      return t.text;
    }
    if (t.kind == TokenKind::Command) {
      const std::string canonical(wl_.canonical(t.text));
      const bool ok = canonical == "|" || std::find(kDelimiterCommands.begin(), kDelimiterCommands.end(),
                                                    canonical) != kDelimiterCommands.end();
      if (ok) {
        advance();
        return canonical;
      }
    }
    fail(ParseErrorCode::UnbalancedDelimiters, "invalid delimiter '" + t.text + "' after " + owner.text, t.offset);
  }

  // Raw argument text of \text, \operatorname, environment names and
  // column specs; whitespace inside is preserved.
  std::string read_literal(const Token& owner) {
    skip_ws();
    if (at_end()) fail(ParseErrorCode::EmptyArgument, "missing argument of " + owner.text, input_end_);
    if (cur().kind != TokenKind::OpenBrace) {
      const Token& t = cur();
      if (t.kind == TokenKind::CloseBrace) fail(ParseErrorCode::EmptyArgument, "missing argument of " + owner.text, t.offset);
      advance();
      return t.text;
    }
    const std::size_t open_offset = cur().offset;
    advance();
    std::string text;
    int level = 0;
    while (true) {
      if (at_end()) fail(ParseErrorCode::UnbalancedBraces, "missing closing brace", last_offset());
      const Token& t = cur();
      if (t.kind == TokenKind::CloseBrace && level == 0) break;
      if (t.kind == TokenKind::OpenBrace) ++level;
      if (t.kind == TokenKind::CloseBrace) --level;
      text += t.text;
      advance();
    }
    advance();
    (void)open_offset;
    return text;
  }

  Node parse_environment() {
    const Token& begin_tok = cur();
    const std::size_t start = begin_tok.offset;
    advance();
    const std::string env = read_literal(begin_tok);
    const WhitelistEntry* e = wl_.find(env);
    if (!e || e->category != CommandCategory::Environment) {
      fail(ParseErrorCode::UnknownCommand, "unknown environment " + env, start, {"\\begin{" + env + "}"});
    }
    Node n;
    n.kind = NodeKind::Array;
    n.text = env;
    if (e->arity >= 1) {
      const std::size_t spec_at = here();
      for (char c : read_literal(begin_tok)) {
        if (c == ' ' || c == '\t' || c == '\n') continue;
        if (c != 'l' && c != 'c' && c != 'r' && c != '|') {
          fail(ParseErrorCode::UnknownCommand, std::string("unsupported column type '") + c + "'", spec_at,
               {std::string(1, c)});
        }
        n.spec += c;
      }
    }
    std::vector<Node> cells;
    std::size_t row_begin = here();
    auto finish_row = [&](std::size_t end) {
      Node row;
      row.kind = NodeKind::Row;
      row.span = {row_begin, std::max(row_begin, end)};
      row.children = std::move(cells);
      cells.clear();
      n.children.push_back(std::move(row));
    };
    while (true) {
      cells.push_back(parse_row(Context::Cell));
      const Token& stop = cur();
      const std::size_t stop_at = stop.offset;
      advance();
      if (stop.kind == TokenKind::Ampersand) continue;
      if (stop.text == "\\\\") {
        finish_row(stop_at);
        row_begin = here();
        continue;
      }
      // \end
      const std::string closing = read_literal(stop);
      if (closing != env) {
        fail(ParseErrorCode::UnbalancedDelimiters, "\\begin{" + env + "} closed by \\end{" + closing + "}", stop_at);
      }
      const bool trailing_break = cells.size() == 1 && cells[0].kind == NodeKind::Row &&
                                  cells[0].children.empty() && !n.children.empty();
      if (!trailing_break) finish_row(stop_at);
      break;
    }
    n.span = {start, last_end_};
    return n;
  }

  std::span<const Token> toks_;
  const CommandWhitelist& wl_;
  const ParseOptions& opt_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
  std::size_t last_end_ = 0;
  std::size_t input_end_ = 0;
};

}  // namespace

Result<Node, ParseError> parse(std::span<const Token> tokens, const CommandWhitelist& whitelist,
                               const ParseOptions& options) {
  try {
    Parser p(tokens, whitelist, options);
    return p.run();
  } catch (Failure& f) {
    return std::move(f.error);
  }
}

Result<Node, ParseError> parse(std::string_view input, const CommandWhitelist& whitelist, const Limits& limits,
                               Budget* budget) {
  auto tokens = tokenize(input, limits);
  if (!tokens) return std::move(tokens.error());
  return parse(tokens.value(), whitelist, ParseOptions{limits.max_depth, budget});
}

Node expand_semantic_macros(const Node& ast, const CommandWhitelist& whitelist) {
  if (ast.kind == NodeKind::Symbol) {
    const WhitelistEntry* e = whitelist.find(ast.text);
    if (e && e->category == CommandCategory::SemanticMacro) {
      Node id = make_leaf(NodeKind::Identifier, e->expansion, ast.span);
      id.annotation = e->annotation;
      return id;
    }
    return ast;
  }
  // Copy the fields only; copying `ast` whole would duplicate every subtree.
  Node out;
  out.kind = ast.kind;
  out.span = ast.span;
  out.text = ast.text;
  out.command = ast.command;
  out.annotation = ast.annotation;
  out.left = ast.left;
  out.right = ast.right;
  out.spec = ast.spec;
  out.has_sub = ast.has_sub;
  out.has_sup = ast.has_sup;
  out.has_index = ast.has_index;
  out.switch_style = ast.switch_style;
  out.children.reserve(ast.children.size());
  for (const auto& c : ast.children) out.children.push_back(expand_semantic_macros(c, whitelist));
  return out;
}

}  // namespace mathrender::tex
