#include "mathrender/mml/emit.hpp"

#include <charconv>
#include <cstdio>

#include "mathrender/utf8.hpp"

namespace mathrender::mml {
namespace {

using tex::Node;
using tex::NodeKind;

// Child list built by moving; a braced list would deep-copy every subtree.
template <typename... T>
std::vector<MathNode> nodes(T&&... items) {
  std::vector<MathNode> v;
  v.reserve(sizeof...(items));
  (v.push_back(std::forward<T>(items)), ...);
  return v;
}

constexpr std::string_view kApplyFunction = "\xE2\x81\xA1";  // U+2061
constexpr std::string_view kNoBreakSpace = "\xC2\xA0";

std::string em_length(int milli_em) {
  char buf[32];
  const double v = milli_em / 1000.0;
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
  std::string s(buf, end);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s + "em";
}

// Explicit sizes for \big, \Big, \bigg, \Bigg (and their l/r forms).
std::string big_size(std::string_view command) {
  std::string_view base = command;
  if (base.ends_with('l') || base.ends_with('r')) base.remove_suffix(1);
  if (base == "\\big") return "1.2em";
  if (base == "\\Big") return "1.8em";
  if (base == "\\bigg") return "2.4em";
  return "3em";
}

class Emitter {
 public:
  Emitter(const EmitOptions& options, const SymbolTable& table) : opt_(options), table_(table) {}

  MathNode root(const Node& ast) {
    std::vector<MathNode> items;
    emit_items(ast, items);
    MathNode body;
    if (items.size() == 1 && items.front().element == "mrow") {
      body = std::move(items.front());
    } else {
      body = make_element("mrow", std::move(items));
    }
    MathNode math = make_element("math", nodes(std::move(body)));
    math.set("xmlns", std::string(kMathMLNamespace));
    if (opt_.display) math.set("display", "block");
    return math;
  }

 private:
  // Token text in the requested charset.  '&' is always written as a
  // numeric reference so that it can never be mistaken for markup.
  std::string enc(std::string_view s) const {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
      const unsigned char c = static_cast<unsigned char>(s[i]);
      if (c == '&') {
        out += "&#x26;";
        ++i;
      } else if (c < 0x80 || opt_.charset == Charset::Utf8Literals) {
        const std::size_t len = utf8::sequence_length(c);
        out.append(s, i, len);
        i += len;
      } else {
        const char32_t cp = utf8::decode(s, i);
        char buf[16];
        std::snprintf(buf, sizeof buf, "&#x%X;", static_cast<unsigned>(cp));
        out += buf;
      }
    }
    return out;
  }

  MathNode token(std::string element, std::string_view text) const { return make_token(std::move(element), enc(text)); }

  MathNode fence(std::string_view text, bool stretchy) const {
    MathNode mo = token("mo", text);
    mo.set("stretchy", stretchy ? "true" : "false");
    return mo;
  }

  static MathNode row_of(std::vector<MathNode> items) {
    if (items.size() == 1) return std::move(items.front());
    return make_element("mrow", std::move(items));
  }

  MathNode emit_node(const Node& n) {
    std::vector<MathNode> items;
    emit_items(n, items);
    return row_of(std::move(items));
  }

  // Appends the row contents of `n` (a Row's items, or the node itself).
  void emit_items(const Node& n, std::vector<MathNode>& out) {
    if (n.kind == NodeKind::Row) {
      for (const Node& c : n.children) emit_item(c, out);
    } else {
      emit_item(n, out);
    }
  }

  void emit_item(const Node& n, std::vector<MathNode>& out) {
    switch (n.kind) {
      case NodeKind::Row:
        out.push_back(emit_node(n));
        return;
      case NodeKind::Function:
        out.push_back(function(n));
        out.push_back(token("mo", kApplyFunction));
        return;
      case NodeKind::Script:
        out.push_back(script(n));
        if (n.base().kind == NodeKind::Function) out.push_back(token("mo", kApplyFunction));
        return;
      default:
        out.push_back(single(n));
        return;
    }
  }

  MathNode single(const Node& n) {
    switch (n.kind) {
      case NodeKind::Row:
      case NodeKind::Function:
        return emit_node(n);
      case NodeKind::Identifier: {
        MathNode mi = token("mi", n.text);
        if (!n.annotation.empty()) mi.set("aria-label", n.annotation);
        return mi;
      }
      case NodeKind::Number:
        return token("mn", n.text);
      case NodeKind::Operator:
        return n.command.empty() ? literal(n.text) : sized_delimiter(n);
      case NodeKind::Symbol:
        return symbol(n.text);
      case NodeKind::Fraction:
        return fraction(n);
      case NodeKind::Script:
        return script(n);
      case NodeKind::Radical: {
        if (const Node* idx = n.index()) {
          return make_element("mroot", nodes(emit_node(n.children.at(0)), emit_node(*idx)));
        }
        return make_element("msqrt", nodes(emit_node(n.children.at(0))));
      }
      case NodeKind::Delimited: {
        std::vector<MathNode> items;
        if (n.left != ".") items.push_back(fence(delimiter_text(n.left), true));
        emit_items(n.children.at(0), items);
        if (n.right != ".") items.push_back(fence(delimiter_text(n.right), true));
        return make_element("mrow", std::move(items));
      }
      case NodeKind::Array:
        return array(n);
      case NodeKind::Styled:
        return styled(n);
      case NodeKind::Text:
        return text(n);
      case NodeKind::Accent:
        return accent(n);
      case NodeKind::Stack: {
        const char* element = n.command == "\\underset" ? "munder" : "mover";
        return make_element(element, nodes(emit_node(n.children.at(1)), emit_node(n.children.at(0))));
      }
    }
    return make_element("mrow");
  }

  MathNode literal(std::string_view ch) const {
    const Classification c = table_.classify(ch);
    switch (c.kind) {
      case SymbolKind::Operator: {
        MathNode mo = token("mo", c.value);
        if (c.op_class == OperatorClass::Open || c.op_class == OperatorClass::Close ||
            c.op_class == OperatorClass::Fence) {
          mo.set("stretchy", "false");
        }
        return mo;
      }
      case SymbolKind::Space:
        return space(c.value);
      default:
        return token("mi", c.value);
    }
  }

  MathNode space(const std::string& milli_em) const {
    MathNode sp = make_element("mspace");
    sp.set("width", em_length(std::stoi(milli_em)));
    return sp;
  }

  MathNode symbol(const std::string& command) const {
    const SymbolEntry* e = table_.find(command);
    if (!e) return token("mi", command);
    switch (e->kind) {
      case SymbolKind::Operator: {
        MathNode mo = token("mo", e->value);
        if (e->op_class == OperatorClass::Open || e->op_class == OperatorClass::Close ||
            e->op_class == OperatorClass::Fence) {
          mo.set("stretchy", "false");
        }
        return mo;
      }
      case SymbolKind::Space:
        return space(e->value);
      default: {
        MathNode mi = token("mi", e->value);
        if (e->normal) mi.set("mathvariant", "normal");
        return mi;
      }
    }
  }

  std::string delimiter_text(const std::string& d) const {
    if (d == ".") return {};
    if (d.front() == '\\') {
      const SymbolEntry* e = table_.find(d);
      return e ? e->value : d;
    }
    return table_.classify(d).value;
  }

  MathNode sized_delimiter(const Node& n) const {
    MathNode mo = token("mo", delimiter_text(n.text));
    const std::string size = big_size(n.command);
    mo.set("minsize", size);
    mo.set("maxsize", size);
    return mo;
  }

  MathNode function(const Node& n) const {
    if (!n.command.empty()) {  // \operatorname{...}
      MathNode mi = token("mi", n.text);
      if (utf8::single(n.text)) mi.set("mathvariant", "normal");
      return mi;
    }
    const SymbolEntry* e = table_.find(n.text);
    const std::string name = e ? e->value : n.text.substr(1);
    if (e && e->limits) {
      MathNode mo = token("mo", name);
      mo.set("movablelimits", "true");
      return mo;
    }
    return token("mi", name);
  }

  MathNode fraction(const Node& n) {
    const std::string_view cmd = n.command;
    MathNode frac = make_element("mfrac", nodes(emit_node(n.children.at(0)), emit_node(n.children.at(1))));
    const bool binom = cmd.ends_with("binom");
    if (binom) {
      frac.set("linethickness", "0");
      frac = make_element("mrow", nodes(fence("(", true), std::move(frac), fence(")", true)));
    }
    if (cmd == "\\dfrac" || cmd == "\\cfrac" || cmd == "\\dbinom") {
      frac = make_element("mstyle", nodes(std::move(frac)));
      frac.set("displaystyle", "true");
      frac.set("scriptlevel", "0");
    } else if (cmd == "\\tfrac" || cmd == "\\tbinom") {
      frac = make_element("mstyle", nodes(std::move(frac)));
      frac.set("displaystyle", "false");
      frac.set("scriptlevel", "0");
    }
    return frac;
  }

  // Large operators and limit-style functions take their scripts under and
  // over; so do the horizontal braces.
  bool takes_limits(const Node& base, const MathNode& emitted) const {
    if (base.kind == NodeKind::Accent) return base.command == "\\overbrace" || base.command == "\\underbrace";
    if (emitted.element != "mo") return false;
    if (base.kind == NodeKind::Symbol) {
      const SymbolEntry* e = table_.find(base.text);
      return e && e->limits;
    }
    if (base.kind == NodeKind::Function && base.command.empty()) {
      const SymbolEntry* e = table_.find(base.text);
      return e && e->limits;
    }
    return false;
  }

  MathNode script(const Node& n) {
    const Node& base_ast = n.base();
    MathNode base = base_ast.kind == NodeKind::Function ? function(base_ast) : emit_node(base_ast);
    const bool limits = takes_limits(base_ast, base);
    if (limits && base.element == "mo") base.set("movablelimits", "true");
    std::vector<MathNode> parts;
    parts.push_back(std::move(base));
    if (const Node* s = n.sub()) parts.push_back(emit_node(*s));
    if (const Node* s = n.sup()) parts.push_back(emit_node(*s));
    const bool both = n.has_sub && n.has_sup;
    const char* element = limits ? (both ? "munderover" : n.has_sub ? "munder" : "mover")
                                 : (both ? "msubsup" : n.has_sub ? "msub" : "msup");
    return make_element(element, std::move(parts));
  }

  MathNode array(const Node& n) {
    const SymbolEntry* env = table_.find(n.text);
    std::vector<std::string> align;
    std::vector<std::string> lines;
    if (!n.spec.empty()) {
      bool bar = false;
      for (char c : n.spec) {
        if (c == '|') {
          bar = true;
          continue;
        }
        if (!align.empty()) lines.push_back(bar ? "solid" : "none");
        bar = false;
        align.push_back(c == 'l' ? "left" : c == 'r' ? "right" : "center");
      }
    } else if (env && env->props != "center") {
      const std::string_view p = env->props;
      std::size_t start = 0;
      while (true) {
        const std::size_t sp = p.find(' ', start);
        align.emplace_back(p.substr(start, sp == std::string_view::npos ? std::string_view::npos : sp - start));
        if (sp == std::string_view::npos) break;
        start = sp + 1;
      }
    }

    std::vector<MathNode> rows;
    for (const Node& r : n.children) {
      std::vector<MathNode> cells;
      for (const Node& c : r.children) {
        std::vector<MathNode> items;
        emit_items(c, items);
        cells.push_back(make_element("mtd", std::move(items)));
      }
      rows.push_back(make_element("mtr", std::move(cells)));
    }
    MathNode table = make_element("mtable", std::move(rows));
    if (!align.empty()) {
      std::string v;
      for (const auto& a : align) v += (v.empty() ? "" : " ") + a;
      table.set("columnalign", v);
    }
    bool any_line = false;
    for (const auto& l : lines) any_line |= l == "solid";
    if (any_line) {
      std::string v;
      for (const auto& l : lines) v += (v.empty() ? "" : " ") + l;
      table.set("columnlines", v);
    }
    if (n.text == "aligned" || n.text == "gathered") table.set("displaystyle", "true");

    MathNode result = std::move(table);
    if (n.text == "smallmatrix") {
      result = make_element("mstyle", nodes(std::move(result)));
      result.set("scriptlevel", "1");
    }
    if (env) {
      const std::string& f = env->value;
      const std::size_t sp = f.find(' ');
      const std::string open = f.substr(0, sp);
      const std::string close = sp == std::string::npos ? "." : f.substr(sp + 1);
      if (open != "." || close != ".") {
        std::vector<MathNode> items;
        if (open != ".") items.push_back(fence(open, true));
        items.push_back(std::move(result));
        if (close != ".") items.push_back(fence(close, true));
        result = make_element("mrow", std::move(items));
      }
    }
    return result;
  }

  MathNode styled(const Node& n) {
    std::vector<MathNode> items;
    emit_items(n.children.at(0), items);
    MathNode st = make_element("mstyle", std::move(items));
    const SymbolEntry* e = table_.find(n.command);
    const std::string value = e ? e->value : "normal";
    if (value.starts_with("style:")) {
      const std::string_view level = std::string_view(value).substr(6);
      st.set("displaystyle", level == "display" ? "true" : "false");
      st.set("scriptlevel", level == "script" ? "1" : level == "scriptscript" ? "2" : "0");
    } else {
      st.set("mathvariant", value);
    }
    return st;
  }

  MathNode text(const Node& n) const {
    std::string shown;
    for (std::size_t i = 0; i < n.text.size(); ++i) {
      const char c = n.text[i];
      if (c == '\\' && i + 1 < n.text.size() && (n.text[i + 1] == '{' || n.text[i + 1] == '}')) {
        shown += n.text[++i];
      } else if (c == '{' || c == '}') {
        continue;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        shown += kNoBreakSpace;
      } else {
        shown += c;
      }
    }
    MathNode mt = token("mtext", shown);
    const SymbolEntry* e = table_.find(n.command);
    if (e && e->value != "normal") mt.set("mathvariant", e->value);
    return mt;
  }

  MathNode accent(const Node& n) {
    const SymbolEntry* e = table_.find(n.command);
    MathNode mark = token("mo", e ? e->value : "^");
    mark.set("stretchy", e && e->stretchy ? "true" : "false");
    const bool under = e && e->under;
    MathNode acc = make_element(under ? "munder" : "mover", nodes(emit_node(n.children.at(0)), std::move(mark)));
    acc.set(under ? "accentunder" : "accent", "true");
    return acc;
  }

  const EmitOptions& opt_;
  const SymbolTable& table_;
};

}  // namespace

MathNode emit_mathml(const tex::Node& ast, const EmitOptions& options, const SymbolTable& table) {
  return Emitter(options, table).root(ast);
}

}  // namespace mathrender::mml
