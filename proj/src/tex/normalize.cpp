#include "mathrender/tex/parser.hpp"

namespace mathrender::tex {
namespace {

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_literal_closer(const Node& n) {
  return n.kind == NodeKind::Operator && n.command.empty() && (n.text == ")" || n.text == "]");
}

// Row that the parser rebuilds from "( ... )" followed by a script mark.
bool is_regroupable_paren_row(const Node& n) {
  if (n.kind != NodeKind::Row || n.children.size() < 2) return false;
  const Node& first = n.children.front();
  const Node& last = n.children.back();
  if (!is_literal_closer(last) || first.kind != NodeKind::Operator || !first.command.empty()) return false;
  const std::string open = last.text == ")" ? "(" : "[";
  if (first.text != open) return false;
  int level = 0;
  for (std::size_t i = n.children.size() - 1; i-- > 1;) {
    const Node& c = n.children[i];
    if (c.kind != NodeKind::Operator || !c.command.empty()) continue;
    if (c.text == last.text) ++level;
    if (c.text == open && level-- == 0) return false;
  }
  return level == 0;
}

bool bare_script_base(const Node& n) {
  switch (n.kind) {
    case NodeKind::Identifier:
    case NodeKind::Number:
    case NodeKind::Symbol:
    case NodeKind::Fraction:
    case NodeKind::Radical:
    case NodeKind::Delimited:
    case NodeKind::Function:
    case NodeKind::Array:
    case NodeKind::Text:
    case NodeKind::Accent:
    case NodeKind::Stack:
      return true;
    case NodeKind::Styled:
      return !n.switch_style;
    case NodeKind::Operator:
      return !is_literal_closer(n);
    case NodeKind::Row:
      return is_regroupable_paren_row(n);
    case NodeKind::Script:
      return false;
  }
  return false;
}

bool starts_with_digit(const Node& n) {
  if (n.kind == NodeKind::Number) return true;
  return n.kind == NodeKind::Script && n.base().kind == NodeKind::Number;
}

class Writer {
 public:
  std::string take() { return std::move(out_); }

  // Appends raw text, separating a preceding control word from a letter.
  void put(std::string_view s) {
    if (s.empty()) return;
    if (pending_space_ && is_ascii_letter(s.front())) out_ += ' ';
    out_ += s;
    pending_space_ = false;
  }

  void command(std::string_view cmd) {
    put(cmd);
    pending_space_ = cmd.size() > 1 && cmd.front() == '\\' && is_ascii_letter(cmd.back());
  }

  bool ends_with_number() const {
    if (out_.empty()) return false;
    std::size_t i = out_.size();
    if (out_[i - 1] == '.') --i;
    return i > 0 && is_digit(out_[i - 1]);
  }

  void braced(const Node& n) {
    put("{");
    items(n);
    put("}");
  }

  // A node standing for a whole row: row children inline, anything else as one item.
  void items(const Node& n) {
    if (n.kind != NodeKind::Row) {
      node(n);
      return;
    }
    for (const Node& c : n.children) {
      const bool brace = c.kind == NodeKind::Row || (c.kind == NodeKind::Styled && c.switch_style) ||
                         (starts_with_digit(c) && ends_with_number());
      if (brace) {
        braced(c);
      } else {
        node(c);
      }
    }
  }

  void node(const Node& n) {
    switch (n.kind) {
      case NodeKind::Row:
        items(n);
        return;
      case NodeKind::Identifier:
      case NodeKind::Number:
        put(n.text);
        return;
      case NodeKind::Symbol:
      case NodeKind::Function:
        if (n.command.empty()) {
          command(n.text);
        } else {
          command(n.command);
          put("{");
          put(n.text);
          put("}");
        }
        return;
      case NodeKind::Operator:
        if (!n.command.empty()) command(n.command);
        if (n.text.front() == '\\') {
          command(n.text);
        } else {
          put(n.text);
        }
        return;
      case NodeKind::Fraction:
      case NodeKind::Stack:
        command(n.command);
        braced(n.children.at(0));
        braced(n.children.at(1));
        return;
      case NodeKind::Accent:
        command(n.command);
        braced(n.children.at(0));
        return;
      case NodeKind::Styled:
        command(n.command);
        if (n.switch_style) {
          items(n.children.at(0));
        } else {
          braced(n.children.at(0));
        }
        return;
      case NodeKind::Text:
        command(n.command);
        put("{");
        out_ += n.text;
        put("}");
        return;
      case NodeKind::Radical:
        command("\\sqrt");
        if (const Node* idx = n.index()) {
          put("[");
          braced(*idx);
          put("]");
        }
        braced(n.children.at(0));
        return;
      case NodeKind::Delimited:
        command("\\left");
        delimiter(n.left);
        items(n.children.at(0));
        command("\\right");
        delimiter(n.right);
        return;
      case NodeKind::Script:
        script(n);
        return;
      case NodeKind::Array:
        array(n);
        return;
    }
  }

 private:
  void delimiter(const std::string& d) {
    if (!d.empty() && d.front() == '\\') {
      command(d);
    } else {
      put(d);
    }
  }

  void script(const Node& n) {
    const Node& base = n.base();
    if (base.kind == NodeKind::Row && base.children.empty()) {
      put("{}");
    } else if (bare_script_base(base)) {
      node(base);
    } else {
      braced(base);
    }
    if (const Node* s = n.sub()) {
      put("_");
      braced(*s);
    }
    if (const Node* s = n.sup()) {
      put("^");
      braced(*s);
    }
  }

  void array(const Node& n) {
    command("\\begin");
    put("{" + n.text + "}");
    if (!n.spec.empty() || n.text == "array") put("{" + n.spec + "}");
    for (std::size_t r = 0; r < n.children.size(); ++r) {
      if (r > 0) command("\\\\");
      const Node& row = n.children[r];
      for (std::size_t c = 0; c < row.children.size(); ++c) {
        if (c > 0) put("&");
        items(row.children[c]);
      }
    }
    command("\\end");
    put("{" + n.text + "}");
  }

  std::string out_;
  bool pending_space_ = false;
};

}  // namespace

std::string normalize(const Node& ast) {
  Writer w;
  w.items(ast);
  return w.take();
}

}  // namespace mathrender::tex
