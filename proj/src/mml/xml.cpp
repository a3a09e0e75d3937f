#include "mathrender/mml/xml.hpp"

#include <charconv>
#include <cstdint>

#include "mathrender/stack_guard.hpp"
#include "mathrender/utf8.hpp"

namespace mathrender::mml {
namespace {

// Length of a well-formed numeric character reference starting at s[i]
// ("&#x2212;" or "&#8722;"), or 0.
std::size_t numeric_reference_length(std::string_view s, std::size_t i) {
  if (i + 3 >= s.size() || s[i] != '&' || s[i + 1] != '#') return 0;
  const bool hex = s[i + 2] == 'x';
  std::size_t j = i + (hex ? 3 : 2);
  const std::size_t digits_at = j;
  std::uint32_t cp = 0;
  while (j < s.size() && s[j] != ';') {
    const char c = s[j];
    int d;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else if (hex && c >= 'a' && c <= 'f') {
      d = c - 'a' + 10;
    } else if (hex && c >= 'A' && c <= 'F') {
      d = c - 'A' + 10;
    } else {
      return 0;
    }
    cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
    if (cp > 0x10FFFF) return 0;
    ++j;
  }
  if (j >= s.size() || j == digits_at) return 0;
  const bool valid_char = cp == 0x9 || cp == 0xA || cp == 0xD || (cp >= 0x20 && cp <= 0xD7FF) ||
                          (cp >= 0xE000 && cp <= 0xFFFD) || cp >= 0x10000;
  return valid_char ? j + 1 - i : 0;
}

void escape_into(std::string& out, std::string_view s, bool attribute) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
        } else {
          out += c;
        }
        break;
      case '&': {
        const std::size_t len = numeric_reference_length(s, i);
        if (len) {
          out.append(s, i, len);
          i += len - 1;
        } else {
          out += "&amp;";
        }
        break;
      }
      default: out += c;
    }
  }
}

void serialize_into(std::string& out, const MathNode& n) {
  out += '<';
  out += n.element;
  for (const auto& [k, v] : n.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    escape_into(out, v, true);
    out += '"';
  }
  if (!is_token_element(n.element) && n.children.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  if (is_token_element(n.element)) {
    escape_into(out, n.text, false);
  } else {
    for (const auto& c : n.children) serialize_into(out, c);
  }
  out += "</";
  out += n.element;
  out += '>';
}

struct Failure {
  MathMLErrorCode code;
  std::string message;
  std::size_t offset;
};

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
         c == ':' || c == '.';
}

bool is_xml_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_element_allowed(std::string_view name) {
  return is_known_element(name) || name == "semantics" || name == "annotation" || name == "annotation-xml" ||
         name == "mfenced";
}

class XmlReader {
 public:
  XmlReader(std::string_view doc, const MathMLLimits& limits) : s_(doc), limits_(limits) {}

  MathNode document() {
    skip_misc(/*prolog=*/true);
    if (at_end() || s_[pos_] != '<') fail(MathMLErrorCode::NotWellFormed, "expected root element");
    const std::size_t root_at = pos_;
    MathNode root = element(0);
    skip_misc(/*prolog=*/false);
    if (!at_end()) fail(MathMLErrorCode::NotWellFormed, "content after the root element");
    if (root.element != "math") {
      throw Failure{MathMLErrorCode::NotWellFormed, "root element must be <math>, found <" + root.element + ">",
                    root_at};
    }
    if (const std::string* ns = root.attr("xmlns")) {
      if (*ns != kMathMLNamespace) {
        throw Failure{MathMLErrorCode::UnknownElement, "root is not in the MathML namespace", root_at};
      }
    } else {
      root.attributes.insert(root.attributes.begin(), {"xmlns", std::string(kMathMLNamespace)});
    }
    return root;
  }

 private:
  [[noreturn]] void fail(MathMLErrorCode code, std::string message) const {
    throw Failure{code, std::move(message), std::min(pos_, s_.size())};
  }

  bool at_end() const { return pos_ >= s_.size(); }
  bool looking_at(std::string_view t) const { return s_.substr(pos_, t.size()) == t; }

  void skip_space() {
    while (!at_end() && is_xml_space(s_[pos_])) ++pos_;
  }

  void skip_until(std::string_view terminator, const char* what) {
    const std::size_t end = s_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(MathMLErrorCode::NotWellFormed, std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  // Whitespace, comments and processing instructions around the root.
  void skip_misc(bool prolog) {
    while (true) {
      skip_space();
      if (looking_at("<!--")) {
        pos_ += 4;
        skip_until("-->", "comment");
      } else if (looking_at("<?")) {
        pos_ += 2;
        skip_until("?>", "processing instruction");
      } else if (prolog && looking_at("<!DOCTYPE")) {
        fail(MathMLErrorCode::NotWellFormed, "document type declarations are not accepted");
      } else {
        return;
      }
    }
  }

  std::string name() {
    const std::size_t start = pos_;
    while (!at_end() && is_name_char(s_[pos_])) ++pos_;
    if (pos_ == start) fail(MathMLErrorCode::NotWellFormed, "expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }

  // Character data with entities resolved into the MathNode text convention.
  void char_data(std::string& out, std::size_t end, bool attribute) {
    while (pos_ < end) {
      const char c = s_[pos_];
      if (c == '<') fail(MathMLErrorCode::NotWellFormed, "'<' not allowed here");
      if (c != '&') {
        out += c;
        ++pos_;
        continue;
      }
      if (const std::size_t len = numeric_reference_length(s_, pos_); len && pos_ + len <= end) {
        out.append(s_, pos_, len);
        pos_ += len;
        continue;
      }
      static const std::pair<std::string_view, std::string_view> named[] = {
          {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&apos;", "'"}, {"&amp;", "&#x26;"},
      };
      bool matched = false;
      for (const auto& [ent, rep] : named) {
        if (looking_at(ent)) {
          out += rep;
          pos_ += ent.size();
          matched = true;
          break;
        }
      }
      if (!matched) fail(MathMLErrorCode::NotWellFormed, attribute ? "bad reference in attribute" : "undefined entity reference");
    }
  }

  MathNode element(std::size_t depth) {
    if (depth >= limits_.max_depth || stack_remaining() < kStackReserve) {
      fail(MathMLErrorCode::NotWellFormed, "document nests deeper than " + std::to_string(limits_.max_depth));
    }
    const std::size_t open_at = pos_;
    ++pos_;  // '<'
    MathNode n;
    n.element = name();
    if (!is_element_allowed(n.element)) {
      throw Failure{MathMLErrorCode::UnknownElement, "unsupported element <" + n.element + ">", open_at};
    }
    // attributes
    while (true) {
      const std::size_t before = pos_;
      skip_space();
      if (at_end()) fail(MathMLErrorCode::NotWellFormed, "unterminated start tag");
      if (s_[pos_] == '/' || s_[pos_] == '>') break;
      if (pos_ == before) fail(MathMLErrorCode::NotWellFormed, "expected whitespace before attribute");
      std::string key = name();
      skip_space();
      if (at_end() || s_[pos_] != '=') fail(MathMLErrorCode::NotWellFormed, "expected '=' after attribute name");
      ++pos_;
      skip_space();
      if (at_end() || (s_[pos_] != '"' && s_[pos_] != '\'')) fail(MathMLErrorCode::NotWellFormed, "expected quoted value");
      const char quote = s_[pos_++];
      const std::size_t end = s_.find(quote, pos_);
      if (end == std::string_view::npos) fail(MathMLErrorCode::NotWellFormed, "unterminated attribute value");
      std::string value;
      char_data(value, end, true);
      pos_ = end + 1;
      if (n.attr(key)) fail(MathMLErrorCode::NotWellFormed, "duplicate attribute " + key);
      n.attributes.emplace_back(std::move(key), std::move(value));
    }
    if (s_[pos_] == '/') {
      ++pos_;
      if (at_end() || s_[pos_] != '>') fail(MathMLErrorCode::NotWellFormed, "expected '>'");
      ++pos_;
      return finish(std::move(n), open_at);
    }
    ++pos_;  // '>'

    const bool token = is_token_element(n.element);
    const bool skip_content = n.element == "annotation" || n.element == "annotation-xml";
    std::string text;
    while (true) {
      if (at_end()) fail(MathMLErrorCode::NotWellFormed, "missing </" + n.element + ">");
      if (looking_at("</")) {
        pos_ += 2;
        const std::size_t at = pos_;
        const std::string closing = name();
        if (closing != n.element) {
          throw Failure{MathMLErrorCode::NotWellFormed,
                        "</" + closing + "> does not close <" + n.element + ">", at};
        }
        skip_space();
        if (at_end() || s_[pos_] != '>') fail(MathMLErrorCode::NotWellFormed, "expected '>'");
        ++pos_;
        break;
      }
      if (looking_at("<!--")) {
        pos_ += 4;
        skip_until("-->", "comment");
        continue;
      }
      if (looking_at("<![CDATA[")) {
        pos_ += 9;
        const std::size_t end = s_.find("]]>", pos_);
        if (end == std::string_view::npos) fail(MathMLErrorCode::NotWellFormed, "unterminated CDATA section");
        for (std::size_t i = pos_; i < end; ++i) {
          if (s_[i] == '&') {
            text += "&#x26;";
          } else {
            text += s_[i];
          }
        }
        pos_ = end + 3;
        continue;
      }
      if (looking_at("<?")) {
        pos_ += 2;
        skip_until("?>", "processing instruction");
        continue;
      }
      if (s_[pos_] == '<') {
        if (skip_content) {
          skip_element(depth + 1);
          continue;
        }
        if (token) {
          fail(MathMLErrorCode::ArityViolation, "<" + n.element + "> must not contain elements");
        }
        n.children.push_back(element(depth + 1));
        continue;
      }
      std::size_t end = s_.find('<', pos_);
      if (end == std::string_view::npos) end = s_.size();
      const std::size_t text_at = pos_;
      std::string chunk;
      char_data(chunk, end, false);
      if (!token && !skip_content && chunk.find_first_not_of(" \t\r\n") != std::string::npos) {
        throw Failure{MathMLErrorCode::ArityViolation, "text is not allowed directly inside <" + n.element + ">",
                      text_at};
      }
      text += chunk;
    }
    if (token) n.text = collapse_whitespace(text);
    return finish(std::move(n), open_at);
  }

  // Consumes an element inside an annotation without interpreting it.
  void skip_element(std::size_t depth) {
    if (depth >= limits_.max_depth || stack_remaining() < kStackReserve) {
      fail(MathMLErrorCode::NotWellFormed, "document nests too deeply");
    }
    ++pos_;
    const std::string tag = name();
    while (!at_end() && s_[pos_] != '>' && !looking_at("/>")) {
      if (s_[pos_] == '"' || s_[pos_] == '\'') {
        const std::size_t end = s_.find(s_[pos_], pos_ + 1);
        if (end == std::string_view::npos) fail(MathMLErrorCode::NotWellFormed, "unterminated attribute value");
        pos_ = end;
      }
      ++pos_;
    }
    if (at_end()) fail(MathMLErrorCode::NotWellFormed, "unterminated start tag");
    if (looking_at("/>")) {
      pos_ += 2;
      return;
    }
    ++pos_;
    while (true) {
      if (at_end()) fail(MathMLErrorCode::NotWellFormed, "missing </" + tag + ">");
      if (looking_at("</")) {
        pos_ += 2;
        if (name() != tag) fail(MathMLErrorCode::NotWellFormed, "mismatched end tag in annotation");
        skip_space();
        if (at_end() || s_[pos_] != '>') fail(MathMLErrorCode::NotWellFormed, "expected '>'");
        ++pos_;
        return;
      }
      if (looking_at("<!--")) {
        pos_ += 4;
        skip_until("-->", "comment");
      } else if (looking_at("<![CDATA[")) {
        pos_ += 9;
        skip_until("]]>", "CDATA section");
      } else if (s_[pos_] == '<') {
        skip_element(depth + 1);
      } else {
        ++pos_;
      }
    }
  }

  static std::string collapse_whitespace(const std::string& s) {
    std::string out;
    bool pending = false;
    for (char c : s) {
      if (is_xml_space(c)) {
        pending = !out.empty();
        continue;
      }
      if (pending) out += ' ';
      pending = false;
      out += c;
    }
    return out;
  }

  MathNode finish(MathNode n, std::size_t at) {
    if (n.element == "semantics") {
      for (auto& c : n.children) {
        if (c.element != "annotation" && c.element != "annotation-xml") return std::move(c);
      }
      throw Failure{MathMLErrorCode::ArityViolation, "<semantics> has no presentation child", at};
    }
    for (const auto& c : n.children) {
      if (c.element == "annotation" || c.element == "annotation-xml") {
        throw Failure{MathMLErrorCode::UnknownElement, "<" + c.element + "> outside <semantics>", at};
      }
    }
    if (n.element == "mfenced") return unfence(std::move(n));
    if (auto arity = required_arity(n.element); arity && n.children.size() != *arity) {
      throw Failure{MathMLErrorCode::ArityViolation,
                    "<" + n.element + "> needs " + std::to_string(*arity) + " children, found " +
                        std::to_string(n.children.size()),
                    at};
    }
    const char* expected = n.element == "mtable" ? "mtr" : n.element == "mtr" ? "mtd" : nullptr;
    for (const auto& c : n.children) {
      if (expected && c.element != expected) {
        throw Failure{MathMLErrorCode::ArityViolation,
                      "<" + n.element + "> may only contain <" + expected + ">, found <" + c.element + ">", at};
      }
      if (!expected && (c.element == "mtr" || c.element == "mtd")) {
        throw Failure{MathMLErrorCode::ArityViolation, "<" + c.element + "> outside a table", at};
      }
    }
    return n;
  }

  static MathNode unfence(MathNode n) {
    const std::string* open = n.attr("open");
    const std::string* close = n.attr("close");
    const std::string* seps = n.attr("separators");
    std::vector<std::string> separators;
    {
      const std::string raw = seps ? *seps : ",";
      std::size_t i = 0;
      while (i < raw.size()) {
        if (is_xml_space(raw[i])) {
          ++i;
          continue;
        }
        const std::size_t len = raw[i] == '&' ? std::max<std::size_t>(1, numeric_reference_length(raw, i))
                                              : utf8::sequence_length(static_cast<unsigned char>(raw[i]));
        separators.push_back(raw.substr(i, len));
        i += len;
      }
    }
    auto fence = [](std::string text) {
      MathNode mo = make_token("mo", std::move(text));
      mo.set("stretchy", "true");
      return mo;
    };
    MathNode row = make_element("mrow");
    const std::string o = open ? *open : "(";
    const std::string c = close ? *close : ")";
    if (!o.empty()) row.children.push_back(fence(o));
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i > 0 && !separators.empty()) {
        row.children.push_back(make_token("mo", separators[std::min(i - 1, separators.size() - 1)]));
      }
      row.children.push_back(std::move(n.children[i]));
    }
    if (!c.empty()) row.children.push_back(fence(c));
    return row;
  }

  std::string_view s_;
  const MathMLLimits& limits_;
  std::size_t pos_ = 0;
};

void locate(std::string_view doc, std::size_t offset, MathMLParseError& e) {
  e.line = 1;
  e.column = 1;
  for (std::size_t i = 0; i < offset && i < doc.size();) {
    if (doc[i] == '\n') {
      ++e.line;
      e.column = 1;
      ++i;
      continue;
    }
    i += std::max<std::size_t>(1, utf8::sequence_length(static_cast<unsigned char>(doc[i])));
    ++e.column;
  }
}

}  // namespace

std::string_view to_string(MathMLErrorCode code) {
  switch (code) {
    case MathMLErrorCode::NotWellFormed: return "NotWellFormed";
    case MathMLErrorCode::UnknownElement: return "UnknownElement";
    case MathMLErrorCode::ArityViolation: return "ArityViolation";
    case MathMLErrorCode::InputTooLarge: return "InputTooLarge";
  }
  return "?";
}

std::string serialize_mathml(const MathNode& node) {
  std::string out;
  serialize_into(out, node);
  return out;
}

Result<MathNode, MathMLParseError> parse_mathml(std::string_view document, const MathMLLimits& limits) {
  if (document.size() > limits.max_bytes) {
    return MathMLParseError{MathMLErrorCode::InputTooLarge,
                            "document is " + std::to_string(document.size()) + " bytes; limit is " +
                                std::to_string(limits.max_bytes),
                            1, 1};
  }
  if (auto bad = utf8::first_invalid(document)) {
    MathMLParseError e{MathMLErrorCode::NotWellFormed, "malformed UTF-8", 1, 1};
    locate(document, *bad, e);
    return e;
  }
  try {
    XmlReader reader(document, limits);
    return reader.document();
  } catch (const Failure& f) {
    MathMLParseError e{f.code, f.message, 1, 1};
    locate(document, f.offset, e);
    return e;
  }
}

}  // namespace mathrender::mml
