#include "mathrender/layout/svg.hpp"

#include <cstdio>

namespace mathrender::layout {
namespace {

void escape_text(std::string& out, std::string_view text) {
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
}

void attr(std::string& out, std::string_view name, double v, std::string_view unit = {}) {
  out += ' ';
  out += name;
  out += "=\"";
  out += format_number(v);
  out += unit;
  out += '"';
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s(buf);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

SvgDocument emit_svg(const LayoutBox& root, const LayoutConstants& constants) {
  const double k = constants.ex_per_em;
  SvgDocument doc;
  doc.width = root.width * k;
  doc.height = (root.height + root.depth) * k;
  doc.vertical_align = -root.depth * k;

  std::string& s = doc.body;
  s += "<svg xmlns=\"";
  s += kSvgNamespace;
  s += '"';
  attr(s, "width", doc.width, "ex");
  attr(s, "height", doc.height, "ex");
  s += " viewBox=\"0 " + format_number(-root.height * k) + ' ' + format_number(doc.width) + ' ' +
       format_number(doc.height) + '"';
  s += " style=\"vertical-align: " + format_number(doc.vertical_align) + "ex\"";
  s += " role=\"img\" focusable=\"false\"><g fill=\"currentColor\" stroke=\"none\" font-family=\"";
  s += kSvgFontFamily;
  s += "\">";

  for (const PlacedBox& p : flatten(root)) {
    const LayoutBox& b = *p.box;
    const double x = (p.x - root.x) * k;
    const double y = (p.y - root.y) * k;
    if (b.kind == BoxKind::Rule) {
      s += "<rect";
      attr(s, "x", x);
      attr(s, "y", y - b.height * k);
      attr(s, "width", b.width * k);
      attr(s, "height", (b.height + b.depth) * k);
      s += "/>";
    } else if (b.kind == BoxKind::Glyph && b.tofu) {
      s += "<rect class=\"tofu\"";
      attr(s, "x", x);
      attr(s, "y", y - b.height * k);
      attr(s, "width", b.width * k);
      attr(s, "height", (b.height + b.depth) * k);
      s += " fill=\"none\" stroke=\"currentColor\"";
      attr(s, "stroke-width", 0.04 * b.scale * k);
      s += "/>";
    } else if (b.kind == BoxKind::Glyph && !b.text.empty()) {
      s += "<text";
      if (b.stretch_x != 1.0 || b.stretch_y != 1.0) {
        s += " transform=\"matrix(" + format_number(b.stretch_x) + " 0 0 " + format_number(b.stretch_y) + ' ' +
             format_number(x) + ' ' + format_number(y) + ")\"";
      } else {
        attr(s, "x", x);
        attr(s, "y", y);
      }
      attr(s, "font-size", b.scale * k);
      s += '>';
      escape_text(s, b.text);
      s += "</text>";
    }
  }
  s += "</g></svg>";
  return doc;
}

}  // namespace mathrender::layout
