#pragma once

// Brute-force reference layout for a small expression language (letters,
// numbers, + - =, \frac, \sqrt, scripts).  It reads the constants and metrics
// files directly and recomputes every glyph and rule position from the
// documented rules, sharing no code with the engine.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef MATHRENDER_DATA_DIR
#error "MATHRENDER_DATA_DIR must point at the data directory"
#endif

namespace oracle {

inline std::string read_file(const std::string& name) {
  std::ifstream in(std::string(MATHRENDER_DATA_DIR) + "/" + name, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// name = value, thousandths.
inline std::map<std::string, double> load_constants() {
  std::map<std::string, double> out;
  std::istringstream in(read_file("layout.conf"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string name, eq;
    long value = 0;
    if (ls >> name >> eq >> value && eq == "=") out[name] = value / 1000.0;
  }
  return out;
}

struct Glyph {
  double advance, height, depth, italic;
};

inline std::map<char32_t, Glyph> load_metrics() {
  std::map<char32_t, Glyph> out;
  std::istringstream in(read_file("metrics.tsv"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string hex;
    long a, h, d, ic;
    ls >> hex >> a >> h >> d >> ic;
    out[static_cast<char32_t>(std::stoul(hex, nullptr, 16))] = {a / 1000.0, h / 1000.0, d / 1000.0, ic / 1000.0};
  }
  return out;
}

inline std::string utf8(char32_t cp) {
  std::string s;
  if (cp < 0x80) {
    s += static_cast<char>(cp);
  } else if (cp < 0x800) {
    s += static_cast<char>(0xC0 | (cp >> 6));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    s += static_cast<char>(0xE0 | (cp >> 12));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    s += static_cast<char>(0xF0 | (cp >> 18));
    s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return s;
}

struct Expr {
  enum Kind { Letter, Number, Row, Frac, Sqrt, Scripts } kind = Letter;
  std::string text;        // Letter, Number
  std::vector<Expr> kids;  // Row items; Frac num, den; Sqrt body; Scripts base, [sub], [sup]
  std::string ops;         // Row: operator between kids i and i+1, one of + - =
  bool sub = false, sup = false;
};

inline std::string to_tex(const Expr& e) {
  switch (e.kind) {
    case Expr::Letter:
    case Expr::Number: return e.text;
    case Expr::Row: {
      std::string s = to_tex(e.kids[0]);
      for (std::size_t i = 1; i < e.kids.size(); ++i) s += e.ops[i - 1] + to_tex(e.kids[i]);
      return s;
    }
    case Expr::Frac: return "\\frac{" + to_tex(e.kids[0]) + "}{" + to_tex(e.kids[1]) + "}";
    case Expr::Sqrt: return "\\sqrt{" + to_tex(e.kids[0]) + "}";
    case Expr::Scripts: {
      const Expr& base = e.kids[0];
      std::string s = base.kind == Expr::Row ? "{" + to_tex(base) + "}" : to_tex(base);
      std::size_t k = 1;
      if (e.sub) s += "_{" + to_tex(e.kids[k++]) + "}";
      if (e.sup) s += "^{" + to_tex(e.kids[k++]) + "}";
      return s;
    }
  }
  return {};
}

class Generator {
 public:
  explicit Generator(unsigned seed) : rng_(seed) {}

  // Structural depth (fractions, radicals, scripts) at most max_depth.
  Expr row(int max_depth) {
    Expr r;
    r.kind = Expr::Row;
    const int n = pick(1, 3);
    for (int i = 0; i < n; ++i) {
      if (i > 0) r.ops += "+-="[pick(0, 2)];
      r.kids.push_back(item(max_depth));
    }
    return r;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Expr leaf() {
    Expr e;
    if (pick(0, 3) == 0) {
      e.kind = Expr::Number;
      e.text = std::to_string(pick(0, 99));
    } else {
      e.kind = Expr::Letter;
      e.text = std::string(1, static_cast<char>('a' + pick(0, 25)));
    }
    return e;
  }

  Expr item(int max_depth) {
    if (max_depth == 0) return leaf();
    Expr e;
    switch (pick(0, 4)) {
      case 0: return leaf();
      case 1:
        e.kind = Expr::Frac;
        e.kids = {row(max_depth - 1), row(max_depth - 1)};
        return e;
      case 2:
        e.kind = Expr::Sqrt;
        e.kids = {row(max_depth - 1)};
        return e;
      default: {
        e.kind = Expr::Scripts;
        if (pick(0, 3) == 0) {
          Expr base;
          base.kind = Expr::Row;
          base.kids = {leaf(), leaf()};
          base.ops = "+";
          e.kids.push_back(base);
        } else {
          e.kids.push_back(leaf());
        }
        const int which = pick(0, 2);
        e.sub = which != 1;
        e.sup = which != 0;
        if (e.sub) e.kids.push_back(row(max_depth - 1));
        if (e.sup) e.kids.push_back(row(max_depth - 1));
        return e;
      }
    }
  }

  std::mt19937 rng_;
};

struct Item {
  bool rule = false;
  std::string text;
  double x = 0, y = 0, width = 0, height = 0, depth = 0;
};

struct Box {
  double width = 0, height = 0, depth = 0, italic = 0;
  bool glyph = false;
  std::vector<Item> items;  // relative to the box origin, y downward
};

class Layout {
 public:
  Layout() : c_(load_constants()), m_(load_metrics()) {}

  double k(const std::string& name) const { return c_.at(name); }
  const Glyph& metrics(char32_t cp) const { return m_.at(cp); }
  double scale(int level) const { return level == 0 ? 1.0 : level == 1 ? k("script_scale") : k("scriptscript_scale"); }

  // The whole formula: an inline or display root always forms a row box.
  Box root(const Expr& e, bool display) const { return row(e, 0, display, false); }

  // Single-glyph-run box for the given code points.
  Box run(const std::vector<char32_t>& cps, int level) const {
    const double s = scale(level);
    Box b;
    b.glyph = true;
    Item it;
    for (std::size_t i = 0; i < cps.size(); ++i) {
      const Glyph& g = metrics(cps[i]);
      it.text += utf8(cps[i]);
      it.width += g.advance * s;
      it.height = i == 0 ? g.height * s : std::max(it.height, g.height * s);
      it.depth = i == 0 ? g.depth * s : std::max(it.depth, g.depth * s);
      b.italic = g.italic * s;
    }
    b.width = it.width;
    b.height = it.height;
    b.depth = it.depth;
    b.items.push_back(it);
    return b;
  }

  Box layout(const Expr& e, int level, bool display) const {
    switch (e.kind) {
      case Expr::Letter: {
        const char c = e.text[0];
        return run({c == 'h' ? char32_t(0x210E) : char32_t(0x1D44E + (c - 'a'))}, level);
      }
      case Expr::Number: {
        std::vector<char32_t> cps(e.text.begin(), e.text.end());
        return run(cps, level);
      }
      case Expr::Row: return row(e, level, display, true);
      case Expr::Frac: return frac(e, level, display);
      case Expr::Sqrt: return sqrt(e, level, display);
      case Expr::Scripts: return scripts(e, level, display);
    }
    return {};
  }

 private:
  static void place(Box& into, const Box& child, double x, double y) {
    for (Item it : child.items) {
      it.x += x;
      it.y += y;
      into.items.push_back(it);
    }
  }

  // Rows of one item are the item itself unless the context needs a box.
  Box row(const Expr& e, int level, bool display, bool collapse) const {
    if (e.kind != Expr::Row) {
      Box only = layout(e, level, display);
      if (collapse) return only;
      Box b;
      b.width = only.width;
      b.height = std::max(0.0, only.height);
      b.depth = std::max(0.0, only.depth);
      place(b, only, 0, 0);
      return b;
    }
    if (e.kids.size() == 1 && collapse) return layout(e.kids[0], level, display);
    const double s = scale(level);
    Box b;
    double x = 0;
    for (std::size_t i = 0; i < e.kids.size(); ++i) {
      if (i > 0) {
        const char op = e.ops[i - 1];
        const double gap = level == 0 ? (op == '=' ? k("space_thick") : k("space_medium")) * s : 0.0;
        const Box g = run({op == '+' ? U'+' : op == '-' ? char32_t(0x2212) : U'='}, level);
        x += gap;
        place(b, g, x, 0);
        b.height = std::max(b.height, g.height);
        b.depth = std::max(b.depth, g.depth);
        x += g.width + gap;
      }
      const Box kid = layout(e.kids[i], level, display);
      place(b, kid, x, 0);
      b.height = std::max(b.height, kid.height);
      b.depth = std::max(b.depth, kid.depth);
      x += kid.width;
    }
    b.width = x;
    return b;
  }

  Box frac(const Expr& e, int level, bool display) const {
    const double s = scale(level);
    const int inner = display ? level : level + 1;
    const Box num = row(e.kids[0], inner, false, true);
    const Box den = row(e.kids[1], inner, false, true);
    const double t = k("rule_thickness") * s;
    const double a = k("axis_height") * s;
    const double phi = k(display ? "frac_gap_display" : "frac_gap_text") * s;
    double u = k(display ? "num_shift_display" : "num_shift_text") * s;
    double v = k(display ? "denom_shift_display" : "denom_shift_text") * s;
    // Numerator bottom at least phi above the rule top, denominator top at
    // least phi below the rule bottom.
    u = std::max(u, a + t / 2 + phi + num.depth);
    v = std::max(v, den.height + phi - a + t / 2);
    const double p = k("frac_side_padding") * s;
    const double w = std::max(num.width, den.width);
    Box b;
    b.width = w + 2 * p;
    place(b, num, p + (w - num.width) / 2, -u);
    Item rule;
    rule.rule = true;
    rule.x = p;
    rule.y = -(a - t / 2);
    rule.width = w;
    rule.height = t;
    b.items.push_back(rule);
    place(b, den, p + (w - den.width) / 2, v);
    b.height = std::max({0.0, u + num.height, a + t / 2, den.height - v});
    b.depth = std::max({0.0, num.depth - u, t / 2 - a, v + den.depth});
    return b;
  }

  Box sqrt(const Expr& e, int level, bool display) const {
    const double s = scale(level);
    const Box body = row(e.kids[0], level, display, false);
    double phi = k(display ? "radical_gap_display" : "radical_gap_text") * s;
    const double t = k("rule_thickness") * s;
    const Glyph& g = metrics(0x221A);
    const double natural = (g.height + g.depth) * s;
    const double need = body.height + body.depth + phi + t;
    const double f = need > natural ? need / natural : 1.0;
    // Surplus surd height is split evenly above and below the radicand.
    if (natural > need) phi = phi + (natural - need) / 2;
    Item surd;
    surd.text = utf8(0x221A);
    surd.width = g.advance * s;
    surd.height = g.height * s * f;
    surd.depth = g.depth * s * f;
    // Surd top flush with the top of the overbar.
    surd.y = surd.height - (body.height + phi + t);
    Box b;
    b.items.push_back(surd);
    Item bar;
    bar.rule = true;
    bar.x = surd.width;
    bar.y = -(body.height + phi);
    bar.width = body.width;
    bar.height = t;
    b.items.push_back(bar);
    place(b, body, surd.width, 0);
    b.width = surd.width + body.width;
    b.height = std::max({0.0, surd.height - surd.y, body.height + phi + t, body.height});
    b.depth = std::max({0.0, surd.depth + surd.y, body.depth, -(body.height + phi)});
    return b;
  }

  Box scripts(const Expr& e, int level, bool display) const {
    const double s = scale(level);
    const double s1 = scale(level + 1);
    const Box base = e.kids[0].kind == Expr::Row ? row(e.kids[0], level, display, true) : layout(e.kids[0], level, display);
    std::size_t next = 1;
    const bool has_sub = e.sub, has_sup = e.sup;
    Box sub, sup;
    if (has_sub) sub = row(e.kids[next++], level + 1, false, true);
    if (has_sup) sup = row(e.kids[next++], level + 1, false, true);
    const double xh = k("x_height") * s;
    const double ic = base.glyph ? base.italic : 0.0;
    const double u0 = base.glyph ? 0.0 : base.height - k("sup_drop") * s1;
    const double v0 = base.glyph ? 0.0 : base.depth + k("sub_drop") * s1;
    double u = 0, v = 0;
    if (has_sup) u = std::max({u0, k("sup_shift") * s, sup.depth + xh / 4});
    if (has_sub && !has_sup) v = std::max({v0, k("sub_shift") * s, sub.height - xh * 4 / 5});
    if (has_sub && has_sup) {
      v = std::max(v0, k("sub_shift_with_sup") * s);
      // Minimum gap between the superscript bottom and the subscript top.
      v = std::max(v, k("sub_sup_gap") * s - (u - sup.depth) + sub.height);
    }
    Box b;
    place(b, base, 0, 0);
    double extra = 0;
    b.height = std::max(0.0, base.height);
    b.depth = std::max(0.0, base.depth);
    if (has_sub) {
      place(b, sub, base.width, v);
      extra = std::max(extra, sub.width);
      b.height = std::max(b.height, sub.height - v);
      b.depth = std::max(b.depth, sub.depth + v);
    }
    if (has_sup) {
      place(b, sup, base.width + ic, -u);
      extra = std::max(extra, sup.width + ic);
      b.height = std::max(b.height, sup.height + u);
      b.depth = std::max(b.depth, sup.depth - u);
    }
    b.width = base.width + extra + k("script_space") * s;
    return b;
  }

  std::map<std::string, double> c_;
  std::map<char32_t, Glyph> m_;
};

}  // namespace oracle
