#include "mathrender/layout/measure.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <optional>
#include <set>

#include "mathrender/stack_guard.hpp"
#include "mathrender/utf8.hpp"

namespace mathrender::layout {
namespace {

using mml::MathNode;

// Atom classes for inter-atom spacing.  None marks items that take no part
// in spacing (mspace).
enum class Atom { Ord, Op, Bin, Rel, Open, Close, Punct, Apply, None };

// Inter-atom spacing in units of 1 = thin, 2 = medium, 3 = thick; negative
// entries apply only at script level 0.  Rows and columns: Ord, Op, Bin,
// Rel, Open, Close, Punct.
constexpr int kSpacing[7][7] = {
    {0, 1, -2, -3, 0, 0, 0},      // Ord
    {1, 1, 0, -3, 0, 0, 0},       // Op
    {-2, -2, 0, 0, -2, 0, 0},     // Bin
    {-3, -3, 0, 0, -3, 0, 0},     // Rel
    {0, 0, 0, 0, 0, 0, 0},        // Open
    {0, 1, -2, -3, 0, 0, 0},      // Close
    {-1, -1, 0, -1, -1, -1, -1},  // Punct
};

struct Assembly {
  char32_t delimiter, top, extender, bottom, middle;
};

constexpr Assembly kAssemblies[] = {
    {U'(', 0x239B, 0x239C, 0x239D, 0},      {U')', 0x239E, 0x239F, 0x23A0, 0},
    {U'[', 0x23A1, 0x23A2, 0x23A3, 0},      {U']', 0x23A4, 0x23A5, 0x23A6, 0},
    {U'{', 0x23A7, 0x23AA, 0x23A9, 0x23A8}, {U'}', 0x23AB, 0x23AA, 0x23AD, 0x23AC},
    {0x2308, 0x23A1, 0x23A2, 0x23A2, 0},    {0x2309, 0x23A4, 0x23A5, 0x23A5, 0},
    {0x230A, 0x23A2, 0x23A2, 0x23A3, 0},    {0x230B, 0x23A5, 0x23A5, 0x23A6, 0},
};

struct Style {
  int level = 0;
  bool display = false;
  std::string_view variant;  // inherited mathvariant, empty if none
};

Atom atom_of(mml::OperatorClass c) {
  switch (c) {
    case mml::OperatorClass::Ord: return Atom::Ord;
    case mml::OperatorClass::Bin: return Atom::Bin;
    case mml::OperatorClass::Rel: return Atom::Rel;
    case mml::OperatorClass::Open: return Atom::Open;
    case mml::OperatorClass::Close: return Atom::Close;
    case mml::OperatorClass::Punct: return Atom::Punct;
    case mml::OperatorClass::Large: return Atom::Op;
    case mml::OperatorClass::Fence: return Atom::Ord;
    case mml::OperatorClass::Apply: return Atom::Apply;
  }
  return Atom::Ord;
}

bool attr_is(const MathNode& n, std::string_view name, std::string_view value) {
  const std::string* v = n.attr(name);
  return v && *v == value;
}

bool is_scripted(std::string_view e) {
  return e == "msub" || e == "msup" || e == "msubsup" || e == "munder" || e == "mover" || e == "munderover";
}

// Length attribute in em ("0.167em", "-0.5em", "1.2em"); other units are
// not produced by the emitter and read as plain numbers of em.
std::optional<double> em_value(const std::string* v) {
  if (!v || v->empty()) return std::nullopt;
  double out = 0;
  const char* first = v->data();
  const char* last = v->data() + v->size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{}) return std::nullopt;
  return out;
}

class Measurer {
 public:
  Measurer(const GlyphMetricsTable& metrics, const LayoutConstants& c, const mml::SymbolTable& symbols,
           const MeasureOptions& options)
      : metrics_(metrics), c_(c), symbols_(symbols), options_(options) {}

  LayoutBox node(const MathNode& n, const Style& st) {
    if (options_.budget && options_.budget->expired()) throw LayoutAborted();
    if (stack_remaining() < kStackReserve) {
      warn("nesting too deep for layout; subtree drawn as a placeholder box");
      return tofu(c_.scale(st.level));
    }
    const std::string& e = n.element;
    if (e == "math") {
      Style root = st;
      if (attr_is(n, "display", "block")) root.display = true;
      return row(n.children, root);
    }
    if (e == "mo") return operator_box(n, st, nullptr);
    if (mml::is_token_element(e)) return token(n, st);
    if (e == "mspace") return space(n, st);
    if (e == "mfrac" && n.children.size() == 2) return fraction(n, st);
    if (e == "msqrt") return radical(row(n.children, st), st);
    if (e == "mroot" && n.children.size() == 2) return root(n, st);
    if (e == "msub" && n.children.size() == 2) return scripts(n.children[0], &n.children[1], nullptr, st);
    if (e == "msup" && n.children.size() == 2) return scripts(n.children[0], nullptr, &n.children[1], st);
    if (e == "msubsup" && n.children.size() == 3) {
      return scripts(n.children[0], &n.children[1], &n.children[2], st);
    }
    if ((e == "munder" || e == "mover") && n.children.size() == 2) return under_over(n, st);
    if (e == "munderover" && n.children.size() == 3) return under_over(n, st);
    if (e == "mtable") return table(n, st);
    if (e == "mstyle") return row(n.children, styled(n, st));
    return row(n.children, st);
  }

 private:
  double scale(const Style& st) const { return c_.scale(st.level); }

  void warn(std::string message) {
    if (!options_.log) return;
    if (warned_.insert(message).second) options_.log->push_back(std::move(message));
  }

  Style styled(const MathNode& n, const Style& st) const {
    Style out = st;
    if (const std::string* d = n.attr("displaystyle")) out.display = *d == "true";
    if (const std::string* l = n.attr("scriptlevel"); l && !l->empty()) {
      int v = 0;
      const bool relative = l->front() == '+' || l->front() == '-';
      const char* first = l->data() + (l->front() == '+' ? 1 : 0);
      auto [ptr, ec] = std::from_chars(first, l->data() + l->size(), v);
      if (ec == std::errc{}) out.level = std::max(0, relative ? st.level + v : v);
    }
    if (const std::string* v = n.attr("mathvariant")) out.variant = *v;
    return out;
  }

  Atom atom_class(const MathNode& n) const {
    const MathNode* cur = &n;
    while (true) {
      const std::string& e = cur->element;
      if (e == "mo") return atom_of(symbols_.operator_class(mml::decode_references(cur->text)));
      if (e == "mspace") return Atom::None;
      if ((is_scripted(e) || (e == "mstyle" && cur->children.size() == 1)) && !cur->children.empty()) {
        cur = &cur->children.front();
        continue;
      }
      return Atom::Ord;
    }
  }

  double spacing(Atom prev, Atom cur, int level) const {
    if (cur == Atom::Apply) return 0;
    if (prev == Atom::Apply) prev = Atom::Op;
    const int code = kSpacing[static_cast<int>(prev)][static_cast<int>(cur)];
    if (code < 0 && level > 0) return 0;
    switch (code < 0 ? -code : code) {
      case 1: return c_.space_thin;
      case 2: return c_.space_medium;
      case 3: return c_.space_thick;
      default: return 0;
    }
  }

  LayoutBox tofu(double s) {
    LayoutBox b;
    b.kind = BoxKind::Glyph;
    b.tofu = true;
    b.scale = s;
    b.width = c_.tofu_advance * s;
    b.height = c_.tofu_height * s;
    b.depth = c_.tofu_depth * s;
    return b;
  }

  // Glyph box for a run of code points that all have metrics.
  LayoutBox glyph_run(const std::vector<std::pair<char32_t, const GlyphMetrics*>>& run, double s) {
    LayoutBox b;
    b.kind = BoxKind::Glyph;
    b.scale = s;
    for (std::size_t i = 0; i < run.size(); ++i) {
      const GlyphMetrics& g = *run[i].second;
      utf8::append(b.text, run[i].first);
      b.width += g.advance * s;
      b.height = i == 0 ? g.height * s : std::max(b.height, g.height * s);
      b.depth = i == 0 ? g.depth * s : std::max(b.depth, g.depth * s);
      b.italic = g.italic * s;
    }
    return b;
  }

  LayoutBox glyph(char32_t cp, double s) {
    const GlyphMetrics* g = metrics_.find(cp);
    if (!g) {
      missing(cp);
      return tofu(s);
    }
    return glyph_run({{cp, g}}, s);
  }

  void missing(char32_t cp) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "missing glyph U+%04X drawn as a placeholder box", static_cast<unsigned>(cp));
    warn(buf);
  }

  LayoutBox token(const MathNode& n, const Style& st) {
    const double s = scale(st);
    const std::string text = mml::decode_references(n.text);
    std::string_view variant = st.variant;
    if (const std::string* v = n.attr("mathvariant")) variant = *v;
    bool default_italic = false;
    if (variant.empty()) {
      default_italic = n.element == "mi" && utf8::single(text).has_value();
      variant = default_italic ? "italic" : "normal";
    }

    std::vector<LayoutBox> pieces;
    std::vector<std::pair<char32_t, const GlyphMetrics*>> run;
    std::size_t i = 0;
    while (i < text.size()) {
      const char32_t cp = utf8::decode(text, i);
      char32_t drawn = cp;
      if (!(default_italic && cp >= 0x0391 && cp <= 0x03A9)) drawn = variant_codepoint(cp, variant);
      const GlyphMetrics* g = metrics_.find(drawn);
      if (!g && drawn != cp) {
        drawn = cp;
        g = metrics_.find(cp);
      }
      if (g) {
        run.emplace_back(drawn, g);
        continue;
      }
      missing(cp);
      if (!run.empty()) pieces.push_back(glyph_run(run, s));
      run.clear();
      pieces.push_back(tofu(s));
    }
    if (pieces.empty()) {
      if (run.empty()) {
        LayoutBox empty;
        empty.kind = BoxKind::Glyph;
        empty.scale = s;
        return empty;
      }
      return glyph_run(run, s);
    }
    if (!run.empty()) pieces.push_back(glyph_run(run, s));
    if (pieces.size() == 1) return std::move(pieces.front());
    return hbox(std::move(pieces));
  }

  static LayoutBox hbox(std::vector<LayoutBox> children) {
    LayoutBox b;
    b.kind = BoxKind::HBox;
    double x = 0;
    for (LayoutBox& c : children) {
      c.x = x;
      x += c.width;
    }
    b.width = x;
    b.children = std::move(children);
    fit_extent(b);
    return b;
  }

  // One child shifted vertically by y.
  static LayoutBox shifted(LayoutBox child, double y) {
    child.y = 0;
    LayoutBox b = hbox({});
    b.children.push_back(std::move(child));
    b.children.back().y = y;
    b.width = b.children.back().width;
    fit_extent(b);
    return b;
  }

  struct Target {
    double height = 0;
    double depth = 0;
  };

  // mo: large operators are enlarged in display style and centered on the
  // axis; delimiters with stretchy or min/max sizes are sized around the
  // target extent of their row.
  LayoutBox operator_box(const MathNode& n, const Style& st, const Target* target) {
    LayoutBox b = token(n, st);
    if (b.kind != BoxKind::Glyph || b.tofu) return b;
    const double s = scale(st);
    const std::string text = mml::decode_references(n.text);
    const std::optional<char32_t> single = utf8::single(text);
    if (single && symbols_.operator_class(text) == mml::OperatorClass::Large) {
      if (st.display) {
        const double f = c_.display_operator_scale;
        b.width *= f;
        b.height *= f;
        b.depth *= f;
        b.italic *= f;
        b.stretch_x = b.stretch_y = f;
      }
      const double y = (b.height - b.depth) / 2 - c_.axis_height * s;
      return shifted(std::move(b), y);
    }

    const bool stretchy = attr_is(n, "stretchy", "true");
    const std::optional<double> min_size = em_value(n.attr("minsize"));
    const std::optional<double> max_size = em_value(n.attr("maxsize"));
    if (!stretchy && !min_size && !max_size) return b;
    const double natural = b.height + b.depth;
    if (natural <= 0) return b;
    const double axis = c_.axis_height * s;
    double total = natural;
    if (stretchy && target) total = std::max(natural, 2 * std::max(target->height - axis, target->depth + axis));
    if (min_size) total = std::max(total, *min_size * s);
    if (max_size) total = std::min(total, *max_size * s);
    if (total <= natural) return b;

    const double f = total / natural;
    if (single && f > c_.delimiter_max_scale) {
      for (const Assembly& a : kAssemblies) {
        if (a.delimiter == *single) {
          if (auto built = assemble(a, total, s)) return std::move(*built);
          break;
        }
      }
    }
    b.height *= f;
    b.depth *= f;
    b.stretch_y = f;
    const double y = b.height - (axis + total / 2);
    return shifted(std::move(b), y);
  }

  // Top, bottom and optional middle pieces at natural size, extenders
  // stretched to fill the gaps; the whole centered on the axis.
  std::optional<LayoutBox> assemble(const Assembly& a, double total, double s) {
    for (char32_t cp : {a.top, a.extender, a.bottom}) {
      if (!metrics_.find(cp)) return std::nullopt;
    }
    if (a.middle && !metrics_.find(a.middle)) return std::nullopt;
    const double axis = c_.axis_height * s;
    const double top_edge = axis + total / 2;
    LayoutBox top = glyph(a.top, s);
    LayoutBox bottom = glyph(a.bottom, s);
    top.y = top.height - top_edge;
    bottom.y = (total / 2 - axis) - bottom.depth;
    std::vector<LayoutBox> parts;
    const double top_size = top.height + top.depth;
    const double bottom_size = bottom.height + bottom.depth;

    auto extender = [&](double gap, double upper_edge) {
      if (gap <= 0) return;
      LayoutBox e = glyph(a.extender, s);
      const double natural = e.height + e.depth;
      if (natural <= 0) return;
      const double f = gap / natural;
      e.height *= f;
      e.depth *= f;
      e.stretch_y = f;
      e.y = e.height - upper_edge;
      parts.push_back(std::move(e));
    };

    parts.push_back(std::move(top));
    const double gap = total - top_size - bottom_size;
    if (a.middle) {
      LayoutBox mid = glyph(a.middle, s);
      const double mid_size = mid.height + mid.depth;
      mid.y = mid.height - (axis + mid_size / 2);
      const double half = (gap - mid_size) / 2;
      extender(half, top_edge - top_size);
      parts.push_back(std::move(mid));
      extender(half, axis - mid_size / 2);
    } else {
      extender(gap, top_edge - top_size);
    }
    parts.push_back(std::move(bottom));

    LayoutBox b;
    b.kind = BoxKind::VBox;
    for (const LayoutBox& p : parts) b.width = std::max(b.width, p.width);
    b.children = std::move(parts);
    fit_extent(b);
    return b;
  }

  LayoutBox space(const MathNode& n, const Style& st) {
    LayoutBox b;
    b.kind = BoxKind::Space;
    b.width = em_value(n.attr("width")).value_or(0) * scale(st);
    return b;
  }

  LayoutBox row(const std::vector<MathNode>& kids, const Style& st) {
    const double s = scale(st);
    if (kids.empty()) {
      LayoutBox b;
      b.kind = BoxKind::HBox;
      b.height = c_.empty_strut_height * s;
      return b;
    }
    std::vector<std::optional<LayoutBox>> boxes(kids.size());
    Target target;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (kids[i].element == "mo" && attr_is(kids[i], "stretchy", "true")) continue;
      boxes[i] = node(kids[i], st);
      target.height = std::max(target.height, boxes[i]->height);
      target.depth = std::max(target.depth, boxes[i]->depth);
    }
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (!boxes[i]) boxes[i] = operator_box(kids[i], st, &target);
    }

    std::vector<Atom> atoms(kids.size());
    for (std::size_t i = 0; i < kids.size(); ++i) atoms[i] = atom_class(kids[i]);
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const Atom a = atoms[i];
      if (a == Atom::None) continue;
      if (a == Atom::Bin) {
        const Atom p = prev ? atoms[*prev] : Atom::None;
        if (!prev || p == Atom::Bin || p == Atom::Op || p == Atom::Rel || p == Atom::Open || p == Atom::Punct ||
            p == Atom::Apply) {
          atoms[i] = Atom::Ord;
        }
      } else if ((a == Atom::Rel || a == Atom::Close || a == Atom::Punct) && prev && atoms[*prev] == Atom::Bin) {
        atoms[*prev] = Atom::Ord;
      }
      prev = i;
    }
    if (prev && atoms[*prev] == Atom::Bin) atoms[*prev] = Atom::Ord;

    std::vector<LayoutBox> children;
    children.reserve(kids.size() * 2);
    prev.reset();
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (atoms[i] != Atom::None) {
        if (prev) {
          const double w = spacing(atoms[*prev], atoms[i], st.level) * s;
          if (w != 0) {
            LayoutBox sp;
            sp.kind = BoxKind::Space;
            sp.width = w;
            children.push_back(std::move(sp));
          }
        }
        prev = i;
      }
      children.push_back(std::move(*boxes[i]));
    }
    return hbox(std::move(children));
  }

  LayoutBox fraction(const MathNode& n, const Style& st) {
    const double s = scale(st);
    const Style inner{st.display ? st.level : st.level + 1, false, st.variant};
    LayoutBox num = node(n.children[0], inner);
    LayoutBox den = node(n.children[1], inner);
    const bool ruled = !attr_is(n, "linethickness", "0");
    const double t = ruled ? c_.rule_thickness * s : 0;
    const double axis = c_.axis_height * s;
    double u = (st.display ? c_.num_shift_display : c_.num_shift_text) * s;
    double v = (st.display ? c_.denom_shift_display : c_.denom_shift_text) * s;
    if (ruled) {
      const double gap = (st.display ? c_.frac_gap_display : c_.frac_gap_text) * s;
      const double above = (u - num.depth) - (axis + t / 2);
      if (above < gap) u += gap - above;
      const double below = (axis - t / 2) - (den.height - v);
      if (below < gap) v += gap - below;
    } else {
      const double gap = (st.display ? c_.stack_gap_display : c_.stack_gap_text) * s;
      const double clear = (u - num.depth) - (den.height - v);
      if (clear < gap) {
        u += (gap - clear) / 2;
        v += (gap - clear) / 2;
      }
    }
    const double pad = c_.frac_side_padding * s;
    const double inner_width = std::max(num.width, den.width);
    num.x = pad + (inner_width - num.width) / 2;
    num.y = -u;
    den.x = pad + (inner_width - den.width) / 2;
    den.y = v;

    LayoutBox b;
    b.kind = BoxKind::VBox;
    b.width = inner_width + 2 * pad;
    b.children.push_back(std::move(num));
    if (ruled) {
      LayoutBox rule;
      rule.kind = BoxKind::Rule;
      rule.width = inner_width;
      rule.height = t;
      rule.x = pad;
      rule.y = -(axis - t / 2);
      b.children.push_back(std::move(rule));
    }
    b.children.push_back(std::move(den));
    fit_extent(b);
    return b;
  }

  LayoutBox radical(LayoutBox body, const Style& st) {
    const double s = scale(st);
    double gap = (st.display ? c_.radical_gap_display : c_.radical_gap_text) * s;
    const double t = c_.rule_thickness * s;
    LayoutBox surd = glyph(U'√', s);
    const double natural = surd.height + surd.depth;
    const double needed = body.height + body.depth + gap + t;
    if (natural > 0 && needed > natural) {
      const double f = needed / natural;
      surd.height *= f;
      surd.depth *= f;
      surd.stretch_y = f;
    } else {
      gap += (natural - needed) / 2;  // center the radicand in a surd that is too tall
    }
    surd.y = surd.height - (body.height + gap + t);

    LayoutBox rule;
    rule.kind = BoxKind::Rule;
    rule.width = body.width;
    rule.height = t;
    rule.x = surd.width;
    rule.y = -(body.height + gap);
    body.x = surd.width;
    body.y = 0;

    LayoutBox b;
    b.kind = BoxKind::VBox;
    b.width = surd.width + body.width;
    b.children.push_back(std::move(surd));
    b.children.push_back(std::move(rule));
    b.children.push_back(std::move(body));
    fit_extent(b);
    return b;
  }

  LayoutBox root(const MathNode& n, const Style& st) {
    const double s = scale(st);
    LayoutBox rad = radical(node(n.children[0], st), st);
    LayoutBox index = node(n.children[1], Style{st.level + 2, false, st.variant});
    const double before = c_.radical_kern_before_degree * s;
    const double after = c_.radical_kern_after_degree * s;
    index.x = before;
    index.y = -(c_.radical_degree_raise * (rad.height - rad.depth));
    rad.x = std::max(0.0, before + index.width + after);
    LayoutBox b;
    b.kind = BoxKind::VBox;
    b.width = std::max(rad.x + rad.width, before + index.width);
    b.children.push_back(std::move(rad));
    b.children.push_back(std::move(index));
    fit_extent(b);
    return b;
  }

  LayoutBox scripts(const MathNode& base_node, const MathNode* sub_node, const MathNode* sup_node,
                    const Style& st) {
    const double s = scale(st);
    const Style script{st.level + 1, false, st.variant};
    const double s1 = scale(script);
    LayoutBox base = node(base_node, st);
    const bool simple = base.kind == BoxKind::Glyph;
    const double ic = simple ? base.italic : 0;
    const double u0 = simple ? 0 : base.height - c_.sup_drop * s1;
    const double v0 = simple ? 0 : base.depth + c_.sub_drop * s1;

    std::optional<LayoutBox> sub;
    std::optional<LayoutBox> sup;
    if (sub_node) sub = node(*sub_node, script);
    if (sup_node) sup = node(*sup_node, script);
    double u = 0;
    double v = 0;
    if (sup) u = std::max({u0, c_.sup_shift * s, sup->depth + 0.25 * c_.x_height * s});
    if (sub && !sup) v = std::max({v0, c_.sub_shift * s, sub->height - 0.8 * c_.x_height * s});
    if (sub && sup) {
      v = std::max(v0, c_.sub_shift_with_sup * s);
      const double gap = (u - sup->depth) - (sub->height - v);
      const double min_gap = c_.sub_sup_gap * s;
      if (gap < min_gap) v += min_gap - gap;
    }

    LayoutBox b;
    b.kind = BoxKind::VBox;
    double extra = 0;
    const double base_width = base.width;
    b.children.push_back(std::move(base));
    if (sub) {
      sub->x = base_width;
      sub->y = v;
      extra = std::max(extra, sub->width);
      b.children.push_back(std::move(*sub));
    }
    if (sup) {
      sup->x = base_width + ic;
      sup->y = -u;
      extra = std::max(extra, sup->width + ic);
      b.children.push_back(std::move(*sup));
    }
    b.width = base_width + extra + c_.script_space * s;
    fit_extent(b);
    return b;
  }

  static bool movable_limits(const MathNode& base) {
    const MathNode* cur = &base;
    while (cur->element == "mstyle" && cur->children.size() == 1) cur = &cur->children.front();
    return cur->element == "mo" && attr_is(*cur, "movablelimits", "true");
  }

  // Widens a stretchy accent glyph to the width of what it covers.
  static void stretch_across(LayoutBox& b, const MathNode& n, double width) {
    if (n.element != "mo" || !attr_is(n, "stretchy", "true")) return;
    if (b.kind != BoxKind::Glyph || b.tofu || b.width <= 0 || width <= b.width) return;
    b.stretch_x = width / b.width;
    b.width = width;
  }

  LayoutBox under_over(const MathNode& n, const Style& st) {
    const MathNode& base_node = n.children[0];
    const MathNode* under_node = n.element == "mover" ? nullptr : &n.children[1];
    const MathNode* over_node = n.element == "munder" ? nullptr : &n.children.back();
    if (movable_limits(base_node) && !st.display) return scripts(base_node, under_node, over_node, st);

    const double s = scale(st);
    const Style script{st.level + 1, false, st.variant};
    const bool accent = attr_is(n, "accent", "true");
    const bool accent_under = attr_is(n, "accentunder", "true");
    LayoutBox base = node(base_node, st);
    std::optional<LayoutBox> under;
    std::optional<LayoutBox> over;
    if (under_node) {
      under = node(*under_node, accent_under ? st : script);
      stretch_across(*under, *under_node, base.width);
    }
    if (over_node) {
      over = node(*over_node, accent ? st : script);
      stretch_across(*over, *over_node, base.width);
    }

    double width = base.width;
    if (under) width = std::max(width, under->width);
    if (over) width = std::max(width, over->width);
    base.x = (width - base.width) / 2;
    LayoutBox b;
    b.kind = BoxKind::VBox;
    b.width = width;
    const double base_height = base.height;
    const double base_depth = base.depth;
    b.children.push_back(std::move(base));
    if (under) {
      under->x = (width - under->width) / 2;
      if (accent_under) {
        under->y = base_depth + c_.accent_gap * s + under->height;
      } else {
        const double k = std::max(c_.lower_limit_gap * s, c_.lower_limit_drop * s - under->height);
        under->y = base_depth + k + under->height;
      }
      b.children.push_back(std::move(*under));
    }
    if (over) {
      over->x = (width - over->width) / 2;
      if (accent) {
        over->y = -(std::max(0.0, base_height - c_.x_height * s) + c_.accent_gap * s);
      } else {
        const double k = std::max(c_.upper_limit_gap * s, c_.upper_limit_rise * s - over->depth);
        over->y = -(base_height + k + over->depth);
      }
      b.children.push_back(std::move(*over));
    }
    fit_extent(b);
    return b;
  }

  static std::vector<std::string_view> words(const std::string* v) {
    std::vector<std::string_view> out;
    if (!v) return out;
    std::string_view s = *v;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && s[i] == ' ') ++i;
      const std::size_t start = i;
      while (i < s.size() && s[i] != ' ') ++i;
      if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
  }

  static std::string_view nth(const std::vector<std::string_view>& list, std::size_t j, std::string_view fallback) {
    if (list.empty()) return fallback;
    return j < list.size() ? list[j] : list.back();
  }

  LayoutBox table(const MathNode& n, const Style& st) {
    const double s = scale(st);
    const Style cell_style{st.level, attr_is(n, "displaystyle", "true"), st.variant};
    std::vector<std::vector<LayoutBox>> cells;
    std::size_t columns = 0;
    for (const MathNode& r : n.children) {
      std::vector<LayoutBox> row_cells;
      if (r.element != "mtr") {
        row_cells.push_back(node(r, cell_style));
      } else {
        for (const MathNode& cell : r.children) {
          row_cells.push_back(cell.element == "mtd" ? row(cell.children, cell_style) : node(cell, cell_style));
        }
      }
      columns = std::max(columns, row_cells.size());
      cells.push_back(std::move(row_cells));
    }

    std::vector<double> col_width(columns, 0.0);
    std::vector<double> heights(cells.size());
    std::vector<double> depths(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      heights[i] = c_.table_strut_height * s;
      depths[i] = c_.table_strut_depth * s;
      for (std::size_t j = 0; j < cells[i].size(); ++j) {
        col_width[j] = std::max(col_width[j], cells[i][j].width);
        heights[i] = std::max(heights[i], cells[i][j].height);
        depths[i] = std::max(depths[i], cells[i][j].depth);
      }
    }
    const double col_gap = c_.table_column_gap * s;
    const double row_gap = c_.table_row_gap * s;
    const double axis = c_.axis_height * s;

    std::vector<double> col_x(columns, 0.0);
    double width = 0;
    for (std::size_t j = 0; j < columns; ++j) {
      if (j > 0) width += col_gap;
      col_x[j] = width;
      width += col_width[j];
    }
    double extent = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) extent += row_gap;
      extent += heights[i] + depths[i];
    }
    const double top = axis + extent / 2;

    const auto aligns = words(n.attr("columnalign"));
    const auto lines = words(n.attr("columnlines"));
    LayoutBox b;
    b.kind = BoxKind::VBox;
    b.width = width;
    double cursor = top;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double baseline = cursor - heights[i];
      for (std::size_t j = 0; j < cells[i].size(); ++j) {
        LayoutBox& cell = cells[i][j];
        const std::string_view align = nth(aligns, j, "center");
        double x = col_x[j];
        if (align == "right") {
          x += col_width[j] - cell.width;
        } else if (align != "left") {
          x += (col_width[j] - cell.width) / 2;
        }
        cell.x = x;
        cell.y = -baseline;
        b.children.push_back(std::move(cell));
      }
      cursor = baseline - depths[i] - row_gap;
    }
    const double t = c_.rule_thickness * s;
    for (std::size_t j = 0; j + 1 < columns; ++j) {
      if (nth(lines, j, "none") != "solid") continue;
      LayoutBox rule;
      rule.kind = BoxKind::Rule;
      rule.width = t;
      rule.height = extent;
      rule.x = col_x[j + 1] - col_gap / 2 - t / 2;
      rule.y = extent / 2 - axis;
      b.children.push_back(std::move(rule));
    }
    fit_extent(b);
    b.height = std::max(b.height, top);
    b.depth = std::max(b.depth, extent - top);
    return b;
  }

  const GlyphMetricsTable& metrics_;
  const LayoutConstants& c_;
  const mml::SymbolTable& symbols_;
  const MeasureOptions& options_;
  std::set<std::string> warned_;
};

struct Alphabet {
  std::string_view variant;
  char32_t upper, lower, digits;  // 0 when the variant has no such range
  char32_t greek_upper, greek_lower;
};

constexpr Alphabet kAlphabets[] = {
    {"bold", 0x1D400, 0x1D41A, 0x1D7CE, 0x1D6A8, 0x1D6C2},
    {"italic", 0x1D434, 0x1D44E, 0, 0x1D6E2, 0x1D6FC},
    {"bold-italic", 0x1D468, 0x1D482, 0, 0x1D71C, 0x1D736},
    {"script", 0x1D49C, 0x1D4B6, 0, 0, 0},
    {"fraktur", 0x1D504, 0x1D51E, 0, 0, 0},
    {"double-struck", 0x1D538, 0x1D552, 0x1D7D8, 0, 0},
    {"sans-serif", 0x1D5A0, 0x1D5BA, 0x1D7E2, 0, 0},
    {"monospace", 0x1D670, 0x1D68A, 0x1D7F6, 0, 0},
};

// Letters that live in the letterlike-symbols block instead of the
// mathematical alphanumeric block.
struct Hole {
  std::string_view variant;
  char32_t letter, cp;
};

constexpr Hole kHoles[] = {
    {"italic", U'h', 0x210E},        {"script", U'B', 0x212C},        {"script", U'E', 0x2130},
    {"script", U'F', 0x2131},        {"script", U'H', 0x210B},        {"script", U'I', 0x2110},
    {"script", U'L', 0x2112},        {"script", U'M', 0x2133},        {"script", U'R', 0x211B},
    {"script", U'e', 0x212F},        {"script", U'g', 0x210A},        {"script", U'o', 0x2134},
    {"fraktur", U'C', 0x212D},       {"fraktur", U'H', 0x210C},       {"fraktur", U'I', 0x2111},
    {"fraktur", U'R', 0x211C},       {"fraktur", U'Z', 0x2128},       {"double-struck", U'C', 0x2102},
    {"double-struck", U'H', 0x210D}, {"double-struck", U'N', 0x2115}, {"double-struck", U'P', 0x2119},
    {"double-struck", U'Q', 0x211A}, {"double-struck", U'R', 0x211D}, {"double-struck", U'Z', 0x2124},
};

}  // namespace

char32_t variant_codepoint(char32_t cp, std::string_view variant) {
  for (const Hole& h : kHoles) {
    if (h.variant == variant && h.letter == cp) return h.cp;
  }
  for (const Alphabet& a : kAlphabets) {
    if (a.variant != variant) continue;
    if (cp >= U'A' && cp <= U'Z') return a.upper + (cp - U'A');
    if (cp >= U'a' && cp <= U'z') return a.lower + (cp - U'a');
    if (a.digits && cp >= U'0' && cp <= U'9') return a.digits + (cp - U'0');
    if (a.greek_upper && cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return a.greek_upper + (cp - 0x0391);
    if (a.greek_lower && cp >= 0x03B1 && cp <= 0x03C9) return a.greek_lower + (cp - 0x03B1);
    return cp;
  }
  return cp;
}

LayoutBox LayoutEngine::measure(const mml::MathNode& node, const MeasureOptions& options) const {
  Measurer m(metrics_, constants_, symbols_, options);
  return m.node(node, Style{options.level, options.display, {}});
}

LayoutBox measure(const mml::MathNode& node, const GlyphMetricsTable& metrics, int level) {
  MeasureOptions options;
  options.level = level;
  return LayoutEngine(metrics).measure(node, options);
}

}  // namespace mathrender::layout
