#include "mathrender/layout/box.hpp"

#include <algorithm>

namespace mathrender::layout {

std::string_view to_string(BoxKind kind) {
  switch (kind) {
    case BoxKind::Glyph: return "glyph";
    case BoxKind::HBox: return "hbox";
    case BoxKind::VBox: return "vbox";
    case BoxKind::Rule: return "rule";
    case BoxKind::Space: return "space";
  }
  return "?";
}

std::vector<PlacedBox> flatten(const LayoutBox& root) {
  std::vector<PlacedBox> out;
  std::vector<PlacedBox> stack{{&root, root.x, root.y}};
  while (!stack.empty()) {
    const PlacedBox p = stack.back();
    stack.pop_back();
    out.push_back(p);
    const auto& kids = p.box->children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back({&*it, p.x + it->x, p.y + it->y});
  }
  return out;
}

void fit_extent(LayoutBox& box) {
  double h = 0;
  double d = 0;
  for (const LayoutBox& c : box.children) {
    h = std::max(h, c.height - c.y);
    d = std::max(d, c.depth + c.y);
  }
  box.height = h;
  box.depth = d;
}

void dispose(LayoutBox&& box) {
  std::vector<LayoutBox> pending;
  pending.push_back(std::move(box));
  while (!pending.empty()) {
    LayoutBox b = std::move(pending.back());
    pending.pop_back();
    for (LayoutBox& c : b.children) pending.push_back(std::move(c));
    b.children.clear();
  }
}

}  // namespace mathrender::layout
