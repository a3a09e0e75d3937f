#pragma once

#include <string>
#include <vector>

namespace mathrender::layout {

enum class BoxKind { Glyph, HBox, VBox, Rule, Space };

std::string_view to_string(BoxKind kind);

// A measured box.  Lengths are em; (x, y) is the offset of this box's
// baseline origin from its parent's, with y growing downward.
//
// hbox: children laid left to right, width = sum of child widths (spacing is
// carried by space children); vbox: children at explicit offsets.  For both,
// height = max(0, max child (height - y)) and depth = max(0, max child
// (depth + y)); vboxes may extend that to cover a declared extent (tables).
struct LayoutBox {
  BoxKind kind = BoxKind::HBox;
  double width = 0;
  double height = 0;
  double depth = 0;
  double x = 0;
  double y = 0;
  std::vector<LayoutBox> children;

  // Glyph boxes only.
  std::string text;        // UTF-8, as drawn
  double scale = 1.0;      // script scale of the level the glyph sits at
  double stretch_x = 1.0;  // geometric stretch for large operators and
  double stretch_y = 1.0;  // stretchy delimiters
  double italic = 0;       // italic correction, em
  bool tofu = false;       // no metrics: drawn as an outlined placeholder
};

// A box with its absolute origin.
struct PlacedBox {
  const LayoutBox* box = nullptr;
  double x = 0;
  double y = 0;
};

// Pre-order walk with absolute origins; iterative, so deep trees are safe.
std::vector<PlacedBox> flatten(const LayoutBox& root);

// Sets height and depth from the children per the rule above.
void fit_extent(LayoutBox& box);

// Destroys a deep tree without recursing.
void dispose(LayoutBox&& box);

}  // namespace mathrender::layout
