#!/usr/bin/env python3
"""Regenerate data/metrics.tsv from the STIX / DejaVu fonts bundled with matplotlib.

Development helper only; the build reads the committed metrics.tsv.
Usage: python3 tools/gen_metrics.py > data/metrics.tsv
"""
import os
import sys

import matplotlib
from fontTools.ttLib import TTFont

HERE = os.path.dirname(os.path.abspath(__file__))
FONT_DIR = os.path.join(os.path.dirname(matplotlib.__file__), "mpl-data", "fonts", "ttf")
FONTS = ["STIXGeneral.ttf", "STIXGeneralItalic.ttf", "STIXGeneralBol.ttf",
         "STIXSizOneSymReg.ttf", "DejaVuSerif.ttf", "DejaVuSans.ttf"]
ITALIC_RANGES = [(0x1D434, 0x1D4CF), (0x1D6E2, 0x1D755)]


def wanted_codepoints():
    cps = set(range(0x20, 0x7F))
    cps |= set(range(0x391, 0x3AA)) | set(range(0x3B1, 0x3CA))
    cps |= {0x3D1, 0x3D5, 0x3D6, 0x3F0, 0x3F1, 0x3F5, 0x3DD, 0xA0}
    # mathematical alphanumerics (letters, greek, digits)
    cps |= set(range(0x1D400, 0x1D6A4)) | set(range(0x1D6A8, 0x1D7CC)) | set(range(0x1D7CE, 0x1D800))
    cps |= {0x210E, 0x212C, 0x2130, 0x2131, 0x210B, 0x2110, 0x2112, 0x2133, 0x211B, 0x212F, 0x210A,
            0x2134, 0x212D, 0x210C, 0x2111, 0x211C, 0x2128, 0x2102, 0x210D, 0x2115, 0x2119, 0x211A,
            0x211D, 0x2124}
    # delimiter assembly pieces
    cps |= set(range(0x239B, 0x23B0))
    for name in ("symbols.tsv", "whitelist.tsv"):
        with open(os.path.join(HERE, "..", "data", name), encoding="utf-8") as f:
            for line in f:
                if line.startswith("#") or not line.strip():
                    continue
                cols = line.rstrip("\n").split("\t")
                for col in cols[2:4] if name == "symbols.tsv" else cols[3:4]:
                    cps |= {ord(c) for c in col}
    return sorted(cps)


def main():
    fonts = []
    for name in FONTS:
        font = TTFont(os.path.join(FONT_DIR, name))
        fonts.append((name, font, font.getBestCmap(), font["head"].unitsPerEm))
    print("# Glyph metrics, milli-em.")
    print("# format-version: 1")
    print("# Generated by tools/gen_metrics.py from STIXGeneral (primary), STIXGeneralItalic,")
    print("# STIXGeneralBol, STIXSizOneSymReg and DejaVu Serif/Sans (fallbacks).")
    print("# SVG output names the same families, so browsers with STIX installed match exactly.")
    print("# Columns: codepoint(hex)<TAB>advance<TAB>height<TAB>depth<TAB>italic-correction")
    # invisible operators are zero-width
    zero = {0x2061, 0x2062, 0x2063}
    for cp in sorted(zero):
        print(f"{cp:04X}\t0\t0\t0\t0")
    missing = []
    for cp in wanted_codepoints():
        if cp in zero:
            continue
        for name, font, cmap, upem in fonts:
            if cp not in cmap:
                continue
            gname = cmap[cp]
            adv = font["hmtx"][gname][0]
            glyf = font["glyf"]
            g = glyf[gname]
            if g.numberOfContours == 0:
                h = d = 0
                ic = 0
            else:
                g.recalcBounds(glyf)
                h, d = g.yMax, -g.yMin
                italic = any(lo <= cp <= hi for lo, hi in ITALIC_RANGES) or "Italic" in name
                ic = max(0, g.xMax - adv) if italic else 0
            k = 1000.0 / upem
            print(f"{cp:04X}\t{round(adv * k)}\t{round(h * k)}\t{round(d * k)}\t{round(ic * k)}")
            break
        else:
            missing.append(cp)
    if missing:
        sys.stderr.write("no glyph for: " + " ".join(f"{c:04X}" for c in missing) + "\n")


if __name__ == "__main__":
    main()
