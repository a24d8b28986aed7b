"""Regenerate the embedded bitmap font module from DejaVu Sans Mono.

The output is committed; this script only needs to run when the glyph set
or cell geometry changes.

    python scripts/make_font_data.py /usr/share/fonts/truetype/dejavu/DejaVuSansMono.ttf
"""
import sys
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

CELL_W, CELL_H = 10, 20
POINT_SIZE = 16
OUT = Path(__file__).resolve().parents[1] / "src" / "srocr" / "degrade" / "font_data.py"


def rasterize(font, ch):
    canvas = Image.new("1", (CELL_W, CELL_H), 0)
    draw = ImageDraw.Draw(canvas)
    draw.fontmode = "1"
    draw.text((0, 0), ch, fill=1, font=font)
    return np.array(canvas, dtype=np.uint8)


def main(ttf):
    font = ImageFont.truetype(ttf, POINT_SIZE)
    glyphs = {}
    for code in range(32, 127):
        glyphs[chr(code)] = rasterize(font, chr(code))
    seen = {}
    for ch, bits in glyphs.items():
        key = bits.tobytes()
        if key in seen:
            raise SystemExit(f"glyphs {seen[key]!r} and {ch!r} rasterize identically")
        seen[key] = ch
    lines = [
        '"""Embedded monospaced bitmap font (generated by scripts/make_font_data.py)."""',
        "",
        f"CELL_WIDTH = {CELL_W}",
        f"CELL_HEIGHT = {CELL_H}",
        "",
        "# one hex string per row, bit 0 of the row value is the leftmost pixel",
        "GLYPHS = {",
    ]
    for ch, bits in glyphs.items():
        rows = []
        for r in bits:
            v = sum(int(b) << i for i, b in enumerate(r))
            rows.append(f"{v:03x}")
        lines.append(f"    {ch!r}: \"{' '.join(rows)}\",")
    lines.append("}")
    OUT.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(glyphs)} glyphs to {OUT}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "/usr/share/fonts/truetype/dejavu/DejaVuSansMono.ttf")
