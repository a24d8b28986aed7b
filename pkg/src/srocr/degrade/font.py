"""Page rendering with the embedded monospaced bitmap font."""
from __future__ import annotations

import logging
import math
import unicodedata
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import font_data
from .image import Image

log = logging.getLogger(__name__)

PAGE_WIDTH_IN = 8.5
PAGE_HEIGHT_IN = 11.0
MARGIN_IN = 1.0
TAB_WIDTH = 4


@dataclass(frozen=True)
class FontSpec:
    """Integer ``size`` multiplies the 10x20 px (at 72 dpi) base cell."""

    size: int = 1
    bold: bool = False

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("font size multiplier must be >= 1")

    def cell(self, dpi: int) -> tuple[int, int]:
        f = self.size * dpi / 72.0
        return _round_half_up(font_data.CELL_WIDTH * f), _round_half_up(font_data.CELL_HEIGHT * f)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class PageLayout:
    width: int
    height: int
    margin: int
    cell_w: int
    cell_h: int

    @property
    def columns(self) -> int:
        return (self.width - 2 * self.margin) // self.cell_w

    @property
    def rows(self) -> int:
        return (self.height - 2 * self.margin) // self.cell_h


def page_layout(dpi: int, font: FontSpec = FontSpec()) -> PageLayout:
    cw, ch = font.cell(dpi)
    return PageLayout(
        _round_half_up(PAGE_WIDTH_IN * dpi),
        _round_half_up(PAGE_HEIGHT_IN * dpi),
        _round_half_up(MARGIN_IN * dpi),
        cw,
        ch,
    )


def base_glyph(ch: str, bold: bool = False) -> np.ndarray:
    """(20, 10) bool bitmap at the base resolution; unknown chars get a box."""
    rows = font_data.GLYPHS.get(ch)
    if rows is None:
        g = np.zeros((font_data.CELL_HEIGHT, font_data.CELL_WIDTH), dtype=bool)
        g[3:16, 1:9] = True
        g[4:15, 2:8] = False
    else:
        vals = [int(r, 16) for r in rows.split()]
        g = np.array([[(v >> i) & 1 for i in range(font_data.CELL_WIDTH)] for v in vals], dtype=bool)
    if bold:
        g = g.copy()
        g[:, 1:] |= g[:, :-1]
    return g


@lru_cache(maxsize=4096)
def scaled_glyph(ch: str, cell_w: int, cell_h: int, bold: bool = False) -> np.ndarray:
    """Nearest-neighbour scaling of the base bitmap to a (cell_h, cell_w) cell."""
    g = base_glyph(ch, bold)
    ys = (np.arange(cell_h) * g.shape[0]) // cell_h
    xs = (np.arange(cell_w) * g.shape[1]) // cell_w
    out = g[ys][:, xs]
    out.flags.writeable = False
    return out


def glyph_bank(cell_w: int, cell_h: int, bold: bool = False) -> tuple[str, np.ndarray]:
    chars = "".join(font_data.GLYPHS)
    return chars, np.stack([scaled_glyph(c, cell_w, cell_h, bold) for c in chars])


def layout_lines(text: str, columns: int) -> list[str]:
    """Split on newlines, expand tabs and hard-wrap at ``columns``."""
    lines = []
    for raw in text.replace("\r\n", "\n").replace("\r", "\n").split("\n"):
        raw = raw.expandtabs(TAB_WIDTH).rstrip()
        if not raw:
            lines.append("")
            continue
        for i in range(0, len(raw), columns):
            lines.append(raw[i : i + columns])
    while lines and not lines[-1]:
        lines.pop()
    return lines


def render_text_page(
    text: str,
    dpi: int = 200,
    font: FontSpec = FontSpec(),
    warnings: list[str] | None = None,
) -> Image:
    """Black-on-white US Letter page with one-inch margins."""
    if not 72 <= dpi <= 600:
        raise ValueError(f"dpi must be within [72, 600], got {dpi}")
    text = unicodedata.normalize("NFC", text)
    if not text.strip():
        raise ValueError("text is empty after normalization")
    warnings = [] if warnings is None else warnings
    layout = page_layout(dpi, font)
    lines = layout_lines(text, layout.columns)
    if len(lines) > layout.rows:
        warnings.append(f"text has {len(lines)} lines, page holds {layout.rows}; truncated")
        lines = lines[: layout.rows]
    page = np.full((layout.height, layout.width), 255, dtype=np.uint8)
    cw, chh = layout.cell_w, layout.cell_h
    for r, line in enumerate(lines):
        y = layout.margin + r * chh
        for c, char in enumerate(line):
            if char == " ":
                continue
            if char not in font_data.GLYPHS:
                warnings.append(f"unsupported character {char!r} (U+{ord(char):04X}) rendered as a box")
            x = layout.margin + c * cw
            cell = page[y : y + chh, x : x + cw]
            cell[scaled_glyph(char, cw, chh, font.bold)] = 0
    for w in warnings:
        log.warning(w)
    return Image(page, dpi)
