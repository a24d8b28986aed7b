from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True, eq=False)
class Image:
    """8-bit raster, (h, w) for grayscale or (h, w, 3) for RGB."""

    pixels: np.ndarray
    dpi: int | None = None

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.dtype != np.uint8:
            raise TypeError(f"Image pixels must be uint8, got {px.dtype}")
        if px.ndim not in (2, 3) or (px.ndim == 3 and px.shape[2] != 3):
            raise ValueError(f"Image pixels must be (h, w) or (h, w, 3), got {px.shape}")
        px = np.ascontiguousarray(px)
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else 3

    @property
    def data(self) -> bytes:
        return self.pixels.tobytes()

    def with_pixels(self, pixels: np.ndarray) -> "Image":
        return Image(pixels, self.dpi)

    def to_gray(self) -> "Image":
        if self.channels == 1:
            return self
        return Image(quantize(luma(self.pixels)), self.dpi)

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return self.dpi == other.dpi and np.array_equal(self.pixels, other.pixels) and (
            self.pixels.shape == other.pixels.shape
        )

    def __repr__(self):
        return f"Image({self.width}x{self.height}x{self.channels}, dpi={self.dpi})"


def luma(px: np.ndarray) -> np.ndarray:
    """Float grayscale using the 0.299/0.587/0.114 weights."""
    px = np.asarray(px, dtype=np.float64)
    if px.ndim == 2:
        return px
    return px[..., 0] * 0.299 + px[..., 1] * 0.587 + px[..., 2] * 0.114


def quantize(values: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero."""
    v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 255.0)
    return np.floor(v + 0.5).astype(np.uint8)


def load_image(path) -> Image:
    path = Path(path)
    if path.suffix.lower() in (".pgm", ".pnm"):
        return read_pgm(path)
    from PIL import Image as PILImage

    with PILImage.open(path) as im:
        dpi = im.info.get("dpi")
        if im.mode not in ("L", "RGB"):
            im = im.convert("RGB" if "A" in im.mode or im.mode in ("P", "CMYK") else "L")
        px = np.array(im, dtype=np.uint8)
    return Image(px, int(round(dpi[0])) if dpi else None)


def save_image(img: Image, path) -> None:
    path = Path(path)
    if path.suffix.lower() in (".pgm", ".pnm"):
        write_pgm(img, path)
        return
    from PIL import Image as PILImage

    im = PILImage.fromarray(img.pixels, mode="L" if img.channels == 1 else "RGB")
    kwargs = {"dpi": (img.dpi, img.dpi)} if img.dpi else {}
    im.save(path, **kwargs)


def write_pgm(img: Image, path) -> None:
    """ASCII P2; RGB input is converted to gray first."""
    g = img.to_gray()
    lines = ["P2", f"# dpi {g.dpi}" if g.dpi else "# srocr", f"{g.width} {g.height}", "255"]
    for row in g.pixels:
        lines.append(" ".join(str(int(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_pgm(path) -> Image:
    dpi = None
    tokens = []
    for line in Path(path).read_text(encoding="ascii").splitlines():
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "dpi" and parts[1].isdigit():
                dpi = int(parts[1])
            continue
        tokens.extend(line.split())
    if not tokens or tokens[0] != "P2":
        raise ValueError(f"{path}: not an ASCII PGM (P2) file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    values = np.array(tokens[4 : 4 + w * h], dtype=np.int64)
    if values.size != w * h:
        raise ValueError(f"{path}: expected {w * h} samples, found {values.size}")
    if maxval != 255:
        values = values * 255 // maxval
    return Image(values.reshape(h, w).astype(np.uint8), dpi)
