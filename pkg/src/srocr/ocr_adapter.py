"""OCR back ends: an external engine reached through a subprocess, and a
template-matching reader for pages rendered with the embedded font."""
from __future__ import annotations

import logging
import os
import shlex
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .degrade.font import FontSpec, glyph_bank, page_layout
from .degrade.image import Image, save_image

log = logging.getLogger(__name__)

DEFAULT_COMMAND = "tesseract {input} {output} --psm 6"
DEFAULT_THRESHOLD = 160
MOCK_VERSION = "srocr-mock 1.0"


class OcrError(RuntimeError):
    pass


class OcrNotInstalled(OcrError):
    pass


class OcrTimeout(OcrError):
    pass


class OcrEngineError(OcrError):
    def __init__(self, returncode: int, stderr: str):
        super().__init__(f"OCR engine exited with status {returncode}: {stderr.strip()}")
        self.returncode = returncode
        self.stderr = stderr


@dataclass(frozen=True)
class OcrEngineSpec:
    kind: str = "mock"
    command_template: str = DEFAULT_COMMAND
    timeout: float = 120.0
    binarize_threshold: int = DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.kind not in ("mock", "external"):
            raise ValueError(f"engine kind must be 'mock' or 'external', got {self.kind!r}")
        if self.kind == "external" and not self.command_template.strip():
            raise ValueError("external engine requires a command template")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if not 0 <= self.binarize_threshold <= 255:
            raise ValueError("binarize_threshold must be within 0..255")


@dataclass(frozen=True)
class EngineProbe:
    available: bool
    version: str


def binarize(img: Image, threshold: int = DEFAULT_THRESHOLD) -> Image:
    g = img.to_gray().pixels
    return img.with_pixels(np.where(g < threshold, 0, 255).astype(np.uint8))


def _argv(template: str) -> list[str]:
    argv = shlex.split(template)
    override = os.environ.get("SROCR_TESSERACT")
    if override and argv and Path(argv[0]).name == "tesseract":
        argv[0] = override
    return argv


def _resolve(binary: str) -> str | None:
    if os.sep in binary or (os.altsep and os.altsep in binary):
        return binary if os.access(binary, os.X_OK) else None
    return shutil.which(binary)


def engine_probe(spec: OcrEngineSpec) -> EngineProbe:
    if spec.kind == "mock":
        return EngineProbe(True, MOCK_VERSION)
    argv = _argv(spec.command_template)
    exe = _resolve(argv[0]) if argv else None
    if exe is None:
        return EngineProbe(False, "")
    try:
        proc = subprocess.run([exe, "--version"], capture_output=True, text=True, timeout=min(spec.timeout, 30))
    except (OSError, subprocess.TimeoutExpired):
        return EngineProbe(False, "")
    text = (proc.stdout or "") + (proc.stderr or "")
    first = next((ln.strip() for ln in text.splitlines() if ln.strip()), "")
    return EngineProbe(proc.returncode == 0 and bool(first), first)


def run_external_ocr(img: Image, spec: OcrEngineSpec) -> str:
    argv = _argv(spec.command_template)
    if not argv or _resolve(argv[0]) is None:
        raise OcrNotInstalled(f"OCR engine {argv[0] if argv else '?'!r} not found")
    with tempfile.TemporaryDirectory(prefix="srocr-ocr-") as tmp:
        src = Path(tmp) / "input.png"
        out_base = Path(tmp) / "output"
        save_image(binarize(img, spec.binarize_threshold), src)
        cmd = [a.replace("{input}", str(src)).replace("{output}", str(out_base)) for a in argv]
        cmd[0] = _resolve(cmd[0]) or cmd[0]
        try:
            proc = subprocess.run(cmd, capture_output=True, timeout=spec.timeout)
        except subprocess.TimeoutExpired:
            raise OcrTimeout(f"OCR engine timed out after {spec.timeout}s") from None
        except FileNotFoundError:
            raise OcrNotInstalled(f"OCR engine {cmd[0]!r} not found") from None
        stderr = proc.stderr.decode("utf-8", errors="replace")
        log.info("ocr exit=%d stderr=%r", proc.returncode, stderr)
        if proc.returncode != 0:
            raise OcrEngineError(proc.returncode, stderr)
        txt = out_base.with_name(out_base.name + ".txt")
        raw = txt.read_bytes() if txt.exists() else proc.stdout
    text = raw.decode("utf-8", errors="replace")
    return text.replace("\r\n", "\n").replace("\r", "\n")


def mock_ocr(img: Image, font: FontSpec = FontSpec(), threshold: int = DEFAULT_THRESHOLD) -> str:
    """Read a page rendered with the embedded font.

    The cell grid is anchored at the page margins for the image's dpi
    (inferred from the page width when absent). Row occupancy comes from the
    horizontal ink projection, the used width of each row from the vertical
    projection, and each cell is assigned the glyph at minimum Hamming
    distance.
    """
    ink = img.to_gray().pixels < threshold
    dpi = img.dpi or int(round(img.width / 8.5))
    layout = page_layout(dpi, font)
    cw, ch, m = layout.cell_w, layout.cell_h, layout.margin
    chars, bank = glyph_bank(cw, ch, font.bold)
    bank_flat = bank.reshape(len(chars), -1).astype(np.float32)
    bank_ink = bank_flat.sum(axis=1)

    n_rows = min(layout.rows, max(0, (ink.shape[0] - m) // ch))
    n_cols = min(layout.columns, max(0, (ink.shape[1] - m) // cw))
    if n_rows == 0 or n_cols == 0:
        return ""
    grid = ink[m : m + n_rows * ch, m : m + n_cols * cw]
    row_profile = grid.reshape(n_rows, ch, -1).sum(axis=(1, 2))
    min_ink = max(1, (cw * ch) // 100)

    lines: list[str] = []
    for r in np.flatnonzero(row_profile >= min_ink):
        band = grid[r * ch : (r + 1) * ch]
        col_profile = band.reshape(ch, n_cols, cw).sum(axis=(0, 2))
        used = np.flatnonzero(col_profile >= min_ink)
        if used.size == 0:
            continue
        k = used[-1] + 1
        cells = band[:, : k * cw].reshape(ch, k, cw).transpose(1, 0, 2).reshape(k, -1).astype(np.float32)
        # hamming(c, g) = |c| + |g| - 2 c.g
        dist = cells.sum(axis=1, keepdims=True) + bank_ink[None, :] - 2.0 * (cells @ bank_flat.T)
        best = np.argmin(dist, axis=1)
        lines.append(("".join(chars[i] for i in best)).rstrip())
    return "\n".join(lines)


def run_ocr(img: Image, spec: OcrEngineSpec, font: FontSpec = FontSpec()) -> str:
    if spec.kind == "mock":
        return mock_ocr(img, font, spec.binarize_threshold)
    return run_external_ocr(img, spec)
