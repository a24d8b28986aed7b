"""Experiment matrix runner: render, degrade, restore, OCR and score every cell."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

from .degrade import DegradeSpec, FontSpec, Image, degrade_pipeline, load_image, render_text_page, resize, save_image
from .metrics import psnr, ssim, text_score
from .ocr_adapter import OcrEngineSpec, engine_probe, run_ocr
from .sr_models import build_model, get_preset, init_weights, load_weights, super_resolve

log = logging.getLogger(__name__)

DEFAULT_DPIS = (200, 220, 230, 240, 250, 260)
DEFAULT_SCALES = (0.1, 0.2, 0.3, 0.35, 0.4, 0.45, 0.5)
STATUSES = ("OK", "SKIPPED", "ERROR")
CSV_COLUMNS = ("text_id", "dpi", "scale", "model", "fuzz", "levenshtein", "psnr_db", "ssim", "status")
CORPUS_TOKEN = "@corpus"


class ConfigError(ValueError):
    """Invalid benchmark configuration; the message starts with the field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# -- configuration -----------------------------------------------------------

@dataclass(frozen=True)
class TextSource:
    id: str
    text: str


@dataclass(frozen=True)
class ModelSpec:
    preset: str = "bicubic"
    weights: str = "bicubic"  # "bicubic", "untrained:<seed>" or a weight file path
    factor: int | None = None  # None maps each scale to round(1/scale) within {2, 3, 4}
    channels: int | None = None
    id: str = ""

    @property
    def label(self) -> str:
        if self.id:
            return self.id
        if self.preset == "bicubic":
            return "bicubic"
        if self.weights.startswith("untrained:"):
            return f"{self.preset}:{self.weights}"
        return f"{self.preset}:{Path(self.weights).stem}"


@dataclass(frozen=True)
class DegradeDefaults:
    blur_sigma: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class BenchConfig:
    texts: tuple[TextSource, ...]
    dpis: tuple[int, ...] = DEFAULT_DPIS
    scales: tuple[float, ...] = DEFAULT_SCALES
    models: tuple[ModelSpec, ...] = (ModelSpec(),)
    engine: OcrEngineSpec = OcrEngineSpec()
    degrade: DegradeDefaults = DegradeDefaults()
    font: FontSpec = FontSpec()
    output_dir: str = "bench-out"
    cache: bool = True
    workers: int = 1

    def __post_init__(self):
        for name in ("texts", "dpis", "scales", "models"):
            if not getattr(self, name):
                raise ConfigError(name, "must be a non-empty list")
        for i, s in enumerate(self.scales):
            if not 0 < s <= 1:
                raise ConfigError(f"scales[{i}]", f"{s} is outside (0, 1]")
        for i, d in enumerate(self.dpis):
            if not 72 <= d <= 600:
                raise ConfigError(f"dpis[{i}]", f"{d} is outside [72, 600]")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")
        labels = [m.label for m in self.models]
        if len(set(labels)) != len(labels):
            raise ConfigError("models", f"model ids must be unique, got {labels}")
        ids = [t.id for t in self.texts]
        if len(set(ids)) != len(ids):
            raise ConfigError("texts", f"text ids must be unique, got {ids}")


def bundled_corpus() -> tuple[TextSource, ...]:
    root = resources.files("srocr") / "corpus"
    names = sorted(p.name for p in root.iterdir() if p.name.endswith(".txt"))
    return tuple(TextSource(n[: -len(".txt")], (root / n).read_text(encoding="utf-8")) for n in names)


def _expect(value, kinds, path):
    if isinstance(value, bool) and bool not in (kinds if isinstance(kinds, tuple) else (kinds,)):
        raise ConfigError(path, f"expected {_kind_name(kinds)}, got a boolean")
    if not isinstance(value, kinds):
        raise ConfigError(path, f"expected {_kind_name(kinds)}, got {type(value).__name__}")
    return value


def _kind_name(kinds) -> str:
    kinds = kinds if isinstance(kinds, tuple) else (kinds,)
    names = {int: "integer", float: "number", str: "string", list: "list", dict: "object", bool: "boolean"}
    return " or ".join(names.get(k, k.__name__) for k in kinds)


def _only(obj: dict, allowed: Iterable[str], path: str):
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise ConfigError(f"{path}.{extra[0]}" if path else extra[0], "unknown field")


def _parse_texts(raw, base: Path) -> tuple[TextSource, ...]:
    out: list[TextSource] = []
    for i, item in enumerate(_expect(raw, list, "texts")):
        path = f"texts[{i}]"
        if item == CORPUS_TOKEN:
            out.extend(bundled_corpus())
        elif isinstance(item, dict):
            _only(item, ("id", "text", "path"), path)
            if ("text" in item) == ("path" in item):
                raise ConfigError(path, "give exactly one of 'text' or 'path'")
            if "path" in item:
                src = _resolve_path(_expect(item["path"], str, f"{path}.path"), base)
                text = _read_text(src, f"{path}.path")
                default_id = src.stem
            else:
                text = _expect(item["text"], str, f"{path}.text")
                default_id = f"inline-{i}"
            out.append(TextSource(_expect(item.get("id", default_id), str, f"{path}.id"), text))
        else:
            s = _expect(item, str, path)
            src = _resolve_path(s, base)
            if src.is_file():
                out.append(TextSource(src.stem, _read_text(src, path)))
            else:
                out.append(TextSource(f"inline-{i}", s))
    for i, t in enumerate(out):
        if not t.text.strip():
            raise ConfigError(f"texts[{i}]", "text is empty")
    return tuple(out)


def _resolve_path(p: str, base: Path) -> Path:
    path = Path(p)
    return path if path.is_absolute() else base / path


def _read_text(path: Path, field_path: str) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(field_path, f"cannot read {path}: {exc.strerror}") from None


def _parse_models(raw, base: Path) -> tuple[ModelSpec, ...]:
    out = []
    for i, item in enumerate(_expect(raw, list, "models")):
        path = f"models[{i}]"
        if isinstance(item, str):
            item = {"preset": item}
        _expect(item, dict, path)
        _only(item, ("id", "preset", "weights", "factor", "channels"), path)
        preset = _expect(item.get("preset", "bicubic"), str, f"{path}.preset")
        try:
            p = get_preset(preset)
        except ValueError as exc:
            raise ConfigError(f"{path}.preset", str(exc)) from None
        if p.id == "srgan_disc":
            raise ConfigError(f"{path}.preset", "the discriminator cannot restore images")
        weights = _expect(item.get("weights", "bicubic" if p.id == "bicubic" else "untrained:0"), str, f"{path}.weights")
        if weights.startswith("untrained:"):
            try:
                int(weights.split(":", 1)[1])
            except ValueError:
                raise ConfigError(f"{path}.weights", f"bad seed in {weights!r}") from None
        elif weights != "bicubic":
            weights = str(_resolve_path(weights, base))
        factor = item.get("factor")
        if factor is not None and _expect(factor, int, f"{path}.factor") not in (2, 3, 4):
            raise ConfigError(f"{path}.factor", f"must be 2, 3 or 4, got {factor}")
        channels = item.get("channels")
        if channels is not None and _expect(channels, int, f"{path}.channels") not in (1, 3):
            raise ConfigError(f"{path}.channels", f"must be 1 or 3, got {channels}")
        out.append(ModelSpec(preset, weights, factor, channels, _expect(item.get("id", ""), str, f"{path}.id")))
    return tuple(out)


def _numbers(raw, path, kind):
    values = []
    for i, v in enumerate(_expect(raw, list, path)):
        kinds = (int,) if kind is int else (int, float)
        values.append(kind(_expect(v, kinds, f"{path}[{i}]")))
    return tuple(values)


def parse_config(data: dict, base: Path = Path(".")) -> BenchConfig:
    _expect(data, dict, "<root>")
    _only(data, ("texts", "dpis", "scales", "models", "engine", "degrade", "font", "output_dir", "cache", "workers"), "")
    if "texts" not in data:
        raise ConfigError("texts", "required")
    kwargs: dict[str, Any] = {"texts": _parse_texts(data["texts"], base)}
    if "dpis" in data:
        kwargs["dpis"] = _numbers(data["dpis"], "dpis", int)
    if "scales" in data:
        kwargs["scales"] = _numbers(data["scales"], "scales", float)
    if "models" in data:
        kwargs["models"] = _parse_models(data["models"], base)
    if "engine" in data:
        e = _expect(data["engine"], dict, "engine")
        _only(e, ("kind", "command", "timeout", "threshold"), "engine")
        try:
            kwargs["engine"] = OcrEngineSpec(
                kind=_expect(e.get("kind", "mock"), str, "engine.kind"),
                command_template=_expect(e.get("command", OcrEngineSpec.command_template), str, "engine.command"),
                timeout=float(_expect(e.get("timeout", 120), (int, float), "engine.timeout")),
                binarize_threshold=_expect(e.get("threshold", 160), int, "engine.threshold"),
            )
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("engine", str(exc)) from None
    if "degrade" in data:
        d = _expect(data["degrade"], dict, "degrade")
        _only(d, ("blur_sigma", "noise_sigma", "seed"), "degrade")
        blur = float(_expect(d.get("blur_sigma", 0.0), (int, float), "degrade.blur_sigma"))
        noise = float(_expect(d.get("noise_sigma", 0.0), (int, float), "degrade.noise_sigma"))
        for name, v in (("blur_sigma", blur), ("noise_sigma", noise)):
            if not (v >= 0 and math.isfinite(v)):
                raise ConfigError(f"degrade.{name}", "must be finite and >= 0")
        kwargs["degrade"] = DegradeDefaults(blur, noise, _expect(d.get("seed", 0), int, "degrade.seed"))
    if "font" in data:
        f = _expect(data["font"], dict, "font")
        _only(f, ("size", "bold"), "font")
        try:
            kwargs["font"] = FontSpec(_expect(f.get("size", 1), int, "font.size"), _expect(f.get("bold", False), bool, "font.bold"))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("font", str(exc)) from None
    if "output_dir" in data:
        kwargs["output_dir"] = _expect(data["output_dir"], str, "output_dir")
    if "cache" in data:
        kwargs["cache"] = _expect(data["cache"], bool, "cache")
    if "workers" in data:
        kwargs["workers"] = _expect(data["workers"], int, "workers")
    return BenchConfig(**kwargs)


def load_config(path) -> BenchConfig:
    """Read a JSON config; relative text and weight paths resolve against its directory."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(raw) if raw.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(data, path.parent)


# -- records -----------------------------------------------------------------

@dataclass
class ScoreRecord:
    text_id: str
    dpi: int
    scale: float
    model: str
    status: str = "OK"
    fuzz: int | None = None
    levenshtein: int | None = None
    psnr_db: float | None = None
    ssim: float | None = None
    message: str = ""
    wall_ms: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")
        if (self.fuzz is not None) != (self.status == "OK"):
            raise ValueError("fuzz is present exactly when status is OK")

    @property
    def key(self):
        return (self.text_id, self.dpi, self.scale, self.model)


def score_cell(restored: Image, reference: Image, ocr_text: str, truth: str) -> dict:
    """Fuzz and edit distance against the truth, PSNR and SSIM against the pristine page."""
    if restored.pixels.shape != reference.pixels.shape:
        raise ValueError(f"restored {restored.pixels.shape} and reference {reference.pixels.shape} differ in size")
    ts = text_score(truth, ocr_text)
    return {"fuzz": ts.fuzz, "levenshtein": ts.levenshtein, "psnr_db": psnr(restored, reference), "ssim": ssim(restored, reference)}


# -- caching -----------------------------------------------------------------

def cache_key(stage: str, inputs: Any) -> str:
    blob = json.dumps(inputs, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(f"{stage}\n{blob}".encode("utf-8")).hexdigest()


class _ImageCache:
    def __init__(self, root: Path, enabled: bool):
        self.root = root
        self.enabled = enabled

    def get_or_make(self, key: str, make) -> tuple[Image, bool]:
        path = self.root / key / "image.png"
        if self.enabled and path.is_file():
            return load_image(path), True
        img = make()
        if self.enabled:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(suffix=".png", dir=path.parent)
            os.close(fd)
            try:
                save_image(img, tmp)
                os.replace(tmp, path)
            finally:
                if os.path.exists(tmp):
                    os.unlink(tmp)
        return img, False


# -- matrix ------------------------------------------------------------------

def upsample_factor(scale: float) -> int:
    """round(1/scale), halves up, clamped to the supported factors."""
    return min(4, max(2, math.floor(1.0 / scale + 0.5)))


class _Models:
    """Graphs and weights shared across cells, built once per (model, factor)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._loaded: dict = {}

    def get(self, spec: ModelSpec, factor: int):
        key = (spec, factor)
        with self._lock:
            if key not in self._loaded:
                preset = get_preset(spec.preset)
                if spec.channels is not None:
                    preset = preset.replace(in_channels=spec.channels)
                graph = build_model(preset, factor)
                if spec.weights.startswith("untrained:"):
                    weights = init_weights(graph, int(spec.weights.split(":", 1)[1]))
                else:
                    weights = load_weights(graph, spec.weights)
                self._loaded[key] = (graph, weights)
            return self._loaded[key]


def _restore(low: Image, ref: Image, spec: ModelSpec, scale: float, models: _Models) -> Image:
    if spec.preset == "bicubic":
        out = resize(low, ref.width, ref.height, "bicubic")
    else:
        graph, weights = models.get(spec, spec.factor or upsample_factor(scale))
        out = super_resolve(graph, weights, low)
        if (out.width, out.height) != (ref.width, ref.height):
            out = resize(out, ref.width, ref.height, "bicubic")
    return Image(out.pixels, ref.dpi)


def _run_cell(cfg: BenchConfig, text: TextSource, dpi: int, scale: float, spec: ModelSpec,
              cache: _ImageCache, models: _Models, engine_ok: bool) -> ScoreRecord:
    rec = ScoreRecord(text.id, dpi, scale, spec.label, status="ERROR")
    stage = "render"
    try:
        t0 = time.perf_counter()
        font = {"size": cfg.font.size, "bold": cfg.font.bold}
        rkey = cache_key("render", {"text": text.text, "dpi": dpi, "font": font})
        ref, _ = cache.get_or_make(rkey, lambda: render_text_page(text.text, dpi, cfg.font))
        t1 = time.perf_counter()
        stage = "degrade"
        dspec = DegradeSpec(scale, cfg.degrade.blur_sigma, cfg.degrade.noise_sigma, cfg.degrade.seed)
        dkey = cache_key("degrade", {"render": rkey, **asdict(dspec)})
        low, _ = cache.get_or_make(dkey, lambda: degrade_pipeline(ref, dspec))
        t2 = time.perf_counter()
        stage = "sr"
        model_inputs = {"degrade": dkey, "model": asdict(spec), "reference": [ref.width, ref.height]}
        if not spec.weights.startswith(("untrained:", "bicubic")):
            model_inputs["weights_sha256"] = hashlib.sha256(Path(spec.weights).read_bytes()).hexdigest()
        skey = cache_key("sr", model_inputs)
        restored, _ = cache.get_or_make(skey, lambda: _restore(low, ref, spec, scale, models))
        restored = Image(restored.pixels, ref.dpi)
        t3 = time.perf_counter()
        rec.psnr_db, rec.ssim = psnr(restored, ref), ssim(restored, ref)
        rec.wall_ms = {"render": (t1 - t0) * 1e3, "degrade": (t2 - t1) * 1e3, "sr": (t3 - t2) * 1e3}
        if not engine_ok:
            rec.status, rec.message = "SKIPPED", "OCR engine unavailable"
            return rec
        stage = "ocr"
        hyp = run_ocr(restored, cfg.engine, cfg.font)
        t4 = time.perf_counter()
        scores = score_cell(restored, ref, hyp, text.text)
        rec.wall_ms["ocr"] = (t4 - t3) * 1e3
        rec.fuzz, rec.levenshtein = scores["fuzz"], scores["levenshtein"]
        rec.status = "OK"
    except Exception as exc:  # one bad cell must not abort the matrix
        log.warning("cell %s/%d/%s/%s failed in %s: %s", text.id, dpi, scale, spec.label, stage, exc)
        rec.status, rec.fuzz, rec.levenshtein = "ERROR", None, None
        rec.message = f"{stage}: {type(exc).__name__}: {exc}"
    return rec


def sort_records(records: Iterable[ScoreRecord], config: BenchConfig | None = None) -> list[ScoreRecord]:
    if config is None:
        return sorted(records, key=lambda r: (r.text_id, r.dpi, r.scale, r.model))
    order = {m.label: i for i, m in enumerate(config.models)}
    texts = {t.id: i for i, t in enumerate(config.texts)}
    return sorted(records, key=lambda r: (texts.get(r.text_id, 0), r.text_id, r.dpi, r.scale, order.get(r.model, 0), r.model))


def run_matrix(config: BenchConfig) -> list[ScoreRecord]:
    """Every (text, dpi, scale, model) cell, failures included, in a fixed order."""
    probe = engine_probe(config.engine)
    if not probe.available:
        log.warning("OCR engine (%s) unavailable; OCR stages will be skipped", config.engine.kind)
    cache = _ImageCache(Path(config.output_dir), config.cache)
    models = _Models()
    cells = [
        (t, d, s, m)
        for t in config.texts
        for d in config.dpis
        for s in config.scales
        for m in config.models
    ]
    if config.workers == 1:
        records = [_run_cell(config, *c, cache, models, probe.available) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(lambda c: _run_cell(config, *c, cache, models, probe.available), cells))
    return sort_records(records, config)


# -- reports -----------------------------------------------------------------

def _fmt_float(v: float | None) -> str:
    if v is None:
        return ""
    if math.isinf(v):
        return "inf"
    return f"{v:.6f}"


def _fmt_scale(s: float) -> str:
    return repr(float(s))


def records_to_csv(records: Sequence[ScoreRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([
            r.text_id, r.dpi, _fmt_scale(r.scale), r.model,
            "" if r.fuzz is None else r.fuzz,
            "" if r.levenshtein is None else r.levenshtein,
            _fmt_float(r.psnr_db), _fmt_float(r.ssim), r.status,
        ])
    return buf.getvalue()


def records_from_csv(text: str) -> list[ScoreRecord]:
    def num(v, kind):
        return None if v == "" else kind(v)

    return [
        ScoreRecord(
            row["text_id"], int(row["dpi"]), float(row["scale"]), row["model"], row["status"],
            num(row["fuzz"], int), num(row["levenshtein"], int), num(row["psnr_db"], float), num(row["ssim"], float),
        )
        for row in csv.DictReader(io.StringIO(text))
    ]


def _half_up(x: float) -> int:
    return math.floor(x + 0.5)


def summary_table(records: Sequence[ScoreRecord]) -> dict[int, dict[float, dict[str, int | None]]]:
    """Corpus-averaged fuzz per dpi, scale and model; None when no cell succeeded."""
    acc: dict = {}
    for r in records:
        cell = acc.setdefault(r.dpi, {}).setdefault(r.scale, {}).setdefault(r.model, [])
        if r.status == "OK":
            cell.append(r.fuzz)
    return {
        d: {s: {m: (_half_up(sum(v) / len(v)) if v else None) for m, v in by_model.items()} for s, by_model in by_scale.items()}
        for d, by_scale in acc.items()
    }


def records_to_markdown(records: Sequence[ScoreRecord]) -> str:
    models: list[str] = []
    for r in records:
        if r.model not in models:
            models.append(r.model)
    table = summary_table(records)
    out = []
    for dpi in sorted(table):
        out.append(f"### {dpi} dpi\n")
        out.append("| scale | " + " | ".join(models) + " |")
        out.append("|---|" + "---|" * len(models))
        for scale in sorted(table[dpi]):
            cells = []
            for m in models:
                v = table[dpi][scale].get(m)
                cells.append("n/a" if v is None else (f"**{v}**" if v == 100 else str(v)))
            out.append(f"| {_fmt_scale(scale)} | " + " | ".join(cells) + " |")
        out.append("")
    return "\n".join(out)


def _json_float(v):
    if v is None:
        return None
    return "inf" if math.isinf(v) else v


def records_to_json(records: Sequence[ScoreRecord]) -> str:
    rows = []
    for r in records:
        d = asdict(r)
        d["psnr_db"] = _json_float(r.psnr_db)
        rows.append(d)
    return json.dumps(rows, indent=2, sort_keys=True) + "\n"


def records_from_json(text: str) -> list[ScoreRecord]:
    rows = json.loads(text)
    if not isinstance(rows, list) or not rows:
        raise ValueError("records file must hold a non-empty list")
    out = []
    for d in rows:
        if d.get("psnr_db") == "inf":
            d["psnr_db"] = math.inf
        out.append(ScoreRecord(**d))
    return out


def emit_report(records: Sequence[ScoreRecord], formats: Iterable[str], output_dir) -> dict[str, Path]:
    """Write ``records.csv``, ``report.md`` and/or ``records.json`` into ``output_dir``."""
    if not records:
        raise ValueError("no records to report")
    writers = {
        "csv": ("records.csv", records_to_csv),
        "markdown": ("report.md", records_to_markdown),
        "json": ("records.json", records_to_json),
    }
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {}
    for fmt in formats:
        if fmt not in writers:
            raise ValueError(f"unknown report format {fmt!r}")
        name, render = writers[fmt]
        path = out_dir / name
        path.write_text(render(records), encoding="utf-8", newline="\n")
        written[fmt] = path
    return written


def with_overrides(config: BenchConfig, *, seed: int | None = None, workers: int | None = None,
                   output_dir: str | None = None) -> BenchConfig:
    """Apply CLI-level overrides (degrade seed, pool size, output directory)."""
    changes: dict[str, Any] = {}
    if seed is not None:
        changes["degrade"] = replace(config.degrade, seed=seed)
    if workers is not None:
        changes["workers"] = workers
    if output_dir is not None:
        changes["output_dir"] = output_dir
    return replace(config, **changes) if changes else config
