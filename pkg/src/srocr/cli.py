"""Command-line entry point: ``srocr <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import bench
from .degrade import DegradeSpec, FontSpec, Image, degrade_pipeline, load_image, render_text_page, resize, save_image
from .metrics import psnr, ssim, text_score
from .ocr_adapter import OcrEngineSpec, OcrError, run_ocr
from .sr_models import build_model, describe, get_preset, init_weights, load_weights, save_weights, super_resolve
from .training import TrainConfig, TrainingError, grad_check, text_crops, train_loop, write_loss_csv

log = logging.getLogger("srocr")

EXIT_OK, EXIT_CONFIG, EXIT_CELLS = 0, 1, 2


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # Defined on the root parser and on every subcommand so flags work in either position.
    d = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=d, help="seed for noise, initialisation and crop sampling")
    p.add_argument("--workers", type=int, default=d, help="worker threads for bench cells")
    p.add_argument("--output-dir", default=d, help="directory for reports and cached intermediates")
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS if suppress else False)
    return p


def _read_text_arg(args) -> str:
    if args.text_file:
        return Path(args.text_file).read_text(encoding="utf-8")
    if args.text is None:
        raise ValueError("give --text or --text-file")
    return args.text


def _font(args) -> FontSpec:
    return FontSpec(args.font_size, args.bold)


def _engine(args) -> OcrEngineSpec:
    return OcrEngineSpec(args.engine, args.command or OcrEngineSpec.command_template, args.timeout)


def _model_graph(args, factor: int):
    preset = get_preset(args.model)
    if getattr(args, "channels", None):
        preset = preset.replace(in_channels=args.channels)
    return build_model(preset, factor)


# -- subcommands -------------------------------------------------------------

def cmd_render(args) -> int:
    img = render_text_page(_read_text_arg(args), args.dpi, _font(args))
    save_image(img, args.output)
    print(f"{args.output}: {img.width}x{img.height} @ {args.dpi} dpi")
    return EXIT_OK


def cmd_degrade(args) -> int:
    img = load_image(args.input)
    out = degrade_pipeline(img, DegradeSpec(args.scale, args.blur, args.noise, args.seed or 0))
    save_image(out, args.output)
    print(f"{args.output}: {out.width}x{out.height}")
    return EXIT_OK


def cmd_sr(args) -> int:
    img = load_image(args.input)
    graph = _model_graph(args, args.factor)
    if graph.resampling_only:
        up = resize(img, img.width * args.factor, img.height * args.factor)
        out = Image(up.pixels, img.dpi * args.factor if img.dpi else None)
    else:
        weights = load_weights(graph, args.weights) if args.weights else init_weights(graph, args.seed or 0)
        out = super_resolve(graph, weights, img)
    if args.reference:
        ref = load_image(args.reference)
        out = Image(resize(out, ref.width, ref.height).pixels, ref.dpi)
    save_image(out, args.output)
    print(f"{args.output}: {out.width}x{out.height}")
    return EXIT_OK


def cmd_ocr(args) -> int:
    img = load_image(args.input)
    text = run_ocr(img, _engine(args), _font(args))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text + ("" if text.endswith("\n") else "\n"))
    return EXIT_OK


def cmd_score(args) -> int:
    truth = Path(args.truth).read_text(encoding="utf-8")
    hyp = Path(args.hypothesis).read_text(encoding="utf-8")
    ts = text_score(truth, hyp)
    result = {"fuzz": ts.fuzz, "levenshtein": ts.levenshtein}
    if args.restored and args.reference:
        a, b = load_image(args.restored), load_image(args.reference)
        p = psnr(a, b)
        result.update(psnr_db="inf" if math.isinf(p) else p, ssim=ssim(a, b))
    print(json.dumps(result, sort_keys=True))
    return EXIT_OK


def _write_reports(records, out_dir: Path) -> dict:
    return bench.emit_report(records, ("csv", "markdown", "json"), out_dir)


def cmd_bench_run(args) -> int:
    try:
        cfg = bench.load_config(args.config)
        cfg = bench.with_overrides(cfg, seed=args.seed, workers=args.workers, output_dir=args.output_dir)
    except bench.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    records = bench.run_matrix(cfg)
    paths = _write_reports(records, Path(cfg.output_dir))
    bad = [r for r in records if r.status != "OK"]
    print(f"{len(records)} cells, {len(bad)} not OK; reports in {paths['csv'].parent}")
    for r in bad[:10]:
        print(f"  {r.status} {r.text_id} dpi={r.dpi} scale={r.scale} model={r.model}: {r.message}", file=sys.stderr)
    return EXIT_CELLS if bad else EXIT_OK


def cmd_bench_report(args) -> int:
    try:
        records = bench.records_from_json(Path(args.records).read_text(encoding="utf-8"))
    except (OSError, ValueError, TypeError) as exc:
        print(f"cannot read records: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.output_dir) if args.output_dir else Path(args.records).parent
    bench.emit_report(records, ("csv", "markdown"), out_dir)
    sys.stdout.write(bench.records_to_markdown(records))
    return EXIT_CELLS if any(r.status != "OK" for r in records) else EXIT_OK


def cmd_train(args) -> int:
    seed = args.seed or 0
    gen = _model_graph(args, args.factor)
    if gen.resampling_only or gen.is_discriminator:
        raise ValueError(f"{args.model} is not a trainable generator")
    page = render_text_page(_read_text_arg(args) if (args.text or args.text_file) else _default_text(), args.dpi)
    size = args.crop
    data = text_crops(page, size, args.factor, args.crops, seed, gen.preset.in_channels)
    disc = None
    if args.mode != "l1_only":
        disc = build_model(get_preset("srgan_disc-mini").replace(disc_input=size, in_channels=gen.preset.in_channels), 2)
    cfg = TrainConfig(steps_max=args.steps, batch=args.batch, learning_rate=args.lr, seed=seed, mode=args.mode)
    state, history = train_loop(cfg, data, gen, disc)
    out_dir = Path(args.output_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    save_weights(gen, state.gen, out_dir / f"{gen.name}.srwt")
    write_loss_csv(history, out_dir / "losses.csv")
    first, last = history[0], history[-1]
    print(f"{len(history)} steps: l1 {first.l1:.5f} -> {last.l1:.5f}; weights in {out_dir / (gen.name + '.srwt')}")
    return EXIT_OK


def _default_text() -> str:
    return "".join(t.text for t in bench.bundled_corpus())


def cmd_gradcheck(args) -> int:
    worst_all = 0.0
    for name in args.models:
        graph = build_model(get_preset(name), 2)
        if graph.resampling_only:
            print(f"{name}: no parameters, skipped")
            continue
        weights = {k: v.astype(np.float64) for k, v in init_weights(graph, args.seed or 0).items()}
        worst = grad_check(graph, weights, probes=args.probes, seed=args.seed or 0, eps=args.eps)
        worst_all = max(worst_all, worst)
        print(f"{name}: max relative error {worst:.3e} over {args.probes} probes")
    return EXIT_OK if worst_all < args.tolerance else EXIT_CELLS


def cmd_describe(args) -> int:
    sys.stdout.write(describe(_model_graph(args, args.factor)))
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    parser = argparse.ArgumentParser(prog="srocr", parents=[_global_flags(suppress=False)],
                                     description="Super-resolution and OCR benchmark tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, target=sub):
        p = target.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    def text_args(p):
        p.add_argument("--text")
        p.add_argument("--text-file")

    def font_args(p):
        p.add_argument("--font-size", type=int, default=1)
        p.add_argument("--bold", action="store_true")

    p = add("render", cmd_render, "render text onto a page image")
    text_args(p)
    font_args(p)
    p.add_argument("--dpi", type=int, default=200)
    p.add_argument("-o", "--output", required=True)

    p = add("degrade", cmd_degrade, "blur, downscale and add noise")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--scale", type=float, default=0.5)
    p.add_argument("--blur", type=float, default=0.0)
    p.add_argument("--noise", type=float, default=0.0)

    p = add("sr", cmd_sr, "super-resolve an image")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--model", default="bicubic")
    p.add_argument("--weights", help="SRWT weight file; default is untrained weights from --seed")
    p.add_argument("--factor", type=int, default=2, choices=(2, 3, 4))
    p.add_argument("--channels", type=int, choices=(1, 3))
    p.add_argument("--reference", help="resize the result to this image's dimensions")

    p = add("ocr", cmd_ocr, "extract text from an image")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--engine", choices=("mock", "external"), default="mock")
    p.add_argument("--command", help="external command template with {input} and {output}")
    p.add_argument("--timeout", type=float, default=120.0)
    font_args(p)

    p = add("score", cmd_score, "compare OCR output with the truth")
    p.add_argument("truth")
    p.add_argument("hypothesis")
    p.add_argument("--restored")
    p.add_argument("--reference")

    p = add("bench", None, "run or report the experiment matrix")
    bsub = p.add_subparsers(dest="bench_command", required=True)
    q = add("run", cmd_bench_run, "run a JSON config", bsub)
    q.add_argument("config")
    q = add("report", cmd_bench_report, "re-emit tables from records.json", bsub)
    q.add_argument("records")

    p = add("train", cmd_train, "train a generator on synthetic text crops")
    text_args(p)
    p.add_argument("--model", default="edsr-mini")
    p.add_argument("--channels", type=int, choices=(1, 3))
    p.add_argument("--factor", type=int, default=2, choices=(2, 3, 4))
    p.add_argument("--mode", choices=("l1_only", "gan", "ragan"), default="l1_only")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--dpi", type=int, default=100)
    p.add_argument("--crop", type=int, default=32)
    p.add_argument("--crops", type=int, default=8)

    p = add("gradcheck", cmd_gradcheck, "compare analytic and numeric gradients")
    p.add_argument("models", nargs="*", default=[f"{m}-mini" for m in ("srgan_gen", "srgan_disc", "esrgan_gen", "edsr", "edsr_base")])
    p.add_argument("--probes", type=int, default=64)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--tolerance", type=float, default=1e-3)

    p = add("describe", cmd_describe, "print a model's layer graph")
    p.add_argument("model")
    p.add_argument("--factor", type=int, default=2, choices=(2, 3, 4))
    p.add_argument("--channels", type=int, choices=(1, 3))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, OcrError, TrainingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
