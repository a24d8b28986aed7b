"""Run the bundled corpus through the default dpi x scale matrix.

Writes records.csv, records.json and report.md to --out and prints the
markdown tables. Pass --engine tesseract to use an installed tesseract
binary instead of the built-in mock reader.
"""
import argparse
import sys
import time
from pathlib import Path

from srocr import bench
from srocr.ocr_adapter import OcrEngineSpec, engine_probe


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=Path, default=Path("bench-out/corpus"))
    ap.add_argument("--engine", choices=("mock", "tesseract"), default="mock")
    ap.add_argument("--model", action="append", default=[],
                    help="extra model, PRESET or PRESET=WEIGHTS (repeatable); bicubic is always included")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    engine = OcrEngineSpec()
    if args.engine == "tesseract":
        engine = OcrEngineSpec("external", "tesseract {input} {output} --psm 6")
        if not engine_probe(engine).available:
            sys.exit("tesseract is not installed")

    models = [bench.ModelSpec()]
    for item in args.model:
        preset, _, weights = item.partition("=")
        models.append(bench.ModelSpec(preset, weights or "untrained:0"))

    cfg = bench.BenchConfig(texts=bench.bundled_corpus(), models=tuple(models), engine=engine,
                            output_dir=str(args.out), workers=args.workers)
    start = time.perf_counter()
    records = bench.run_matrix(cfg)
    bench.emit_report(records, ("csv", "json", "markdown"), args.out)
    print(bench.records_to_markdown(records))
    print(f"{len(records)} cells in {time.perf_counter() - start:.1f}s; reports in {args.out}")


if __name__ == "__main__":
    main()
