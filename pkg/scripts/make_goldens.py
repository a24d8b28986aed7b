"""Regenerate the golden files under tests/golden/.

Run only after an intentional change to rendering, resampling, OCR or
report formatting, and review the diff before committing.
"""
import argparse
import hashlib
import json
from pathlib import Path

from srocr import bench
from srocr.degrade import DegradeSpec, degrade_pipeline, render_text_page

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "tests" / "golden")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    texts = {t.id: t.text for t in bench.bundled_corpus()}

    # canonical degradation of the "letter" page at 200 dpi
    page = render_text_page(texts["letter"], 200)
    low = degrade_pipeline(page, DegradeSpec(0.3, 0.5, 2.0, seed=7))
    digest = hashlib.sha256(low.pixels.tobytes()).hexdigest()
    (args.out / "degrade_canonical.sha256").write_text(f"{digest}  letter@200dpi DegradeSpec(0.3, 0.5, 2.0, seed=7)\n")

    # one scored cell
    cfg = bench.BenchConfig(texts=(bench.TextSource("letter", texts["letter"]),), dpis=(200,), scales=(0.3,), cache=False)
    rec = bench.run_matrix(cfg)[0]
    cell = {k: getattr(rec, k) for k in ("text_id", "dpi", "scale", "model", "status", "fuzz", "levenshtein", "psnr_db", "ssim")}
    (args.out / "cell.json").write_text(json.dumps(cell, indent=2, sort_keys=True) + "\n")

    # hermetic corpus report
    records = bench.run_matrix(bench.BenchConfig(texts=bench.bundled_corpus(), cache=False))
    (args.out / "corpus_report.md").write_text(bench.records_to_markdown(records))
    (args.out / "corpus_records.csv").write_text(bench.records_to_csv(records))
    print(f"wrote goldens to {args.out}")


if __name__ == "__main__":
    main()
