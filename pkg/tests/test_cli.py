import json

import pytest

from srocr import bench
from srocr.cli import main
from srocr.degrade import load_image


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def page(tmp_path, capsys):
    path = tmp_path / "page.png"
    assert run(capsys, "render", "--text", "Command line", "--dpi", 100, "-o", path)[0] == 0
    return path


def test_render_degrade_sr_ocr_score(tmp_path, capsys, page):
    low, up, txt, truth = (tmp_path / n for n in ("low.png", "up.png", "ocr.txt", "truth.txt"))
    assert run(capsys, "degrade", page, "-o", low, "--scale", 0.5, "--seed", 3)[0] == 0
    assert load_image(low).width == 425
    assert run(capsys, "sr", low, "-o", up, "--reference", page)[0] == 0
    assert load_image(up).pixels.shape == load_image(page).pixels.shape
    assert run(capsys, "ocr", up, "-o", txt)[0] == 0
    truth.write_text("Command line")
    code, out, _ = run(capsys, "score", truth, txt, "--restored", up, "--reference", page)
    result = json.loads(out)
    assert code == 0 and result["fuzz"] == 100 and 0 < result["ssim"] <= 1


def test_sr_neural_model(tmp_path, capsys, page):
    out = tmp_path / "x2.png"
    code, _, _ = run(capsys, "sr", page, "-o", out, "--model", "edsr-mini", "--channels", 1)
    assert code == 0 and load_image(out).width == 1700


def test_render_needs_text(tmp_path, capsys):
    code, _, err = run(capsys, "render", "-o", tmp_path / "x.png")
    assert code == 1 and "--text" in err


def test_bench_run_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"texts": ["Exit codes"], "dpis": [100], "scales": [0.5]}))
    code, out, _ = run(capsys, "bench", "run", good, "--output-dir", tmp_path / "out")
    assert code == 0 and "1 cells, 0 not OK" in out
    assert bench.records_from_csv((tmp_path / "out" / "records.csv").read_text())[0].fuzz == 100

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"texts": ["x"], "scales": [1.5]}))
    code, _, err = run(capsys, "bench", "run", bad)
    assert code == 1 and "scales[0]" in err

    partial = tmp_path / "partial.json"
    partial.write_text(json.dumps({"texts": ["x"], "dpis": [100], "scales": [0.5],
                                   "models": ["bicubic", {"preset": "edsr", "weights": "missing.srwt"}]}))
    code, _, err = run(capsys, "bench", "run", partial, "--output-dir", tmp_path / "p")
    assert code == 2 and "ERROR" in err


def test_bench_report(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"texts": ["Report me"], "dpis": [100], "scales": [0.2, 0.5]}))
    run(capsys, "--output-dir", tmp_path / "r", "bench", "run", cfg)
    code, out, _ = run(capsys, "bench", "report", tmp_path / "r" / "records.json")
    assert code == 0 and out == (tmp_path / "r" / "report.md").read_text()
    code, _, _ = run(capsys, "bench", "report", tmp_path / "nope.json")
    assert code == 1


def test_describe(capsys):
    code, out, _ = run(capsys, "describe", "srgan_gen", "--factor", 4)
    assert code == 0 and "residual_blocks=16" in out


def test_gradcheck(capsys):
    code, out, _ = run(capsys, "gradcheck", "edsr-mini", "bicubic", "--probes", 8)
    assert code == 0 and "edsr-mini: max relative error" in out and "skipped" in out


def test_train(tmp_path, capsys):
    code, out, _ = run(capsys, "train", "--steps", 3, "--crops", 2, "--crop", 16, "--channels", 1,
                       "--output-dir", tmp_path)
    assert code == 0 and "3 steps" in out
    assert (tmp_path / "losses.csv").read_text().count("\n") == 4
    assert (tmp_path / "edsr_x2.srwt").exists()
