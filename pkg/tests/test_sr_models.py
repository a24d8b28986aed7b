import json
import struct

import numpy as np
import pytest

from srocr.degrade import Image, render_text_page, resample
from srocr.sr_models import (
    GENERATORS,
    LayerNode,
    MissingWeightError,
    WeightFormatError,
    build_model,
    describe,
    forward,
    get_preset,
    init_weights,
    load_weights,
    param_count,
    read_header,
    save_weights,
    super_resolve,
)
from srocr.sr_models.graph import act, bn, conv
from srocr.tensor_core import ShapeError


class TestStructure:
    def test_srgan_gen_x4(self):
        g = build_model("srgan_gen", 4)
        assert g.count("residual_block") == 16
        shuffles = [n.params["r"] for n in g.nodes() if n.kind == "pixel_shuffle"]
        assert shuffles == [2, 2]

    def test_srgan_block_layout(self):
        block = next(n for n in build_model("srgan_gen", 2).nodes() if n.kind == "residual_block")
        assert [c.kind for c in block.children] == ["conv", "batch_norm", "activation", "conv", "batch_norm"]
        assert block.children[2].params["kind"] == "prelu"

    def test_esrgan_x4(self):
        g = build_model("esrgan_gen", 4)
        assert g.count("rrdb") == 23
        assert g.count("dense_block") == 69
        assert g.count("batch_norm") == 0

    def test_edsr_has_no_batch_norm(self):
        for pid in ("edsr", "edsr_base"):
            assert build_model(pid, 3).count("batch_norm") == 0

    def test_edsr_sizes(self):
        assert build_model("edsr", 2).count("residual_block") == 16
        g = build_model("edsr_base", 2)
        assert g.count("residual_block") == 32 and g.preset.n_features == 256

    def test_scale_three_uses_single_stage(self):
        for pid in GENERATORS:
            shuffles = [n.params["r"] for n in build_model(pid, 3).nodes() if n.kind == "pixel_shuffle"]
            assert shuffles == [3]

    def test_discriminator_layout(self):
        g = build_model("srgan_disc", 2)
        blocks = [n for n in g.nodes() if n.kind == "conv"]
        assert len(blocks) == 9
        dense = [n for n in g.nodes() if n.kind == "dense"]
        assert [d.params["out"] for d in dense] == [1024, 1]
        assert g.layers[-1].params["kind"] == "sigmoid"

    def test_bicubic_is_empty(self):
        g = build_model("bicubic", 2)
        assert g.resampling_only and list(g.slots()) == [] and param_count(g) == 0

    def test_errors(self):
        with pytest.raises(ValueError):
            build_model("edsr", 5)
        with pytest.raises(ValueError):
            build_model("vdsr", 2)
        with pytest.raises(ValueError):
            get_preset("edsr").replace(n_features=0)


class TestParamCount:
    def test_single_conv(self):
        from srocr.sr_models.graph import LayerGraph

        g = LayerGraph("one", get_preset("edsr"), 2, (conv("c", 64, 64),))
        assert param_count(g) == 36_928

    def test_srgan_residual_block(self):
        from srocr.sr_models.graph import LayerGraph

        block = LayerNode("residual_block", "b", children=(
            conv("b.c1", 64, 64), bn("b.bn1", 64), act("b.act", "relu"), conv("b.c2", 64, 64), bn("b.bn2", 64),
        ))
        assert param_count(LayerGraph("blk", get_preset("srgan_gen"), 2, (block,))) == 74_112


class TestDescribe:
    def test_block_counts_echo_preset(self):
        for pid, field, key in (("srgan_gen", "n_resblocks", "residual_blocks"),
                                ("edsr", "n_resblocks", "residual_blocks"),
                                ("esrgan_gen", "n_rrdb", "rrdb_blocks")):
            text = describe(build_model(pid, 2))
            assert f"{key}={getattr(get_preset(pid), field)}" in text

    def test_bicubic_and_beta(self):
        assert "total parameters: 0" in describe(build_model("bicubic", 2))
        assert "residual_scaling(beta)=0.1" in describe(build_model("edsr", 2))


class TestForward:
    @pytest.mark.parametrize("pid", [f"{g}-mini" for g in GENERATORS])
    @pytest.mark.parametrize("scale", [2, 3, 4])
    def test_output_dims(self, pid, scale):
        g = build_model(pid, scale)
        w = init_weights(g, 0)
        y = forward(g, w, np.random.default_rng(0).random((1, 3, 8, 6)), fast=True)
        assert y.shape == (1, 3, 8 * scale, 6 * scale)

    def test_edsr_base_full_size(self):
        g = build_model("edsr_base", 2)
        y = forward(g, init_weights(g, 0), np.zeros((1, 3, 16, 16)), fast=True)
        assert y.shape == (1, 3, 32, 32)

    def test_discriminator_probability(self):
        g = build_model("srgan_disc-mini", 2)
        p = forward(g, init_weights(g, 1), np.random.default_rng(1).random((3, 3, 16, 16)))
        assert p.shape == (3, 1) and ((p > 0) & (p < 1)).all()

    def test_zero_weights_give_zero_output(self):
        g = build_model("edsr-mini", 2)
        w = {k: np.zeros_like(v) for k, v in init_weights(g, 0).items()}
        y = forward(g, w, np.random.default_rng(2).random((1, 3, 8, 8)))
        assert not y.any()

    def test_reference_and_fast_agree(self):
        g = build_model("srgan_gen-mini", 2)
        w = init_weights(g, 3)
        x = np.random.default_rng(3).random((1, 3, 8, 8)).astype(np.float32)
        np.testing.assert_allclose(forward(g, w, x, fast=True), forward(g, w, x), rtol=1e-4, atol=1e-5)

    def test_missing_weight(self):
        g = build_model("edsr-mini", 2)
        w = init_weights(g, 0)
        w.pop("tail.conv.bias")
        with pytest.raises(MissingWeightError):
            forward(g, w, np.zeros((1, 3, 8, 8)))

    def test_input_checks(self):
        g = build_model("edsr-mini", 2)
        w = init_weights(g, 0)
        with pytest.raises(ShapeError):
            forward(g, w, np.zeros((1, 3, 3, 8)))
        with pytest.raises(ShapeError):
            forward(g, w, np.zeros((1, 1, 8, 8)))


class TestWeights:
    def test_round_trip_bit_exact(self, tmp_path):
        g = build_model("esrgan_gen-mini", 3)
        w = init_weights(g, 11)
        save_weights(g, w, tmp_path / "m.srwt")
        back = load_weights(g, tmp_path / "m.srwt")
        assert set(back) == set(w)
        for k in w:
            assert back[k].dtype == np.float32 and back[k].tobytes() == w[k].tobytes()

    def test_header(self, tmp_path):
        g = build_model("edsr-mini", 2)
        save_weights(g, init_weights(g, 0), tmp_path / "m.srwt")
        header, _ = read_header(tmp_path / "m.srwt")
        assert header["preset"] == "edsr" and header["scale"] == 2

    def _rewrite_header(self, path, edit):
        raw = path.read_bytes()
        hlen = struct.unpack("<I", raw[8:12])[0]
        header = json.loads(raw[12 : 12 + hlen])
        edit(header)
        blob = json.dumps(header, sort_keys=True).encode()
        path.write_bytes(raw[:8] + struct.pack("<I", len(blob)) + blob + raw[12 + hlen :])

    def test_shape_edit_rejected(self, tmp_path):
        g = build_model("edsr-mini", 2)
        p = tmp_path / "m.srwt"
        save_weights(g, init_weights(g, 0), p)
        self._rewrite_header(p, lambda h: h["slots"][0].__setitem__("shape", [1, 2, 3]))
        with pytest.raises(WeightFormatError, match="shape"):
            load_weights(g, p)

    def test_bad_magic_version_and_truncation(self, tmp_path):
        g = build_model("edsr-mini", 2)
        p = tmp_path / "m.srwt"
        save_weights(g, init_weights(g, 0), p)
        raw = p.read_bytes()
        (tmp_path / "magic").write_bytes(b"XXXX" + raw[4:])
        (tmp_path / "version").write_bytes(raw[:4] + struct.pack("<I", 9) + raw[8:])
        (tmp_path / "short").write_bytes(raw[:-10])
        with pytest.raises(WeightFormatError, match="magic"):
            load_weights(g, tmp_path / "magic")
        with pytest.raises(WeightFormatError, match="version"):
            load_weights(g, tmp_path / "version")
        with pytest.raises(WeightFormatError, match="truncated"):
            load_weights(g, tmp_path / "short")

    def test_missing_slot(self, tmp_path):
        g = build_model("edsr-mini", 2)
        p = tmp_path / "m.srwt"
        save_weights(g, init_weights(g, 0), p)
        self._rewrite_header(p, lambda h: h["slots"].pop())
        with pytest.raises(WeightFormatError, match="missing"):
            load_weights(g, p)

    def test_init_is_seeded(self):
        g = build_model("srgan_gen-mini", 2)
        a, b, c = init_weights(g, 5), init_weights(g, 5), init_weights(g, 6)
        assert all(np.array_equal(a[k], b[k]) for k in a)
        assert not all(np.array_equal(a[k], c[k]) for k in a)
        assert a["head.act.alpha"].tolist() == [0.25]


class TestSuperResolve:
    def test_tiles_match_whole_image(self):
        page = resample(render_text_page("Tiles", 100), 0.5)
        g = build_model("srgan_gen-mini", 2)
        w = init_weights(g, 0)
        tiled = super_resolve(g, w, page, tile=40)
        whole = super_resolve(g, w, page, tile=10_000)
        assert tiled.pixels.shape == (page.height * 2, page.width * 2)
        assert np.array_equal(tiled.pixels, whole.pixels)

    def test_single_channel_model_on_gray(self):
        g = build_model(get_preset("edsr-mini").replace(in_channels=1), 3)
        img = Image(np.full((10, 12), 200, np.uint8), 72)
        out = super_resolve(g, init_weights(g, 0), img)
        assert out.pixels.shape == (30, 36) and out.dpi == 216
