"""Layer graphs for the SRGAN, ESRGAN and EDSR families plus a bicubic stand-in."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterator

SCALES = (2, 3, 4)
PRESET_IDS = ("srgan_gen", "srgan_disc", "esrgan_gen", "edsr", "edsr_base", "bicubic")
GENERATORS = ("srgan_gen", "esrgan_gen", "edsr", "edsr_base")


@dataclass(frozen=True)
class ArchPreset:
    id: str
    n_resblocks: int = 16
    n_features: int = 64
    n_rrdb: int = 23
    residual_scaling: float = 0.1
    growth: int = 32  # RRDB dense-block growth channels
    dense_units: int = 1024  # discriminator hidden width
    disc_input: int = 96
    in_channels: int = 3

    def __post_init__(self):
        if self.id not in PRESET_IDS:
            raise ValueError(f"unknown preset {self.id!r}; expected one of {PRESET_IDS}")
        for name in ("n_resblocks", "n_features", "n_rrdb", "growth", "dense_units", "disc_input", "in_channels"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{self.id}: {name} must be positive")
        if self.residual_scaling <= 0:
            raise ValueError(f"{self.id}: residual_scaling must be positive")

    def replace(self, **changes) -> "ArchPreset":
        return dataclasses.replace(self, **changes)


PRESETS: dict[str, ArchPreset] = {
    "srgan_gen": ArchPreset("srgan_gen", n_resblocks=16, n_features=64, residual_scaling=1.0),
    "srgan_disc": ArchPreset("srgan_disc", n_resblocks=8, n_features=64, residual_scaling=1.0),
    "esrgan_gen": ArchPreset("esrgan_gen", n_rrdb=23, n_features=64),
    # Table values as printed: EDSR 16x64, EDSR-BASE 32x256
    "edsr": ArchPreset("edsr", n_resblocks=16, n_features=64),
    "edsr_base": ArchPreset("edsr_base", n_resblocks=32, n_features=256),
    "bicubic": ArchPreset("bicubic"),
}


def miniature(preset_id: str) -> ArchPreset:
    """Desk-scale variant: 2 blocks, 8 features."""
    base = PRESETS[preset_id]
    return base.replace(n_resblocks=2, n_rrdb=2, n_features=8, growth=4, dense_units=16, disc_input=16)


def get_preset(name: str) -> ArchPreset:
    """Look up ``edsr`` style ids or ``edsr-mini`` style miniature ids."""
    key = name.replace("-", "_")
    if key.endswith("_mini"):
        base = key[: -len("_mini")]
        if base in PRESETS:
            return miniature(base)
    if key in PRESETS:
        return PRESETS[key]
    raise ValueError(f"unknown preset {name!r}")


@dataclass(frozen=True)
class Slot:
    name: str
    shape: tuple[int, ...]
    trainable: bool = True

    @property
    def size(self) -> int:
        n = 1
        for d in self.shape:
            n *= d
        return n


@dataclass(frozen=True)
class LayerNode:
    kind: str
    name: str
    params: dict = field(default_factory=dict)
    slots: tuple[Slot, ...] = ()
    children: tuple["LayerNode", ...] = ()

    def walk(self) -> Iterator["LayerNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class LayerGraph:
    name: str
    preset: ArchPreset
    scale: int
    layers: tuple[LayerNode, ...]
    resampling_only: bool = False

    def __post_init__(self):
        if self.scale not in SCALES:
            raise ValueError(f"scale must be one of {SCALES}, got {self.scale}")
        names = [s.name for s in self.slots()]
        if len(names) != len(set(names)):
            raise ValueError(f"{self.name}: duplicate weight slot names")

    def nodes(self) -> Iterator[LayerNode]:
        for layer in self.layers:
            yield from layer.walk()

    def slots(self) -> Iterator[Slot]:
        for node in self.nodes():
            yield from node.slots

    def count(self, kind: str) -> int:
        return sum(1 for n in self.nodes() if n.kind == kind)

    @property
    def is_discriminator(self) -> bool:
        return self.preset.id == "srgan_disc"


# -- node constructors -------------------------------------------------------

def conv(name, cin, cout, k=3, stride=1, pad=None) -> LayerNode:
    pad = k // 2 if pad is None else pad
    return LayerNode(
        "conv",
        name,
        {"in_channels": cin, "out_channels": cout, "kernel_size": k, "stride": stride, "padding": pad},
        (Slot(f"{name}.weight", (cout, cin, k, k)), Slot(f"{name}.bias", (cout,))),
    )


def act(name, kind, slope=None) -> LayerNode:
    if kind == "prelu":
        return LayerNode("activation", name, {"kind": "prelu"}, (Slot(f"{name}.alpha", (1,)),))
    params = {"kind": kind}
    if slope is not None:
        params["slope"] = slope
    return LayerNode("activation", name, params)


def bn(name, c) -> LayerNode:
    return LayerNode(
        "batch_norm",
        name,
        {"eps": 1e-5},
        (
            Slot(f"{name}.gamma", (c,)),
            Slot(f"{name}.beta", (c,)),
            Slot(f"{name}.mean", (c,), trainable=False),
            Slot(f"{name}.var", (c,), trainable=False),
        ),
    )


def _upsample_stages(prefix, nf, scale, act_kind=None, slope=None):
    """conv -> pixel_shuffle(r) [-> activation] per stage; x3 is a single stage."""
    factors = [3] if scale == 3 else [2] * (scale // 2)
    stages = []
    for i, r in enumerate(factors):
        p = f"{prefix}{i}"
        stages += [
            conv(f"{p}.conv", nf, nf * r * r),
            LayerNode("pixel_shuffle", f"{p}.shuffle", {"r": r}),
        ]
        if act_kind is not None:
            stages.append(act(f"{p}.act", act_kind, slope))
    return stages


def _srgan_gen(p: ArchPreset, scale: int):
    nf, c = p.n_features, p.in_channels
    blocks = []
    for i in range(p.n_resblocks):
        b = f"body.{i}"
        blocks.append(
            LayerNode(
                "residual_block",
                b,
                children=(
                    conv(f"{b}.conv1", nf, nf),
                    bn(f"{b}.bn1", nf),
                    act(f"{b}.act", "prelu"),
                    conv(f"{b}.conv2", nf, nf),
                    bn(f"{b}.bn2", nf),
                ),
            )
        )
    trunk = LayerNode(
        "global_skip",
        "trunk",
        children=(*blocks, conv("trunk.conv", nf, nf), bn("trunk.bn", nf)),
    )
    return (
        conv("head.conv", c, nf),
        act("head.act", "prelu"),
        trunk,
        *_upsample_stages("up", nf, scale, "prelu"),
        conv("tail.conv", nf, c),
    )


def _srgan_disc(p: ArchPreset):
    nf, c = p.n_features, p.in_channels
    layers = [conv("head.conv", c, nf), act("head.act", "leaky_relu", 0.2)]
    ch, size = nf, p.disc_input
    for i in range(p.n_resblocks):
        stride = 2 if i % 2 == 0 else 1
        cout = nf * 2 ** (i // 2)
        b = f"block.{i}"
        layers += [conv(f"{b}.conv", ch, cout, stride=stride), bn(f"{b}.bn", cout), act(f"{b}.act", "leaky_relu", 0.2)]
        ch = cout
        size = (size + 2 - 3) // stride + 1
    flat = ch * size * size
    layers += [
        LayerNode("dense", "fc1", {"in": flat, "out": p.dense_units},
                  (Slot("fc1.weight", (flat, p.dense_units)), Slot("fc1.bias", (p.dense_units,)))),
        act("fc1.act", "leaky_relu", 0.2),
        LayerNode("dense", "fc2", {"in": p.dense_units, "out": 1},
                  (Slot("fc2.weight", (p.dense_units, 1)), Slot("fc2.bias", (1,)))),
        act("out.sigmoid", "sigmoid"),
    ]
    return tuple(layers)


def _dense_block(name, nf, gc, beta):
    convs = []
    for j in range(5):
        cin = nf + j * gc
        cout = gc if j < 4 else nf
        convs.append(conv(f"{name}.conv{j}", cin, cout))
    return LayerNode("dense_block", name, {"beta": beta, "slope": 0.2}, children=tuple(convs))


def _esrgan_gen(p: ArchPreset, scale: int):
    nf, c, beta = p.n_features, p.in_channels, p.residual_scaling
    rrdbs = []
    for i in range(p.n_rrdb):
        r = f"rrdb.{i}"
        rrdbs.append(
            LayerNode(
                "rrdb",
                r,
                {"beta": beta},
                children=tuple(_dense_block(f"{r}.db{j}", nf, p.growth, beta) for j in range(3)),
            )
        )
    return (
        conv("head.conv", c, nf),
        *rrdbs,
        *_upsample_stages("up", nf, scale, "leaky_relu", 0.2),
        conv("tail.conv1", nf, nf),
        act("tail.act", "leaky_relu", 0.2),
        conv("tail.conv2", nf, c),
    )


def _edsr(p: ArchPreset, scale: int):
    nf, c, beta = p.n_features, p.in_channels, p.residual_scaling
    blocks = []
    for i in range(p.n_resblocks):
        b = f"body.{i}"
        blocks.append(
            LayerNode(
                "residual_block",
                b,
                children=(
                    conv(f"{b}.conv1", nf, nf),
                    act(f"{b}.act", "relu"),
                    conv(f"{b}.conv2", nf, nf),
                    LayerNode("scale_residual", f"{b}.scale", {"beta": beta}),
                ),
            )
        )
    trunk = LayerNode("global_skip", "trunk", children=(*blocks, conv("trunk.conv", nf, nf)))
    return (
        conv("head.conv", c, nf),
        trunk,
        *_upsample_stages("up", nf, scale),
        conv("tail.conv", nf, c),
    )


def build_model(preset: ArchPreset | str, scale: int) -> LayerGraph:
    if isinstance(preset, str):
        preset = get_preset(preset)
    if scale not in SCALES:
        raise ValueError(f"unsupported scale {scale}; expected one of {SCALES}")
    pid = preset.id
    if pid == "bicubic":
        return LayerGraph(f"bicubic_x{scale}", preset, scale, (), resampling_only=True)
    if pid == "srgan_gen":
        layers = _srgan_gen(preset, scale)
    elif pid == "srgan_disc":
        layers = _srgan_disc(preset)
    elif pid == "esrgan_gen":
        layers = _esrgan_gen(preset, scale)
    else:
        layers = _edsr(preset, scale)
    return LayerGraph(f"{pid}_x{scale}", preset, scale, tuple(layers))


def param_count(graph: LayerGraph) -> int:
    """Trainable element count; batch-norm running statistics are excluded."""
    return sum(s.size for s in graph.slots() if s.trainable)


def _describe_node(node: LayerNode, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    params = ", ".join(f"{k}={v}" for k, v in node.params.items())
    n_params = sum(s.size for n in node.walk() for s in n.slots if s.trainable)
    lines.append(f"{pad}{node.kind:<15} {node.name:<22} {params}  [{n_params} params]")
    # repeated identical blocks are summarized after the first one
    if node.kind in ("rrdb", "residual_block"):
        return
    for child in node.children:
        _describe_node(child, depth + 1, lines)


def describe(graph: LayerGraph) -> str:
    p = graph.preset
    lines = [
        f"model {graph.name}: preset={p.id} scale=x{graph.scale}",
        f"features={p.n_features} residual_blocks={graph.count('residual_block')} "
        f"rrdb_blocks={graph.count('rrdb')} batch_norm={graph.count('batch_norm')} "
        f"residual_scaling(beta)={p.residual_scaling}",
    ]
    if graph.resampling_only:
        lines.append("resampling only (bicubic), no layers")
    for layer in graph.layers:
        _describe_node(layer, 1, lines)
    lines.append(f"total parameters: {param_count(graph)}")
    return "\n".join(lines) + "\n"
