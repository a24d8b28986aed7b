"""Train a small generator on rendered text crops and compare it with bicubic.

The generator is trained with L1 (optionally followed by an adversarial
phase), saved as an SRWT file, and then benchmarked on the bundled corpus
at the scales whose upsample factor matches the trained one.
"""
import argparse
import time
from pathlib import Path

from srocr import bench
from srocr.degrade import render_text_page
from srocr.sr_models import build_model, get_preset, init_weights, save_weights
from srocr.training import TrainConfig, TrainState, text_crops, train_loop, write_loss_csv

SCALES_FOR_FACTOR = {2: (0.45, 0.5), 3: (0.3, 0.35, 0.4), 4: (0.1, 0.2)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="edsr-mini")
    ap.add_argument("--factor", type=int, default=2, choices=(2, 3, 4))
    ap.add_argument("--steps", type=int, default=300)
    ap.add_argument("--adversarial", choices=("gan", "ragan"))
    ap.add_argument("--adv-steps", type=int, default=100)
    ap.add_argument("--crop", type=int, default=48)
    ap.add_argument("--crops", type=int, default=16)
    ap.add_argument("--lr", type=float, default=1e-3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("bench-out/train"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    gen = build_model(get_preset(args.preset).replace(in_channels=1), args.factor)
    page = render_text_page("".join(t.text for t in bench.bundled_corpus()), 100)
    data = text_crops(page, args.crop, args.factor, args.crops, seed=args.seed, channels=1)

    start = time.perf_counter()
    cfg = TrainConfig(steps_max=args.steps, learning_rate=args.lr, seed=args.seed, convergence_eps=0)
    state, history = train_loop(cfg, data, gen)
    if args.adversarial:
        disc = build_model(get_preset("srgan_disc-mini").replace(disc_input=args.crop, in_channels=1), 2)
        adv_cfg = TrainConfig(steps_max=args.adv_steps, learning_rate=args.lr, seed=args.seed,
                              mode=args.adversarial, convergence_eps=0)
        resume = TrainState(state.gen, init_weights(disc, args.seed + 1), state.step)
        state, adv_history = train_loop(adv_cfg, data, gen, disc, resume)
        history += adv_history
    print(f"trained {len(history)} steps in {time.perf_counter() - start:.1f}s: "
          f"l1 {history[0].l1:.4f} -> {history[-1].l1:.4f}")

    weights = args.out / f"{gen.name}.srwt"
    save_weights(gen, state.gen, weights)
    write_loss_csv(history, args.out / "losses.csv")

    cfg = bench.BenchConfig(
        texts=bench.bundled_corpus(), dpis=(200,), scales=SCALES_FOR_FACTOR[args.factor],
        models=(bench.ModelSpec(), bench.ModelSpec(args.preset, str(weights), args.factor, 1)),
        output_dir=str(args.out), cache=False,
    )
    records = bench.run_matrix(cfg)
    bench.emit_report(records, ("csv", "markdown"), args.out)
    print(bench.records_to_markdown(records))


if __name__ == "__main__":
    main()
