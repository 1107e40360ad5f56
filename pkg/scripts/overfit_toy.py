"""Train on the toy corpus and report top-1 exact match plus the beam-1/greedy agreement."""

import argparse
import json

from comment_updater.config import Config
from comment_updater.experiments import overfit_toy


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", help="JSON config; defaults to embed 32 with the other defaults")
    ap.add_argument("--epochs", type=int, default=500)
    ap.add_argument("-n", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--every", type=int, default=25, help="print the loss every N epochs")
    args = ap.parse_args()

    cfg = Config.load(args.config) if args.config else Config(embed_dim=32)
    cfg = cfg.replace(epochs=args.epochs, seed=args.seed)

    def progress(rec):
        if rec["epoch"] % args.every == 0:
            print(json.dumps(rec), flush=True)

    res = overfit_toy(n=args.n, seed=args.seed, cfg=cfg, on_epoch=progress)
    for sid, got, want in res.mismatches:
        print(f"{sid}: got {' '.join(got)!r} want {' '.join(want)!r}")
    print(json.dumps({
        "accuracy": res.accuracy,
        "beam1_matches_greedy": res.beam1_matches_greedy,
        "best_epoch": res.best_epoch,
        "seconds": round(res.seconds, 1),
    }))


if __name__ == "__main__":
    main()
