"""Finite-difference gradient check of the full model at a tiny size."""

import argparse

from comment_updater.experiments import tiny_gradcheck


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eps", type=float, default=1e-4)
    args = ap.parse_args()
    reports, seconds = tiny_gradcheck(args.seed, args.eps)
    width = max(len(r.name) for r in reports)
    for r in reports:
        print(f"{r.name:<{width}}  n={r.numel:<6d} max_abs={r.max_abs_error:.2e}  elem_rel={r.max_elementwise_relative_error:.2e}")
    worst = max(r.max_elementwise_relative_error for r in reports)
    print(f"parameters={sum(r.numel for r in reports)} worst_relative_error={worst:.3e} seconds={seconds:.1f}")


if __name__ == "__main__":
    main()
