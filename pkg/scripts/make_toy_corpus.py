"""Write the synthetic co-change corpus as JSONL."""

import argparse

from comment_updater.corpus import write_corpus
from comment_updater.synthetic import toy_corpus


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out")
    ap.add_argument("-n", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    write_corpus(args.out, toy_corpus(args.n, args.seed))
    print(f"wrote {args.n} samples to {args.out}")


if __name__ == "__main__":
    main()
