"""Train the English toy-font head and save it (default: the bundled data/heads/en.s2lp)."""

import argparse
import logging
import time
from pathlib import Path

from scene2locale.pipeline.config import data_path
from scene2locale.seqnet import TOY_WORDS, TrainConfig, builtin_alphabet, save_params, train_head


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=data_path("heads", "en.s2lp"))
    ap.add_argument("--iterations", type=int, default=5000)
    ap.add_argument("--lr", type=float, default=1e-4)
    ap.add_argument("--momentum", type=float, default=0.9)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")

    cfg = TrainConfig(learning_rate=args.lr, momentum=args.momentum, iterations=args.iterations, seed=args.seed)
    t0 = time.perf_counter()
    res = train_head(TOY_WORDS, builtin_alphabet("en"), cfg)
    dt = time.perf_counter() - t0
    print(f"iterations {res.iterations}  mean loss {res.mean_loss:.4f}  converged {res.converged}  {dt:.1f}s")
    wrong = [(w, d) for w, d in zip(res.words, res.decoded) if w != d]
    if wrong:
        print("misread:", wrong)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_params(res.params, args.out)
    print(f"saved {args.out}")
    return 0 if res.converged else 1


if __name__ == "__main__":
    raise SystemExit(main())
