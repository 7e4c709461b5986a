"""Train, evaluate, ablate and sweep on Energy Efficiency in one go.

Expects data/ENB2012_data.csv (see prepare_energy.py). Results go under
``--out`` (default runs/energy).
"""

import argparse
import os
import sys

from laurent_mtr.cli import main as cli


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--config", default="configs/energy.json")
    p.add_argument("--out", default="runs/energy")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--force", action="store_true")
    args = p.parse_args()
    common = ["--config", args.config, "--jobs", str(args.jobs)] + (["--force"] if args.force else [])
    run = os.path.join(args.out, "default")
    steps = [
        ["train", *common, "--out", run],
        ["eval", run, "--out", os.path.join(args.out, "table_default.csv")],
        ["extract", run],
        *(["sweep-input", run, "--target", str(t), *(["--force"] if args.force else [])]
          for t in (1, 2)),
        ["ablate", *common, "--out", os.path.join(args.out, "ablation")],
        ["sweep-pabs", *common, "--out", os.path.join(args.out, "pabs"),
         "--k-init", "1,2,3", "--k-max", "2,4,6,8,10"],
    ]
    for argv in steps:
        print("$ laurent_mtr", " ".join(argv), flush=True)
        code = cli(argv)
        if code:
            sys.exit(code)


if __name__ == "__main__":
    main()
