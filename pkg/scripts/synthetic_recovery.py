"""Train on the noise-free recovery data and print integer-exponent equations.

``--seeds`` repeats the run over several training seeds and reports how many
recover the generating equations.
"""

import argparse

from laurent_mtr.config import TrainConfig
from laurent_mtr.dataset import split
from laurent_mtr.metrics import report
from laurent_mtr.model import forward_batch
from laurent_mtr.symbolic import LAURENT_PRECISION, extract_equations, render_equation
from laurent_mtr.synthetic import recovery_dataset
from laurent_mtr.training import train


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--data-seed", type=int, default=0)
    p.add_argument("--seeds", type=int, nargs="+", default=[42])
    p.add_argument("--k-max", type=int, default=4)
    args = p.parse_args()
    sd = split(recovery_dataset(500, seed=args.data_seed), 0.8, 42)
    hits = 0
    for seed in args.seeds:
        cfg = TrainConfig(k_init=1, k_max=args.k_max, seed=seed)
        rep = train(sd, cfg)
        r = report(sd.test.targets, forward_batch(rep.model, sd.test.features))
        eqs = extract_equations(rep.model, LAURENT_PRECISION, cfg.prune_threshold,
                                relative=cfg.prune_relative)
        ok = max(t.rmse for t in r.targets) < 1e-2
        hits += ok
        print(f"seed {seed}: test RMSE {[round(t.rmse, 6) for t in r.targets]}")
        for eq in eqs:
            print("   ", render_equation(eq))
    print(f"{hits}/{len(args.seeds)} runs reach test RMSE < 1e-2 on both targets")
    return 0 if hits == len(args.seeds) else 1


if __name__ == "__main__":
    raise SystemExit(main())
