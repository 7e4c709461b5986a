"""Write the noise-free recovery dataset (y1 = 2*x1^2/x2 + 3, y2 = x1*x2) to CSV."""

import argparse

from laurent_mtr.dataset import write_csv
from laurent_mtr.synthetic import recovery_dataset


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="data/synthetic.csv")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    write_csv(recovery_dataset(args.n, args.seed), args.out)
    print(args.out)


if __name__ == "__main__":
    main()
