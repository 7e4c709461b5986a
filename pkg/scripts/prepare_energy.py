"""Convert the UCI Energy Efficiency spreadsheet (ENB2012_data.xlsx) to CSV.

Reading .xlsx needs ``pandas`` with ``openpyxl``; neither is a dependency of
the package. A CSV export of the sheet with header X1..X8,Y1,Y2 works too.
"""

import argparse
import csv


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("source", help="ENB2012_data.xlsx or a CSV export")
    p.add_argument("--out", default="data/ENB2012_data.csv")
    args = p.parse_args()
    columns = [f"X{i}" for i in range(1, 9)] + ["Y1", "Y2"]
    if args.source.endswith((".xlsx", ".xls")):
        import pandas as pd
        rows = pd.read_excel(args.source)[columns].dropna().values.tolist()
    else:
        with open(args.source, newline="") as fh:
            reader = csv.DictReader(fh)
            rows = [[r[c] for c in columns] for r in reader if all(r.get(c) for c in columns)]
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
    print(f"{len(rows)} rows -> {args.out}")


if __name__ == "__main__":
    main()
