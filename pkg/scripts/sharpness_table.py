"""Print the sharpness table: A_1 constants of w_t against the operator-norm ratio on chi_[-1,1].

Usage: python scripts/sharpness_table.py [--radius 10] [--cell 1/10] [--t 1/2,1/4,1/8] [--p 1,2,4]
"""

import argparse
from fractions import Fraction

from medimax import verify
from medimax.cli import parse_list, parse_rational


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", default="10")
    ap.add_argument("--cell", default="1/10")
    ap.add_argument("--t", default="1/2,1/4,1/8")
    ap.add_argument("--p", default="1,2,4")
    args = ap.parse_args()
    u = verify.sharpness_universe(parse_rational(args.radius), parse_rational(args.cell))
    ts, ps = parse_list(args.t, "--t"), parse_list(args.p, "--p")
    sharp = verify.check_sharpness(ts, u)
    lp = verify.check_lp_lower(ts, ps, u)
    print(f"{'t':>6} {'A1 window':>12} {'1/t':>6} {'L1 ratio':>9} {'2/t+1':>6}  " +
          " ".join(f"{'p=' + str(p):>10}" for p in ps))
    lp_rows = {(Fraction(i["t"]), Fraction(i["p"])): i["ratio"] for i in lp.details["instances"]}
    for t, info in zip(ts, sharp.details["instances"]):
        a1 = Fraction(info["A1_family"])
        cols = " ".join(f"{lp_rows[(t, p)]:>10.6f}" for p in ps)
        print(f"{str(t):>6} {float(a1):>12.6f} {str(1 / t):>6} {info['ratio']:>9} {str(2 / t + 1):>6}  {cols}")
    print(sharp.summary())
    print(lp.summary())


if __name__ == "__main__":
    main()
