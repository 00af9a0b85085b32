"""Scan the expansion inequality over all subsets of a 1-D cube, with and without sub-cell intervals.

Reports, for each eta, the worst rhs/lhs ratio under the exact method and how many sets
fail when only whole-cell intervals are allowed.

Usage: python scripts/expansion_scan.py [--cells 12] [--eta 1/4,1/2,3/4]
"""

import argparse

from medimax import verify
from medimax.cli import parse_list


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=12)
    ap.add_argument("--eta", default="1/4,1/2,3/4")
    args = ap.parse_args()
    for eta in parse_list(args.eta, "--eta"):
        rep = verify.check_expansion_exhaustive(1, args.cells, [eta], grid_only_probe=True)
        print(f"eta={eta}: {rep.instances} sets, status {rep.status}, worst {rep.worst}, "
              f"whole-cell-only failures {rep.details['grid_only_failures']}")


if __name__ == "__main__":
    main()
