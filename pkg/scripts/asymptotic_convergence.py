"""Ratio of the exact incremental variance to its leading small-lag term for U2."""

import argparse

from volterra_helix.analyze import asymptotic_ratio_check, scan_increments
from volterra_helix.processes import make_process


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, nargs="+", default=[-0.25, 0.0, 0.25])
    ap.add_argument("--gamma", type=float, default=0.4)
    ap.add_argument("--anchor", type=float, default=1.0)
    args = ap.parse_args()
    for a in args.alpha:
        spec = make_process("U2", a, args.gamma)
        table = scan_increments(spec, args.anchor, lag_count=7, lag_ratio=0.1, h_max=0.1)
        ratios = asymptotic_ratio_check(spec, args.anchor, table)
        print(f"alpha={a:+.2f}")
        for h, r in zip(table.lags, ratios):
            print(f"  h={h:8.1e}  ratio={r:.8f}  |ratio-1|={abs(r - 1):.2e}")


if __name__ == "__main__":
    main()
