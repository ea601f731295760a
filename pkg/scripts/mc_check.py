"""Compare sampled increment variances with quadrature on a uniform grid."""

import argparse

from volterra_helix.moments import incremental_variance
from volterra_helix.processes import make_process
from volterra_helix.simulate import TimeGrid, empirical_incremental_variance, sample_paths


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kind", default="U2")
    ap.add_argument("--alpha", type=float, default=0.25)
    ap.add_argument("--gamma", type=float, default=0.4)
    ap.add_argument("--lambda", dest="lam", type=float, default=0.0)
    ap.add_argument("--points", type=int, default=8)
    ap.add_argument("--paths", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    spec = make_process(args.kind, args.alpha, args.gamma, args.lam)
    grid = TimeGrid.uniform(1.0, args.points)
    ens = sample_paths(spec, grid, args.paths, seed=args.seed)
    worst = 0.0
    for i in range(len(grid) - 1):
        s, t = grid.points[i], grid.points[i + 1]
        exact = incremental_variance(spec, s, t).total
        est, se = empirical_incremental_variance(ens, i, i + 1)
        z = (est - exact) / se
        worst = max(worst, abs(z))
        print(f"[{s:.4f}, {t:.4f}]  quad={exact:.6e}  mc={est:.6e}  z={z:+.2f}")
    print(f"max |z| = {worst:.2f}")


if __name__ == "__main__":
    main()
