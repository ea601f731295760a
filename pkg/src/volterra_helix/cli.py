"""Command-line entry point and report serialization.

Every command emits one report: a JSON object with the keys ``spec``,
``regime``, ``rho_lower``, ``rho_upper``, ``values``, ``errors`` and
``provenance``, or a CSV table. ``simulate`` always writes CSV with the grid
times as header and one row per path; ``verify`` prints one line per
acceptance criterion.

Exit codes: 0 success, 1 validation or usage error, 2 numerical failure,
3 acceptance failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Optional

from . import acceptance
from .analyze import (
    MONTE_CARLO,
    QUADRATURE,
    MCConfig,
    IncrementTable,
    default_h_max,
    exponent_report,
    scan_increments,
)
from .errors import DomainError, NumericalError, ValidationError
from .moments import (
    covariance,
    incremental_variance,
    mandelbrot_constant,
    mandelbrot_constant_numeric,
    variance,
)
from .numerics import DEFAULT_TOL
from .processes import Interval, ProcessSpec, make_process
from .simulate import TimeGrid, sample_paths
from .theory import classify_regime

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_ACCEPTANCE = 3

TOL_MIN, TOL_MAX = 1e-14, 1e-4


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialization


def format_number(x: float) -> str:
    """17 significant digits; integral values keep a trailing ``.0`` so they
    re-parse as floats."""
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    text = "%.17g" % x
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def _emit(obj: Any, indent: int, out: list) -> None:
    pad = "  " * indent
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_number(obj) if math.isfinite(obj) else "null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for k, (key, value) in enumerate(obj.items()):
            out.append(f"{pad}  {json.dumps(str(key), ensure_ascii=False)}: ")
            _emit(value, indent + 1, out)
            out.append(",\n" if k < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for k, value in enumerate(obj):
            out.append(pad + "  ")
            _emit(value, indent + 1, out)
            out.append(",\n" if k < len(obj) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj: Any) -> str:
    out: list = []
    _emit(obj, 0, out)
    out.append("\n")
    return "".join(out)


def _cell(x: Any) -> str:
    if isinstance(x, float):
        return format_number(x)
    return "" if x is None else str(x)


def dumps_csv(header: list, rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(x) for x in row])
    return buf.getvalue()


@dataclass
class Report:
    spec: Optional[dict]
    regime: Optional[str]
    rho_lower: Optional[float]
    rho_upper: Optional[float]
    values: dict
    errors: dict
    module: str
    citation: str
    # CSV view: header and rows; defaults to a two-column listing of ``values``
    table: Optional[tuple] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec,
            "regime": self.regime,
            "rho_lower": self.rho_lower,
            "rho_upper": self.rho_upper,
            "values": self.values,
            "errors": self.errors,
            "provenance": {"module": self.module, "citation": self.citation},
        }

    def to_csv(self) -> str:
        if self.table is not None:
            return dumps_csv(*self.table)
        rows = [[k, v] for k, v in self.values.items() if not isinstance(v, (dict, list))]
        return dumps_csv(["quantity", "value"], rows)


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    command: str
    spec: Optional[ProcessSpec]
    interval: Interval
    tol: float = DEFAULT_TOL
    seed: int = 0
    fmt: str = "json"
    output: Optional[str] = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if not TOL_MIN <= self.tol <= TOL_MAX:
            raise ValidationError(f"--tol must lie in [{TOL_MIN:g}, {TOL_MAX:g}], got {self.tol:g}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"--seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.fmt not in ("json", "csv"):
            raise ValidationError(f"--format must be json or csv, got {self.fmt!r}")

    def spec_dict(self) -> Optional[dict]:
        if self.spec is None:
            return None
        d = self.spec.to_dict()
        d["t1"] = self.interval.t1
        d["t2"] = self.interval.t2
        return d


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _common(p: argparse.ArgumentParser, process: bool = True) -> None:
    if process:
        p.add_argument("--kind", default="wiener", help="U1..U6, V or Wiener (case-insensitive)")
        p.add_argument("--alpha", type=float, default=0.0)
        p.add_argument("--gamma", type=float, default=0.0)
        p.add_argument("--lambda", dest="lam", type=float, default=0.0)
        p.add_argument("--t1", type=float, default=0.0)
        p.add_argument("--t2", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None, help="write the report here instead of stdout")


def _ladder_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--anchor", type=float, default=None, help="default: midpoint of [t1, t2]")
    p.add_argument("--lag-count", type=int, default=12)
    p.add_argument("--lag-ratio", type=float, default=0.5)
    p.add_argument("--h-max", type=float, default=None, help="default: 1e-2 * (t2 - t1)")
    p.add_argument("--method", choices=(QUADRATURE, MONTE_CARLO), default=QUADRATURE)
    p.add_argument("--paths", type=int, default=10_000, help="Monte Carlo paths")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="volterra-helix", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    _common(sub.add_parser("describe", help="regime and exponents from the theory table"))

    p = sub.add_parser("variance", help="E U(t)^2")
    _common(p)
    p.add_argument("--t", type=float, required=True)

    for name, helptext in (("covariance", "E U(s) U(t)"), ("incvar", "E (U(t) - U(s))^2 with breakdown")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("--s", type=float, required=True)
        p.add_argument("--t", type=float, required=True)

    p = sub.add_parser("constant", help="C(alpha) in closed form and by quadrature")
    _common(p, process=False)
    p.add_argument("--alpha", type=float, required=True)

    p = sub.add_parser("scan", help="increment norms on a geometric lag ladder")
    _common(p)
    _ladder_flags(p)

    p = sub.add_parser("fit", help="scan, fit the log-log slope and compare with theory")
    _common(p)
    _ladder_flags(p)
    p.add_argument("--exponent-tolerance", type=float, default=0.02)

    p = sub.add_parser("simulate", help="sample paths to CSV")
    _common(p)
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--points", type=int, default=8, help="uniform grid size on [t1, t2] (t1 excluded when 0)")
    p.add_argument("--grid", default=None, help="explicit comma-separated times; overrides --points")

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--only", default=None, help="comma-separated criterion numbers")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    spec = None
    interval = Interval(0.0, 1.0)
    if hasattr(args, "kind"):
        spec = make_process(args.kind, args.alpha, args.gamma, args.lam)
        interval = Interval(args.t1, args.t2)
    skip = {"command", "kind", "alpha", "gamma", "lam", "t1", "t2", "tol", "seed", "fmt", "output"}
    options = {k: v for k, v in vars(args).items() if k not in skip}
    if args.command == "constant":
        options["alpha"] = args.alpha
    return RunConfig(
        args.command,
        spec,
        interval,
        getattr(args, "tol", DEFAULT_TOL),
        getattr(args, "seed", 0),
        getattr(args, "fmt", "json"),
        getattr(args, "output", None),
        options,
    )


# ---------------------------------------------------------------------------
# commands


def _base(cfg: RunConfig, values: dict, errors: dict, module: str, citation: str, table=None) -> Report:
    rep = classify_regime(cfg.spec, cfg.interval)
    return Report(cfg.spec_dict(), rep.regime, rep.rho_lower, rep.rho_upper, values, errors, module, citation, table)


_MOMENT_CITATION = (
    "incremental variance from the kernel: J1 + J2 for zero-started kernels and the "
    "stationary-increment kernels, J4 for the two-sided component V"
)


def cmd_describe(cfg: RunConfig) -> Report:
    rep = classify_regime(cfg.spec, cfg.interval)
    values = {"requires_t1_positive": rep.requires_t1_positive}
    return Report(cfg.spec_dict(), rep.regime, rep.rho_lower, rep.rho_upper, values, {}, "theory", rep.source)


def cmd_variance(cfg: RunConfig) -> Report:
    t = cfg.options["t"]
    return _base(cfg, {"t": t, "variance": variance(cfg.spec, t, cfg.tol)}, {}, "moments", _MOMENT_CITATION)


def cmd_covariance(cfg: RunConfig) -> Report:
    s, t = cfg.options["s"], cfg.options["t"]
    values = {"s": s, "t": t, "covariance": covariance(cfg.spec, s, t, cfg.tol)}
    return _base(cfg, values, {}, "moments", "covariance by polarization of the incremental variance")


def cmd_incvar(cfg: RunConfig) -> Report:
    s, t = cfg.options["s"], cfg.options["t"]
    b = incremental_variance(cfg.spec, s, t, cfg.tol)
    values = {"s": s, "t": t, "j1": b.j1, "j2": b.j2, "j4": b.j4, "total": b.total, "method": b.method}
    return _base(cfg, values, {"quadrature": b.error_estimate}, "moments", _MOMENT_CITATION)


def cmd_constant(cfg: RunConfig) -> Report:
    a = cfg.options["alpha"]
    exact = mandelbrot_constant(a)
    numeric = mandelbrot_constant_numeric(a, cfg.tol)
    values = {"alpha": a, "analytic": exact, "numeric": numeric, "difference": numeric - exact}
    citation = "C(alpha) = Gamma(alpha+1)^2 / (Gamma(2 alpha+2) cos(pi alpha)) = int_0^inf [(1+z)^alpha - z^alpha]^2 dz + 1/(2 alpha+1)"
    return Report(None, None, None, None, values, {"abs_difference": abs(numeric - exact)}, "moments", citation)


def _table_csv(table: IncrementTable) -> tuple:
    rows = [[r["h"], r["sigma"], r["variance"], r["std_error"]] for r in table.rows()]
    return ["h", "sigma", "variance", "std_error"], rows


def _scan_args(cfg: RunConfig):
    o = cfg.options
    anchor = cfg.interval.midpoint if o["anchor"] is None else o["anchor"]
    h_max = default_h_max(cfg.interval) if o["h_max"] is None else o["h_max"]
    mc = MCConfig(o["paths"], cfg.seed)
    return anchor, h_max, mc


def cmd_scan(cfg: RunConfig) -> Report:
    o = cfg.options
    anchor, h_max, mc = _scan_args(cfg)
    table = scan_increments(cfg.spec, anchor, o["lag_count"], o["lag_ratio"], h_max, o["method"], mc, cfg.tol)
    values = {"anchor": anchor, "method": table.method, "lags": list(table.lags), "sigma": list(table.sigma)}
    errors = {"std_errors": list(table.std_errors)}
    return _base(cfg, values, errors, "analyze", "increment L2 norms ||U(s+h) - U(s)||_2 on a geometric ladder", _table_csv(table))


def cmd_fit(cfg: RunConfig) -> Report:
    o = cfg.options
    anchor, h_max, mc = _scan_args(cfg)
    rep = exponent_report(
        cfg.spec, cfg.interval, anchor, o["lag_count"], o["lag_ratio"], h_max,
        o["exponent_tolerance"], o["method"], mc, cfg.tol,
    )
    values = {
        "anchor": anchor,
        "method": rep.table.method,
        "rho_hat": rep.fit.rho_hat,
        "intercept": rep.fit.intercept,
        "r_squared": rep.fit.r_squared,
        "within_tolerance": rep.within,
        "lags": list(rep.table.lags),
        "sigma": list(rep.table.sigma),
    }
    errors = {"exponent_tolerance": o["exponent_tolerance"], "std_errors": list(rep.table.std_errors)}
    citation = "least-squares slope of log sigma on log h compared with: " + rep.regime.source
    return _base(cfg, values, errors, "analyze", citation, _table_csv(rep.table))


def _grid(cfg: RunConfig) -> TimeGrid:
    o = cfg.options
    if o["grid"]:
        try:
            pts = [float(x) for x in o["grid"].split(",") if x.strip()]
        except ValueError as exc:
            raise ValidationError(f"--grid must be comma-separated numbers: {exc}") from exc
        return TimeGrid(tuple(pts))
    n = o["points"]
    if n < 1:
        raise ValidationError(f"--points must be >= 1, got {n}")
    t1, t2 = cfg.interval.t1, cfg.interval.t2
    if t1 == 0.0:
        return TimeGrid(tuple(t2 * (k + 1) / n for k in range(n)))
    if n == 1:
        return TimeGrid((t2,))
    return TimeGrid(tuple(t1 + (t2 - t1) * k / (n - 1) for k in range(n)))


def cmd_simulate(cfg: RunConfig) -> Report:
    grid = _grid(cfg)
    ens = sample_paths(cfg.spec, grid, cfg.options["paths"], cfg.seed, cfg.tol)
    header = [format_number(t) for t in grid.points]
    values = {"n_paths": ens.n_paths, "seed": ens.seed, "jitter": ens.jitter, "factor_sha256": ens.factor_checksum}
    return _base(cfg, values, {}, "simulate", "Cholesky factor of the grid covariance applied to Philox normals",
                 (header, ens.values.tolist()))


COMMANDS = {
    "describe": cmd_describe,
    "variance": cmd_variance,
    "covariance": cmd_covariance,
    "incvar": cmd_incvar,
    "constant": cmd_constant,
    "scan": cmd_scan,
    "fit": cmd_fit,
    "simulate": cmd_simulate,
}


def _write(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _verify(args) -> int:
    only = None
    if args.only:
        try:
            only = [int(x) for x in args.only.split(",") if x.strip()]
        except ValueError as exc:
            raise ValidationError(f"--only must list criterion numbers: {exc}") from exc
    results = acceptance.run_all(only, echo=lambda line: print(line, flush=True))
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_ACCEPTANCE if failed else EXIT_OK


def run_command(argv: list) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "verify":
            return _verify(args)
        cfg = config_from_args(args)
        report = COMMANDS[cfg.command](cfg)
        if cfg.command == "simulate" or cfg.fmt == "csv":
            text = report.to_csv()
        else:
            text = dumps_json(report.to_dict())
        _write(text, cfg.output)
        return EXIT_OK
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        sys.stderr.write(str(exc))
        return EXIT_VALIDATION
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except NumericalError as exc:
        sys.stderr.write(f"numerical error: {exc}\n")
        return EXIT_NUMERICAL
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
