"""Command-line front end: sweeps, figure tables and machine-readable output.

Exit codes: 0 success, 1 I/O failure, 2 argument error, 3 numerical
non-convergence (rows are still written, flagged converged=false).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import partial

import numpy as np

from . import __version__
from .entangle import N_MAX, ep
from .errors import ConsistencyError, ConvergenceError, DomainError, EvaluationError
from .fitmodel import DEFAULT_INIT, fit_nc_vs_ng
from .gaussianity import covariance, eta_ng
from .metrology import fisher
from .model import DMParams, potential_physical, psi0
from .specfun import SpecFunOptions
from .wigner import NU_TOL, NU_TOL_FAST, negativity, wigner_grid

NUMERIC_FAILURES = (ConvergenceError, ConsistencyError, EvaluationError, FloatingPointError)

HEADERS = {
    "potential": "x0,alpha,A,x,V",
    "ground-state": "x0,alpha,A,x,y,psi0,density_y,density_x",
    "nongauss": "x0,alpha,A,bistable,xx,pp,det_sigma,eta_ng,converged",
    "negativity": "x0,alpha,A,nu,eta_nc,error_estimate,converged",
    "wigner-grid": "x,p,W0",
    "ep": "x0,alpha,A,N,leaked_mass,entropy_nats,converged",
    "qfi": "x0,alpha,A,qfi_closed,qfi_numeric,cfi_position,crb,converged",
    "fit": "a,b,c,residual_rms,iterations,converged",
    "nc_vs_ng": "x0,alpha,A,eta_ng,eta_nc,converged",
}

DEFAULT_ALPHA_MAX = 5.0
DEFAULT_STEPS = 30
REPORT_X0 = (1.0, 2.0, 3.0)
FIG1_ALPHAS = (0.5, math.log(2.0), 1.0, 1.5, 2.0, 3.0)
FIG2_ALPHAS = (1.0, 2.0, 3.0, 5.0)
WIGNER_POINT = (1.0, 5.0)  # (x0, alpha)


@dataclass(frozen=True)
class Settings:
    opts: SpecFunOptions
    nu_tol: float
    fock_max: int


@dataclass(frozen=True)
class SweepSpec:
    alpha_min: float | None
    alpha_max: float
    steps: int
    x0_list: tuple
    tolerances: SpecFunOptions
    fock_max: int

    def __post_init__(self):
        if self.steps < 2:
            raise DomainError("steps must be >= 2")
        if self.alpha_min is not None and not 0 < self.alpha_min < self.alpha_max:
            raise DomainError("need 0 < alpha_min < alpha_max")

    def alphas(self, x0):
        """alpha grid for one x0; the default starts at the bistability threshold A = 1."""
        lo = self.alpha_min if self.alpha_min is not None else math.log(2.0) / x0
        if not lo < self.alpha_max:
            raise DomainError(f"alpha_max={self.alpha_max} is below the grid start {lo} for x0={x0}")
        return [float(a) for a in np.linspace(lo, self.alpha_max, self.steps)]


# ---- per-point rows (module level so worker processes can import them)

def _base(x0, alpha):
    p = DMParams(alpha, x0)
    return p, {"x0": x0, "alpha": alpha, "A": p.A}


def nongauss_row(x0, alpha, s: Settings):
    p, row = _base(x0, alpha)
    row["bistable"] = p.bistable
    try:
        cov = covariance(p, s.opts)
        row.update(xx=cov.xx, pp=cov.pp, det_sigma=cov.det, eta_ng=eta_ng(p, s.opts), converged=True)
    except NUMERIC_FAILURES:
        row.update(xx=math.nan, pp=math.nan, det_sigma=math.nan, eta_ng=math.nan, converged=False)
    return row


def negativity_row(x0, alpha, s: Settings):
    p, row = _base(x0, alpha)
    try:
        r = negativity(p, s.opts, tol=s.nu_tol)
    except ConvergenceError as exc:
        r = exc.best
    except NUMERIC_FAILURES:
        r = None
    if r is None:
        row.update(nu=math.nan, eta_nc=math.nan, error_estimate=math.nan, converged=False)
    else:
        row.update(nu=r.nu, eta_nc=r.eta_nc, error_estimate=r.error_estimate, converged=r.converged)
    return row


def ep_row(x0, alpha, s: Settings):
    p, row = _base(x0, alpha)
    try:
        r = ep(p, s.fock_max, s.opts, N_max=max(N_MAX, s.fock_max))
        row.update(N=r.N, leaked_mass=r.leaked_mass, entropy_nats=r.entropy, converged=r.converged)
    except NUMERIC_FAILURES:
        row.update(N=s.fock_max, leaked_mass=math.nan, entropy_nats=math.nan, converged=False)
    return row


def qfi_row(x0, alpha, s: Settings):
    p, row = _base(x0, alpha)
    try:
        r = fisher(p, s.opts)
        row.update(qfi_closed=r.qfi_closed, qfi_numeric=r.qfi_numeric, cfi_position=r.cfi_position,
                   crb=r.crb, converged=r.saturated)
    except NUMERIC_FAILURES:
        row.update(qfi_closed=math.nan, qfi_numeric=math.nan, cfi_position=math.nan,
                   crb=math.nan, converged=False)
    return row


def nc_vs_ng_row(x0, alpha, s: Settings):
    ng = nongauss_row(x0, alpha, s)
    nc = negativity_row(x0, alpha, s)
    return {"x0": x0, "alpha": alpha, "A": ng["A"], "eta_ng": ng["eta_ng"], "eta_nc": nc["eta_nc"],
            "converged": ng["converged"] and nc["converged"]}


ROWS = {"nongauss": nongauss_row, "negativity": negativity_row, "ep": ep_row, "qfi": qfi_row,
        "nc_vs_ng": nc_vs_ng_row}


def _call(fn, s, point):
    return fn(point[0], point[1], s)


def evaluate(fn, points, s: Settings, jobs: int = 1):
    """Rows for each (x0, alpha) in the given order, computed on up to ``jobs`` processes."""
    work = partial(_call, fn, s)
    if jobs <= 1 or len(points) <= 1:
        return [work(pt) for pt in points]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(work, points))


def potential_rows(x0_list, alphas, xs, D=1.0):
    rows = []
    for x0 in x0_list:
        for alpha in alphas:
            p, base = _base(x0, alpha)
            V = potential_physical(xs, D, p)
            rows.extend(dict(base, x=float(x), V=float(v)) for x, v in zip(xs, V))
    return rows


def ground_state_rows(x0_list, alphas, xs, opts):
    rows = []
    for x0 in x0_list:
        for alpha in alphas:
            p, base = _base(x0, alpha)
            y = 0.5 * alpha * np.asarray(xs)
            psi = psi0(y, p, opts)
            for x, yy, v in zip(xs, y, psi):
                rows.append(dict(base, x=float(x), y=float(yy), psi0=float(v), density_y=float(v * v),
                                 density_x=float(0.5 * alpha * v * v)))
    return rows


def wigner_rows(x0, alpha, xs, ps, opts):
    W = wigner_grid(xs, ps, DMParams(alpha, x0), opts)
    return [{"x": float(x), "p": float(p), "W0": float(W[i, j])}
            for i, x in enumerate(xs) for j, p in enumerate(ps)]


# ---- serialization

def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def to_csv(rows, header: str) -> str:
    cols = header.split(",")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([fmt(r[c]) for c in cols])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# ---- argument handling

def _floats(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals or not all(math.isfinite(v) and v > 0 for v in vals):
        raise argparse.ArgumentTypeError(f"values must be positive and finite, got {text!r}")
    return vals


def _positive(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _even(text):
    n = int(text)
    if n < 2 or n % 2:
        raise argparse.ArgumentTypeError(f"expected an even integer >= 2, got {text!r}")
    return n


def _default_jobs():
    try:
        return max(1, int(os.environ.get("DMORSE_JOBS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=_floats, help="alpha value(s), comma-separated")
    common.add_argument("--x0", type=_floats,
                        help="well separation(s), comma-separated (default 1; report and fit: 1,2,3)")
    common.add_argument("--alpha-min", type=_positive, help="sweep start (default: the x0 threshold A = 1)")
    common.add_argument("--alpha-max", type=_positive, default=DEFAULT_ALPHA_MAX)
    common.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    common.add_argument("--tol", type=_positive, default=1e-8, help="relative tolerance of the Bessel kernels")
    common.add_argument("--nu-tol", type=_positive, help=f"absolute tolerance on nu (default {NU_TOL:g})")
    common.add_argument("--fock-max", type=_even, default=64, help="initial Fock truncation, auto-doubled")
    common.add_argument("--format", choices=("csv", "json"),
                        help="output format (default: json for one point, csv otherwise)")
    common.add_argument("--out", help="output file (report: directory); default stdout")
    common.add_argument("--jobs", type=int, default=_default_jobs(), help="worker processes (env DMORSE_JOBS)")
    common.add_argument("--fast", action="store_true", help=f"sweep-grade nu tolerance {NU_TOL_FAST:g}")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid-min", type=float, default=-2.0)
    grid.add_argument("--grid-max", type=float, default=2.0)
    grid.add_argument("--points", type=int, default=81)

    parser = argparse.ArgumentParser(prog="dmorse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dmorse {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    p = sub.add_parser("potential", parents=[common, grid], help="V(x) = D (A cosh(alpha x) - 1)^2")
    p.add_argument("--D", type=_positive, default=1.0)
    sub.add_parser("ground-state", parents=[common, grid], help="psi0 and its densities in y and x")
    sub.add_parser("nongauss", parents=[common], help="covariance matrix and eta_NG")
    p = sub.add_parser("wigner-grid", parents=[common, grid], help="W0 on an (x, p) grid (x is y-coordinate)")
    p.add_argument("--p-max", type=_positive, default=6.0)
    p.add_argument("--p-points", type=int, default=81)
    sub.add_parser("negativity", parents=[common], help="Wigner negativity nu and eta_NC")
    p = sub.add_parser("ep", parents=[common], help="entanglement potential (nats)")
    p.add_argument("--bits", action="store_true", help="append an entropy_bits column")
    sub.add_parser("qfi", parents=[common], help="QFI, position CFI and Cramer-Rao bound")
    p = sub.add_parser("fit", parents=[common], help="fit eta_NC = a + b eta_NG + eta_NG^c")
    p.add_argument("--input", help="CSV with eta_ng and eta_nc columns (default: run the sweep)")
    p.add_argument("--init", type=lambda t: tuple(float(v) for v in t.split(",")), default=DEFAULT_INIT)
    sub.add_parser("report", parents=[common], help="all figure tables, PNGs and manifest.json into --out")
    return parser


def settings_from(args) -> Settings:
    nu_tol = args.nu_tol if args.nu_tol is not None else (NU_TOL_FAST if args.fast else NU_TOL)
    return Settings(SpecFunOptions(rel_tol=args.tol), nu_tol, args.fock_max)


def spec_from(args) -> SweepSpec:
    if args.x0 is None:
        args.x0 = list(REPORT_X0) if args.command in ("report", "fit") else [1.0]
    return SweepSpec(args.alpha_min, args.alpha_max, args.steps, tuple(args.x0),
                     SpecFunOptions(rel_tol=args.tol), args.fock_max)


def points_from(args, spec: SweepSpec):
    """(x0, alpha) pairs, x0 outer and alpha ascending."""
    pts = []
    for x0 in spec.x0_list:
        alphas = sorted(args.alpha) if args.alpha else spec.alphas(x0)
        pts.extend((x0, a) for a in alphas)
    return pts


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _render(rows, header, args, single):
    fmt_ = args.format or ("json" if single else "csv")
    if fmt_ == "json":
        cols = header.split(",")
        recs = [{c: r[c] for c in cols} for r in rows]
        return to_json(recs[0] if single and len(recs) == 1 else recs)
    return to_csv(rows, header)


# ---- report

def report(spec: SweepSpec, out_dir, s: Settings, jobs: int = 1, log=None) -> dict:
    """Write the eight figure tables, PNGs and manifest.json; returns the manifest."""
    t0 = time.perf_counter()
    os.makedirs(out_dir, exist_ok=True)
    pts = [(x0, a) for x0 in spec.x0_list for a in spec.alphas(x0)]
    xs = np.linspace(-2.0, 2.0, 161)
    wx0, walpha = WIGNER_POINT
    wxs = np.linspace(-2.0, 2.0, 81)
    wps = np.linspace(-6.0, 6.0, 121)

    def note(msg):
        if log:
            log(msg)

    tables = {}
    tables["fig1_potential"] = potential_rows([1.0], FIG1_ALPHAS, xs)
    tables["fig2_density"] = ground_state_rows([1.0], FIG2_ALPHAS, xs, s.opts)
    note("non-Gaussianity")
    tables["fig_ng"] = evaluate(nongauss_row, pts, s, jobs)
    tables["fig5_2_wigner"] = wigner_rows(wx0, walpha, wxs, wps, s.opts)
    note("negativity")
    tables["fig5_3_nc"] = evaluate(negativity_row, pts, s, jobs)
    tables["fig_nc_vs_ng"] = [
        {"x0": g["x0"], "alpha": g["alpha"], "A": g["A"], "eta_ng": g["eta_ng"], "eta_nc": n["eta_nc"],
         "converged": g["converged"] and n["converged"]}
        for g, n in zip(tables["fig_ng"], tables["fig5_3_nc"])]
    note("entanglement potential")
    tables["fig_ep"] = evaluate(ep_row, pts, s, jobs)
    note("Fisher information")
    tables["fig6_qfi"] = evaluate(qfi_row, pts, s, jobs)

    headers = {"fig1_potential": HEADERS["potential"], "fig2_density": HEADERS["ground-state"],
               "fig_ng": HEADERS["nongauss"], "fig5_2_wigner": HEADERS["wigner-grid"],
               "fig5_3_nc": HEADERS["negativity"], "fig_nc_vs_ng": HEADERS["nc_vs_ng"],
               "fig_ep": HEADERS["ep"], "fig6_qfi": HEADERS["qfi"]}
    files = {}
    for name, header in headers.items():
        fname = f"{name}.csv"
        with open(os.path.join(out_dir, fname), "w") as fh:
            fh.write(to_csv(tables[name], header))
        files[name] = fname

    good = [(r["eta_ng"], r["eta_nc"]) for r in tables["fig_nc_vs_ng"] if r["converged"]]
    try:
        fit = asdict(fit_nc_vs_ng(good))
    except (DomainError, ConvergenceError) as exc:
        fit = {"error": str(exc)}

    baseline = DMParams.from_A(1.0)
    tables["fig_ng_baseline"] = eta_ng(baseline, s.opts)
    tables["fig5_3_baseline"] = negativity(baseline, s.opts, tol=s.nu_tol).eta_nc
    pngs = []
    try:
        from .figures import render
        pngs = render(out_dir, tables, {"x0": wx0, "alpha": walpha})
    except ImportError as exc:  # pragma: no cover - matplotlib missing
        note(f"figures skipped: {exc}")

    all_rows = [r for k in ("fig_ng", "fig5_3_nc", "fig_ep", "fig6_qfi") for r in tables[k]]
    manifest = {
        "tool": "dmorse",
        "version": __version__,
        "parameters": {
            "x0": list(spec.x0_list), "alpha_min": spec.alpha_min, "alpha_max": spec.alpha_max,
            "steps": spec.steps, "alpha_grid": "linspace(ln2/x0, alpha_max, steps)" if spec.alpha_min is None
            else "linspace(alpha_min, alpha_max, steps)",
            "fig1_alphas": list(FIG1_ALPHAS), "fig2_alphas": list(FIG2_ALPHAS),
            "wigner_point": {"x0": wx0, "alpha": walpha}, "fock_start": s.fock_max,
            "fock_basis": "unit-frequency Hermite functions in y",
        },
        "tolerances": {"rel_tol": s.opts.rel_tol, "abs_tol": s.opts.abs_tol, "nu_tol": s.nu_tol},
        "files": files,
        "figures": pngs,
        "columns": {
            "fig1_potential": "V/D against x for each alpha at x0=1",
            "fig2_density": "density_x against x for each alpha at x0=1",
            "fig_ng": "eta_ng against alpha, one curve per x0",
            "fig5_2_wigner": "W0 over (x, p)",
            "fig5_3_nc": "eta_nc against alpha, one curve per x0",
            "fig_nc_vs_ng": "eta_nc against eta_ng",
            "fig_ep": "entropy_nats against alpha, one curve per x0",
            "fig6_qfi": "qfi_closed against alpha, one curve per x0",
        },
        "fit": fit,
        "all_converged": all(r["converged"] for r in all_rows),
        "wall_clock_s": time.perf_counter() - t0,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        fh.write(to_json(manifest))
    return manifest


# ---- entry points

def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING, format="dmorse: %(message)s")
    try:
        spec = spec_from(args)
        s = settings_from(args)
        if args.jobs < 1:
            raise DomainError("--jobs must be >= 1")
    except DomainError as exc:
        parser.print_usage(sys.stderr)
        print(f"dmorse: error: {exc}", file=sys.stderr)
        return 2
    try:
        return _dispatch(args, spec, s, parser)
    except DomainError as exc:
        print(f"dmorse: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"dmorse: I/O error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args, spec, s, parser) -> int:
    cmd = args.command
    if cmd == "report":
        if not args.out:
            raise DomainError("report needs --out DIRECTORY")
        m = report(spec, args.out, s, args.jobs, log=lambda msg: print(f"dmorse: {msg}", file=sys.stderr))
        return 0 if m["all_converged"] else 3

    if cmd in ("potential", "ground-state"):
        if args.points < 2:
            raise DomainError("--points must be >= 2")
        alphas = sorted(args.alpha) if args.alpha else (FIG1_ALPHAS if cmd == "potential" else FIG2_ALPHAS)
        xs = np.linspace(args.grid_min, args.grid_max, args.points)
        if cmd == "potential":
            rows = potential_rows(spec.x0_list, alphas, xs, args.D)
        else:
            rows = ground_state_rows(spec.x0_list, alphas, xs, s.opts)
        _emit(_render(rows, HEADERS[cmd], args, False), args.out)
        return 0

    if cmd == "wigner-grid":
        if not args.alpha or len(args.alpha) != 1 or len(args.x0) != 1:
            raise DomainError("wigner-grid needs a single --alpha and a single --x0")
        if args.points < 2 or args.p_points < 2:
            raise DomainError("--points and --p-points must be >= 2")
        xs = np.linspace(args.grid_min, args.grid_max, args.points)
        ps = np.linspace(-args.p_max, args.p_max, args.p_points)
        rows = wigner_rows(args.x0[0], args.alpha[0], xs, ps, s.opts)
        _emit(_render(rows, HEADERS[cmd], args, False), args.out)
        return 0

    if cmd == "fit":
        if args.input:
            rows = read_csv(args.input)
            try:
                pts = [(float(r["eta_ng"]), float(r["eta_nc"])) for r in rows
                       if r.get("converged", "true") == "true"]
            except KeyError as exc:
                raise DomainError(f"input CSV lacks column {exc}")
            except ValueError as exc:
                raise DomainError(f"input CSV has a non-numeric cell: {exc}")
        else:
            rows = evaluate(nc_vs_ng_row, points_from(args, spec), s, args.jobs)
            pts = [(r["eta_ng"], r["eta_nc"]) for r in rows if r["converged"]]
        try:
            res = fit_nc_vs_ng(pts, args.init)
            row, code = asdict(res), 0 if res.converged else 3
        except ConvergenceError as exc:
            a, b, c = exc.best
            row = {"a": a, "b": b, "c": c, "residual_rms": math.nan, "iterations": 0, "converged": False}
            code = 3
        _emit(_render([row], HEADERS["fit"], args, False), args.out)
        return code

    pts = points_from(args, spec)
    rows = evaluate(ROWS[cmd], pts, s, args.jobs)
    header = HEADERS[cmd]
    if cmd == "ep" and args.bits:
        header += ",entropy_bits"
        for r in rows:
            r["entropy_bits"] = r["entropy_nats"] / math.log(2.0)
    _emit(_render(rows, header, args, len(pts) == 1), args.out)
    return 0 if all(r["converged"] for r in rows) else 3


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
