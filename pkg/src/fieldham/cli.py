"""Command-line front end.

Every subcommand reads a field file (see :mod:`fieldham.io`), writes a
deterministic CSV or representation file with ``--out`` and prints a short
summary. Exit codes: 0 success, 2 parse or argument error, 3 representation
obstruction, 4 gauge or coordinate degeneracy, 5 numerical instability.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

import numpy as np

from .core.angles import TWO_PI
from .core.bessel import bessel_j
from .core.domains import Annulus
from .core.grids import default_fibre_grid
from .errors import FieldhamError, InvalidArgumentError, ParseError, PreconditionError, RepresentationFailureError
from .fields.diagnostics import divergence_residual, find_transverse_angle, tangency_residual
from .fields.isotopy import RadialTwistIsotopy
from .fields.spec import LundquistField, SuspensionField, adapt_angle
from .io import FieldFile, load_field_file, with_overrides, write_representation, write_result

EXIT_OK = 0
EXIT_PARSE = 2


def _kebab(name: str) -> str:
    name = re.sub(r"Error$", "", name)
    return re.sub(r"(?<!^)(?=[A-Z])", "-", name).lower()


def _angle_arg(text: str) -> tuple[int, int]:
    try:
        m, n = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'm,n', got {text!r}") from None
    return m, n


def _grid_arg(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(v) for v in re.split(r"[x,]", text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'NRxNTHETAxNT', got {text!r}") from None
    if len(dims) not in (2, 3) or min(dims) < 1:
        raise argparse.ArgumentTypeError(f"expected two or three positive sizes, got {text!r}")
    return dims


def _load(args) -> FieldFile:
    ff = load_field_file(args.field)
    grid = getattr(args, "grid", None)
    over = dict(
        rtol=getattr(args, "rtol", None),
        atol=getattr(args, "atol", None),
        s_steps=getattr(args, "s_steps", None),
        reference_angle=getattr(args, "reference_angle", None),
        angle=getattr(args, "angle", None),
    )
    if grid is not None:
        over.update(nr=grid[0], ntheta=grid[1])
        if len(grid) == 3:
            over["nt"] = grid[2]
    return with_overrides(ff, **over)


def _transverse(ff: FieldFile) -> tuple[int, int]:
    if ff.numerics.angle is not None:
        return ff.numerics.angle
    found = find_transverse_angle(ff.spec)
    return (found.m, found.n)


def _seeds(ff: FieldFile, text: str | None, default: int) -> np.ndarray:
    """Seeds from a count (points on the ray ``theta = 0``) or a CSV file of ``x,y`` rows."""
    text = str(default) if text is None else text
    if re.fullmatch(r"\d+", text):
        n = int(text)
        dom = ff.spec.domain
        lo, hi = (dom.r0, dom.r1) if isinstance(dom, Annulus) else (0.0, dom.R)
        r = lo + (hi - lo) * (np.arange(n) + 1.0) / (n + 1.0)
        return np.column_stack([r, np.zeros(n)])
    path = Path(text)
    try:
        rows = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read seed file {text!r}: {exc.strerror}") from None
    if rows and rows[0].replace(" ", "").lower() == "x,y":
        rows = rows[1:]
    try:
        pts = np.array([[float(v) for v in ln.split(",")] for ln in rows], dtype=float)
    except ValueError:
        raise ParseError(f"seed file {text!r} must hold x,y rows") from None
    return pts.reshape(-1, 2)


def _out(args, default: str) -> Path:
    return Path(args.out) if args.out else Path(default)


# -- subcommands ---------------------------------------------------------------


def cmd_verify(args) -> int:
    ff = _load(args)
    spec = ff.spec
    thr = ff.numerics.thresholds
    div = divergence_residual(spec, 16, default_fibre_grid(spec.domain, 64))
    tang = tangency_residual(spec)
    print(f"divergence residual: {div:.3e}")
    print(f"tangency residual:   {tang:.3e}")
    ok = div <= thr.divergence and tang <= thr.tangency
    try:
        angle = _transverse(ff)
        print(f"transverse angle:    ({angle[0]},{angle[1]})")
    except FieldhamError as exc:
        print(f"transverse angle:    none ({exc})")
        angle = None
        ok = False
    if angle is not None:
        from .moser import flux

        report = flux(spec, TWO_PI * np.arange(16) / 16, angle=angle)
        print(f"flux:                {report.values[0]:.12g} (relative deviation {report.relative_deviation:.3e})")
        ok = ok and report.relative_deviation <= thr.flux
    if tang > thr.tangency:
        raise PreconditionError(f"the field is not tangential to the boundary (max |B.n| = {tang:.3g})", witness=tang)
    print("preconditions:       " + ("pass" if ok else "fail"))
    return EXIT_OK if ok else 3


def cmd_poincare(args) -> int:
    from .tracer import section_orbits

    ff = _load(args)
    angle = _transverse(ff)
    seeds = _seeds(ff, args.seeds, 8)
    level = ff.numerics.reference_angle
    rows = []
    if args.transits > 0:
        table = section_orbits(ff.spec, angle, level, seeds, args.transits, ff.numerics.rtol, ff.numerics.atol)
        tau = np.diff(np.concatenate([np.zeros((len(seeds), 1)), table.s], axis=1), axis=1)
        for i in range(len(seeds)):
            for k in range(args.transits):
                rows.append((i, k, table.t[i, k], table.x[i, k], table.y[i, k], table.s[i, k], tau[i, k]))
    columns = ("seed_id", "crossing_index", "t", "x", "y", "s", "tau")
    meta = {"angle": f"{angle[0]},{angle[1]}", "level": level, "rtol": ff.numerics.rtol, "atol": ff.numerics.atol}
    out = _out(args, "poincare.csv")
    write_result(out, "poincare", columns, rows, ff.sha256, meta)
    print(f"wrote {len(rows)} crossings to {out}")
    return EXIT_OK


def _analytic_iota(ff: FieldFile, x: float, y: float) -> float:
    spec = ff.spec
    r = float(np.hypot(x, y))
    if isinstance(spec, LundquistField):
        j0 = float(bessel_j(0, r))
        return -float(bessel_j(1, r)) / (r * j0) if j0 != 0 else np.inf
    if isinstance(spec, SuspensionField) and isinstance(spec.isotopy, RadialTwistIsotopy):
        return float(spec.isotopy.rate(np.array(r)))
    return np.nan


def cmd_iota(args) -> int:
    from .tracer import rotational_transform

    ff = _load(args)
    seeds = _seeds(ff, args.seeds, 5)
    rows = []
    t0 = ff.numerics.reference_angle
    for i, (x, y) in enumerate(seeds):
        w = rotational_transform(ff.spec, (1, 0), (0, 1), (t0, x, y), args.transits, ff.numerics.rtol, ff.numerics.atol)
        rows.append((i, x, y, float(np.hypot(x, y)), w.value, _analytic_iota(ff, x, y), int(w.diverged)))
    columns = ("seed_id", "x", "y", "r", "iota", "analytic", "diverged")
    out = _out(args, "iota.csv")
    write_result(out, "iota", columns, rows, ff.sha256, {"transits": args.transits})
    for row in rows:
        print(f"seed {row[0]}: r = {row[3]:.10g}  iota = {row[4]:.12g}  analytic = {row[5]:.12g}")
    return EXIT_OK


def cmd_flux(args) -> int:
    from .moser import flux

    ff = _load(args)
    angle = _transverse(ff)
    nt = ff.numerics.nt
    angles = ff.numerics.reference_angle + TWO_PI * np.arange(nt) / nt
    report = flux(ff.spec, angles, angle=angle, n=max(ff.numerics.nr, ff.numerics.ntheta))
    out = _out(args, "flux.csv")
    meta = {"angle": f"{angle[0]},{angle[1]}", "relative_deviation": report.relative_deviation}
    write_result(out, "flux", ("t", "flux"), zip(report.angles, report.values), ff.sha256, meta)
    print(f"flux relative deviation over {nt} angles: {report.relative_deviation:.3e}")
    if report.relative_deviation > ff.numerics.thresholds.flux:
        from .errors import CohomologyObstructionError

        raise CohomologyObstructionError(
            f"flux varies across the angle slices (relative deviation {report.relative_deviation:.3g})",
            integral=report.deviation,
        )
    return EXIT_OK


def cmd_clebsch(args) -> int:
    from .clebsch import local_flux_coordinates, sample_chart, weyl_potential

    ff = _load(args)
    num = ff.numerics
    out = _out(args, f"clebsch-{args.mode}.csv")
    if args.mode == "weyl":
        pair = weyl_potential(ff.spec, num.nr, num.ntheta, min(num.nt, 8), rtol=num.rtol)
        c = pair.coords
        columns = ("t", "r", "theta", "x", "y", "P", "H")
        arrays = [c["t"], c["r"], c["theta"], c["x"], c["y"], pair.P, pair.H]
    else:
        spec = adapt_angle(ff.spec, num.angle) if num.angle is not None else ff.spec
        kind = "polar" if isinstance(spec.domain, Annulus) and args.chart == "polar" else "cartesian"
        u1, u2, u3, dens, chart = sample_chart(spec, kind, num.nx, min(num.nt + 1, 33))
        pair = local_flux_coordinates(u1, u2, u3, dens, u2[0], u3[0], chart=chart)
        U1, U2, U3 = np.meshgrid(u1, u2, u3, indexing="ij")
        columns = ("u1", "u2", "u3", "P", "H")
        arrays = [U1, U2, U3, pair.P, pair.H]
    rows = zip(*(np.ravel(a) for a in arrays))
    meta = {"chart": pair.chart, "residual": pair.residual, "rtol": num.rtol}
    write_result(out, f"clebsch-{args.mode}", columns, rows, ff.sha256, meta)
    print(f"{pair.chart}: d alpha - beta residual {pair.residual:.3e}")
    return EXIT_OK


def _representation(ff: FieldFile):
    from .moser import hamiltonian_representation

    num = ff.numerics
    thr = num.thresholds
    return hamiltonian_representation(
        ff.spec,
        _transverse(ff),
        num.nr,
        num.ntheta,
        num.nt,
        num.reference_angle,
        num.s_steps,
        flux_rtol=thr.flux,
        strict=False,
        period_tol=thr.period,
    )


def _check_residuals(ff: FieldFile, res: dict) -> None:
    thr = ff.numerics.thresholds
    limits = {
        "pullback": thr.pullback,
        "closedness": thr.nu,
        "dirichlet": thr.nu,
        "period": thr.period,
        "decomposition": thr.decomposition,
    }
    for key, limit in limits.items():
        if res[key] >= limit:
            raise RepresentationFailureError(f"{key} residual {res[key]:.3g} exceeds {limit:g}", value=res[key])


def cmd_moser(args) -> int:
    ff = _load(args)
    rep = _representation(ff)
    out = _out(args, "hamiltonian.rep")
    write_representation(out, rep, ff.sha256)
    for key in sorted(rep.residuals):
        print(f"{key:18s} {rep.residuals[key]:.3e}")
    _check_residuals(ff, rep.residuals)
    return EXIT_OK


def cmd_suspend(args) -> int:
    from .tracer import return_map

    ff = _load(args)
    seeds = _seeds(ff, args.seeds, 32)
    level = ff.numerics.reference_angle
    sm = return_map(ff.spec, (0, 1), level, seeds, ff.numerics.rtol, ff.numerics.atol)
    spec = ff.spec
    if isinstance(spec, SuspensionField):
        ex, ey = spec.isotopy.map(TWO_PI, seeds[:, 0], seeds[:, 1])
    else:
        ex = ey = np.full(len(seeds), np.nan)
    err = np.hypot(sm.x_out[:, 0] - ex, sm.x_out[:, 1] - ey)
    rows = [(i, *seeds[i], *sm.x_out[i], ex[i], ey[i], err[i], sm.tau[i]) for i in range(len(seeds))]
    columns = ("seed_id", "x", "y", "fx", "fy", "exact_fx", "exact_fy", "error", "tau")
    out = _out(args, "monodromy.csv")
    write_result(out, "monodromy", columns, rows, ff.sha256, {"level": level, "delta": sm.delta})
    print(f"return map on {len(seeds)} seeds: max error {np.nanmax(err) if np.isfinite(err).any() else float('nan'):.3e}, min tau {sm.delta:.12g}")
    return EXIT_OK


def cmd_compare(args) -> int:
    from .hamiltonian import compare_dynamics

    ff = _load(args)
    rep = _representation(ff)
    _check_residuals(ff, rep.residuals)
    seeds = _seeds(ff, args.seeds, 16)
    cmp = compare_dynamics(ff.spec, rep, seeds, args.transits, ff.numerics.rtol, ff.numerics.atol)
    d = cmp.distance
    rows = [
        (i, k, *cmp.route_a[i, k], *cmp.route_b[i, k], d[i, k]) for i in range(len(seeds)) for k in range(args.transits)
    ]
    columns = ("seed", "transit", "a_x", "a_y", "b_x", "b_y", "distance")
    out = _out(args, "compare.csv")
    write_result(out, "compare", columns, rows, ff.sha256, {"max_discrepancy": cmp.max_discrepancy})
    print(f"max crossing discrepancy over {args.transits} transits: {cmp.max_discrepancy:.3e}")
    if cmp.max_discrepancy > ff.numerics.thresholds.dynamics:
        raise RepresentationFailureError(
            f"crossing discrepancy {cmp.max_discrepancy:.3g} exceeds {ff.numerics.thresholds.dynamics:g}",
            value=cmp.max_discrepancy,
        )
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fieldham", description="Hamiltonian description of transverse magnetic fields.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, seeds=False, transits=None, grid=False, out=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("field", help="field file (TOML)")
        if out:
            p.add_argument("--out", help="output path")
        if seeds:
            p.add_argument("--seeds", help="number of seeds on theta = 0, or a CSV file of x,y rows")
        if transits is not None:
            p.add_argument("--transits", type=int, default=transits, help=f"number of transits (default {transits})")
        if grid:
            p.add_argument("--grid", type=_grid_arg, help="fibre and angle grid, e.g. 64x64x32")
            p.add_argument("--s-steps", dest="s_steps", type=int, help="RK4 steps of the Moser flow")
        p.add_argument("--rtol", type=float, help="relative tolerance of the integrator")
        p.add_argument("--atol", type=float, help="absolute tolerance of the integrator")
        p.add_argument("--reference-angle", dest="reference_angle", type=float, help="section level / reference angle")
        p.add_argument("--angle", type=_angle_arg, help="transverse angle m,n")
        p.set_defaults(func=func)
        return p

    add("verify", cmd_verify, "check divergence, tangency, transversality and flux", out=False)
    add("poincare", cmd_poincare, "section crossings of field lines", seeds=True, transits=100)
    add("iota", cmd_iota, "rotational transform per seed", seeds=True, transits=100)
    add("flux", cmd_flux, "flux through the angle slices", grid=True)
    p = add("clebsch", cmd_clebsch, "Clebsch potentials in local or Weyl gauge", grid=True)
    p.add_argument("--mode", choices=("local", "weyl"), default="weyl")
    p.add_argument("--chart", choices=("cartesian", "polar"), default="cartesian")
    add("moser", cmd_moser, "Hamiltonian representation via the fibrewise Moser trick", grid=True)
    add("suspend", cmd_suspend, "return map of the section phi = level", seeds=True)
    add("compare", cmd_compare, "field-line crossings against Hamiltonian orbits", seeds=True, transits=20, grid=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error [parse]: {exc}", file=sys.stderr)
        return exc.exit_code
    except FieldhamError as exc:
        stage = getattr(exc, "stage", None) or _kebab(type(exc).__name__)
        print(f"error [{stage}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
