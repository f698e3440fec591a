"""Field files (TOML), result files (CSV) and representation files.

A field file has three tables::

    [domain]            # kind = "disk" (R) or "annulus" (r0, r1)
    [field]             # preset = "lundquist" | "straight" | "toroidal"
                        # or one sub-table: suspension, gridded, perturbed
    [numerics]          # rtol, atol, s_steps, reference_angle, angle,
    [numerics.grid]     # nr, ntheta, nt (or nx, ny for Cartesian charts)
    [numerics.thresholds]

Unknown keys are rejected and every number must be finite. Result files
are CSV with a fixed first line carrying the tool version, the SHA-256 of
the inputs and the column schema; floats are written with 17 significant
digits so identical inputs give byte-identical files.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import tomli

from . import __version__
from .core.domains import Annulus, Disk, FibreDomain
from .core.grids import PolarGrid
from .errors import InvalidArgumentError, ParseError
from .fields.isotopy import dehn_twist_isotopy, rigid_rotation_isotopy, suspension_field
from .fields.spec import (
    FieldSpec,
    GriddedField,
    HelicalMode,
    LundquistField,
    PerturbedField,
    lundquist_annulus,
    straight_field,
    toroidal_field,
)

TOOL = "fieldham"
GRIDDED_COLUMNS = ("t", "x", "y", "b_phi", "b_x", "b_y")


@dataclass(frozen=True)
class Thresholds:
    """Pass/fail limits applied by the command-line checks."""

    tangency: float = 1e-8
    divergence: float = 1e-6
    flux: float = 1e-6
    pullback: float = 1e-5
    nu: float = 1e-4
    period: float = 1e-8
    decomposition: float = 1e-5
    dynamics: float = 1e-5


@dataclass(frozen=True)
class Numerics:
    rtol: float = 1e-10
    atol: float = 1e-12
    nr: int = 64
    ntheta: int = 64
    nt: int = 32
    nx: int = 65
    ny: int = 65
    s_steps: int = 64
    reference_angle: float = 0.0
    angle: tuple[int, int] | None = None
    thresholds: Thresholds = field(default_factory=Thresholds)


@dataclass(frozen=True)
class FieldFile:
    """A parsed field file: the field, its numerics and the hash of all input bytes."""

    spec: FieldSpec
    numerics: Numerics
    sha256: str
    preset: str
    path: Path | None = None


# -- parsing ---------------------------------------------------------------


def _where(message: str) -> tuple[int | None, int | None]:
    m = re.search(r"line (\d+), column (\d+)", message)
    return (int(m.group(1)), int(m.group(2))) if m else (None, None)


def _line_of(text: str, key: str) -> int | None:
    """Best-effort line number of the first ``key =`` or ``[... key]`` in the document."""
    pattern = re.compile(rf"^\s*(\[[^\]]*\b{re.escape(key)}\b[^\]]*\]|{re.escape(key)}\s*=)")
    for i, line in enumerate(text.splitlines(), start=1):
        if pattern.search(line):
            return i
    return None


class _Reader:
    def __init__(self, text: str):
        self.text = text

    def fail(self, message: str, key: str | None = None):
        line = _line_of(self.text, key) if key else None
        raise ParseError(message, line=line, column=1 if line else None)

    def table(self, data, name: str, allowed: set[str]) -> dict:
        if not isinstance(data, dict):
            self.fail(f"[{name}] must be a table", name.split(".")[-1])
        unknown = sorted(set(data) - allowed)
        if unknown:
            self.fail(f"unknown key {unknown[0]!r} in [{name}]", unknown[0])
        return data

    def number(self, data: dict, key: str, default=None, positive: bool = False) -> float:
        if key not in data:
            if default is None:
                self.fail(f"missing required key {key!r}")
            return default
        v = data[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            self.fail(f"{key!r} must be a finite number, got {v!r}", key)
        if positive and v <= 0:
            self.fail(f"{key!r} must be positive, got {v!r}", key)
        return float(v)

    def integer(self, data: dict, key: str, default=None, minimum: int | None = None) -> int:
        if key not in data:
            if default is None:
                self.fail(f"missing required key {key!r}")
            return default
        v = data[key]
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(f"{key!r} must be an integer, got {v!r}", key)
        if minimum is not None and v < minimum:
            self.fail(f"{key!r} must be at least {minimum}, got {v!r}", key)
        return int(v)


def _domain(reader: _Reader, data) -> FibreDomain:
    kind = data.get("kind") if isinstance(data, dict) else None
    if kind == "disk":
        reader.table(data, "domain", {"kind", "R"})
        return Disk(reader.number(data, "R", positive=True))
    if kind == "annulus":
        reader.table(data, "domain", {"kind", "r0", "r1"})
        r0 = reader.number(data, "r0", positive=True)
        r1 = reader.number(data, "r1", positive=True)
        if r1 <= r0:
            reader.fail("annulus needs r0 < r1", "r1")
        return Annulus(r0, r1)
    reader.fail(f"domain kind must be 'disk' or 'annulus', got {kind!r}", "kind")


def _field(reader: _Reader, data, domain: FibreDomain | None, base_dir: Path, extra: list[bytes], name: str = "field"):
    reader.table(data, name, {"preset", "suspension", "gridded", "perturbed"})
    kinds = [k for k in ("preset", "suspension", "gridded", "perturbed") if k in data]
    if len(kinds) != 1:
        reader.fail(f"[{name}] needs exactly one of preset, suspension, gridded, perturbed", name.split(".")[-1])
    kind = kinds[0]
    if kind == "preset":
        preset = data["preset"]
        if preset == "lundquist":
            return LundquistField(domain if domain is not None else lundquist_annulus()), "lundquist"
        if domain is None:
            reader.fail(f"preset {preset!r} needs a [domain] table", "preset")
        if preset == "straight":
            return straight_field(domain), "straight"
        if preset == "toroidal":
            return toroidal_field(domain), "toroidal"
        reader.fail(f"unknown preset {preset!r}", "preset")
    if domain is None and kind != "perturbed":
        reader.fail(f"field kind {kind!r} needs a [domain] table", kind)
    if kind == "suspension":
        sub = data["suspension"]
        skind = sub.get("kind") if isinstance(sub, dict) else None
        if skind == "rotation":
            reader.table(sub, f"{name}.suspension", {"kind", "omega"})
            return suspension_field(rigid_rotation_isotopy(domain, reader.number(sub, "omega"))), "suspension-rotation"
        if skind == "dehn":
            reader.table(sub, f"{name}.suspension", {"kind", "twists"})
            if not isinstance(domain, Annulus):
                reader.fail("Dehn-twist suspensions need an annulus domain", "dehn")
            return suspension_field(dehn_twist_isotopy(domain, reader.integer(sub, "twists", 1))), "suspension-dehn"
        reader.fail(f"suspension kind must be 'rotation' or 'dehn', got {skind!r}", "suspension")
    if kind == "gridded":
        sub = reader.table(data["gridded"], f"{name}.gridded", {"path", "interpolation"})
        if not isinstance(sub.get("path"), str):
            reader.fail("gridded.path must be a string", "path")
        interp = sub.get("interpolation", "cubic")
        if interp not in ("cubic", "linear"):
            reader.fail(f"interpolation must be 'cubic' or 'linear', got {interp!r}", "interpolation")
        path = (base_dir / sub["path"]).resolve()
        try:
            raw = path.read_bytes()
        except OSError as exc:
            reader.fail(f"cannot read gridded data {str(path)!r}: {exc.strerror}", "path")
        extra.append(raw)
        return read_gridded(raw.decode("utf-8"), domain, 3 if interp == "cubic" else 1), "gridded"
    sub = reader.table(data["perturbed"], f"{name}.perturbed", {"base", "potential", "epsilon", "k", "l", "phase"})
    if sub.get("potential", "helical") != "helical":
        reader.fail(f"unknown potential {sub['potential']!r}; the named mode is 'helical'", "potential")
    if "base" not in sub:
        reader.fail("perturbed field needs a base table", "perturbed")
    base, base_name = _field(reader, sub["base"], domain, base_dir, extra, f"{name}.perturbed.base")
    mode = HelicalMode(reader.integer(sub, "k", 1, 1), reader.integer(sub, "l", 1), reader.number(sub, "phase", 0.0))
    return PerturbedField(base, mode, reader.number(sub, "epsilon", 0.05)), f"perturbed-{base_name}"


def _numerics(reader: _Reader, data) -> Numerics:
    reader.table(data, "numerics", {"rtol", "atol", "s_steps", "reference_angle", "angle", "grid", "thresholds"})
    grid = reader.table(data.get("grid", {}), "numerics.grid", {"nr", "ntheta", "nt", "nx", "ny"})
    thr_data = reader.table(data.get("thresholds", {}), "numerics.thresholds", {f.name for f in fields(Thresholds)})
    defaults = Thresholds()
    thresholds = Thresholds(
        **{f.name: reader.number(thr_data, f.name, getattr(defaults, f.name), positive=True) for f in fields(Thresholds)}
    )
    base = Numerics()
    angle = None
    if "angle" in data:
        a = data["angle"]
        if not (isinstance(a, list) and len(a) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in a)):
            reader.fail(f"angle must be a pair of integers [m, n], got {a!r}", "angle")
        angle = (int(a[0]), int(a[1]))
    ntheta = reader.integer(grid, "ntheta", base.ntheta, 4)
    if ntheta % 2:
        reader.fail("ntheta must be even", "ntheta")
    return Numerics(
        rtol=reader.number(data, "rtol", base.rtol, positive=True),
        atol=reader.number(data, "atol", base.atol, positive=True),
        nr=reader.integer(grid, "nr", base.nr, 4),
        ntheta=ntheta,
        nt=reader.integer(grid, "nt", base.nt, 1),
        nx=reader.integer(grid, "nx", base.nx, 5),
        ny=reader.integer(grid, "ny", base.ny, 5),
        s_steps=reader.integer(data, "s_steps", base.s_steps, 1),
        reference_angle=reader.number(data, "reference_angle", base.reference_angle),
        angle=angle,
        thresholds=thresholds,
    )


def parse_field_file(text: str, base_dir: Path | str = ".", path: Path | None = None) -> FieldFile:
    """Parse a field document; raises :class:`ParseError` with line and column."""
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        line, col = getattr(exc, "lineno", None), getattr(exc, "colno", None)
        if line is None:
            line, col = _where(str(exc))
        raise ParseError(f"malformed field file: {exc}", line=line, column=col) from None
    reader = _Reader(text)
    reader.table(doc, "document", {"domain", "field", "numerics"})
    if "field" not in doc:
        reader.fail("missing [field] table")
    domain = _domain(reader, doc["domain"]) if "domain" in doc else None
    extra: list[bytes] = []
    spec, preset = _field(reader, doc["field"], domain, Path(base_dir), extra)
    numerics = _numerics(reader, doc.get("numerics", {}))
    digest = hashlib.sha256(text.encode("utf-8"))
    for raw in extra:
        digest.update(b"\0")
        digest.update(raw)
    return FieldFile(spec, numerics, digest.hexdigest(), preset, path)


def load_field_file(path: Path | str) -> FieldFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read field file {str(path)!r}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ParseError(f"field file {str(path)!r} is not UTF-8 text") from None
    return parse_field_file(text, path.parent, path)


def with_overrides(ff: FieldFile, **overrides) -> FieldFile:
    """Replace numerics entries; ``None`` values are ignored."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    return replace(ff, numerics=replace(ff.numerics, **changes)) if changes else ff


# -- gridded data ------------------------------------------------------------


def _format(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "+inf" if v > 0 else "-inf"
    return "%.17g" % v


def write_gridded(path: Path | str, spec: FieldSpec, nt: int, nx: int, ny: int | None = None) -> None:
    """Sample ``spec`` on a uniform angle grid times the bounding box and write the table."""
    g = GriddedField.from_field(spec, nt, nx, ny)
    T, X, Y = np.meshgrid(2 * np.pi * np.arange(nt) / nt, g.x_nodes, g.y_nodes, indexing="ij")
    cols = [T.ravel(), X.ravel(), Y.ravel()] + [c.ravel() for c in g.data]
    lines = [",".join(GRIDDED_COLUMNS)]
    lines += [",".join(_format(v) for v in row) for row in zip(*cols)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_gridded(text: str, domain: FibreDomain, order: int = 3) -> GriddedField:
    """Parse a ``t,x,y,b_phi,b_x,b_y`` table on a full tensor grid."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or tuple(c.strip() for c in lines[0].split(",")) != GRIDDED_COLUMNS:
        raise ParseError(f"gridded data must start with the header {','.join(GRIDDED_COLUMNS)}", line=1, column=1)
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise ParseError(f"gridded data: {exc}") from None
    if data.ndim != 2 or data.shape[1] != 6:
        raise ParseError("gridded data rows must have six columns")
    if not np.all(np.isfinite(data)):
        raise ParseError("gridded data must be finite")
    t, x, y = (np.unique(data[:, i]) for i in range(3))
    if t.size * x.size * y.size != len(data):
        raise ParseError("gridded data is not a full tensor grid")
    order_idx = np.lexsort((data[:, 2], data[:, 1], data[:, 0]))
    values = data[order_idx, 3:].T.reshape(3, t.size, x.size, y.size)
    if not np.allclose(t, 2 * np.pi * np.arange(t.size) / t.size, rtol=0, atol=1e-12):
        raise ParseError("gridded angles must be 2 pi k / nt")
    try:
        return GriddedField(domain, x, y, values, order)
    except InvalidArgumentError as exc:
        raise ParseError(str(exc)) from None


# -- result files --------------------------------------------------------------


def header_line(kind: str, columns, input_hash: str) -> str:
    return f"# {TOOL} {__version__} | input-sha256 {input_hash} | schema {kind}: {','.join(columns)}"


def write_result(path: Path | str, kind: str, columns, rows, input_hash: str, meta: dict | None = None) -> None:
    """Write a CSV result file; ``meta`` entries become sorted ``# key = value`` lines."""
    lines = [header_line(kind, columns, input_hash)]
    for key in sorted(meta or {}):
        value = meta[key]
        text = _format(value) if isinstance(value, (float, np.floating)) else str(value)
        lines.append(f"# {key} = {text}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(str(v) if isinstance(v, (int, np.integer, str)) else _format(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass
class ResultFile:
    tool: str
    version: str
    input_hash: str
    kind: str
    columns: tuple[str, ...]
    meta: dict
    rows: np.ndarray


def read_result(path: Path | str) -> ResultFile:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    m = re.match(r"# (\S+) (\S+) \| input-sha256 (\w+) \| schema ([^:]+): (.*)$", lines[0]) if lines else None
    if m is None:
        raise ParseError("result file lacks the fixed header line", line=1, column=1)
    meta = {}
    i = 1
    while i < len(lines) and lines[i].startswith("# "):
        key, _, value = lines[i][2:].partition(" = ")
        meta[key] = value
        i += 1
    columns = tuple(lines[i].split(","))
    body = [[float(v) for v in ln.split(",")] for ln in lines[i + 1 :] if ln]
    rows = np.array(body).reshape(-1, len(columns))
    return ResultFile(m.group(1), m.group(2), m.group(3), m.group(4), columns, meta, rows)


# -- representation files -------------------------------------------------------

REP_SCHEMA = "hamiltonian-rep/1"


def _block(name: str, array: np.ndarray) -> list[str]:
    a = np.asarray(array, dtype=float)
    flat = a.reshape(-1, a.shape[-1]) if a.ndim > 1 else a[None, :]
    out = [f"[{name}] shape={','.join(str(s) for s in a.shape)}"]
    out += [",".join(_format(v) for v in row) for row in flat]
    return out


def write_representation(path: Path | str, rep, input_hash: str) -> None:
    """Write the angle grid, fibre grid, omega, H, Psi displacement and residual blocks."""
    dom = rep.grid.domain
    dx, dy = rep.displacement
    if isinstance(dom, Disk):
        domain = f"disk,{_format(dom.R)}"
    else:
        domain = f"annulus,{_format(dom.r0)},{_format(dom.r1)}"
    lines = [f"# {TOOL} {__version__} | input-sha256 {input_hash} | schema {REP_SCHEMA}"]
    lines.append("[angle-grid]")
    lines.append(f"angle = {rep.angle[0]},{rep.angle[1]}")
    lines.append(f"reference = {_format(rep.reference)}")
    lines.append(f"s_steps = {rep.s_steps}")
    lines += _block("t", rep.t)
    lines.append("[fibre-grid]")
    lines.append(f"domain = {domain}")
    lines.append(f"x0 = {_format(rep.x0[0])},{_format(rep.x0[1])}")
    lines += _block("r", rep.grid.r)
    lines += _block("theta", rep.grid.theta)
    lines += _block("omega", rep.w_o)
    lines += _block("H", rep.H)
    lines += _block("psi-dx", dx)
    lines += _block("psi-dy", dy)
    lines.append("[residuals]")
    lines += [f"{key} = {_format(rep.residuals[key])}" for key in sorted(rep.residuals)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_representation(path: Path | str):
    """Read a representation file back; ``nu`` is rebuilt as ``-dH``."""
    from .moser import HamiltonianRep

    lines = Path(path).read_text(encoding="utf-8").splitlines()
    m = re.match(r"# \S+ \S+ \| input-sha256 (\w+) \| schema (\S+)$", lines[0]) if lines else None
    if m is None or m.group(2) != REP_SCHEMA:
        raise ParseError("not a representation file", line=1, column=1)
    scalars: dict[str, str] = {}
    blocks: dict[str, np.ndarray] = {}
    residuals: dict[str, float] = {}
    section = None
    i = 1
    while i < len(lines):
        ln = lines[i]
        bm = re.match(r"\[([\w-]+)\] shape=([\d,]+)$", ln)
        if bm:
            shape = tuple(int(s) for s in bm.group(2).split(","))
            n_rows = int(np.prod(shape[:-1])) if len(shape) > 1 else 1
            rows = [[float(v) for v in r.split(",")] for r in lines[i + 1 : i + 1 + n_rows]]
            blocks[bm.group(1)] = np.array(rows).reshape(shape)
            i += 1 + n_rows
            continue
        if ln.startswith("["):
            section = ln.strip("[]")
        elif " = " in ln:
            key, _, value = ln.partition(" = ")
            if section == "residuals":
                residuals[key] = float(value)
            else:
                scalars[key] = value
        i += 1
    parts = scalars["domain"].split(",")
    domain = Disk(float(parts[1])) if parts[0] == "disk" else Annulus(float(parts[1]), float(parts[2]))
    H = blocks["H"]
    grid = PolarGrid(domain, H.shape[-2], H.shape[-1])
    m_, n_ = (int(v) for v in scalars["angle"].split(","))
    hx, hy = grid.gradient(H)
    x0 = tuple(float(v) for v in scalars["x0"].split(","))
    return HamiltonianRep(
        (m_, n_),
        float(scalars["reference"]),
        grid,
        blocks["t"],
        blocks["omega"],
        H,
        blocks["psi-dx"] + grid.x,
        blocks["psi-dy"] + grid.y,
        -hx,
        -hy,
        x0,
        residuals,
        int(scalars["s_steps"]),
    )
