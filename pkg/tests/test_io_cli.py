from __future__ import annotations

import hashlib

import numpy as np
import pytest

from fieldham.cli import main
from fieldham.core.angles import TWO_PI
from fieldham.core.bessel import bessel_zero
from fieldham.core.domains import Annulus
from fieldham.errors import ParseError
from fieldham.fields.spec import FunctionField, LundquistField, PerturbedField
from fieldham.io import (
    header_line,
    parse_field_file,
    read_representation,
    read_result,
    write_gridded,
    write_result,
)

LUNDQUIST = '[field]\npreset = "lundquist"\n'
SMALL_GRID = "\n[numerics.grid]\nnr = 24\nntheta = 24\nnt = 8\n"


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def _rows(path):
    return read_result(path).rows


# -- parsing -------------------------------------------------------------------------


def test_parse_lundquist_defaults():
    ff = parse_field_file(LUNDQUIST)
    assert isinstance(ff.spec, LundquistField)
    assert ff.spec.domain == Annulus(bessel_zero(0, 1), bessel_zero(1, 1))
    assert ff.numerics.rtol == 1e-10 and ff.numerics.thresholds.period == 1e-8
    assert ff.sha256 == hashlib.sha256(LUNDQUIST.encode()).hexdigest()


def test_parse_perturbed_inherits_domain():
    text = '[field.perturbed]\nepsilon = 0.05\n[field.perturbed.base]\npreset = "lundquist"\n'
    ff = parse_field_file(text)
    assert isinstance(ff.spec, PerturbedField) and ff.spec.epsilon == 0.05
    assert ff.preset == "perturbed-lundquist"


@pytest.mark.parametrize(
    "text, line",
    [
        ('[field]\npreset = "lundquist"\ncolour = 3\n', 3),
        ('[field]\npreset = "lundquist"\n[numerics]\nrtol = nan\n', 4),
        ('[field\npreset = "lundquist"\n', 1),
        ('[domain]\nkind = "disk"\nR = 1.0\n[field]\npreset = "helix"\n', 5),
    ],
)
def test_parse_errors_carry_location(text, line):
    with pytest.raises(ParseError) as info:
        parse_field_file(text)
    assert info.value.line == line
    assert info.value.exit_code == 2


def test_result_file_round_trip(tmp_path):
    path = tmp_path / "r.csv"
    write_result(path, "demo", ("a", "b"), [(1, 0.1), (2, np.inf)], "abc123", {"note": "x", "eps": 1e-3})
    text = path.read_text()
    assert text.splitlines()[0] == header_line("demo", ("a", "b"), "abc123")
    res = read_result(path)
    assert res.input_hash == "abc123" and res.kind == "demo" and res.meta == {"eps": "0.001", "note": "x"}
    np.testing.assert_array_equal(res.rows, [[1, 0.1], [2, np.inf]])


# -- verify --------------------------------------------------------------------------


def test_verify_lundquist(tmp_path, capsys):
    assert main(["verify", _write(tmp_path, "lq.toml", LUNDQUIST)]) == 0
    assert "(1,1)" in capsys.readouterr().out


def test_verify_straight_field_fails_tangency(tmp_path, capsys):
    path = _write(tmp_path, "s.toml", '[domain]\nkind = "disk"\nR = 1.0\n[field]\npreset = "straight"\n')
    assert main(["verify", path]) == 3
    assert "precondition" in capsys.readouterr().err


def test_malformed_file_exits_2(tmp_path, capsys):
    assert main(["verify", _write(tmp_path, "bad.toml", "[field\n")]) == 2
    assert "error [parse]" in capsys.readouterr().err


def test_bad_arguments_exit_2(tmp_path):
    assert main(["poincare", _write(tmp_path, "lq.toml", LUNDQUIST), "--transits", "many"]) == 2


# -- poincare ------------------------------------------------------------------------


def test_poincare_lundquist_rows_and_radii(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["poincare", _write(tmp_path, "lq.toml", LUNDQUIST), "--transits", "200", "--out", str(out)]) == 0
    res = read_result(out)
    assert res.rows.shape == (1600, 7)
    assert res.input_hash == hashlib.sha256(LUNDQUIST.encode()).hexdigest()
    r = np.hypot(res.rows[:, 3], res.rows[:, 4]).reshape(8, 200)
    assert np.max(np.abs(r - r[:, :1])) < 1e-9


def test_poincare_rotation_period_four(tmp_path):
    text = '[domain]\nkind = "annulus"\nr0 = 1.0\nr1 = 2.0\n[field.suspension]\nkind = "rotation"\nomega = 0.25\n'
    seeds = _write(tmp_path, "seeds.csv", "x,y\n1.5,0.0\n")
    out = tmp_path / "p.csv"
    assert main(["poincare", _write(tmp_path, "rot.toml", text), "--seeds", seeds, "--transits", "4", "--out", str(out)]) == 0
    pts = _rows(out)[:, 3:5]
    np.testing.assert_allclose(pts, [[0, 1.5], [-1.5, 0], [0, -1.5], [1.5, 0]], atol=1e-9)


def test_poincare_zero_transits_has_header_only(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["poincare", _write(tmp_path, "lq.toml", LUNDQUIST), "--transits", "0", "--out", str(out)]) == 0
    res = read_result(out)
    assert res.rows.shape == (0, 7) and res.columns[0] == "seed_id"


# -- iota and suspend --------------------------------------------------------------------


def test_iota_lundquist_and_divergence(tmp_path):
    z01 = bessel_zero(0, 1)
    seeds = _write(tmp_path, "seeds.csv", f"2.9,0.0\n3.5,0.0\n{z01!r},0.0\n")
    out = tmp_path / "i.csv"
    assert main(["iota", _write(tmp_path, "lq.toml", LUNDQUIST), "--seeds", seeds, "--transits", "50", "--out", str(out)]) == 0
    rows = _rows(out)
    np.testing.assert_allclose(rows[:2, 4], rows[:2, 5], atol=1e-6)
    assert rows[2, 4] == np.inf and rows[2, 6] == 1
    assert "+inf" in out.read_text().splitlines()[-1]


def test_iota_rotation(tmp_path):
    text = '[domain]\nkind = "disk"\nR = 1.0\n[field.suspension]\nkind = "rotation"\nomega = 0.3\n'
    out = tmp_path / "i.csv"
    assert main(["iota", _write(tmp_path, "rot.toml", text), "--seeds", "3", "--transits", "10", "--out", str(out)]) == 0
    np.testing.assert_allclose(_rows(out)[:, 4], 0.3, atol=1e-10)


def test_suspend_dehn_twist(tmp_path):
    text = '[domain]\nkind = "annulus"\nr0 = 1.0\nr1 = 2.0\n[field.suspension]\nkind = "dehn"\ntwists = 1\n'
    out = tmp_path / "m.csv"
    assert main(["suspend", _write(tmp_path, "d.toml", text), "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 32
    assert np.max(rows[:, 7]) < 1e-6
    np.testing.assert_allclose(rows[:, 8], TWO_PI, atol=1e-8)


# -- clebsch ----------------------------------------------------------------------------


def test_clebsch_weyl_straight(tmp_path):
    text = '[domain]\nkind = "disk"\nR = 1.0\n[field]\npreset = "straight"\n' + SMALL_GRID
    out = tmp_path / "c.csv"
    assert main(["clebsch", _write(tmp_path, "s.toml", text), "--mode", "weyl", "--out", str(out)]) == 0
    rows = _rows(out)
    np.testing.assert_allclose(rows[:, 6], -rows[:, 4], atol=1e-10)
    np.testing.assert_allclose(rows[:, 5], 0.0, atol=1e-15)


def test_clebsch_weyl_lundquist(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["clebsch", _write(tmp_path, "lq.toml", LUNDQUIST + SMALL_GRID), "--out", str(out)]) == 0
    assert float(read_result(out).meta["residual"]) < 1e-7


def test_clebsch_local_degenerate_chart_exits_4(tmp_path, capsys):
    text = '[domain]\nkind = "disk"\nR = 1.0\n[field]\npreset = "straight"\n'
    assert main(["clebsch", _write(tmp_path, "s.toml", text), "--mode", "local", "--out", str(tmp_path / "c.csv")]) == 4
    assert "degenerate-transformation" in capsys.readouterr().err


# -- moser and compare ----------------------------------------------------------------------


def test_moser_lundquist_deterministic(tmp_path, capsys):
    path = _write(tmp_path, "lq.toml", LUNDQUIST + SMALL_GRID)
    a, b = tmp_path / "a.rep", tmp_path / "b.rep"
    assert main(["moser", path, "--out", str(a)]) == 0
    assert main(["moser", path, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rep = read_representation(a)
    dx, dy = rep.displacement
    assert np.max(np.abs(dx)) < 1e-12 and np.max(np.abs(dy)) < 1e-12
    for key in ("pullback", "closedness", "dirichlet", "period", "decomposition"):
        assert rep.residuals[key] < 1e-7
    assert "decomposition" in capsys.readouterr().out


def test_moser_perturbed_lundquist(tmp_path):
    text = (
        '[field.perturbed]\nepsilon = 0.05\n[field.perturbed.base]\npreset = "lundquist"\n'
        "[numerics]\ns_steps = 48\n[numerics.grid]\nnr = 40\nntheta = 40\nnt = 16\n"
    )
    out = tmp_path / "p.rep"
    assert main(["moser", _write(tmp_path, "p.toml", text), "--out", str(out)]) == 0
    assert read_representation(out).residuals["decomposition"] < 1e-5


def test_moser_flux_violating_gridded_field_exits_3(tmp_path, capsys):
    dom = Annulus(1.0, 2.0)
    leaky = FunctionField(dom, lambda t, x, y: (1.0 + 0.1 * np.sin(t), 0 * x, 0 * y))
    write_gridded(tmp_path / "leaky.csv", leaky, 8, 17)
    text = '[domain]\nkind = "annulus"\nr0 = 1.0\nr1 = 2.0\n[field.gridded]\npath = "leaky.csv"\n' + SMALL_GRID
    assert main(["moser", _write(tmp_path, "g.toml", text), "--out", str(tmp_path / "g.rep")]) == 3
    assert "cohomology-obstruction" in capsys.readouterr().err


def test_gridded_file_hash_covers_data(tmp_path):
    dom = Annulus(1.0, 2.0)
    write_gridded(tmp_path / "a.csv", FunctionField(dom, lambda t, x, y: (1.0, 0 * x, 0 * y)), 4, 5)
    text = '[domain]\nkind = "annulus"\nr0 = 1.0\nr1 = 2.0\n[field.gridded]\npath = "a.csv"\n'
    first = parse_field_file(text, tmp_path).sha256
    write_gridded(tmp_path / "a.csv", FunctionField(dom, lambda t, x, y: (2.0, 0 * x, 0 * y)), 4, 5)
    assert parse_field_file(text, tmp_path).sha256 != first


def test_compare_lundquist(tmp_path):
    out = tmp_path / "c.csv"
    path = _write(tmp_path, "lq.toml", LUNDQUIST + SMALL_GRID)
    assert main(["compare", path, "--seeds", "4", "--transits", "5", "--out", str(out)]) == 0
    assert np.max(_rows(out)[:, 6]) < 1e-5
