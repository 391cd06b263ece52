import json

import numpy as np
import pytest

from quadstop.dataio import (load_boundary_csv, read_problem_csv,
                             save_boundary_csv, svg_boundary_plot,
                             write_json_report)
from quadstop.problem import QuadraticProblem, StarBoundary


def test_roundtrip_2d(tmp_path, p_14, bnd_14):
    f = tmp_path / "b.csv"
    save_boundary_csv(f, p_14, bnd_14)
    back = load_boundary_csv(f)
    assert np.array_equal(back.radii, bnd_14.radii)
    assert np.array_equal(back.grid.nodes, bnd_14.grid.nodes)
    assert np.array_equal(back.grid.weights, bnd_14.grid.weights)


def test_roundtrip_3d(tmp_path, p3_sym, bnd3_sym):
    f = tmp_path / "b3.csv"
    save_boundary_csv(f, p3_sym, bnd3_sym)
    back = load_boundary_csv(f)
    assert np.array_equal(back.radii, bnd3_sym.radii)
    assert back.grid.lat_shape == bnd3_sym.grid.lat_shape
    assert np.allclose(back.grid.nodes, bnd3_sym.grid.nodes, rtol=0.0, atol=0.0)


def test_header_comments(tmp_path, p_14_r03, bnd_14_r03):
    f = tmp_path / "b.csv"
    save_boundary_csv(f, p_14_r03, bnd_14_r03)
    lines = f.read_text().splitlines()
    assert lines[0].startswith("# schema_version=")
    assert lines[1].startswith("# problem r=")
    assert "lambdas=" in lines[1]


def test_read_problem_roundtrip(tmp_path, p_14_r03, bnd_14_r03):
    f = tmp_path / "b.csv"
    save_boundary_csv(f, p_14_r03, bnd_14_r03)
    p = read_problem_csv(f)
    assert p.r == p_14_r03.r
    assert np.array_equal(p.lam, p_14_r03.lam)


def test_read_problem_missing_metadata(tmp_path, p_14, bnd_14):
    f = tmp_path / "b.csv"
    save_boundary_csv(f, p_14, bnd_14)
    body = [ln for ln in f.read_text().splitlines() if not ln.startswith("# problem")]
    f.write_text("\n".join(body) + "\n")
    assert np.array_equal(load_boundary_csv(f).radii, bnd_14.radii)
    with pytest.raises(ValueError, match="no problem metadata"):
        read_problem_csv(f)


def test_load_errors(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ValueError, match="empty boundary"):
        load_boundary_csv(empty)

    no_rows = tmp_path / "norows.csv"
    no_rows.write_text("theta,rho\n")
    with pytest.raises(ValueError, match="no data rows"):
        load_boundary_csv(no_rows)

    bad_header = tmp_path / "bad.csv"
    bad_header.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError, match="unrecognized boundary header"):
        load_boundary_csv(bad_header)

    skew = tmp_path / "skew.csv"
    rows = "".join("%g,1.0\n" % t for t in (0.0, 0.1, 0.7, 1.9, 2.0, 5.1))
    skew.write_text("theta,rho\n" + rows)
    with pytest.raises(ValueError, match="equispaced"):
        load_boundary_csv(skew)


def test_load_incomplete_3d_grid(tmp_path, p3_sym, bnd3_sym):
    f = tmp_path / "b3.csv"
    save_boundary_csv(f, p3_sym, bnd3_sym)
    lines = f.read_text().splitlines()
    f.write_text("\n".join(lines[:-5]) + "\n")  # drop a few rows
    with pytest.raises(ValueError, match="incomplete latitude/longitude"):
        load_boundary_csv(f)


def test_json_report_deterministic(tmp_path):
    payload = {"b": np.float64(1.5), "a": np.arange(3), "flag": np.bool_(True),
               "nested": {"x": np.int64(7)}}
    f1, f2 = tmp_path / "r1.json", tmp_path / "r2.json"
    write_json_report(f1, payload)
    write_json_report(f2, dict(reversed(list(payload.items()))))
    assert f1.read_bytes() == f2.read_bytes()
    doc = json.loads(f1.read_text())
    assert doc["a"] == [0, 1, 2]
    assert doc["b"] == 1.5
    assert doc["flag"] is True
    assert doc["nested"]["x"] == 7
    assert doc["schema_version"] == 1
    assert list(doc) == sorted(doc)


def test_json_report_keeps_explicit_schema(tmp_path):
    f = tmp_path / "r.json"
    write_json_report(f, {"schema_version": 3})
    assert json.loads(f.read_text())["schema_version"] == 3


def test_svg_plot(tmp_path, p_14, bnd_14):
    f = tmp_path / "b.svg"
    svg_boundary_plot(f, p_14, bnd_14)
    text = f.read_text()
    assert text.startswith("<svg")
    assert "<polyline" in text
    assert "<ellipse" in text
    assert text.rstrip().endswith("</svg>")


def test_svg_rejects_3d(tmp_path, p3_sym, bnd3_sym):
    with pytest.raises(ValueError, match="d = 2"):
        svg_boundary_plot(tmp_path / "b.svg", p3_sym, bnd3_sym)
