"""Boundary CSV, report JSON, and SVG plot serialization.

All writers are deterministic: fixed field order, fixed float formatting,
sorted JSON keys, no timestamps.  Schemas carry a version field so the
consuming tests can detect drift.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from .grids import SphereGrid, make_circle_grid, make_sphere_grid
from .problem import QuadraticProblem, StarBoundary

SCHEMA_VERSION = 1

_FMT = "%.17g"


def save_boundary_csv(path, p: QuadraticProblem, b: StarBoundary) -> None:
    """Write the boundary to CSV: angles/indices, radius, cartesian point.

    A comment line records (r, lambda) so plot/verify can run from the
    file alone; loaders that only want the geometry skip it.
    """
    lines = [
        "# schema_version=%d" % SCHEMA_VERSION,
        "# problem r=%s lambdas=%s" % (_FMT % p.r, ",".join(_FMT % v for v in p.lam)),
    ]
    pts = b.cartesian_points(p)
    if p.d == 2:
        lines.append("theta,rho,x1,x2")
        for theta, rho, x in zip(b.grid.angles, b.radii, pts):
            lines.append(",".join(_FMT % v for v in (theta, rho, x[0], x[1])))
    elif p.d == 3:
        n_lat, n_lon = b.grid.lat_shape
        lines.append("lat_index,lon_index,rho,x1,x2,x3")
        for k, (rho, x) in enumerate(zip(b.radii, pts)):
            i, j = divmod(k, n_lon)
            lines.append("%d,%d,%s" % (i, j, ",".join(_FMT % v for v in (rho, x[0], x[1], x[2]))))
    else:
        raise ValueError("boundary CSV supports d in {2, 3}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_problem_csv(path) -> QuadraticProblem:
    """Recover the problem parameters from a boundary CSV's comment line."""
    with open(path) as fh:
        for ln in fh:
            ln = ln.strip()
            if ln.startswith("# problem "):
                fields = dict(tok.split("=", 1) for tok in ln[10:].split())
                r = float(fields["r"])
                lam = tuple(float(v) for v in fields["lambdas"].split(","))
                return QuadraticProblem(r, lam)
    raise ValueError("%s: no problem metadata line" % path)


def load_boundary_csv(path) -> StarBoundary:
    """Rebuild a StarBoundary from a CSV written by save_boundary_csv."""
    with open(path) as fh:
        rows = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not rows:
        raise ValueError("%s: empty boundary file" % path)
    header = rows[0].split(",")
    data = rows[1:]
    if not data:
        raise ValueError("%s: no data rows" % path)
    if header[:2] == ["theta", "rho"]:
        vals = np.array([[float(v) for v in row.split(",")] for row in data])
        n = vals.shape[0]
        grid = make_circle_grid(n)
        if not np.allclose(vals[:, 0], grid.angles, atol=1e-9):
            raise ValueError("%s: theta column is not the expected equispaced grid" % path)
        return StarBoundary(grid, vals[:, 1])
    if header[:3] == ["lat_index", "lon_index", "rho"]:
        vals = np.array([[float(v) for v in row.split(",")] for row in data])
        n_lat = int(vals[:, 0].max()) + 1
        n_lon = int(vals[:, 1].max()) + 1
        if vals.shape[0] != n_lat * n_lon:
            raise ValueError("%s: incomplete latitude/longitude grid" % path)
        order = np.lexsort((vals[:, 1], vals[:, 0]))
        grid = make_sphere_grid(n_lat, n_lon)
        return StarBoundary(grid, vals[order, 2])
    raise ValueError("%s: unrecognized boundary header %r" % (path, ",".join(header)))


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, SphereGrid):
        return {"n": obj.n, "d": obj.d, "lat_shape": list(obj.lat_shape)}
    return obj


def write_json_report(path, payload: dict) -> None:
    """Write a report dict as deterministic JSON (schema-versioned)."""
    body = dict(payload)
    body.setdefault("schema_version", SCHEMA_VERSION)
    with open(path, "w") as fh:
        json.dump(_jsonable(body), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# SVG plot

_SVG_SIZE = 640
_SVG_MARGIN = 40.0


def _ellipse_radii(p: QuadraticProblem):
    # negative set of (r - L)g: sum lambda_i x_i^2 <= sum lambda_i / r
    return [float(np.sqrt(p.beta_sq / lam)) for lam in p.lam]


def svg_boundary_plot(path, p: QuadraticProblem, b: StarBoundary) -> None:
    """Closed boundary polyline with the negative-set ellipse overlay."""
    if p.d != 2:
        raise ValueError("plotting supports d = 2 boundaries")
    pts = b.cartesian_points(p)
    rx, ry = _ellipse_radii(p)
    ext = 1.1 * max(float(np.abs(pts).max()), rx, ry)
    scale = (_SVG_SIZE - 2.0 * _SVG_MARGIN) / (2.0 * ext)
    mid = _SVG_SIZE / 2.0

    def sx(v):
        return "%.2f" % (mid + scale * v)

    def sy(v):
        return "%.2f" % (mid - scale * v)

    poly = " ".join("%s,%s" % (sx(x[0]), sy(x[1])) for x in np.vstack([pts, pts[:1]]))
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">' % (_SVG_SIZE, _SVG_SIZE, _SVG_SIZE, _SVG_SIZE),
        '<rect width="%d" height="%d" fill="white"/>' % (_SVG_SIZE, _SVG_SIZE),
        '<line x1="0" y1="%s" x2="%d" y2="%s" stroke="#bbbbbb" stroke-width="1"/>'
        % (sy(0.0), _SVG_SIZE, sy(0.0)),
        '<line x1="%s" y1="0" x2="%s" y2="%d" stroke="#bbbbbb" stroke-width="1"/>'
        % (sx(0.0), sx(0.0), _SVG_SIZE),
        '<ellipse cx="%s" cy="%s" rx="%.2f" ry="%.2f" fill="none" '
        'stroke="red" stroke-width="1.5"/>' % (sx(0.0), sy(0.0), scale * rx, scale * ry),
        '<polyline points="%s" fill="none" stroke="#1f4e9c" stroke-width="2"/>' % poly,
        "</svg>",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
