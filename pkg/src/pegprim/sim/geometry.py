"""Task geometry for the peg-in-hole environment.

The hole is a convex polygonal cavity of fixed depth sunk into the plane
z = 0; the peg is a prism whose cross-section is the hole polygon inset
by the clearance.  All lengths are millimeters.  The hole frame has its
origin at the hole center on the top surface.

Contact queries run against a fixed set of sample points on the peg
surface: every bottom-face boundary point (vertices plus edge
subdivisions at <= 5 mm spacing) and side points spaced 5 mm up each
vertical edge to 20 mm above the bottom face.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SHAPES = ("square", "triangle", "pentagon", "round")

#: full-face contact stiffness, N/mm: a flat press of depth d yields K_EFF*d
K_EFF = 10.0
PEG_HEIGHT = 60.0
HOLE_DEPTH = 25.0
EDGE_SPACING = 5.0
SIDE_POINT_TOP = 20.0


@dataclass(frozen=True)
class TaskGeometry:
    """Immutable geometry bundle for one insertion task."""

    name: str
    shape: str
    hole_size: float
    clearance: float
    hole_depth: float
    peg_height: float
    hole_polygon: np.ndarray = field(repr=False, compare=False)
    peg_polygon: np.ndarray = field(repr=False, compare=False)
    sample_points: np.ndarray = field(repr=False, compare=False)
    n_bottom: int = 0
    point_stiffness: float = 0.0


def _regular_polygon(n_sides: int, circumradius: float, theta0: float) -> np.ndarray:
    angles = theta0 + 2.0 * np.pi * np.arange(n_sides) / n_sides
    return np.column_stack([circumradius * np.cos(angles), circumradius * np.sin(angles)])


def _hole_polygon(shape: str, hole_size: float) -> np.ndarray:
    if shape == "square":
        # size is the side length; vertices at 45 deg keep the sides axis-aligned
        return _regular_polygon(4, hole_size / math.sqrt(2.0), math.pi / 4.0)
    if shape == "triangle":
        return _regular_polygon(3, hole_size / math.sqrt(3.0), math.pi / 2.0)
    if shape == "pentagon":
        return _regular_polygon(5, hole_size / (2.0 * math.sin(math.pi / 5.0)), math.pi / 2.0)
    if shape == "round":
        # size is the diameter; the circle is approximated by a regular 32-gon
        return _regular_polygon(32, hole_size / 2.0, 0.0)
    raise ValueError(f"unknown shape {shape!r}, expected one of {SHAPES}")


def _sample_points(peg_polygon: np.ndarray) -> tuple[np.ndarray, int]:
    bottom = []
    n = len(peg_polygon)
    for i in range(n):
        a = peg_polygon[i]
        b = peg_polygon[(i + 1) % n]
        length = float(np.linalg.norm(b - a))
        segs = max(1, math.ceil(length / EDGE_SPACING))
        for j in range(segs):  # start vertex plus interior points; end vertex
            t = j / segs  # belongs to the next edge
            p = a + t * (b - a)
            bottom.append((p[0], p[1], 0.0))
    side = []
    n_levels = int(SIDE_POINT_TOP / EDGE_SPACING)
    for i in range(n):
        for lvl in range(1, n_levels + 1):
            side.append((peg_polygon[i, 0], peg_polygon[i, 1], lvl * EDGE_SPACING))
    pts = np.array(bottom + side, dtype=float)
    pts.flags.writeable = False
    return pts, len(bottom)


def make_task(
    shape: str,
    hole_size: float,
    clearance: float,
    hole_depth: float = HOLE_DEPTH,
    name: str | None = None,
) -> TaskGeometry:
    """Build the geometry for one task.

    ``hole_size`` is the polygon side length (diameter for round);
    ``clearance`` is diametral: the peg polygon is the hole polygon
    scaled by (hole_size - clearance) / hole_size, so e.g. a square peg
    side is the hole side minus the clearance.
    """
    if clearance <= 0.0:
        raise ValueError(f"clearance must be positive, got {clearance}")
    if hole_size <= clearance:
        raise ValueError(f"hole_size {hole_size} must exceed clearance {clearance}")
    if hole_depth <= 0.0:
        raise ValueError(f"hole_depth must be positive, got {hole_depth}")
    hole_poly = _hole_polygon(shape, hole_size)
    peg_poly = hole_poly * ((hole_size - clearance) / hole_size)
    hole_poly.flags.writeable = False
    peg_poly.flags.writeable = False
    pts, n_bottom = _sample_points(peg_poly)
    return TaskGeometry(
        name=name or shape,
        shape=shape,
        hole_size=float(hole_size),
        clearance=float(clearance),
        hole_depth=float(hole_depth),
        peg_height=PEG_HEIGHT,
        hole_polygon=hole_poly,
        peg_polygon=peg_poly,
        sample_points=pts,
        n_bottom=n_bottom,
        point_stiffness=K_EFF / n_bottom,
    )


#: named presets: shape, hole size, clearance (mm)
TASK_PRESETS = {
    "square": ("square", 51.42, 1.40),
    "triangle": ("triangle", 54.50, 1.62),
    "pentagon": ("pentagon", 57.81, 1.29),
    "square-tight": ("square", 51.42, 0.50),
    "round": ("round", 25.36, 0.30),
}


def task_from_name(name: str) -> TaskGeometry:
    try:
        shape, size, clearance = TASK_PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown task {name!r}, expected one of {sorted(TASK_PRESETS)}"
        ) from None
    return make_task(shape, size, clearance, name=name)


# ---------------------------------------------------------------------
# reference contact queries (scalar; the fast paths live in the kernels)
# ---------------------------------------------------------------------


def point_in_polygon(xy, polygon) -> bool:
    """Membership test for a convex CCW polygon, boundary inclusive."""
    n = len(polygon)
    for i in range(n):
        ax, ay = polygon[i]
        bx, by = polygon[(i + 1) % n]
        if (bx - ax) * (xy[1] - ay) - (by - ay) * (xy[0] - ax) < 0.0:
            return False
    return True


def distance_to_polygon(xy, polygon) -> tuple[float, np.ndarray]:
    """Distance from an outside point to the polygon boundary and the
    nearest boundary point."""
    best_d2 = math.inf
    best = None
    n = len(polygon)
    for i in range(n):
        a = polygon[i]
        b = polygon[(i + 1) % n]
        e = b - a
        t = float(np.dot(xy - a, e) / np.dot(e, e))
        t = min(1.0, max(0.0, t))
        q = a + t * e
        d2 = float(np.dot(xy - q, xy - q))
        if d2 < best_d2:
            best_d2 = d2
            best = q
    return math.sqrt(best_d2), best


def point_penetration(p, geom: TaskGeometry):
    """Minimum-translation escape for one point, hole frame.

    The solid is the half-space z <= 0 minus the cavity (hole polygon
    footprint down to hole_depth).  Returns None for free points, else
    (depth, unit escape direction).  Vertical escape wins ties.
    """
    x, y, z = float(p[0]), float(p[1]), float(p[2])
    if z >= 0.0:
        return None
    inside = point_in_polygon((x, y), geom.hole_polygon)
    if inside:
        return None
    depth_a = -z
    if z >= -geom.hole_depth:
        dist_b, nearest = distance_to_polygon(np.array([x, y]), geom.hole_polygon)
        if dist_b < depth_a:
            if dist_b == 0.0:
                return None  # boundary contact, no translation needed
            nx = (nearest[0] - x) / dist_b
            ny = (nearest[1] - y) / dist_b
            return dist_b, np.array([nx, ny, 0.0])
    return depth_a, np.array([0.0, 0.0, 1.0])
