import math

import numpy as np
import pytest

from pegprim.sim.geometry import (
    K_EFF,
    TASK_PRESETS,
    distance_to_polygon,
    make_task,
    point_in_polygon,
    point_penetration,
    task_from_name,
)


def polygon_side(poly):
    return float(np.linalg.norm(poly[1] - poly[0]))


def test_square_preset_sides():
    geom = task_from_name("square")
    assert polygon_side(geom.hole_polygon) == pytest.approx(51.42, abs=1e-9)
    assert polygon_side(geom.peg_polygon) == pytest.approx(50.02, abs=1e-9)
    # axis-aligned: half-side extent in x and y
    assert geom.hole_polygon[:, 0].max() == pytest.approx(25.71, abs=1e-9)


def test_triangle_peg_side_is_hole_minus_clearance():
    geom = task_from_name("triangle")
    assert polygon_side(geom.hole_polygon) == pytest.approx(54.50, abs=1e-9)
    assert polygon_side(geom.peg_polygon) == pytest.approx(52.88, abs=1e-9)


def test_round_is_32_gon_of_given_diameter():
    geom = task_from_name("round")
    assert len(geom.hole_polygon) == 32
    radii = np.linalg.norm(geom.hole_polygon, axis=1)
    assert np.allclose(radii, 25.36 / 2.0, atol=1e-12)


def test_all_presets_build_and_are_convex_ccw():
    for name in TASK_PRESETS:
        geom = task_from_name(name)
        poly = geom.hole_polygon
        n = len(poly)
        for i in range(n):
            a, b, c = poly[i], poly[(i + 1) % n], poly[(i + 2) % n]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            assert cross > 0.0  # strictly convex, CCW
        assert np.allclose(poly.mean(axis=0), 0.0, atol=1e-9)
        # peg strictly inside hole when concentric
        for v in geom.peg_polygon:
            assert point_in_polygon(v, geom.hole_polygon)
            d, _ = distance_to_polygon(v, geom.hole_polygon)
            assert d > 0.0


def test_sample_point_layout():
    geom = task_from_name("square")
    pts = geom.sample_points
    bottom = pts[pts[:, 2] == 0.0]
    assert len(bottom) == geom.n_bottom
    # side 50.02 -> 11 segments per edge at <= 5 mm spacing
    assert geom.n_bottom == 44
    side = pts[pts[:, 2] > 0.0]
    assert sorted(set(side[:, 2])) == [5.0, 10.0, 15.0, 20.0]
    assert len(side) == 4 * 4
    assert geom.point_stiffness == pytest.approx(K_EFF / 44)


def test_bottom_edge_spacing_bound():
    for name in TASK_PRESETS:
        geom = task_from_name(name)
        bottom = geom.sample_points[geom.sample_points[:, 2] == 0.0][:, :2]
        n = len(bottom)
        # consecutive boundary points (construction order follows the edges)
        gaps = np.linalg.norm(np.roll(bottom, -1, axis=0) - bottom, axis=1)
        assert gaps.max() <= 5.0 + 1e-9


def test_penetration_inside_cavity_is_free():
    geom = task_from_name("square")
    assert point_penetration((0.0, 0.0, -5.0), geom) is None


def test_penetration_vertical_escape():
    geom = task_from_name("square")
    depth, normal = point_penetration((40.0, 0.0, -2.0), geom)
    assert depth == pytest.approx(2.0, abs=1e-12)
    assert np.allclose(normal, [0.0, 0.0, 1.0])


def test_penetration_horizontal_escape():
    geom = task_from_name("square")
    depth, normal = point_penetration((26.0, 0.0, -10.0), geom)
    assert depth == pytest.approx(0.29, abs=1e-9)
    assert np.allclose(normal, [-1.0, 0.0, 0.0], atol=1e-9)


def test_penetration_above_surface_free():
    geom = task_from_name("square")
    assert point_penetration((40.0, 0.0, 0.5), geom) is None


def test_penetration_below_cavity_footprint_free():
    geom = task_from_name("square")
    assert point_penetration((0.0, 0.0, -26.0), geom) is None


def brute_force_escape(p, geom, n_boundary=20000):
    """Independent minimum-translation oracle: vertical escape vs densely
    sampled horizontal boundary distances."""
    x, y, z = p
    best = (-z, np.array([0.0, 0.0, 1.0]))
    if z >= -geom.hole_depth:
        poly = geom.hole_polygon
        n = len(poly)
        per_edge = n_boundary // n
        best_d = math.inf
        best_q = None
        for i in range(n):
            a, b = poly[i], poly[(i + 1) % n]
            for t in np.linspace(0.0, 1.0, per_edge):
                q = a + t * (b - a)
                d = math.hypot(q[0] - x, q[1] - y)
                if d < best_d:
                    best_d = d
                    best_q = q
        if best_d < best[0]:
            direction = np.array([best_q[0] - x, best_q[1] - y, 0.0]) / best_d
            best = (best_d, direction)
    return best


def test_penetration_matches_brute_force_oracle():
    geom = task_from_name("square")
    rng = np.random.default_rng(4)
    checked = 0
    for _ in range(300):
        p = (rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(-20, -0.1))
        res = point_penetration(p, geom)
        if res is None:
            continue
        depth, normal = res
        bd, bn = brute_force_escape(p, geom)
        assert depth == pytest.approx(bd, abs=1e-3)
        if depth > 0.5:  # brute direction is noisy for near-boundary points
            assert float(np.dot(normal, bn)) == pytest.approx(1.0, abs=1e-4)
        checked += 1
    assert checked > 100


def test_make_task_validation():
    with pytest.raises(ValueError):
        make_task("square", 50.0, 0.0)
    with pytest.raises(ValueError):
        make_task("square", 1.0, 2.0)
    with pytest.raises(ValueError):
        make_task("heptagon", 50.0, 1.0)
    with pytest.raises(ValueError):
        make_task("square", 50.0, 1.0, hole_depth=-1.0)
    with pytest.raises(ValueError):
        task_from_name("hexagon")
