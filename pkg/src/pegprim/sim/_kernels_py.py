"""Numpy fallback implementation of the contact kernels.

Mirrors the compiled extension exactly (same algorithm, same stop
semantics); used when the extension is unavailable or explicitly
requested.  All functions are pure: inputs are never mutated.

Conventions: positions mm, angles rad, forces N, torques N*cm.  Poses
are 6-vectors (x, y, z, roll, pitch, yaw) with rotation applied in
fixed-axis X-Y-Z order, i.e. R = Rz(yaw) @ Ry(pitch) @ Rx(roll).
The hole frame differs from the world frame by the true-hole offset
(dx, dy, dyaw).
"""

from __future__ import annotations

import math

import numpy as np

STOP_FORCE = 0
STOP_DISTANCE = 1
STOP_SUCCESS = 2
STOP_CLAMP = 3

PENETRATION_TOL = 0.01  # mm, max residual after resolution
RESOLVE_ITERS = 10
WS_XY = 60.0
WS_Z_HIGH = 60.0
WS_TILT = 0.5  # rad


def rotation_matrix(roll: float, pitch: float, yaw: float) -> np.ndarray:
    cr, sr = math.cos(roll), math.sin(roll)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    return np.array(
        [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
    )


def penetration_batch(pts_hole: np.ndarray, poly: np.ndarray, hole_depth: float):
    """Minimum-translation escape for a batch of hole-frame points.

    Returns (depths, normals): depth 0 and zero normal for free points.
    The solid is {z <= 0} minus the cavity; points below the cavity
    bottom inside its footprint count as free.
    """
    pts_hole = np.asarray(pts_hole, dtype=float)
    x, y, z = pts_hole[:, 0], pts_hole[:, 1], pts_hole[:, 2]
    n = len(pts_hole)
    depths = np.zeros(n)
    normals = np.zeros((n, 3))

    a = poly
    b = np.roll(poly, -1, axis=0)
    e = b - a  # (M,2)
    px = x[:, None] - a[None, :, 0]
    py = y[:, None] - a[None, :, 1]
    cross = e[None, :, 0] * py - e[None, :, 1] * px
    inside = (cross >= 0.0).all(axis=1)

    pen = (z < 0.0) & ~inside
    if not np.any(pen):
        return depths, normals

    idx = np.nonzero(pen)[0]
    depth_a = -z[idx]

    # nearest boundary point, candidate horizontal escape
    ee = (e * e).sum(axis=1)  # (M,)
    t = (px[idx] * e[None, :, 0] + py[idx] * e[None, :, 1]) / ee[None, :]
    t = np.clip(t, 0.0, 1.0)
    qx = a[None, :, 0] + t * e[None, :, 0]
    qy = a[None, :, 1] + t * e[None, :, 1]
    ddx = qx - x[idx, None]
    ddy = qy - y[idx, None]
    d2 = ddx * ddx + ddy * ddy
    j = np.argmin(d2, axis=1)
    rows = np.arange(len(idx))
    dist_b = np.sqrt(d2[rows, j])

    in_band = z[idx] >= -hole_depth
    use_b = in_band & (dist_b < depth_a) & (dist_b > 0.0)

    depths[idx] = np.where(use_b, dist_b, depth_a)
    nz = np.where(use_b, 0.0, 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        nx = np.where(use_b, ddx[rows, j] / dist_b, 0.0)
        ny = np.where(use_b, ddy[rows, j] / dist_b, 0.0)
    normals[idx, 0] = nx
    normals[idx, 1] = ny
    normals[idx, 2] = nz

    # boundary-exact points (dist_b == 0, not in-band handled above) keep
    # the vertical escape, which np.where already selected
    return depths, normals


def _points_in_hole_frame(pose: np.ndarray, dx: float, dy: float, dyaw: float, pts: np.ndarray):
    rot = rotation_matrix(pose[3], pose[4], pose[5])
    world = pts @ rot.T + pose[:3]
    c, s = math.cos(dyaw), math.sin(dyaw)
    rx = world[:, 0] - dx
    ry = world[:, 1] - dy
    out = np.empty_like(world)
    out[:, 0] = c * rx + s * ry
    out[:, 1] = -s * rx + c * ry
    out[:, 2] = world[:, 2]
    return out


def _tcp_hole_frame(pose, dx, dy, dyaw):
    c, s = math.cos(dyaw), math.sin(dyaw)
    rx = pose[0] - dx
    ry = pose[1] - dy
    return np.array([c * rx + s * ry, -s * rx + c * ry, pose[2]])


def contact_wrench(
    pose: np.ndarray,
    dx: float,
    dy: float,
    dyaw: float,
    poly: np.ndarray,
    pts: np.ndarray,
    kp: float,
    hole_depth: float,
) -> np.ndarray:
    """Penalty wrench (force N, torque N*cm about the TCP), world frame."""
    pose = np.asarray(pose, dtype=float)
    pts_h = _points_in_hole_frame(pose, dx, dy, dyaw, pts)
    depths, normals = penetration_batch(pts_h, poly, hole_depth)
    out = np.zeros(6)
    if not np.any(depths > 0.0):
        return out
    forces = kp * depths[:, None] * normals  # hole frame
    f_total = forces.sum(axis=0)
    tcp_h = _tcp_hole_frame(pose, dx, dy, dyaw)
    r_cm = (pts_h - tcp_h) / 10.0
    tau = np.cross(r_cm, forces).sum(axis=0)
    c, s = math.cos(dyaw), math.sin(dyaw)
    out[0] = c * f_total[0] - s * f_total[1]
    out[1] = s * f_total[0] + c * f_total[1]
    out[2] = f_total[2]
    out[3] = c * tau[0] - s * tau[1]
    out[4] = s * tau[0] + c * tau[1]
    out[5] = tau[2]
    return out


def _resolve(pose, dx, dy, dyaw, poly, pts, hole_depth, tol):
    """Push the peg out of penetration along the aggregate escape
    direction.  Returns (pose, residual, ok)."""
    pose = pose.copy()
    c, s = math.cos(dyaw), math.sin(dyaw)
    for _ in range(RESOLVE_ITERS):
        pts_h = _points_in_hole_frame(pose, dx, dy, dyaw, pts)
        depths, normals = penetration_batch(pts_h, poly, hole_depth)
        maxd = float(depths.max()) if len(depths) else 0.0
        if maxd <= tol:
            return pose, maxd, True
        agg = (depths[:, None] * normals).sum(axis=0)
        norm = float(np.linalg.norm(agg))
        if norm < 1e-12:
            return pose, maxd, False
        step = (maxd - 0.5 * tol) / norm
        mx, my, mz = agg[0] * step, agg[1] * step, agg[2] * step
        pose[0] += c * mx - s * my
        pose[1] += s * mx + c * my
        pose[2] += mz
    pts_h = _points_in_hole_frame(pose, dx, dy, dyaw, pts)
    depths, _ = penetration_batch(pts_h, poly, hole_depth)
    maxd = float(depths.max()) if len(depths) else 0.0
    return pose, maxd, maxd <= tol


def _check_success(pose, dx, dy, clearance, succ_depth, succ_tilt):
    if -pose[2] < succ_depth:
        return False
    if math.hypot(pose[0] - dx, pose[1] - dy) > clearance:
        return False
    return abs(pose[3]) <= succ_tilt and abs(pose[4]) <= succ_tilt


def run_primitive(
    pose_in: np.ndarray,
    v6: np.ndarray,
    u3: np.ndarray,
    is_rotation: bool,
    f_lim: float,
    travel_max: float,
    step_cap: float,
    dx: float,
    dy: float,
    dyaw: float,
    poly: np.ndarray,
    pts: np.ndarray,
    kp: float,
    hole_depth: float,
    clearance: float,
    succ_depth: float = 15.0,
    succ_tilt: float = math.radians(1.0),
    tol: float = PENETRATION_TOL,
):
    """Sub-stepped execution of one primitive.

    Per sub-step: advance the pose along ``u3`` (translation in mm or
    euler rates in rad, capped at ``step_cap``), clamp to the workspace,
    evaluate the contact wrench at the commanded (pre-resolution) pose,
    resolve penetration to ``tol``, then test success, the force guard
    and the travel threshold, in that order.

    Returns (pose, wrench, stop_code, substeps, max_residual, travel).
    """
    pose = np.asarray(pose_in, dtype=float).copy()
    v6 = np.asarray(v6, dtype=float)
    u3 = np.asarray(u3, dtype=float)
    v_norm = float(np.linalg.norm(v6))
    skip_force = math.isinf(f_lim)
    wrench = np.zeros(6)
    travel = 0.0
    substeps = 0
    max_residual = 0.0

    while True:
        step = min(step_cap, travel_max - travel)
        if step <= 1e-12:
            return pose, wrench, STOP_DISTANCE, substeps, max_residual, travel

        tentative = pose.copy()
        if is_rotation:
            tentative[3] += u3[0] * step
            tentative[4] += u3[1] * step
            tentative[5] += u3[2] * step
        else:
            tentative[0] += u3[0] * step
            tentative[1] += u3[1] * step
            tentative[2] += u3[2] * step
        tentative[0] = min(WS_XY, max(-WS_XY, tentative[0]))
        tentative[1] = min(WS_XY, max(-WS_XY, tentative[1]))
        tentative[2] = min(WS_Z_HIGH, max(-hole_depth, tentative[2]))
        tentative[3] = min(WS_TILT, max(-WS_TILT, tentative[3]))
        tentative[4] = min(WS_TILT, max(-WS_TILT, tentative[4]))

        if np.array_equal(tentative, pose):
            return pose, wrench, STOP_CLAMP, substeps, max_residual, travel

        wrench = contact_wrench(tentative, dx, dy, dyaw, poly, pts, kp, hole_depth)
        resolved, residual, ok = _resolve(
            tentative, dx, dy, dyaw, poly, pts, hole_depth, tol
        )
        if not ok:
            # wedged: no escape direction; revert the sub-step and stop
            return pose, wrench, STOP_CLAMP, substeps, max_residual, travel

        pose = resolved
        max_residual = max(max_residual, residual)
        travel += step
        substeps += 1

        if _check_success(pose, dx, dy, clearance, succ_depth, succ_tilt):
            return pose, wrench, STOP_SUCCESS, substeps, max_residual, travel
        if not skip_force:
            proj = abs(float(np.dot(v6, wrench))) / v_norm
            if proj > f_lim:
                return pose, wrench, STOP_FORCE, substeps, max_residual, travel
        if travel >= travel_max:
            return pose, wrench, STOP_DISTANCE, substeps, max_residual, travel
