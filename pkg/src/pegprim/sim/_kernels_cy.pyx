# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled contact kernels.

Same algorithm and stop semantics as ``_kernels_py``; that module is the
readable reference.  Keep the two in lockstep when changing either.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, fabs, isinf, sin, sqrt

cnp.import_array()

STOP_FORCE = 0
STOP_DISTANCE = 1
STOP_SUCCESS = 2
STOP_CLAMP = 3

PENETRATION_TOL = 0.01
RESOLVE_ITERS = 10
WS_XY = 60.0
WS_Z_HIGH = 60.0
WS_TILT = 0.5

cdef double _WS_XY = 60.0
cdef double _WS_Z_HIGH = 60.0
cdef double _WS_TILT = 0.5
cdef int _RESOLVE_ITERS = 10


cdef inline double _clampd(double v, double lo, double hi) nogil:
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


cdef inline int _point_pen(double x, double y, double z,
                           const double[:, ::1] poly, Py_ssize_t m,
                           double hole_depth,
                           double* depth, double* nx, double* ny, double* nz) nogil:
    """Minimum-translation escape for one hole-frame point; 1 if penetrating."""
    cdef Py_ssize_t i, j
    cdef double ax, ay, bx, by, ex, ey, cr, t, qx, qy, ddx, ddy, d2
    cdef double best_d2, best_qx, best_qy, dist_b, depth_a
    cdef bint inside

    if z >= 0.0:
        return 0
    inside = True
    for i in range(m):
        ax = poly[i, 0]
        ay = poly[i, 1]
        j = i + 1
        if j == m:
            j = 0
        bx = poly[j, 0]
        by = poly[j, 1]
        cr = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
        if cr < 0.0:
            inside = False
            break
    if inside:
        return 0

    depth_a = -z
    if z >= -hole_depth:
        best_d2 = 1e300
        best_qx = 0.0
        best_qy = 0.0
        for i in range(m):
            ax = poly[i, 0]
            ay = poly[i, 1]
            j = i + 1
            if j == m:
                j = 0
            ex = poly[j, 0] - ax
            ey = poly[j, 1] - ay
            t = ((x - ax) * ex + (y - ay) * ey) / (ex * ex + ey * ey)
            t = _clampd(t, 0.0, 1.0)
            qx = ax + t * ex
            qy = ay + t * ey
            ddx = qx - x
            ddy = qy - y
            d2 = ddx * ddx + ddy * ddy
            if d2 < best_d2:
                best_d2 = d2
                best_qx = qx
                best_qy = qy
        dist_b = sqrt(best_d2)
        if dist_b < depth_a and dist_b > 0.0:
            depth[0] = dist_b
            nx[0] = (best_qx - x) / dist_b
            ny[0] = (best_qy - y) / dist_b
            nz[0] = 0.0
            return 1
    depth[0] = depth_a
    nx[0] = 0.0
    ny[0] = 0.0
    nz[0] = 1.0
    return 1


cdef void _rotmat(double roll, double pitch, double yaw, double* R) nogil:
    cdef double cr = cos(roll), sr = sin(roll)
    cdef double cp = cos(pitch), sp = sin(pitch)
    cdef double cy = cos(yaw), sy = sin(yaw)
    R[0] = cy * cp
    R[1] = cy * sp * sr - sy * cr
    R[2] = cy * sp * cr + sy * sr
    R[3] = sy * cp
    R[4] = sy * sp * sr + cy * cr
    R[5] = sy * sp * cr - cy * sr
    R[6] = -sp
    R[7] = cp * sr
    R[8] = cp * cr


cdef int _wrench_sweep(double* pose, double dxh, double dyh, double cz, double sz,
                       const double[:, ::1] poly, Py_ssize_t m,
                       const double[:, ::1] pts, Py_ssize_t n,
                       double kp, double hole_depth,
                       double* out6) nogil:
    """Accumulate the contact wrench in the hole frame, then rotate to
    world.  Returns the number of penetrating points."""
    cdef double R[9]
    cdef double wx, wy, wz, rx, ry, hx, hy, hz
    cdef double tcx, tcy, tcz
    cdef double d, nx, ny, nz, fx, fy, fz
    cdef double Fx = 0.0, Fy = 0.0, Fz = 0.0
    cdef double Tx = 0.0, Ty = 0.0, Tz = 0.0
    cdef double rcx, rcy, rcz
    cdef Py_ssize_t i
    cdef int hits = 0

    _rotmat(pose[3], pose[4], pose[5], R)
    rx = pose[0] - dxh
    ry = pose[1] - dyh
    tcx = cz * rx + sz * ry
    tcy = -sz * rx + cz * ry
    tcz = pose[2]

    for i in range(n):
        wx = R[0] * pts[i, 0] + R[1] * pts[i, 1] + R[2] * pts[i, 2] + pose[0]
        wy = R[3] * pts[i, 0] + R[4] * pts[i, 1] + R[5] * pts[i, 2] + pose[1]
        wz = R[6] * pts[i, 0] + R[7] * pts[i, 1] + R[8] * pts[i, 2] + pose[2]
        rx = wx - dxh
        ry = wy - dyh
        hx = cz * rx + sz * ry
        hy = -sz * rx + cz * ry
        hz = wz
        if _point_pen(hx, hy, hz, poly, m, hole_depth, &d, &nx, &ny, &nz):
            hits += 1
            fx = kp * d * nx
            fy = kp * d * ny
            fz = kp * d * nz
            Fx += fx
            Fy += fy
            Fz += fz
            rcx = (hx - tcx) / 10.0
            rcy = (hy - tcy) / 10.0
            rcz = (hz - tcz) / 10.0
            Tx += rcy * fz - rcz * fy
            Ty += rcz * fx - rcx * fz
            Tz += rcx * fy - rcy * fx

    out6[0] = cz * Fx - sz * Fy
    out6[1] = sz * Fx + cz * Fy
    out6[2] = Fz
    out6[3] = cz * Tx - sz * Ty
    out6[4] = sz * Tx + cz * Ty
    out6[5] = Tz
    return hits


cdef void _pen_sweep(double* pose, double dxh, double dyh, double cz, double sz,
                     const double[:, ::1] poly, Py_ssize_t m,
                     const double[:, ::1] pts, Py_ssize_t n,
                     double hole_depth,
                     double* maxd, double* aggx, double* aggy, double* aggz) nogil:
    """Max penetration depth and depth-weighted escape direction (hole frame)."""
    cdef double R[9]
    cdef double wx, wy, wz, rx, ry, hx, hy, hz
    cdef double d, nx, ny, nz
    cdef Py_ssize_t i

    _rotmat(pose[3], pose[4], pose[5], R)
    maxd[0] = 0.0
    aggx[0] = 0.0
    aggy[0] = 0.0
    aggz[0] = 0.0
    for i in range(n):
        wx = R[0] * pts[i, 0] + R[1] * pts[i, 1] + R[2] * pts[i, 2] + pose[0]
        wy = R[3] * pts[i, 0] + R[4] * pts[i, 1] + R[5] * pts[i, 2] + pose[1]
        wz = R[6] * pts[i, 0] + R[7] * pts[i, 1] + R[8] * pts[i, 2] + pose[2]
        rx = wx - dxh
        ry = wy - dyh
        hx = cz * rx + sz * ry
        hy = -sz * rx + cz * ry
        hz = wz
        if _point_pen(hx, hy, hz, poly, m, hole_depth, &d, &nx, &ny, &nz):
            if d > maxd[0]:
                maxd[0] = d
            aggx[0] += d * nx
            aggy[0] += d * ny
            aggz[0] += d * nz


cdef int _resolve(double* pose, double dxh, double dyh, double cz, double sz,
                  const double[:, ::1] poly, Py_ssize_t m,
                  const double[:, ::1] pts, Py_ssize_t n,
                  double hole_depth, double tol, double* residual) nogil:
    cdef double maxd, ax, ay, az, norm, step, mx, my, mz
    cdef int it
    for it in range(_RESOLVE_ITERS):
        _pen_sweep(pose, dxh, dyh, cz, sz, poly, m, pts, n, hole_depth,
                   &maxd, &ax, &ay, &az)
        if maxd <= tol:
            residual[0] = maxd
            return 1
        norm = sqrt(ax * ax + ay * ay + az * az)
        if norm < 1e-12:
            residual[0] = maxd
            return 0
        step = (maxd - 0.5 * tol) / norm
        mx = ax * step
        my = ay * step
        mz = az * step
        pose[0] += cz * mx - sz * my
        pose[1] += sz * mx + cz * my
        pose[2] += mz
    _pen_sweep(pose, dxh, dyh, cz, sz, poly, m, pts, n, hole_depth,
               &maxd, &ax, &ay, &az)
    residual[0] = maxd
    return maxd <= tol


def penetration_batch(pts_hole, poly, double hole_depth):
    """Hole-frame point penetration; mirrors the numpy reference."""
    cdef const double[:, ::1] P = np.ascontiguousarray(pts_hole, dtype=np.float64)
    cdef const double[:, ::1] G = np.ascontiguousarray(poly, dtype=np.float64)
    cdef Py_ssize_t n = P.shape[0]
    cdef Py_ssize_t m = G.shape[0]
    depths = np.zeros(n)
    normals = np.zeros((n, 3))
    cdef double[::1] D = depths
    cdef double[:, ::1] N = normals
    cdef double d, nx, ny, nz
    cdef Py_ssize_t i
    for i in range(n):
        if _point_pen(P[i, 0], P[i, 1], P[i, 2], G, m, hole_depth,
                      &d, &nx, &ny, &nz):
            D[i] = d
            N[i, 0] = nx
            N[i, 1] = ny
            N[i, 2] = nz
    return depths, normals


def contact_wrench(pose, double dx, double dy, double dyaw,
                   poly, pts, double kp, double hole_depth):
    cdef const double[::1] pv = np.ascontiguousarray(pose, dtype=np.float64)
    cdef const double[:, ::1] G = np.ascontiguousarray(poly, dtype=np.float64)
    cdef const double[:, ::1] P = np.ascontiguousarray(pts, dtype=np.float64)
    out = np.zeros(6)
    cdef double[::1] ov = out
    cdef double cz = cos(dyaw)
    cdef double sz = sin(dyaw)
    cdef double buf[6]
    cdef double posebuf[6]
    cdef int i
    for i in range(6):
        posebuf[i] = pv[i]
    _wrench_sweep(posebuf, dx, dy, cz, sz, G, G.shape[0], P, P.shape[0],
                  kp, hole_depth, buf)
    for i in range(6):
        ov[i] = buf[i]
    return out


def run_primitive(pose_in, v6, u3, bint is_rotation, double f_lim,
                  double travel_max, double step_cap,
                  double dx, double dy, double dyaw,
                  poly, pts, double kp, double hole_depth, double clearance,
                  double succ_depth=15.0, double succ_tilt=0.017453292519943295,
                  double tol=0.01):
    """Sub-stepped primitive execution; see the numpy reference for the
    full contract."""
    cdef const double[::1] pv = np.ascontiguousarray(pose_in, dtype=np.float64)
    cdef const double[::1] vv = np.ascontiguousarray(v6, dtype=np.float64)
    cdef const double[::1] uv = np.ascontiguousarray(u3, dtype=np.float64)
    cdef const double[:, ::1] G = np.ascontiguousarray(poly, dtype=np.float64)
    cdef const double[:, ::1] P = np.ascontiguousarray(pts, dtype=np.float64)
    cdef Py_ssize_t m = G.shape[0]
    cdef Py_ssize_t n = P.shape[0]

    cdef double pose[6]
    cdef double tent[6]
    cdef double wrench[6]
    cdef double v[6]
    cdef double u[3]
    cdef int i
    for i in range(6):
        pose[i] = pv[i]
        wrench[i] = 0.0
        v[i] = vv[i]
    for i in range(3):
        u[i] = uv[i]

    cdef double cz = cos(dyaw)
    cdef double sz = sin(dyaw)
    cdef double v_norm = sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
                              + v[3] * v[3] + v[4] * v[4] + v[5] * v[5])
    cdef bint skip_force = isinf(f_lim)
    cdef double travel = 0.0
    cdef double max_residual = 0.0
    cdef double residual, step, proj, lat_dx, lat_dy
    cdef int substeps = 0
    cdef int code = -1
    cdef bint same, success

    while True:
        step = travel_max - travel
        if step > step_cap:
            step = step_cap
        if step <= 1e-12:
            code = STOP_DISTANCE
            break

        for i in range(6):
            tent[i] = pose[i]
        if is_rotation:
            tent[3] += u[0] * step
            tent[4] += u[1] * step
            tent[5] += u[2] * step
        else:
            tent[0] += u[0] * step
            tent[1] += u[1] * step
            tent[2] += u[2] * step
        tent[0] = _clampd(tent[0], -_WS_XY, _WS_XY)
        tent[1] = _clampd(tent[1], -_WS_XY, _WS_XY)
        tent[2] = _clampd(tent[2], -hole_depth, _WS_Z_HIGH)
        tent[3] = _clampd(tent[3], -_WS_TILT, _WS_TILT)
        tent[4] = _clampd(tent[4], -_WS_TILT, _WS_TILT)

        same = True
        for i in range(6):
            if tent[i] != pose[i]:
                same = False
                break
        if same:
            code = STOP_CLAMP
            break

        _wrench_sweep(tent, dx, dy, cz, sz, G, m, P, n, kp, hole_depth, wrench)
        if not _resolve(tent, dx, dy, cz, sz, G, m, P, n, hole_depth, tol,
                        &residual):
            code = STOP_CLAMP
            break

        for i in range(6):
            pose[i] = tent[i]
        if residual > max_residual:
            max_residual = residual
        travel += step
        substeps += 1

        success = False
        if -pose[2] >= succ_depth:
            lat_dx = pose[0] - dx
            lat_dy = pose[1] - dy
            if sqrt(lat_dx * lat_dx + lat_dy * lat_dy) <= clearance:
                if fabs(pose[3]) <= succ_tilt and fabs(pose[4]) <= succ_tilt:
                    success = True
        if success:
            code = STOP_SUCCESS
            break
        if not skip_force:
            proj = fabs(v[0] * wrench[0] + v[1] * wrench[1] + v[2] * wrench[2]
                        + v[3] * wrench[3] + v[4] * wrench[4]
                        + v[5] * wrench[5]) / v_norm
            if proj > f_lim:
                code = STOP_FORCE
                break
        if travel >= travel_max:
            code = STOP_DISTANCE
            break

    pose_out = np.empty(6)
    wrench_out = np.empty(6)
    cdef double[::1] po = pose_out
    cdef double[::1] wo = wrench_out
    for i in range(6):
        po[i] = pose[i]
        wo[i] = wrench[i]
    return pose_out, wrench_out, code, substeps, max_residual, travel
