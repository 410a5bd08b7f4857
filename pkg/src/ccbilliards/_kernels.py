"""Scalar numerical kernels for the three constant-curvature models.

Points live on a quadric embedded in R^3:

* k = +1  unit sphere, Euclidean inner product;
* k = -1  upper hyperboloid sheet x^2 + y^2 - z^2 = -1 (z > 0), Minkowski
  form diag(1, 1, -1);
* k = 0   affine plane z = 1, tangent vectors have zero z-component.

Geodesics are ``cos_k(t) p + sin_k(t) v`` with (cosh, sinh) for k = -1 and
(1, t) for k = 0, which makes side intersections a one-variable root of
``a cos_k t + b sin_k t = 0`` in every curvature.

Everything here must stay nopython-compilable: floats, int64 flags and
contiguous float64 arrays only.  Collision sides are passed as flat arrays
(start point, unit start tangent, interior-positive plane functional,
length, endpoint vertex ids).
"""

import math

import numpy as np

from ._accel import jit_kernel

INF = 1e300

# step / trace status codes
STEP_OK = 0
STEP_VERTEX = 1
STEP_GRAZING = 2
STEP_ESCAPED = 3
STEP_MAXLEN = 4

# rk45 status codes
RK_DONE = 0
RK_EXITED = 1
RK_UNDERFLOW = 2
RK_BUFFER_FULL = 3


@jit_kernel
def cosk(k, t):
    if k == 1:
        return math.cos(t)
    if k == -1:
        return math.cosh(t)
    return 1.0


@jit_kernel
def sink(k, t):
    if k == 1:
        return math.sin(t)
    if k == -1:
        return math.sinh(t)
    return t


@jit_kernel
def mdot(k, u, v):
    # model pairing: Minkowski for k=-1, Euclidean otherwise (k=0 uses it
    # only for tangents with zero z and for line functionals)
    if k == -1:
        return u[0] * v[0] + u[1] * v[1] - u[2] * v[2]
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


@jit_kernel
def det3(a, b, c):
    return (a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


@jit_kernel
def renorm_point(k, p):
    out = np.empty(3)
    if k == 1:
        n = math.sqrt(p[0] ** 2 + p[1] ** 2 + p[2] ** 2)
        out[0] = p[0] / n
        out[1] = p[1] / n
        out[2] = p[2] / n
    elif k == -1:
        n = math.sqrt(p[2] ** 2 - p[0] ** 2 - p[1] ** 2)
        out[0] = p[0] / n
        out[1] = p[1] / n
        out[2] = p[2] / n
    else:
        out[0] = p[0]
        out[1] = p[1]
        out[2] = 1.0
    return out


@jit_kernel
def renorm_tangent(k, p, v):
    out = np.empty(3)
    if k == 0:
        n = math.hypot(v[0], v[1])
        out[0] = v[0] / n
        out[1] = v[1] / n
        out[2] = 0.0
        return out
    c = mdot(k, v, p)
    if k == 1:
        out[0] = v[0] - c * p[0]
        out[1] = v[1] - c * p[1]
        out[2] = v[2] - c * p[2]
    else:
        # <p,p>_M = -1, so the tangential part is v + <v,p>_M p
        out[0] = v[0] + c * p[0]
        out[1] = v[1] + c * p[1]
        out[2] = v[2] + c * p[2]
    n = math.sqrt(abs(mdot(k, out, out)))
    out[0] /= n
    out[1] /= n
    out[2] /= n
    return out


@jit_kernel
def geodesic_point(k, p, v, t):
    c = cosk(k, t)
    s = sink(k, t)
    out = np.empty(3)
    out[0] = c * p[0] + s * v[0]
    out[1] = c * p[1] + s * v[1]
    out[2] = c * p[2] + s * v[2]
    return out


@jit_kernel
def geodesic_dir(k, p, v, t):
    out = np.empty(3)
    if k == 0:
        out[0] = v[0]
        out[1] = v[1]
        out[2] = 0.0
        return out
    c = cosk(k, t)
    s = sink(k, t)
    out[0] = -k * s * p[0] + c * v[0]
    out[1] = -k * s * p[1] + c * v[1]
    out[2] = -k * s * p[2] + c * v[2]
    return out


@jit_kernel
def distance(k, a, b):
    # chordal forms keep full precision near zero distance
    if k == 1:
        ch = math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)
        h = 0.5 * ch
        if h > 1.0:
            h = 1.0
        return 2.0 * math.asin(h)
    if k == -1:
        d0 = a[0] - b[0]
        d1 = a[1] - b[1]
        d2 = a[2] - b[2]
        q = d0 * d0 + d1 * d1 - d2 * d2
        if q < 0.0:
            q = 0.0
        return 2.0 * math.asinh(0.5 * math.sqrt(q))
    return math.hypot(a[0] - b[0], a[1] - b[1])


@jit_kernel
def perp(k, p, w):
    # +90 degree rotation of the tangent w in the oriented tangent plane at p
    out = np.empty(3)
    if k == 0:
        out[0] = -w[1]
        out[1] = w[0]
        out[2] = 0.0
        return out
    cx = p[1] * w[2] - p[2] * w[1]
    cy = p[2] * w[0] - p[0] * w[2]
    cz = p[0] * w[1] - p[1] * w[0]
    out[0] = cx
    out[1] = cy
    if k == 1:
        out[2] = cz
    else:
        out[2] = -cz
    return out


@jit_kernel
def signed_angle(k, p, u, v):
    # CCW angle from u to v in the oriented tangent plane at p, in (-pi, pi]
    c = mdot(k, u, v)
    s = det3(p, u, v)
    return math.atan2(s, c)


@jit_kernel
def log_map(k, p, q):
    # unit tangent at p toward q; caller guarantees q != p (and q != -p on
    # the sphere)
    out = np.empty(3)
    if k == 0:
        out[0] = q[0] - p[0]
        out[1] = q[1] - p[1]
        out[2] = 0.0
        n = math.hypot(out[0], out[1])
        out[0] /= n
        out[1] /= n
        return out
    c = mdot(k, q, p)
    if k == 1:
        out[0] = q[0] - c * p[0]
        out[1] = q[1] - c * p[1]
        out[2] = q[2] - c * p[2]
    else:
        out[0] = q[0] + c * p[0]
        out[1] = q[1] + c * p[1]
        out[2] = q[2] + c * p[2]
    n = math.sqrt(abs(mdot(k, out, out)))
    out[0] /= n
    out[1] /= n
    out[2] /= n
    return out


@jit_kernel
def boundary_embed(k, a, u, s, psi):
    """Embed a boundary state: point at arc s on the side (a, u), direction
    rotated by psi from the side's forward tangent."""
    bp = geodesic_point(k, a, u, s)
    bp = renorm_point(k, bp)
    w = geodesic_dir(k, a, u, s)
    w = renorm_tangent(k, bp, w)
    e2 = perp(k, bp, w)
    c = math.cos(psi)
    sn = math.sin(psi)
    d = np.empty(3)
    d[0] = c * w[0] + sn * e2[0]
    d[1] = c * w[1] + sn * e2[1]
    d[2] = c * w[2] + sn * e2[2]
    d = renorm_tangent(k, bp, d)
    return bp, d


@jit_kernel
def ray_side_hit(k, p, v, a_pt, u, n, seg_len, tmin, pad):
    """First crossing of the geodesic (p, v) with one side segment.

    Returns (t, s); t = INF when no crossing with t > tmin lands at an arc
    parameter s in [-pad, seg_len + pad].
    """
    a = mdot(k, n, p)
    b = mdot(k, n, v)
    if k == 0:
        if abs(b) < 1e-15:
            return INF, 0.0
        t = -a / b
        if t <= tmin:
            return INF, 0.0
        qx = p[0] + t * v[0]
        qy = p[1] + t * v[1]
        s = (qx - a_pt[0]) * u[0] + (qy - a_pt[1]) * u[1]
        if s < -pad or s > seg_len + pad:
            return INF, 0.0
        return t, s
    if k == -1:
        if abs(b) <= abs(a):
            return INF, 0.0
        t = math.atanh(-a / b)
        if t <= tmin:
            return INF, 0.0
        q = geodesic_point(-1, p, v, t)
        s = math.asinh(q[0] * u[0] + q[1] * u[1] - q[2] * u[2])
        if s < -pad or s > seg_len + pad:
            return INF, 0.0
        return t, s
    # sphere: roots repeat every pi along the great circle
    if abs(a) < 1e-15 and abs(b) < 1e-15:
        return INF, 0.0
    t0 = math.atan2(-a, b) % math.pi
    for m in range(3):
        t = t0 + m * math.pi
        if t <= tmin:
            continue
        q = geodesic_point(1, p, v, t)
        s = math.atan2(q[0] * u[0] + q[1] * u[1] + q[2] * u[2],
                       q[0] * a_pt[0] + q[1] * a_pt[1] + q[2] * a_pt[2])
        if -pad <= s <= seg_len + pad:
            return t, s
    return INF, 0.0


@jit_kernel
def step_ray(k, sa, su, sn, sl, sv0, sv1, verts, p, v, tmin, tol_v, graze):
    """One collision of the ray (p, v) with the polygon boundary.

    Returns (status, side, s, psi, flight, vertex).  psi is the outgoing
    angle from the hit side's forward tangent; vertex is the 0-based vertex
    id on STEP_VERTEX, else -1.
    """
    nsides = sl.shape[0]
    best_t = INF
    best_j = -1
    best_s = 0.0
    for j in range(nsides):
        t, s = ray_side_hit(k, p, v, sa[j], su[j], sn[j], sl[j], tmin, tol_v)
        if t < best_t:
            best_t = t
            best_j = j
            best_s = s
    if best_j < 0:
        return STEP_ESCAPED, -1, 0.0, 0.0, 0.0, -1
    q = geodesic_point(k, p, v, best_t)
    q = renorm_point(k, q)
    i0 = sv0[best_j]
    i1 = sv1[best_j]
    if distance(k, q, verts[i0]) < tol_v:
        return STEP_VERTEX, best_j, best_s, 0.0, best_t, i0
    if distance(k, q, verts[i1]) < tol_v:
        return STEP_VERTEX, best_j, best_s, 0.0, best_t, i1
    w_in = geodesic_dir(k, p, v, best_t)
    w_in = renorm_tangent(k, q, w_in)
    r = np.empty(3)
    if k == 0:
        sd0 = su[best_j]
        c2 = w_in[0] * sd0[0] + w_in[1] * sd0[1]
        r[0] = 2.0 * c2 * sd0[0] - w_in[0]
        r[1] = 2.0 * c2 * sd0[1] - w_in[1]
        r[2] = 0.0
    else:
        nj = sn[best_j]
        c2 = mdot(k, w_in, nj)
        r[0] = w_in[0] - 2.0 * c2 * nj[0]
        r[1] = w_in[1] - 2.0 * c2 * nj[1]
        r[2] = w_in[2] - 2.0 * c2 * nj[2]
    r = renorm_tangent(k, q, r)
    sd = geodesic_dir(k, sa[best_j], su[best_j], best_s)
    sd = renorm_tangent(k, q, sd)
    psi = signed_angle(k, q, sd, r)
    if psi < graze or psi > math.pi - graze:
        return STEP_GRAZING, best_j, best_s, psi, best_t, -1
    s1 = best_s
    if s1 < 0.0:
        s1 = 0.0
    if s1 > sl[best_j]:
        s1 = sl[best_j]
    return STEP_OK, best_j, s1, psi, best_t, -1


@jit_kernel
def collision_step_state(k, sa, su, sn, sl, sv0, sv1, verts,
                         side0, s0, psi0, tmin, tol_v, graze):
    p, v = boundary_embed(k, sa[side0], su[side0], s0, psi0)
    return step_ray(k, sa, su, sn, sl, sv0, sv1, verts, p, v, tmin, tol_v, graze)


@jit_kernel
def trace_orbit(k, sa, su, sn, sl, sv0, sv1, verts,
                side0, s0, psi0, nmax, maxlen, tmin, tol_v, graze,
                labels, svals, psis, flens):
    """Iterate the collision map from a boundary state.

    Fills per-bounce buffers and returns (n_done, status, vertex, length);
    length includes the final leg on a vertex hit.
    """
    side = side0
    s = s0
    psi = psi0
    total = 0.0
    for i in range(nmax):
        st, j, s1, psi1, tf, vtx = collision_step_state(
            k, sa, su, sn, sl, sv0, sv1, verts, side, s, psi, tmin, tol_v, graze)
        if st == STEP_VERTEX:
            return i, STEP_VERTEX, vtx, total + tf
        if st != STEP_OK:
            return i, st, -1, total
        labels[i] = j
        svals[i] = s1
        psis[i] = psi1
        flens[i] = tf
        total += tf
        side = j
        s = s1
        psi = psi1
        if total > maxlen:
            return i + 1, STEP_MAXLEN, -1, total
    return nmax, STEP_OK, -1, total


@jit_kernel
def trace_from_point(k, sa, su, sn, sl, sv0, sv1, verts,
                     p0, v0, nmax, maxlen, tmin, tol_v, graze,
                     labels, svals, psis, flens):
    """Like trace_orbit, but launched from an arbitrary interior ray.

    Used by the diagonal search, whose rays start at polygon vertices.
    """
    p = p0
    v = v0
    total = 0.0
    first = True
    side = -1
    s = 0.0
    psi = 0.0
    for i in range(nmax):
        if not first:
            p, v = boundary_embed(k, sa[side], su[side], s, psi)
        st, j, s1, psi1, tf, vtx = step_ray(
            k, sa, su, sn, sl, sv0, sv1, verts, p, v, tmin, tol_v, graze)
        if st == STEP_VERTEX:
            return i, STEP_VERTEX, vtx, total + tf
        if st != STEP_OK:
            return i, st, -1, total
        labels[i] = j
        svals[i] = s1
        psis[i] = psi1
        flens[i] = tf
        total += tf
        side = j
        s = s1
        psi = psi1
        first = False
        if total > maxlen:
            return i + 1, STEP_MAXLEN, -1, total
    return nmax, STEP_OK, -1, total


@jit_kernel
def unfold_crossings(k, sa, su, sn, sl, refl, p0, v0, nmax, tmin, pad, labels):
    """Crossing labels of the unfolded straight line, pulled back stepwise.

    refl holds one reflection matrix per side; matrices act on embedded
    3-vectors for every curvature (homogeneous form when k = 0, where they
    also transport directions since those have zero last component).
    Never touches boundary (s, psi) coordinates: independent route to the
    itinerary.
    """
    nsides = sl.shape[0]
    p = p0.copy()
    v = v0.copy()
    n_done = 0
    for m in range(nmax):
        best_t = INF
        best_j = -1
        for j in range(nsides):
            t, s = ray_side_hit(k, p, v, sa[j], su[j], sn[j], sl[j], tmin, pad)
            if t < best_t:
                best_t = t
                best_j = j
        if best_j < 0:
            return n_done
        labels[m] = best_j
        n_done = m + 1
        q = geodesic_point(k, p, v, best_t)
        q = renorm_point(k, q)
        w = geodesic_dir(k, p, v, best_t)
        w = renorm_tangent(k, q, w)
        mat = refl[best_j]
        p2 = np.empty(3)
        v2 = np.empty(3)
        for r in range(3):
            p2[r] = mat[r, 0] * q[0] + mat[r, 1] * q[1] + mat[r, 2] * q[2]
            v2[r] = mat[r, 0] * w[0] + mat[r, 1] * w[1] + mat[r, 2] * w[2]
        p = renorm_point(k, p2)
        v = renorm_tangent(k, p, v2)
    return n_done


# ---------------------------------------------------------------------------
# adaptive Runge-Kutta (Dormand-Prince 5(4)) for the two vertex fields
# ---------------------------------------------------------------------------

# field ids
FIELD_POLAR = 0       # (r, gamma, beta) geodesic field, curvature k
FIELD_CHART = 1       # (x, y, z) rescaled chart field, pf = pi / theta
FIELD_CHART_ARC = 2   # chart field augmented with accumulated geodesic time


@jit_kernel
def field_eval(field_id, k, pf, y, out):
    if field_id == FIELD_POLAR:
        r = y[0]
        beta = y[2]
        sk = sink(k, r)
        ck = cosk(k, r)
        sb = math.sin(beta)
        out[0] = math.cos(beta)
        out[1] = sb / sk
        out[2] = -ck * sb / sk
    else:
        x = y[0]
        yy = y[1]
        z = y[2]
        f = math.sqrt(1.0 - k * (x * x + yy * yy))
        cz = math.cos(z)
        sz = math.sin(z)
        out[0] = f * x * cz - pf * yy * sz
        out[1] = f * yy * cz + pf * x * sz
        out[2] = -f * sz
        if field_id == FIELD_CHART_ARC:
            out[3] = math.hypot(x, yy)


@jit_kernel
def _field_radius(field_id, y):
    if field_id == FIELD_POLAR:
        return y[0]
    return math.hypot(y[0], y[1])


@jit_kernel
def _dp_step(field_id, k, pf, y, h, dim):
    # one 5th-order Dormand-Prince step (no error estimate)
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    k5 = np.empty(dim)
    k6 = np.empty(dim)
    tmp = np.empty(dim)
    out = np.empty(dim)
    field_eval(field_id, k, pf, y, k1)
    for i in range(dim):
        tmp[i] = y[i] + h * (0.2 * k1[i])
    field_eval(field_id, k, pf, tmp, k2)
    for i in range(dim):
        tmp[i] = y[i] + h * (3.0 / 40.0 * k1[i] + 9.0 / 40.0 * k2[i])
    field_eval(field_id, k, pf, tmp, k3)
    for i in range(dim):
        tmp[i] = y[i] + h * (44.0 / 45.0 * k1[i] - 56.0 / 15.0 * k2[i]
                             + 32.0 / 9.0 * k3[i])
    field_eval(field_id, k, pf, tmp, k4)
    for i in range(dim):
        tmp[i] = y[i] + h * (19372.0 / 6561.0 * k1[i] - 25360.0 / 2187.0 * k2[i]
                             + 64448.0 / 6561.0 * k3[i] - 212.0 / 729.0 * k4[i])
    field_eval(field_id, k, pf, tmp, k5)
    for i in range(dim):
        tmp[i] = y[i] + h * (9017.0 / 3168.0 * k1[i] - 355.0 / 33.0 * k2[i]
                             + 46732.0 / 5247.0 * k3[i] + 49.0 / 176.0 * k4[i]
                             - 5103.0 / 18656.0 * k5[i])
    field_eval(field_id, k, pf, tmp, k6)
    for i in range(dim):
        out[i] = y[i] + h * (35.0 / 384.0 * k1[i] + 500.0 / 1113.0 * k3[i]
                             + 125.0 / 192.0 * k4[i] - 2187.0 / 6784.0 * k5[i]
                             + 11.0 / 84.0 * k6[i])
    return out


@jit_kernel
def rk45(field_id, k, pf, y0, t0, t1, rtol, atol, rlo, rhi,
         tbuf, ybuf, record):
    """Adaptive Dormand-Prince 5(4) with a radial exit window.

    Integration stops when the field radius leaves [rlo, rhi]; the crossing
    is bisected inside the offending step.  Accepted states go to the
    buffers when record != 0.  Returns (status, nrec, t_end, y_end).
    """
    dim = y0.shape[0]
    y = y0.copy()
    t = t0
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    k5 = np.empty(dim)
    k6 = np.empty(dim)
    k7 = np.empty(dim)
    tmp = np.empty(dim)
    ynew = np.empty(dim)
    nrec = 0
    cap = tbuf.shape[0]
    if record != 0:
        tbuf[0] = t0
        for i in range(dim):
            ybuf[0, i] = y0[i]
        nrec = 1
    span = t1 - t0
    if span == 0.0:
        return RK_DONE, nrec, t, y
    sgn = 1.0 if span > 0.0 else -1.0
    h = span / 128.0
    while (t - t1) * sgn < 0.0:
        if (t + h - t1) * sgn > 0.0:
            h = t1 - t
        field_eval(field_id, k, pf, y, k1)
        for i in range(dim):
            tmp[i] = y[i] + h * (0.2 * k1[i])
        field_eval(field_id, k, pf, tmp, k2)
        for i in range(dim):
            tmp[i] = y[i] + h * (3.0 / 40.0 * k1[i] + 9.0 / 40.0 * k2[i])
        field_eval(field_id, k, pf, tmp, k3)
        for i in range(dim):
            tmp[i] = y[i] + h * (44.0 / 45.0 * k1[i] - 56.0 / 15.0 * k2[i]
                                 + 32.0 / 9.0 * k3[i])
        field_eval(field_id, k, pf, tmp, k4)
        for i in range(dim):
            tmp[i] = y[i] + h * (19372.0 / 6561.0 * k1[i]
                                 - 25360.0 / 2187.0 * k2[i]
                                 + 64448.0 / 6561.0 * k3[i]
                                 - 212.0 / 729.0 * k4[i])
        field_eval(field_id, k, pf, tmp, k5)
        for i in range(dim):
            tmp[i] = y[i] + h * (9017.0 / 3168.0 * k1[i] - 355.0 / 33.0 * k2[i]
                                 + 46732.0 / 5247.0 * k3[i]
                                 + 49.0 / 176.0 * k4[i]
                                 - 5103.0 / 18656.0 * k5[i])
        field_eval(field_id, k, pf, tmp, k6)
        for i in range(dim):
            ynew[i] = y[i] + h * (35.0 / 384.0 * k1[i] + 500.0 / 1113.0 * k3[i]
                                  + 125.0 / 192.0 * k4[i]
                                  - 2187.0 / 6784.0 * k5[i]
                                  + 11.0 / 84.0 * k6[i])
        field_eval(field_id, k, pf, ynew, k7)
        errn = 0.0
        for i in range(dim):
            e = h * (71.0 / 57600.0 * k1[i] - 71.0 / 16695.0 * k3[i]
                     + 71.0 / 1920.0 * k4[i] - 17253.0 / 339200.0 * k5[i]
                     + 22.0 / 525.0 * k6[i] - 1.0 / 40.0 * k7[i])
            ay = abs(y[i])
            an = abs(ynew[i])
            sc = atol + rtol * (ay if ay > an else an)
            q = e / sc
            errn += q * q
        errn = math.sqrt(errn / dim)
        if errn <= 1.0:
            rad = _field_radius(field_id, ynew)
            if rad > rhi or rad < rlo:
                lo = 0.0
                hi = 1.0
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    ytr = _dp_step(field_id, k, pf, y, mid * h, dim)
                    rr = _field_radius(field_id, ytr)
                    if rr > rhi or rr < rlo:
                        hi = mid
                    else:
                        lo = mid
                yex = _dp_step(field_id, k, pf, y, hi * h, dim)
                tex = t + hi * h
                if record != 0 and nrec < cap:
                    tbuf[nrec] = tex
                    for i in range(dim):
                        ybuf[nrec, i] = yex[i]
                    nrec += 1
                return RK_EXITED, nrec, tex, yex
            t = t + h
            for i in range(dim):
                y[i] = ynew[i]
            if record != 0:
                if nrec >= cap:
                    return RK_BUFFER_FULL, nrec, t, y
                tbuf[nrec] = t
                for i in range(dim):
                    ybuf[nrec, i] = y[i]
                nrec += 1
            if errn == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * errn ** -0.2
                if fac > 5.0:
                    fac = 5.0
                if fac < 0.2:
                    fac = 0.2
            h = h * fac
        else:
            fac = 0.9 * errn ** -0.2
            if fac < 0.2:
                fac = 0.2
            h = h * fac
        if abs(h) < 1e-14 * (1.0 + abs(t)):
            return RK_UNDERFLOW, nrec, t, y
    return RK_DONE, nrec, t, y
