"""Billiard flow near a vertex: charts, velocity fields, closed-form flow.

Near a vertex with interior angle theta the flow is described in polar
coordinates (r, gamma, beta): distance to the vertex, angular position
around it (mod 2 theta), and the direction angle measured CCW from the
outgoing radial direction.  The chart map

    (r, gamma, beta)  ->  (r cos(gamma pi / theta), r sin(gamma pi / theta), beta)

opens the wedge to a full disc; the circle r = 0 compactifies the vertex.

After rescaling time by sink(k, r) the flow extends smoothly over r = 0.
The extended field in disc coordinates is

    (f x cos z - (pi/theta) y sin z,  f y cos z + (pi/theta) x sin z,  -f sin z),

with f = sqrt(1 - k (x^2 + y^2)).  This expression is exact when the disc
radius is sink(k, r) rather than r itself (for k = 0 the two agree); the
pair :func:`chart_embed` / :func:`chart_extract` provides that
dynamics-consistent radial convention, while :func:`chart_forward` /
:func:`chart_inverse` keep the plain curvature-independent chart.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ChartExitError, GeometryError, SingularFieldError
from .geometry import check_curvature

TWO_PI = 2.0 * math.pi

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


@dataclass(frozen=True)
class ChartState:
    """Vertex polar coordinates (r, gamma, beta)."""

    r: float
    gamma: float
    beta: float

    def as_array(self):
        return np.array([self.r, self.gamma, self.beta])


@dataclass(frozen=True)
class CartesianChartState:
    """Disc chart coordinates (x, y, z) near a vertex."""

    x: float
    y: float
    z: float

    def as_array(self):
        return np.array([self.x, self.y, self.z])


def _check_theta(theta):
    if not theta > 0.0:
        raise GeometryError(f"vertex angle must be positive, got {theta}")


def chart_forward(s, theta):
    """Wedge-to-disc chart; the circle r = 0 collapses gamma."""
    _check_theta(theta)
    a = s.gamma * math.pi / theta
    return CartesianChartState(s.r * math.cos(a), s.r * math.sin(a),
                               s.beta % TWO_PI)


def chart_inverse(c, theta):
    _check_theta(theta)
    r = math.hypot(c.x, c.y)
    if r == 0.0:
        gamma = 0.0
    else:
        gamma = (math.atan2(c.y, c.x) * theta / math.pi) % (2.0 * theta)
    return ChartState(r, gamma, c.z % TWO_PI)


def chart_embed(s, theta, k):
    """Chart map whose disc radius is sink(k, r).

    This is the radial convention under which the extended field is an
    exact time-rescaling of the geodesic flow; it agrees with
    :func:`chart_forward` for k = 0 and to second order in r otherwise.
    """
    _check_theta(theta)
    check_curvature(k)
    rr = K.sink(k, s.r)
    a = s.gamma * math.pi / theta
    return CartesianChartState(rr * math.cos(a), rr * math.sin(a),
                               s.beta % TWO_PI)


def chart_extract(c, theta, k):
    _check_theta(theta)
    check_curvature(k)
    rr = math.hypot(c.x, c.y)
    if k == 1:
        if rr > 1.0:
            raise GeometryError("chart radius exceeds 1 on the sphere")
        r = math.asin(rr)
    elif k == -1:
        r = math.asinh(rr)
    else:
        r = rr
    if rr == 0.0:
        gamma = 0.0
    else:
        gamma = (math.atan2(c.y, c.x) * theta / math.pi) % (2.0 * theta)
    return ChartState(r, gamma, c.z % TWO_PI)


def polar_velocity_field(s, k):
    """Geodesic velocity in (r, gamma, beta); singular on r = 0.

    The radial rate is cos(beta) for every curvature; the angular rates
    carry 1/sink(k, r) and are what the compactification removes.
    """
    check_curvature(k)
    if s.r <= 0.0:
        raise SingularFieldError("polar field is singular at r = 0; "
                                 "use the extended chart field instead")
    out = np.empty(3)
    K.field_eval(K.FIELD_POLAR, k, 0.0, s.as_array(), out)
    return out


def chart_velocity_field(c, theta, k):
    """Extended (time-rescaled) field in disc coordinates; smooth at r = 0."""
    _check_theta(theta)
    check_curvature(k)
    if k == 1 and c.x ** 2 + c.y ** 2 >= 1.0:
        raise GeometryError("chart field domain requires x^2 + y^2 < 1 on the sphere")
    out = np.empty(3)
    K.field_eval(K.FIELD_CHART, k, math.pi / theta, c.as_array(), out)
    return out


def singularity_jacobian(z0, theta, k):
    """Derivative of the chart field at the fixed points (0, 0, 0) and (0, 0, pi).

    Returns (jacobian, eigenvalues); the spectra are {1, 1, -1} at z0 = 0
    and {-1, -1, 1} at z0 = pi, independent of theta and curvature.
    """
    _check_theta(theta)
    check_curvature(k)
    cz = math.cos(z0)
    sz = math.sin(z0)
    pf = math.pi / theta
    jac = np.array([[cz, -pf * sz, 0.0],
                    [pf * sz, cz, 0.0],
                    [0.0, 0.0, -cz]])
    eig = np.sort(np.linalg.eigvals(jac).real)
    return jac, eig


def reparameterization_factor(r, k, eps):
    """Time-rescaling factor: sink(k, r) near the vertex, 1 outside.

    Pure sink on [0, eps/2], constant 1 beyond eps, joined by a smooth
    bump on [eps/2, eps] so the global flow is a C-infinity time change.
    """
    check_curvature(k)
    if r < 0.0:
        raise GeometryError("radius must be nonnegative")
    if not eps > 0.0:
        raise GeometryError("chart radius eps must be positive")
    if r >= eps:
        return 1.0
    raw = K.sink(k, r)
    if r <= 0.5 * eps:
        return raw
    u = (r - 0.5 * eps) / (0.5 * eps)
    ha = math.exp(-1.0 / u) if u > 0 else 0.0
    hb = math.exp(-1.0 / (1.0 - u)) if u < 1 else 0.0
    w = ha / (ha + hb)
    return (1.0 - w) * raw + w * 1.0


# ---------------------------------------------------------------------------
# closed-form flow of the polar system
# ---------------------------------------------------------------------------

def closed_form_flow(s0, t, k, eps=None):
    """Exact solution of the polar motion system after time t.

    gamma is returned unwrapped (continuous in t, including full windings
    around the vertex on the sphere); beta stays in its (0, pi) or
    (pi, 2 pi) branch.  With ``eps`` given, leaving r < eps or reaching the
    vertex raises :class:`ChartExitError` carrying the exit time and state.
    """
    check_curvature(k)
    r0 = s0.r
    if r0 <= 0.0:
        raise SingularFieldError("closed-form flow requires r > 0")
    if k == 1 and r0 >= math.pi:
        raise GeometryError("spherical radial coordinate must be < pi")
    beta0 = s0.beta % TWO_PI
    if t == 0.0:
        return ChartState(r0, s0.gamma, beta0)
    sb0 = math.sin(beta0)
    cb0 = math.cos(beta0)

    if eps is not None:
        _check_chart_window(s0, t, k, eps, sb0, cb0)

    if abs(sb0) < 1e-15:
        return _radial_flow(s0, t, k, cb0)

    if k == 0:
        rt = math.sqrt(r0 * r0 + 2.0 * t * r0 * cb0 + t * t)
        if rt < 1e-300:
            raise SingularFieldError("trajectory reaches the vertex")
        beta_t = math.atan2(r0 * sb0, r0 * cb0 + t) % TWO_PI
        # flat conservation: gamma + beta is exactly invariant
        gamma_t = s0.gamma + (beta0 - beta_t)
        return ChartState(rt, gamma_t, beta_t)

    if k == -1:
        ch = math.cosh(r0) * math.cosh(t) + math.sinh(r0) * math.sinh(t) * cb0
        rt = math.acosh(max(1.0, ch))
        if rt < 1e-300:
            raise SingularFieldError("trajectory reaches the vertex")
        sb_t = sb0 * math.sinh(r0)   # = sin(beta_t) sinh(r_t)
        cb_t = math.cosh(r0) * math.sinh(t) + math.sinh(r0) * math.cosh(t) * cb0
        beta_t = math.atan2(sb_t, cb_t) % TWO_PI
        dgam = math.atan2(math.sin(beta_t) * math.sinh(t) * math.sinh(rt),
                          math.cosh(r0) * math.cosh(rt) - math.cosh(t))
        return ChartState(rt, s0.gamma + dgam, beta_t)

    # sphere: reduce t mod 2 pi and add back the whole windings of gamma
    winds = math.floor(t / TWO_PI)
    tr = t - winds * TWO_PI
    ct = math.cos(tr)
    st = math.sin(tr)
    cr = math.cos(r0) * ct - math.sin(r0) * st * cb0
    cr = min(1.0, max(-1.0, cr))
    rt = math.acos(cr)
    srt = math.sin(rt)
    if srt < 1e-300:
        raise SingularFieldError("trajectory reaches the vertex or its antipode")
    sb_t = sb0 * math.sin(r0)        # = sin(beta_t) sin(r_t), Clairaut constant
    cb_t = math.cos(r0) * st + math.sin(r0) * ct * cb0
    beta_t = math.atan2(sb_t, cb_t) % TWO_PI
    dgam = math.atan2(math.sin(beta_t) * st * srt,
                      ct - math.cos(r0) * cr)
    # gamma is monotone with the sign of the Clairaut constant
    if sb0 > 0.0 and dgam < 0.0:
        dgam += TWO_PI
    elif sb0 < 0.0 and dgam > 0.0:
        dgam -= TWO_PI
    dgam += winds * TWO_PI * (1.0 if sb0 > 0.0 else -1.0)
    return ChartState(rt, s0.gamma + dgam, beta_t)


def _radial_flow(s0, t, k, cb0):
    """Purely radial motion (sin beta = 0): gamma frozen, vertex flips it by pi."""
    sgn = 1.0 if cb0 > 0.0 else -1.0
    x = s0.r + sgn * t
    if k == 1:
        # fold through the vertex (x < 0) and the antipode (x > pi)
        period = 2.0 * math.pi
        xm = x % period
        if xm > math.pi:
            xm = period - xm
            flip = True
        else:
            flip = False
        if xm < 1e-300 or math.pi - xm < 1e-300:
            raise SingularFieldError("radial trajectory hits the vertex or antipode")
        crossed = flip or (x < 0.0) or (x > math.pi)
        beta = (s0.beta + (math.pi if crossed else 0.0))
        return ChartState(xm, s0.gamma + (math.pi if crossed else 0.0), beta % TWO_PI)
    if x < 1e-300:
        if x < 0.0:
            return ChartState(-x, s0.gamma + math.pi,
                              (s0.beta + math.pi) % TWO_PI)
        raise SingularFieldError("radial trajectory hits the vertex")
    return ChartState(x, s0.gamma, s0.beta % TWO_PI)


def _check_chart_window(s0, t, k, eps, sb0, cb0):
    """Raise ChartExitError when r leaves (0, eps) during [0, t]."""
    if s0.r >= eps:
        raise ChartExitError("initial state outside the chart", 0.0, s0)
    exit_time = _scan_exit(s0, t, k, eps)
    if exit_time is not None:
        state = closed_form_flow(s0, exit_time * (1 - 1e-12), k)
        raise ChartExitError("trajectory leaves the chart", exit_time, state)


def _scan_exit(s0, t, k, eps):
    """First time r(u) >= eps or r(u) <= 0 on [0, t], by sampling + bisection."""
    n = 256
    prev = 0.0
    for i in range(1, n + 1):
        u = t * i / n
        try:
            st = closed_form_flow(s0, u, k)
            bad = st.r >= eps
        except SingularFieldError:
            bad = True
        if bad:
            lo, hi = prev, u
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                try:
                    bad_mid = closed_form_flow(s0, mid, k).r >= eps
                except SingularFieldError:
                    bad_mid = True
                if bad_mid:
                    hi = mid
                else:
                    lo = mid
            return hi
        prev = u
    return None


# ---------------------------------------------------------------------------
# numerical integration
# ---------------------------------------------------------------------------

@dataclass
class ChartTrajectory:
    """Time-stamped chart states from the adaptive integrator."""

    t: np.ndarray
    states: np.ndarray          # (n, 3) chart coordinates (x, y, z)
    exited: bool
    exit_time: float | None
    arc_time: np.ndarray | None = None   # accumulated geodesic time, if tracked

    def final(self):
        row = self.states[-1]
        return CartesianChartState(row[0], row[1], row[2])


def integrate_chart_flow(c0, T, theta, k, eps=None, rtol=DEFAULT_RTOL,
                         atol=DEFAULT_ATOL, record=True, track_arc_time=False,
                         max_records=200000):
    """Integrate the extended chart field from c0 for rescaled time T.

    States with r = 0 stay on the vertex circle and converge to z = 0 or
    z = pi according to the sign of -sin z.  When the state leaves the disc
    of radius min(eps-equivalent, 1) the trajectory is truncated at the
    crossing and flagged.
    """
    _check_theta(theta)
    check_curvature(k)
    pf = math.pi / theta
    rhi = K.INF
    if eps is not None:
        rhi = K.sink(k, eps) if k != 0 else eps
    if k == 1:
        rhi = min(rhi, 1.0 - 1e-12)
    dim = 4 if track_arc_time else 3
    y0 = np.zeros(dim)
    y0[:3] = c0.as_array()
    field = K.FIELD_CHART_ARC if track_arc_time else K.FIELD_CHART
    cap = max_records if record else 1
    tbuf = np.empty(cap)
    ybuf = np.empty((cap, dim))
    status, nrec, t_end, y_end = K.rk45(field, k, pf, y0, 0.0, T, rtol, atol,
                                        -K.INF, rhi, tbuf, ybuf,
                                        1 if record else 0)
    if status == K.RK_UNDERFLOW:
        raise RuntimeError("integrator step size underflow")
    if status == K.RK_BUFFER_FULL:
        raise RuntimeError("trajectory buffer full; raise max_records")
    exited = status == K.RK_EXITED
    if record:
        ts = tbuf[:nrec].copy()
        ys = ybuf[:nrec].copy()
    else:
        ts = np.array([t_end])
        ys = y_end[None, :].copy()
    return ChartTrajectory(t=ts, states=ys[:, :3], exited=exited,
                           exit_time=t_end if exited else None,
                           arc_time=ys[:, 3] if track_arc_time else None)


def integrate_polar_flow(s0, t, k, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Integrate the singular polar field directly (oracle route).

    Returns the final ChartState with gamma unwrapped, comparable to
    :func:`closed_form_flow`.
    """
    check_curvature(k)
    if s0.r <= 0.0:
        raise SingularFieldError("polar integration requires r > 0")
    tbuf = np.empty(1)
    ybuf = np.empty((1, 3))
    status, _, t_end, y_end = K.rk45(K.FIELD_POLAR, k, 0.0, s0.as_array(),
                                     0.0, t, rtol, atol, -K.INF, K.INF,
                                     tbuf, ybuf, 0)
    if status != K.RK_DONE:
        raise RuntimeError(f"polar integration failed with status {status}")
    return ChartState(y_end[0], y_end[1], y_end[2])


def export_trajectory(traj, path, theta=None, k=None, coords="chart"):
    """Write line-delimited records with 17 significant digits.

    coords = "chart": rows (t, x, y, z).  coords = "polar": rows
    (t, r, gamma, beta) via chart_extract (requires theta and k).
    """
    with open(path, "w") as fh:
        for i in range(len(traj.t)):
            x, y, z = traj.states[i]
            if coords == "polar":
                st = chart_extract(CartesianChartState(x, y, z), theta, k)
                row = (traj.t[i], st.r, st.gamma, st.beta)
            else:
                row = (traj.t[i], x, y, z)
            fh.write(" ".join(format(v, ".17g") for v in row) + "\n")
