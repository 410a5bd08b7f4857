"""Collision map, itineraries, and vertex-connecting trajectories.

Boundary states are (side label, arc parameter, outgoing angle): the side
label is 1-based, the arc parameter runs along the side's direction, and
psi in (0, pi) is measured CCW from the side's forward tangent, so psi =
pi/2 launches perpendicular into the interior.  Time reversal is
psi -> pi - psi.

Trajectories that come within ``VERTEX_TOL`` of a vertex terminate there:
the mathematical itinerary is defined only away from vertex orbits, and
the numerical cutoff errs on the side of ending the itinerary.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DegenerateStateError, GeometryError, PolygonError

VERTEX_TOL = 1e-9     # vertex-hit cutoff, model length units
GRAZE_TOL = 1e-9      # outgoing angles within this of {0, pi} are degenerate
FLIGHT_MIN = 1e-9     # minimum accepted flight between collisions
CONJUGATE_TOL = 1e-8  # |length - m pi| test for conjugated vertices


@dataclass(frozen=True)
class BoundaryState:
    side: int      # 1-based side label
    s: float       # arc parameter in [0, side length]
    psi: float     # outgoing angle in (0, pi) from the side's forward tangent

    def reversed(self):
        """Time-reversal involution."""
        return BoundaryState(self.side, self.s, math.pi - self.psi)


@dataclass(frozen=True)
class VertexHit:
    vertex: int    # 1-based vertex label
    flight: float  # arc length from the last boundary state to the vertex


@dataclass(frozen=True)
class Itinerary:
    """Side labels indexed by collision count, plus how the record ended.

    ``labels[j]`` is the side at index ``start_index + j``; index 0 is the
    side of the probed state.  ``termination`` describes the forward end,
    ``termination_backward`` the backward end (None when only one direction
    was computed).
    """

    labels: tuple
    start_index: int
    termination: str
    termination_backward: str | None = None

    def index_range(self):
        return self.start_index, self.start_index + len(self.labels) - 1

    def label_at(self, n):
        return self.labels[n - self.start_index]


def _validate_state(poly, b):
    side = poly.side(b.side)
    if not 0.0 <= b.s <= side.length:
        raise GeometryError(f"arc parameter {b.s} outside [0, {side.length}]")
    if not GRAZE_TOL < b.psi < math.pi - GRAZE_TOL:
        raise DegenerateStateError(f"grazing outgoing angle psi = {b.psi}")
    return side


def embed_state(poly, b):
    """Embedded (point, direction) of a boundary state."""
    side = _validate_state(poly, b)
    p, v = K.boundary_embed(poly.k, side.geodesic.point, side.geodesic.direction,
                            b.s, b.psi)
    return p, v


def collision_step(b, poly):
    """One application of the collision map.

    Returns the next BoundaryState, or a VertexHit when the trajectory
    lands within VERTEX_TOL of a vertex.
    """
    _validate_state(poly, b)
    sa, su, sn, sl, sv0, sv1, verts = poly.kernel_pack()
    st, j, s, psi, tf, vtx = K.collision_step_state(
        poly.k, sa, su, sn, sl, sv0, sv1, verts,
        b.side - 1, b.s, b.psi, FLIGHT_MIN, VERTEX_TOL, GRAZE_TOL)
    if st == K.STEP_VERTEX:
        return VertexHit(int(vtx) + 1, float(tf))
    if st == K.STEP_GRAZING:
        raise DegenerateStateError(
            f"collision became grazing (psi = {psi:.3e} from side {j + 1})")
    if st == K.STEP_ESCAPED:
        raise GeometryError("trajectory found no boundary intersection")
    return BoundaryState(int(j) + 1, float(s), float(psi))


@dataclass(frozen=True)
class TraceResult:
    """Raw multi-bounce trace used by searches and probes."""

    n_done: int
    status: int          # _kernels.STEP_* code after n_done recorded bounces
    vertex: int          # 1-based vertex label on STEP_VERTEX, else 0
    labels: np.ndarray   # 1-based side labels, length n_done
    svals: np.ndarray
    psis: np.ndarray
    flights: np.ndarray
    length: float        # total arc length (includes the final vertex leg)

    def state(self, i):
        return BoundaryState(int(self.labels[i]), float(self.svals[i]),
                             float(self.psis[i]))

    def final_state(self):
        return self.state(self.n_done - 1)


def trace(poly, b, n, max_length=math.inf):
    """Iterate the collision map n times from b, recording every bounce."""
    _validate_state(poly, b)
    sa, su, sn, sl, sv0, sv1, verts = poly.kernel_pack()
    labels = np.empty(n, dtype=np.int64)
    svals = np.empty(n)
    psis = np.empty(n)
    flens = np.empty(n)
    n_done, status, vtx, total = K.trace_orbit(
        poly.k, sa, su, sn, sl, sv0, sv1, verts,
        b.side - 1, b.s, b.psi, n, max_length, FLIGHT_MIN, VERTEX_TOL,
        GRAZE_TOL, labels, svals, psis, flens)
    return TraceResult(n_done, status, vtx + 1 if status == K.STEP_VERTEX else 0,
                       labels[:n_done] + 1, svals[:n_done], psis[:n_done],
                       flens[:n_done], total)


def trace_ray(poly, point, direction, n, max_length=math.inf):
    """Trace from an arbitrary interior ray (used by the diagonal search)."""
    sa, su, sn, sl, sv0, sv1, verts = poly.kernel_pack()
    labels = np.empty(n, dtype=np.int64)
    svals = np.empty(n)
    psis = np.empty(n)
    flens = np.empty(n)
    p = np.ascontiguousarray(point, dtype=np.float64)
    v = np.ascontiguousarray(direction, dtype=np.float64)
    n_done, status, vtx, total = K.trace_from_point(
        poly.k, sa, su, sn, sl, sv0, sv1, verts,
        p, v, n, max_length, FLIGHT_MIN, VERTEX_TOL, GRAZE_TOL,
        labels, svals, psis, flens)
    return TraceResult(n_done, status, vtx + 1 if status == K.STEP_VERTEX else 0,
                       labels[:n_done] + 1, svals[:n_done], psis[:n_done],
                       flens[:n_done], total)


_TERMINATION = {K.STEP_OK: "horizon", K.STEP_VERTEX: "vertex_hit",
                K.STEP_GRAZING: "degenerate", K.STEP_MAXLEN: "horizon"}


def _direction_labels(poly, b, horizon):
    """Labels [side(b), side(f b), ..., side(f^(horizon-1) b)] and the end tag."""
    tr = trace(poly, b, horizon - 1)
    labels = [b.side] + [int(x) for x in tr.labels]
    if tr.status == K.STEP_ESCAPED:
        raise GeometryError("trajectory found no boundary intersection")
    return labels, _TERMINATION[tr.status]


def itinerary(b, poly, horizon, direction="forward"):
    """Side-label itinerary of a boundary state.

    forward: indices 0 .. horizon-1; backward: indices -(horizon-1) .. 0;
    bidirectional: indices -(horizon-1) .. horizon-1.  Index 0 is the side
    of b itself.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    _validate_state(poly, b)
    if direction == "forward":
        labels, term = _direction_labels(poly, b, horizon)
        return Itinerary(tuple(labels), 0, term)
    if direction == "backward":
        labels, term = _direction_labels(poly, b.reversed(), horizon)
        return Itinerary(tuple(reversed(labels)), -(len(labels) - 1),
                         "horizon", termination_backward=term)
    if direction == "bidirectional":
        fwd, term_f = _direction_labels(poly, b, horizon)
        bwd, term_b = _direction_labels(poly, b.reversed(), horizon)
        labels = tuple(reversed(bwd[1:])) + tuple(fwd)
        return Itinerary(labels, -(len(bwd) - 1), term_f,
                         termination_backward=term_b)
    raise ValueError(f"unknown direction {direction!r}")


def write_itinerary(it, path):
    """Comma-separated labels plus a termination tag."""
    with open(path, "w") as fh:
        fh.write(",".join(str(x) for x in it.labels) + "\n")
        fh.write(f"termination={it.termination}\n")
        if it.termination_backward is not None:
            fh.write(f"termination_backward={it.termination_backward}\n")


# ---------------------------------------------------------------------------
# generalized diagonals and conjugated vertices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Diagonal:
    """Billiard trajectory connecting two vertices."""

    start: int           # 1-based vertex labels
    end: int
    sequence: tuple      # 1-based side labels bounced off along the way
    length: float
    angle: float         # launch angle from the side leaving the start vertex


def _vertex_frame(poly, vi):
    """Base direction (side leaving vertex vi) and interior angle there."""
    for s in poly.sides:
        if s.start == vi:
            return s.geodesic.direction, poly.angles[vi]
    raise PolygonError(f"vertex {vi} starts no side")


def _launch(poly, vi, alpha):
    d0, _ = _vertex_frame(poly, vi)
    p = poly.vertices[vi]
    e2 = K.perp(poly.k, p, d0)
    d = math.cos(alpha) * d0 + math.sin(alpha) * e2
    return p, K.renorm_tangent(poly.k, p, d)


def _diagonal_signature(tr):
    return (tuple(int(x) for x in tr.labels), tr.status, tr.vertex)


def generalized_diagonals(poly, max_bounces, max_length, angles_per_vertex=10000):
    """Search for vertex-to-vertex trajectories.

    Shoots a fan of directions from every vertex (plus targeted shots at
    the other vertices), brackets itinerary transitions, and bisects each
    bracket down to the vertex-hit window.  Results are deduplicated by
    bounce sequence and re-verified by forward simulation; the search is
    complete only up to the angular resolution.
    """
    if max_bounces < 0 or max_length <= 0:
        raise ValueError("search bounds must be positive")
    found = {}
    margin = 10.0 * GRAZE_TOL
    nmax = max_bounces + 1
    for vi in range(poly.n_vertices):
        d0, theta = _vertex_frame(poly, vi)
        p = poly.vertices[vi]
        alphas = set()
        for j in range(angles_per_vertex):
            alphas.add(theta * (j + 0.5) / angles_per_vertex)
        for wj, w in enumerate(poly.vertices):
            if wj == vi:
                continue
            d = K.distance(poly.k, p, w)
            if d < VERTEX_TOL or (poly.k == 1 and d > math.pi - 1e-12):
                continue
            a = K.signed_angle(poly.k, p, d0, K.log_map(poly.k, p, w))
            if margin < a < theta - margin:
                alphas.add(a)
        alphas = sorted(alphas)
        sigs = []
        for a in alphas:
            pt, dv = _launch(poly, vi, a)
            tr = trace_ray(poly, pt, dv, nmax, max_length)
            sigs.append(_diagonal_signature(tr))
            _record_if_diagonal(found, poly, vi, a, tr, max_bounces, max_length)
        budget = [8 * angles_per_vertex]
        for i in range(len(alphas) - 1):
            if sigs[i] != sigs[i + 1]:
                _bisect_transition(found, poly, vi, alphas[i], alphas[i + 1],
                                   sigs[i], sigs[i + 1], nmax, max_bounces,
                                   max_length, budget)
    out = sorted(found.values(), key=lambda d: (d.length, d.start, d.end, d.sequence))
    return out


def _record_if_diagonal(found, poly, vi, alpha, tr, max_bounces, max_length):
    if tr.status != K.STEP_VERTEX or tr.n_done > max_bounces:
        return False
    if tr.length > max_length:
        return False
    seq = tuple(int(x) for x in tr.labels)
    start, end = vi + 1, int(tr.vertex)
    key = min((start, end, seq), (end, start, tuple(reversed(seq))))
    if key in found:
        return True
    found[key] = Diagonal(start, end, seq, float(tr.length), float(alpha))
    return True


def _bisect_transition(found, poly, vi, a, b, sig_a, sig_b, nmax,
                       max_bounces, max_length, budget):
    """Refine an itinerary transition down to the vertex-hit window."""
    stack = [(a, b, sig_a, sig_b, 0)]
    while stack:
        if budget[0] <= 0:
            return
        lo, hi, slo, shi, depth = stack.pop()
        if hi - lo < 1e-14 or depth > 60:
            continue
        mid = 0.5 * (lo + hi)
        pt, dv = _launch(poly, vi, mid)
        budget[0] -= 1
        tr = trace_ray(poly, pt, dv, nmax, max_length)
        if _record_if_diagonal(found, poly, vi, mid, tr, max_bounces, max_length):
            continue
        sm = _diagonal_signature(tr)
        if sm != slo:
            stack.append((lo, mid, slo, sm, depth + 1))
        if sm != shi:
            stack.append((mid, hi, sm, shi, depth + 1))


@dataclass(frozen=True)
class ConjugatePair:
    """Vertices joined by a diagonal of length m pi (sphere only)."""

    vertices: tuple      # 1-based (start, end)
    diagonal: Diagonal
    m: int
    residual: float


def conjugated_vertices(poly, max_bounces, max_length, angles_per_vertex=10000):
    """Diagonals whose length is a positive multiple of pi, on the sphere."""
    if poly.k != 1:
        raise GeometryError("conjugated vertices are defined for curvature +1")
    out = []
    for d in generalized_diagonals(poly, max_bounces, max_length,
                                   angles_per_vertex):
        m = round(d.length / math.pi)
        if m >= 1 and abs(d.length - m * math.pi) <= CONJUGATE_TOL:
            out.append(ConjugatePair((d.start, d.end), d, int(m),
                                     abs(d.length - m * math.pi)))
    return out
