"""Polygon tables on a constant-curvature surface.

A table is an ordered outer loop of vertices plus optional hole loops
(planar-type tables: a disc with holes).  Sides are minimizing geodesic
segments; the interior lies on the left of the directed boundary, so the
outer loop runs counterclockwise and hole loops clockwise.  Reversed input
is auto-corrected and flagged.

The two-sheet "double surface" obtained by gluing two copies of the table
along the boundary is represented by :class:`DoubleSurfacePoint`; boundary
points identify across sheets.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from . import geometry as G
from .errors import GeometryError, PolygonError

VERTEX_SEP_TOL = 1e-9
BOUNDARY_TOL = 1e-10

MODELS = ("plane", "poincare-disc", "unit-sphere")
MODEL_FOR_K = {0: "plane", -1: "poincare-disc", 1: "unit-sphere"}


@dataclass(frozen=True)
class Side:
    """One geodesic boundary segment, directed with the interior on its left."""

    start: int            # vertex index (0-based, into Polygon.vertices)
    end: int
    loop: int
    geodesic: G.Geodesic
    normal: np.ndarray    # interior-positive functional
    length: float


@dataclass
class Polygon:
    k: int
    vertices: list                  # embedded 3-vectors, outer loop first
    loops: list                     # list of (offset, count) per boundary loop
    sides: list                     # Side records, same order as vertices
    angles: list                    # interior angle at each vertex, in (0, 2pi)
    boundary_components: int
    reversed_input: bool = False
    _pack: tuple = field(default=None, repr=False)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_sides(self):
        return len(self.sides)

    def side(self, label):
        """Side by 1-based label."""
        if not 1 <= label <= len(self.sides):
            raise PolygonError(f"side label must be in 1..{len(self.sides)}, got {label}")
        return self.sides[label - 1]

    def perimeter(self):
        return sum(s.length for s in self.sides)

    def kernel_pack(self):
        """Flat arrays consumed by the collision kernels."""
        if self._pack is None:
            n = len(self.sides)
            sa = np.empty((n, 3))
            su = np.empty((n, 3))
            sn = np.empty((n, 3))
            sl = np.empty(n)
            sv0 = np.empty(n, dtype=np.int64)
            sv1 = np.empty(n, dtype=np.int64)
            for i, s in enumerate(self.sides):
                sa[i] = s.geodesic.point
                su[i] = s.geodesic.direction
                sn[i] = s.normal
                sl[i] = s.length
                sv0[i] = s.start
                sv1[i] = s.end
            verts = np.ascontiguousarray(np.array(self.vertices))
            self._pack = (sa, su, sn, sl, sv0, sv1, verts)
        return self._pack


@dataclass(frozen=True)
class DoubleSurfacePoint:
    """Point on the doubled table: a sheet tag plus a position in the table."""

    sheet: str            # "top" | "bottom"
    pos: np.ndarray

    def __post_init__(self):
        if self.sheet not in ("top", "bottom"):
            raise PolygonError(f"sheet must be 'top' or 'bottom', got {self.sheet!r}")


def double_points_equal(a, b, poly, tol=BOUNDARY_TOL):
    """Equality on the double surface: boundary points identify across sheets."""
    if K.distance(poly.k, a.pos, b.pos) > tol:
        return False
    if a.sheet == b.sheet:
        return True
    return point_on_boundary(poly, a.pos, tol)


def point_on_boundary(poly, p, tol=BOUNDARY_TOL):
    return min(G.segment_distance(p, s.geodesic, s.length, poly.k)
               for s in poly.sides) <= tol


def _embed_loop(k, coords, model):
    pts = []
    for j, c in enumerate(coords):
        c = tuple(float(x) for x in np.atleast_1d(c))
        try:
            if model == "plane":
                if len(c) != 2:
                    raise GeometryError(f"expected 2 coordinates, got {len(c)}")
                pts.append(G.plane_point(*c))
            elif model == "poincare-disc":
                if len(c) != 2:
                    raise GeometryError(f"expected 2 coordinates, got {len(c)}")
                pts.append(G.poincare_to_hyperboloid(*c))
            elif model == "unit-sphere":
                if len(c) != 3:
                    raise GeometryError(f"expected 3 coordinates, got {len(c)}")
                pts.append(G.sphere_point(*c))
            elif model == "hyperboloid":
                if len(c) != 3:
                    raise GeometryError(f"expected 3 coordinates, got {len(c)}")
                pts.append(G.normalize_point(np.array(c), k))
            else:
                raise GeometryError(f"unknown model {model!r}")
        except GeometryError as e:
            raise PolygonError(f"vertex {j}: {e}") from e
    return pts


def _loop_sides_angles(k, pts, base_index, loop_id):
    """Sides, interior angles, and the turning sum of one vertex loop."""
    n = len(pts)
    sides = []
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        d = K.distance(k, a, b)
        if d < VERTEX_SEP_TOL:
            raise PolygonError(f"vertices {base_index + i} and "
                               f"{base_index + (i + 1) % n} coincide")
        if k == 1 and d > math.pi - VERTEX_SEP_TOL:
            raise PolygonError(f"spherical side {base_index + i} has length >= pi")
        g = G.Geodesic(a, K.log_map(k, a, b))
        sides.append(Side(base_index + i, base_index + (i + 1) % n, loop_id,
                          g, G.side_normal(g, k), float(d)))
    angles = []
    turning = 0.0
    for i in range(n):
        prev = sides[(i - 1) % n]
        nxt = sides[i]
        p = pts[i]
        incoming = K.renorm_tangent(
            k, p, K.geodesic_dir(k, prev.geodesic.point, prev.geodesic.direction,
                                 prev.length))
        tau = K.signed_angle(k, p, incoming, nxt.geodesic.direction)
        theta = math.pi - tau
        if not (1e-9 < theta < 2.0 * math.pi - 1e-9):
            raise PolygonError(f"degenerate interior angle at vertex {base_index + i}")
        angles.append(theta)
        turning += tau
    return sides, angles, turning


def build_polygon(k, vertex_coords, holes=(), model=None):
    """Validated polygon from vertex coordinates.

    ``vertex_coords`` is the outer loop in the declared model convention
    (plane pairs, Poincare-disc pairs with norm < 1, unit 3-vectors);
    ``holes`` is a list of further loops.  Orientation is normalized
    (outer CCW, holes CW) with ``reversed_input`` flagging corrections.
    """
    k = G.check_curvature(k)
    if model is None:
        model = MODEL_FOR_K[k]
    if model in MODELS:
        expected = {"plane": 0, "poincare-disc": -1, "unit-sphere": 1}[model]
        if expected != k:
            raise PolygonError(f"model {model!r} does not match curvature {k}")
    loops_pts = [_embed_loop(k, vertex_coords, model)]
    for h in holes:
        loops_pts.append(_embed_loop(k, h, model))
    for pts in loops_pts:
        if len(pts) < 3:
            raise PolygonError("each boundary loop needs at least 3 vertices")

    vertices = []
    loops = []
    all_sides = []
    all_angles = []
    reversed_input = False
    for li, pts in enumerate(loops_pts):
        want_ccw = (li == 0)
        base = len(vertices)
        sides, angles, turning = _loop_sides_angles(k, pts, base, li)
        if (turning > 0) != want_ccw:
            reversed_input = True
            pts = [pts[0]] + pts[:0:-1]
            sides, angles, turning = _loop_sides_angles(k, pts, base, li)
            if (turning > 0) != want_ccw:
                raise PolygonError(f"cannot orient boundary loop {li}")
        vertices.extend(pts)
        loops.append((base, len(pts)))
        all_sides.extend(sides)
        all_angles.extend(angles)

    # distinct vertices across the whole boundary
    for i in range(len(vertices)):
        for j in range(i + 1, len(vertices)):
            if K.distance(k, vertices[i], vertices[j]) < VERTEX_SEP_TOL:
                raise PolygonError(f"vertices {i} and {j} coincide")

    # simple boundary: non-adjacent sides must not meet
    ns = len(all_sides)
    for i in range(ns):
        si = all_sides[i]
        for j in range(i + 1, ns):
            sj = all_sides[j]
            adjacent = {si.start, si.end} & {sj.start, sj.end}
            tol = VERTEX_SEP_TOL if adjacent else -1e-12
            if G.geodesics_intersect(si.geodesic, si.length,
                                     sj.geodesic, sj.length, k, end_tol=tol):
                raise PolygonError(f"boundary sides {i + 1} and {j + 1} intersect")

    poly = Polygon(k=k, vertices=vertices, loops=loops, sides=all_sides,
                   angles=all_angles, boundary_components=len(loops),
                   reversed_input=reversed_input)

    # holes must lie inside the outer loop and outside each other
    for li in range(1, len(loops)):
        base, cnt = loops[li]
        probe = vertices[base]
        if not _winding_contains(poly, probe, loops=[0]):
            raise PolygonError(f"hole loop {li} is not inside the outer boundary")
        for lj in range(1, len(loops)):
            if lj == li:
                continue
            if _winding_contains(poly, probe, loops=[lj]):
                raise PolygonError(f"hole loops {li} and {lj} are nested")
    return poly


def _winding_contains(poly, p, loops=None):
    """Nonzero-winding test of p against the selected loops (default: all).

    Degenerate sightlines (query on a side's geodesic, or antipodal to a
    vertex on the sphere) are broken by deterministic nudges; the nudge is
    kept below half the boundary clearance so the verdict cannot flip.
    """
    k = poly.k
    loop_ids = range(len(poly.loops)) if loops is None else loops
    bdist = min(G.segment_distance(p, s.geodesic, s.length, k) for s in poly.sides)
    for attempt in range(8):
        q = p
        if attempt > 0:
            ang = 2.399963229728653 * attempt
            d0 = K.renorm_tangent(
                k, q, np.array([math.cos(ang), math.sin(ang), 0.2 * math.cos(2 * ang)]))
            mag = min(0.45, 0.06 * attempt) * bdist
            q = K.renorm_point(k, K.geodesic_point(k, q, d0, mag))
        total = 0.0
        ok = True
        for s in poly.sides:
            if s.loop not in loop_ids:
                continue
            swept = _swept_angle(k, q, s, 0.0, s.length, 0)
            if swept is None:
                ok = False
                break
            total += swept
        if not ok:
            continue
        w = total / (2.0 * math.pi)
        if abs(w - round(w)) > 0.25:
            continue
        return int(round(w)) != 0
    raise PolygonError("interior test failed to resolve after perturbation retries")


def _swept_angle(k, p, side, sa, sb, depth):
    """Signed angle swept at p by the side arc between parameters sa and sb."""
    g = side.geodesic
    qa = K.renorm_point(k, K.geodesic_point(k, g.point, g.direction, sa))
    qb = K.renorm_point(k, K.geodesic_point(k, g.point, g.direction, sb))
    da = K.distance(k, p, qa)
    db = K.distance(k, p, qb)
    if da < 1e-12 or db < 1e-12:
        return None
    if k == 1 and (da > math.pi - 1e-12 or db > math.pi - 1e-12):
        return None
    if sb - sa > 1.2 or (k == 1 and sb - sa > 0.5 * math.pi):
        sm = 0.5 * (sa + sb)
        left = _swept_angle(k, p, side, sa, sm, depth + 1)
        right = _swept_angle(k, p, side, sm, sb, depth + 1)
        if left is None or right is None:
            return None
        return left + right
    ua = K.log_map(k, p, qa)
    ub = K.log_map(k, p, qb)
    ang = K.signed_angle(k, p, ua, ub)
    if abs(ang) > math.pi - 1e-6:
        if depth >= 48:
            return None
        sm = 0.5 * (sa + sb)
        left = _swept_angle(k, p, side, sa, sm, depth + 1)
        right = _swept_angle(k, p, side, sm, sb, depth + 1)
        if left is None or right is None:
            return None
        return left + right
    return ang


def interior_contains(poly, p):
    """True iff p lies in the open interior (boundary points are outside)."""
    p = G.as_vec3(p)
    if G.point_defect(p, poly.k) > 1e-6:
        raise GeometryError(f"point {p} is not on the k={poly.k} model surface")
    p = K.renorm_point(poly.k, p)
    if point_on_boundary(poly, p):
        return False
    return _winding_contains(poly, p)


def vertex_neighborhood_radius(poly, i):
    """Disc radius around vertex i seeing only the two adjacent sides.

    Half the least of: distances to sides not containing the vertex,
    distances to the other vertices, and the adjacent side lengths.
    """
    if not 0 <= i < len(poly.vertices):
        raise PolygonError(f"vertex index out of range: {i}")
    v = poly.vertices[i]
    cand = []
    for j, w in enumerate(poly.vertices):
        if j != i:
            cand.append(K.distance(poly.k, v, w))
    for s in poly.sides:
        if s.start == i or s.end == i:
            cand.append(s.length)
        else:
            cand.append(G.segment_distance(v, s.geodesic, s.length, poly.k))
    return 0.5 * min(cand)
