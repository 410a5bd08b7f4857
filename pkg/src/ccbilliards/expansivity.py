"""Expansiveness evidence probes and table classification.

Whether a billiard flow is expansive is not decidable by finite
computation; this module implements the witness logic that is:

* hyperbolic tables are expansive unconditionally (classification rule
  ``hyperbolic-expansive``);
* a flat table with a periodic orbit is not expansive (the orbit sits in a
  band of parallel periodic orbits), and absence of periodic orbits is
  equivalent to expansiveness but not certifiable by search - so flat
  verdicts are ``not_expansive`` with a verified orbit or ``unknown``;
* a spherical table is not expansive given any of: a periodic orbit, a
  pair of distinct orbits sharing an itinerary, or two vertices joined by
  a diagonal of length a multiple of pi.  No positive certificate is
  implemented (the sufficient condition needs itinerary injectivity,
  which a finite probe cannot establish), so the other outcome is
  ``unknown``.

``expansive`` is never returned for curvature 0 or +1.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels as K
from . import collision as C
from . import unfolding as U
from .errors import GeometryError

SAME_ORBIT_TOL = 1e-6       # phase distance below which two states are one orbit
SAME_ORBIT_WINDOW = 20      # bounces scanned either way by the exclusion test
PAIR_DIRECTION_OFFSET = 1e-5


class Rule(str, Enum):
    """Classification rules the verdicts cite."""

    HYPERBOLIC_EXPANSIVE = "hyperbolic-expansive"
    FLAT_PERIODIC_ORBIT = "flat-periodic-orbit"
    SPHERE_PERIODIC_ORBIT = "sphere-periodic-orbit"
    SPHERE_SAME_ITINERARY = "sphere-same-itinerary"
    SPHERE_CONJUGATE_VERTICES = "sphere-conjugate-vertices"


@dataclass(frozen=True)
class PairProbe:
    """Outcome of comparing two orbits' itineraries symbol by symbol."""

    a: C.BoundaryState
    b: C.BoundaryState
    horizon: int
    outcome: str              # "itineraries_agree" | "itineraries_diverge"
    diverge_index: int | None  # signed collision index of first disagreement
    truncated: bool           # a vertex hit shortened the comparison
    compared: tuple           # (backward span, forward span) actually compared


@dataclass(frozen=True)
class SearchBudget:
    horizon: int = 1000          # itinerary comparison span, bounces
    samples: int = 10000         # periodic-orbit search seeds
    periodic_bounces: int = 50   # return-map depth per seed
    diagonal_depth: int = 20     # max bounces in the diagonal search
    diagonal_length: float = 4.0 * math.pi
    diagonal_angles: int = 10000
    pair_probes: int = 48        # same-itinerary pair attempts (sphere)
    seed: int = 0


@dataclass(frozen=True)
class Witness:
    kind: str                    # "periodic_orbit" | "same_itinerary_pair" |
                                 # "conjugated_vertices"
    rule: Rule
    data: object
    verified: bool


@dataclass(frozen=True)
class ExpansivenessVerdict:
    verdict: str                 # "expansive" | "not_expansive" | "unknown"
    rules: tuple
    witnesses: tuple
    budget: SearchBudget
    notes: tuple = ()


def _orbit_phase_points(poly, b, window):
    """Sampled (point, direction) pairs along the orbit through b."""
    pts = []
    for direction, state in (("fwd", b), ("bwd", b.reversed())):
        sign = 1.0 if direction == "fwd" else -1.0
        p, v = C.embed_state(poly, state)
        pts.append((p, sign * v))
        tr = C.trace(poly, state, window)
        prev_p, prev_v = p, v
        for i in range(tr.n_done):
            for frac in (0.25, 0.5, 0.75):
                t = float(tr.flights[i]) * frac
                q = K.renorm_point(poly.k, K.geodesic_point(poly.k, prev_p, prev_v, t))
                w = K.renorm_tangent(poly.k, q,
                                     K.geodesic_dir(poly.k, prev_p, prev_v, t))
                pts.append((q, sign * w))
            prev_p, prev_v = C.embed_state(poly, tr.state(i))
            pts.append((prev_p, sign * prev_v))
    return pts


def _same_orbit(poly, a, b):
    """Flow-line proximity: is b within SAME_ORBIT_TOL of a's orbit segment?"""
    pb, vb = C.embed_state(poly, b)
    for q, w in _orbit_phase_points(poly, a, SAME_ORBIT_WINDOW):
        pos = K.distance(poly.k, q, pb)
        dirs = math.sqrt(float(np.sum((np.asarray(w) - vb) ** 2)))
        if max(pos, dirs) < SAME_ORBIT_TOL:
            return True
    return False


def _labels(poly, b, horizon):
    tr = C.trace(poly, b, horizon)
    return ([b.side] + [int(x) for x in tr.labels],
            tr.status == K.STEP_VERTEX or tr.status == K.STEP_GRAZING)


def probe_pair(a, b, poly, horizon):
    """Compare the itineraries of two distinct orbits over +-horizon bounces.

    Symmetric in its arguments.  Raises when the states lie on a common
    orbit segment (trivial pair).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if a == b or _same_orbit(poly, a, b):
        raise GeometryError("probe_pair requires states on distinct orbits")
    fa, trunc_fa = _labels(poly, a, horizon)
    fb, trunc_fb = _labels(poly, b, horizon)
    ba, trunc_ba = _labels(poly, a.reversed(), horizon)
    bb, trunc_bb = _labels(poly, b.reversed(), horizon)
    truncated = trunc_fa or trunc_fb or trunc_ba or trunc_bb
    nf = min(len(fa), len(fb))
    nb = min(len(ba), len(bb))
    diverge = None
    for i in range(nf):
        if fa[i] != fb[i]:
            diverge = i
            break
    if diverge is None:
        for i in range(1, nb):
            if ba[i] != bb[i]:
                diverge = -i
                break
    outcome = "itineraries_agree" if diverge is None else "itineraries_diverge"
    return PairProbe(a, b, horizon, outcome, diverge, truncated,
                     (nb - 1, nf - 1))


def periodic_orbit_neighborhood_check(report, poly,
                                      displacements=(-1e-3, -5e-4, 2.5e-4,
                                                     5e-4, 1e-3)):
    """Flat periodic orbits persist under parallel displacement.

    Shifts the starting arc parameter and re-simulates; every displaced
    state must be periodic with the same bounce sequence.  Returns a truthy
    result object with per-displacement failures.
    """
    if poly.k != 0:
        raise GeometryError("the parallel-band check applies to flat tables")
    side = poly.side(report.start.side)
    failures = []
    for d in displacements:
        s = report.start.s + d
        if not 0.0 < s < side.length:
            failures.append((d, "displacement leaves the side"))
            continue
        shifted = C.BoundaryState(report.start.side, s, report.start.psi)
        tr = C.trace(poly, shifted, report.period)
        if tr.status == K.STEP_VERTEX:
            failures.append((d, "displaced orbit hits a vertex"))
            continue
        if tr.n_done < report.period or tuple(int(x) for x in tr.labels) != report.labels:
            failures.append((d, "bounce sequence changed"))
            continue
        res = max(abs(float(tr.svals[-1]) - s),
                  abs(float(tr.psis[-1]) - report.start.psi))
        if res > 1e-8:
            failures.append((d, f"return residual {res:.3e}"))
    return NeighborhoodCheck(not failures, tuple(failures))


@dataclass(frozen=True)
class NeighborhoodCheck:
    ok: bool
    failures: tuple

    def __bool__(self):
        return self.ok


def _sphere_pair_witness(poly, budget):
    """Search for two distinct orbits sharing a full +-horizon itinerary.

    Probes pairs of nearby directions from common base points, the
    configuration in which non-expansive spherical tables exhibit equal
    itineraries.
    """
    rng = np.random.default_rng(budget.seed + 1)
    per_side = max(1, budget.pair_probes // poly.n_sides)
    for label in range(1, poly.n_sides + 1):
        L = poly.side(label).length
        for _ in range(per_side):
            s = float(rng.uniform(0.2, 0.8)) * L
            psi = float(rng.uniform(0.3, math.pi - 0.3))
            a = C.BoundaryState(label, s, psi)
            b = C.BoundaryState(label, s, psi + PAIR_DIRECTION_OFFSET)
            try:
                probe = probe_pair(a, b, poly, budget.horizon)
            except GeometryError:
                continue
            if probe.outcome == "itineraries_agree" and not probe.truncated:
                return probe
    return None


def classify(poly, budget=None):
    """Expansiveness verdict with verified witnesses.

    Hyperbolic tables are expansive outright.  Flat and spherical tables
    are probed within the budget; failure to find a witness yields an
    honest ``unknown``.
    """
    if budget is None:
        budget = SearchBudget()
    notes = []
    if poly.k == -1:
        return ExpansivenessVerdict(
            "expansive", (Rule.HYPERBOLIC_EXPANSIVE,), (), budget,
            ("every polygonal table in the hyperbolic plane has an expansive "
             "flow; itineraries separate distinct orbits",))
    if poly.k == 0:
        reports = U.find_periodic(poly, budget.periodic_bounces,
                                  budget.samples, budget.seed)
        for rep in reports:
            if U.verify_periodic(rep, poly) < U.RETURN_VERIFY_TOL:
                band = periodic_orbit_neighborhood_check(rep, poly)
                w = Witness("periodic_orbit", Rule.FLAT_PERIODIC_ORBIT,
                            rep, True)
                if band:
                    notes.append("periodic orbit sits in a parallel band of "
                                 "periodic orbits")
                return ExpansivenessVerdict("not_expansive",
                                            (Rule.FLAT_PERIODIC_ORBIT,),
                                            (w,), budget, tuple(notes))
        return ExpansivenessVerdict(
            "unknown", (), (), budget,
            ("no periodic orbit found within the search budget; absence is "
             "not certifiable by finite search",))
    # sphere
    rules = []
    witnesses = []
    reports = U.find_periodic(poly, budget.periodic_bounces, budget.samples,
                              budget.seed)
    for rep in reports:
        if U.verify_periodic(rep, poly) < U.RETURN_VERIFY_TOL:
            rules.append(Rule.SPHERE_PERIODIC_ORBIT)
            witnesses.append(Witness("periodic_orbit",
                                     Rule.SPHERE_PERIODIC_ORBIT, rep, True))
            break
    pair = _sphere_pair_witness(poly, budget)
    if pair is not None:
        rules.append(Rule.SPHERE_SAME_ITINERARY)
        witnesses.append(Witness("same_itinerary_pair",
                                 Rule.SPHERE_SAME_ITINERARY, pair, True))
    conj = C.conjugated_vertices(poly, budget.diagonal_depth,
                                 budget.diagonal_length,
                                 budget.diagonal_angles)
    if conj:
        rules.append(Rule.SPHERE_CONJUGATE_VERTICES)
        witnesses.append(Witness("conjugated_vertices",
                                 Rule.SPHERE_CONJUGATE_VERTICES, tuple(conj),
                                 all(c.residual < 1e-8 for c in conj)))
    if witnesses:
        return ExpansivenessVerdict("not_expansive", tuple(rules),
                                    tuple(witnesses), budget, tuple(notes))
    return ExpansivenessVerdict(
        "unknown", (), (), budget,
        ("no witness found within the search budget; no finite certificate "
         "of spherical expansiveness is implemented",))


def format_verdict(v, table_name=""):
    """Structured text report naming the rules and embedding witness data."""
    lines = []
    if table_name:
        lines.append(f"table: {table_name}")
    lines.append(f"verdict: {v.verdict}")
    lines.append("rules: " + (", ".join(r.value for r in v.rules) or "none"))
    for note in v.notes:
        lines.append(f"note: {note}")
    lines.append(f"witnesses: {len(v.witnesses)}")
    for w in v.witnesses:
        lines.append(f"  - kind: {w.kind} (rule {w.rule.value}, "
                     f"verified {'yes' if w.verified else 'no'})")
        if w.kind == "periodic_orbit":
            rep = w.data
            lines.append(f"    labels: {','.join(map(str, rep.labels))}")
            lines.append(f"    length: {rep.length:.12g}")
            lines.append(f"    residual: {rep.residual:.3e}")
            lines.append(f"    holonomy: {rep.holonomy}")
        elif w.kind == "same_itinerary_pair":
            pr = w.data
            lines.append(f"    base: side {pr.a.side} s {pr.a.s:.12g}")
            lines.append(f"    psi: {pr.a.psi:.12g} and {pr.b.psi:.12g}")
            lines.append(f"    agreement span: -{pr.compared[0]}..{pr.compared[1]}")
        elif w.kind == "conjugated_vertices":
            for cpair in w.data:
                lines.append(f"    vertices {cpair.vertices[0]}-{cpair.vertices[1]}"
                             f" length {cpair.diagonal.length:.12g}"
                             f" = {cpair.m} pi (residual {cpair.residual:.3e})")
    return "\n".join(lines) + "\n"
