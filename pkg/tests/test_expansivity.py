import math

import numpy as np
import pytest

from ccbilliards import (BoundaryState, GeometryError, Rule, SearchBudget,
                         classify, find_periodic, format_verdict,
                         periodic_orbit_neighborhood_check, probe_pair,
                         sphere_triangle, verify_periodic)

SMALL = SearchBudget(horizon=300, samples=400, periodic_bounces=20,
                     diagonal_depth=3, diagonal_angles=256, pair_probes=12,
                     seed=9)


class TestProbePair:
    def test_parallel_band_agrees(self, sq):
        pr = probe_pair(BoundaryState(1, 0.4, math.pi / 2),
                        BoundaryState(1, 0.6, math.pi / 2), sq, 50)
        assert pr.outcome == "itineraries_agree"
        assert pr.diverge_index is None
        assert not pr.truncated

    def test_sphere_nearby_directions_agree(self, tri1):
        s = 0.37 * tri1.side(3).length
        pr = probe_pair(BoundaryState(3, s, 0.9),
                        BoundaryState(3, s, 0.9 + 1e-5), tri1, 1000)
        assert pr.outcome == "itineraries_agree"
        assert pr.compared == (1000, 1000)

    def test_hyperbolic_pair_diverges(self, pentagon):
        pr = probe_pair(BoundaryState(1, 0.3, 1.0),
                        BoundaryState(2, 0.5, 1.2), pentagon, 100)
        assert pr.outcome == "itineraries_diverge"
        assert pr.diverge_index is not None

    def test_symmetric_in_arguments(self, pentagon):
        a = BoundaryState(1, 0.31, 1.17)
        b = BoundaryState(4, 0.52, 0.83)
        p1 = probe_pair(a, b, pentagon, 60)
        p2 = probe_pair(b, a, pentagon, 60)
        assert p1.outcome == p2.outcome
        assert p1.diverge_index == p2.diverge_index

    def test_same_orbit_rejected(self, sq):
        a = BoundaryState(1, 0.5, math.pi / 2)
        b = BoundaryState(3, 0.5, math.pi / 2)  # = f(a)
        with pytest.raises(GeometryError):
            probe_pair(a, b, sq, 10)

    def test_identical_states_rejected(self, sq):
        a = BoundaryState(1, 0.25, 1.0)
        with pytest.raises(GeometryError):
            probe_pair(a, a, sq, 10)


class TestClassify:
    def test_hyperbolic_expansive(self, pentagon):
        v = classify(pentagon, SMALL)
        assert v.verdict == "expansive"
        assert v.rules == (Rule.HYPERBOLIC_EXPANSIVE,)
        assert v.witnesses == ()

    def test_square_not_expansive_with_witness(self, sq):
        v = classify(sq, SMALL)
        assert v.verdict == "not_expansive"
        assert v.rules == (Rule.FLAT_PERIODIC_ORBIT,)
        assert len(v.witnesses) == 1
        rep = v.witnesses[0].data
        assert verify_periodic(rep, sq) < 1e-8

    def test_sphere_example_witnesses(self, tri1):
        v = classify(tri1, SMALL)
        assert v.verdict == "not_expansive"
        kinds = {w.kind for w in v.witnesses}
        assert "same_itinerary_pair" in kinds
        assert "conjugated_vertices" in kinds
        assert "periodic_orbit" not in kinds
        assert Rule.SPHERE_SAME_ITINERARY in v.rules
        assert Rule.SPHERE_CONJUGATE_VERTICES in v.rules

    def test_rational_sphere_periodic_witness(self):
        tri = sphere_triangle(math.pi / 6)
        v = classify(tri, SMALL)
        assert v.verdict == "not_expansive"
        assert Rule.SPHERE_PERIODIC_ORBIT in v.rules

    def test_never_expansive_off_hyperbolic(self, sq, tri1):
        for poly in (sq, tri1):
            assert classify(poly, SMALL).verdict != "expansive"

    def test_report_text(self, tri1):
        v = classify(tri1, SMALL)
        text = format_verdict(v, "sphere-triangle(theta=1.0)")
        assert "verdict: not_expansive" in text
        assert "sphere-same-itinerary" in text
        assert "1 pi" in text


class TestNeighborhoodCheck:
    def test_square_band(self, sq):
        rep = next(r for r in find_periodic(sq, 8, 300, seed=1)
                   if set(r.labels) == {1, 3})
        chk = periodic_orbit_neighborhood_check(rep, sq)
        assert chk
        assert chk.failures == ()

    def test_displacement_off_side_flagged(self, sq):
        rep = next(r for r in find_periodic(sq, 8, 300, seed=1)
                   if set(r.labels) == {1, 3})
        big = tuple(d * 1000 for d in (-1e-3, -5e-4, 2.5e-4, 5e-4, 1e-3))
        chk = periodic_orbit_neighborhood_check(rep, sq, displacements=big)
        assert not chk.ok
        assert chk.failures

    def test_non_flat_rejected(self, tri1):
        rep = find_periodic(sphere_triangle(math.pi / 6), 20, 120, seed=3)[0]
        with pytest.raises(GeometryError):
            periodic_orbit_neighborhood_check(rep, tri1)
