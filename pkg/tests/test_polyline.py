import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import vertex_arrays

from polyelastica import (discrete_frechet, make_curve, modulus, polyline_length, rotation,
                          turning_angles, validate_polygonal)
from polyelastica.polyline import (polygonal_from_dict, polygonal_to_dict, read_polygonal,
                                   write_polygonal)

SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]


def regular_ngon(n, radius=1.0, phase=0.0):
    t = phase + 2 * np.pi * np.arange(n) / n
    return np.column_stack([radius * np.cos(t), radius * np.sin(t)])


class TestValidate:
    def test_collapses_duplicates(self):
        P = validate_polygonal([[0, 0], [0, 0], [1, 0]])
        assert P.vertices.tolist() == [[0, 0], [1, 0]]
        assert P.collapsed == 1

    def test_closed_square(self):
        P = validate_polygonal(SQUARE, closed=True)
        assert P.n_vertices == 4 and P.n_edges == 4 and P.closed

    def test_closing_copy_is_collapsed(self):
        P = validate_polygonal(SQUARE + [[0, 0]], closed=True)
        assert P.n_vertices == 4 and P.collapsed == 1

    @pytest.mark.parametrize("raw,msg", [
        ([[0, 0]], "fewer than 2"),
        ([[0, 0], [0, 0]], "fewer than 2"),
        ([[0, 0], [1, 0, 0]], "dimension"),
        ([[0, 0], [np.nan, 1]], "finite"),
        ([[0, 0], [np.inf, 1]], "finite"),
        ([[0], [1]], "dimension"),
    ])
    def test_rejects(self, raw, msg):
        with pytest.raises(ValueError, match=msg):
            validate_polygonal(raw)

    def test_vertices_are_read_only(self):
        P = validate_polygonal(SQUARE)
        with pytest.raises(ValueError):
            P.vertices[0, 0] = 5.0


class TestTurningAngles:
    def test_right_angle(self):
        assert turning_angles(validate_polygonal([[0, 0], [1, 0], [1, 1]])) == pytest.approx([np.pi / 2])

    def test_collinear(self):
        assert turning_angles(validate_polygonal([[0, 0], [1, 0], [2, 0]])).tolist() == [0.0]

    def test_triangle(self):
        P = validate_polygonal(regular_ngon(3), closed=True)
        np.testing.assert_allclose(turning_angles(P), [2 * np.pi / 3] * 3, rtol=1e-14)

    def test_counts(self):
        V = regular_ngon(7)
        assert len(turning_angles(validate_polygonal(V))) == 5
        assert len(turning_angles(validate_polygonal(V, closed=True))) == 7

    def test_cusp(self):
        assert turning_angles(validate_polygonal([[0, 0], [1, 0], [0.5, 0]]))[0] == pytest.approx(np.pi)

    def test_near_collinear_is_accurate(self):
        # the dot-product formula returns 0 here; the true angle is 1e-9
        eps = 1e-9
        P = validate_polygonal([[0, 0], [1, 0], [1 + math.cos(eps), math.sin(eps)]])
        assert turning_angles(P)[0] == pytest.approx(eps, rel=1e-6)

    def test_near_cusp_is_accurate(self):
        eps = 1e-9
        P = validate_polygonal([[0, 0], [1, 0], [1 - math.cos(eps), math.sin(eps)]])
        assert np.pi - turning_angles(P)[0] == pytest.approx(eps, rel=1e-6)

    @given(vertex_arrays(min_vertices=3))
    def test_agrees_with_arccos(self, V):
        P = validate_polygonal(V)
        E = np.diff(P.vertices, axis=0)
        u = E / np.linalg.norm(E, axis=1)[:, None]
        ref = np.arccos(np.clip(np.sum(u[:-1] * u[1:], axis=1), -1, 1))
        theta = turning_angles(P)
        assert np.all((theta >= 0) & (theta <= np.pi))
        np.testing.assert_allclose(theta, ref, atol=1e-7)


class TestRotationLength:
    def test_square(self):
        P = validate_polygonal(SQUARE, closed=True)
        assert rotation(P) == pytest.approx(2 * np.pi, abs=1e-14)
        assert polyline_length(P) == 4.0

    def test_collinear(self):
        assert rotation(validate_polygonal([[0, 0], [1, 0], [2, 0]])) == 0.0

    def test_segment_length(self):
        assert polyline_length(validate_polygonal([[0, 0], [3, 4]])) == 5.0

    @pytest.mark.parametrize("n", [3, 5, 17, 100])
    def test_ngon_chords(self, n):
        P = validate_polygonal(regular_ngon(n), closed=True)
        assert polyline_length(P) == pytest.approx(n * 2 * np.sin(np.pi / n), rel=1e-13)

    @given(st.integers(3, 40), st.floats(0.1, 10), st.floats(0, 6.28))
    def test_convex_closed_is_two_pi(self, n, radius, phase):
        P = validate_polygonal(regular_ngon(n, radius, phase), closed=True)
        assert rotation(P) == pytest.approx(2 * np.pi, abs=1e-9)

    @given(st.lists(st.floats(0.01, 2 * np.pi - 0.01), min_size=3, max_size=20, unique=True))
    def test_convex_irregular_is_two_pi(self, angles):
        t = np.sort(angles)
        P = validate_polygonal(np.column_stack([np.cos(t), 2 * np.sin(t)]), closed=True)
        assert rotation(P) == pytest.approx(2 * np.pi, abs=1e-9)

    @given(vertex_arrays(min_vertices=3), st.floats(0.05, 0.95), st.integers(0, 100))
    def test_adding_a_vertex_never_decreases_rotation(self, V, frac, which):
        # inserting any vertex, even off the polygonal, can only add turning
        P = validate_polygonal(V)
        i = which % (P.n_vertices - 1)
        w = V[i] + frac * (V[i + 1] - V[i]) + 0.3 * np.roll(V[i + 1] - V[i], 1)
        Q = validate_polygonal(np.insert(V, i + 1, w, axis=0))
        assert rotation(Q) >= rotation(P) - 1e-9

    @given(vertex_arrays(min_vertices=2))
    def test_rotation_zero_iff_collinear_in_order(self, V):
        P = validate_polygonal(V)
        steps = np.cumsum(np.r_[0, np.linalg.norm(np.diff(V, axis=0), axis=1)])
        straight = validate_polygonal(V[0] + np.outer(steps, np.eye(V.shape[1])[0]))
        assert rotation(straight) == 0.0
        if rotation(P) == 0.0:
            E = np.diff(P.vertices, axis=0)
            assert np.allclose(E / np.linalg.norm(E, axis=1)[:, None], E[0] / np.linalg.norm(E[0]))


class TestModulus:
    @pytest.mark.parametrize("n", [4, 8, 16, 100])
    def test_ngon_on_circle(self, n):
        c = make_curve({"kind": "circle", "params": {"R": 1}})
        t = 2 * np.pi * np.arange(n) / n
        P = validate_polygonal(c.position(t), closed=True)
        assert modulus(P, c, t, 1000) == pytest.approx(2 * np.sin(np.pi / n), abs=1e-9)

    def test_two_vertex_segment(self):
        c = make_curve({"kind": "line", "params": {"length": 3}})
        P = validate_polygonal(c.position(np.array([0.0, 3.0])))
        assert modulus(P, c, [0.0, 3.0], 50) == pytest.approx(3.0)

    def test_arc_diameter_exceeds_chord(self):
        # a major arc: three vertices on the circle, one gap of 3/4 of a turn
        c = make_curve({"kind": "circle", "params": {"R": 1}})
        t = np.array([0.0, 0.25, 0.5]) * np.pi
        P = validate_polygonal(c.position(t), closed=True)
        assert modulus(P, c, t, 2001) == pytest.approx(2.0, abs=1e-5)

    @pytest.mark.parametrize("kind,params", [
        ("ellipse", {"a": 2, "b": 1}), ("helix", {"r": 1, "pitch": 1}),
        ("graph", {"name": "wave"}), ("cantor_vitali", {"level": 3}),
    ])
    def test_nested_resolution_is_monotone(self, kind, params):
        c = make_curve({"kind": kind, "params": params})
        t = np.linspace(*c.domain, 6)
        if c.closed:
            t = t[:-1]
        P = validate_polygonal(c.position(t), c.closed)
        vals = [modulus(P, c, t, 2 ** k + 1) for k in range(2, 10)]
        assert all(b >= a for a, b in zip(vals[:-1], vals[1:]))

    def test_rejects_off_curve(self):
        c = make_curve({"kind": "circle", "params": {"R": 1}})
        P = validate_polygonal([[1, 0], [0, 1.1]])
        with pytest.raises(ValueError, match="curve"):
            modulus(P, c, [0.0, np.pi / 2])

    def test_rejects_unordered_params(self):
        c = make_curve({"kind": "circle", "params": {"R": 1}})
        t = np.array([0.0, 2.0, 1.0])
        P = validate_polygonal(c.position(t))
        with pytest.raises(ValueError, match="increas"):
            modulus(P, c, t)


def brute_force_frechet(A, B):
    """Minimum over every monotone coupling path of the largest distance."""
    n, m = len(A), len(B)
    D = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2)
    best = math.inf
    # a path is a sequence of steps (1,0), (0,1), (1,1) from (0,0) to (n-1,m-1)
    def walk(i, j, worst):
        nonlocal best
        worst = max(worst, D[i, j])
        if worst >= best:
            return
        if i == n - 1 and j == m - 1:
            best = worst
            return
        for di, dj in ((1, 1), (1, 0), (0, 1)):
            if i + di < n and j + dj < m:
                walk(i + di, j + dj, worst)
    walk(0, 0, 0.0)
    return best


def threshold_frechet(A, B):
    """Smallest pairwise distance at which a monotone path exists (reachability search)."""
    D = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2)
    n, m = D.shape
    for eps in np.unique(D):
        ok = np.zeros((n, m), dtype=bool)
        for i in range(n):
            for j in range(m):
                if D[i, j] > eps:
                    continue
                if i == j == 0:
                    ok[i, j] = True
                else:
                    ok[i, j] = ((i > 0 and ok[i - 1, j]) or (j > 0 and ok[i, j - 1])
                                or (i > 0 and j > 0 and ok[i - 1, j - 1]))
        if ok[-1, -1]:
            return float(eps)
    raise AssertionError("unreachable")


def closed_sequence(P):
    V = P.vertices
    return np.vstack([V, V[:1]]) if P.closed else V


class TestFrechet:
    def test_identity(self):
        P = validate_polygonal(regular_ngon(9), closed=True)
        assert discrete_frechet(P, P) == 0.0

    @given(vertex_arrays(min_vertices=2), st.floats(0.0, 5.0))
    def test_translation(self, V, delta):
        d = V.shape[1]
        shift = np.zeros(d)
        shift[0] = delta
        P, Q = validate_polygonal(V), validate_polygonal(V + shift)
        assert discrete_frechet(P, Q) == pytest.approx(delta, abs=1e-12)

    def test_ngons_match_reachability_oracle(self):
        P = validate_polygonal(regular_ngon(8), closed=True)
        Q = validate_polygonal(regular_ngon(16), closed=True)
        ref = threshold_frechet(closed_sequence(P), closed_sequence(Q))
        assert discrete_frechet(P, Q) == ref

    @given(vertex_arrays(min_vertices=2, max_vertices=6, dims=(2,)),
           vertex_arrays(min_vertices=2, max_vertices=6, dims=(2,)))
    def test_matches_exhaustive_couplings(self, A, B):
        P, Q = validate_polygonal(A), validate_polygonal(B)
        assert discrete_frechet(P, Q) == brute_force_frechet(P.vertices, Q.vertices)

    @given(vertex_arrays(min_vertices=2, max_vertices=7, dims=(3,)),
           vertex_arrays(min_vertices=2, max_vertices=7, dims=(3,)),
           vertex_arrays(min_vertices=2, max_vertices=7, dims=(3,)))
    def test_metric_axioms(self, A, B, C):
        P, Q, R = (validate_polygonal(X) for X in (A, B, C))
        pq, qr, pr = discrete_frechet(P, Q), discrete_frechet(Q, R), discrete_frechet(P, R)
        assert pq >= 0
        assert pq == discrete_frechet(Q, P)
        assert pr <= pq + qr + 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            discrete_frechet(validate_polygonal([[0, 0], [1, 0]]),
                             validate_polygonal([[0, 0, 0], [1, 0, 0]]))


class TestJson:
    def test_round_trip_is_bit_identical(self, tmp_path):
        rng = np.random.default_rng(3)
        P = validate_polygonal(rng.normal(size=(9, 4)), closed=True)
        path = tmp_path / "p.json"
        write_polygonal(P, path)
        Q = read_polygonal(path)
        assert Q.closed and np.array_equal(P.vertices, Q.vertices)
        assert json.loads(path.read_text())["dimension"] == 4

    def test_declared_dimension_checked(self):
        with pytest.raises(ValueError, match="dimension"):
            polygonal_from_dict({"dimension": 3, "closed": False, "vertices": [[0, 0], [1, 1]]})

    def test_missing_vertices(self):
        with pytest.raises(ValueError, match="vertices"):
            polygonal_from_dict({"closed": True})

    def test_dict_shape(self):
        d = polygonal_to_dict(validate_polygonal(SQUARE, closed=True))
        assert set(d) == {"dimension", "closed", "vertices"}
