import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyelastica import (inscribe, inscribe_equilateral_exact, inscribe_equilateral_greedy,
                          inscribe_uniform, make_curve, p_rotation, refinement_sequence)
from polyelastica.inscription import inscription_to_dict

SMOOTH = [
    ("circle", {"R": 1}), ("ellipse", {"a": 2, "b": 1}), ("helix", {"r": 1, "pitch": 1}),
    ("graph", {"name": "wave"}), ("graph", {"name": "parabola", "scale": 2}),
    ("circle", {"R": 1, "open": True}),
]


def curve(kind, **params):
    return make_curve({"kind": kind, "params": params})


def chords(ins):
    V = ins.polygonal.vertices
    if ins.polygonal.closed:
        V = np.vstack([V, V[:1]])
    return np.linalg.norm(np.diff(V, axis=0), axis=1)


def assert_inscribed(c, ins):
    np.testing.assert_allclose(c.position(ins.params), ins.polygonal.vertices, atol=1e-10, rtol=0)
    assert np.all(np.diff(ins.params) > 0)


class TestUniform:
    def test_circle_square(self):
        ins = inscribe_uniform(curve("circle", R=1), 4)
        np.testing.assert_allclose(ins.polygonal.vertices, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)
        assert ins.polygonal.closed and ins.n == 4

    def test_line(self):
        ins = inscribe_uniform(curve("line", length=1), 3)
        np.testing.assert_allclose(ins.polygonal.vertices[:, 0], [0, 1 / 3, 2 / 3, 1])
        assert ins.params[0] == 0.0 and ins.params[-1] == 1.0

    def test_corner(self):
        ins = inscribe_uniform(curve("corner", theta=math.pi / 2, arm=1), 2)
        np.testing.assert_allclose(ins.polygonal.vertices, [[-1, 0], [0, 0], [0, 1]], atol=1e-15)

    def test_rejects(self):
        with pytest.raises(ValueError):
            inscribe_uniform(curve("line", length=1), 1)

    @pytest.mark.parametrize("kind,params", SMOOTH)
    def test_inscribed(self, kind, params):
        c = make_curve({"kind": kind, "params": params})
        assert_inscribed(c, inscribe_uniform(c, 37))


class TestGreedy:
    @pytest.mark.parametrize("n", [3, 5, 8, 33])
    def test_circle_regular(self, n):
        ins = inscribe_equilateral_greedy(curve("circle", R=1), 2 * math.sin(math.pi / n))
        assert ins.polygonal.n_vertices == n and ins.polygonal.closed
        np.testing.assert_allclose(ins.params, 2 * np.pi * np.arange(n) / n, atol=1e-9)
        assert not ins.partial_last_edge

    def test_line(self):
        ins = inscribe_equilateral_greedy(curve("line", length=5), 1.0)
        np.testing.assert_allclose(ins.polygonal.vertices[:, 0], np.arange(6), atol=1e-12)
        assert not ins.partial_last_edge and ins.certified_edges == 5

    def test_partial_edge_flagged(self):
        ins = inscribe_equilateral_greedy(curve("line", length=5), 1.5)
        assert ins.partial_last_edge and ins.certified_edges == 3
        assert chords(ins)[-1] == pytest.approx(0.5)

    def test_ellipse_chords(self):
        ins = inscribe_equilateral_greedy(curve("ellipse", a=2, b=1), 0.1)
        cert = chords(ins)[: ins.certified_edges]
        assert np.max(np.abs(cert - 0.1)) <= 1e-10

    def test_too_long(self):
        with pytest.raises(ValueError, match="crossing"):
            inscribe_equilateral_greedy(curve("line", length=1), 2.0)

    def test_first_crossing_on_folded_curve(self):
        # the wave graph comes back within the chord; the first crossing must win
        c = curve("graph", name="wave", scale=3)
        ins = inscribe_equilateral_greedy(c, 0.5)
        for a, b in zip(ins.params[: ins.certified_edges], ins.params[1: ins.certified_edges + 1]):
            t = np.linspace(a, b, 2000)[1:-1]
            d = np.linalg.norm(c.position(t) - c.position(a), axis=1)
            assert np.all(d < 0.5 + 1e-9)

    @pytest.mark.parametrize("kind,params", SMOOTH)
    @pytest.mark.parametrize("chord", [0.05, 0.3])
    def test_spacing_lower_bound(self, kind, params, chord):
        c = make_curve({"kind": kind, "params": params})
        ins = inscribe_equilateral_greedy(c, chord)
        assert_inscribed(c, ins)
        gaps = np.diff(ins.params)[: ins.certified_edges]
        # chord <= arc, and the arc is at most max speed times the gap
        assert np.all(gaps * c.max_speed >= chord * (1 - 1e-12))
        assert np.max(np.abs(chords(ins)[: ins.certified_edges] - chord)) <= 1e-10


class TestExact:
    def test_open_circle_hexagon(self):
        ins = inscribe_equilateral_exact(curve("circle", R=1, open=True), 6)
        assert ins.chord == pytest.approx(1.0, abs=1e-12)
        assert ins.polygonal.n_vertices == 7 and not ins.polygonal.closed

    def test_closed_circle(self):
        ins = inscribe_equilateral_exact(curve("circle", R=1), 12)
        assert ins.polygonal.closed and ins.polygonal.n_vertices == 12
        assert np.ptp(chords(ins)) <= 1e-12
        assert ins.chord == pytest.approx(2 * math.sin(math.pi / 12), abs=1e-12)

    def test_line(self):
        ins = inscribe_equilateral_exact(curve("line", length=1), 4)
        assert ins.chord == pytest.approx(0.25, abs=1e-14)

    def test_corner_two_edges(self):
        ins = inscribe_equilateral_exact(curve("corner", theta=math.pi / 2, arm=1), 2)
        e = chords(ins)
        assert abs(e[0] - e[1]) <= 1e-10
        # by symmetry the middle vertex is the corner itself
        assert ins.chord == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(ins.polygonal.vertices[1], [0, 0], atol=1e-10)

    def test_corner_three_edges_geometric(self):
        # equal chords from (-1,0) via (-1+l,0) and (0,y) to (0,1); solve the geometry directly
        from scipy.optimize import brentq

        def gap(l):
            y = math.sqrt(max(l * l - (1 - l) ** 2, 0.0))
            return (1 - y) - l

        ell = brentq(gap, 0.5, 0.99)
        ins = inscribe_equilateral_exact(curve("corner", theta=math.pi / 2, arm=1), 3)
        assert ins.chord == pytest.approx(ell, abs=1e-10)

    @pytest.mark.parametrize("kind,params", SMOOTH)
    @pytest.mark.parametrize("n", [5, 24])
    def test_equal_chords_and_endpoint(self, kind, params, n):
        c = make_curve({"kind": kind, "params": params})
        ins = inscribe_equilateral_exact(c, n)
        assert_inscribed(c, ins)
        assert ins.n == n
        assert np.max(np.abs(chords(ins) - ins.chord)) <= 1e-10
        if not c.closed:
            assert ins.params[-1] == c.domain[1]

    def test_langle_on_inscriptions(self):
        for kind, params in SMOOTH:
            c = make_curve({"kind": kind, "params": params})
            ins = inscribe_equilateral_exact(c, 20)
            V = ins.polygonal.vertices
            t = np.asarray(ins.params)
            u = np.diff(V, axis=0)
            u /= np.linalg.norm(u, axis=1)[:, None]
            for i in range(len(u) - 1):
                a, b = u[i], u[i + 1]
                sigma = (t[i + 2] - t[i + 1]) / (t[i + 1] - t[i]) - 1
                if sigma < 0:
                    # reverse orientation so the ratio is at least one
                    a, b, sigma = -b, -a, (t[i + 1] - t[i]) / (t[i + 2] - t[i + 1]) - 1
                cos = np.clip(np.dot(a, b), -1, 1)
                lhs = np.sum((b - (1 + sigma) * a) ** 2)
                assert lhs >= 2 * (1 - cos) - 1e-12


class TestDispatchAndSequence:
    def test_greedy_dispatch_uses_length(self):
        ins = inscribe(curve("line", length=2), "equilateral_greedy", 8)
        assert ins.chord == pytest.approx(0.25)

    def test_unknown_scheme(self):
        with pytest.raises(ValueError, match="scheme"):
            inscribe(curve("line", length=2), "random", 8)

    def test_circle_moduli(self):
        seq = refinement_sequence(curve("circle", R=1), "uniform", [4, 8, 16], resolution=1000)
        np.testing.assert_allclose([s.modulus for s in seq],
                                   [2 * math.sin(math.pi / n) for n in (4, 8, 16)], atol=1e-9)

    def test_line_moduli(self):
        seq = refinement_sequence(curve("line", length=1), "uniform", [2, 4])
        assert [s.modulus for s in seq] == pytest.approx([0.5, 0.25])

    def test_cantor_moduli_decrease(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            seq = refinement_sequence(curve("cantor_vitali", level=4), "uniform", [64, 128, 256])
        mus = [s.modulus for s in seq]
        assert mus[0] > mus[1] > mus[2]

    def test_non_monotone_warns(self):
        # on the folded wave, equal parameter steps do not guarantee a smaller modulus
        c = curve("graph", name="wave", scale=3)
        with pytest.warns(RuntimeWarning, match="modulus"):
            refinement_sequence(c, "uniform", [2, 3])

    def test_counts_must_increase(self):
        with pytest.raises(ValueError):
            refinement_sequence(curve("line", length=1), "uniform", [4, 4])

    @settings(max_examples=15)
    @given(st.integers(3, 200))
    def test_circle_energy_matches_ngon(self, n):
        ins = inscribe_equilateral_exact(curve("circle", R=1), n)
        assert p_rotation(ins.polygonal, 2) == pytest.approx(2 * math.pi / math.cos(math.pi / n), rel=1e-10)

    def test_emission(self):
        ins = inscribe_equilateral_exact(curve("line", length=1), 4)
        d = inscription_to_dict(ins)
        assert d["sidecar"]["scheme"] == "equilateral_exact"
        assert d["sidecar"]["chord"] == pytest.approx(0.25)
        assert len(d["sidecar"]["params"]) == len(d["polygonal"]["vertices"]) == 5
