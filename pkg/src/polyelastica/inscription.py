"""Polygonals inscribed in a curve: uniform, greedy equilateral, exact equilateral."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .curves import CurveEvaluator
from .polyline import Polygonal, modulus, validate_polygonal

__all__ = [
    "Inscription",
    "SCHEMES",
    "inscribe_uniform",
    "inscribe_equilateral_greedy",
    "inscribe_equilateral_exact",
    "inscribe",
    "refinement_sequence",
    "inscription_to_dict",
]

SCHEMES = ("uniform", "equilateral_greedy", "equilateral_exact")


@dataclass(frozen=True, eq=False)
class Inscription:
    """An inscribed polygonal with the curve parameters of its vertices.

    For the greedy scheme the last edge may be shorter than ``chord``;
    ``partial_last_edge`` records it and ``certified_edges`` counts the
    edges whose chord equals ``chord``.
    """

    polygonal: Polygonal
    params: np.ndarray
    scheme: str
    chord: Optional[float] = None
    partial_last_edge: bool = False
    certified_edges: int = 0
    modulus: Optional[float] = None
    domain_end: float = math.nan

    @property
    def n(self) -> int:
        return self.polygonal.n_edges

    @property
    def mesh(self) -> float:
        """Largest parameter gap between consecutive vertices."""
        knots = np.asarray(self.params)
        if self.polygonal.closed:
            return float(np.max(np.diff(np.append(knots, self.domain_end))))
        return float(np.max(np.diff(knots)))

    def with_modulus(self, curve: CurveEvaluator, resolution: int) -> "Inscription":
        mu = modulus(self.polygonal, curve, self.params, resolution)
        return Inscription(self.polygonal, self.params, self.scheme, self.chord,
                           self.partial_last_edge, self.certified_edges, mu, self.domain_end)


def _build(curve: CurveEvaluator, params, scheme: str, chord=None, partial=False,
           certified=0) -> Inscription:
    params = np.asarray(params, dtype=float)
    pts = curve.position(params)
    closed = curve.closed
    # drop parameters whose points coincide with their predecessor
    keep = [0]
    for i in range(1, len(pts)):
        if np.linalg.norm(pts[i] - pts[keep[-1]]) > 1e-12:
            keep.append(i)
    if closed and len(keep) > 1 and np.linalg.norm(pts[keep[-1]] - pts[0]) <= 1e-12:
        keep.pop()
    if len(keep) < 2:
        raise ValueError("degenerate curve: all inscribed points coincide")
    P = validate_polygonal(pts[keep], closed, tolerance=0.0)
    P = Polygonal(P.vertices, P.closed, len(pts) - len(keep))
    return Inscription(P, params[keep], scheme, chord, partial, certified, None,
                       curve.domain[1])


def inscribe_uniform(curve: CurveEvaluator, n: int) -> Inscription:
    """Vertices at n equispaced parameter steps (n vertices for closed curves)."""
    if int(n) != n or n < 2:
        raise ValueError("n must be an integer >= 2")
    t0, t1 = curve.domain
    t = np.linspace(t0, t1, int(n) + 1)
    if curve.closed:
        t = t[:-1]
    return _build(curve, t, "uniform")


def _greedy_params(curve: CurveEvaluator, chord: float, limit: Optional[int] = None,
                   xtol: float = 1e-15):
    """Parameters t_1 < t_2 < ... of first chord crossings, starting at t_0.

    Marches with step chord / (2 max|c'|) until the distance from the last
    vertex reaches ``chord`` and then solves for the crossing inside that
    step. Stops at the domain end or after ``limit`` new vertices.
    """
    t0, t1 = curve.domain
    h = chord / (2.0 * curve.max_speed)
    params = [t0]
    tol = xtol * max(1.0, abs(t1 - t0))
    while limit is None or len(params) <= limit:
        a = params[-1]
        base = curve.position(a)

        def g(t):
            return float(np.linalg.norm(curve.position(t) - base)) - chord

        lo = a
        found = False
        while lo < t1:
            hi = min(lo + h, t1)
            if g(hi) >= 0.0:
                found = True
                break
            lo = hi
        if not found:
            break
        root = hi if g(hi) == 0.0 else brentq(g, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)
        if root <= a:
            raise RuntimeError("root finder stalled")
        params.append(root)
    return params


def inscribe_equilateral_greedy(curve: CurveEvaluator, chord: float) -> Inscription:
    """Greedy equilateral inscription with edge length ``chord``.

    The leftover stretch after the last full edge becomes a final shorter
    edge (the seam edge for closed curves) flagged as ``partial_last_edge``.
    """
    if not chord > 0:
        raise ValueError("chord must be positive")
    params = _greedy_params(curve, chord)
    if len(params) < 2:
        raise ValueError("no chord crossing found: chord is longer than the curve allows")
    t0, t1 = curve.domain
    certified = len(params) - 1
    partial = False
    end_pt = curve.position(t1)
    gap = float(np.linalg.norm(end_pt - curve.position(params[-1])))
    if curve.closed:
        if gap <= 1e-12:
            params = params[:-1]
        else:
            partial = abs(gap - chord) > 1e-10 * max(1.0, chord)
    elif params[-1] < t1 and gap > 1e-12:
        params.append(t1)
        partial = True
    return _build(curve, params, "equilateral_greedy", chord, partial, certified)


def inscribe_equilateral_exact(curve: CurveEvaluator, n: int, xtol: float = 1e-15,
                               max_iter: int = 200) -> Inscription:
    """Equilateral inscription with exactly ``n`` edges ending at the curve end.

    The edge length is found by bracketing the sign change of
    |c(end) - c(t_{n-1}(l))| - l, where t_{n-1}(l) is the greedy vertex
    sequence for edge length l. On a closed curve the result is a closed
    equilateral polygonal whose seam edge has the same length.
    """
    if int(n) != n or n < 2:
        raise ValueError("n must be an integer >= 2")
    n = int(n)
    t0, t1 = curve.domain
    end_pt = curve.position(t1)

    def residual(chord):
        params = _greedy_params(curve, chord, limit=n - 1)
        if len(params) < n:
            return -chord
        return float(np.linalg.norm(end_pt - curve.position(params[n - 1]))) - chord

    hi = curve.max_speed * (t1 - t0) / n * (1 + 1e-9)
    if residual(hi) > 0:
        raise ValueError("could not bracket the edge length (pathological curve)")
    lo = 0.5 * hi
    for _ in range(60):
        if residual(lo) > 0:
            break
        hi, lo = lo, 0.5 * lo
    else:
        raise ValueError("could not bracket the edge length (pathological curve)")
    chord, info = brentq(residual, lo, hi, xtol=xtol * hi, rtol=4 * np.finfo(float).eps,
                         maxiter=max_iter, full_output=True)
    if not info.converged:
        raise RuntimeError("edge-length search exceeded its iteration budget")
    params = _greedy_params(curve, chord, limit=n - 1)[:n]
    if len(params) < n:
        raise RuntimeError("edge-length search ended outside the feasible range")
    if not curve.closed:
        params.append(t1)
    return _build(curve, params, "equilateral_exact", chord, False, n)


def inscribe(curve: CurveEvaluator, scheme: str, n: int) -> Inscription:
    """Dispatch by scheme name; the greedy scheme uses chord = length / n."""
    if scheme == "uniform":
        return inscribe_uniform(curve, n)
    if scheme == "equilateral_exact":
        return inscribe_equilateral_exact(curve, n)
    if scheme == "equilateral_greedy":
        from .curves import arclength

        return inscribe_equilateral_greedy(curve, arclength(curve) / n)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def refinement_sequence(curve: CurveEvaluator, scheme: str, counts: Sequence[int],
                        resolution: int = 257) -> list[Inscription]:
    """One inscription per count, each carrying its modulus.

    Warns (does not raise) when the moduli fail to decrease strictly.
    """
    counts = list(counts)
    if any(b <= a for a, b in zip(counts[:-1], counts[1:])):
        raise ValueError("counts must be strictly increasing")
    seq = [inscribe(curve, scheme, n).with_modulus(curve, resolution) for n in counts]
    mus = [ins.modulus for ins in seq]
    if any(b >= a for a, b in zip(mus[:-1], mus[1:])):
        warnings.warn(f"modulus is not strictly decreasing along the refinement: {mus}",
                      RuntimeWarning, stacklevel=2)
    return seq


def inscription_to_dict(ins: Inscription) -> dict:
    from .polyline import polygonal_to_dict

    return {
        "polygonal": polygonal_to_dict(ins.polygonal),
        "sidecar": {
            "params": [float(t) for t in ins.params],
            "scheme": ins.scheme,
            "chord": ins.chord,
        },
    }
