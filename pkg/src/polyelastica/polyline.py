"""Polygonal curves and their first-order discrete geometry.

A polygonal is an ordered list of vertices in R^d (d >= 2), open or closed.
Everything here is a pure function of immutable data.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from os import PathLike
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist, pdist

__all__ = [
    "Polygonal",
    "validate_polygonal",
    "edge_vectors",
    "turning_angles",
    "rotation",
    "polyline_length",
    "modulus",
    "discrete_frechet",
    "polygonal_to_dict",
    "polygonal_from_dict",
    "read_polygonal",
    "write_polygonal",
]


@dataclass(frozen=True, eq=False)
class Polygonal:
    """Ordered vertex list with an open/closed flag.

    Build instances with :func:`validate_polygonal`; the constructor does
    not check anything. ``collapsed`` counts the duplicate vertices removed
    during validation.
    """

    vertices: np.ndarray
    closed: bool = False
    collapsed: int = field(default=0, compare=False)

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_edges(self) -> int:
        return self.n_vertices if self.closed else self.n_vertices - 1

    def __len__(self) -> int:
        return self.n_vertices


def validate_polygonal(raw_vertices, closed: bool = False, tolerance: float = 1e-12) -> Polygonal:
    """Check raw input and return a :class:`Polygonal`.

    Consecutive vertices closer than ``tolerance`` are collapsed into one;
    for closed polygonals a trailing copy of the first vertex is collapsed
    as well. The number of removed vertices is stored in ``collapsed``.

    Raises
    ------
    ValueError
        On ragged or non-finite input, dimension < 2, or fewer than two
        distinct vertices after collapsing.
    """
    try:
        pts = np.array(raw_vertices, dtype=float)
    except (ValueError, TypeError) as exc:
        raise ValueError(f"vertices must share one dimension: {exc}") from None
    if pts.ndim != 2:
        if pts.ndim == 1 and pts.size < 2:
            raise ValueError("fewer than 2 vertices")
        raise ValueError("vertices must be a list of equal-length coordinate lists")
    if pts.shape[0] < 2:
        raise ValueError("fewer than 2 vertices")
    if pts.shape[1] < 2:
        raise ValueError(f"dimension must be >= 2, got {pts.shape[1]}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite vertex coordinates")

    keep = [0]
    for i in range(1, len(pts)):
        if np.linalg.norm(pts[i] - pts[keep[-1]]) > tolerance:
            keep.append(i)
    if closed and len(keep) > 1 and np.linalg.norm(pts[keep[-1]] - pts[keep[0]]) <= tolerance:
        keep.pop()
    if len(keep) < 2:
        raise ValueError("fewer than 2 vertices after collapsing duplicates")
    out = pts[keep].copy()
    out.setflags(write=False)
    return Polygonal(out, bool(closed), len(pts) - len(keep))


def edge_vectors(P: Polygonal) -> np.ndarray:
    """Edge vectors v_i, including the seam edge of a closed polygonal."""
    V = P.vertices
    if P.closed:
        return np.roll(V, -1, axis=0) - V
    return np.diff(V, axis=0)


def _edge_pairs(P: Polygonal):
    """Incoming/outgoing edges and lengths at every smoothed vertex."""
    E = edge_vectors(P)
    L = np.linalg.norm(E, axis=1)
    if P.closed:
        return np.roll(E, 1, axis=0), E, np.roll(L, 1), L
    return E[:-1], E[1:], L[:-1], L[1:]


def turning_angles(P: Polygonal) -> np.ndarray:
    """Exterior angles between consecutive edges, each in [0, pi].

    Uses 2*atan(|b v_a - a v_b| / |b v_a + a v_b|), which stays accurate near
    0 and pi where arccos of a normalised dot product does not. Closed
    polygonals get one angle per vertex (the seam vertex included), open ones
    one per interior vertex.
    """
    v_in, v_out, l_in, l_out = _edge_pairs(P)
    if len(v_in) == 0:
        return np.zeros(0)
    a = l_out[:, None] * v_in
    b = l_in[:, None] * v_out
    return 2.0 * np.arctan2(np.linalg.norm(a - b, axis=1), np.linalg.norm(a + b, axis=1))


def rotation(P: Polygonal) -> float:
    """Sum of the turning angles (total curvature of the polygonal)."""
    return float(np.sum(turning_angles(P)))


def polyline_length(P: Polygonal) -> float:
    return float(np.sum(np.linalg.norm(edge_vectors(P), axis=1)))


def modulus(P: Polygonal, curve, params: Sequence[float], resolution: int = 1000,
            tolerance: float = 1e-9) -> float:
    """Largest diameter of the curve arcs cut out by consecutive vertices.

    Each arc is sampled at ``resolution`` equispaced parameters (end points
    included) and the diameter of the samples is returned, so the result is
    a lower bound on the true modulus. Sample sets are nested when
    ``resolution - 1`` doubles, and then the estimate can only grow.

    ``curve`` needs ``position(t)`` and ``domain``; for closed polygonals the
    seam arc runs from the last parameter to the end of the domain.
    """
    t = np.asarray(params, dtype=float)
    if len(t) != P.n_vertices:
        raise ValueError("one parameter per vertex is required")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    if np.any(np.diff(t) <= 0):
        raise ValueError("parameters must be strictly increasing")
    pos = curve.position(t)
    scale = 1.0 + float(np.max(np.abs(P.vertices)))
    if np.max(np.linalg.norm(pos - P.vertices, axis=1)) > tolerance * scale:
        raise ValueError("vertices are not on the curve at the given parameters")

    knots = list(t)
    if P.closed:
        knots.append(curve.domain[1])
    best = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        pts = curve.position(np.linspace(a, b, resolution))
        best = max(best, float(np.max(pdist(pts))))
    return best


def _sequence(P: Polygonal) -> np.ndarray:
    if P.closed:
        return np.vstack([P.vertices, P.vertices[:1]])
    return P.vertices


def discrete_frechet(P: Polygonal, Q: Polygonal) -> float:
    """Discrete Frechet distance between the vertex sequences of P and Q.

    Closed polygonals are traversed from their first vertex back to it.
    The value is an upper bound for the continuous Frechet distance.
    """
    A, B = _sequence(P), _sequence(Q)
    if A.shape[1] != B.shape[1]:
        raise ValueError("dimension mismatch")
    D = cdist(A, B)
    n, m = D.shape
    prev = np.maximum.accumulate(D[0])
    for i in range(1, n):
        row = D[i]
        cur = np.empty(m)
        cur[0] = max(prev[0], row[0])
        # min over the left, lower and diagonal predecessors
        diag_or_down = np.minimum(prev[1:], prev[:-1])
        for j in range(1, m):
            cur[j] = max(row[j], min(diag_or_down[j - 1], cur[j - 1]))
        prev = cur
    return float(prev[-1])


def polygonal_to_dict(P: Polygonal) -> dict:
    return {
        "dimension": P.dimension,
        "closed": P.closed,
        "vertices": [[float(x) for x in v] for v in P.vertices],
    }


def polygonal_from_dict(data: dict, tolerance: float = 1e-12) -> Polygonal:
    try:
        vertices = data["vertices"]
        closed = bool(data.get("closed", False))
    except (KeyError, TypeError, AttributeError):
        raise ValueError("polygonal JSON needs a 'vertices' list") from None
    P = validate_polygonal(vertices, closed, tolerance)
    if "dimension" in data and int(data["dimension"]) != P.dimension:
        raise ValueError(f"declared dimension {data['dimension']} != {P.dimension}")
    return P


def read_polygonal(path: str | PathLike, tolerance: float = 1e-12) -> Polygonal:
    with open(path) as fh:
        return polygonal_from_dict(json.load(fh), tolerance)


def write_polygonal(P: Polygonal, path: str | PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(polygonal_to_dict(P), fh)
        fh.write("\n")
