"""Arc-segment smoothing of a polygonal and the energies built on it.

Every vertex with turning angle theta in (0, pi) is replaced by the circular
arc tangent to both adjacent edges at distance r/2 from the vertex, where r
is the shorter of the two edges. Arcs are joined by the leftover pieces of
the edges. The p-rotation is the integral of curvature**p over that curve.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from os import PathLike
from typing import Optional

import numpy as np

from .polyline import Polygonal, _edge_pairs, rotation, turning_angles

__all__ = [
    "CurvePiece",
    "ArcSegmentCurve",
    "CurvatureProfile",
    "build_gamma",
    "curvature_profile",
    "p_rotation",
    "generalized_rotation",
    "kstar_rotation",
    "sample_gamma",
    "vertex_radii",
    "gamma_to_dict",
    "write_gamma",
    "profile_to_csv",
]


@dataclass(frozen=True, eq=False)
class CurvePiece:
    kind: str  # "arc" or "segment"
    start: np.ndarray
    tangent: np.ndarray
    length: float
    curvature: float = 0.0
    normal: Optional[np.ndarray] = None

    @property
    def turning(self) -> float:
        return self.length * self.curvature

    def point_at(self, s: float) -> np.ndarray:
        """Point at arc length ``s`` from the start of the piece."""
        if self.kind == "segment":
            return self.start + s * self.tangent
        rho = 1.0 / self.curvature
        phi = s * self.curvature
        # 1 - cos(phi) written as 2 sin^2(phi/2) to avoid cancellation
        return self.start + rho * (math.sin(phi) * self.tangent
                                   + 2.0 * math.sin(0.5 * phi) ** 2 * self.normal)

    def tangent_at(self, s: float) -> np.ndarray:
        if self.kind == "segment":
            return self.tangent
        phi = s * self.curvature
        return math.cos(phi) * self.tangent + math.sin(phi) * self.normal

    @property
    def end(self) -> np.ndarray:
        return self.point_at(self.length)

    @property
    def end_tangent(self) -> np.ndarray:
        return self.tangent_at(self.length)


@dataclass(frozen=True, eq=False)
class ArcSegmentCurve:
    pieces: tuple
    closed: bool = False

    @property
    def total_length(self) -> float:
        return float(sum(pc.length for pc in self.pieces))

    def join_defects(self) -> tuple[float, float]:
        """Largest position and tangent jumps between consecutive pieces."""
        pairs = list(zip(self.pieces[:-1], self.pieces[1:]))
        if self.closed and self.pieces:
            pairs.append((self.pieces[-1], self.pieces[0]))
        dpos = dtan = 0.0
        for a, b in pairs:
            dpos = max(dpos, float(np.linalg.norm(a.end - b.start)))
            dtan = max(dtan, float(np.linalg.norm(a.end_tangent - b.tangent)))
        return dpos, dtan


@dataclass(frozen=True)
class CurvatureProfile:
    lengths: np.ndarray
    curvatures: np.ndarray

    @property
    def total_length(self) -> float:
        return float(np.sum(self.lengths))

    def integrate(self, p: float) -> float:
        """Integral of curvature**p over arc length."""
        return float(np.sum(self.lengths * self.curvatures ** p))

    def __iter__(self):
        return iter(zip(self.lengths.tolist(), self.curvatures.tolist()))


def vertex_radii(P: Polygonal) -> np.ndarray:
    """r_i = min of the two edge lengths at each smoothed vertex."""
    _, _, l_in, l_out = _edge_pairs(P)
    return np.minimum(l_in, l_out)


def _drop_tol(length: float) -> float:
    return 1e-12 * length


def build_gamma(P: Polygonal, include_ends: bool = False) -> ArcSegmentCurve:
    """Smooth ``P`` into a G1 chain of circular arcs and segments.

    For an open polygonal the curve runs from the first tangency point to the
    last one; ``include_ends=True`` adds the two terminal half-edges as
    straight pieces (no effect on any energy). Connecting segments of zero
    length are dropped. A zero turning angle gives a straight piece of length
    r_i in place of the arc.

    Raises
    ------
    ValueError
        If some turning angle equals pi (no tangent circle exists).
    """
    theta = turning_angles(P)
    if np.any(theta >= math.pi):
        raise ValueError("turning angle equal to pi: the smoothing is undefined")
    v_in, v_out, l_in, l_out = _edge_pairs(P)
    r = np.minimum(l_in, l_out)
    centre_idx = np.arange(P.n_vertices) if P.closed else np.arange(1, P.n_vertices - 1)
    V = P.vertices

    pieces = []
    m = len(centre_idx)
    ends = include_ends and not P.closed
    if ends:
        E0 = V[1] - V[0]
        l0 = float(np.linalg.norm(E0))
        lead = l0 - 0.5 * r[0] if m else l0
        if lead > _drop_tol(l0):
            pieces.append(CurvePiece("segment", V[0].copy(), E0 / l0, float(lead)))

    for k in range(m):
        vert = V[centre_idx[k]]
        u_in = v_in[k] / l_in[k]
        u_out = v_out[k] / l_out[k]
        half = 0.5 * r[k]
        t_minus = vert - half * u_in
        th = float(theta[k])
        if th > 0.0:
            w = u_out - np.dot(u_in, u_out) * u_in
            nw = np.linalg.norm(w)
            if nw == 0.0:
                th = 0.0
        if th > 0.0:
            kappa = math.tan(0.5 * th) / half
            pieces.append(CurvePiece("arc", t_minus, u_in, th / kappa, kappa, w / nw))
        else:
            pieces.append(CurvePiece("segment", t_minus, u_in, float(r[k])))

        if k + 1 < m or P.closed:
            nxt = (k + 1) % m
            gap = float(l_out[k] - half - 0.5 * r[nxt])
            if gap > _drop_tol(l_out[k]):
                pieces.append(CurvePiece("segment", vert + half * u_out, u_out, gap))

    if ends and m:
        E1 = V[-1] - V[-2]
        l1 = float(np.linalg.norm(E1))
        u1 = E1 / l1
        trail = l1 - 0.5 * r[-1]
        if trail > _drop_tol(l1):
            pieces.append(CurvePiece("segment", V[-1] - trail * u1, u1, float(trail)))
    return ArcSegmentCurve(tuple(pieces), P.closed)


def curvature_profile(gamma: ArcSegmentCurve) -> CurvatureProfile:
    lengths = np.array([pc.length for pc in gamma.pieces], dtype=float)
    curv = np.array([pc.curvature for pc in gamma.pieces], dtype=float)
    return CurvatureProfile(lengths, curv)


def _check_p(p: float) -> None:
    if not p >= 1:
        raise ValueError(f"exponent p must be >= 1, got {p}")


def p_rotation(P: Polygonal, p: float) -> float:
    """p-energy of the smoothing of ``P``; ``inf`` at a cusp when p > 1.

    For p = 1 this is the rotation of ``P``.
    """
    _check_p(p)
    theta = turning_angles(P)
    if np.any(theta >= math.pi):
        return rotation(P) if p == 1 else math.inf
    return curvature_profile(build_gamma(P)).integrate(p)


def density(theta, p: float, alpha: float = 0.0) -> np.ndarray:
    """2**alpha * theta**(1-alpha) * tan(theta/2)**(p-1+alpha), zero at theta = 0."""
    theta = np.asarray(theta, dtype=float)
    out = np.zeros_like(theta)
    pos = theta > 0
    th = theta[pos]
    out[pos] = 2.0 ** alpha * th ** (1.0 - alpha) * np.tan(0.5 * th) ** (p - 1.0 + alpha)
    return out


def generalized_rotation(P: Polygonal, p: float, alpha: float = 0.0, scale: float = 1.0) -> float:
    """Sum over vertices of scale * (r_i/2)**(1-p) * f_{p,alpha}(theta_i).

    With ``alpha = 0`` and ``scale = 1`` this equals :func:`p_rotation`.
    With ``alpha = 1 - p`` it gives sum theta_i**p / r_i**(p-1); pass
    ``scale = 2**(p-1)`` to get the (l/2)-normalised discrete curvature
    returned by :func:`kstar_rotation` instead.
    """
    if not p > 1:
        raise ValueError(f"exponent p must be > 1, got {p}")
    if alpha < 1 - p:
        raise ValueError(f"alpha must be >= 1 - p = {1 - p}, got {alpha}")
    theta = turning_angles(P)
    if np.any(theta >= math.pi):
        raise ValueError("turning angle equal to pi")
    half = 0.5 * vertex_radii(P)
    return float(scale * np.sum(half ** (1.0 - p) * density(theta, p, alpha)))


def kstar_rotation(P: Polygonal, p: float) -> float:
    """Sum of theta_i**p / (r_i/2)**(p-1); the rotation when p = 1."""
    _check_p(p)
    theta = turning_angles(P)
    half = 0.5 * vertex_radii(P)
    return float(np.sum(theta ** p * half ** (1.0 - p)))


def sample_gamma(gamma: ArcSegmentCurve, s: float) -> np.ndarray:
    """Point of ``gamma`` at arc length ``s`` from its start."""
    total = gamma.total_length
    if not gamma.pieces:
        raise ValueError("empty curve")
    if s < 0 or s > total * (1 + 1e-14):
        raise ValueError(f"arc length {s} outside [0, {total}]")
    offsets = np.cumsum([0.0] + [pc.length for pc in gamma.pieces])
    k = int(np.searchsorted(offsets, s, side="right")) - 1
    k = min(max(k, 0), len(gamma.pieces) - 1)
    piece = gamma.pieces[k]
    return piece.point_at(min(s - offsets[k], piece.length))


def gamma_to_dict(gamma: ArcSegmentCurve) -> dict:
    return {
        "pieces": [
            {
                "kind": pc.kind,
                "start": pc.start.tolist(),
                "tangent": pc.tangent.tolist(),
                "normal": None if pc.normal is None else pc.normal.tolist(),
                "length": pc.length,
                "curvature": pc.curvature,
            }
            for pc in gamma.pieces
        ],
        "total_length": gamma.total_length,
    }


def write_gamma(gamma: ArcSegmentCurve, path: str | PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(gamma_to_dict(gamma), fh)
        fh.write("\n")


def profile_to_csv(profile: CurvatureProfile, path: str | PathLike | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["length", "curvature"])
    for length, kappa in profile:
        writer.writerow([repr(length), repr(kappa)])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
