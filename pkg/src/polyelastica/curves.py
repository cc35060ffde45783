"""Analytic test curves, arc length, p-energy and the Euler-Lagrange residual.

Curves are described by a :class:`CurveSpec` (JSON friendly) and evaluated
through a :class:`CurveEvaluator`, which supplies position, first and second
derivatives on a parameter interval. Piecewise kinds expose their knots so
that quadrature never straddles a kink in the integrand.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .quadrature import NonFiniteIntegrand, integrate_pieces

__all__ = [
    "CurveSpec",
    "CurveEvaluator",
    "EnergyReport",
    "make_curve",
    "read_curve_spec",
    "cantor_vitali_profile",
    "arclength",
    "param_at_arclength",
    "p_energy",
    "total_curvature",
    "closed_form_energy",
    "el_residual",
    "GRAPH_FUNCTIONS",
]

_REQUIRED = {
    "circle": ("R",),
    "ellipse": ("a", "b"),
    "helix": ("r", "pitch"),
    "graph": ("name",),
    "cantor_vitali": ("level",),
    "corner": ("theta", "arm"),
    "line": ("length",),
}

# name -> (f, f', f'', slope is monotone on [0, 1]); each takes (t, scale)
GRAPH_FUNCTIONS: dict[str, tuple[Callable, Callable, Callable, bool]] = {
    "parabola": (lambda t, s: 0.5 * s * t * t, lambda t, s: s * t,
                 lambda t, s: s + 0.0 * t, True),
    "cubic": (lambda t, s: s * t ** 3, lambda t, s: 3.0 * s * t * t,
              lambda t, s: 6.0 * s * t, True),
    "sine": (lambda t, s: s * np.sin(np.pi * t), lambda t, s: s * np.pi * np.cos(np.pi * t),
             lambda t, s: -s * np.pi ** 2 * np.sin(np.pi * t), True),
    "cosh": (lambda t, s: s * np.cosh(t), lambda t, s: s * np.sinh(t),
             lambda t, s: s * np.cosh(t), True),
    "wave": (lambda t, s: s * np.sin(2 * np.pi * t), lambda t, s: 2 * np.pi * s * np.cos(2 * np.pi * t),
             lambda t, s: -4 * np.pi ** 2 * s * np.sin(2 * np.pi * t), False),
}


@dataclass(frozen=True)
class CurveSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _REQUIRED:
            raise ValueError(f"unknown curve kind {self.kind!r}; expected one of {sorted(_REQUIRED)}")
        missing = [k for k in _REQUIRED[self.kind] if k not in self.params]
        if missing:
            raise ValueError(f"{self.kind} needs parameters {missing}")
        p = self.params
        if self.kind == "graph":
            if p["name"] not in GRAPH_FUNCTIONS:
                raise ValueError(f"unknown graph function {p['name']!r}")
        elif self.kind == "cantor_vitali":
            lvl = p["level"]
            if int(lvl) != lvl or lvl < 0:
                raise ValueError("cantor_vitali level must be a non-negative integer")
        elif self.kind == "corner":
            if not 0 < float(p["theta"]) < math.pi:
                raise ValueError("corner angle must lie in (0, pi)")
            if not float(p["arm"]) > 0:
                raise ValueError("corner arm length must be positive")
        else:
            for k in _REQUIRED[self.kind]:
                if not float(p[k]) > 0:
                    raise ValueError(f"{self.kind} parameter {k} must be positive")
            if self.kind == "helix" and not float(p.get("turns", 1.0)) > 0:
                raise ValueError("helix turns must be positive")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, data: dict) -> "CurveSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise ValueError("curve spec must be an object with a 'kind' field")
        return cls(data["kind"], dict(data.get("params", {})))


def read_curve_spec(path: str | PathLike) -> CurveSpec:
    with open(path) as fh:
        return CurveSpec.from_dict(json.load(fh))


class CurveEvaluator:
    """Position and derivatives of a parameterised curve.

    Methods accept a scalar or a 1-d array of parameters and return a
    vector of shape (d,) or an array of shape (m, d). At a knot the
    right-hand piece is used.
    """

    def __init__(self, spec: CurveSpec, domain, dimension: int, pos, d1, d2,
                 closed: bool = False, knots=(), flagged=(), max_speed: float = 1.0,
                 unit_speed: bool = False, graph_slope=None, slope_monotone: bool = False):
        self.spec = spec
        self.domain = (float(domain[0]), float(domain[1]))
        self.dimension = dimension
        self.closed = closed
        self.breakpoints = tuple(float(k) for k in knots)
        self.flagged = tuple(float(k) for k in flagged)
        self.max_speed = float(max_speed)
        self.unit_speed = unit_speed
        self._pos, self._d1, self._d2 = pos, d1, d2
        self.graph_slope = graph_slope
        self.slope_monotone = slope_monotone

    def __repr__(self):
        return f"CurveEvaluator({self.spec.kind}, {self.spec.params}, domain={self.domain})"

    @staticmethod
    def _call(fn, t):
        arr = np.asarray(t, dtype=float)
        out = fn(np.atleast_1d(arr))
        return out[0] if arr.ndim == 0 else out

    def position(self, t):
        return self._call(self._pos, t)

    def d1(self, t):
        return self._call(self._d1, t)

    def d2(self, t):
        return self._call(self._d2, t)

    def d2_fd(self, t, h: Optional[float] = None):
        """One-sided difference of the first derivative, step 1e-6 of the domain."""
        t0, t1 = self.domain
        h = 1e-6 * (t1 - t0) if h is None else h
        t = np.asarray(t, dtype=float)
        fwd = np.ones_like(t, dtype=bool)
        fwd &= t + h <= t1
        for k in self.knots[1:-1]:
            fwd &= ~((t < k) & (t + h >= k))
        step = np.where(fwd, h, -h)
        if t.ndim == 0:
            return (self.d1(t + step) - self.d1(t)) / step
        return (self.d1(t + step) - self.d1(t)) / step[:, None]

    def speed(self, t):
        return np.linalg.norm(self.d1(t), axis=-1)

    def curvature(self, t):
        """Unsigned curvature |c''_perp| / |c'|^2."""
        a = np.atleast_2d(self.d1(t))
        b = np.atleast_2d(self.d2(t))
        sp2 = np.sum(a * a, axis=1)
        perp = b - (np.sum(a * b, axis=1) / sp2)[:, None] * a
        k = np.linalg.norm(perp, axis=1) / sp2
        return k[0] if np.ndim(t) == 0 else k

    def signed_curvature(self, t):
        if self.dimension != 2:
            raise ValueError("signed curvature needs a planar curve")
        a = np.atleast_2d(self.d1(t))
        b = np.atleast_2d(self.d2(t))
        sp = np.hypot(a[:, 0], a[:, 1])
        k = (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]) / sp ** 3
        return k[0] if np.ndim(t) == 0 else k

    @property
    def knots(self) -> np.ndarray:
        """Domain end points together with all interior break parameters."""
        inner = sorted(set(self.breakpoints) | set(self.flagged))
        return np.array([self.domain[0], *inner, self.domain[1]])

    def tangent_jumps(self) -> list[float]:
        """Angle between one-sided tangents at every flagged parameter."""
        out = []
        for k in self.flagged:
            left = self.d1(np.nextafter(k, self.domain[0]))
            right = self.d1(k)
            cos = np.dot(left, right) / (np.linalg.norm(left) * np.linalg.norm(right))
            out.append(float(np.arccos(np.clip(cos, -1.0, 1.0))))
        return out


def _stack(*cols):
    return np.stack(np.broadcast_arrays(*cols), axis=1)


def cantor_vitali_profile(level: int):
    """Knots and values of the level-m piecewise linear Cantor-Vitali function.

    v_0(t) = t; v_{m+1} is v_m(3t)/2 on [0, 1/3], 1/2 on [1/3, 2/3] and
    1/2 + v_m(3t - 2)/2 on [2/3, 1]. The result is continuous and linear
    between consecutive knots.
    """
    k = np.array([0.0, 1.0])
    v = np.array([0.0, 1.0])
    for _ in range(int(level)):
        k = np.concatenate([k / 3.0, 2.0 / 3.0 + k / 3.0])
        v = np.concatenate([v / 2.0, 0.5 + v / 2.0])
    return k, v


def _graph_evaluator(spec, f, f1, f2, knots=(), monotone=False):
    def pos(t):
        return _stack(t, f(t))

    def d1(t):
        return _stack(np.ones_like(t), f1(t))

    def d2(t):
        return _stack(np.zeros_like(t), f2(t))

    grid = np.linspace(0.0, 1.0, 4097)
    max_speed = 1.01 * float(np.max(np.hypot(1.0, f1(grid))))
    return CurveEvaluator(spec, (0.0, 1.0), 2, pos, d1, d2, knots=knots,
                          max_speed=max_speed, graph_slope=f1, slope_monotone=monotone)


def make_curve(spec: CurveSpec | dict) -> CurveEvaluator:
    """Build the evaluator for a curve description."""
    if isinstance(spec, dict):
        spec = CurveSpec.from_dict(spec)
    kind, p = spec.kind, spec.params

    if kind == "circle":
        R = float(p["R"])
        return CurveEvaluator(
            spec, (0.0, 2 * math.pi * R), 2,
            lambda t: R * _stack(np.cos(t / R), np.sin(t / R)),
            lambda t: _stack(-np.sin(t / R), np.cos(t / R)),
            lambda t: -_stack(np.cos(t / R), np.sin(t / R)) / R,
            closed=not p.get("open", False), max_speed=1.0, unit_speed=True)

    if kind == "ellipse":
        a, b = float(p["a"]), float(p["b"])
        return CurveEvaluator(
            spec, (0.0, 2 * math.pi), 2,
            lambda t: _stack(a * np.cos(t), b * np.sin(t)),
            lambda t: _stack(-a * np.sin(t), b * np.cos(t)),
            lambda t: _stack(-a * np.cos(t), -b * np.sin(t)),
            closed=not p.get("open", False), max_speed=max(a, b))

    if kind == "helix":
        r, h = float(p["r"]), float(p["pitch"]) / (2 * math.pi)
        turns = float(p.get("turns", 1.0))
        return CurveEvaluator(
            spec, (0.0, 2 * math.pi * turns), 3,
            lambda t: _stack(r * np.cos(t), r * np.sin(t), h * t),
            lambda t: _stack(-r * np.sin(t), r * np.cos(t), h + 0.0 * t),
            lambda t: _stack(-r * np.cos(t), -r * np.sin(t), 0.0 * t),
            max_speed=math.hypot(r, h))

    if kind == "line":
        length = float(p["length"])
        return CurveEvaluator(
            spec, (0.0, length), 2,
            lambda t: _stack(t, 0.0 * t),
            lambda t: _stack(np.ones_like(t), 0.0 * t),
            lambda t: _stack(0.0 * t, 0.0 * t),
            max_speed=1.0, unit_speed=True)

    if kind == "corner":
        theta, arm = float(p["theta"]), float(p["arm"])
        e2 = np.array([math.cos(theta), math.sin(theta)])

        def pos(t):
            s = (t - arm)[:, None]
            return np.where(s <= 0, s * np.array([1.0, 0.0]), s * e2)

        def d1(t):
            return np.where((t < arm)[:, None], np.array([1.0, 0.0]), e2)

        return CurveEvaluator(spec, (0.0, 2 * arm), 2, pos, d1,
                              lambda t: np.zeros((len(t), 2)),
                              flagged=(arm,), max_speed=1.0, unit_speed=True)

    if kind == "graph":
        f, f1, f2, mono = GRAPH_FUNCTIONS[p["name"]]
        s = float(p.get("scale", 1.0))
        return _graph_evaluator(spec, lambda t: f(t, s), lambda t: f1(t, s),
                                lambda t: f2(t, s), monotone=mono)

    if kind == "cantor_vitali":
        k, v = cantor_vitali_profile(int(p["level"]))
        slope = np.diff(v) / np.diff(k)
        u = np.concatenate([[0.0], np.cumsum(0.5 * (v[:-1] + v[1:]) * np.diff(k))])
        last = len(k) - 2

        def piece(t):
            j = np.clip(np.searchsorted(k, t, side="right") - 1, 0, last)
            return j, t - k[j]

        def f(t):
            j, tau = piece(t)
            return u[j] + v[j] * tau + 0.5 * slope[j] * tau * tau

        def f1(t):
            j, tau = piece(t)
            return v[j] + slope[j] * tau

        def f2(t):
            j, _ = piece(t)
            return slope[j]

        return _graph_evaluator(spec, f, f1, f2, knots=k[1:-1], monotone=True)

    raise ValueError(f"unknown curve kind {kind!r}")  # pragma: no cover


def arclength(c: CurveEvaluator, tol: float = 1e-10) -> float:
    """Length of the curve by adaptive quadrature of the speed."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if c.unit_speed:
        return c.domain[1] - c.domain[0]
    value, _ = integrate_pieces(c.speed, c.knots, tol)
    return value


def param_at_arclength(c: CurveEvaluator, s: float, tol: float = 1e-12) -> float:
    """Parameter where the arc length measured from the domain start equals ``s``."""
    t0, t1 = c.domain
    if c.unit_speed:
        return t0 + s
    total = arclength(c, tol)
    if s <= 0:
        return t0
    if s >= total:
        return t1

    def excess(t):
        return integrate_pieces(c.speed, [x for x in c.knots if x < t] + [t], tol)[0] - s

    return brentq(excess, t0, t1, xtol=1e-14 * (t1 - t0))


@dataclass(frozen=True)
class EnergyReport:
    p: float
    value: float
    quadrature_error_estimate: float
    length: float
    cross_check: Optional[float] = None


def _graph_area_formula(c: CurveEvaluator, p: float, tol: float) -> float:
    # |c_u'|^(1-p) |tau_u'|^p with |tau_u'| = |f''| / (1 + f'^2)
    def integrand(t):
        a = np.atleast_2d(c.d1(t))[:, 1]
        b = np.atleast_2d(c.d2(t))[:, 1]
        w = 1.0 + a * a
        return w ** (0.5 * (1.0 - p)) * (np.abs(b) / w) ** p

    return integrate_pieces(integrand, c.knots, tol)[0]


def p_energy(c: CurveEvaluator, p: float, tol: float = 1e-10) -> EnergyReport:
    """Integral of curvature**p over arc length, by adaptive quadrature.

    The integrand kappa(t)**p * |c'(t)| is integrated piece by piece between
    knots. Tangent jumps at flagged parameters add their angle when p = 1
    and make the energy infinite when p > 1. Graph curves also carry the
    area-formula value in ``cross_check``.
    """
    if not p >= 1:
        raise ValueError(f"exponent p must be >= 1, got {p}")

    def integrand(t):
        return c.curvature(t) ** p * c.speed(t)

    try:
        value, err = integrate_pieces(integrand, c.knots, tol)
    except NonFiniteIntegrand as exc:
        raise ValueError(f"curvature is not finite between flagged parameters: {exc}") from None
    jumps = [j for j in c.tangent_jumps() if j > 0]
    if jumps:
        value = value + sum(jumps) if p == 1 else math.inf
    cross = _graph_area_formula(c, p, tol) if c.graph_slope is not None else None
    return EnergyReport(p, float(value), float(err), arclength(c, tol), cross)


def total_curvature(c: CurveEvaluator, tol: float = 1e-10, exact: bool = True) -> float:
    """Total curvature; exact for planar graphs with monotone slope.

    For such graphs the tangent angle is arctan(f') and the result is
    |arctan f'(end) - arctan f'(start)|; otherwise the p = 1 energy is
    returned.
    """
    if exact and c.graph_slope is not None and c.slope_monotone:
        t0, t1 = c.domain
        lo = float(c.graph_slope(np.array([t0]))[0])
        hi = float(c.graph_slope(np.array([t1]))[0])
        return abs(math.atan(hi) - math.atan(lo))
    return p_energy(c, 1.0, tol).value


def closed_form_energy(c: CurveEvaluator, p: float) -> Optional[float]:
    """Exact p-energy for kinds with constant curvature, else None."""
    kind, prm = c.spec.kind, c.spec.params
    if kind == "circle":
        R = float(prm["R"])
        return 2 * math.pi * R ** (1.0 - p)
    if kind == "helix":
        r, h = float(prm["r"]), float(prm["pitch"]) / (2 * math.pi)
        kappa = r / (r * r + h * h)
        length = (c.domain[1] - c.domain[0]) * math.hypot(r, h)
        return length * kappa ** p
    if kind == "line":
        return 0.0
    if kind == "corner":
        return float(prm["theta"]) if p == 1 else math.inf
    return None


def el_residual(c: CurveEvaluator, p: float, eps: float, s: float,
                step: Optional[float] = None) -> float:
    """Residual of the Euler-Lagrange equation of eps*L + E_p at arc length s.

    p|k|^(p-2) k'' + p(p-2)|k|^(p-4) k k'^2 + k|k|^p - eps k/(p-1), with k the
    signed curvature and its arc-length derivatives taken by centred
    differences of step 1e-4 * L.

    Raises
    ------
    ValueError
        For non-planar curves, p <= 1, eps <= 0, or k = 0 at s when the
        weights |k|^(p-2), |k|^(p-4) are singular there.
    """
    if c.dimension != 2:
        raise ValueError("the Euler-Lagrange residual is defined for planar curves")
    if not p > 1:
        raise ValueError("p must be > 1")
    if not eps > 0:
        raise ValueError("eps must be positive")
    L = arclength(c)
    h = 1e-4 * L if step is None else step
    if not c.closed and (s - h < 0 or s + h > L):
        raise ValueError(f"arc length {s} too close to an end point for step {h}")

    def kappa(x):
        if c.closed:
            x = x % L
        return float(c.signed_curvature(param_at_arclength(c, x)))

    k0, kp, km = kappa(s), kappa(s + h), kappa(s - h)
    if k0 == 0.0 and p < 4 and p != 2:
        raise ValueError("zero curvature: the residual weights are singular here")
    k1 = (kp - km) / (2 * h)
    k2 = (kp - 2 * k0 + km) / (h * h)
    a = abs(k0)
    first = p * a ** (p - 2) * k2 if p != 2 else 2 * k2
    second = p * (p - 2) * a ** (p - 4) * k0 * k1 * k1 if p != 2 else 0.0
    return first + second + k0 * a ** p - eps * k0 / (p - 1)
