"""Closed-form reference values and a golden-section minimiser.

The formulas here are the comparison targets for the discrete energies:
the clamped circular-arc minimum, the four-arc rhombus minimiser, the
regular n-gon p-rotation and the corner divergence rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ClampedMinimum",
    "RhombusSolution",
    "fp",
    "pmin1",
    "pmin2_lambda",
    "rhombus_kp",
    "ngon_kp",
    "corner_rate",
    "minimize_1d",
    "ORACLES",
]


def _check_angle(alpha: float) -> None:
    if not 0 < alpha < math.pi:
        raise ValueError(f"angle must lie in (0, pi), got {alpha}")


def _check_p(p: float, strict: bool) -> None:
    if strict and not p > 1:
        raise ValueError(f"p must be > 1, got {p}")
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")


def fp(alpha: float, p: float) -> float:
    """alpha * tan(alpha/2)**(p-1) for alpha in (0, pi)."""
    _check_angle(alpha)
    _check_p(p, strict=False)
    return alpha * math.tan(0.5 * alpha) ** (p - 1.0)


@dataclass(frozen=True)
class ClampedMinimum:
    energy: float
    radius: float
    length_bounds: tuple


def pmin1(ell: float, theta: float, p: float) -> ClampedMinimum:
    """Minimal p-energy for two half-edges of length ell/2 meeting at turning angle theta.

    The minimiser is the circular arc of radius (ell/2)/tan(theta/2); any
    admissible curve has length strictly between ell*cos(theta/2) and ell.
    """
    if not ell > 0:
        raise ValueError("ell must be positive")
    _check_angle(theta)
    _check_p(p, strict=True)
    half = 0.5 * ell
    tan_half = math.tan(0.5 * theta)
    return ClampedMinimum(theta * (tan_half / half) ** (p - 1.0), half / tan_half,
                          (ell * math.cos(0.5 * theta), ell))


@dataclass(frozen=True)
class RhombusSolution:
    """Optimal tangency distance on the unit rhombus and the energy curve f."""

    theta: float
    p: float
    lambda_star: float

    def energy_at(self, lam: float) -> float:
        """Energy of the four-arc curve tangent at distance lam from the theta-vertices."""
        if not 0 < lam < 1:
            raise ValueError("lambda must lie in (0, 1)")
        q = 1.0 - self.p
        return 2.0 * (fp(self.theta, self.p) * lam ** q
                      + fp(math.pi - self.theta, self.p) * (1.0 - lam) ** q)

    @property
    def energy(self) -> float:
        return self.energy_at(self.lambda_star)

    @property
    def midpoint_energy(self) -> float:
        return self.energy_at(0.5)


def pmin2_lambda(theta: float, p: float) -> RhombusSolution:
    _check_angle(theta)
    _check_p(p, strict=True)
    ratio = fp(math.pi - theta, p) / fp(theta, p)
    return RhombusSolution(theta, p, 1.0 / (1.0 + ratio ** (1.0 / p)))


def rhombus_kp(theta: float, p: float) -> float:
    """p-rotation of the unit-side rhombus with two turning angles theta."""
    _check_angle(theta)
    _check_p(p, strict=True)
    other = math.pi - theta
    return 2.0 ** p * (theta * math.tan(0.5 * theta) ** (p - 1.0)
                       + other * math.tan(0.5 * other) ** (p - 1.0))


def ngon_kp(n: int, ell: float, p: float) -> float:
    """p-rotation of the regular n-gon with side ell: its smoothing is the incircle."""
    if int(n) != n or n < 3:
        raise ValueError("n must be an integer >= 3")
    if not ell > 0:
        raise ValueError("ell must be positive")
    _check_p(p, strict=False)
    return 2.0 * math.pi * ((2.0 / ell) * math.tan(math.pi / n)) ** (p - 1.0)


def corner_rate(theta: float, p: float, eps: float) -> float:
    """eps**(1-p) * theta * tan(theta/2)**(p-1): growth of the energy at a corner."""
    _check_angle(theta)
    _check_p(p, strict=False)
    if not eps > 0:
        raise ValueError("eps must be positive")
    return eps ** (1.0 - p) * theta * math.tan(0.5 * theta) ** (p - 1.0)


def minimize_1d(f, a: float, b: float, tol: float = 1e-10, max_iter: int = 500):
    """Golden-section search for the minimum of a unimodal ``f`` on [a, b].

    Returns ``(x, f(x))`` once the bracket is narrower than ``tol``. Works
    with any real type closed under arithmetic (``mpmath.mpf`` included), so
    the minimiser can be run in extended precision: in double precision the
    location of a smooth minimum is only resolved to about 1e-8.
    """
    if not a < b:
        raise ValueError("need a < b")
    r = ((a - a + 5) ** 0.5 - 1) / 2
    x1 = b - r * (b - a)
    x2 = a + r * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - r * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + r * (b - a)
            f2 = f(x2)
    else:
        raise RuntimeError("golden-section search exceeded its iteration budget")
    x = 0.5 * (a + b)
    return x, f(x)


# name -> (callable, parameter names); used by the command line
ORACLES = {
    "fp": (fp, ("alpha", "p")),
    "pmin1": (pmin1, ("ell", "theta", "p")),
    "pmin2_lambda": (pmin2_lambda, ("theta", "p")),
    "rhombus_kp": (rhombus_kp, ("theta", "p")),
    "ngon_kp": (ngon_kp, ("n", "ell", "p")),
    "corner_rate": (corner_rate, ("theta", "p", "eps")),
}
