"""Scalar hyperbolic trigonometry.

Lengths are plain floats.  Every public function rejects non-finite input
and never returns NaN or infinity; inconsistent data raises instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateError, DomainError

__all__ = [
    "Tol", "Signature", "DEFAULT_TOL", "ARCCOSH_BOUND", "ARCSINH_ONE",
    "area", "acosh_checked", "collar_width", "pentagon_opposite",
    "hexagon_opposite", "pants_perp", "height_from_geodesic",
    "displacement_lower_bound_glued", "half_collar_variant", "safeguarded_newton",
    "compare_bounds", "COMPARISON_C_RANGES",
]


@dataclass(frozen=True)
class Tol:
    abs_res: float = 1e-9
    domain_eps: float = 1e-12

    def __post_init__(self):
        if not (0.0 < self.domain_eps <= self.abs_res < 1.0):
            raise DomainError(
                f"need 0 < domain_eps <= abs_res < 1, got {self.domain_eps}, {self.abs_res}")


DEFAULT_TOL = Tol()


@dataclass(frozen=True)
class Signature:
    """Genus and number of boundary geodesics of a compact hyperbolic surface."""

    genus: int
    boundary_count: int = 0

    def __post_init__(self):
        g, n = self.genus, self.boundary_count
        if g < 0 or n < 0:
            raise DomainError(f"negative signature ({g}, {n})")
        if (g, n) < (0, 3) or (g, n) == (1, 0):
            raise DomainError(f"signature ({g}, {n}) admits no hyperbolic metric")

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - self.boundary_count


def _real(value, name="value") -> float:
    v = float(value)
    if not math.isfinite(v):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return v


def _positive(value, name="length") -> float:
    v = _real(value, name)
    if v <= 0.0:
        raise DomainError(f"{name} must be positive, got {v}")
    return v


def area(sig: Signature) -> float:
    return 2.0 * math.pi * (-sig.euler_characteristic)


def acosh_checked(v: float, tol: Tol = DEFAULT_TOL) -> float:
    """arccosh with a clamping window of width ``tol.domain_eps`` below 1."""
    v = _real(v)
    if v < 1.0 - tol.domain_eps:
        raise DomainError(f"arccosh argument {v!r} below 1")
    if v <= 1.0:
        return 0.0
    return math.acosh(v)


ARCCOSH_BOUND = math.acosh((5.0 + math.sqrt(17.0)) / 2.0)
ARCSINH_ONE = math.asinh(1.0)


def collar_width(length: float) -> float:
    """Half-width of the standard collar about a simple closed geodesic."""
    length = _positive(length)
    return math.asinh(1.0 / math.sinh(length / 2.0))


def pentagon_opposite(a: float, b: float, tol: Tol = DEFAULT_TOL) -> float:
    """Side of a right-angled pentagon not adjacent to the adjacent sides a, b.

    cosh(c) = sinh(a) sinh(b).
    """
    a, b = _positive(a, "a"), _positive(b, "b")
    v = math.sinh(a) * math.sinh(b)
    if not math.isfinite(v):
        raise DomainError("pentagon sides too long")
    if v <= 1.0 + tol.domain_eps:
        raise DegenerateError(f"sinh(a)sinh(b) = {v!r} <= 1, no right-angled pentagon")
    return math.acosh(v)


def hexagon_opposite(a: float, m: float, b: float, tol: Tol = DEFAULT_TOL) -> float:
    # side opposite m; a and b are the two sides adjacent to m
    a, m, b = _positive(a, "a"), _positive(m, "m"), _positive(b, "b")
    v = math.sinh(a) * math.sinh(b) * math.cosh(m) - math.cosh(a) * math.cosh(b)
    if not math.isfinite(v):
        raise DomainError("hexagon sides too long")
    if v <= 1.0 + tol.domain_eps:
        raise DegenerateError(f"cosh(c) = {v!r} <= 1, no right-angled hexagon")
    return math.acosh(v)


def pants_perp(li: float, lj: float, lk: float) -> float:
    """Length of the common perpendicular between cuffs i and j of a pair of pants."""
    li, lj, lk = _positive(li, "li"), _positive(lj, "lj"), _positive(lk, "lk")
    hi, hj, hk = li / 2.0, lj / 2.0, lk / 2.0
    coth = 1.0 / (math.tanh(hi) * math.tanh(hj))
    # cosh(hk) / (sinh(hi) sinh(hj)) evaluated in log space
    log_ratio = _log_cosh(hk) - _log_sinh(hi) - _log_sinh(hj)
    if log_ratio > 700.0:
        # arccosh(v) = log(2v) to double precision once v > 1e8
        return math.log(2.0) + log_ratio + math.log1p(coth * math.exp(-log_ratio))
    return math.acosh(coth + math.exp(log_ratio))


def _log_cosh(x: float) -> float:
    x = abs(x)
    return x + math.log1p(math.exp(-2.0 * x)) - math.log(2.0)


def _log_sinh(x: float) -> float:
    if x < 20.0:
        return math.log(math.sinh(x))
    return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)


def height_from_geodesic(gamma: float, beta: float) -> float:
    """Length of the height h_gamma of a one-holed torus with boundary beta.

    Cutting along gamma and the height splits the torus into four congruent
    right-angled pentagons with adjacent sides beta/4, h/2 and opposite side
    gamma/2, so cosh(gamma/2) = sinh(h/2) sinh(beta/4).
    """
    gamma, beta = _positive(gamma, "gamma"), _positive(beta, "beta")
    log_ratio = _log_cosh(gamma / 2.0) - _log_sinh(beta / 4.0)
    if log_ratio > 700.0:
        return 2.0 * (math.log(2.0) + log_ratio)
    return 2.0 * math.asinh(math.exp(log_ratio))


def displacement_lower_bound_glued(x: float) -> float:
    """Distance between the collars of two disjoint geodesics of length x.

    Any involution swapping two such geodesics, and the two sides they bound,
    moves every point at least this far.
    """
    return 2.0 * collar_width(x)


def half_collar_variant(x: float) -> float:
    """arcsinh(1/cosh(x/2)); bounded above by arcsinh(1) for every x > 0."""
    x = _positive(x, "x")
    return math.asinh(1.0 / math.cosh(x / 2.0))


def safeguarded_newton(f, df, lo: float, hi: float, x0: float | None = None,
                       ftol: float = 1e-13, xtol: float = 0.0, maxiter: int = 200) -> float:
    """Root of f in [lo, hi] by Newton steps, falling back to bisection.

    Requires f(lo) and f(hi) of opposite signs.  ``ftol`` is relative to
    max(1, |f(lo)|, |f(hi)|) so that polynomial residuals scale sensibly.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise DomainError(f"root not bracketed in [{lo}, {hi}]")
    scale = max(1.0, abs(flo), abs(fhi))
    if flo > 0:
        lo, hi = hi, lo  # keep f(lo) < 0 < f(hi)
    x = 0.5 * (lo + hi) if x0 is None else x0
    if not (min(lo, hi) <= x <= max(lo, hi)):
        x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        fx = f(x)
        if abs(fx) <= ftol * scale:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        if abs(hi - lo) <= max(xtol, 4.0 * math.ulp(x)):
            return x
        d = df(x)
        step_ok = False
        if d != 0.0:
            xn = x - fx / d
            if min(lo, hi) < xn < max(lo, hi):
                step_ok = True
        if not step_ok:
            xn = 0.5 * (lo + hi)
        x = xn
    return x


# ranges quoted in the literature for the constant C of the systolic comparison
COMPARISON_C_RANGES = ((math.pi / 4.0, 1.0), (math.pi / 2.0, 2.0))


def compare_bounds(genus: int, c: float = 1.0) -> float:
    """sqrt(C * area) for a closed surface of the given genus."""
    return math.sqrt(c * area(Signature(genus, 0)))
