"""One-holed tori in Fricke trace coordinates.

A one-holed torus with boundary length beta is described by the traces
(x, y, z) of two generators A, B of its fundamental group and of AB.  They
satisfy x^2 + y^2 + z^2 - xyz = 2 - 2 cosh(beta/2), and the Markov moves
z -> xy - z permute the simple closed geodesics.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from . import hypmath
from .certificate import Certificate
from .errors import DomainError, NonTermination, NoRealSolution
from .hypmath import DEFAULT_TOL, Tol

FRICKE_TOL = 1e-8


@dataclass(frozen=True)
class TraceTriple:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 2.0:
                raise DomainError(f"trace {name}={v!r} is not hyperbolic (need > 2)")

    def as_tuple(self):
        return (self.x, self.y, self.z)

    def lengths(self):
        return tuple(trace_to_length(t) for t in self.as_tuple())


def trace_to_length(t: float) -> float:
    return 2.0 * math.acosh(abs(t) / 2.0)


def length_to_trace(length: float) -> float:
    return 2.0 * math.cosh(length / 2.0)


def fricke_residual(t: TraceTriple, beta: float) -> float:
    x, y, z = t.as_tuple()
    return x * x + y * y + z * z - x * y * z - (2.0 - 2.0 * math.cosh(beta / 2.0))


def _fricke_scale(t: TraceTriple) -> float:
    # floating point error of the identity grows with xyz
    return max(1.0, t.x * t.y * t.z)


@dataclass(frozen=True)
class TorusPiece:
    """A one-holed torus: boundary length and a trace triple."""

    beta: float
    traces: TraceTriple

    def __post_init__(self):
        if not math.isfinite(self.beta) or self.beta <= 0.0:
            raise DomainError(f"boundary length must be positive, got {self.beta!r}")
        res = fricke_residual(self.traces, self.beta)
        if abs(res) > FRICKE_TOL * _fricke_scale(self.traces):
            raise DomainError(f"Fricke residual {res:.3e} too large for beta={self.beta}")

    @classmethod
    def from_traces(cls, x: float, y: float, z: float) -> "TorusPiece":
        """Piece whose boundary length is read off from the traces."""
        s = x * y * z - x * x - y * y - z * z + 2.0
        cb = s / 2.0
        if cb <= 1.0:
            raise DomainError("traces do not describe a one-holed torus with geodesic boundary")
        return cls(2.0 * math.acosh(cb), TraceTriple(x, y, z))

    def systole(self) -> float:
        return systole(self.traces)

    def mirror(self) -> "TorusPiece":
        # a positively oriented marking of the mirror image swaps the generators
        t = self.traces
        return TorusPiece(self.beta, TraceTriple(t.y, t.x, t.z))


def solve_third_trace(x: float, y: float, beta: float) -> tuple[float, float]:
    """Both roots z of the Fricke identity for given x, y and boundary length.

    The two roots are the traces of AB and AB^-1; choosing one fixes the
    sign of the twist.
    """
    c = x * x + y * y - 2.0 + 2.0 * math.cosh(beta / 2.0)
    disc = (x * y) ** 2 - 4.0 * c
    if disc < 0.0:
        raise NoRealSolution(f"no real third trace for x={x}, y={y}, beta={beta}")
    r = math.sqrt(disc)
    s = x * y
    # stable quadratic roots
    big = (s + r) / 2.0
    small = c / big if big != 0.0 else (s - r) / 2.0
    return (small, big)


def markov_neighbors(t: TraceTriple) -> tuple[TraceTriple, TraceTriple, TraceTriple]:
    x, y, z = t.as_tuple()
    return (TraceTriple(x, y, x * y - z),
            TraceTriple(x, x * z - y, z),
            TraceTriple(y * z - x, y, z))


def _flip(v: list, i: int) -> list:
    w = list(v)
    j, k = [m for m in range(3) if m != i]
    w[i] = v[j] * v[k] - v[i]
    return w


def reduce_to_minimal(t: TraceTriple, rng: random.Random | None = None,
                      max_moves: int = 10**6) -> TraceTriple:
    """Apply Markov moves that lower the largest trace until none does.

    ``rng`` randomises the order in which candidate moves are tried; the
    reduced triple is the same up to permutation.
    """
    v = list(t.as_tuple())
    order = [0, 1, 2]
    for _ in range(max_moves):
        if rng is not None:
            rng.shuffle(order)
        top = max(v)
        for i in order:
            w = _flip(v, i)
            if max(w) < top * (1.0 - 1e-15):
                v = w
                break
        else:
            return TraceTriple(*v)
    raise NonTermination(f"no minimal triple after {max_moves} moves from {t}")


def systole(t: TraceTriple) -> float:
    """Length of the shortest interior closed geodesic of the piece."""
    m = reduce_to_minimal(t)
    return trace_to_length(min(m.as_tuple()))


def _maximal_trace(beta: float) -> float:
    target = 2.0 * math.cosh(beta / 2.0) - 2.0
    u = (2.0 * math.cosh(beta / 2.0)) ** (1.0 / 3.0)

    def f(x):
        return x * x * (x - 3.0) - target

    def df(x):
        return 3.0 * x * x - 6.0 * x

    return hypmath.safeguarded_newton(f, df, 3.0, 3.0 + 2.0 * u, x0=3.0 + u, ftol=1e-13)


def maximal_torus(beta: float) -> TorusPiece:
    """The piece with boundary beta whose systole is longest (three systoles)."""
    if not math.isfinite(beta) or beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta!r}")
    x = _maximal_trace(beta)
    return TorusPiece(beta, TraceTriple(x, x, x))


def maximal_torus_from_systole(sigma: float) -> TorusPiece:
    """Maximal piece with prescribed systole: cosh(beta/2) = 4c^3 - 6c^2 + 1, c = cosh(sigma/2)."""
    c = math.cosh(sigma / 2.0)
    cb = 4.0 * c ** 3 - 6.0 * c ** 2 + 1.0
    if cb <= 1.0:
        raise DomainError(f"systole {sigma} too short for a piece with geodesic boundary")
    beta = 2.0 * math.acosh(cb)
    x = 2.0 * c
    return TorusPiece(beta, TraceTriple(x, x, x))


def maximal_height(beta: float) -> float:
    """Shortest height of the maximal piece with boundary beta."""
    piece = maximal_torus(beta)
    return hypmath.height_from_geodesic(piece.systole(), beta)


def extremal_11(tol: Tol = DEFAULT_TOL):
    """Maximal piece whose shortest height equals half its boundary.

    Returns (sigma, beta, h, certificate).  The root is found numerically from
    the maximal-torus relation and the height relation; the closed forms are
    only used to grade the result.
    """
    def g(beta):
        return maximal_height(beta) - beta / 2.0

    def dg(beta, eps=1e-7):
        return (g(beta + eps) - g(beta - eps)) / (2.0 * eps)

    beta = hypmath.safeguarded_newton(g, dg, 1.0, 12.0, x0=4.0, ftol=1e-15)
    piece = maximal_torus(beta)
    x = piece.traces.x
    sigma = trace_to_length(x)
    c = x / 2.0
    h = hypmath.height_from_geodesic(sigma, beta)
    cb = math.cosh(beta / 2.0)

    c_exact = (3.0 + math.sqrt(17.0)) / 4.0
    sigma_exact = 2.0 * math.acosh(c_exact)
    h_exact = hypmath.ARCCOSH_BOUND
    plus_sign = 4 * c ** 3 + 6 * c ** 2 + 1 - cb
    minus_sign = 4 * c ** 3 - 6 * c ** 2 + 1 - cb

    cert = Certificate(
        claim_id="extremal_one_holed_torus",
        values={
            "sigma": sigma,
            "beta": beta,
            "h": h,
            "half_beta": beta / 2.0,
            "cosh_half_sigma": c,
            "sigma_closed_form": sigma_exact,
            "h_closed_form": h_exact,
            "cubic_plus_sign_residual": plus_sign,
            "cubic_minus_sign_residual": minus_sign,
        },
        residuals={
            "boundary_vs_systole": cb - 1.0 - 2.0 * c,
            "systole_quadratic": 2 * c * c - 3 * c - 1,
            "pentagon": math.sinh(beta / 4.0) ** 2 - c,
            "cubic_minus_sign": minus_sign,
            "fricke_identity": fricke_residual(piece.traces, beta),
            "height_equals_half_boundary": h - beta / 2.0,
            "sigma_vs_closed_form": sigma - sigma_exact,
            "h_vs_closed_form": h - h_exact,
            # plus-sign cubic must be violated by a wide margin
            "cubic_plus_sign_not_rejected": 0.0 if abs(plus_sign) > 30.0 else 1.0,
        },
        tolerance=tol.abs_res,
        caveats=[
            "cubic relation cosh(beta/2) = 4c^3 + 6c^2 + 1 is inconsistent with "
            "cosh(beta/2) - 1 = 2c and 2c^2 - 3c - 1 = 0; the minus-sign variant "
            "4c^3 - 6c^2 + 1 agrees with the Fricke identity and is the one used",
        ],
    )
    return sigma, beta, h, cert
