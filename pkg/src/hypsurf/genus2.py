"""Genus-2 surfaces made of two mirror one-holed tori glued along beta.

With the height-aligned gluing the reflection swapping the halves, composed
with a half-turn along beta, is a fixed-point-free orientation-reversing
involution tau.  Its displacement min_p d(p, tau(p)) is min(beta/2, h_sigma).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import fricke, halfplane, hypmath
from .certificate import Certificate
from .errors import AlignmentError, DomainError, NoRealSolution, ParityError
from .fricke import TorusPiece, TraceTriple
from .halfplane import Isometry
from .hypmath import ARCCOSH_BOUND, Signature

HEIGHT_ALIGNED = "height_aligned"
TWISTED = "twisted"

C_EXTREMAL = (3.0 + math.sqrt(17.0)) / 4.0
C_BOLZA = 1.0 + math.sqrt(2.0)


@dataclass(frozen=True)
class Alignment:
    kind: str = HEIGHT_ALIGNED
    twist: float = 0.0

    def __post_init__(self):
        if self.kind not in (HEIGHT_ALIGNED, TWISTED):
            raise DomainError(f"unknown alignment {self.kind!r}")
        if self.kind == HEIGHT_ALIGNED and self.twist != 0.0:
            raise DomainError("height-aligned gluing has zero twist")
        if not math.isfinite(self.twist):
            raise DomainError("twist must be finite")

    @classmethod
    def twisted(cls, t: float) -> "Alignment":
        return cls(TWISTED, float(t))

    @property
    def aligned(self) -> bool:
        return self.kind == HEIGHT_ALIGNED


@dataclass(frozen=True)
class InvolutionDescriptor:
    parity: str = "reversing"
    action: str = "swap halves, half-turn along beta"

    def __post_init__(self):
        if self.parity != "reversing":
            raise ParityError("an involution of a genus-2 surface without fixed points reverses orientation")


@dataclass
class Genus2Surface:
    """Left half ``piece``; the right half is its mirror image."""

    piece: TorusPiece
    beta: float
    alignment: Alignment = field(default_factory=Alignment)
    involution: InvolutionDescriptor | None = None
    name: str = ""

    def __post_init__(self):
        if abs(self.piece.beta - self.beta) > 1e-9 * max(1.0, self.beta):
            raise DomainError("piece boundary does not match beta")

    @property
    def signature(self) -> Signature:
        return Signature(2, 0)

    @property
    def twist(self) -> float:
        return self.alignment.twist

    @cached_property
    def generators(self) -> list[Isometry]:
        return halfplane.genus2_generators(self.piece, self.piece.mirror(), self.beta, self.twist)

    @cached_property
    def lift(self) -> Isometry:
        """Reversing lift of tau; GluingError for gluings that admit none."""
        return halfplane.lift_involution(self, self.generators)

    def systole_of_piece(self) -> float:
        return self.piece.systole()

    def height(self) -> float:
        return hypmath.height_from_geodesic(self.systole_of_piece(), self.beta)


def build(piece: TorusPiece, alignment: Alignment | None = None,
          parity: str = "reversing", name: str = "") -> Genus2Surface:
    if parity != "reversing":
        raise ParityError("genus 2 is even: a fixed-point-free involution must reverse orientation")
    alignment = Alignment() if alignment is None else alignment
    inv = InvolutionDescriptor() if alignment.aligned else None
    return Genus2Surface(piece, piece.beta, alignment, inv, name)


def displacement_aligned(s: Genus2Surface) -> float:
    if not s.alignment.aligned:
        raise AlignmentError("exact displacement is only available for the height-aligned gluing")
    return min(s.beta / 2.0, s.height())


def displacement_oracle(s: Genus2Surface):
    """Shortest glide g o tau over the group: the exact displacement.

    Returns (displacement, word of g).
    """
    return halfplane.min_coset_displacement(s.generators, s.lift)


def sample_points(s: Genus2Surface, n_samples: int, seed: int = 0, on_axis: int | None = None):
    """Points on the beta axis (the imaginary axis) and in a disk around it."""
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    n_axis = n_samples // 4 if on_axis is None else on_axis
    n_axis = min(n_axis, n_samples)
    pts = [complex(0.0, math.exp(u)) for u in np.linspace(0.0, s.beta, n_axis, endpoint=False)]
    rest = n_samples - n_axis
    if rest:
        u = rng.random(rest) * s.beta
        r = 3.0 * np.sqrt(rng.random(rest))
        th = rng.random(rest) * 2.0 * math.pi
        # point at distance r from i e^u in direction th
        w = np.tanh(r / 2.0) * np.exp(1j * th)
        z = 1j * (1 + w) / (1 - w)
        pts += list(z * np.exp(u))
    return pts


def displacement_sampled(s: Genus2Surface, n_samples: int = 200, word_cutoff: int = 8,
                         seed: int = 0, points=None) -> float:
    """min over sample points of the quotient distance d(p, tau(p)); an upper bound."""
    tau = s.lift
    gens = s.generators
    pts = sample_points(s, n_samples, seed) if points is None else list(points)
    best = math.inf
    for p in pts:
        best = min(best, halfplane.orbit_min_dist(p, tau(p), gens, word_cutoff))
    return best


def spectrum(s: Genus2Surface, length_cutoff: float, word_cutoff: int = 10):
    return halfplane.length_spectrum(s.generators, length_cutoff, word_cutoff)


def _census(s, expected_length, word_cutoff):
    sp = spectrum(s, expected_length + 0.05, word_cutoff)
    first = sp.entries[0]
    return first.length, first.multiplicity, sp


def smax(word_cutoff: int = 8):
    sigma, beta, h, ext = fricke.extremal_11()
    piece = fricke.maximal_torus(beta)
    s = build(piece, name="S_max")
    disp = displacement_aligned(s)
    oracle, _ = displacement_oracle(s)
    sys_len, census, sp = _census(s, sigma, word_cutoff)
    sigma_exact = 2.0 * math.acosh(C_EXTREMAL)
    comparison = hypmath.compare_bounds(2, 1.0)
    cert = Certificate(
        claim_id="smax",
        values={
            "displacement": disp,
            "displacement_oracle": oracle,
            "systole": sys_len,
            "systole_census": census,
            "beta": beta,
            "comparison_constant": comparison,
            "comparison_c": 1.0,
            "comparison_c_ranges": [list(r) for r in hypmath.COMPARISON_C_RANGES],
            "spectrum_cutoff_warning": sp.cutoff_warning,
        },
        residuals={
            "displacement_vs_bound": disp - ARCCOSH_BOUND,
            "displacement_oracle": oracle - disp,
            "half_beta_vs_bound": beta / 2.0 - ARCCOSH_BOUND,
            "systole_vs_closed_form": sys_len - sigma_exact,
            "census_is_6": float(census != 6),
        },
        caveats=["census counts primitive unoriented classes; simplicity is not tested"],
    )
    return s, cert


def bolza_piece() -> TorusPiece:
    return fricke.maximal_torus_from_systole(2.0 * math.acosh(C_BOLZA))


def bolza(word_cutoff: int = 10):
    """The Bolza surface and its comparison with S_max.

    Its two maximal halves are glued with twist beta/12; no twist compatible
    with a swapping reversing involution gives 12 systoles.  The displacement
    reported is that of the height-aligned double of the same piece, which is
    the surface the comparison refers to.
    """
    piece = bolza_piece()
    beta = piece.beta
    s = build(piece, Alignment.twisted(beta / 12.0), name="Bolza")
    companion = build(piece, name="Bolza piece, aligned double")
    sys_exact = 2.0 * math.acosh(C_BOLZA)
    sys_len, census, sp = _census(s, sys_exact, word_cutoff)
    disp = displacement_aligned(companion)
    oracle, _ = displacement_oracle(companion)
    smax_disp = ARCCOSH_BOUND
    smax_beta = 2.0 * ARCCOSH_BOUND
    cert = Certificate(
        claim_id="bolza",
        values={
            "systole": sys_len,
            "systole_census": census,
            "beta": beta,
            "gluing_twist": beta / 12.0,
            "displacement_aligned_double": disp,
            "displacement_oracle": oracle,
            "displacement_smax": smax_disp,
            "beta_smax": smax_beta,
            "spectrum_cutoff_warning": sp.cutoff_warning,
        },
        residuals={
            "systole_vs_closed_form": sys_len - sys_exact,
            "census_is_12": float(census != 12),
            "displacement_oracle": oracle - disp,
            "displacement_gap_over_0_8": float(not smax_disp - disp > 0.8),
            "beta_longer": float(not beta > smax_beta),
        },
        caveats=[
            "the 12 systoles occur for the gluing with twist beta/12; the height-aligned "
            "double of the same piece has systole 2*h = "
            f"{2 * disp:.9f} with 3 classes and carries the involution whose displacement is reported",
            "census counts primitive unoriented classes; simplicity is not tested",
        ],
    )
    return s, cert


def is_extremal(s: Genus2Surface, tol: float = 1e-9) -> bool:
    c = s.piece.traces
    return (s.alignment.aligned and abs(c.x / 2.0 - C_EXTREMAL) < tol
            and abs(c.y / 2.0 - C_EXTREMAL) < tol and abs(c.z / 2.0 - C_EXTREMAL) < tol)


def verify_theorem2(s: Genus2Surface, tol: float = 1e-9) -> Certificate:
    d = displacement_aligned(s)
    eq = is_extremal(s)
    return Certificate(
        claim_id="displacement_bound",
        values={"displacement": d, "bound": ARCCOSH_BOUND, "equality": eq,
                "gap": ARCCOSH_BOUND - d},
        residuals={"within_bound": float(d > ARCCOSH_BOUND + tol)},
        tolerance=tol,
    )


def random_piece(rng: np.random.Generator, beta_range=(0.5, 12.0), max_tries: int = 1000,
                 trace_range=(2.05, 12.0), root: int | None = None) -> TorusPiece:
    """Random piece: beta and two traces uniform, third trace one of the two roots.

    ``root`` picks the smaller (0) or larger (1) root; by default it is random.
    """
    for _ in range(max_tries):
        beta = rng.uniform(*beta_range)
        x, y = rng.uniform(*trace_range, size=2)
        try:
            roots = fricke.solve_third_trace(x, y, beta)
        except NoRealSolution:
            continue
        z = roots[rng.integers(2) if root is None else root]
        if z <= 2.0:
            continue
        return TorusPiece(beta, TraceTriple(x, y, z))
    raise DomainError("could not draw a random piece")


def _endpoint_angles(ms):
    a, b, c, d = ms[:, 0, 0], ms[:, 0, 1], ms[:, 1, 0], ms[:, 1, 1]
    r = np.sqrt(np.maximum((a + d) ** 2 - 4.0, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(c != 0, 2 * np.arctan((a - d - r) / (2 * c)), np.pi)
        v = np.where(c != 0, 2 * np.arctan((a - d + r) / (2 * c)), 2 * np.arctan(b / (d - a)))
    return np.minimum(u, v), np.maximum(u, v)


def _any_crossing(g: Isometry, ms) -> bool:
    lo, hi = sorted(halfplane._angle(t) for t in halfplane.axis_endpoints(g))
    u, v = _endpoint_angles(ms)
    iu = (u > lo + 1e-12) & (u < hi - 1e-12)
    iv = (v > lo + 1e-12) & (v < hi - 1e-12)
    return bool(np.any(iu != iv))


def systole_dichotomy(s: Genus2Surface, word_cutoff: int = 12):
    """For each systole class, where tau sends it.

    Returns a list of (class index, image index, relation) where relation is
    "same" if tau preserves the class, or "disjoint"/"crossing" according to
    whether the image class meets the original.
    """
    gens = s.generators
    tau = s.lift
    ti = tau.inverse()
    first = spectrum(s, min(s.beta, 2 * s.height(), s.systole_of_piece()) + 1e-6, word_cutoff)
    ell = first.entries[0].length
    cover = first.covering_radius
    classes = [c for c in first.classes if abs(c.length - ell) < 1e-8 * max(1.0, ell)]
    reps = [halfplane.word_to_isometry(gens, c.word) for c in classes]
    base = halfplane.default_base(gens)
    reach = halfplane.dist(base, tau(base))
    radius = max(ell + 2 * (cover + 0.25) + 0.5, reach + 2 * cover + 1.0)
    ball = halfplane.orbit_ball(gens, base, radius, 60)
    E = ball.mats
    Einv = np.linalg.inv(E)
    orbit = halfplane._images(E, ball.parity, base)
    conj = [E @ r.m @ Einv for r in reps]

    def recentre(g: Isometry) -> np.ndarray:
        # conjugate so that the axis passes close to the base point
        u, v = halfplane.axis_endpoints(g)
        n = Isometry(halfplane._to_imaginary_axis(u, v))
        w = n(base)
        foot = n.inverse()(1j * abs(w))
        k = int(np.argmin(halfplane._pair_dists(np.array([foot]), orbit)[0]))
        return Einv[k] @ g.m @ E[k]

    def identify(m):
        for idx, cs in enumerate(conj):
            for h in (m, np.linalg.inv(m)):
                r = np.minimum(np.abs(cs - h).max(axis=(1, 2)), np.abs(cs + h).max(axis=(1, 2)))
                if r.min() < 1e-6 * max(1.0, float(np.abs(h).max())):
                    return idx
        return None

    out = []
    for i, r in enumerate(reps):
        img = tau @ r @ ti
        j = identify(recentre(img))
        if j is None:
            out.append((i, None, "unmatched"))
        elif j == i:
            out.append((i, j, "same"))
        else:
            out.append((i, j, "crossing" if _any_crossing(r, conj[j]) else "disjoint"))
    return out
