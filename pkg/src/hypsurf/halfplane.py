"""Upper half-plane model: points, isometries, orbit search and length spectra.

Orientation-reversing isometries act by z -> (a conj(z) + b)/(c conj(z) + d)
with det = -1, the sign that keeps the upper half-plane invariant.  Composing
maps multiplies matrices and parities, so a group element is a real 2x2
matrix plus a flag.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateError, DomainError, GluingError, NotHyperbolic
from .fricke import TorusPiece, TraceTriple, fricke_residual
from .hypmath import DEFAULT_TOL, Tol

__all__ = [
    "HPoint", "Isometry", "dist", "apply", "compose", "invert", "translation_length",
    "axis_endpoints", "axes_cross", "common_perpendicular", "geodesic_distance",
    "walk", "torus_generators", "genus2_generators", "involution_lift",
    "lift_involution", "OrbitBall", "orbit_ball", "orbit_min_dist", "covering_radius",
    "min_coset_displacement", "ClassRecord", "SpectrumEntry", "Spectrum",
    "conjugacy_classes", "length_spectrum", "word_to_isometry", "format_word",
]


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)) or self.y <= 0.0:
            raise DomainError(f"({self.x}, {self.y}) is not in the upper half-plane")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "HPoint":
        return cls(z.real, z.imag)


def _as_complex(p) -> complex:
    return p.z if isinstance(p, HPoint) else complex(p)


class Isometry:
    """A real matrix up to sign together with an orientation flag."""

    __slots__ = ("m", "reversing")

    def __init__(self, m, reversing: bool = False):
        m = np.array(m, dtype=float).reshape(2, 2)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if not np.all(np.isfinite(m)) or det == 0.0:
            raise DomainError("singular or non-finite matrix")
        if (det < 0) != bool(reversing):
            raise DomainError(
                f"det {det:.3e} inconsistent with {'reversing' if reversing else 'preserving'} parity")
        self.m = m / math.sqrt(abs(det))
        self.reversing = bool(reversing)

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(np.eye(2))

    @classmethod
    def translation(cls, s: float) -> "Isometry":
        """Translation by s along the imaginary axis (towards infinity for s > 0)."""
        return cls(np.diag([math.exp(s / 2.0), math.exp(-s / 2.0)]))

    @classmethod
    def reflection_imaginary_axis(cls) -> "Isometry":
        return cls(np.diag([-1.0, 1.0]), reversing=True)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry(self.m @ other.m, self.reversing != other.reversing)

    def inverse(self) -> "Isometry":
        a, b, c, d = self.m.ravel()
        det = a * d - b * c
        return Isometry(np.array([[d, -b], [-c, a]]) / det, self.reversing)

    def __call__(self, p):
        z = _as_complex(p)
        if self.reversing:
            z = z.conjugate()
        a, b, c, d = self.m.ravel()
        w = (a * z + b) / (c * z + d)
        return HPoint.from_complex(w) if isinstance(p, HPoint) else w

    @property
    def trace(self) -> float:
        return float(self.m[0, 0] + self.m[1, 1])

    def close_to(self, other: "Isometry", tol: float = 1e-8) -> bool:
        return self.reversing == other.reversing and _psl_residual(self.m, other.m) <= tol

    def is_identity(self, tol: float = 1e-8) -> bool:
        return self.close_to(Isometry.identity(), tol)

    def __repr__(self):
        kind = "reversing" if self.reversing else "preserving"
        return f"Isometry({self.m.tolist()!r}, {kind})"


def _psl_residual(m1, m2) -> float:
    return float(min(np.max(np.abs(m1 - m2)), np.max(np.abs(m1 + m2))))


def apply(g: Isometry, p):
    return g(p)


def compose(g: Isometry, h: Isometry) -> Isometry:
    """g after h."""
    return g @ h


def invert(g: Isometry) -> Isometry:
    return g.inverse()


def dist(p, q) -> float:
    p, q = _as_complex(p), _as_complex(q)
    return 2.0 * math.asinh(abs(p - q) / (2.0 * math.sqrt(p.imag * q.imag)))


def translation_length(g: Isometry, tol: Tol = DEFAULT_TOL) -> float:
    """Translation length; for a reversing map, half the length of its square."""
    t = abs(g.trace)
    if g.reversing:
        # tr(g^2) = tr(g)^2 + 2 for det -1, so cosh(l) = 1 + tr^2/2
        if t <= tol.domain_eps:
            raise NotHyperbolic("reflection: no glide axis")
        return 2.0 * math.asinh(t / 2.0)
    if t <= 2.0 + tol.domain_eps:
        raise NotHyperbolic(f"|trace| = {t!r} <= 2")
    return 2.0 * math.acosh(t / 2.0)


# ---------------------------------------------------------------- geodesics

def _mob_ext(m, t: float) -> float:
    """Image of a boundary point (possibly infinite) under a preserving matrix."""
    a, b, c, d = np.asarray(m).ravel()
    if math.isinf(t):
        return a / c if c != 0.0 else math.inf
    den = c * t + d
    return (a * t + b) / den if den != 0.0 else math.inf


def axis_endpoints(g: Isometry) -> tuple[float, float]:
    """Repelling and attracting fixed points on the boundary (inf allowed)."""
    m = g.m @ g.m if g.reversing else g.m
    a, b, c, d = m.ravel()
    if abs(a + d) <= 2.0:
        raise NotHyperbolic("no axis for a non-hyperbolic element")
    if a + d < 0:
        a, b, c, d = -a, -b, -c, -d
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if abs(c) <= 1e-15 * scale:
        # upper triangular: fixed points b/(d - a) and infinity
        f = b / (d - a)
        return (f, math.inf) if a > d else (math.inf, f)
    r = math.sqrt((a + d) ** 2 - 4.0)
    u = (a - d - r) / (2.0 * c)
    v = (a - d + r) / (2.0 * c)
    # derivative at a fixed point z is 1/(cz + d)^2; attracting iff |cz + d| > 1
    if abs(c * v + d) > 1.0:
        return (u, v)
    return (v, u)


def _angle(t: float) -> float:
    return math.pi if math.isinf(t) else 2.0 * math.atan(t)


def axes_cross(g: Isometry | tuple, h: Isometry | tuple) -> bool:
    """Whether two geodesics (given by isometries or endpoint pairs) cross transversally."""
    e1 = axis_endpoints(g) if isinstance(g, Isometry) else g
    e2 = axis_endpoints(h) if isinstance(h, Isometry) else h
    a1, b1 = sorted(_angle(t) for t in e1)
    inside = [a1 < _angle(t) < b1 for t in e2]
    shared = any(abs(_angle(s) - _angle(t)) < 1e-12 for s in e1 for t in e2)
    return (inside[0] != inside[1]) and not shared


def _to_imaginary_axis(u: float, v: float) -> np.ndarray:
    """Preserving matrix sending u -> 0 and v -> infinity."""
    if math.isinf(v):
        m = np.array([[1.0, -u], [0.0, 1.0]])
    elif math.isinf(u):
        m = np.array([[0.0, -1.0], [1.0, -v]])
    else:
        m = np.array([[1.0, -u], [1.0, -v]])
        if u - v < 0:
            m = np.array([[-1.0, u], [1.0, -v]])
    return m / math.sqrt(abs(np.linalg.det(m)))


def common_perpendicular(g1: tuple, g2: tuple):
    """Distance between two disjoint geodesics and the feet of their perpendicular.

    Geodesics are endpoint pairs.  Raises DegenerateError when they cross or
    share an endpoint.
    """
    n = _to_imaginary_axis(*g1)
    a, b = (_mob_ext(n, t) for t in g2)
    if any(math.isinf(t) or t == 0.0 for t in (a, b)):
        raise DegenerateError("geodesics are asymptotic")
    if a * b < 0:
        raise DegenerateError("geodesics cross")
    a, b = sorted((abs(a), abs(b)))
    sgn = 1.0 if _mob_ext(n, g2[0]) > 0 else -1.0
    d = math.acosh((a + b) / (b - a))
    r = math.sqrt(a * b)
    c = (a + b) / 2.0
    re = r * r / c
    foot2 = complex(sgn * re, math.sqrt(max(r * r - re * re, 0.0)))
    ninv = Isometry(n).inverse()
    return d, ninv(1j * r), ninv(foot2)


def geodesic_distance(g1: tuple, g2: tuple) -> float:
    return common_perpendicular(g1, g2)[0]


# ------------------------------------------------------------------ frames

def _forward(s: float) -> np.ndarray:
    return np.diag([math.exp(s / 2.0), math.exp(-s / 2.0)])


def _turn(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, s], [-s, c]])


def walk(steps, frame: Isometry | None = None) -> list[Isometry]:
    """Walk a turtle through ("f", length) / ("t", angle) steps.

    The frame starts at i heading towards infinity; turns are to the left.
    Returns the frame after every step.  At a frame F the point is F(i), the
    heading geodesic is F(0) -> F(inf) and the perpendicular is F(-1), F(1).
    """
    m = np.eye(2) if frame is None else frame.m.copy()
    out = []
    for kind, v in steps:
        if kind == "f":
            m = m @ _forward(v)
        elif kind == "t":
            m = m @ _turn(v)
        else:
            raise DomainError(f"unknown step {kind!r}")
        n = math.sqrt(np.linalg.det(m))
        m = m / n
        out.append(Isometry(m))
    return out


def frame_perpendicular(f: Isometry) -> tuple[float, float]:
    return (_mob_ext(f.m, -1.0), _mob_ext(f.m, 1.0))


def frame_heading(f: Isometry) -> tuple[float, float]:
    return (_mob_ext(f.m, 0.0), _mob_ext(f.m, math.inf))


# --------------------------------------------------------- torus and genus 2

def torus_generators(t: TraceTriple) -> tuple[Isometry, Isometry]:
    """A, B with traces x, y and tr(AB) = z; A diagonal, B symmetric."""
    x, y, z = t.as_tuple()
    a = (x + math.sqrt(x * x - 4.0)) / 2.0
    p = (z - y / a) / (a - 1.0 / a)
    s = y - p
    qq = p * s - 1.0
    if qq <= 0.0:
        raise GluingError(f"traces {t} give no real representation")
    q = math.sqrt(qq)
    return Isometry(np.diag([a, 1.0 / a])), Isometry(np.array([[p, q], [q, s]]))


def commutator(g: Isometry, h: Isometry) -> Isometry:
    return g @ h @ g.inverse() @ h.inverse()


def _normalize_piece(t: TraceTriple):
    """Torus generators conjugated so the boundary word is diag(e^{b/2}, e^{-b/2}).

    The foot on the imaginary axis of the perpendicular to the axis of A is
    placed at i; this point is the reference for twists.
    """
    a, b = torus_generators(t)
    k = commutator(a, b)
    u, v = axis_endpoints(k)
    n = Isometry(_to_imaginary_axis(u, v))
    a, b, k = (n @ g @ n.inverse() for g in (a, b, k))
    # k is now diagonal and translates towards infinity
    _, foot, _ = common_perpendicular((0.0, math.inf), axis_endpoints(a))
    s0 = math.log(foot.imag)
    c = Isometry.translation(-s0)
    return [c @ g @ c.inverse() for g in (a, b, k)]


def involution_lift(beta: float, twist: float = 0.0) -> Isometry:
    """z -> -conj(z) composed with translation by beta/2 + twist along the imaginary axis."""
    return Isometry.reflection_imaginary_axis() @ Isometry.translation(beta / 2.0 + twist)


def _check_piece(piece: TorusPiece, beta: float, tol: Tol, side: str):
    if abs(piece.beta - beta) > tol.abs_res * max(1.0, beta):
        raise GluingError(f"{side} piece has boundary {piece.beta}, expected {beta}")
    t = piece.traces
    res = fricke_residual(t, beta)
    if abs(res) > tol.abs_res * max(1.0, t.x * t.y * t.z):
        raise GluingError(f"{side} piece Fricke residual {res:.3e}")


def genus2_generators(left: TorusPiece, right: TorusPiece, beta: float,
                      twist: float = 0.0, tol: Tol = DEFAULT_TOL) -> list[Isometry]:
    """Generators A1, B1, A2, B2 of the genus-2 group glued along beta.

    The boundary word [A1, B1] is diagonal.  The right half is placed by the
    reflection z -> -conj(z) followed by translation by beta/2 + twist, so with
    twist 0 and right = left.mirror() the surface has the lift of a
    fixed-point-free reversing involution (see ``involution_lift``).
    """
    _check_piece(left, beta, tol, "left")
    _check_piece(right, beta, tol, "right")
    a1, b1, k1 = _normalize_piece(left.traces)
    r = right.traces
    p, q, k2 = _normalize_piece(TraceTriple(r.y, r.x, r.z))
    if not k1.close_to(k2, 1e-8 * max(1.0, math.exp(beta / 2.0))):
        raise GluingError("boundary words of the two pieces do not match")
    tau = involution_lift(beta, twist)
    ti = tau.inverse()
    a2 = tau @ q @ ti
    b2 = tau @ p @ ti
    gens = [a1, b1, a2, b2]

    rel = commutator(a1, b1) @ commutator(a2, b2)
    scale = max(1.0, float(np.max(np.abs(k1.m))))
    if _psl_residual(rel.m, np.eye(2)) > 1e-8 * scale:
        raise GluingError(f"relation residual {_psl_residual(rel.m, np.eye(2)):.3e}")
    cb = 2.0 * math.cosh(beta / 2.0)
    if abs(abs(k1.trace) - cb) > tol.abs_res * cb:
        raise GluingError("boundary trace mismatch")
    want = [left.traces.as_tuple(), right.traces.as_tuple()]
    got = [(g.trace, h.trace, (g @ h).trace) for g, h in ((a1, b1), (a2, b2))]
    for w, gt in zip(want, got):
        for u, v in zip(w, gt):
            if abs(u - abs(v)) > tol.abs_res * max(1.0, u):
                raise GluingError(f"trace mismatch {u} vs {v}")
    return gens


def lift_involution(surface, gens: list[Isometry], tol: float = 1e-8) -> Isometry:
    """Reversing lift of the involution swapping the halves of ``surface``.

    ``surface`` needs ``beta`` and ``twist`` attributes.  The lift squares to
    the boundary word (or its inverse); a twisted gluing has no such lift
    unless 2*twist is a multiple of beta.
    """
    tau = involution_lift(surface.beta, surface.twist)
    k = commutator(gens[0], gens[1])
    sq = tau @ tau
    scale = max(1.0, float(np.max(np.abs(k.m))))
    if not (sq.close_to(k, tol * scale) or sq.close_to(k.inverse(), tol * scale)):
        raise GluingError("no reversing lift squaring to the separating curve")
    ti = tau.inverse()
    for g, h in ((gens[0], gens[3]), (gens[1], gens[2])):
        if abs(abs((tau @ g @ ti).trace) - abs(h.trace)) > tol * max(1.0, abs(h.trace)):
            raise GluingError("lift does not carry the left generators to the right ones")
    return tau


# ------------------------------------------------------------- orbit search

def _letters(gens, character=None):
    mats, par, codes, chi = [], [], [], []
    character = [0] * len(gens) if character is None else list(character)
    if len(character) != len(gens):
        raise DomainError("character needs one value per generator")
    for i, g in enumerate(gens):
        gi = g.inverse()
        mats += [g.m, gi.m]
        par += [g.reversing, g.reversing]
        codes += [i + 1, -(i + 1)]
        chi += [character[i] % 2, character[i] % 2]
    return np.array(mats), np.array(par, dtype=bool), np.array(codes), np.array(chi, dtype=np.int8)


def _images(mats, par, z: complex):
    w = np.where(par, np.conj(z), z)
    return (mats[..., 0, 0] * w + mats[..., 0, 1]) / (mats[..., 1, 0] * w + mats[..., 1, 1])


def _dists(p: complex, w):
    return 2.0 * np.arcsinh(np.abs(w - p) / (2.0 * np.sqrt(p.imag * w.imag)))


@dataclass
class OrbitBall:
    """Group elements g (as words) with d(base, g(point)) <= radius.

    ``chi`` holds the value of a Z/2 character on each element, used to pick
    out cosets of an index-2 subgroup.
    """

    mats: np.ndarray
    parity: np.ndarray
    words: list
    dists: np.ndarray
    truncated: bool
    radius: float
    base: complex
    point: complex
    chi: np.ndarray

    def __len__(self):
        return len(self.words)


MAX_BALL = 2_000_000


def orbit_ball(gens, base, radius: float, max_depth: int, point=None,
               character=None, max_elements: int = MAX_BALL) -> OrbitBall:
    """Breadth-first search over freely reduced words, pruned at ``radius``.

    Elements are identified by the image of ``point`` (defaults to ``base``),
    which must not be fixed by any nontrivial element.  Raises DomainError if
    the ball outgrows ``max_elements`` or images leave floating point range.
    """
    base = _as_complex(base)
    point = base if point is None else _as_complex(point)
    lm, lp, codes, lchi = _letters(gens, character)
    mats = [np.eye(2)[None]]
    parity = [np.zeros(1, dtype=bool)]
    chis = [np.zeros(1, dtype=np.int8)]
    words = [()]
    d0 = float(_dists(base, np.array([point]))[0])
    dists = [np.array([d0])]
    seen = {_key(point)}
    f_m, f_p, f_c = np.eye(2)[None], np.zeros(1, dtype=bool), np.zeros(1, dtype=np.int8)
    f_last, f_idx = np.zeros(1, dtype=int), [0]
    truncated = False
    for depth in range(max_depth):
        if len(f_idx) == 0:
            break
        prod = np.einsum("fij,ljk->flik", f_m, lm)
        par = f_p[:, None] != lp[None, :]
        chi = f_c[:, None] ^ lchi[None, :]
        w = _images(prod, par, point)
        if not np.all(w.imag > 0):
            raise DomainError("orbit images underflowed; radius too large for float64")
        d = _dists(base, w)
        ok = (f_last[:, None] != -codes[None, :]) & (d <= radius)
        fi, li = np.nonzero(ok)
        keep = []
        for a, b in zip(fi.tolist(), li.tolist()):
            k = _key(w[a, b])
            if k in seen:
                continue
            seen.add(k)
            keep.append((a, b))
            words.append(words[f_idx[a]] + (int(codes[b]),))
        if not keep:
            f_idx = []
            break
        if len(words) > max_elements:
            raise DomainError(f"orbit ball exceeded {max_elements} elements at radius {radius:.3g}")
        ka, kb = np.array(keep).T
        start = len(words) - len(keep)
        f_idx = list(range(start, len(words)))
        f_m = _renormalize(prod[ka, kb])
        f_p = par[ka, kb]
        f_c = chi[ka, kb]
        f_last = codes[kb]
        mats.append(f_m)
        parity.append(f_p)
        chis.append(f_c)
        dists.append(d[ka, kb])
    else:
        truncated = len(f_idx) > 0
    return OrbitBall(np.concatenate(mats), np.concatenate(parity), words,
                     np.concatenate(dists), truncated, radius, base, point,
                     np.concatenate(chis))


def _key(w: complex):
    return (round(w.real * 1e7), round(math.log(w.imag) * 1e7))


def _renormalize(m):
    det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    return m / np.sqrt(np.abs(det))[:, None, None]


def orbit_min_dist(p, q, gens, word_cutoff: int, margin: float = 2.0,
                   character=None, coset: int = 0) -> float:
    """min over words w of length <= word_cutoff of d(p, w(q)).

    With a ``character`` only words in the given coset of its kernel count,
    which computes distances on the double cover defined by the character.
    """
    if word_cutoff < 0:
        raise DomainError("word_cutoff must be >= 0")
    p, q = _as_complex(p), _as_complex(q)
    d0 = dist(p, q)
    if d0 == 0.0 and coset == 0:
        return 0.0
    # a short unpruned search first tightens the pruning radius
    pre = orbit_ball(gens, p, math.inf, min(word_cutoff, 3), point=q, character=character)
    sel = pre.chi == (coset % 2)
    best = float(pre.dists[sel].min()) if np.any(sel) else d0
    if word_cutoff <= 3:
        return best if np.any(sel) else math.inf
    ball = orbit_ball(gens, p, best + margin, word_cutoff, point=q, character=character)
    sel = ball.chi == (coset % 2)
    if not np.any(sel):
        return math.inf
    return min(best, float(ball.dists[sel].min()))


def default_base(gens) -> complex:
    """Intersection of the axes of the first two generators, or the midpoint
    of their common perpendicular."""
    e1, e2 = axis_endpoints(gens[0]), axis_endpoints(gens[1])
    n = _to_imaginary_axis(*e1)
    a, b = (_mob_ext(n, t) for t in e2)
    ninv = Isometry(n).inverse()
    if a * b < 0:
        # circle of e2 meets the imaginary axis at height sqrt(-ab)
        z = ninv(1j * math.sqrt(-a * b))
    else:
        _, f1, f2 = common_perpendicular(e1, e2)
        # midpoint of the segment f1 f2
        m = _to_imaginary_axis(*_geodesic_through(f1, f2))
        mi = Isometry(m)
        y1, y2 = mi(f1).imag, mi(f2).imag
        z = mi.inverse()(1j * math.sqrt(y1 * y2))
    # nudge off any axis of symmetry so no element fixes the base point
    return z + 1e-3 * z.imag * complex(0.3, 0.2)


def _geodesic_through(z1: complex, z2: complex) -> tuple[float, float]:
    if abs(z1.real - z2.real) < 1e-14 * max(1.0, abs(z1)):
        return (z1.real, math.inf)
    c = (abs(z2) ** 2 - abs(z1) ** 2) / (2.0 * (z2.real - z1.real))
    r = abs(z1 - c)
    return (c - r, c + r)


def covering_radius(gens, base=None, n_samples: int = 2000, seed: int = 0,
                    start: float = 3.0, max_depth: int = 40) -> float:
    """Estimate of max over points of the distance to the orbit of ``base``.

    Points are sampled uniformly by area in a disk around the base; the disk
    grows until it is comfortably larger than the estimate.
    """
    base = default_base(gens) if base is None else _as_complex(base)
    rng = np.random.default_rng(seed)
    r = start
    for _ in range(12):
        ball = orbit_ball(gens, base, 2.0 * r + 1.0, max_depth)
        pts = _images(ball.mats, ball.parity, base)
        rho = np.arccosh(1.0 + (math.cosh(r) - 1.0) * rng.random(n_samples))
        th = 2.0 * math.pi * rng.random(n_samples)
        w = np.tanh(rho / 2.0) * np.exp(1j * th)
        z = 1j * (1 + w) / (1 - w)
        z = base.real + base.imag * z
        best = np.full(n_samples, np.inf)
        for chunk in np.array_split(np.arange(len(pts)), max(1, len(pts) // 2000)):
            d = _pair_dists(z, pts[chunk])
            best = np.minimum(best, d.min(axis=1))
        est = float(best.max())
        if est <= r - 0.3:
            return est
        r = est + 1.0
    raise DomainError("covering radius estimate did not stabilise (group not cocompact?)")


def _pair_dists(z, pts):
    num = np.abs(z[:, None] - pts[None, :])
    den = 2.0 * np.sqrt(z.imag[:, None] * pts.imag[None, :])
    return 2.0 * np.arcsinh(num / den)


def _element_length(m, reversing: bool) -> float:
    t = abs(m[0, 0] + m[1, 1])
    if reversing:
        return 2.0 * math.asinh(t / 2.0)
    return 2.0 * math.acosh(t / 2.0) if t > 2.0 else 0.0


def min_coset_displacement(gens, tau: Isometry, base=None, cover: float | None = None,
                           max_depth: int = 60, character=None, coset: int = 0):
    """min over g in the group of the displacement of g o tau.

    For a group Gamma normalized by tau with tau^2 in Gamma, this is
    min_p d(p, tau(p)) on the quotient: a glide length for reversing maps, a
    translation length for hyperbolic preserving maps and 0 when some g o tau
    has a fixed point.  With a ``character`` the minimum runs over the given
    coset of its kernel only; tau must then preserve the character.
    Returns (displacement, word of g).
    """
    base = default_base(gens) if base is None else _as_complex(base)
    if cover is None:
        cover = covering_radius(gens, base)
    q = tau(base)
    upper = dist(base, q) if coset % 2 == 0 else math.inf
    lm, lp, codes, lchi = _letters(gens, character)
    for m, par, c in zip(lm, lp, lchi):
        if c == coset % 2:
            upper = min(upper, dist(base, Isometry(m, bool(par))(q)))
    if not math.isfinite(upper):
        raise DomainError("no generator in the requested coset")
    radius = upper + 2.0 * (cover + 0.25) + 0.5
    ball = orbit_ball(gens, base, radius, max_depth, point=q, character=character)
    best, word = math.inf, None
    for m, par, c, w in zip(ball.mats, ball.parity, ball.chi, ball.words):
        if c != coset % 2:
            continue
        v = _element_length(m @ tau.m, bool(par) != tau.reversing)
        if v < best:
            best, word = v, w
    return best, word


# ---------------------------------------------------------- length spectrum

def word_to_isometry(gens, word) -> Isometry:
    g = Isometry.identity()
    for c in word:
        h = gens[abs(c) - 1]
        g = g @ (h if c > 0 else h.inverse())
    return g


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def format_word(word) -> str:
    """Generators 1, 2, ... as a, b, ...; inverses upper case."""
    if any(abs(c) > len(_LETTERS) for c in word):
        return ".".join(str(c) for c in word)
    return "".join(_LETTERS[c - 1] if c > 0 else _LETTERS[-c - 1].upper() for c in word)


def _cyclic_reduce(word):
    w = list(word)
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def _word_order(w):
    # shorter first, then positive before negative, then by index
    return (len(w), tuple((abs(c), c < 0) for c in w))


def _canonical(word):
    """Least rotation of the word or of its inverse."""
    w = _cyclic_reduce(word)
    if not w:
        return w
    inv = tuple(-c for c in reversed(w))
    cands = [u[i:] + u[:i] for u in (w, inv) for i in range(len(u))]
    return min(cands, key=_word_order)


@dataclass(frozen=True)
class ClassRecord:
    """An unoriented primitive conjugacy class of hyperbolic elements."""

    length: float
    word: tuple
    size: int  # number of ball elements found in the class


@dataclass(frozen=True)
class SpectrumEntry:
    length: float
    multiplicity: int
    representative_word: tuple

    @property
    def word(self) -> str:
        return format_word(self.representative_word)


@dataclass
class Spectrum:
    entries: list = field(default_factory=list)
    cutoff_warning: bool = False
    length_cutoff: float = 0.0
    word_cutoff: int = 0
    ball_radius: float = 0.0
    covering_radius: float = 0.0
    classes: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def systole(self) -> SpectrumEntry:
        return self.entries[0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["length", "multiplicity", "word"])
        for e in self.entries:
            wr.writerow([f"{e.length:.12g}", e.multiplicity, e.word])
        return buf.getvalue()


def _sign_normalized(m):
    t = m[:, 0, 0] + m[:, 1, 1]
    s = np.where(t < 0, -1.0, 1.0)
    return (m * s[:, None, None]).reshape(-1, 4)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def union(self, i, j):
        a, b = self.find(i), self.find(j)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


def conjugacy_classes(gens, length_cutoff: float, word_cutoff: int = 12,
                      base=None, cover: float | None = None, match_tol: float = 1e-6):
    """Primitive unoriented hyperbolic classes of length <= length_cutoff.

    Every such class has a conjugate whose axis passes within the covering
    radius D of the base point, hence moves the base point at most L + 2D.
    All elements of that ball are collected and grouped by conjugation with
    ball elements.  Only orientation-preserving generators are supported.
    Returns (classes, info) where info holds the ball radius, the covering
    radius and whether the word cutoff truncated the search.
    """
    if any(g.reversing for g in gens):
        raise DomainError("length spectrum needs orientation-preserving generators")
    base = default_base(gens) if base is None else _as_complex(base)
    if cover is None:
        cover = covering_radius(gens, base)
    radius = length_cutoff + 2.0 * (cover + 0.25) + 0.5
    ball = orbit_ball(gens, base, radius, word_cutoff)
    E = ball.mats
    tr = np.abs(E[:, 0, 0] + E[:, 1, 1])
    lens = np.where(tr > 2.0, 2.0 * np.arccosh(np.maximum(tr, 2.0) / 2.0), 0.0)
    cand = np.nonzero((tr > 2.0 + 1e-12) & (lens <= length_cutoff + 1e-9))[0]
    info = {"ball_radius": radius, "covering_radius": cover,
            "truncated": ball.truncated, "ball_size": len(ball)}
    if len(cand) == 0:
        return [], info
    C = E[cand]
    scale = max(1.0, float(np.max(np.abs(C))))
    tree = cKDTree(_sign_normalized(C))
    Einv = np.linalg.inv(E)
    uf = _UnionFind(len(cand))

    def matches(h):
        conj = E @ h @ Einv
        d, j = tree.query(_sign_normalized(conj), distance_upper_bound=match_tol * scale)
        return set(j[np.isfinite(d)].tolist())

    for i in range(len(cand)):
        g = C[i]
        for h in (g, np.linalg.inv(g)):
            for j in matches(h):
                uf.union(i, j)

    comps = {}
    for i in range(len(cand)):
        comps.setdefault(uf.find(i), []).append(i)

    nonprimitive = set()
    for root, members in comps.items():
        g = C[members[0]]
        ell = lens[cand[members[0]]]
        k = 2
        while k * ell <= length_cutoff + 1e-9:
            gk = np.linalg.matrix_power(g, k)
            for j in matches(gk):
                nonprimitive.add(uf.find(j))
            k += 1

    classes = []
    for root, members in comps.items():
        if root in nonprimitive:
            continue
        words = [_canonical(ball.words[cand[i]]) for i in members]
        w = min(words, key=_word_order)
        ell = translation_length(word_to_isometry(gens, w))
        classes.append(ClassRecord(ell, w, len(members)))
    classes.sort(key=lambda c: (round(c.length, 9), _word_order(c.word)))
    return classes, info


def length_spectrum(gens, length_cutoff: float, word_cutoff: int = 10,
                    base=None, rel_tol: float = 1e-8) -> Spectrum:
    """Lengths of primitive closed geodesics up to ``length_cutoff`` with multiplicities.

    Multiplicities count unoriented primitive conjugacy classes; simplicity is
    not tested.  ``cutoff_warning`` is set when the word cutoff stopped the
    search before the ball was exhausted.
    """
    if word_cutoff < 1:
        raise DomainError("word_cutoff must be >= 1")
    classes, info = conjugacy_classes(gens, length_cutoff, word_cutoff, base)
    entries = []
    i = 0
    while i < len(classes):
        j = i
        while j + 1 < len(classes) and \
                abs(classes[j + 1].length - classes[i].length) <= rel_tol * max(1.0, classes[i].length):
            j += 1
        group = classes[i:j + 1]
        rep = min(group, key=lambda c: _word_order(c.word))
        entries.append(SpectrumEntry(rep.length, len(group), rep.word))
        i = j + 1
    return Spectrum(entries, info["truncated"], length_cutoff, word_cutoff,
                    info["ball_radius"], info["covering_radius"], classes)


# ------------------------------------------------ explicit model constructions

def pentagon_by_walk(a: float, b: float) -> float:
    """Side of the right-angled pentagon opposite consecutive sides a, b, measured."""
    f = walk([("f", a), ("t", math.pi / 2), ("f", b), ("t", math.pi / 2)])[-1]
    return common_perpendicular(frame_heading(f), (-1.0, 1.0))[0]


def hexagon_by_walk(a: float, m: float, b: float) -> float:
    """Side of the right-angled hexagon opposite m, for consecutive sides a, m, b."""
    f = walk([("f", a), ("t", math.pi / 2), ("f", m), ("t", math.pi / 2),
              ("f", b), ("t", math.pi / 2)])[-1]
    return common_perpendicular(frame_heading(f), (-1.0, 1.0))[0]


def pants_generators(li: float, lj: float, lk: float) -> tuple[Isometry, Isometry]:
    """X, Y with X, Y and (XY)^-1 the three cuffs (tr XY < -2)."""
    a = math.exp(li / 2.0)
    ty = 2.0 * math.cosh(lj / 2.0)
    txy = -2.0 * math.cosh(lk / 2.0)
    p = (txy - ty / a) / (a - 1.0 / a)
    s = ty - p
    qr = p * s - 1.0
    q = math.sqrt(abs(qr))
    r = qr / q if q > 0.0 else 0.0
    return Isometry(np.diag([a, 1.0 / a])), Isometry(np.array([[p, q], [r, s]]))


def pants_perp_by_group(li: float, lj: float, lk: float) -> float:
    x, y = pants_generators(li, lj, lk)
    return common_perpendicular(axis_endpoints(x), axis_endpoints(y))[0]


def word_systole(gens, max_len: int = 8, exclude=()) -> tuple[float, tuple]:
    """Shortest translation length over cyclically reduced words up to max_len.

    Words that are cyclic rotations of a power of an excluded word are skipped
    (for a one-holed torus, the boundary commutator).  Preserving generators only.
    """
    banned = set()
    words = [tuple(w) for w in exclude]
    words += [tuple(-c for c in reversed(w)) for w in words]
    for w in words:
        for k in range(1, max_len // len(w) + 1):
            p = w * k
            for r in range(len(p)):
                banned.add(p[r:] + p[:r])
    mats = {}
    for i, g in enumerate(gens, start=1):
        mats[i] = g.m
        mats[-i] = g.inverse().m
    best, arg = math.inf, None
    stack = [((c,), mats[c]) for c in mats]
    while stack:
        w, m = stack.pop()
        if (len(w) == 1 or w[0] != -w[-1]) and w not in banned:
            t = abs(m[0, 0] + m[1, 1])
            if t > 2.0:
                ell = 2.0 * math.acosh(t / 2.0)
                if ell < best or (ell == best and (len(w), w) < (len(arg), arg)):
                    best, arg = ell, w
        if len(w) < max_len:
            stack += [(w + (c,), m @ mats[c]) for c in mats if c != -w[-1]]
    return best, arg
