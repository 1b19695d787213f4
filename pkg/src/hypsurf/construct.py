"""Odd-genus surfaces whose fixed-point-free involutions move every point far.

Two ingredients:

* a combinatorial cell complex (polygons, side pastings, face permutations)
  that checks Euler characteristic, orientability and fixed points;
* geometry: right-angled polygons solved by shooting, and for genus 3 a
  Fuchsian group realizing the two-piece gluings in the half-plane.

If an involution swaps two disjoint simple closed geodesics C1, C2 of length
x whose union separates the surface into two halves exchanged by it, then a
shortest path from p to tau(p) together with its image is a closed curve
through both C1 and C2, so d(p, tau(p)) >= d(C1, C2) >= 2 w(x) with w the
collar half-width.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fricke, halfplane, hypmath
from .certificate import Certificate
from .errors import DomainError, GluingError, InvalidGenus, NoSolution
from .halfplane import HPoint, Isometry
from .hypmath import Signature

PRESERVING = "preserving"
REVERSING = "reversing"
HYPERELLIPTIC = "hyperelliptic_polygon"

RESTART_SCALES = (1.0, 0.5, 0.75, 1.5, 2.0, 3.0, 0.25, 4.0, 0.1, 6.0, 0.05)


def solve_x_for_k(k: float, safety: float = 0.99) -> float:
    """Boundary length whose glued-collar bound exceeds k."""
    k = float(k)
    if not math.isfinite(k) or k <= 0.0:
        raise DomainError(f"k must be positive, got {k!r}")
    if not 0.0 < safety < 1.0:
        raise DomainError(f"safety must lie in (0, 1), got {safety!r}")
    return safety * 2.0 * math.asinh(1.0 / math.sinh(k / 2.0))


# ------------------------------------------------------------ cell complexes

@dataclass(frozen=True)
class Face:
    name: str
    labels: tuple
    sign: int = 1  # +1 or -1: orientation relative to a fixed model polygon

    @property
    def n_sides(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class Pasting:
    """Side ``side_a`` of face ``a`` glued to side ``side_b`` of face ``b``.

    Not reversed: start corner to start corner.  Corner j of a face is the
    start of side j.
    """

    a: int
    side_a: int
    b: int
    side_b: int
    reversed: bool = False


class _DSU:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


@dataclass
class CellComplex:
    faces: list
    pastings: list

    def __post_init__(self):
        used = set()
        for p in self.pastings:
            for key in ((p.a, p.side_a), (p.b, p.side_b)):
                f, s = key
                if not (0 <= f < len(self.faces) and 0 <= s < self.faces[f].n_sides):
                    raise GluingError(f"pasting {p} refers to a missing side")
                if key in used:
                    raise GluingError(f"side {key} pasted twice")
                used.add(key)
        self._paired = {}
        for p in self.pastings:
            self._paired[(p.a, p.side_a)] = (p.b, p.side_b, p.reversed)
            self._paired[(p.b, p.side_b)] = (p.a, p.side_a, p.reversed)

    def face_index(self, name: str) -> int:
        for i, f in enumerate(self.faces):
            if f.name == name:
                return i
        raise KeyError(name)

    def partner(self, face: int, side: int):
        return self._paired.get((face, side))

    def _corner(self, f, j):
        return (f, j % self.faces[f].n_sides)

    def corner_across(self, f: int, side: int, corner: int):
        """Image of a corner (an endpoint of ``side``) in the face glued along ``side``."""
        q = self.partner(f, side)
        if q is None:
            return None
        g, t, rev = q
        n = self.faces[f].n_sides
        at_start = corner % n == side
        if rev:
            at_start = not at_start
        return (g, t if at_start else (t + 1) % self.faces[g].n_sides)

    def vertex_classes(self) -> dict:
        dsu = _DSU()
        for f, face in enumerate(self.faces):
            for j in range(face.n_sides):
                dsu.find((f, j))
        for p in self.pastings:
            s0, s1 = self._corner(p.a, p.side_a), self._corner(p.a, p.side_a + 1)
            t0, t1 = self._corner(p.b, p.side_b), self._corner(p.b, p.side_b + 1)
            if p.reversed:
                t0, t1 = t1, t0
            dsu.union(s0, t0)
            dsu.union(s1, t1)
        return {c: dsu.find(c) for c in dsu.parent}

    def edge_classes(self) -> dict:
        out = {}
        for f, face in enumerate(self.faces):
            for s in range(face.n_sides):
                q = self.partner(f, s)
                out[(f, s)] = min((f, s), (q[0], q[1])) if q else (f, s)
        return out

    def counts(self) -> tuple[int, int, int]:
        v = len(set(self.vertex_classes().values()))
        e = len(set(self.edge_classes().values()))
        return v, e, len(self.faces)

    def euler_characteristic(self) -> int:
        v, e, f = self.counts()
        return v - e + f

    def boundary_sides(self) -> list:
        return [(f, s) for f, face in enumerate(self.faces)
                for s in range(face.n_sides) if self.partner(f, s) is None]

    def boundary_components(self) -> int:
        """Number of boundary circles, following unpasted sides through vertices."""
        sides = self.boundary_sides()
        verts = self.vertex_classes()
        dsu = _DSU()
        by_vertex = {}
        for f, s in sides:
            dsu.find((f, s))
            for c in (self._corner(f, s), self._corner(f, s + 1)):
                by_vertex.setdefault(verts[c], []).append((f, s))
        for group in by_vertex.values():
            for other in group[1:]:
                dsu.union(group[0], other)
        return len({dsu.find(x) for x in sides})

    def is_orientable(self) -> bool:
        # glued sides must be traversed oppositely once face signs are accounted for
        return all(p.reversed == (self.faces[p.a].sign == self.faces[p.b].sign)
                   for p in self.pastings)

    def components(self, cut_edges=()) -> list:
        """Face sets of the complement of the given edge classes."""
        cut = set(cut_edges)
        classes = self.edge_classes()
        dsu = _DSU()
        for f in range(len(self.faces)):
            dsu.find(f)
        for p in self.pastings:
            if classes[(p.a, p.side_a)] not in cut:
                dsu.union(p.a, p.b)
        comps = {}
        for f in range(len(self.faces)):
            comps.setdefault(dsu.find(f), set()).add(f)
        return sorted(comps.values(), key=min)

    def to_dict(self, side_lengths=None, vertices=None) -> dict:
        out = {
            "faces": [{"name": f.name, "sign": f.sign, "labels": list(f.labels)} for f in self.faces],
            "pastings": [{"a": self.faces[p.a].name, "side_a": p.side_a,
                          "b": self.faces[p.b].name, "side_b": p.side_b,
                          "reversed": p.reversed} for p in self.pastings],
        }
        if side_lengths is not None:
            out["side_lengths"] = list(side_lengths)
        if vertices is not None:
            out["vertices"] = [[v.x, v.y] for v in vertices]
        return out


@dataclass
class CellMap:
    """A face permutation acting as the identity in each face's model coordinates."""

    name: str
    perm: dict  # face index -> face index

    def parity(self, cx: CellComplex) -> str:
        same = [cx.faces[f].sign == cx.faces[g].sign for f, g in self.perm.items()]
        if all(same):
            return PRESERVING
        if not any(same):
            return REVERSING
        raise GluingError(f"{self.name} mixes orientation behaviour")

    def validate(self, cx: CellComplex) -> None:
        n = len(cx.faces)
        if sorted(self.perm) != list(range(n)) or sorted(self.perm.values()) != list(range(n)):
            raise GluingError(f"{self.name} is not a permutation of the faces")
        for f, g in self.perm.items():
            if self.perm[g] != f:
                raise GluingError(f"{self.name} is not an involution")
            if cx.faces[f].labels != cx.faces[g].labels:
                raise GluingError(f"{self.name} maps {cx.faces[f].name} to a face of another shape")
        for p in cx.pastings:
            q = cx.partner(self.perm[p.a], p.side_a)
            if q is None or (q[0], q[1]) != (self.perm[p.b], p.side_b) or q[2] != p.reversed:
                raise GluingError(f"{self.name} does not respect the pasting {p}")
        self.parity(cx)

    def fixed_cells(self, cx: CellComplex) -> dict:
        self.validate(cx)
        faces = [f for f, g in self.perm.items() if f == g]
        ec = cx.edge_classes()
        edges = {c for (f, s), c in ec.items() if ec[(self.perm[f], s)] == c}
        vc = cx.vertex_classes()
        verts = {c for (f, j), c in vc.items() if vc[(self.perm[f], j)] == c}
        return {"faces": len(faces), "edges": len(edges), "vertices": len(verts),
                "vertex_classes": sorted(verts), "edge_classes": sorted(edges)}

    def image_of_edges(self, edges, cx: CellComplex) -> set:
        ec = cx.edge_classes()
        return {ec[(self.perm[f], s)] for (f, s) in edges}


def geodesic_chain(cx: CellComplex, face: int, side: int) -> list:
    """Edge classes met by continuing side (face, side) straight through vertices.

    Valid when every vertex joins four right angles, so the straight
    continuation of an edge is the opposite edge at the vertex.
    """
    ec = cx.edge_classes()
    start = ec[(face, side)]
    chain = [start]
    f, s = face, side
    corner = (side + 1) % cx.faces[f].n_sides  # leave through the end corner
    for _ in range(4 * sum(x.n_sides for x in cx.faces)):
        n = cx.faces[f].n_sides
        other = (corner - 1) % n if s == corner else corner
        nxt = cx.corner_across(f, other, corner)
        if nxt is None:
            raise GluingError("geodesic reaches the boundary")
        g, k = nxt
        m = cx.faces[g].n_sides
        q = cx.partner(f, other)
        t = q[1]
        cont = (k - 1) % m if t == k else k
        f, s = g, cont
        corner = (cont + 1) % m if cont == k else cont
        e = ec[(f, s)]
        if e == start:
            return chain
        chain.append(e)
    raise GluingError("straight continuation does not close up")


# ---------------------------------------------------- generic two-piece model

def piece_face(g_tilde: int, name: str, sign: int = 1) -> Face:
    """Polygon model of a genus-g~ surface with boundaries alpha, beta.

    Handles a_i b_i a_i^-1 b_i^-1, then seams c1, c2 running out to the two
    boundary circles, each split at its marked points p (offset 0) and q
    (offset x/2).
    """
    labels = []
    for i in range(1, g_tilde + 1):
        labels += [f"a{i}", f"b{i}", f"a{i}'", f"b{i}'"]
    labels += ["c1", "alpha1", "alpha2", "c1'", "c2", "beta1", "beta2", "c2'"]
    return Face(name, tuple(labels), sign)


def _internal_pastings(face_idx: int, face: Face) -> list:
    pos = {lab: j for j, lab in enumerate(face.labels)}
    out = []
    for lab, j in pos.items():
        if lab.endswith("'"):
            out.append(Pasting(face_idx, pos[lab[:-1]], face_idx, j, reversed=True))
    return out


@dataclass(frozen=True)
class GluingScheme:
    piece_signature: Signature
    x: float
    flavor: str
    markings: tuple = (0.0, 0.5)  # marked points as fractions of the boundary length

    def __post_init__(self):
        if self.piece_signature.boundary_count != 2:
            raise DomainError("pieces must have two boundary geodesics")
        if not math.isfinite(self.x) or self.x <= 0.0:
            raise DomainError("boundary length must be positive")
        if self.flavor not in (PRESERVING, REVERSING, HYPERELLIPTIC):
            raise DomainError(f"unknown flavor {self.flavor!r}")

    @property
    def g_tilde(self) -> int:
        return self.piece_signature.genus

    def marked_points(self) -> dict:
        offs = [f * self.x for f in self.markings]
        return {"alpha": {"p": offs[0], "q": offs[1]}, "beta": {"p": offs[0], "q": offs[1]}}


@dataclass
class Realization:
    """Half-plane model: the surface is H / ker(chi) for a genus-2 group.

    ``tau`` lifts the involution; on the quotient it acts through the
    elements g o tau with chi(g) = ``coset``.
    """

    gens: list
    character: tuple
    tau: Isometry
    coset: int
    x: float

    def curves(self):
        a1, b1 = self.gens[0], self.gens[1]
        return a1, b1 @ a1 @ b1.inverse()


@dataclass
class OddGenusSurface:
    scheme: GluingScheme
    genus: int
    parity: str
    complex: CellComplex
    involution: CellMap
    curves: tuple  # two sets of edge classes, the short geodesics swapped by tau
    curve_length: float
    realization: Realization | None = None
    polygon: "PolygonSpec | None" = None
    extra_involutions: dict = field(default_factory=dict)

    @property
    def signature(self) -> Signature:
        return Signature(self.genus, 0)

    def to_dict(self) -> dict:
        cx = self.complex
        poly = self.polygon
        d = cx.to_dict(poly.sides if poly else None, poly.vertices if poly else None)
        d.update({
            "genus": self.genus,
            "flavor": self.scheme.flavor,
            "boundary_length": self.scheme.x,
            "marked_points": self.scheme.marked_points(),
            "involutions": {m.name: {cx.faces[f].name: cx.faces[g].name for f, g in m.perm.items()}
                            for m in [self.involution, *self.extra_involutions.values()]},
        })
        return d


def _genus_from(cx: CellComplex) -> int:
    chi = cx.euler_characteristic()
    if chi % 2 or cx.boundary_sides():
        raise GluingError("pasting does not give a closed surface")
    return (2 - chi) // 2


def _two_piece_complex(g_tilde: int, flavor: str, crossed: bool = True):
    sign2 = 1 if flavor == PRESERVING else -1
    f0 = piece_face(g_tilde, "S1" if flavor == PRESERVING else "S", 1)
    f1 = piece_face(g_tilde, "S2" if flavor == PRESERVING else "S-", sign2)
    faces = [f0, f1]
    pos = {lab: j for j, lab in enumerate(f0.labels)}
    al1, al2, be1, be2 = pos["alpha1"], pos["alpha2"], pos["beta1"], pos["beta2"]
    pastings = _internal_pastings(0, f0) + _internal_pastings(1, f1)
    if flavor == PRESERVING:
        # same orientation: glued sides run oppositely, p_alpha meets p_beta
        for a, b in ((0, 1), (1, 0)):
            pastings += [Pasting(a, al1, b, be2, True), Pasting(a, al2, b, be1, True)]
    elif crossed:
        for a, b in ((0, 1), (1, 0)):
            pastings += [Pasting(a, al1, b, be1, False), Pasting(a, al2, b, be2, False)]
    else:
        # alpha to alpha_-, beta to beta_-, with a half-turn so markings p meet q
        pastings += [Pasting(0, al1, 1, al2, False), Pasting(0, al2, 1, al1, False),
                     Pasting(0, be1, 1, be2, False), Pasting(0, be2, 1, be1, False)]
    cx = CellComplex(faces, pastings)
    tau = CellMap("tau_o" if flavor == PRESERVING else "tau_r", {0: 1, 1: 0})
    ec = cx.edge_classes()
    c1 = frozenset({ec[(0, al1)], ec[(0, al2)]})
    c2 = frozenset({ec[(1, al1)], ec[(1, al2)]})
    return cx, tau, (c1, c2)


def build_odd_genus(g_tilde: int, x: float, flavor: str, realize: bool | None = None) -> OddGenusSurface:
    """Two copies of a (g~, 2) piece pasted along both boundaries.

    ``preserving``: copies S1, S2 with alpha1 ~ beta2 and alpha2 ~ beta1.
    ``reversing``: S and its mirror S-, pasted crosswise (alpha ~ beta-,
    beta ~ alpha-), so the mirror map swaps the two pasted curves.  For
    g~ = 1 a half-plane realization is attached unless ``realize`` is False.
    """
    if not isinstance(g_tilde, (int, np.integer)) or g_tilde < 1:
        raise InvalidGenus(f"g_tilde must be an integer >= 1, got {g_tilde!r}")
    if flavor not in (PRESERVING, REVERSING):
        raise DomainError(f"flavor must be preserving or reversing, got {flavor!r}")
    scheme = GluingScheme(Signature(int(g_tilde), 2), float(x), flavor)
    cx, tau, curves = _two_piece_complex(int(g_tilde), flavor)
    genus = _genus_from(cx)
    if genus != 2 * g_tilde + 1 or not cx.is_orientable():
        raise GluingError("unexpected topology")
    tau.validate(cx)
    if tau.parity(cx) != flavor:
        raise GluingError("involution has the wrong parity")
    real = None
    if realize is None:
        realize = g_tilde == 1
    if realize:
        if g_tilde != 1:
            raise DomainError("half-plane realization is implemented for g_tilde = 1 only")
        real = genus3_realization(x, flavor)
    return OddGenusSurface(scheme, genus, flavor, cx, tau, curves, float(x), real)


def literal_reversing_pasting(g_tilde: int, x: float) -> OddGenusSurface:
    """S and S- pasted alpha to alpha-, beta to beta- (half-turn on markings).

    The mirror map then has no fixed cells, but it maps each pasted curve to
    itself as a half-turn, so it moves points of that curve by only x/2.
    """
    scheme = GluingScheme(Signature(g_tilde, 2), float(x), REVERSING)
    cx, tau, curves = _two_piece_complex(g_tilde, REVERSING, crossed=False)
    return OddGenusSurface(scheme, _genus_from(cx), REVERSING, cx, tau, curves, float(x))


def invariant_curves(s: OddGenusSurface) -> list:
    """Pasted boundary curves mapped to themselves by the involution."""
    out = []
    for c in s.curves:
        if s.involution.image_of_edges(c, s.complex) == set(c):
            out.append(c)
    return out


def collar_argument_holds(s: OddGenusSurface) -> dict:
    """Combinatorial hypotheses of the collar bound, each as a boolean."""
    cx, tau = s.complex, s.involution
    c1, c2 = s.curves
    fixed = tau.fixed_cells(cx)
    vc = cx.vertex_classes()

    def verts(c):
        return {vc[cx._corner(f, j)] for (f, side) in c for j in (side, side + 1)}

    comps = cx.components(set(c1) | set(c2))
    swapped_halves = (len(comps) == 2 and
                      {tau.perm[f] for f in comps[0]} == comps[1])
    return {
        "fixed_point_free": fixed["faces"] == fixed["edges"] == fixed["vertices"] == 0,
        "curves_swapped": tau.image_of_edges(c1, cx) == set(c2),
        "curves_disjoint": not (set(c1) & set(c2)) and not (verts(c1) & verts(c2)),
        "halves_swapped": swapped_halves,
    }


# --------------------------------------------------- genus-3 in the half-plane

def zero_twist_piece(x: float, beta: float) -> fricke.TorusPiece:
    """Piece with tr A = 2cosh(x/2) and tr AB = tr AB^-1 (A and B axes orthogonal)."""
    xa = 2.0 * math.cosh(x / 2.0)
    cb = math.cosh(beta / 2.0)
    y = math.sqrt(4.0 * (xa * xa - 2.0 + 2.0 * cb) / (xa * xa - 4.0))
    return fricke.TorusPiece(beta, fricke.TraceTriple(xa, y, xa * y / 2.0))


def reflection_in_axis(g: Isometry) -> Isometry:
    u, v = halfplane.axis_endpoints(g)
    n = Isometry(halfplane._to_imaginary_axis(u, v))
    return n.inverse() @ Isometry.reflection_imaginary_axis() @ n


INTERNAL_LENGTH = 2.0 * math.asinh(1.0)


def genus3_realization(x: float, flavor: str, internal: float = INTERNAL_LENGTH) -> Realization:
    """Genus-3 surface as the double cover of a genus-2 surface S' along A1.

    S' has a non-separating geodesic A1 of length x; cutting along it leaves
    the (1, 2) piece.  The character counting B1 letters mod 2 defines the
    double cover made of two copies of the piece.  The deck map B1 is the
    preserving involution; composing it with the reflection in the axis of
    B1 (a symmetry of S' fixing A1 setwise) gives the reversing one, which
    pastes the piece to its mirror crosswise.
    """
    left = zero_twist_piece(x, internal)
    right = fricke.maximal_torus(internal)
    gens = halfplane.genus2_generators(left, right, internal)
    a1, b1 = gens[0], gens[1]
    if flavor == PRESERVING:
        tau = Isometry.identity()
    elif flavor == REVERSING:
        tau = reflection_in_axis(b1)
    else:
        raise DomainError(f"unknown flavor {flavor!r}")
    return Realization(gens, (0, 1, 0, 0), tau, 1, float(x))


def realization_displacement(r: Realization, cover: float | None = None):
    """Exact min_p d(p, tau(p)) on the realized surface (expensive for small x)."""
    return halfplane.min_coset_displacement(r.gens, r.tau, cover=cover,
                                           character=r.character, coset=r.coset)


def realization_samples(r: Realization, n_samples: int = 200, seed: int = 0):
    """Points across the collar of A1 and in a ball around the base point."""
    rng = np.random.default_rng(seed)
    base = halfplane.default_base(r.gens)
    u, v = halfplane.axis_endpoints(r.gens[0])
    ninv = Isometry(halfplane._to_imaginary_axis(u, v)).inverse()
    width = hypmath.collar_width(r.x)
    pts = []
    n_collar = n_samples // 2
    for _ in range(n_collar):
        t = rng.random() * r.x
        s = (rng.random() * 2.0 - 1.0) * (width + 0.5)
        # distance s from the axis, at height e^t along it
        w = complex(math.tanh(s), 1.0 / math.cosh(s))
        pts.append(ninv(math.exp(t) * w))
    for _ in range(n_samples - n_collar):
        rho = 3.0 * math.sqrt(rng.random())
        th = rng.random() * 2.0 * math.pi
        d = math.tanh(rho / 2.0) * complex(math.cos(th), math.sin(th))
        z = 1j * (1 + d) / (1 - d)
        pts.append(base.real + base.imag * z)
    return pts


def sampled_displacements(r: Realization, n_samples: int = 200, word_cutoff: int = 12,
                          seed: int = 0) -> np.ndarray:
    """Quotient distances d(p, tau(p)) at sample points (upper bounds each)."""
    out = []
    for p in realization_samples(r, n_samples, seed):
        out.append(halfplane.orbit_min_dist(p, r.tau(p), r.gens, word_cutoff,
                                            character=r.character, coset=r.coset))
    return np.array(out)


def certify_displacement(s: OddGenusSurface, k: float, oracle: bool = False) -> Certificate:
    bound = hypmath.displacement_lower_bound_glued(s.curve_length)
    variant = hypmath.half_collar_variant(s.curve_length)
    hyp = collar_argument_holds(s)
    values = {
        "k": float(k),
        "x": s.curve_length,
        "genus": s.genus,
        "flavor": s.scheme.flavor,
        "bound": bound,
        "half_collar_variant": variant,
        "arcsinh_one": hypmath.ARCSINH_ONE,
    }
    residuals = {name: float(not ok) for name, ok in hyp.items()}
    residuals["bound_exceeds_k"] = float(not bound > k)
    if oracle and s.realization is not None:
        d, _ = realization_displacement(s.realization)
        values["oracle_displacement"] = d
        residuals["oracle_not_below_bound"] = float(d < bound - 1e-9)
    return Certificate(
        claim_id=f"odd_genus_{s.scheme.flavor}",
        values=values,
        residuals=residuals,
        caveats=[
            f"the half-collar variant arcsinh(1/cosh(x/2)) = {variant:.6g} never exceeds "
            f"arcsinh(1) = {hypmath.ARCSINH_ONE:.6g}, so it cannot certify large k; "
            "the bound used is 2 arcsinh(1/sinh(x/2))",
        ],
    )


# ------------------------------------------------------ right-angled polygons

@dataclass
class PolygonSpec:
    """Right-angled polygon; ``None`` marks a side to be solved for."""

    sides: list
    labels: tuple | None = None
    vertices: list | None = None
    closure_residual: float | None = None
    angle_residual: float | None = None

    @property
    def n(self) -> int:
        return len(self.sides)


def _fwd(s):
    return np.diag([math.exp(s / 2.0), math.exp(-s / 2.0)])


_QUARTER = np.array([[math.cos(math.pi / 4), math.sin(math.pi / 4)],
                     [-math.sin(math.pi / 4), math.cos(math.pi / 4)]])
_GEN = np.diag([0.5, -0.5])


def _holonomy(sides):
    m = np.eye(2)
    for s in sides:
        m = m @ _fwd(s) @ _QUARTER
    return m


def _closure(m):
    if m[0, 0] + m[1, 1] < 0:
        m = -m
    return np.array([m[0, 1], m[1, 0], m[0, 0] - m[1, 1]])


def closure_residual(sides) -> float:
    """Distance of the side walk from closing up, relative to its largest partial product."""
    m = np.eye(2)
    scale = 1.0
    for v in sides:
        m = m @ _fwd(v) @ _QUARTER
        scale = max(scale, float(np.linalg.norm(m)))
    return float(np.linalg.norm(_closure(m))) / scale


def _closure_jacobian(sides, free):
    mats = [_fwd(s) @ _QUARTER for s in sides]
    n = len(sides)
    pre = [np.eye(2)]
    for m in mats:
        pre.append(pre[-1] @ m)
    suf = [np.eye(2)] * (n + 1)
    for j in range(n - 1, -1, -1):
        suf[j] = mats[j] @ suf[j + 1]
    sgn = 1.0 if np.trace(pre[n]) >= 0 else -1.0
    cols = []
    for j in free:
        # derivative with respect to log(side j)
        d = pre[j] @ _fwd(sides[j]) @ _GEN @ _QUARTER @ suf[j + 1] * sides[j] * sgn
        cols.append([d[0, 1], d[1, 0], d[0, 0] - d[1, 1]])
    return np.array(cols).T


def polygon_vertices(sides) -> list:
    """Vertices of the walk starting at i heading up, turning left by pi/2."""
    m = np.eye(2)
    out = []
    for s in sides:
        out.append(Isometry(m)(HPoint(0.0, 1.0)))
        m = m @ _fwd(s) @ _QUARTER
    return out


def _direction(at: complex, to: complex) -> float:
    # move ``at`` to the centre of the disk model, where geodesics are straight
    z = (to - at.real) / at.imag
    w = (z - 1j) / (z + 1j)
    return math.atan2(w.imag, w.real)


def polygon_angles(vertices) -> list:
    zs = [v.z for v in vertices]
    n = len(zs)
    out = []
    for j in range(n):
        a = _direction(zs[j], zs[j - 1])
        b = _direction(zs[j], zs[(j + 1) % n])
        d = abs(a - b) % (2 * math.pi)
        out.append(min(d, 2 * math.pi - d))
    return out


def polygon_side_lengths(vertices) -> list:
    n = len(vertices)
    return [halfplane.dist(vertices[j], vertices[(j + 1) % n]) for j in range(n)]


def _is_convex(sides) -> bool:
    verts = polygon_vertices(sides)
    m = np.eye(2)
    for j, s in enumerate(sides):
        fr = Isometry(m).inverse()
        for i, v in enumerate(verts):
            if i in (j, (j + 1) % len(sides)):
                continue
            if fr(v.z).real >= -1e-12:
                return False
        m = m @ _fwd(s) @ _QUARTER
    return True


def solve_right_angled_polygon(spec: PolygonSpec, guess=None, tol: float = 1e-12,
                               maxiter: int = 200) -> PolygonSpec:
    """Solve for the missing sides of a right-angled polygon by damped Newton shooting.

    Unknowns are the logarithms of the missing sides; the residual is the
    distance of the holonomy of the side walk from the identity.
    """
    n = spec.n
    if n < 5:
        raise DomainError("a right-angled polygon has at least 5 sides")
    free = [j for j, s in enumerate(spec.sides) if s is None]
    if len(free) != 3:
        raise DomainError(f"need exactly {n - 3} prescribed sides, got {n - len(free)}")
    fixed = [float(s) for s in spec.sides if s is not None]
    if any(not math.isfinite(s) or s <= 0.0 for s in fixed):
        raise DomainError("prescribed sides must be positive")
    if guess is None:
        guess = [float(np.mean(fixed))] * 3
    guess = np.log(np.asarray(guess, dtype=float))

    def assemble(u):
        out = list(spec.sides)
        for k, j in enumerate(free):
            out[j] = math.exp(u[k])
        return out

    for scale in RESTART_SCALES:
        u = guess + math.log(scale)
        r = _closure(_holonomy(assemble(u)))
        nr = float(np.linalg.norm(r))
        for _ in range(maxiter):
            if nr < tol:
                break
            jac = _closure_jacobian(assemble(u), free)
            step = np.linalg.lstsq(jac, -r, rcond=None)[0]
            big = float(np.max(np.abs(step)))
            if big > 1.0:
                step /= big
            lam = 1.0
            while lam > 1e-8:
                un = u + lam * step
                if np.all(un < 50.0):
                    rn = _closure(_holonomy(assemble(un)))
                    if np.linalg.norm(rn) < nr:
                        break
                lam *= 0.5
            else:
                break
            u, r, nr = un, rn, float(np.linalg.norm(rn))
        if nr < tol and _is_convex(assemble(u)):
            sides = assemble(u)
            verts = polygon_vertices(sides)
            ang = max(abs(a - math.pi / 2) for a in polygon_angles(verts))
            return PolygonSpec(sides, spec.labels, verts, closure_residual(sides), ang)
    raise NoSolution(f"no right-angled {n}-gon with prescribed sides {spec.sides}")


def hexagon_from_alternates(p: float, q: float, r: float) -> tuple[float, float, float]:
    """Sides opposite p, q, r in the right-angled hexagon with alternate sides p, q, r."""
    vals = []
    for u, v, w in ((p, q, r), (q, r, p), (r, p, q)):
        c = (math.cosh(u) + math.cosh(v) * math.cosh(w)) / (math.sinh(v) * math.sinh(w))
        vals.append(math.acosh(c))
    return tuple(vals)


def right_angled_polygon(alternate, diagonals=None) -> PolygonSpec:
    """Right-angled 2m-gon a1 b1 ... am bm from its sides a_i and m-3 diagonals.

    The polygon is a fan of hexagons glued along common perpendiculars of
    length ``diagonals[j]`` from side b_m to side b_{j+2}; gluing makes the
    angles at the seams straight, so the result is convex for any positive
    input.
    """
    a = [float(v) for v in alternate]
    m = len(a)
    if m < 3:
        raise DomainError("need at least three alternate sides")
    d = [1.0] * (m - 3) if diagonals is None else [float(v) for v in diagonals]
    if len(d) != m - 3:
        raise DomainError(f"need {m - 3} diagonals, got {len(d)}")
    if any(not math.isfinite(v) or v <= 0.0 for v in a + d):
        raise DomainError("sides and diagonals must be positive")
    b = [0.0] * m
    if m == 3:
        o1, o2, o3 = hexagon_from_alternates(a[0], a[1], a[2])
        b = [o3, o1, o2]
    else:
        o_a1, o_a2, o_d = hexagon_from_alternates(a[0], a[1], d[0])
        b[0] = o_d
        b[1] += o_a1
        b[m - 1] += o_a2
        for j in range(1, m - 3):
            # hexagon delta_{j-1}, a_{j+1}, delta_j
            o_prev, o_a, o_next = hexagon_from_alternates(d[j - 1], a[j + 1], d[j])
            b[j] += o_next
            b[j + 1] += o_prev
            b[m - 1] += o_a
        o_d, o_p, o_q = hexagon_from_alternates(d[m - 4], a[m - 2], a[m - 1])
        b[m - 3] += o_q
        b[m - 2] += o_d
        b[m - 1] += o_p
    sides = [v for pair in zip(a, b) for v in pair]
    verts = polygon_vertices(sides)
    ang = max(abs(t - math.pi / 2) for t in polygon_angles(verts))
    res = closure_residual(sides)
    labels = tuple(f"{c}{i}" for i in range(1, m + 1) for c in "ab")
    return PolygonSpec(sides, labels, verts, res, ang)


def hyperelliptic_polygon(g_tilde: int, a1: float, other_a: float = 1.0,
                          diagonal: float = 1.0) -> PolygonSpec:
    """(2g~+4)-gon with a1 prescribed and the other a-sides and diagonals fixed."""
    m = g_tilde + 2
    return right_angled_polygon([a1] + [other_a] * (m - 1), [diagonal] * (m - 3))


# ---------------------------------------------------- hyperelliptic example

_POLYS = (("P1", 1), ("P2", -1), ("Q1", 1), ("Q2", -1),
          ("P1-", -1), ("P2-", 1), ("Q1-", -1), ("Q2-", 1))

INVOLUTION_PAIRS = {
    "tau_h": (("P1", "P2-"), ("P2", "P1-"), ("Q1", "Q2-"), ("Q2", "Q1-")),
    "tau_o": (("P1", "Q1"), ("P2", "Q2"), ("P1-", "Q1-"), ("P2-", "Q2-")),
    "tau_r": (("P1", "Q1-"), ("P2", "Q2-"), ("P1-", "Q1"), ("P2-", "Q2")),
}


def hyperelliptic_complex(g_tilde: int) -> CellComplex:
    """Eight copies of the polygon: S+ = P1, P2, Q1, Q2 pasted along the a-sides
    (a1 crosswise), S- its mirror, and S+ pasted to S- along the b-sides."""
    n = 2 * g_tilde + 4
    labels = tuple(f"{c}{i}" for i in range(1, g_tilde + 3) for c in "ab")
    faces = [Face(name, labels, sign) for name, sign in _POLYS]
    idx = {f.name: i for i, f in enumerate(faces)}
    pastings = []
    for half in ("", "-"):
        P1, P2, Q1, Q2 = (idx[v + half] for v in ("P1", "P2", "Q1", "Q2"))
        for i in range(1, g_tilde + 2):
            side = 2 * i  # a_{i+1}
            pastings += [Pasting(P1, side, P2, side), Pasting(Q1, side, Q2, side)]
        pastings += [Pasting(P1, 0, Q2, 0), Pasting(P2, 0, Q1, 0)]
    for v in ("P1", "P2", "Q1", "Q2"):
        for i in range(g_tilde + 2):
            pastings.append(Pasting(idx[v], 2 * i + 1, idx[v + "-"], 2 * i + 1))
    cx = CellComplex(faces, pastings)
    assert all(f.n_sides == n for f in faces)
    return cx


def involution_from_pairs(cx: CellComplex, name: str, pairs) -> CellMap:
    perm = {}
    for a, b in pairs:
        ia, ib = cx.face_index(a), cx.face_index(b)
        if ia in perm or ib in perm:
            raise GluingError(f"{name}: face listed twice")
        perm[ia], perm[ib] = ib, ia
    m = CellMap(name, perm)
    m.validate(cx)
    return m


def _fixed_vertex_sides(cx: CellComplex, fixed_vertices) -> list:
    """Labels of the sides with both endpoints among the fixed vertices (in P1)."""
    vc = cx.vertex_classes()
    f = cx.face_index("P1")
    face = cx.faces[f]
    fixed = set(fixed_vertices)
    return [face.labels[s] for s in range(face.n_sides)
            if vc[(f, s)] in fixed and vc[(f, (s + 1) % face.n_sides)] in fixed]


def build_hyperelliptic_example(g_tilde: int, a1: float, k: float | None = None):
    """Genus 2g~+1 surface from eight right-angled (2g~+4)-gons.

    Returns ((surface with tau_o, surface with tau_r), certificate).
    """
    if not isinstance(g_tilde, (int, np.integer)) or g_tilde < 1:
        raise InvalidGenus(f"g_tilde must be an integer >= 1, got {g_tilde!r}")
    poly = hyperelliptic_polygon(g_tilde, a1)
    if not _is_convex(poly.sides):
        raise NoSolution("polygon is not convex")
    cx = hyperelliptic_complex(g_tilde)
    genus = _genus_from(cx)
    maps = {name: involution_from_pairs(cx, name, pairs) for name, pairs in INVOLUTION_PAIRS.items()}

    # the a1 sides pasted end to end
    chains = []
    seen = set()
    ec = cx.edge_classes()
    for f in range(len(cx.faces)):
        e = ec[(f, 0)]
        if e in seen:
            continue
        ch = geodesic_chain(cx, f, 0)
        seen.update(ch)
        chains.append(frozenset(ch))
    lengths = [len(ch) * poly.sides[0] for ch in chains]
    curve_len = lengths[0] if lengths else 0.0
    scheme = GluingScheme(Signature(g_tilde, 2), curve_len, HYPERELLIPTIC)
    out = []
    for name in ("tau_o", "tau_r"):
        m = maps[name]
        out.append(OddGenusSurface(scheme, genus, m.parity(cx), cx, m, tuple(chains),
                                   curve_len, None, poly,
                                   {n: maps[n] for n in maps if n != name}))

    bound = hypmath.displacement_lower_bound_glued(curve_len)
    fixed_h = maps["tau_h"].fixed_cells(cx)
    values = {
        "g_tilde": g_tilde,
        "genus": genus,
        "polygon_sides": poly.sides,
        "a1": poly.sides[0],
        "a1_curve_count": len(chains),
        "a1_curve_lengths": lengths,
        "bound": bound,
        "tau_h_fixed_points": fixed_h["vertices"],
        "tau_h_fixed_vertex_sides": _fixed_vertex_sides(cx, fixed_h["vertex_classes"]),
        "euler_characteristic": cx.euler_characteristic(),
    }
    residuals = {
        "closure": poly.closure_residual,
        "angles": poly.angle_residual,
        "euler_vs_genus": cx.euler_characteristic() - (2 - 2 * genus),
        "tau_h_fixed_count": fixed_h["vertices"] - (2 * genus + 2),
        "tau_h_no_fixed_edges": float(fixed_h["edges"] + fixed_h["faces"]),
        "a1_two_curves": float(len(chains) != 2),
        "a1_curve_length": max(abs(x - 2 * poly.sides[0]) for x in lengths),
    }
    for surf in out:
        name = surf.involution.name
        fc = surf.involution.fixed_cells(cx)
        residuals[f"{name}_fixed_cells"] = float(fc["faces"] + fc["edges"] + fc["vertices"])
        for key, ok in collar_argument_holds(surf).items():
            residuals[f"{name}_{key}"] = float(not ok)
    if k is not None:
        values["k"] = float(k)
        residuals["bound_exceeds_k"] = float(not bound > k)
    cert = Certificate("hyperelliptic_example", values, residuals, tolerance=1e-8)
    return tuple(out), cert
