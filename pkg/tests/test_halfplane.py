import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypsurf import fricke, genus2, halfplane as hp, hypmath
from hypsurf.errors import DegenerateError, DomainError, NotHyperbolic
from hypsurf.halfplane import HPoint, Isometry

SIGMA = 2 * math.acosh((3 + math.sqrt(17)) / 4)
BETA = 2 * hypmath.ARCCOSH_BOUND


@pytest.fixture(scope="module")
def smax():
    return genus2.smax()[0]


def _rand_iso(rng, reversing=False):
    m = rng.normal(size=(2, 2))
    d = np.linalg.det(m)
    if (d < 0) != reversing:
        m[:, 0] *= -1
    return Isometry(m, reversing)


def test_point_requires_upper_half():
    with pytest.raises(DomainError):
        HPoint(0.0, -1.0)


def test_dist_examples():
    assert hp.dist(HPoint(0, 1), HPoint(0, math.e)) == pytest.approx(1.0, abs=1e-14)
    assert hp.dist(HPoint(0, 1), HPoint(1, 1)) == pytest.approx(math.acosh(1.5), abs=1e-14)
    assert hp.dist(HPoint(0.3, 2), HPoint(0.3, 2)) == 0.0


@settings(max_examples=100)
@given(st.integers(0, 10**6), st.booleans())
def test_isometries_preserve_distance(seed, rev):
    rng = np.random.default_rng(seed)
    g = _rand_iso(rng, rev)
    p = complex(rng.normal(), rng.uniform(0.2, 3))
    q = complex(rng.normal(), rng.uniform(0.2, 3))
    assert hp.dist(g(p), g(q)) == pytest.approx(hp.dist(p, q), abs=1e-10)


def test_composition_parity():
    rng = np.random.default_rng(1)
    r1, r2 = _rand_iso(rng, True), _rand_iso(rng, True)
    assert not (r1 @ r2).reversing
    assert (r1 @ _rand_iso(rng)).reversing
    g = _rand_iso(rng)
    assert (Isometry.identity() @ g).close_to(g)
    assert (g @ g.inverse()).is_identity()
    z = 0.2 + 1.3j
    assert (r1 @ r2)(z) == pytest.approx(r1(r2(z)), abs=1e-12)


def test_parity_must_match_determinant():
    with pytest.raises(DomainError):
        Isometry(np.array([[0.0, 1.0], [1.0, 0.0]]), reversing=False)


def test_translation_length():
    assert hp.translation_length(Isometry.translation(1.7)) == pytest.approx(1.7, abs=1e-13)
    assert hp.translation_length(Isometry(np.array([[1.0, 1.0], [1.0, 2.0]]))) == pytest.approx(
        2 * math.acosh(1.5), abs=1e-13)
    with pytest.raises(NotHyperbolic):
        hp.translation_length(Isometry(np.array([[1.0, 1.0], [0.0, 1.0]])))
    with pytest.raises(NotHyperbolic):
        hp.translation_length(Isometry.reflection_imaginary_axis())


def test_glide_length_is_half_of_square():
    g = Isometry.reflection_imaginary_axis() @ Isometry.translation(0.9)
    assert hp.translation_length(g) == pytest.approx(0.9, abs=1e-12)
    assert hp.translation_length(g @ g) == pytest.approx(1.8, abs=1e-12)


def test_common_perpendicular():
    d, f1, f2 = hp.common_perpendicular((-1.0, 1.0), (2.0, 3.0))
    assert d == pytest.approx(hp.dist(f1, f2), abs=1e-12)
    with pytest.raises(DegenerateError):
        hp.common_perpendicular((-1.0, 1.0), (0.0, 3.0))


def test_walk_closes_regular_pentagon():
    s = math.acosh((1 + math.sqrt(5)) / 2)
    steps = [("f", s), ("t", math.pi / 2)] * 5
    f = hp.walk(steps)[-1]
    assert f.is_identity(1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2, 4.0), st.floats(0.2, 4.0))
def test_pentagon_formula_matches_walk(a, b):
    if math.sinh(a) * math.sinh(b) <= 1.05:
        return
    assert hp.pentagon_by_walk(a, b) == pytest.approx(hypmath.pentagon_opposite(a, b), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2, 4.0), st.floats(0.2, 4.0), st.floats(0.2, 4.0))
def test_hexagon_formula_matches_walk(a, m, b):
    if math.sinh(a) * math.sinh(b) * math.cosh(m) - math.cosh(a) * math.cosh(b) <= 1.05:
        return
    assert hp.hexagon_by_walk(a, m, b) == pytest.approx(hypmath.hexagon_opposite(a, m, b), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2, 8.0), st.floats(0.2, 8.0), st.floats(0.2, 8.0))
def test_pants_formula_matches_group(li, lj, lk):
    x, y = hp.pants_generators(li, lj, lk)
    assert hp.translation_length((x @ y).inverse()) == pytest.approx(lk, abs=1e-9)
    assert hp.pants_perp_by_group(li, lj, lk) == pytest.approx(hypmath.pants_perp(li, lj, lk), abs=1e-9)


def test_torus_generators_traces():
    t = fricke.TraceTriple(3.2, 4.1, 3.9)
    a, b = hp.torus_generators(t)
    assert (a.trace, b.trace, (a @ b).trace) == pytest.approx(t.as_tuple(), abs=1e-12)


def test_smax_generators(smax):
    a1, b1, a2, b2 = smax.generators
    assert abs(a1.trace) == pytest.approx(3.5615528, abs=1e-6)
    assert hp.translation_length(hp.commutator(a1, b1)) == pytest.approx(BETA, abs=1e-6)
    rel = hp.commutator(a1, b1) @ hp.commutator(a2, b2)
    assert rel.is_identity(1e-8)


def test_smax_lift(smax):
    tau = smax.lift
    assert tau.reversing
    sq = tau @ tau
    assert hp.translation_length(sq) == pytest.approx(BETA, abs=1e-6)
    k = hp.commutator(*smax.generators[:2])
    assert sq.close_to(k) or sq.close_to(k.inverse())
    rng = np.random.default_rng(3)
    for _ in range(10):
        p = complex(rng.normal(), rng.uniform(0.3, 3))
        assert hp.dist(tau(tau(p)), sq(p)) < 1e-8


def test_orbit_min_dist(smax):
    gens = smax.generators
    p = 0.1 + 1.2j
    assert hp.orbit_min_dist(p, p, gens, 4) == 0.0
    q = smax.lift(2.0j)
    assert hp.orbit_min_dist(2.0j, q, gens, 8) == pytest.approx(BETA / 2, abs=1e-6)
    rng = np.random.default_rng(5)
    for _ in range(5):
        p = complex(rng.normal(), rng.uniform(0.5, 2))
        q = complex(rng.normal() * 3, rng.uniform(0.1, 4))
        assert hp.orbit_min_dist(p, q, gens, 8) <= hp.orbit_min_dist(p, q, gens, 1) + 1e-12


def test_spectrum_smax(smax):
    sp = hp.length_spectrum(smax.generators, 2.5, word_cutoff=8)
    assert sp.entries[0].length == pytest.approx(SIGMA, abs=1e-9)
    assert sp.entries[0].multiplicity == 6
    for e in sp.entries:
        g = hp.word_to_isometry(smax.generators, e.representative_word)
        assert hp.translation_length(g) == pytest.approx(e.length, abs=1e-12)


def test_spectrum_bolza():
    piece = genus2.bolza_piece()
    s = genus2.build(piece, genus2.Alignment.twisted(piece.beta / 12))
    sp = hp.length_spectrum(s.generators, 3.2, word_cutoff=10)
    assert sp.systole.length == pytest.approx(2 * math.acosh(1 + math.sqrt(2)), abs=1e-6)
    assert sp.entries[0].multiplicity == 12
    rows = sp.to_csv().splitlines()
    assert rows[0] == "length,multiplicity,word"
    assert rows[1].startswith("3.05714183896,12,")


def test_format_word():
    assert hp.format_word((1, -2, 3)) == "aBc"


def test_word_systole_excludes_boundary():
    piece = fricke.maximal_torus(1.0)
    a, b = hp.torus_generators(piece.traces)
    full, w = hp.word_systole([a, b], 4)
    assert full == pytest.approx(1.0, abs=1e-9)
    inner, w = hp.word_systole([a, b], 6, exclude=[(1, 2, -1, -2)])
    assert inner == pytest.approx(piece.systole(), abs=1e-9)


def test_min_coset_displacement_smax(smax):
    d, word = hp.min_coset_displacement(smax.generators, smax.lift)
    assert d == pytest.approx(BETA / 2, abs=1e-8)
