import math

import numpy as np
import pytest

from hypsurf import fricke, genus2 as g2, hypmath
from hypsurf.errors import AlignmentError, GluingError, ParityError

BOUND = hypmath.ARCCOSH_BOUND


@pytest.fixture(scope="module")
def smax():
    return g2.smax()


@pytest.fixture(scope="module")
def bolza():
    return g2.bolza()


@pytest.fixture(scope="module")
def bolza_aligned():
    return g2.build(g2.bolza_piece())


def test_build_rejects_preserving():
    with pytest.raises(ParityError):
        g2.build(fricke.maximal_torus(3.0), parity="preserving")


def test_build_roundtrip():
    piece = fricke.maximal_torus(3.0)
    s = g2.build(piece)
    assert s.piece == piece and s.beta == piece.beta
    assert s.signature.genus == 2
    assert hypmath.area(s.signature) == pytest.approx(4 * math.pi)


def test_smax_certificate(smax):
    s, cert = smax
    assert cert.passed
    assert cert.values["displacement"] == pytest.approx(BOUND, abs=1e-12)
    assert cert.values["systole_census"] == 6
    assert cert.values["comparison_constant"] == pytest.approx(3.5449077, abs=1e-7)
    assert g2.is_extremal(s)


def test_displacement_aligned_branches(smax, bolza_aligned):
    s, _ = smax
    assert s.beta / 2 == pytest.approx(s.height(), abs=1e-12)
    d = g2.displacement_aligned(bolza_aligned)
    assert d == pytest.approx(bolza_aligned.height(), abs=1e-15)
    assert bolza_aligned.beta / 2 == pytest.approx(3.7978459, abs=1e-6)
    assert d < bolza_aligned.beta / 2


def test_bolza_height_closed_form(bolza_aligned):
    c = 1 + math.sqrt(2)
    cb = 4 * c ** 3 - 6 * c ** 2 + 1
    beta = 2 * math.acosh(cb)
    h = 2 * math.asinh(c / math.sinh(beta / 4))
    assert bolza_aligned.height() == pytest.approx(h, abs=1e-12)
    assert h == pytest.approx(1.3695149723, abs=1e-10)


def test_displacement_requires_alignment():
    piece = g2.bolza_piece()
    s = g2.build(piece, g2.Alignment.twisted(piece.beta / 12))
    with pytest.raises(AlignmentError):
        g2.displacement_aligned(s)
    with pytest.raises(GluingError):
        s.lift


def test_bolza_certificate(bolza):
    s, cert = bolza
    assert cert.passed
    assert cert.values["systole_census"] == 12
    assert cert.values["systole"] == pytest.approx(2 * math.acosh(1 + math.sqrt(2)), abs=1e-9)
    assert cert.values["beta"] == pytest.approx(7.5956918, abs=1e-6)
    assert cert.values["displacement_aligned_double"] < BOUND


def test_oracle_matches_aligned_formula(smax, bolza_aligned):
    s, _ = smax
    for surf in (s, bolza_aligned):
        d, _ = g2.displacement_oracle(surf)
        assert d == pytest.approx(g2.displacement_aligned(surf), abs=1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_oracle_matches_aligned_random(seed):
    rng = np.random.default_rng(seed)
    s = g2.build(g2.random_piece(rng, beta_range=(1.0, 5.0), trace_range=(2.5, 5.0), root=0))
    d, _ = g2.displacement_oracle(s)
    # long words on thin pieces lose a few digits in the trace
    assert d == pytest.approx(g2.displacement_aligned(s), abs=1e-7)


def test_sampled_not_below_exact(smax, bolza_aligned):
    s, _ = smax
    on_axis = g2.displacement_sampled(s, 50, points=g2.sample_points(s, 50, on_axis=50))
    assert on_axis == pytest.approx(BOUND, abs=1e-6)
    d = g2.displacement_sampled(bolza_aligned, 200, word_cutoff=8)
    exact = g2.displacement_aligned(bolza_aligned)
    assert exact - 1e-6 <= d < exact + 0.05


def test_verify_theorem2(smax, bolza_aligned):
    c = g2.verify_theorem2(smax[0])
    assert c.passed and c.values["equality"]
    c = g2.verify_theorem2(bolza_aligned)
    assert c.passed and not c.values["equality"]
    assert c.values["gap"] > 0.8


def test_random_sweep():
    rng = np.random.default_rng(42)
    for _ in range(500):
        c = g2.verify_theorem2(g2.build(g2.random_piece(rng)))
        assert c.passed
        assert c.values["displacement"] <= BOUND + 1e-9
        assert not c.values["equality"]


@pytest.mark.parametrize("delta", [1e-3, 1e-2, 0.1, 0.5])
def test_extremal_is_local_maximum(delta):
    beta = 2 * BOUND
    best = g2.displacement_aligned(g2.build(fricke.maximal_torus(beta)))
    for b in (beta - delta, beta + delta):
        d = g2.displacement_aligned(g2.build(fricke.maximal_torus(b)))
        assert d < best


def test_smax_systoles_move_to_disjoint(smax):
    rel = g2.systole_dichotomy(smax[0])
    assert len(rel) == 6
    assert all(r[2] == "disjoint" for r in rel)


def test_aligned_bolza_systoles_are_preserved(bolza_aligned):
    rel = g2.systole_dichotomy(bolza_aligned)
    assert {r[2] for r in rel} == {"same"}
