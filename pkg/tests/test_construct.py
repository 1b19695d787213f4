import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypsurf import construct as cs, hypmath
from hypsurf.errors import DomainError, GluingError, InvalidGenus, NoSolution

BETA = 2 * hypmath.ARCCOSH_BOUND
SIGMA = 2 * math.acosh((3 + math.sqrt(17)) / 4)


@pytest.fixture(scope="module")
def genus3():
    return {f: cs.build_odd_genus(1, cs.solve_x_for_k(1.0), f) for f in (cs.PRESERVING, cs.REVERSING)}


@pytest.mark.parametrize("k", [0.1, 1.0, 2.0, 5.0, 10.0])
def test_solve_x_for_k_clears_k(k):
    x = cs.solve_x_for_k(k)
    assert hypmath.displacement_lower_bound_glued(x) > k
    # without the safety factor the bound is exactly k
    x1 = 2 * math.asinh(1 / math.sinh(k / 2))
    assert hypmath.displacement_lower_bound_glued(x1) == pytest.approx(k, rel=1e-12)
    assert x == pytest.approx(0.99 * x1, rel=1e-15)


def test_solve_x_for_k_five():
    x = cs.solve_x_for_k(5.0)
    assert x < 0.3290182
    assert x / 0.99 == pytest.approx(2 * math.asinh(1 / math.sinh(2.5)), rel=1e-15)
    assert x / 0.99 == pytest.approx(0.3290804, abs=1e-7)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_solve_x_for_k_rejects(bad):
    with pytest.raises(DomainError):
        cs.solve_x_for_k(bad)
    with pytest.raises(DomainError):
        cs.solve_x_for_k(1.0, safety=1.0)


@pytest.mark.parametrize("g", [1, 2, 3])
@pytest.mark.parametrize("flavor", [cs.PRESERVING, cs.REVERSING])
def test_build_odd_genus_topology(g, flavor):
    s = cs.build_odd_genus(g, 0.5, flavor, realize=False)
    assert s.genus == 2 * g + 1
    assert s.complex.euler_characteristic() == 2 - 2 * s.genus
    assert s.complex.is_orientable()
    assert s.complex.boundary_components() == 0
    assert s.involution.parity(s.complex) == flavor
    assert hypmath.area(s.signature) == pytest.approx(2 * math.pi * 4 * g)
    assert all(collar := cs.collar_argument_holds(s).values()), collar
    assert cs.invariant_curves(s) == []


@pytest.mark.parametrize("g", [0, -1, 1.5, "2"])
def test_build_odd_genus_invalid(g):
    with pytest.raises(InvalidGenus):
        cs.build_odd_genus(g, 0.5, cs.PRESERVING)


def test_build_odd_genus_bad_flavor():
    with pytest.raises(DomainError):
        cs.build_odd_genus(1, 0.5, "sideways")


def test_literal_reversing_pasting_has_invariant_curve():
    s = cs.literal_reversing_pasting(2, 0.5)
    assert s.genus == 5
    assert len(cs.invariant_curves(s)) >= 1
    hyp = cs.collar_argument_holds(s)
    # the two pasted curves coincide, so the collar hypotheses fail
    c1, c2 = s.curves
    assert c1 == c2
    assert hyp["fixed_point_free"]
    assert not hyp["curves_disjoint"] and not hyp["halves_swapped"]


def test_certify_displacement():
    s = cs.build_odd_genus(2, cs.solve_x_for_k(5.0), cs.REVERSING)
    cert = cs.certify_displacement(s, 5.0)
    assert cert.passed
    assert cert.claim_id == "odd_genus_reversing"
    assert cert.values["bound"] == pytest.approx(5.02001115799, abs=1e-10)
    assert cert.values["half_collar_variant"] < hypmath.ARCSINH_ONE
    assert cert.caveats
    assert not cs.certify_displacement(s, 20.0).passed


def test_genus3_sampled_above_bound(genus3):
    for s in genus3.values():
        bound = hypmath.displacement_lower_bound_glued(s.curve_length)
        d = cs.sampled_displacements(s.realization, 60, word_cutoff=10)
        assert d.min() >= bound - 1e-6


def test_genus3_oracle(genus3):
    for s in genus3.values():
        cert = cs.certify_displacement(s, 1.0, oracle=True)
        assert cert.passed
        d = cert.values["oracle_displacement"]
        assert d >= cert.values["bound"]
        # samples are upper bounds for the exact minimum
        assert cs.sampled_displacements(s.realization, 40).min() >= d - 1e-9


def test_json_export(genus3):
    d = genus3[cs.REVERSING].to_dict()
    text = json.dumps(d)
    back = json.loads(text)
    assert back["genus"] == 3 and back["flavor"] == "reversing"
    assert back["involutions"]["tau_r"] == {"S": "S-", "S-": "S"}
    assert set(back["marked_points"])


# -------------------------------------------------------------- cell maps

def test_cellmap_rejects_non_involution():
    s = cs.build_odd_genus(1, 0.5, cs.PRESERVING, realize=False)
    with pytest.raises(GluingError):
        cs.CellMap("bad", {0: 0, 1: 0}).validate(s.complex)


def test_cellmap_rejects_pasting_violation():
    cx = cs.hyperelliptic_complex(1)
    with pytest.raises(GluingError):
        cs.involution_from_pairs(cx, "bad", (("P1", "Q1"), ("P2", "P2"), ("Q2", "Q2"), ("P1-", "P1-"),
                                             ("P2-", "P2-"), ("Q1-", "Q1-"), ("Q2-", "Q2-")))


def test_involution_from_pairs_rejects_repeat():
    cx = cs.hyperelliptic_complex(1)
    with pytest.raises(GluingError):
        cs.involution_from_pairs(cx, "rep", (("P1", "Q1"), ("P1", "Q2")))


def test_identity_fixes_everything():
    cx = cs.hyperelliptic_complex(1)
    m = cs.CellMap("id", {i: i for i in range(len(cx.faces))})
    fc = m.fixed_cells(cx)
    v, e, f = cx.counts()
    assert (fc["vertices"], fc["edges"], fc["faces"]) == (v, e, f)


# -------------------------------------------------------------- polygons

def test_closure_regular_pentagon():
    s = math.acosh((1 + math.sqrt(5)) / 2)
    assert cs.closure_residual([s] * 5) < 1e-13
    assert cs.closure_residual([s] * 4 + [s + 0.1]) > 1e-3


def test_pentagon_quarter_boundary():
    spec = cs.solve_right_angled_polygon(cs.PolygonSpec([BETA / 4, BETA / 4, None, None, None]))
    assert spec.closure_residual < 1e-12
    assert spec.sides[3] == pytest.approx(SIGMA / 2, abs=1e-10)
    assert spec.sides[3] == pytest.approx(1.179966, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.6, 3.0), st.floats(0.6, 3.0))
def test_solved_pentagon_matches_formula(a, b):
    if math.sinh(a) * math.sinh(b) <= 1.1:
        return
    spec = cs.solve_right_angled_polygon(cs.PolygonSpec([a, b, None, None, None]))
    assert spec.sides[3] == pytest.approx(hypmath.pentagon_opposite(a, b), abs=1e-9)
    assert spec.angle_residual < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(0.3, 3.0))
def test_solved_hexagon_matches_fan(p, q, r):
    fan = cs.right_angled_polygon([p, q, r])
    spec = cs.solve_right_angled_polygon(cs.PolygonSpec([p, None, q, None, r, None]),
                                         guess=[fan.sides[1], fan.sides[3], fan.sides[5]])
    assert spec.sides == pytest.approx(fan.sides, abs=1e-9)


def test_hexagon_from_alternates_matches_formula():
    p, q, r = 1.0, 1.3, 0.7
    o_p, o_q, o_r = cs.hexagon_from_alternates(p, q, r)
    # o_r joins p and q, so the hexagon formula recovers r from p, o_r, q
    assert hypmath.hexagon_opposite(p, o_r, q) == pytest.approx(r, abs=1e-12)
    assert math.cosh(o_p) == pytest.approx(
        (math.cosh(p) + math.cosh(q) * math.cosh(r)) / (math.sinh(q) * math.sinh(r)), rel=1e-14)


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_fan_polygon_closes_convex(m):
    rng = np.random.default_rng(m)
    a = rng.uniform(0.3, 2.5, m)
    d = rng.uniform(0.3, 2.5, m - 3)
    spec = cs.right_angled_polygon(a, d)
    assert spec.n == 2 * m
    assert spec.closure_residual < 1e-10
    assert spec.angle_residual < 1e-9
    assert cs._is_convex(spec.sides)
    assert cs.polygon_side_lengths(spec.vertices) == pytest.approx(spec.sides, rel=1e-8)


def test_newton_recovers_fan_octagon():
    fan = cs.right_angled_polygon([1.06, 1.2, 0.9, 1.4], [1.1])
    s = list(fan.sides)
    free = [5, 6, 7]
    prescribed = [v if j not in free else None for j, v in enumerate(s)]
    spec = cs.solve_right_angled_polygon(cs.PolygonSpec(prescribed))
    assert spec.closure_residual < 1e-12
    assert [spec.sides[j] for j in free] == pytest.approx([s[j] for j in free], abs=1e-9)


def test_solver_errors():
    with pytest.raises(DomainError):
        cs.solve_right_angled_polygon(cs.PolygonSpec([1.0, None, None, None]))
    with pytest.raises(DomainError):
        cs.solve_right_angled_polygon(cs.PolygonSpec([1.0, 1.0, None, None, None, 1.0, None]))
    with pytest.raises(DomainError):
        cs.solve_right_angled_polygon(cs.PolygonSpec([-1.0, 1.0, None, None, None]))
    # sinh a sinh b < 1: no pentagon with these adjacent sides
    with pytest.raises(NoSolution):
        cs.solve_right_angled_polygon(cs.PolygonSpec([0.3, 0.3, None, None, None]))


# ------------------------------------------------------ hyperelliptic example

@pytest.mark.parametrize("g", [1, 2, 3])
def test_hyperelliptic_example(g):
    (s_o, s_r), cert = cs.build_hyperelliptic_example(g, 0.4)
    assert cert.passed, cert.residuals
    assert s_o.genus == s_r.genus == 2 * g + 1
    assert cert.values["tau_h_fixed_points"] == 4 * g + 4
    assert cert.values["a1_curve_count"] == 2
    assert cert.values["a1_curve_lengths"] == pytest.approx([0.8, 0.8])
    assert s_o.parity == cs.PRESERVING and s_r.parity == cs.REVERSING
    for s in (s_o, s_r):
        fc = s.involution.fixed_cells(s.complex)
        assert fc["faces"] == fc["edges"] == fc["vertices"] == 0


def test_hyperelliptic_tau_h_fixed_sides():
    _, cert = cs.build_hyperelliptic_example(3, 0.4)
    sides = cert.values["tau_h_fixed_vertex_sides"]
    assert "a1" not in sides
    assert {f"a{i}" for i in range(2, 6)} <= set(sides)


def test_hyperelliptic_polygon_is_decagon_for_g3():
    p = cs.hyperelliptic_polygon(3, 0.4)
    assert p.n == 10 and p.sides[0] == 0.4
    assert cs._is_convex(p.sides)


def test_hyperelliptic_invalid():
    with pytest.raises(InvalidGenus):
        cs.build_hyperelliptic_example(0, 0.4)


def test_hyperelliptic_json():
    (s_o, _), _ = cs.build_hyperelliptic_example(1, 0.4)
    d = json.loads(json.dumps(s_o.to_dict()))
    assert set(d["involutions"]) == {"tau_o", "tau_h", "tau_r"}
    assert len(d["faces"]) == 8
