import itertools
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partialfix.contraction import (
    compute_Xp,
    estimate_alpha,
    estimate_alpha_cyclic,
    glue_pair,
    verify_contraction,
    verify_inclusions,
    verify_orbital,
    verify_partial_cyclic,
    verify_strict,
)
from partialfix.errors import ArgumentError, GluingError, MapTotalityError
from partialfix.sets import Affine, Piece, PiecewiseMap, SetDescriptor, sample
from partialfix.spaces import CATALOG, CyclicDecomposition, make_k3_demo


def ratio_oracle(p, T, xs, ys, tol=1e-9):
    """Plain double loop over the grid: sup p(Tx,Ty)/p(x,y)."""
    best = 0.0
    for x, y in itertools.product(xs, ys):
        den, num = p(x, y), p(T(x), T(y))
        if den > tol:
            best = max(best, num / den)
        elif num > tol:
            return math.inf
    return best


@pytest.fixture
def unit():
    return SetDescriptor.interval(0, 1)


@pytest.fixture
def half_map(unit):
    return PiecewiseMap.single(Affine(0.5, 0), unit)


@pytest.fixture
def identity(unit):
    return PiecewiseMap.single(Affine(1, 0), unit)


# verify_inclusions


def test_inclusions_hybrid(hybrid):
    assert verify_inclusions(hybrid.map, hybrid.decomposition, 50).holds


def test_inclusions_counterexample(counter):
    A, B = counter.decomposition.sets
    # oracle: direct image scan
    assert all(B.contains(counter.map(x)) for x in sample(A, 50))
    assert all(A.contains(counter.map(y)) for y in sample(B, 50))
    assert verify_inclusions(counter.map, counter.decomposition, 50).holds


def test_inclusions_k3():
    e = make_k3_demo()
    cert = verify_inclusions(e.map, e.decomposition, 20)
    assert cert.holds and cert.margin >= 0
    assert cert.checked == 60


def test_inclusions_failure_witness(unit, identity):
    decomp = CyclicDecomposition((unit, SetDescriptor.interval(0, 0.5)))
    cert = verify_inclusions(identity, decomp, 5)
    assert not cert.holds
    assert cert.witness == (0.75, 0.75)
    assert cert.lhs == pytest.approx(0.25) and cert.margin < 0


def test_inclusions_totality_error(unit):
    partial = PiecewiseMap.single(Affine(1, 0), SetDescriptor.interval(0, 0.5))
    with pytest.raises(MapTotalityError):
        verify_inclusions(partial, CyclicDecomposition((unit,)), 5)


# estimate_alpha


def test_alpha_half_map(max01, unit, half_map):
    est = estimate_alpha(max01, half_map, unit, unit, 100)
    assert est.alpha_hat == 0.5


def test_alpha_hybrid(hybrid):
    A, B = hybrid.decomposition.sets
    oracle = ratio_oracle(hybrid.space.rule, hybrid.map, sample(A, 100), sample(B, 100))
    est = estimate_alpha(hybrid.space, hybrid.map, A, B, 100)
    assert oracle == 0.5
    assert est.alpha_hat == 0.5
    assert est.witness[1] == 1.0
    assert est.alpha_hat <= hybrid.claimed_alpha


def test_alpha_counterexample(counter):
    A, B = counter.decomposition.sets
    oracle = ratio_oracle(counter.space.rule, counter.map, sample(A, 100), sample(B, 100))
    est = estimate_alpha(counter.space, counter.map, A, B, 100)
    assert oracle == est.alpha_hat == 1.0
    assert est.witness[1] == 1.5


def test_alpha_infinite_when_distinct_images_of_zero_distance(unit):
    space = CATALOG["hybrid-unit"]().space
    jump = PiecewiseMap(
        (Piece(SetDescriptor.interval(0, 0.5, True, False), Affine.constant(0.0)),
         Piece(SetDescriptor.interval(0.5, 1), Affine.constant(0.9)))
    )
    A = SetDescriptor.of_points(0.5)
    B = SetDescriptor.of_points(0.5 - 1e-12)
    assert estimate_alpha(space, jump, A, B, 1).alpha_hat == math.inf


def test_alpha_k3():
    e = make_k3_demo()
    assert estimate_alpha_cyclic(e.space, e.map, e.decomposition, 100).alpha_hat == 0.25


# verify_partial_cyclic


def test_pc2_counterexample(counter):
    A, B = counter.decomposition.sets
    cert = verify_partial_cyclic(counter.space, counter.map, A, B, 0.9, 100)
    assert cert.holds
    assert cert.margin == 0.0 and cert.witness[1] == 1.5


def test_pc2_half_map(max01, unit, half_map):
    assert verify_partial_cyclic(max01, half_map, unit, unit, 0.5, 50).holds


def test_pc2_hybrid(hybrid):
    A, B = hybrid.decomposition.sets
    assert verify_partial_cyclic(hybrid.space, hybrid.map, A, B, 0.75, 100).holds


def test_pc2_alpha_range(max01, unit, half_map):
    for bad in (0, 1, -0.5, 1.5):
        with pytest.raises(ArgumentError):
            verify_partial_cyclic(max01, half_map, unit, unit, bad, 5)


# verify_orbital


def test_orbital_hybrid(hybrid):
    cert = verify_orbital(hybrid.space, hybrid.map, sample(hybrid.region, 100), 0.75)
    assert cert.holds and cert.margin >= 0
    # x < 1 gives lhs = p(1/2, 1/2) = 0; x = 1 gives p(0, 1/2) = 1/2 against 0.75 * p(1, 0)
    one = verify_orbital(hybrid.space, hybrid.map, [1.0], 0.75)
    assert one.holds and one.lhs == 0.5 and one.rhs == 0.75


def test_orbital_half_map(max01, unit, half_map):
    assert verify_orbital(max01, half_map, sample(unit, 50), 0.5).holds


def test_orbital_counterexample(counter):
    cert = verify_orbital(counter.space, counter.map, sample(counter.region, 100), 0.9)
    assert not cert.holds
    assert cert.margin == pytest.approx(-0.15)
    only = verify_orbital(counter.space, counter.map, [1.5], 0.9)
    assert only.witness == (1.5,) and only.lhs == 1.5 and only.rhs == pytest.approx(1.35)


# verify_strict


def test_strict_half_map(max01, unit, half_map):
    cert = verify_strict(max01, half_map, CyclicDecomposition((unit, unit)), 50)
    assert cert.holds and cert.skipped == 2  # (0, 0) in both orders


def test_strict_rejects_identity(max01, unit, identity):
    cert = verify_strict(max01, identity, CyclicDecomposition((unit, unit)), 50)
    assert not cert.holds and cert.margin == 0


def test_strict_counterexample(counter):
    cert = verify_strict(counter.space, counter.map, counter.decomposition, 100)
    assert not cert.holds
    assert cert.witness[1] == 1.5 and cert.lhs == cert.rhs == 1.5


# glue_pair


def test_glue_reproduces_hybrid_map(hybrid):
    A, B = hybrid.decomposition.sets
    f = PiecewiseMap.single(Affine.constant(0.5), A, "f")
    g = PiecewiseMap(
        (Piece(SetDescriptor.interval(0.5, 1, True, False), Affine.constant(0.5)),
         Piece(SetDescriptor.of_points(1), Affine.constant(0.0))),
        "g",
    )
    T = glue_pair(f, g, A, B, 50)
    pts = sample(hybrid.region, 200)
    T.check_total(pts)
    assert all(T(x) == hybrid.map(x) for x in pts)


def test_glue_identity():
    A, B = SetDescriptor.interval(0, 0.6), SetDescriptor.interval(0.4, 1)
    ident = lambda S: PiecewiseMap.single(Affine(1, 0), S)  # noqa: E731
    T = glue_pair(ident(A), ident(B), A, B, 20)
    assert all(T(x) == x for x in sample(A.union(B), 50))


def test_glue_disagreement(hybrid):
    A, B = hybrid.decomposition.sets
    with pytest.raises(GluingError) as err:
        glue_pair(PiecewiseMap.single(Affine.constant(0), A), PiecewiseMap.single(Affine.constant(1), B), A, B, 10)
    assert err.value.x == 0.5


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-1, 1), b=st.floats(0, 1), c=st.floats(-1, 1), split=st.floats(0.2, 0.8))
def test_glue_restrictions(a, b, c, split):
    A, B = SetDescriptor.interval(0, split), SetDescriptor.interval(split, 1)
    f = PiecewiseMap.single(Affine(a, b), A)
    g = PiecewiseMap.single(Affine(c, a * split + b - c * split), B)  # agrees with f at split
    T = glue_pair(f, g, A, B, 30)
    for x in sample(A, 30):
        assert T(x) == f(x)
    for x in sample(B.subtract(A), 30):
        assert T(x) == g(x)


# compute_Xp


def test_Xp_examples(max_inf, hybrid):
    r = compute_Xp(max_inf, [0, 0.5, 1])
    assert r.rho_p == 0 and r.Xp == (0.0,)
    r = compute_Xp(hybrid.space, [0, 0.5, 0.9])
    assert r.rho_p == 0 and r.Xp == (0.0, 0.5, 0.9)
    r = compute_Xp(max_inf, [0.7])
    assert r.rho_p == 0.7 and r.Xp == (0.7,)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_rho_below_every_self_distance(name):
    e = CATALOG[name]()
    pts = e.default_sample(30)
    r = compute_Xp(e.space, pts)
    assert all(r.rho_p <= e.space.rule(x, x) for x in pts)
    assert r.Xp


# cross-condition properties


@pytest.mark.parametrize("name", sorted(CATALOG))
@settings(max_examples=10, deadline=None)
@given(t=st.floats(0, 0.999))
def test_c2_implies_pc2_and_strict(name, t):
    e = CATALOG[name]()
    est = estimate_alpha_cyclic(e.space, e.map, e.decomposition, 30)
    if not est.alpha_hat < 1:
        return
    alpha = max(est.alpha_hat + t * (1 - est.alpha_hat), 1e-6)
    if alpha >= 1:
        return
    c2 = verify_contraction(e.space, e.map, e.decomposition, alpha, 30)
    assert c2.holds
    for A, B in ((s, e.decomposition.successor(i)) for i, s in enumerate(e.decomposition.sets)):
        assert verify_partial_cyclic(e.space, e.map, A, B, alpha, 30).holds
    assert verify_strict(e.space, e.map, e.decomposition, 30).holds


@settings(max_examples=25, deadline=None)
@given(a1=st.floats(0.01, 0.98), gap=st.floats(0.001, 0.5))
def test_c2_monotone_in_alpha(a1, gap):
    a2 = min(a1 + gap, 0.999)
    for name in sorted(CATALOG):
        e = CATALOG[name]()
        if verify_contraction(e.space, e.map, e.decomposition, a1, 20).holds:
            assert verify_contraction(e.space, e.map, e.decomposition, a2, 20).holds


def test_certificate_record_is_json(counter):
    cert = verify_strict(counter.space, counter.map, counter.decomposition, 10)
    rec = json.loads(json.dumps(cert.to_record()))
    assert rec["condition"] == "STRICT" and rec["holds"] is False
    assert rec["density"] == 10 and rec["skipped"] == 0
    assert set(rec) >= {"condition", "holds", "alpha_used", "witness", "lhs", "rhs", "margin", "density", "skipped"}


def test_scan_order_does_not_change_witness(counter):
    A, B = counter.decomposition.sets
    c1 = verify_strict(counter.space, counter.map, CyclicDecomposition((A, B)), 20)
    c2 = verify_strict(counter.space, counter.map, CyclicDecomposition((B, A)), 20)
    assert c1.witness == c2.witness and c1.margin == c2.margin
