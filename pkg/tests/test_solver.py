import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partialfix.contraction import estimate_alpha_cyclic, verify_contraction
from partialfix.errors import ArgumentError, DomainError, DomainEscapeError, InsufficientDataError
from partialfix.sets import Affine, PiecewiseMap, SetDescriptor
from partialfix.solver import (
    CONVERGED,
    CYCLE,
    EXHAUSTED,
    OrbitTrace,
    SolverConfig,
    picard,
    rate_fit,
    read_trace_csv,
    set_distance,
    solve_cyclic,
    uniqueness_probe,
)
from partialfix.spaces import CATALOG, CyclicDecomposition, make_k3_demo, make_max_space, make_rationals_max


def hand_orbit(T, x0, n):
    xs = [x0]
    for _ in range(n):
        xs.append(T(xs[-1]))
    return xs


@pytest.fixture
def max_half():
    X = SetDescriptor.interval(0, 1)
    return make_max_space(X), PiecewiseMap.single(Affine(0.5, 0), X)


def test_config_validation():
    for bad in ({"tol": 0}, {"max_iter": 0}, {"cycle_window": 1}, {"tol_eq": -1}):
        with pytest.raises(ArgumentError):
            SolverConfig(**bad)


def test_picard_hybrid_from_one(hybrid):
    res = picard(hybrid.space, hybrid.map, 1.0)
    assert hand_orbit(hybrid.map, 1.0, 3) == [1.0, 0.0, 0.5, 0.5]
    assert res.status == CONVERGED
    assert res.trace.iterates[:4] == [1.0, 0.0, 0.5, 0.5]
    assert res.u == 0.5 and res.p_uu == 0.0
    assert res.iterations <= 5
    assert res.orbital_residual == 0.0


def test_picard_counterexample_cycles(counter):
    res = picard(counter.space, counter.map, 0.0)
    assert hand_orbit(counter.map, 0.0, 4) == [0.0, 1.5, 0.5, 1.5, 0.5]
    assert res.status == CYCLE and res.period == 2
    assert res.orbit == (1.5, 0.5)


def test_picard_rationals_half():
    e = make_rationals_max()
    res = picard(e.space, e.map, 1.0)
    assert res.status == CONVERGED
    assert abs(res.u) <= 1e-9 and res.p_uu <= 1e-9
    # x_n = 2^-n exactly
    assert all(x == 2.0**-n for n, x in enumerate(res.trace.iterates))


def test_picard_exhausted(max_half):
    space, T = max_half
    res = picard(space, T, 1.0, SolverConfig(max_iter=5))
    assert res.status == EXHAUSTED and res.iterations == 5


def test_picard_domain_errors():
    X = SetDescriptor.interval(0, 1)
    space = make_max_space(X)
    with pytest.raises(DomainError):
        picard(space, PiecewiseMap.single(Affine(0.5, 0), X), 2.0)
    escape = PiecewiseMap.single(Affine(2.0, 0.0), SetDescriptor.interval(0, math.inf))
    with pytest.raises(DomainEscapeError) as err:
        picard(space, escape, 0.3)
    assert err.value.index == 2  # 0.3 -> 0.6 -> 1.2


def test_picard_longer_cycle():
    X = SetDescriptor.interval(0, 3)
    space = make_max_space(X)
    pieces = PiecewiseMap.single(Affine(1, 1), SetDescriptor.interval(0, 2, True, False))
    wrap = PiecewiseMap(pieces.pieces + PiecewiseMap.single(Affine.constant(0), SetDescriptor.interval(2, 3)).pieces)
    res = picard(space, wrap, 0.0)
    assert res.status == CYCLE and res.period == 3
    for x in res.orbit:
        y = x
        for _ in range(res.period):
            y = wrap(y)
        assert abs(y - x) <= 1e-9


def test_solve_cyclic_hybrid(hybrid):
    for x0 in (0.0, 0.3, 1.0):
        res = solve_cyclic(hybrid.space, hybrid.map, hybrid.decomposition, x0)
        assert res.status == CONVERGED and res.u == 0.5
        assert res.membership == [True, True] and res.in_all_sets


def test_solve_cyclic_counterexample(counter):
    res = solve_cyclic(counter.space, counter.map, counter.decomposition, 0.0)
    assert res.status == CYCLE and res.period == 2 and res.membership is None


def test_solve_cyclic_k3():
    e = make_k3_demo()
    res = solve_cyclic(e.space, e.map, e.decomposition, 1.0)
    assert res.status == CONVERGED and abs(res.u) <= 1e-9
    assert res.membership == [True, True, True]


def test_solve_cyclic_start_outside_sets(hybrid):
    with pytest.raises(ArgumentError):
        solve_cyclic(hybrid.space, hybrid.map, CyclicDecomposition((SetDescriptor.interval(0, 0.2),)), 0.5)


@pytest.mark.parametrize("factor", [0.5, 0.25])
def test_rate_fit(factor):
    X = SetDescriptor.interval(0, 1)
    res = picard(make_max_space(X), PiecewiseMap.single(Affine(factor, 0), X), 1.0)
    # oracle: ps_step = (1 - factor) * factor^n exactly
    assert res.trace.ps_step[:5] == [(1 - factor) * factor**n for n in range(5)]
    fit = rate_fit(res.trace)
    assert fit.rate == pytest.approx(factor, abs=0.05)
    assert fit.r_squared > 0.999


def test_rate_fit_insufficient():
    trace = OrbitTrace([0.5] * 6, [0.0] * 5, [0.0] * 5, [0.0] * 6)
    with pytest.raises(InsufficientDataError):
        rate_fit(trace)


def test_set_distance_examples(counter, hybrid):
    A, B = counter.decomposition.sets
    d = set_distance(counter.space, A, B, 100)
    assert d.delta == 1.5 and d.witness[1] == 1.5
    hA, hB = hybrid.decomposition.sets
    h = set_distance(hybrid.space, hA, hB, 100)
    assert h.delta == 0.0 and h.witness == (0.5, 0.5)
    same = set_distance(counter.space, A, A, 20)
    assert same.delta == min(counter.space.rule(x, x) for x in A.sample(20))


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_set_distance_symmetric(name):
    e = CATALOG[name]()
    sets = e.decomposition.sets
    assert set_distance(e.space, sets[0], sets[1], 40).delta == set_distance(e.space, sets[1], sets[0], 40).delta


def test_trace_csv_round_trip(max_half):
    space, T = max_half
    res = picard(space, T, 1 / 3)
    text = res.trace.to_csv()
    assert text.splitlines()[0] == "n,x_n,p_step,ps_step,self_dist"
    back = read_trace_csv(text)
    assert back.iterates == res.trace.iterates
    assert back.ps_step == res.trace.ps_step
    assert back.p_step == res.trace.p_step
    assert back.self_dist == res.trace.self_dist


def c2_certified():
    out = []
    for name in sorted(CATALOG):
        e = CATALOG[name]()
        est = estimate_alpha_cyclic(e.space, e.map, e.decomposition, 50)
        if est.alpha_hat < 1:
            out.append((name, est.alpha_hat))
    return out


def test_certified_catalog():
    assert [n for n, _ in c2_certified()] == ["hybrid-unit", "max", "rationals-max"]


@pytest.mark.parametrize("name, alpha_hat", c2_certified())
def test_converged_limits_satisfy_fixed_point_conditions(name, alpha_hat):
    e = CATALOG[name]()
    cfg = SolverConfig()
    for res in uniqueness_probe(e.space, e.map, e.default_sample(25), cfg):
        assert res.status == CONVERGED
        assert res.p_uu <= cfg.tol
        assert res.orbital_residual <= cfg.tol


@pytest.mark.parametrize("name, alpha_hat", c2_certified())
def test_step_bound_along_orbits(name, alpha_hat):
    """p(x_{n+1}, x_{n+2}) <= alpha_hat * p(x_n, x_{n+1}) along orbits of certified maps."""
    e = CATALOG[name]()
    for x0 in e.default_sample(15):
        steps = picard(e.space, e.map, x0).trace.p_step
        for prev, nxt in zip(steps, steps[1:]):
            assert nxt <= alpha_hat * prev + 4e-9


@pytest.mark.parametrize("name", ["max", "rationals-max"])
def test_induced_step_bound_for_max_maps(name):
    e = CATALOG[name]()
    alpha_hat = estimate_alpha_cyclic(e.space, e.map, e.decomposition, 50).alpha_hat
    for x0 in e.default_sample(15):
        steps = picard(e.space, e.map, x0).trace.ps_step
        for prev, nxt in zip(steps, steps[1:]):
            assert nxt <= alpha_hat * prev + 4e-9


@settings(max_examples=20, deadline=None)
@given(a=st.floats(0.05, 0.95), x0=st.floats(0, 1))
def test_contractions_on_max_space_converge_to_zero_self_distance(a, x0):
    X = SetDescriptor.interval(0, 1)
    space = make_max_space(X)
    T = PiecewiseMap.single(Affine(a, 0.0), X)
    decomp = CyclicDecomposition((X,))
    assert verify_contraction(space, T, decomp, max(a, 0.01), 20).holds
    res = picard(space, T, x0)
    # the run stops once ps_step = (1 - a) * u drops below tol, so u < tol / (1 - a)
    assert res.status == CONVERGED and res.p_uu <= 1e-9 / (1 - a)
