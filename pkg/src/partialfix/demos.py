"""Scripted scenarios reproducing the worked examples end to end."""

from __future__ import annotations

from dataclasses import dataclass, field

from .contraction import (
    estimate_alpha,
    estimate_alpha_cyclic,
    verify_contraction,
    verify_inclusions,
    verify_partial_cyclic,
    verify_strict,
)
from .core import PartialMetricDescriptor
from .sets import sampled_intersection
from .solver import CONVERGED, CYCLE, SolverConfig, set_distance, solve_cyclic
from .spaces import make_counterexample, make_hybrid_unit, make_k3_demo


@dataclass
class Check:
    claim: str
    observed: str
    ok: bool


@dataclass
class DemoReport:
    name: str
    title: str
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def check(self, claim: str, observed: str, ok: bool) -> None:
        self.checks.append(Check(claim, observed, bool(ok)))

    def render(self) -> str:
        lines = [f"== {self.name}: {self.title}"]
        for c in self.checks:
            lines.append(f"[{'ok' if c.ok else 'FAIL'}] {c.claim}")
            lines.append(f"       observed: {c.observed}")
        for n in self.notes:
            lines.append(f"note: {n}")
        lines.append(f"reproduced: {'yes' if self.ok else 'no'}")
        return "\n".join(lines)

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "title": self.title,
            "reproduced": self.ok,
            "checks": [c.__dict__ for c in self.checks],
            "notes": self.notes,
        }


def example_hybrid(density: int = 100) -> DemoReport:
    e = make_hybrid_unit()
    A, B = e.decomposition.sets
    rep = DemoReport("example-2.4", "cyclic contraction on a partial metric that is not one under |x-y|")
    cert = verify_contraction(e.space, e.map, e.decomposition, e.claimed_alpha, density)
    rep.check(
        f"T is a cyclical contraction with alpha = {e.claimed_alpha}",
        cert.render(),
        cert.holds,
    )
    est = estimate_alpha(e.space, e.map, A, B, density)
    rep.check("best sampled contraction constant is at most the claimed alpha",
              f"alpha_hat={est.alpha_hat!r} at {est.witness}", est.alpha_hat <= e.claimed_alpha)
    abs_space = PartialMetricDescriptor.builtin("abs", e.space.domain, "abs")
    plain = verify_contraction(abs_space, e.map, e.decomposition, e.claimed_alpha, density)
    rep.check(
        "the same map fails the cyclic contraction inequality under the plain metric |x-y|",
        plain.render(),
        not plain.holds,
    )
    res = solve_cyclic(e.space, e.map, e.decomposition, 1.0, SolverConfig())
    rep.check(
        "the fixed point is unique and lies in A n B = {1/2}",
        f"status={res.status} u={res.u!r} p(u,u)={res.p_uu!r} membership={res.membership}",
        res.status == CONVERGED and res.u == 0.5 and res.p_uu == 0 and res.in_all_sets,
    )
    return rep


def example_counter(density: int = 100) -> DemoReport:
    e = make_counterexample()
    A, B = e.decomposition.sets
    rep = DemoReport("example-2.5", "a partial cyclical contraction with no fixed point")
    alphas = (0.1, 0.5, 0.9, 0.99)
    certs = [verify_partial_cyclic(e.space, e.map, A, B, a, density) for a in alphas]
    rep.check(
        "PC2 holds for every alpha in (0,1) (checked at " + ", ".join(map(str, alphas)) + ")",
        "; ".join(f"alpha={c.alpha_used}: holds={c.holds} margin={c.margin!r}" for c in certs),
        all(c.holds for c in certs),
    )
    inc = verify_inclusions(e.map, e.decomposition, density)
    rep.check("T(A) in B and T(B) in A", inc.render(), inc.holds)
    res = solve_cyclic(e.space, e.map, e.decomposition, 0.0, SolverConfig())
    rep.check(
        "the Picard orbit from 0 never converges: it cycles between 3/2 and 1/2",
        f"status={res.status} period={res.period} orbit={list(res.orbit)}",
        res.status == CYCLE and res.period == 2 and sorted(res.orbit) == [0.5, 1.5],
    )
    empties = {d: sampled_intersection([A, B], d) for d in (2, 10, 50, density)}
    rep.check(
        "A n B is empty",
        ", ".join(f"density {d}: {pts}" for d, pts in empties.items()),
        all(not pts for pts in empties.values()),
    )
    est = estimate_alpha(e.space, e.map, A, B, density)
    rep.check(
        "T is not a C2 cyclical contraction (best sampled ratio reaches 1)",
        f"alpha_hat={est.alpha_hat!r} at {est.witness}",
        est.alpha_hat >= 1.0,
    )
    rep.notes.extend(e.map.notes)
    return rep


def edelstein_delta(density: int = 100) -> DemoReport:
    rep = DemoReport("edelstein-delta", "set distance between consecutive sets and the strict condition")
    e = make_counterexample()
    A, B = e.decomposition.sets
    d = set_distance(e.space, A, B, density)
    rep.check("delta(A,B) for the disjoint pair is 3/2 > 0", f"delta={d.delta!r} at {d.witness}", d.delta == 1.5)
    strict = verify_strict(e.space, e.map, e.decomposition, density)
    rep.check("the strict condition fails for this map, so no fixed point is forced", strict.render(), not strict.holds)
    flagged = [n for n, s in zip(e.decomposition.names, e.decomposition.sets) if "zero-compact" in s.flags]
    rep.check("neither set is declared 0-compact", f"zero-compact sets: {flagged}", not flagged)
    h = make_hybrid_unit()
    hA, hB = h.decomposition.sets
    hd = set_distance(h.space, hA, hB, density)
    rep.check("delta(A,B) for the overlapping pair is 0", f"delta={hd.delta!r} at {hd.witness}", hd.delta == 0.0)
    return rep


def k3_cycle(density: int = 100) -> DemoReport:
    e = make_k3_demo()
    rep = DemoReport("k3-cycle", "cyclic contraction over three sets")
    inc = verify_inclusions(e.map, e.decomposition, density)
    rep.check("T(A_i) in A_{i+1} for i = 1, 2, 3", inc.render(), inc.holds)
    est = estimate_alpha_cyclic(e.space, e.map, e.decomposition, density)
    rep.check("C2 holds with alpha = 1/4", f"alpha_hat={est.alpha_hat!r} at {est.witness}", abs(est.alpha_hat - 0.25) <= 1e-9)
    res = solve_cyclic(e.space, e.map, e.decomposition, 1.0, SolverConfig())
    rep.check(
        "the unique fixed point 0 lies in every A_i",
        f"status={res.status} u={res.u!r} membership={res.membership}",
        res.status == CONVERGED and abs(res.u) <= 1e-9 and res.in_all_sets,
    )
    return rep


DEMOS = {
    "example-2.4": example_hybrid,
    "example-2.5": example_counter,
    "edelstein-delta": edelstein_delta,
    "k3-cycle": k3_cycle,
}
