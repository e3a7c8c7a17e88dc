"""Partial metrics on real domains.

A partial metric ``p`` may give a point a nonzero self-distance ``p(x, x)``.
The induced metric ``2 p(x, y) - p(x, x) - p(y, y)`` is an ordinary metric
whenever ``p`` satisfies the four partial-metric axioms:

    P1  p(x, y) = p(y, x)
    P2  p(x, x) = p(x, y) = p(y, y)  implies  x = y
    P3  p(x, x) <= p(x, y)
    P4  p(x, z) + p(y, y) <= p(x, y) + p(y, z)

Everything here works on finite samples and finite sequence prefixes, so the
predicates report "consistent with" verdicts rather than proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ArgumentError, DomainError
from .sets import TOL_EQ, SetDescriptor

Rule = Callable[[float, float], float]

KINDS = ("max", "hybrid-unit", "abs", "custom-piecewise")


def _max_rule(x: float, y: float) -> float:
    return x if x >= y else y


def _abs_rule(x: float, y: float) -> float:
    return abs(x - y)


def _hybrid_unit_rule(x: float, y: float) -> float:
    # |x - y| only when both points lie in [0, 1); 1 itself takes the max branch
    if 0.0 <= x < 1.0 and 0.0 <= y < 1.0:
        return abs(x - y)
    return _max_rule(x, y)


BUILTIN_RULES: dict[str, Rule] = {
    "max": _max_rule,
    "abs": _abs_rule,
    "hybrid-unit": _hybrid_unit_rule,
}


@dataclass(frozen=True)
class PartialMetricDescriptor:
    name: str
    domain: SetDescriptor
    kind: str
    rule: Rule = field(compare=False, repr=False)
    source: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ArgumentError(f"unknown partial metric kind {self.kind!r}")

    @classmethod
    def builtin(cls, kind: str, domain: SetDescriptor, name: str | None = None) -> PartialMetricDescriptor:
        if kind not in BUILTIN_RULES:
            raise ArgumentError(f"no built-in rule named {kind!r}")
        return cls(name or kind, domain, kind, BUILTIN_RULES[kind])

    def __call__(self, x: float, y: float) -> float:
        return eval_p(self, x, y)

    def matrix(self, xs: Sequence[float], ys: Sequence[float] | None = None) -> np.ndarray:
        """``M[i, j] = p(xs[i], ys[j])``, checking domain membership once per point."""
        ys = xs if ys is None else ys
        for name, pts in (("x", xs), ("y", ys)):
            for v in pts:
                self.require(v, name)
        return np.array([[float(self.rule(a, b)) for b in ys] for a in xs], dtype=float).reshape(
            len(xs), len(ys)
        )

    def require(self, v: float, name: str = "x") -> None:
        if not self.domain.contains(v):
            raise DomainError(name, v, self.name)


def eval_p(space: PartialMetricDescriptor, x: float, y: float) -> float:
    space.require(x, "x")
    space.require(y, "y")
    return float(space.rule(x, y))


def induced_metric(space: PartialMetricDescriptor, x: float, y: float) -> float:
    return 2.0 * eval_p(space, x, y) - eval_p(space, x, x) - eval_p(space, y, y)


def ball_contains(space: PartialMetricDescriptor, center: float, eps: float, y: float) -> bool:
    """True iff ``y`` is in the open ball ``{y : p(c, y) < p(c, c) + eps}``."""
    if not eps > 0:
        raise ArgumentError(f"ball radius must be positive, got {eps!r}")
    return eval_p(space, center, y) < eval_p(space, center, center) + eps


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple[float, ...]
    lhs: float
    rhs: float

    @property
    def excess(self) -> float:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class AxiomReport:
    violations: tuple[Violation, ...]
    sample_size: int
    tol: float

    @property
    def passed(self) -> bool:
        return not self.violations

    def by_axiom(self, axiom: str) -> list[Violation]:
        return [v for v in self.violations if v.axiom == axiom]


def _collect(axiom: str, mask: np.ndarray, lhs: np.ndarray, rhs: np.ndarray, pts: np.ndarray) -> list[Violation]:
    out = []
    for idx in np.argwhere(mask):
        idx = tuple(int(i) for i in idx)
        out.append(Violation(axiom, tuple(float(pts[i]) for i in idx), float(lhs[idx]), float(rhs[idx])))
    # worst first, ties in lexicographic witness order
    out.sort(key=lambda v: (-(v.lhs - v.rhs), v.witness))
    return out


def check_axioms(space: PartialMetricDescriptor, sample: Sequence[float], tol: float = 1e-12) -> AxiomReport:
    """Exhaustively check P1-P4 over every pair and ordered triple of ``sample``.

    P2 is checked in contrapositive form: a pair whose three distances agree
    within ``tol`` must consist of points at most ``tol`` apart.
    """
    if len(sample) == 0:
        raise ArgumentError("axiom check needs a nonempty sample")
    pts = np.asarray(sorted(set(float(s) for s in sample)))
    P = space.matrix(list(pts))
    d = np.diag(P)
    n = len(pts)
    violations: list[Violation] = []

    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    violations += _collect("P1", upper & (np.abs(P - P.T) > tol), P, P.T, pts)

    selfx = np.broadcast_to(d[:, None], (n, n))
    selfy = np.broadcast_to(d[None, :], (n, n))
    same = (np.abs(selfx - P) <= tol) & (np.abs(selfy - P) <= tol)
    apart = np.abs(pts[:, None] - pts[None, :]) > tol
    # for P2 report lhs = |x - y|, rhs = tol
    gap = np.abs(pts[:, None] - pts[None, :])
    violations += _collect("P2", upper & same & apart, gap, np.full((n, n), tol), pts)

    violations += _collect("P3", selfx - P > tol, selfx, P, pts)

    lhs4 = P[:, None, :] + d[None, :, None]  # p(x,z) + p(y,y), indexed [x, y, z]
    rhs4 = P[:, :, None] + P[None, :, :]  # p(x,y) + p(y,z)
    violations += _collect("P4", lhs4 - rhs4 > tol, lhs4, rhs4, pts)

    return AxiomReport(tuple(violations), n, tol)


@dataclass(frozen=True)
class SequenceVerdict:
    kind: str  # converges | cauchy | zero-cauchy
    holds: bool
    residual: float
    prefix_length: int
    limit: float | None = None
    metric: str = "p"


@dataclass(frozen=True)
class CauchyReport:
    p: SequenceVerdict
    ps: SequenceVerdict
    zero: SequenceVerdict

    @property
    def agree(self) -> bool:
        return self.p.holds == self.ps.holds


def tail_window(n: int, fraction: float = 0.25, minimum: int = 1) -> int:
    return min(n, max(minimum, int(math.ceil(n * fraction))))


def check_convergence(
    space: PartialMetricDescriptor,
    prefix: Sequence[float],
    limit: float,
    tol: float,
    window: int | None = None,
) -> SequenceVerdict:
    """Is ``p(limit, x_n) -> p(limit, limit)`` consistent with the tail of ``prefix``?

    The residual is the mean of ``|p(limit, limit) - p(limit, x_n)|`` over the
    last ``window`` terms (default: the last quarter).
    """
    if len(prefix) < 2:
        raise ArgumentError("convergence check needs a prefix of length >= 2")
    w = window or tail_window(len(prefix))
    ll = eval_p(space, limit, limit)
    tail = prefix[-w:]
    residual = float(np.mean([abs(ll - eval_p(space, limit, x)) for x in tail]))
    return SequenceVerdict("converges", residual <= tol, residual, len(prefix), limit)


def check_cauchy_dual(
    space: PartialMetricDescriptor,
    prefix: Sequence[float],
    tol: float,
    window: int | None = None,
) -> CauchyReport:
    """Cauchy verdicts under ``p`` and under the induced metric on the same tail.

    Under ``p`` the tail pair values must cluster around some limit ``L``; the
    best ``L`` for the max deviation is the midpoint of their range.  The
    zero-Cauchy verdict forces ``L = 0``.  Under the induced metric the tail
    pair values must all be small.
    """
    if len(prefix) < 4:
        raise ArgumentError("Cauchy check needs a prefix of length >= 4")
    w = window or tail_window(len(prefix), minimum=2)
    tail = list(prefix[-w:])
    P = space.matrix(tail)
    d = np.diag(P)
    PS = 2 * P - d[:, None] - d[None, :]
    lo, hi = float(P.min()), float(P.max())
    L = (lo + hi) / 2
    r_p = (hi - lo) / 2
    r_zero = float(np.abs(P).max())
    r_ps = float(PS.max())
    n = len(prefix)
    return CauchyReport(
        SequenceVerdict("cauchy", r_p <= tol, r_p, n, L, "p"),
        SequenceVerdict("cauchy", r_ps <= tol, r_ps, n, 0.0, "ps"),
        SequenceVerdict("zero-cauchy", r_zero <= tol, r_zero, n, 0.0, "p"),
    )


def tail_residual(values: Sequence[float], target: float, window: int | None = None) -> float:
    """Mean ``|v - target|`` over the tail of ``values``."""
    w = window or tail_window(len(values))
    return float(np.mean([abs(v - target) for v in values[-w:]]))


def points_equal(x: float, y: float, tol: float = TOL_EQ) -> bool:
    return abs(x - y) <= tol
