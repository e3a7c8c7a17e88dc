"""Picard iteration with convergence, cycle and exhaustion verdicts."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import PartialMetricDescriptor
from .errors import ArgumentError, DomainError, DomainEscapeError, InsufficientDataError
from .sets import TOL_EQ, PiecewiseMap, SetDescriptor, sample
from .spaces import CyclicDecomposition

CONVERGED = "converged"
CYCLE = "cycle"
EXHAUSTED = "exhausted"

TRACE_COLUMNS = ("n", "x_n", "p_step", "ps_step", "self_dist")


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-9
    max_iter: int = 10000
    cycle_window: int = 16
    tol_eq: float = TOL_EQ
    stall_count: int = 3

    def __post_init__(self):
        if not self.tol > 0:
            raise ArgumentError("tol must be positive")
        if self.max_iter < 1:
            raise ArgumentError("max_iter must be >= 1")
        if self.cycle_window < 2:
            raise ArgumentError("cycle_window must be >= 2")
        if not self.tol_eq > 0:
            raise ArgumentError("tol_eq must be positive")
        if self.stall_count < 1:
            raise ArgumentError("stall_count must be >= 1")


@dataclass
class OrbitTrace:
    iterates: list[float] = field(default_factory=list)
    p_step: list[float] = field(default_factory=list)
    ps_step: list[float] = field(default_factory=list)
    self_dist: list[float] = field(default_factory=list)

    def rows(self):
        for n, x in enumerate(self.iterates):
            if n < len(self.p_step):
                yield n, x, self.p_step[n], self.ps_step[n], self.self_dist[n]
            else:
                yield n, x, None, None, self.self_dist[n]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for row in self.rows():
            w.writerow(["" if v is None else repr(v) for v in row])
        return buf.getvalue()

    def to_record(self) -> list[dict]:
        return [dict(zip(TRACE_COLUMNS, row)) for row in self.rows()]


def read_trace_csv(text: str) -> OrbitTrace:
    trace = OrbitTrace()
    for row in csv.DictReader(io.StringIO(text)):
        trace.iterates.append(float(row["x_n"]))
        trace.self_dist.append(float(row["self_dist"]))
        if row["p_step"] != "":
            trace.p_step.append(float(row["p_step"]))
            trace.ps_step.append(float(row["ps_step"]))
    return trace


@dataclass
class SolveResult:
    status: str
    trace: OrbitTrace
    u: float | None = None
    p_uu: float | None = None
    orbital_residual: float | None = None
    period: int | None = None
    orbit: tuple[float, ...] = ()
    membership: list[bool] | None = None

    @property
    def iterations(self) -> int:
        return len(self.trace.iterates) - 1

    @property
    def in_all_sets(self) -> bool | None:
        return None if self.membership is None else all(self.membership)

    def to_record(self) -> dict:
        rec = {"status": self.status, "iterations": self.iterations}
        if self.status == CONVERGED:
            rec.update(u=self.u, p_uu=self.p_uu, orbital_residual=self.orbital_residual)
        elif self.status == CYCLE:
            rec.update(period=self.period, orbit=list(self.orbit))
        if self.membership is not None:
            rec.update(membership=self.membership, in_all_sets=self.in_all_sets)
        return rec


def _find_cycle(xs: list[float], window: int, tol_eq: float) -> int | None:
    """Smallest period ``q >= 2`` such that the last ``2q`` iterates are q-periodic."""
    n = len(xs) - 1
    if abs(xs[n] - xs[n - 1]) <= tol_eq:
        return None
    for q in range(2, window + 1):
        if 2 * q > n + 1:
            break
        if all(abs(xs[n - j] - xs[n - j - q]) <= tol_eq for j in range(q)):
            return q
    return None


def picard(
    space: PartialMetricDescriptor,
    T: PiecewiseMap,
    x0: float,
    config: SolverConfig | None = None,
) -> SolveResult:
    """Iterate ``x_{n+1} = T(x_n)`` from ``x0``.

    Convergence is declared when the induced-metric step falls below
    ``config.tol`` for ``config.stall_count`` consecutive steps.
    """
    cfg = config or SolverConfig()
    if not space.domain.contains(x0):
        raise DomainError("x0", x0, space.name)
    rule = space.rule
    trace = OrbitTrace([float(x0)], [], [], [float(rule(x0, x0))])
    x = float(x0)
    stalled = 0
    for n in range(1, cfg.max_iter + 1):
        try:
            nxt = float(T(x))
        except ValueError:
            raise DomainEscapeError(n, x) from None
        if not space.domain.contains(nxt):
            raise DomainEscapeError(n, nxt)
        pxy = float(rule(x, nxt))
        dxx, dyy = trace.self_dist[-1], float(rule(nxt, nxt))
        ps = 2 * pxy - dxx - dyy
        trace.iterates.append(nxt)
        trace.p_step.append(pxy)
        trace.ps_step.append(ps)
        trace.self_dist.append(dyy)
        x = nxt

        stalled = stalled + 1 if ps < cfg.tol else 0
        if stalled >= cfg.stall_count:
            tu = T(x)
            residual = abs(rule(tu, x) - rule(tu, tu)) if space.domain.contains(tu) else math.nan
            return SolveResult(CONVERGED, trace, u=x, p_uu=dyy, orbital_residual=float(residual))

        q = _find_cycle(trace.iterates, cfg.cycle_window, cfg.tol_eq)
        if q is not None:
            return SolveResult(CYCLE, trace, period=q, orbit=tuple(trace.iterates[-q:]))
    return SolveResult(EXHAUSTED, trace)


def solve_cyclic(
    space: PartialMetricDescriptor,
    T: PiecewiseMap,
    decomp: CyclicDecomposition,
    x0: float,
    config: SolverConfig | None = None,
) -> SolveResult:
    """Picard iteration plus membership of the limit in every set of the decomposition."""
    cfg = config or SolverConfig()
    if not any(A.contains(x0) for A in decomp.sets):
        raise ArgumentError(f"x0={x0!r} lies in none of the decomposition sets")
    result = picard(space, T, x0, cfg)
    if result.status == CONVERGED:
        result.membership = [A.contains(result.u, slack=cfg.tol_eq) for A in decomp.sets]
    return result


@dataclass(frozen=True)
class RateFit:
    rate: float
    r_squared: float
    steps: int


def rate_fit(trace: OrbitTrace, tol_eq: float = TOL_EQ) -> RateFit:
    """Geometric rate of the induced-metric steps.

    Fits ``log(ps_step)`` against ``n`` by least squares over the first run of
    consecutive steps above ``tol_eq``; the rate is ``exp(slope)``.
    """
    run: list[tuple[int, float]] = []
    for n, s in enumerate(trace.ps_step):
        if s > tol_eq:
            run.append((n, s))
        elif run:
            break
    if len(run) < 4:
        raise InsufficientDataError(f"rate fit needs >= 4 steps above {tol_eq}, got {len(run)}")
    n = np.array([r[0] for r in run], dtype=float)
    y = np.log([r[1] for r in run])
    slope, intercept = np.polyfit(n, y, 1)
    resid = y - (slope * n + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return RateFit(float(np.exp(slope)), r2, len(run))


@dataclass(frozen=True)
class SetDistance:
    delta: float
    witness: tuple[float, float]


def set_distance(space: PartialMetricDescriptor, A: SetDescriptor, B: SetDescriptor, density: int) -> SetDistance:
    """``inf p(x, y)`` over sampled ``x in A``, ``y in B``."""
    xs, ys = sample(A, density), sample(B, density)
    if not xs or not ys:
        raise ArgumentError("set distance needs nonempty samples")
    P = space.matrix(xs, ys)
    # argmin returns the first minimum in row-major order, i.e. lexicographic
    i, j = np.unravel_index(int(np.argmin(P)), P.shape)
    return SetDistance(float(P[i, j]), (xs[i], ys[j]))


def uniqueness_probe(
    space: PartialMetricDescriptor,
    T: PiecewiseMap,
    starts: Sequence[float],
    config: SolverConfig | None = None,
    workers: int = 4,
) -> list[SolveResult]:
    """Run independent orbits from each start; results come back in input order."""
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda x0: picard(space, T, x0, config), starts))
