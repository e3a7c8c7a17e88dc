"""Sample-based verification of contraction-type hypotheses.

Every certificate is relative to a grid: ``holds`` means no violation was
found among the sampled points at the recorded density.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .core import PartialMetricDescriptor
from .errors import ArgumentError, GluingError
from .sets import TOL_EQ, Piece, PiecewiseMap, SetDescriptor, sample
from .spaces import CyclicDecomposition

CONDITIONS = ("C1", "C2", "PC2", "ORBITAL", "STRICT", "SELF-PC2", "PAIR")


@dataclass(frozen=True)
class Certificate:
    condition: str
    holds: bool
    alpha_used: float | None
    witness: tuple[float, ...]
    lhs: float
    rhs: float
    margin: float
    density: int | None = None
    checked: int = 0
    skipped: int = 0
    tol: float = TOL_EQ

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["witness"] = list(self.witness)
        return rec

    def render(self) -> str:
        w = ", ".join(repr(v) for v in self.witness)
        alpha = "-" if self.alpha_used is None else repr(self.alpha_used)
        return (
            f"condition={self.condition} holds={self.holds} alpha={alpha} "
            f"witness=({w}) lhs={self.lhs!r} rhs={self.rhs!r} margin={self.margin!r} "
            f"density={self.density} checked={self.checked} skipped={self.skipped}"
        )


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise ArgumentError(f"alpha must lie in (0, 1), got {alpha!r}")


def _images(T: PiecewiseMap, pts: Sequence[float]) -> list[float]:
    T.check_total(pts)
    return [T(x) for x in pts]


@dataclass
class _Worst:
    """Track the minimum-margin case; ties go to the lexicographically smallest witness."""

    key: tuple | None = None
    witness: tuple = ()
    lhs: float = math.nan
    rhs: float = math.nan
    margin: float = math.inf
    checked: int = 0

    def offer(self, witness: tuple, lhs: float, rhs: float) -> None:
        self.checked += 1
        margin = rhs - lhs
        key = (margin, witness)
        if self.key is None or key < self.key:
            self.key, self.witness, self.lhs, self.rhs, self.margin = key, witness, lhs, rhs, margin

    def certificate(self, condition, *, holds, alpha, density, skipped=0, tol=TOL_EQ) -> Certificate:
        return Certificate(
            condition, holds, alpha, tuple(self.witness), float(self.lhs), float(self.rhs),
            float(self.margin), density, self.checked, skipped, tol,
        )


def _cross_scan(
    space: PartialMetricDescriptor,
    T: PiecewiseMap,
    pairs: Sequence[tuple[SetDescriptor, SetDescriptor]],
    density: int,
    bound: Callable[[float, float, float], float],
    worst: _Worst,
    skip: Callable[[float], bool] | None = None,
) -> int:
    """Offer ``(p(Tx,Ty), bound(p(x,y), p(x,x), p(y,y)))`` for every sampled cross pair."""
    skipped = 0
    for A, B in pairs:
        xs, ys = sample(A, density), sample(B, density)
        P = space.matrix(xs, ys)
        dx = [space.rule(x, x) for x in xs]
        dy = [space.rule(y, y) for y in ys]
        Q = space.matrix(_images(T, xs), _images(T, ys))
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                pxy = float(P[i, j])
                if skip is not None and skip(pxy):
                    skipped += 1
                    continue
                worst.offer((x, y), float(Q[i, j]), bound(pxy, dx[i], dy[j]))
    return skipped


def _pairs(decomp: CyclicDecomposition):
    return [(A, B) for _, A, B in decomp.consecutive_pairs()]


def verify_inclusions(T: PiecewiseMap, decomp: CyclicDecomposition, density: int, tol: float = TOL_EQ) -> Certificate:
    """Check ``T(A_i)`` lies in ``A_{i+1}`` on the sample.

    For each sampled ``x`` in ``A_i`` the certificate records
    ``lhs = dist(T(x), A_{i+1})`` against ``rhs = tol``.
    """
    worst = _Worst()
    failure = None
    for _, A, B in decomp.consecutive_pairs():
        xs = sample(A, density)
        for x, tx in zip(xs, _images(T, xs)):
            dist = 0.0 if B.contains(tx, slack=tol) else B.distance(tx)
            worst.offer((x, tx), dist, tol)
            if dist > 0 and failure is None:
                failure = Certificate("C1", False, None, (x, tx), dist, tol, tol - dist, density)
    if failure is not None:
        return replace(failure, checked=worst.checked)
    return worst.certificate("C1", holds=True, alpha=None, density=density, tol=tol)


@dataclass(frozen=True)
class AlphaEstimate:
    alpha_hat: float
    witness: tuple[float, ...]
    density: int
    checked: int

    def to_record(self) -> dict:
        return {"alpha_hat": self.alpha_hat, "witness": list(self.witness), "density": self.density}


def _alpha_over(space, T, pairs, density, tol) -> AlphaEstimate:
    best, best_key, checked = -math.inf, None, 0
    witness: tuple = ()
    for A, B in pairs:
        xs, ys = sample(A, density), sample(B, density)
        P = space.matrix(xs, ys)
        Q = space.matrix(_images(T, xs), _images(T, ys))
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                den, num = float(P[i, j]), float(Q[i, j])
                if den > tol:
                    ratio = num / den
                elif num > tol:
                    ratio = math.inf
                else:
                    continue
                checked += 1
                key = (-ratio, (x, y))
                if best_key is None or key < best_key:
                    best, best_key, witness = ratio, key, (x, y)
    if best_key is None:
        best = 0.0
    return AlphaEstimate(best, witness, density, checked)


def estimate_alpha(
    space: PartialMetricDescriptor,
    T: PiecewiseMap,
    A: SetDescriptor,
    B: SetDescriptor,
    density: int,
    tol: float = TOL_EQ,
) -> AlphaEstimate:
    """Best contraction constant ``sup p(Tx,Ty) / p(x,y)`` over sampled ``x in A, y in B``.

    Pairs with ``p(x,y) <= tol`` are ignored unless ``p(Tx,Ty) > tol``, in
    which case no finite constant works and the estimate is infinite.
    """
    return _alpha_over(space, T, [(A, B)], density, tol)


def estimate_alpha_cyclic(space, T, decomp: CyclicDecomposition, density: int, tol: float = TOL_EQ) -> AlphaEstimate:
    return _alpha_over(space, T, _pairs(decomp), density, tol)


def verify_contraction(
    space: PartialMetricDescriptor,
    T: PiecewiseMap,
    decomp: CyclicDecomposition,
    alpha: float,
    density: int,
    tol: float = TOL_EQ,
) -> Certificate:
    """``p(Tx,Ty) <= alpha p(x,y)`` for sampled ``x in A_i, y in A_{i+1}``."""
    _check_alpha(alpha)
    worst = _Worst()
    _cross_scan(space, T, _pairs(decomp), density, lambda pxy, px, py: alpha * pxy, worst)
    return worst.certificate("C2", holds=worst.margin >= -tol, alpha=alpha, density=density, tol=tol)


def verify_partial_cyclic(
    space: PartialMetricDescriptor,
    T: PiecewiseMap,
    A: SetDescriptor,
    B: SetDescriptor,
    alpha: float,
    density: int,
    tol: float = TOL_EQ,
    condition: str = "PC2",
) -> Certificate:
    """``p(Tx,Ty) <= max{alpha p(x,y), p(x,x), p(y,y)}`` on sampled cross pairs.

    With ``A = B = X`` this is the single-set hypothesis (``SELF-PC2``).
    """
    _check_alpha(alpha)
    worst = _Worst()
    bound = lambda pxy, px, py: max(alpha * pxy, px, py)  # noqa: E731
    _cross_scan(space, T, [(A, B)], density, bound, worst)
    return worst.certificate(condition, holds=worst.margin >= -tol, alpha=alpha, density=density, tol=tol)


def verify_partial_cyclic_decomp(space, T, decomp: CyclicDecomposition, alpha: float, density: int, tol: float = TOL_EQ) -> Certificate:
    _check_alpha(alpha)
    worst = _Worst()
    bound = lambda pxy, px, py: max(alpha * pxy, px, py)  # noqa: E731
    _cross_scan(space, T, _pairs(decomp), density, bound, worst)
    return worst.certificate("PC2", holds=worst.margin >= -tol, alpha=alpha, density=density, tol=tol)


def verify_orbital(
    space: PartialMetricDescriptor,
    T: PiecewiseMap,
    sampleset: Sequence[float],
    alpha: float,
    tol: float = TOL_EQ,
) -> Certificate:
    """``p(Tx, T^2 x) <= alpha p(x, Tx)`` at each sampled ``x``."""
    _check_alpha(alpha)
    pts = sorted(set(float(x) for x in sampleset))
    worst = _Worst()
    for x in pts:
        tx = T(x)
        space.require(tx, "T(x)")
        ttx = T(tx)
        space.require(ttx, "T^2(x)")
        worst.offer((x,), space.rule(tx, ttx), alpha * space.rule(x, tx))
    return worst.certificate("ORBITAL", holds=worst.margin >= -tol, alpha=alpha, density=None, tol=tol)


def verify_strict(
    space: PartialMetricDescriptor,
    T: PiecewiseMap,
    decomp: CyclicDecomposition,
    density: int,
    tol: float = TOL_EQ,
) -> Certificate:
    """``p(Tx,Ty) < p(x,y)`` on sampled cross pairs with ``p(x,y) > tol``.

    Pairs with ``p(x,y) <= tol`` cannot satisfy a strict inequality and are
    skipped; the skip count is kept on the certificate.
    """
    worst = _Worst()
    skipped = _cross_scan(
        space, T, _pairs(decomp), density, lambda pxy, px, py: pxy, worst, skip=lambda pxy: pxy <= tol
    )
    holds = worst.checked > 0 and worst.margin > 0
    return worst.certificate("STRICT", holds=holds, alpha=None, density=density, skipped=skipped, tol=tol)


def glue_pair(
    f: PiecewiseMap,
    g: PiecewiseMap,
    A: SetDescriptor,
    B: SetDescriptor,
    density: int,
    tol: float = TOL_EQ,
) -> PiecewiseMap:
    """Glue ``f`` on ``A`` and ``g`` on ``B`` into one self-map of ``A U B``.

    The overlap ``A n B`` is served by ``f``; ``f`` and ``g`` must agree there
    on the sample, otherwise :class:`GluingError` names the first disagreement.
    """
    overlap = sorted({x for x in sample(A, density) + sample(B, density) if A.contains(x) and B.contains(x)})
    for x in overlap:
        fx, gx = f(x), g(x)
        if abs(fx - gx) > tol:
            raise GluingError(x, fx, gx)
    pieces = []
    for pc in f.pieces:
        guard = pc.guard.intersect(A)
        if not guard.is_empty:
            pieces.append(Piece(guard, pc.rule, pc.note))
    only_b = B.subtract(A)
    for pc in g.pieces:
        guard = pc.guard.intersect(only_b)
        if not guard.is_empty:
            pieces.append(Piece(guard, pc.rule, pc.note))
    return PiecewiseMap(tuple(pieces), f"{f.name}|{g.name}")


@dataclass(frozen=True)
class XpResult:
    rho_p: float
    Xp: tuple[float, ...]


def compute_Xp(space: PartialMetricDescriptor, sampleset: Sequence[float], tol: float = TOL_EQ) -> XpResult:
    """Infimum of ``p`` over sampled pairs and the sampled points whose self-distance attains it."""
    if len(sampleset) == 0:
        raise ArgumentError("compute_Xp needs a nonempty sample")
    pts = sorted(set(float(x) for x in sampleset))
    P = space.matrix(pts)
    rho = float(P.min())
    return XpResult(rho, tuple(x for x, pxx in zip(pts, np.diag(P)) if abs(pxx - rho) <= tol))
