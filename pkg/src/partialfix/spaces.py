"""Catalog of concrete partial metric spaces with their maps and decompositions."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .core import PartialMetricDescriptor
from .errors import ArgumentError
from .sets import (
    CLOSED,
    ZERO_COMPACT,
    Affine,
    Piece,
    PiecewiseMap,
    SetDescriptor,
    sample,
    union_all,
)

__all__ = [
    "CATALOG",
    "CatalogEntry",
    "CyclicDecomposition",
    "get_entry",
    "make_counterexample",
    "make_hybrid_unit",
    "make_k3_demo",
    "make_max",
    "make_max_space",
    "make_rationals_max",
    "sample",
]


@dataclass(frozen=True)
class CyclicDecomposition:
    """Sets ``A_1 .. A_k`` with the wrap-around convention ``A_{k+1} = A_1``."""

    sets: tuple[SetDescriptor, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))
        if len(self.sets) < 1:
            raise ArgumentError("a cyclic decomposition needs at least one set")
        if any(s.is_empty for s in self.sets):
            raise ArgumentError("decomposition sets must be nonempty")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"A{i + 1}" for i in range(len(self.sets))))

    @property
    def k(self) -> int:
        return len(self.sets)

    def successor(self, i: int) -> SetDescriptor:
        return self.sets[(i + 1) % self.k]

    def consecutive_pairs(self):
        """Yield ``(i, A_i, A_{i+1})`` for ``i = 0 .. k-1``."""
        for i, s in enumerate(self.sets):
            yield i, s, self.successor(i)

    @property
    def union(self) -> SetDescriptor:
        return union_all(self.sets)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    space: PartialMetricDescriptor
    region: SetDescriptor  # bounded part of the domain sampled by default
    map: PiecewiseMap | None = None
    decomposition: CyclicDecomposition | None = None
    notes: tuple[str, ...] = ()
    claimed_alpha: float | None = None

    def with_map(self, T: PiecewiseMap, note: str = "") -> CatalogEntry:
        notes = self.notes + ((note,) if note else ())
        return replace(self, map=T, notes=notes)

    def default_sample(self, density: int = 50) -> list[float]:
        return self.region.sample(density)


def make_max_space(domain: SetDescriptor, name: str = "max") -> PartialMetricDescriptor:
    if domain.is_empty:
        raise ArgumentError("max space needs a nonempty domain")
    lows = [iv.lo for iv in domain.intervals] + list(domain.points)
    if min(lows) < 0:
        raise ArgumentError("max partial metric requires a domain inside [0, inf)")
    return PartialMetricDescriptor.builtin("max", domain, name)


def halving_map(domain: SetDescriptor, factor: float = 0.5, name: str = "f") -> PiecewiseMap:
    return PiecewiseMap.single(Affine(factor, 0.0), domain, name)


def make_max() -> CatalogEntry:
    domain = SetDescriptor.interval(0, math.inf, flags={CLOSED})
    region = SetDescriptor.interval(0, 1, flags={CLOSED})
    return CatalogEntry(
        name="max",
        space=make_max_space(domain, "max"),
        region=region,
        map=halving_map(domain),
        decomposition=CyclicDecomposition((region, region), ("X", "X")),
        notes=(
            "p(x,y) = max{x,y} on [0, inf); default sampling region [0, 1]",
            "attached map f(x) = x/2 is a desk-scale contraction, not from the source example",
        ),
    )


def make_rationals_max(bits: int = 20) -> CatalogEntry:
    domain = SetDescriptor.interval(0, math.inf, flags={CLOSED}, dyadic=bits)
    region = SetDescriptor.interval(0, 1, dyadic=bits)
    return CatalogEntry(
        name="rationals-max",
        space=make_max_space(domain, "rationals-max"),
        region=region,
        map=halving_map(domain),
        decomposition=CyclicDecomposition((region, region), ("X", "X")),
        notes=(
            "p(x,y) = max{x,y} on Q intersect [0, inf); samples are dyadic rationals",
            "0-complete partial metric space which is not complete",
            "attached map f(x) = x/2 is a desk-scale contraction",
        ),
    )


def make_hybrid_unit() -> CatalogEntry:
    X = SetDescriptor.interval(0, 1, flags={CLOSED})
    A = SetDescriptor.interval(0, 0.5, flags={CLOSED, ZERO_COMPACT})
    B = SetDescriptor.interval(0.5, 1, flags={CLOSED})
    T = PiecewiseMap(
        (
            Piece(SetDescriptor.interval(0, 1, True, False), Affine.constant(0.5)),
            Piece(SetDescriptor.of_points(1), Affine.constant(0.0)),
        ),
        "T",
    )
    return CatalogEntry(
        name="hybrid-unit",
        space=PartialMetricDescriptor.builtin("hybrid-unit", X),
        region=X,
        map=T,
        decomposition=CyclicDecomposition((A, B), ("A", "B")),
        notes=(
            "p(x,y) = |x-y| if both x,y in [0,1), max{x,y} otherwise",
            "complete partial metric space",
            "T is a cyclical contraction with claimed alpha = 3/4",
        ),
        claimed_alpha=0.75,
    )


T1_EXTENSION_NOTE = "T(1) = 3/2 is an extension chosen here; the source example leaves T(1) undefined"


def make_counterexample() -> CatalogEntry:
    A = SetDescriptor.interval(0, 1, flags={CLOSED})
    B = SetDescriptor(
        intervals=SetDescriptor.interval(3, 4).intervals, points=(1.5,), flags={CLOSED}
    )
    X = A.union(B)
    T = PiecewiseMap(
        (
            Piece(SetDescriptor.interval(0, 1, True, False), Affine.constant(1.5)),
            Piece(SetDescriptor.of_points(1.5), Affine.constant(0.5)),
            Piece(SetDescriptor.interval(3, 4), Affine(0.5, -1.0)),
            Piece(SetDescriptor.of_points(1), Affine.constant(1.5), T1_EXTENSION_NOTE),
        ),
        "T",
    )
    return CatalogEntry(
        name="counterexample",
        space=make_max_space(X, "counterexample"),
        region=X,
        map=T,
        decomposition=CyclicDecomposition((A, B), ("A", "B")),
        notes=(
            "p(x,y) = max{x,y} on A U B with A = [0,1], B = [3,4] U {3/2}",
            "complete partial metric space",
            "T is a partial cyclical contraction for every alpha in (0,1), yet A and B are disjoint",
            T1_EXTENSION_NOTE,
        ),
    )


def make_k3_demo() -> CatalogEntry:
    """Three nested sets on [0,1] with the max metric and T(x) = x/4."""
    sets = tuple(SetDescriptor.interval(0, hi, flags={CLOSED}) for hi in (1.0, 0.5, 0.25))
    X = sets[0]
    return CatalogEntry(
        name="k3-demo",
        space=make_max_space(X, "k3-demo"),
        region=X,
        map=halving_map(X, 0.25, "T"),
        decomposition=CyclicDecomposition(sets, ("A1", "A2", "A3")),
        notes=("T(x) = x/4 maps [0,1] -> [0,1/2] -> [0,1/4] -> [0,1] cyclically",),
    )


CATALOG = {
    "max": make_max,
    "rationals-max": make_rationals_max,
    "hybrid-unit": make_hybrid_unit,
    "counterexample": make_counterexample,
}


def get_entry(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]()
    except KeyError:
        raise ArgumentError(f"unknown catalog space {name!r}; choose from {sorted(CATALOG)}") from None
