"""Real sets built from intervals and isolated points, and piecewise self-maps.

A :class:`SetDescriptor` is a finite union of intervals (each endpoint open or
closed, possibly infinite) plus a finite list of isolated points.  Sets support
membership, distance, intersection, difference and deterministic sampling.

A :class:`PiecewiseMap` is an ordered list of ``(guard, rule)`` pieces whose
rules are affine, ``x -> slope * x + intercept`` (constants have zero slope).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, MapTotalityError

TOL_EQ = 1e-9

CLOSED = "closed"
ZERO_COMPACT = "zero-compact"
KNOWN_FLAGS = frozenset({CLOSED, ZERO_COMPACT})


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ArgumentError("interval endpoints must not be NaN")
        if self.lo > self.hi:
            raise ArgumentError(f"interval has lo > hi: {self.lo} > {self.hi}")
        # infinite endpoints are never attained
        if math.isinf(self.lo) and self.lo_closed:
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(self.hi) and self.hi_closed:
            object.__setattr__(self, "hi_closed", False)

    @property
    def empty(self) -> bool:
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def contains(self, x: float, slack: float = 0.0) -> bool:
        if slack > 0:
            return self.lo - slack <= x <= self.hi + slack
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above and below

    def distance(self, x: float) -> float:
        if x < self.lo:
            return self.lo - x
        if x > self.hi:
            return x - self.hi
        return 0.0

    def intersect(self, other: Interval) -> Interval | None:
        if self.lo > other.lo:
            lo, lo_closed = self.lo, self.lo_closed
        elif other.lo > self.lo:
            lo, lo_closed = other.lo, other.lo_closed
        else:
            lo, lo_closed = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_closed = self.hi, self.hi_closed
        elif other.hi < self.hi:
            hi, hi_closed = other.hi, other.hi_closed
        else:
            hi, hi_closed = self.hi, self.hi_closed and other.hi_closed
        if lo > hi:
            return None
        out = Interval(lo, hi, lo_closed, hi_closed)
        return None if out.empty else out

    def subtract(self, other: Interval) -> list[Interval]:
        """Return ``self \\ other`` as at most two disjoint intervals."""
        pieces = []
        left = self.intersect(Interval(-math.inf, other.lo, False, not other.lo_closed))
        right = self.intersect(Interval(other.hi, math.inf, not other.hi_closed, False))
        for piece in (left, right):
            if piece is not None:
                pieces.append(piece)
        return pieces

    def __str__(self) -> str:
        lb = "[" if self.lo_closed else "("
        rb = "]" if self.hi_closed else ")"
        return f"{lb}{_fmt(self.lo)},{_fmt(self.hi)}{rb}"


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


@dataclass(frozen=True)
class SetDescriptor:
    """Finite union of intervals plus isolated points.

    ``dyadic`` optionally snaps sampled points to multiples of ``2**-dyadic``
    so that the sample consists of exactly representable rationals.
    """

    intervals: tuple[Interval, ...] = ()
    points: tuple[float, ...] = ()
    flags: frozenset = frozenset()
    tol: float = TOL_EQ
    dyadic: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(i for i in self.intervals if not i.empty))
        object.__setattr__(self, "points", tuple(float(p) for p in self.points))
        object.__setattr__(self, "flags", frozenset(self.flags))
        unknown = self.flags - KNOWN_FLAGS
        if unknown:
            raise ArgumentError(f"unknown set flags: {sorted(unknown)}")

    @classmethod
    def interval(cls, lo, hi, lo_closed=True, hi_closed=True, **kw) -> SetDescriptor:
        return cls(intervals=(Interval(float(lo), float(hi), lo_closed, hi_closed),), **kw)

    @classmethod
    def of_points(cls, *points, **kw) -> SetDescriptor:
        return cls(points=tuple(float(p) for p in points), **kw)

    @property
    def is_empty(self) -> bool:
        return not self.intervals and not self.points

    @property
    def bounded(self) -> bool:
        return all(i.bounded for i in self.intervals)

    def contains(self, x: float, slack: float = 0.0) -> bool:
        """Membership; ``slack`` widens every interval to its closure plus slack."""
        if any(iv.contains(x, slack) for iv in self.intervals):
            return True
        ptol = max(self.tol, slack)
        return any(abs(x - p) <= ptol for p in self.points)

    __contains__ = contains

    def distance(self, x: float) -> float:
        """Euclidean distance from ``x`` to the closure of the set."""
        d = [iv.distance(x) for iv in self.intervals] + [abs(x - p) for p in self.points]
        return min(d) if d else math.inf

    def union(self, other: SetDescriptor) -> SetDescriptor:
        return SetDescriptor(
            self.intervals + other.intervals,
            self.points + other.points,
            self.flags & other.flags,
            self.tol,
            self.dyadic if self.dyadic is not None else other.dyadic,
        )

    def intersect(self, other: SetDescriptor) -> SetDescriptor:
        intervals = []
        for a in self.intervals:
            for b in other.intervals:
                c = a.intersect(b)
                if c is not None:
                    intervals.append(c)
        points = [p for p in self.points if other.contains(p)]
        points += [p for p in other.points if self.contains(p) and p not in points]
        return SetDescriptor(tuple(intervals), tuple(points), frozenset(), self.tol, self.dyadic)

    def subtract(self, other: SetDescriptor) -> SetDescriptor:
        removed = list(other.intervals) + [Interval(p, p) for p in other.points]
        pieces = list(self.intervals)
        for r in removed:
            pieces = [q for piece in pieces for q in piece.subtract(r)]
        points = [p for p in self.points if not other.contains(p)]
        return SetDescriptor(tuple(pieces), tuple(points), frozenset(), self.tol, self.dyadic)

    def sample(self, density: int) -> list[float]:
        return sample(self, density)

    def __str__(self) -> str:
        parts = [str(i) for i in self.intervals]
        if self.points:
            parts.append("{" + ",".join(_fmt(p) for p in self.points) + "}")
        return " U ".join(parts) if parts else "{}"


def union_all(sets: Iterable[SetDescriptor]) -> SetDescriptor:
    out = SetDescriptor()
    for s in sets:
        out = s if out.is_empty else out.union(s)
    return out


def sample(s: SetDescriptor, density: int) -> list[float]:
    """Deterministic grid sample of a set.

    Each interval contributes ``density`` equally spaced points.  Closed
    endpoints are always included; open endpoints are replaced by a point
    ``s.tol`` inside the interval.  Isolated points are appended and the
    result is sorted with near-duplicates (within ``s.tol``) merged.
    """
    if density < 1:
        raise ArgumentError("density must be >= 1")
    raw: list[float] = []
    for iv in s.intervals:
        if not iv.bounded:
            raise ArgumentError(f"cannot sample unbounded interval {iv}")
        lo = iv.lo if iv.lo_closed else iv.lo + s.tol
        hi = iv.hi if iv.hi_closed else iv.hi - s.tol
        if lo > hi or density == 1:
            raw.append(lo if lo <= hi else (iv.lo + iv.hi) / 2)
        else:
            raw.extend(float(v) for v in np.linspace(lo, hi, density))
    raw.extend(s.points)
    if s.dyadic is not None:
        scale = 2.0**s.dyadic
        raw = [math.floor(v * scale + 0.5) / scale for v in raw]
        raw = [v for v in raw if s.contains(v)]
    out: list[float] = []
    for v in sorted(raw):
        if not out or v - out[-1] > s.tol:
            out.append(v)
    return out


def sampled_intersection(sets: Sequence[SetDescriptor], density: int) -> list[float]:
    """Points of the joint sample that belong to every set (exact membership)."""
    pts = sorted({p for s in sets for p in sample(s, density)})
    return [p for p in pts if all(s.contains(p) for s in sets)]


def is_dyadic(x: float, max_bits: int = 64) -> bool:
    den = Fraction(x).denominator
    return den & (den - 1) == 0 and den.bit_length() - 1 <= max_bits


@dataclass(frozen=True)
class Affine:
    """``x -> slope * x + intercept``; a constant rule has ``slope == 0``."""

    slope: float
    intercept: float

    @classmethod
    def constant(cls, c) -> Affine:
        return cls(0.0, float(c))

    def __call__(self, x: float) -> float:
        if self.slope == 0.0:
            return self.intercept
        return self.slope * x + self.intercept

    def __str__(self) -> str:
        if self.slope == 0.0:
            return _fmt(self.intercept)
        if self.intercept == 0.0:
            return f"{_fmt(self.slope)}*x"
        return f"{_fmt(self.slope)}*x + {_fmt(self.intercept)}"


@dataclass(frozen=True)
class Piece:
    guard: SetDescriptor
    rule: Affine
    note: str = ""


@dataclass(frozen=True)
class PiecewiseMap:
    pieces: tuple[Piece, ...]
    name: str = "T"

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.pieces:
            raise ArgumentError("a piecewise map needs at least one piece")

    @classmethod
    def single(cls, rule: Affine, guard: SetDescriptor, name: str = "T") -> PiecewiseMap:
        return cls((Piece(guard, rule),), name)

    def matching(self, x: float) -> list[Piece]:
        return [pc for pc in self.pieces if pc.guard.contains(x)]

    def __call__(self, x: float) -> float:
        hits = self.matching(x)
        if len(hits) != 1:
            raise MapTotalityError(x, len(hits))
        return hits[0].rule(x)

    def check_total(self, points: Iterable[float]) -> None:
        """Raise :class:`MapTotalityError` unless each point matches exactly one guard."""
        for x in points:
            n = len(self.matching(x))
            if n != 1:
                raise MapTotalityError(x, n)

    @property
    def notes(self) -> list[str]:
        return [pc.note for pc in self.pieces if pc.note]

    def __str__(self) -> str:
        return "; ".join(f"{pc.rule} on {pc.guard}" for pc in self.pieces)
