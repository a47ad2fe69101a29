"""Finite unions of integer boxes, used as exact label sets on N₀^a × Z^b lattices.

A box is a tuple of closed intervals ``(lo, hi)`` with ``±math.inf`` allowed.
A :class:`BoxSet` keeps its boxes pairwise disjoint, so sizes add up.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

__all__ = ["BoxSet", "universe"]

INF = math.inf


def _box_empty(box) -> bool:
    return any(lo > hi for lo, hi in box)


def _box_intersect(a, b):
    out = tuple((max(l1, l2), min(h1, h2)) for (l1, h1), (l2, h2) in zip(a, b))
    return None if _box_empty(out) else out


def _box_subtract(a, b) -> list:
    """a ∖ b as disjoint boxes (slab decomposition along each axis)."""
    if _box_intersect(a, b) is None:
        return [a]
    pieces = []
    rest = list(a)
    for c, ((lo, hi), (blo, bhi)) in enumerate(zip(a, b)):
        if lo < blo:
            piece = list(rest)
            piece[c] = (lo, blo - 1)
            pieces.append(tuple(piece))
        if bhi < hi:
            piece = list(rest)
            piece[c] = (bhi + 1, hi)
            pieces.append(tuple(piece))
        rest[c] = (max(lo, blo), min(hi, bhi))
    return pieces


def _box_size(box):
    n = 1
    for lo, hi in box:
        if lo == -INF or hi == INF:
            return INF
        n *= int(hi - lo + 1)
    return n


@dataclass(frozen=True)
class BoxSet:
    """Union of pairwise-disjoint boxes in Z^d."""

    ndim: int
    boxes: tuple = ()

    def __post_init__(self):
        clean = tuple(b for b in self.boxes if not _box_empty(b))
        for b in clean:
            if len(b) != self.ndim:
                raise ValueError(f"box {b} does not have {self.ndim} coordinates")
        object.__setattr__(self, "boxes", clean)

    @classmethod
    def empty(cls, ndim: int) -> "BoxSet":
        return cls(ndim, ())

    @classmethod
    def box(cls, *intervals) -> "BoxSet":
        return cls(len(intervals), (tuple(intervals),))

    @classmethod
    def points(cls, pts, ndim: int) -> "BoxSet":
        return cls(ndim, tuple(tuple((p, p) for p in x) for x in set(map(tuple, pts))))

    # set algebra
    def intersect(self, other: "BoxSet") -> "BoxSet":
        out = []
        for a in self.boxes:
            for b in other.boxes:
                c = _box_intersect(a, b)
                if c is not None:
                    out.append(c)
        return BoxSet(self.ndim, tuple(out))

    def subtract(self, other: "BoxSet") -> "BoxSet":
        pieces = list(self.boxes)
        for b in other.boxes:
            pieces = [p for a in pieces for p in _box_subtract(a, b)]
        return BoxSet(self.ndim, tuple(pieces))

    def union(self, other: "BoxSet") -> "BoxSet":
        return BoxSet(self.ndim, self.boxes + other.subtract(self).boxes)

    def translate(self, v) -> "BoxSet":
        return BoxSet(self.ndim, tuple(tuple((lo + d, hi + d) for (lo, hi), d in zip(b, v)) for b in self.boxes))

    __and__ = intersect
    __or__ = union
    __sub__ = subtract

    # queries
    def is_empty(self) -> bool:
        return not self.boxes

    def size(self):
        """Number of labels: an int, or ``math.inf``."""
        return sum((_box_size(b) for b in self.boxes), 0)

    def is_finite(self) -> bool:
        return self.size() != INF

    def contains(self, x) -> bool:
        return any(all(lo <= xi <= hi for xi, (lo, hi) in zip(x, b)) for b in self.boxes)

    __contains__ = contains

    def equals(self, other: "BoxSet") -> bool:
        return self.subtract(other).is_empty() and other.subtract(self).is_empty()

    def labels(self, lo=None, hi=None) -> list:
        """Sorted labels inside the window ``lo <= x <= hi`` (required if infinite)."""
        out = []
        for b in self.boxes:
            ranges = []
            for c, (blo, bhi) in enumerate(b):
                a = blo if lo is None else max(blo, lo[c])
                z = bhi if hi is None else min(bhi, hi[c])
                if a in (-INF, INF) or z in (-INF, INF):
                    raise ValueError("infinite box needs a finite window")
                ranges.append(range(int(a), int(z) + 1))
            out.extend(itertools.product(*ranges))
        return sorted(out)

    def to_json(self) -> list:
        def enc(t):
            return "inf" if t == INF else "-inf" if t == -INF else int(t)

        return [[[enc(lo), enc(hi)] for lo, hi in b] for b in self.boxes]

    @classmethod
    def from_json(cls, ndim: int, obj) -> "BoxSet":
        def dec(t):
            return INF if t == "inf" else -INF if t == "-inf" else int(t)

        return cls(ndim, tuple(tuple((dec(lo), dec(hi)) for lo, hi in b) for b in obj))


def universe(kinds) -> BoxSet:
    """All labels of N₀^a × Z^b, coordinates typed by ``kinds`` ("N"/"Z")."""
    return BoxSet(len(kinds), (tuple((0, INF) if k == "N" else (-INF, INF) for k in kinds),))
