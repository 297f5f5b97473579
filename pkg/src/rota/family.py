"""Families of disjoint rainbow independent sets and the algebra on them.

Availability graph, colour excess, ell-reduction, the lexicographic order on
sorted colour-count vectors, and the small/medium/large colour split.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .graphs import BipartiteGraph, Vertex, X, Y, k_excess
from .instances import ColouredInstance

__all__ = [
    "FamilyError",
    "NoPivotError",
    "RainbowFamily",
    "ReductionTrace",
    "ColourClassification",
    "Lex",
    "can_add",
    "strict_hosts",
    "availability_graph",
    "k_excess",
    "colour_excess",
    "reduce_once",
    "reduce_trace",
    "lex_compare",
    "classify_colours",
    "classify_counts",
    "exact",
]


class FamilyError(ValueError):
    pass


class NoPivotError(Exception):
    """No small/medium/large split exists: the improvement loop should stop."""


def exact(x: float | int | Fraction) -> Fraction:
    """Exact rational for a user-supplied parameter (``0.1`` means 1/10)."""
    return x if isinstance(x, Fraction) else Fraction(str(x))


@dataclass(frozen=True, eq=False)
class RainbowFamily:
    instance: ColouredInstance
    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in self.sets))

    @classmethod
    def empty(cls, instance: ColouredInstance, m: int) -> "RainbowFamily":
        return cls(instance, tuple(frozenset() for _ in range(m)))

    @property
    def m(self) -> int:
        return len(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __getitem__(self, i: int) -> frozenset[int]:
        return self.sets[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RainbowFamily):
            return NotImplemented
        return self.sets == other.sets and self.instance == other.instance

    def __hash__(self) -> int:
        return hash(self.sets)

    def __repr__(self) -> str:
        return f"RainbowFamily({[sorted(s) for s in self.sets]})"

    @cached_property
    def elements(self) -> frozenset[int]:
        return frozenset().union(*self.sets) if self.sets else frozenset()

    @property
    def volume(self) -> int:
        return sum(len(s) for s in self.sets)

    @cached_property
    def set_colours(self) -> tuple[frozenset[int], ...]:
        col = self.instance.colour_of
        return tuple(frozenset(col[x] for x in s) for s in self.sets)

    def colour_elements(self, c: int) -> frozenset[int]:
        return self.elements & self.instance.colour_class[c]

    def colour_counts(self) -> list[int]:
        counts = [0] * self.instance.n
        col = self.instance.colour_of
        for s in self.sets:
            for x in s:
                counts[col[x]] += 1
        return counts

    def index_of(self, x: int) -> int | None:
        for i, s in enumerate(self.sets):
            if x in s:
                return i
        return None

    def replace(self, changes: dict[int, Iterable[int]]) -> "RainbowFamily":
        sets = list(self.sets)
        for i, s in changes.items():
            sets[i] = frozenset(s)
        return RainbowFamily(self.instance, tuple(sets))

    def with_instance(self, instance: ColouredInstance) -> "RainbowFamily":
        return RainbowFamily(instance, self.sets)

    def restrict(self, keep: Iterable[int]) -> "RainbowFamily":
        """Subfamily keeping only the elements in ``keep``."""
        keep = frozenset(keep)
        return RainbowFamily(self.instance, tuple(s & keep for s in self.sets))

    def is_subfamily_of(self, other: "RainbowFamily") -> bool:
        return self.m == other.m and all(a <= b for a, b in zip(self.sets, other.sets))

    def problems(self) -> list[str]:
        out = []
        owner: dict[int, int] = {}
        inst = self.instance
        for i, s in enumerate(self.sets):
            for x in s:
                if not 0 <= x < inst.ground_size:
                    out.append(f"set {i}: element {x} outside the ground set")
                    continue
                if x in owner:
                    out.append(f"element {x} appears in sets {owner[x]} and {i}")
                owner[x] = i
            if any(not 0 <= x < inst.ground_size for x in s):
                continue
            if not inst.is_rainbow(s):
                out.append(f"set {i} is not rainbow")
            if not inst.matroid.is_independent(s):
                out.append(f"set {i} is dependent")
        return out

    def is_valid(self) -> bool:
        return not self.problems()

    def validate(self) -> "RainbowFamily":
        probs = self.problems()
        if probs:
            raise FamilyError("; ".join(probs))
        return self


def can_add(instance: ColouredInstance, T: Iterable[int], e: int) -> bool:
    """Is ``T + e`` rainbow and independent?  ``T`` is assumed rainbow independent."""
    T = frozenset(T)
    if e in T:
        return False
    c = instance.colour_of[e]
    if any(instance.colour_of[x] == c for x in T):
        return False
    return instance.matroid.is_independent(T | {e})


def strict_hosts(F: RainbowFamily, e: int, sets: Sequence[int] | None = None, limit: int | None = None) -> list[int]:
    """Indices ``j`` with ``e`` not in ``T_j`` and ``T_j + e`` rainbow independent.

    Stops after ``limit`` hosts when given.
    """
    c = F.instance.colour_of[e]
    indep = F.instance.matroid.is_independent
    out = []
    for j in range(F.m) if sets is None else sets:
        T = F.sets[j]
        if e in T or c in F.set_colours[j]:
            continue
        if indep(T | {e}):
            out.append(j)
            if limit is not None and len(out) >= limit:
                break
    return out


def availability_graph(F: RainbowFamily) -> BipartiteGraph:
    """X = the sets of ``F``, Y = the colours; ``T_i ~ c`` iff ``c`` is absent from ``T_i``."""
    n = F.instance.n
    edges = frozenset((i, c) for i in range(F.m) for c in range(n) if c not in F.set_colours[i])
    return BipartiteGraph(F.m, n, edges)


def colour_excess(c: int, F: RainbowFamily) -> int:
    """``max(0, e(c) + n - m - min |T|)`` over sets missing ``c``; ``n`` if no set misses it."""
    n, m = F.instance.n, F.m
    sizes = [len(s) for s, cs in zip(F.sets, F.set_colours) if c not in cs]
    if not sizes:
        return n
    e_c = sum(1 for cs in F.set_colours if c in cs)
    return max(0, e_c + n - m - min(sizes))


def reduce_once(F: RainbowFamily, ell: int) -> RainbowFamily:
    """Drop every element with at least ``ell`` strict hosts in ``F`` (all at once)."""
    if ell < 1:
        raise FamilyError(f"reduction threshold must be at least 1, got {ell}")
    if ell > F.m - 1:
        # an element has at most m - 1 strict hosts
        return F
    drop = {x for s in F.sets for x in s if len(strict_hosts(F, x, limit=ell)) >= ell}
    if not drop:
        return F
    return RainbowFamily(F.instance, tuple(s - drop for s in F.sets))


@dataclass(frozen=True)
class ReductionTrace:
    ell: int
    levels: tuple[RainbowFamily, ...]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def __getitem__(self, r: int) -> RainbowFamily:
        return self.levels[r]

    def survival_depth(self, i: int, x: int) -> int:
        """Largest level whose set ``i`` still contains ``x`` (-1 if never)."""
        depth = -1
        for r, level in enumerate(self.levels):
            if x not in level.sets[i]:
                break
            depth = r
        return depth


def reduce_trace(F: RainbowFamily, ell: int, r: int) -> ReductionTrace:
    if r < 0:
        raise FamilyError(f"reduction depth must be nonnegative, got {r}")
    levels = [F]
    for _ in range(r):
        levels.append(reduce_once(levels[-1], ell))
    return ReductionTrace(ell, tuple(levels))


class Lex(enum.Enum):
    GREATER = "greater"
    LESS = "less"
    INCOMPARABLE = "incomparable-or-equal"


def lex_compare(F1: RainbowFamily, F2: RainbowFamily) -> Lex:
    """Compare ascending-sorted colour-count vectors at the first difference."""
    if F1.instance.n != F2.instance.n:
        raise FamilyError(f"colour counts differ: {F1.instance.n} vs {F2.instance.n}")
    a, b = sorted(F1.colour_counts()), sorted(F2.colour_counts())
    for u, v in zip(a, b):
        if u != v:
            return Lex.GREATER if u > v else Lex.LESS
    return Lex.INCOMPARABLE


@dataclass(frozen=True)
class ColourClassification:
    order: tuple[int, ...]  # colours by ascending count, ties by colour id
    counts: tuple[int, ...]  # indexed by colour
    pivot: int  # 1-based position of c_m in ``order``
    width: int
    small: frozenset[int]
    medium: frozenset[int]
    large: frozenset[int]

    def kind(self, c: int) -> str:
        if c in self.small:
            return "small"
        return "medium" if c in self.medium else "large"


def classify_counts(counts: Sequence[int], eps, r0: int) -> ColourClassification:
    """Split colours around the largest valid pivot for a colour-count vector.

    Raises :class:`NoPivotError` when at most ``eps * n`` colours have count
    at most ``(1 - 3 eps) n``, or when no pivot satisfies both conditions.
    """
    eps = exact(eps)
    n = len(counts)
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
    deficient = sum(1 for v in counts if v <= (1 - 3 * eps) * n)
    if deficient <= eps * n:
        raise NoPivotError(f"only {deficient} colours have count <= (1 - 3 eps) n")
    gap = 3**r0
    width = math.ceil(Fraction(gap) / eps)
    order = tuple(sorted(range(n), key=lambda c: (counts[c], c)))
    e = [counts[c] for c in order]
    for m in range(n, 0, -1):
        if e[m - 1] > (1 - 2 * eps) * n:
            continue
        if m + width <= n and e[m + width - 1] < e[m - 1] + gap:
            continue
        return ColourClassification(
            order=order,
            counts=tuple(counts),
            pivot=m,
            width=width,
            small=frozenset(order[: m - 1]),
            medium=frozenset(order[m - 1 : m + width]),
            large=frozenset(order[m + width :]),
        )
    raise NoPivotError("no index satisfies the pivot conditions")


def classify_colours(F: RainbowFamily, eps, r0: int) -> ColourClassification:
    return classify_counts(F.colour_counts(), eps, r0)


def colour_vertex(c: int) -> Vertex:
    return (Y, c)


def set_vertex(i: int) -> Vertex:
    return (X, i)
