"""Brute-force and certificate-based checks that do not share code paths with the solver."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .family import RainbowFamily, availability_graph, can_add, reduce_once
from .graphs import X, Y, BipartiteGraph, Vertex, k_excess
from .instances import ColouredInstance

__all__ = [
    "OracleError",
    "BipartiteGraph",
    "max_matching_and_min_cover",
    "BoundCheck",
    "check_zero_excess_bound",
    "check_k_excess_bound",
    "IncrementReport",
    "check_increment_lemma",
    "exact_rota",
    "brute_max_family",
    "EXACT_ROTA_LIMIT",
]

EXACT_ROTA_LIMIT = 4
BRUTE_GROUND_LIMIT = 12
BRUTE_FAMILY_LIMIT = 3


class OracleError(ValueError):
    pass


def max_matching_and_min_cover(G: BipartiteGraph) -> tuple[frozenset[tuple[int, int]], frozenset[Vertex]]:
    """Maximum matching by augmenting paths plus a König vertex cover of equal size."""
    match_x: dict[int, int] = {}
    match_y: dict[int, int] = {}

    def augment_from(x: int, seen: set[int]) -> bool:
        for y in sorted(G.adj_x[x]):
            if y in seen:
                continue
            seen.add(y)
            if y not in match_y or augment_from(match_y[y], seen):
                match_x[x], match_y[y] = y, x
                return True
        return False

    for x in range(G.x_size):
        augment_from(x, set())

    # alternating reachability from unmatched X vertices
    zx = {x for x in range(G.x_size) if x not in match_x}
    zy: set[int] = set()
    stack = list(zx)
    while stack:
        x = stack.pop()
        for y in G.adj_x[x]:
            if y not in zy and match_x.get(x) != y:
                zy.add(y)
                x2 = match_y.get(y)
                if x2 is not None and x2 not in zx:
                    zx.add(x2)
                    stack.append(x2)
    cover = frozenset([(X, x) for x in range(G.x_size) if x not in zx] + [(Y, y) for y in zy])
    matching = frozenset(match_x.items())

    if len({y for _, y in matching}) != len(matching) or not matching <= G.edges:
        raise OracleError("matching certificate failed")
    for a, b in G.edges:
        if (X, a) not in cover and (Y, b) not in cover:
            raise OracleError(f"cover misses edge ({a}, {b})")
    if len(cover) != len(matching):
        raise OracleError(f"König certificate failed: |cover| = {len(cover)}, |matching| = {len(matching)}")
    return matching, cover


@dataclass(frozen=True)
class BoundCheck:
    holds: bool
    lhs: int
    rhs: int


def check_zero_excess_bound(G: BipartiteGraph) -> BoundCheck:
    """``sum_y 0-ex(y) >= delta(Y) (|Y| - |X|)``."""
    return check_k_excess_bound(G, range(G.y_size), 0)


def check_k_excess_bound(G: BipartiteGraph, Y_sub: Iterable[int], k: int) -> BoundCheck:
    """``sum_{y in Y'} k-ex(y) >= delta(Y') (|Y'| - |X|) - 2k|Y'|``."""
    ys = sorted(set(Y_sub))
    if any(not 0 <= y < G.y_size for y in ys):
        raise OracleError("Y' must be a subset of Y")
    lhs = sum(k_excess(G, (Y, y), k) for y in ys)
    delta = min((len(G.adj_y[y]) for y in ys), default=0)
    rhs = delta * (len(ys) - G.x_size) - 2 * k * len(ys)
    return BoundCheck(lhs >= rhs, lhs, rhs)


@dataclass(frozen=True)
class IncrementReport:
    k_excess: int
    colour_degree: int
    best_outside_count: int  # max over sets of the count in branch (i)
    reduced_count: int  # e_{F'}(c)
    count: int  # e_F(c)
    bound_ii: Fraction
    case_i: bool
    case_ii: bool

    @property
    def holds(self) -> bool:
        return self.case_i or self.case_ii


def check_increment_lemma(F: RainbowFamily, c: int, k: int, ell: int) -> IncrementReport:
    """Evaluate both branches of the increment dichotomy by direct counting."""
    if k < 1:
        raise OracleError("k must be positive")
    inst = F.instance
    A = availability_graph(F)
    kex = k_excess(A, (Y, c), k)
    d_c = len(A.adj_y[c])
    outside = sorted(inst.colour_class[c] - F.elements)
    best = max((sum(1 for e in outside if can_add(inst, T, e)) for T in F.sets), default=0)
    case_i = best >= d_c + Fraction(kex, 2)
    count = len(F.colour_elements(c))
    reduced = len(reduce_once(F, ell).colour_elements(c))
    bound = count - Fraction(kex, 2) + Fraction(ell * inst.n, k)
    return IncrementReport(kex, d_c, best, reduced, count, bound, case_i, reduced <= bound)


def exact_rota(instance: ColouredInstance) -> list[frozenset[int]] | None:
    """Decompose a Rota instance with ``n <= 4`` into ``n`` disjoint rainbow bases."""
    n = instance.n
    if n > EXACT_ROTA_LIMIT:
        raise OracleError(f"n = {n} too large for exhaustive search (limit {EXACT_ROTA_LIMIT})")
    classes = [sorted(cls) for cls in instance.colour_class]
    if any(len(cls) != n for cls in classes):
        raise OracleError("exact_rota needs n colour classes of size n")
    indep = instance.matroid.is_independent
    used: set[int] = set()
    bases: list[frozenset[int]] = []

    def fill(colour: int, partial: frozenset[int]) -> bool:
        if colour == n:
            bases.append(partial)
            if place_next_basis():
                return True
            bases.pop()
            return False
        # bases are unordered: each takes the smallest unused colour-0 element
        options = [x for x in classes[colour] if x not in used]
        if colour == 0:
            options = options[:1]
        for x in options:
            if not indep(partial | {x}):
                continue
            used.add(x)
            if fill(colour + 1, partial | {x}):
                return True
            used.discard(x)
        return False

    def place_next_basis() -> bool:
        if len(bases) == n:
            return True
        return fill(0, frozenset())

    return list(bases) if place_next_basis() else None


def brute_max_family(instance: ColouredInstance, m: int) -> RainbowFamily:
    """A family of ``m`` disjoint rainbow independent sets of maximum volume (exhaustive)."""
    N = instance.ground_size
    if N > BRUTE_GROUND_LIMIT or m > BRUTE_FAMILY_LIMIT:
        raise OracleError(f"instance too large for exhaustive search (ground {N}, m {m})")
    col = instance.colour_of
    candidates = []
    for mask in range(1, 1 << N):
        s = [i for i in range(N) if mask >> i & 1]
        if len({col[x] for x in s}) == len(s) and instance.matroid.is_independent(s):
            candidates.append((len(s), mask))
    candidates.sort(key=lambda t: (-t[0], t[1]))
    best: list = [0, []]

    def search(k: int, avail: int, start: int, chosen: list[int], total: int) -> None:
        if total > best[0]:
            best[0], best[1] = total, list(chosen)
        if k == 0:
            return
        for idx in range(start, len(candidates)):
            size, mask = candidates[idx]
            if total + k * size <= best[0]:
                break
            if mask & ~avail:
                continue
            chosen.append(mask)
            search(k - 1, avail & ~mask, idx + 1, chosen, total + size)
            chosen.pop()

    search(m, (1 << N) - 1, 0, [], 0)
    sets = [frozenset(i for i in range(N) if mask >> i & 1) for mask in best[1]]
    sets += [frozenset()] * (m - len(sets))
    return RainbowFamily(instance, tuple(sets))
