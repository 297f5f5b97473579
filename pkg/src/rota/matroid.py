"""Independence-oracle matroids over dense integer ground sets.

Elements are the integers ``0 .. ground_size - 1``.  Every matroid exposes a
pure independence predicate; rank and augmentation are derived from it.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable, Sequence

__all__ = [
    "MatroidError",
    "Matroid",
    "UniformMatroid",
    "GraphicMatroid",
    "LinearMatroid",
    "FreeExtension",
    "OracleMatroid",
    "build_matroid",
    "is_independent",
    "rank_of",
    "augment",
    "check_axioms",
    "is_prime",
    "next_prime",
]

MAX_PRIME = 2**31
AXIOM_CHECK_LIMIT = 16


class MatroidError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    p = n + 1
    while not is_prime(p):
        p += 1
    return p


class Matroid:
    """Base class.  Subclasses implement ``_independent`` on a frozenset."""

    kind = "abstract"

    def __init__(self, ground_size: int):
        if ground_size < 0:
            raise MatroidError(f"ground size must be nonnegative, got {ground_size}")
        self.ground_size = ground_size
        # Oracle answers are memoised; subclasses are immutable so this is safe.
        self._cached = lru_cache(maxsize=1 << 18)(self._independent)

    @property
    def ground(self) -> range:
        return range(self.ground_size)

    def _independent(self, elements: frozenset[int]) -> bool:
        raise NotImplementedError

    def _check_range(self, elements: frozenset[int]) -> None:
        for x in elements:
            if not 0 <= x < self.ground_size:
                raise MatroidError(f"element {x} outside ground set of size {self.ground_size}")

    def is_independent(self, elements: Iterable[int]) -> bool:
        s = elements if isinstance(elements, frozenset) else frozenset(elements)
        if not s:
            return True
        self._check_range(s)
        return self._cached(s)

    def rank(self, elements: Iterable[int] | None = None) -> int:
        return rank_of(self, self.ground if elements is None else elements)

    def params(self) -> dict:
        return {}

    def __eq__(self, other: object) -> bool:
        return (
            type(self) is type(other)
            and self.ground_size == other.ground_size  # type: ignore[attr-defined]
            and self.params() == other.params()  # type: ignore[attr-defined]
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.ground_size, repr(self.params())))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(ground_size={self.ground_size}, {self.params()})"


class UniformMatroid(Matroid):
    kind = "uniform"

    def __init__(self, rank: int, ground_size: int):
        if not 0 <= rank <= ground_size:
            raise MatroidError(f"uniform rank {rank} out of range for ground size {ground_size}")
        self.r = rank
        super().__init__(ground_size)

    def _independent(self, elements):
        return len(elements) <= self.r

    def params(self):
        return {"rank": self.r}


class GraphicMatroid(Matroid):
    """Cycle matroid of a multigraph; element ``i`` is edge ``edges[i]``."""

    kind = "graphic"

    def __init__(self, edges: Sequence[Sequence[int]], num_vertices: int | None = None):
        edges = tuple((int(u), int(v)) for u, v in edges)
        top = max((max(u, v) for u, v in edges), default=-1) + 1
        if num_vertices is None:
            num_vertices = top
        for i, (u, v) in enumerate(edges):
            if min(u, v) < 0 or max(u, v) >= num_vertices:
                raise MatroidError(f"edge {i} = ({u}, {v}) has an endpoint outside 0..{num_vertices - 1}")
        self.edges = edges
        self.num_vertices = num_vertices
        super().__init__(len(edges))

    def _independent(self, elements):
        parent: dict[int, int] = {}

        def find(v: int) -> int:
            root = v
            while parent.get(root, root) != root:
                root = parent[root]
            while v != root:
                parent[v], v = root, parent.get(v, v)
            return root

        for i in elements:
            u, v = self.edges[i]
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True

    def params(self):
        # isolated vertices do not affect the matroid
        return {"edges": self.edges}


def _rank_mod_p(columns: list[list[int]], p: int) -> int:
    """Rank of a list of columns over GF(p) by row reduction (first nonzero pivot)."""
    rows = [list(c) for c in columns]  # treat columns as rows; rank is the same
    rank = 0
    width = len(rows[0]) if rows else 0
    for col in range(width):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] % p), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        prow = [(x * inv) % p for x in rows[rank]]
        rows[rank] = prow
        for i in range(len(rows)):
            if i != rank and rows[i][col] % p:
                f = rows[i][col]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], prow)]
        rank += 1
        if rank == len(rows):
            break
    return rank


class LinearMatroid(Matroid):
    """Column matroid of a matrix over the prime field GF(p)."""

    kind = "linear"

    def __init__(self, columns: Sequence[Sequence[int]], prime: int):
        if not isinstance(prime, int) or prime > MAX_PRIME or not is_prime(prime):
            raise MatroidError(f"invalid prime {prime!r}")
        columns = tuple(tuple(int(x) for x in c) for c in columns)
        dims = {len(c) for c in columns}
        if len(dims) > 1:
            raise MatroidError(f"columns have inconsistent lengths {sorted(dims)}")
        for i, c in enumerate(columns):
            for x in c:
                if not 0 <= x < prime:
                    raise MatroidError(f"column {i} entry {x} not reduced mod {prime}")
        self.columns = columns
        self.prime = prime
        self.dimension = dims.pop() if dims else 0
        super().__init__(len(columns))

    def _independent(self, elements):
        if len(elements) > self.dimension:
            return False
        cols = [list(self.columns[i]) for i in sorted(elements)]
        return _rank_mod_p(cols, self.prime) == len(cols)

    def params(self):
        return {"columns": self.columns, "prime": self.prime}


class FreeExtension(Matroid):
    """``base`` with ``dummies`` coloops appended after its ground set."""

    kind = "free-extension"

    def __init__(self, base: Matroid, dummies: int):
        if dummies < 0:
            raise MatroidError(f"dummy count must be nonnegative, got {dummies}")
        self.base = base
        self.dummies = dummies
        super().__init__(base.ground_size + dummies)

    def is_dummy(self, x: int) -> bool:
        return x >= self.base.ground_size

    def _independent(self, elements):
        n = self.base.ground_size
        return self.base.is_independent(frozenset(x for x in elements if x < n))

    def params(self):
        return {"base": self.base, "dummies": self.dummies}


class OracleMatroid(Matroid):
    """Wraps an arbitrary predicate.  Not guaranteed to satisfy the axioms."""

    kind = "oracle"

    def __init__(self, ground_size: int, predicate: Callable[[frozenset[int]], bool]):
        self.predicate = predicate
        super().__init__(ground_size)

    def is_independent(self, elements):
        s = elements if isinstance(elements, frozenset) else frozenset(elements)
        self._check_range(s)
        return bool(self._cached(s))

    def _independent(self, elements):
        return self.predicate(elements)

    def params(self):
        return {"predicate": self.predicate}


def build_matroid(kind: str, **params) -> Matroid:
    """Factory: ``uniform(rank, ground_size)``, ``graphic(edges[, num_vertices])``,
    ``linear(columns, prime)``, ``free-extension(base, dummies)``."""
    if kind == "uniform":
        return UniformMatroid(params["rank"], params["ground_size"])
    if kind == "graphic":
        return GraphicMatroid(params["edges"], params.get("num_vertices"))
    if kind == "linear":
        return LinearMatroid(params["columns"], params["prime"])
    if kind in ("free-extension", "free_extension"):
        return FreeExtension(params["base"], params["dummies"])
    raise MatroidError(f"unknown matroid kind {kind!r}")


def is_independent(M: Matroid, S: Iterable[int]) -> bool:
    return M.is_independent(S)


def rank_of(M: Matroid, S: Iterable[int]) -> int:
    """Greedy rank: size of a maximal independent subset of ``S``."""
    basis: list[int] = []
    for x in sorted(set(S)):
        if M.is_independent(frozenset(basis + [x])):
            basis.append(x)
    return len(basis)


def augment(M: Matroid, I: Iterable[int], J: Iterable[int]) -> int:
    """Smallest ``x`` in ``I - J`` with ``J + x`` independent."""
    I, J = frozenset(I), frozenset(J)
    if not (M.is_independent(I) and M.is_independent(J)):
        raise MatroidError("augment requires two independent sets")
    if len(I) <= len(J):
        raise MatroidError(f"augment requires |I| > |J|, got {len(I)} <= {len(J)}")
    for x in sorted(I - J):
        if M.is_independent(J | {x}):
            return x
    raise MatroidError("augmentation property violated: no element of I - J extends J")


def _independence_table(M: Matroid) -> list[bool]:
    N = M.ground_size
    table = [False] * (1 << N)
    for mask in range(1 << N):
        table[mask] = M.is_independent(frozenset(i for i in range(N) if mask >> i & 1))
    return table


def check_axioms(M: Matroid) -> bool:
    """Exhaustively verify the independence axioms (ground size <= 16).

    The empty set must be independent, every one-element deletion of an
    independent set must be independent, and for every independent ``J`` the
    closure of ``J`` must have rank ``|J|``.  The last condition says every
    maximal independent subset of any set has the same size, which together
    with heredity is equivalent to augmentation.
    """
    N = M.ground_size
    if N > AXIOM_CHECK_LIMIT:
        raise MatroidError(f"ground set of size {N} too large for exhaustive check (limit {AXIOM_CHECK_LIMIT})")
    indep = _independence_table(M)
    if not indep[0]:
        return False
    size = [bin(m).count("1") for m in range(1 << N)]
    rank = [0] * (1 << N)
    for mask in range(1 << N):
        if indep[mask]:
            for i in range(N):
                if mask >> i & 1 and not indep[mask ^ (1 << i)]:
                    return False
            rank[mask] = size[mask]
        else:
            rank[mask] = max(rank[mask ^ (1 << i)] for i in range(N) if mask >> i & 1)
    for mask in range(1 << N):
        if not indep[mask]:
            continue
        closure = mask
        for i in range(N):
            if not mask >> i & 1 and not indep[mask | (1 << i)]:
                closure |= 1 << i
        if rank[closure] != size[mask]:
            return False
    return True
