"""Switching and the lexicographic improvement loop.

``switch`` inserts an element from outside a family into a set of the
family.  Elements it has to evict are either dropped (only if they lie
outside the core family ``T``) or relocated recursively into other sets,
using how deep they survived in the reduction trace to find room.
``improve_step`` wraps one such insertion so that the sorted colour-count
vector strictly increases, and ``solve`` iterates it.
"""

from __future__ import annotations

import logging
import math
import time
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .family import (
    ColourClassification,
    Lex,
    NoPivotError,
    RainbowFamily,
    ReductionTrace,
    can_add,
    classify_colours,
    exact,
    lex_compare,
    reduce_trace,
    strict_hosts,
)
from .instances import ColouredInstance, extend_with_dummies

__all__ = [
    "SwitchError",
    "ImprovementError",
    "SolverParams",
    "SwitchResult",
    "Witness",
    "Improvement",
    "RunStats",
    "find_removal_pair",
    "switch",
    "check_switch_result",
    "find_P_witness",
    "iter_P_witnesses",
    "improve_step",
    "greedy_initial",
    "solve",
]

log = logging.getLogger(__name__)

NOT_LEX_GREATER = "new family is not lexicographically greater"


class SwitchError(Exception):
    """A switching precondition failed or no admissible host set was left."""


class ImprovementError(Exception):
    """An improvement step broke one of its machine-checked guarantees."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class SolverParams:
    epsilon: float
    r0: int = 2
    ell: int = 81
    k: int = 81
    m: int | None = None
    max_iterations: int = 10_000

    def __post_init__(self):
        eps = exact(self.epsilon)
        if not 0 < eps < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.r0 < 0:
            raise ValueError(f"r0 must be nonnegative, got {self.r0}")
        if self.ell < 9**self.r0:
            raise ValueError(f"ell = {self.ell} is below 9^r0 = {9 ** self.r0}")
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.m is not None and self.m < 0:
            raise ValueError(f"family size must be nonnegative, got {self.m}")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")

    @classmethod
    def desk(cls, epsilon: float = 0.25, **kw) -> "SolverParams":
        return cls(epsilon, **{"r0": 2, "ell": 81, "k": 81, **kw})

    @classmethod
    def faithful(cls, epsilon: float, **kw) -> "SolverParams":
        """Constants of the asymptotic argument (astronomically large)."""
        eps = exact(epsilon)
        r0 = math.ceil(100 / eps**2)
        ell = 9**r0
        k = math.ceil(Fraction(ell) / (16 * eps**2))
        return cls(epsilon, r0=r0, ell=ell, k=k, **kw)

    @property
    def min_n(self) -> int:
        """Rank from which the asymptotic guarantee applies; not enforced."""
        return 100**self.r0

    def family_size(self, n: int) -> int:
        if self.m is not None:
            return self.m
        return math.ceil((1 - exact(self.epsilon)) * n)

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "r0": self.r0,
            "ell": self.ell,
            "k": self.k,
            "m": self.m,
            "max_iterations": self.max_iterations,
        }


@dataclass(frozen=True)
class SwitchResult:
    new_family: RainbowFamily
    inserted: int
    removed: frozenset[int]
    changed: frozenset[int]


def find_removal_pair(
    instance: ColouredInstance, S0: Iterable[int], e: int, keep: Iterable[int] = ()
) -> tuple[int | None, int | None]:
    """Elements to drop from ``S0`` so that ``S0 - f1 - f2 + e`` is rainbow independent.

    ``f1`` is the element sharing ``e``'s colour; ``f2`` is the smallest
    element outside ``keep`` whose removal makes room for ``e``.  Either may be
    ``None``.  When ``keep + e`` is rainbow independent a valid pair avoiding
    ``keep`` always exists.
    """
    S0, keep = frozenset(S0), frozenset(keep)
    if e in S0:
        raise SwitchError(f"element {e} already lies in the target set")
    colour = instance.colour_of[e]
    f1 = next((x for x in sorted(S0) if instance.colour_of[x] == colour), None)
    if f1 is not None and f1 in keep:
        raise SwitchError(f"colour clash with protected element {f1}")
    base = S0 - {f1} if f1 is not None else S0
    indep = instance.matroid.is_independent
    if indep(base | {e}):
        return f1, None
    for x in sorted(base - keep):
        if indep((base - {x}) | {e}):
            return f1, x
    raise SwitchError(f"no removal pair makes room for element {e}")


def switch(
    S: RainbowFamily,
    T: RainbowFamily,
    trace: ReductionTrace,
    r: int,
    e: int,
    i0: int,
    protected: Iterable[int] = (),
    *,
    strict: bool = True,
) -> SwitchResult:
    """Insert ``e`` into ``S[i0]`` where ``trace[r][i0] + e`` is rainbow independent.

    Requires ``T[i] <= S[i]`` for all ``i`` and ``trace`` to be the reduction
    trace of ``T``.  The result drops a set ``X`` of at most ``2^(r+1)``
    elements, all outside ``T``, changes at most ``3^r`` sets and leaves the
    ``protected`` sets alone.  ``strict`` enforces ``ell >= 9^r`` and the
    protected-set budget ``ell / 2^(r+1)``; with ``strict=False`` the
    recursion is attempted anyway and fails with :class:`SwitchError` if it
    runs out of hosts.
    """
    protected = frozenset(protected)
    if trace.levels[0] != T:
        raise SwitchError("trace does not start at T")
    if not T.is_subfamily_of(S):
        raise SwitchError("T is not a subfamily of S")
    if not 0 <= r <= trace.depth:
        raise SwitchError(f"depth {r} outside the computed trace (depth {trace.depth})")
    if strict and trace.ell < 9**r:
        raise SwitchError(f"ell = {trace.ell} is below 9^{r}")
    return _switch(S, T, trace, r, e, i0, protected, strict)


def _switch(S, T, trace, r, e, i0, protected, strict) -> SwitchResult:
    inst = S.instance
    ell = trace.ell
    if e in S.elements:
        raise SwitchError(f"element {e} already lies in the family")
    if i0 in protected:
        raise SwitchError(f"target set {i0} is protected")
    if strict and len(protected) * 2 ** (r + 1) > ell:
        raise SwitchError(f"{len(protected)} protected sets exceed the budget ell/2^{r + 1}")
    T0 = trace.levels[r].sets[i0]
    if not can_add(inst, T0, e):
        raise SwitchError(f"level-{r} set {i0} plus element {e} is not rainbow independent")

    S0 = S.sets[i0]
    removals = [f for f in find_removal_pair(inst, S0, e, keep=T0) if f is not None]
    new_sets = {i0: (S0 - set(removals)) | {e}}
    removed: set[int] = set()
    changed = {i0}
    blocked = set(protected) | {i0}
    for f in removals:
        if f not in T.sets[i0]:
            removed.add(f)
            continue
        r1 = trace.survival_depth(i0, f)
        assert 0 <= r1 < r, (r1, r)
        allowed = [j for j in range(S.m) if j not in blocked]
        hosts = strict_hosts(trace.levels[r1], f, sets=allowed, limit=1)
        if not hosts:
            raise SwitchError(
                f"no host for element {f} at level {r1}: every candidate is protected or already changed"
            )
        S_hat = S.replace({i0: S0 - {f}})
        T_hat = T.replace({i0: T.sets[i0] - {f}})
        sub = _switch(S_hat, T_hat, reduce_trace(T_hat, ell, r1), r1, f, hosts[0], frozenset(blocked), strict)
        for j in sub.changed:
            new_sets[j] = sub.new_family.sets[j]
        removed |= sub.removed
        changed |= sub.changed
        blocked |= sub.changed
    return SwitchResult(S.replace(new_sets), e, frozenset(removed), frozenset(changed))


def check_switch_result(
    S: RainbowFamily,
    T: RainbowFamily,
    r: int,
    e: int,
    protected: Iterable[int],
    result: SwitchResult,
) -> list[str]:
    """Every guarantee of ``switch`` as a list of violations (empty when all hold)."""
    problems = []
    new = result.new_family
    X = result.removed
    if len(X) > 2 ** (r + 1):
        problems.append(f"removed {len(X)} elements, more than 2^{r + 1}")
    differ = {i for i in range(S.m) if new.m != S.m or new.sets[i] != S.sets[i]}
    if len(differ) > 3**r:
        problems.append(f"{len(differ)} sets changed, more than 3^{r}")
    if not differ <= result.changed:
        problems.append(f"sets {sorted(differ - result.changed)} changed but were not reported")
    touched = differ & set(protected)
    if touched:
        problems.append(f"protected sets {sorted(touched)} were modified")
    if new.elements != ({e} | (S.elements - X)):
        problems.append("element set is not {e} + (E(S) - X)")
    if not X <= S.elements - T.elements:
        problems.append("removed elements include members of T or non-members of S")
    if new.m != S.m:
        problems.append(f"family size changed from {S.m} to {new.m}")
    problems.extend(f"invalid family: {p}" for p in new.problems())
    return problems


@dataclass(frozen=True)
class Witness:
    r: int
    colour: int
    element: int
    index: int


def iter_P_witnesses(
    S: RainbowFamily, T: RainbowFamily, trace: ReductionTrace, smalls: Iterable[int], depth: int | None = None
) -> Iterator[Witness]:
    """All ``(r, c, e, i)`` with ``c`` small, ``e`` of colour ``c`` outside ``S``
    and ``trace[r][i] + e`` rainbow independent, ordered by ``r, c, e, i``."""
    inst = S.instance
    smalls = sorted(smalls)
    depth = trace.depth if depth is None else min(trace.depth, depth)
    outside = {c: sorted(inst.colour_class[c] - S.elements) for c in smalls}
    for r in range(depth + 1):
        level = trace.levels[r]
        for c in smalls:
            open_sets = [i for i in range(level.m) if c not in level.set_colours[i]]
            for x in outside[c]:
                for i in open_sets:
                    if inst.matroid.is_independent(level.sets[i] | {x}):
                        yield Witness(r, c, x, i)


def find_P_witness(
    S: RainbowFamily, T: RainbowFamily, trace: ReductionTrace, smalls: Iterable[int], params: SolverParams | None = None
) -> Witness | None:
    """The first witness in ``(r, c, e, i)`` order, or ``None``."""
    depth = None if params is None else params.r0
    return next(iter_P_witnesses(S, T, trace, smalls, depth), None)


@dataclass(frozen=True)
class Improvement:
    family: RainbowFamily
    witness: Witness
    removed: frozenset[int]
    classification: ColourClassification


def _improvement_problems(R, R_star, cls, witness, params) -> list[str]:
    problems = [f"invalid family: {p}" for p in R_star.problems()]
    if R_star.m != R.m:
        problems.append(f"family size changed from {R.m} to {R_star.m}")
    col = R.instance.colour_of

    def by_kind(F, kind):
        return {x for x in F.elements if cls.kind(col[x]) == kind}

    e = witness.element
    if e in R.elements or cls.kind(col[e]) != "small":
        problems.append(f"inserted element {e} is not a new small-colour element")
    if by_kind(R_star, "small") != by_kind(R, "small") | {e}:
        problems.append("small-colour elements changed beyond gaining the inserted element")
    if by_kind(R_star, "medium") != by_kind(R, "medium"):
        problems.append("medium-colour elements changed")
    large_before, large_after = by_kind(R, "large"), by_kind(R_star, "large")
    if not large_after <= large_before:
        problems.append("large-colour elements were added")
    if len(large_before - large_after) > 2 ** (params.r0 + 1):
        problems.append(f"lost {len(large_before - large_after)} large-colour elements, more than 2^(r0+1)")
    if lex_compare(R_star, R) is not Lex.GREATER:
        problems.append(NOT_LEX_GREATER)
    return problems


def improve_step(R: RainbowFamily, params: SolverParams) -> Improvement | None:
    """One lexicographic improvement of ``R``, or ``None`` when the search stops.

    Medium colours are padded with coloop dummies so that every set carries
    all of them; the core family drops the large colours.  A witness is then
    switched in and the dummies are stripped again.  Witnesses are tried in
    order until one yields a strictly lex-greater family.
    """
    inst = R.instance
    try:
        cls = classify_colours(R, params.epsilon, params.r0)
    except NoPivotError as exc:
        log.debug("stop: %s", exc)
        return None
    if not cls.small:
        return None
    medium = sorted(cls.medium)
    demand = {(i, c): 1 for i in range(R.m) for c in medium if c not in R.set_colours[i]}
    ext, registry = extend_with_dummies(inst, demand)
    padding: dict[int, set[int]] = defaultdict(set)
    for d, (i, _) in registry.items():
        padding[i].add(d)
    S = RainbowFamily(ext, tuple(R.sets[i] | padding[i] for i in range(R.m)))
    T = S.restrict(x for x in S.elements if ext.colour_of[x] not in cls.large)
    trace = reduce_trace(T, params.ell, params.r0)
    dummies = set(registry)
    for witness in iter_P_witnesses(S, T, trace, cls.small, params.r0):
        try:
            res = switch(S, T, trace, witness.r, witness.element, witness.index)
        except SwitchError as exc:
            raise ImprovementError([f"switch failed: {exc}"]) from exc
        R_star = RainbowFamily(inst, tuple(s - dummies for s in res.new_family.sets))
        problems = _improvement_problems(R, R_star, cls, witness, params)
        if problems == [NOT_LEX_GREATER]:
            # the inserted colour tied with the pivot and a large colour fell onto it
            log.debug("skip witness %s: sorted counts unchanged", witness)
            continue
        if problems:
            raise ImprovementError(problems)
        return Improvement(R_star, witness, res.removed, cls)
    log.debug("stop: no usable witness up to depth %d", params.r0)
    return None


def greedy_initial(instance: ColouredInstance, m: int) -> RainbowFamily:
    """Round-robin greedy: each set in turn takes the lowest unused element it can hold."""
    if m < 0:
        raise ValueError(f"family size must be nonnegative, got {m}")
    sets: list[frozenset[int]] = [frozenset() for _ in range(m)]
    used: set[int] = set()
    # once T + x fails it fails for every superset of T, so rejections are final
    rejected: list[set[int]] = [set() for _ in range(m)]
    progress = True
    while progress:
        progress = False
        for i in range(m):
            for x in instance.matroid.ground:
                if x in used or x in rejected[i]:
                    continue
                if can_add(instance, sets[i], x):
                    sets[i] = sets[i] | {x}
                    used.add(x)
                    progress = True
                    break
                rejected[i].add(x)
    return RainbowFamily(instance, tuple(sets))


@dataclass
class RunStats:
    n: int
    m: int
    params: dict
    initial_volume: int
    iterations: list[dict] = field(default_factory=list)
    volume: int = 0
    deficient_colours: int = 0
    status: str = "stopped"
    capped: bool = False
    diagnostic: str | None = None
    wall_time: float = 0.0

    def summary(self) -> dict:
        return {
            "volume": self.volume,
            "n_squared": self.n * self.n,
            "initial_volume": self.initial_volume,
            "iterations": len(self.iterations),
            "deficient_colours": self.deficient_colours,
            "status": self.status,
            "capped": self.capped,
            "diagnostic": self.diagnostic,
        }

    def to_dict(self, include_timing: bool = False) -> dict:
        summary = self.summary()
        if include_timing:
            summary["wall_time"] = self.wall_time
        return {"n": self.n, "m": self.m, "params": self.params, "iterations": self.iterations, "summary": summary}


def _record(iteration: int, F: RainbowFamily, imp: Improvement) -> dict:
    return {
        "iteration": iteration,
        "volume": F.volume,
        "min_colour_count": min(F.colour_counts(), default=0),
        "min_set_size": min((len(s) for s in F.sets), default=0),
        "witness_depth": imp.witness.r,
        "inserted": imp.witness.element,
        "removed": len(imp.removed),
    }


def solve(
    instance: ColouredInstance,
    params: SolverParams,
    initial: RainbowFamily | None = None,
    on_step: Callable[[RainbowFamily, RainbowFamily], None] | None = None,
) -> tuple[RainbowFamily, RunStats]:
    """Iterate ``improve_step`` from the greedy start until it stops or the cap is hit.

    ``on_step(old, new)`` is called for every accepted step.
    """
    start = time.perf_counter()
    n = instance.n
    F = initial if initial is not None else greedy_initial(instance, params.family_size(n))
    F.validate()
    stats = RunStats(n=n, m=F.m, params=params.as_dict(), initial_volume=F.volume)
    while True:
        if len(stats.iterations) >= params.max_iterations:
            stats.status, stats.capped = "capped", True
            break
        try:
            imp = improve_step(F, params)
        except ImprovementError as exc:
            stats.status, stats.diagnostic = "diagnostic", str(exc)
            log.warning("improvement step rejected: %s", exc)
            break
        if imp is None:
            break
        # improve_step has already verified lex_compare(new, F) is GREATER
        if on_step is not None:
            on_step(F, imp.family)
        F = imp.family
        stats.iterations.append(_record(len(stats.iterations) + 1, F, imp))
    threshold = (1 - 3 * exact(params.epsilon)) * n
    stats.volume = F.volume
    stats.deficient_colours = sum(1 for v in F.colour_counts() if v <= threshold)
    stats.wall_time = time.perf_counter() - start
    return F, stats
