"""Seeded randomized suites for every checkable guarantee.

Each trial draws from ``random.Random(f"{name}:{seed}:{t}")`` so a failing
trial can be replayed from the ``(seed, t)`` pair reported in its message.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable

from .family import (
    RainbowFamily,
    availability_graph,
    can_add,
    colour_excess,
    exact,
    k_excess,
    reduce_once,
    reduce_trace,
)
from .graphs import Y, BipartiteGraph
from .instances import ColouredInstance, generate_instance
from .matroid import (
    FreeExtension,
    GraphicMatroid,
    LinearMatroid,
    Matroid,
    UniformMatroid,
    check_axioms,
)
from .oracle import (
    check_increment_lemma,
    check_k_excess_bound,
    check_zero_excess_bound,
    exact_rota,
)
from .switching import SwitchError, check_switch_result, switch

__all__ = [
    "SuiteResult",
    "SUITES",
    "run_suite",
    "random_bipartite",
    "random_family",
    "random_matroid",
    "switch_scenario",
]

KINDS = ("uniform", "graphic", "linear")
DENSITIES = tuple(round(0.1 * i, 1) for i in range(1, 10))


@dataclass
class SuiteResult:
    name: str
    trials: int
    seed: int
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def line(self) -> str:
        ok = self.trials - len(self.failures)
        return f"{self.name}: {ok}/{self.trials} trials passed (seed {self.seed})"


def trial_rng(name: str, seed: int, t: int) -> random.Random:
    return random.Random(f"{name}:{seed}:{t}")


# -- generators ------------------------------------------------------------


def random_bipartite(rng: random.Random, max_side: int = 12) -> BipartiteGraph:
    nx, ny = rng.randint(1, max_side), rng.randint(1, max_side)
    p = rng.choice(DENSITIES)
    edges = frozenset((a, b) for a in range(nx) for b in range(ny) if rng.random() < p)
    return BipartiteGraph(nx, ny, edges)


def random_family(instance: ColouredInstance, m: int, rng: random.Random, fill: float | None = None) -> RainbowFamily:
    """Random disjoint rainbow independent sets: elements in random order, each
    offered (with probability ``fill``) to the sets in random order."""
    if fill is None:
        fill = rng.random()
    sets: list[frozenset[int]] = [frozenset() for _ in range(m)]
    elems = list(instance.matroid.ground)
    rng.shuffle(elems)
    for x in elems:
        if rng.random() >= fill:
            continue
        order = list(range(m))
        rng.shuffle(order)
        for i in order:
            if can_add(instance, sets[i], x):
                sets[i] = sets[i] | {x}
                break
    return RainbowFamily(instance, tuple(sets))


def random_matroid(rng: random.Random, max_ground: int = 12) -> Matroid:
    kind = rng.choice(["uniform", "graphic", "linear", "free-extension"])
    N = rng.randint(0, max_ground)
    if kind == "uniform":
        return UniformMatroid(rng.randint(0, N), N)
    if kind == "graphic":
        v = rng.randint(1, 6)
        return GraphicMatroid([(rng.randrange(v), rng.randrange(v)) for _ in range(N)], v)
    if kind == "linear":
        p = rng.choice([2, 3, 5, 7])
        d = rng.randint(1, 4)
        return LinearMatroid([[rng.randrange(p) for _ in range(d)] for _ in range(N)], p)
    dummies = rng.randint(0, 3)
    inner = random_matroid(rng, max_ground - dummies)
    while isinstance(inner, FreeExtension):
        inner = random_matroid(rng, max_ground - dummies)
    return FreeExtension(inner, dummies)


def random_rota(rng: random.Random, n_lo: int, n_hi: int) -> ColouredInstance:
    return generate_instance(rng.choice(KINDS), rng.randint(n_lo, n_hi), rng.randrange(2**31))


def uniform_coloured(rank: int, colours: int) -> ColouredInstance:
    """U(rank, rank * colours) with colour classes of size ``rank``."""
    N = rank * colours
    return ColouredInstance(UniformMatroid(rank, N), tuple(x // rank for x in range(N)), colours)


def switch_scenario(rng: random.Random, r: int):
    """A valid switching input at depth ``r`` with ``ell = 9^r``.

    Returns ``(S, T, trace, e, i0, protected)`` or ``None`` when the draw has
    no admissible ``(i0, e)``.
    """
    ell = 9**r
    if r == 0:
        inst = random_rota(rng, 2, 6)
        m = rng.randint(1, inst.n)
    elif r == 1:
        if rng.random() < 0.5:
            inst = generate_instance(rng.choice(("uniform", "graphic")), rng.randint(10, 13), rng.randrange(2**31))
            m = rng.randint(10, inst.n)
        else:
            inst = uniform_coloured(rng.randint(2, 4), rng.randint(12, 20))
            m = rng.randint(10, 16)
    else:
        inst = uniform_coloured(rng.randint(2, 4), rng.randint(50, 70))
        m = rng.randint(82, 100)
    S = random_family(inst, m, rng, fill=rng.uniform(0.5, 1.0))
    keep_prob = rng.uniform(0.5, 1.0)
    T = S.restrict(x for x in S.elements if rng.random() < keep_prob)
    trace = reduce_trace(T, ell, r)
    level = trace.levels[r]
    outside = [x for x in inst.matroid.ground if x not in S.elements]
    rng.shuffle(outside)
    # prefer targets whose level-r set has lost elements, so the recursion is exercised
    order = sorted(range(m), key=lambda i: (level.sets[i] == T.sets[i], rng.random()))
    for i0 in order:
        for e in outside:
            if can_add(inst, level.sets[i0], e):
                others = [j for j in range(m) if j != i0]
                budget = min(len(others), ell // 2 ** (r + 1))
                protected = frozenset(rng.sample(others, rng.randint(0, budget)))
                return S, T, trace, e, i0, protected
    return None


# -- suites ----------------------------------------------------------------


def suite_axioms(trials: int, seed: int) -> list[str]:
    failures = []
    for t in range(trials):
        M = random_matroid(trial_rng("axioms", seed, t))
        if not check_axioms(M):
            failures.append(f"trial {t}: axioms fail for {M!r}")
    return failures


def suite_zero_excess(trials: int, seed: int) -> list[str]:
    failures = []
    for t in range(trials):
        G = random_bipartite(trial_rng("zero-excess", seed, t))
        res = check_zero_excess_bound(G)
        if not res.holds:
            failures.append(f"trial {t}: lhs {res.lhs} < rhs {res.rhs} on {sorted(G.edges)}")
    return failures


def suite_k_excess(trials: int, seed: int) -> list[str]:
    failures = []
    for t in range(trials):
        rng = trial_rng("k-excess", seed, t)
        G = random_bipartite(rng)
        k = rng.choice((0, 1, 2, 3))
        Y_sub = [y for y in range(G.y_size) if rng.random() < 0.6] or [0]
        res = check_k_excess_bound(G, Y_sub, k)
        if not res.holds:
            failures.append(f"trial {t}: k={k} Y'={Y_sub} lhs {res.lhs} < rhs {res.rhs}")
    return failures


def suite_excess_identity(trials: int, seed: int) -> list[str]:
    failures = []
    for t in range(trials):
        rng = trial_rng("excess-identity", seed, t)
        inst = random_rota(rng, 2, 5)
        F = random_family(inst, rng.randint(1, inst.n), rng)
        A = availability_graph(F)
        for c in range(inst.n):
            if A.adj_y[c]:
                want = k_excess(A, (Y, c), 0)
            else:
                want = inst.n
            got = colour_excess(c, F)
            if got != want:
                failures.append(f"trial {t}: colour {c}: excess {got} != {want}")
    return failures


def _excess_sum_trials(name: str, trials: int, seed: int, integral_only: bool) -> list[str]:
    failures = []
    for t in range(trials):
        rng = trial_rng(name, seed, t)
        eps = rng.choice((0.2, 0.3))
        ranks = range(1, 11)
        if integral_only:
            ranks = [n for n in ranks if ((1 - exact(eps)) * n).denominator == 1]
        n = rng.choice(ranks)
        inst = generate_instance(rng.choice(KINDS), n, rng.randrange(2**31))
        m = math.ceil((1 - exact(eps)) * n)
        F = random_family(inst, m, rng)
        total = sum(colour_excess(c, F) for c in range(n))
        if total < exact(eps) ** 2 * n * n:
            failures.append(f"trial {t}: n={n} m={m} eps={eps} sum of excesses {total} < eps^2 n^2")
    return failures


def suite_excess_sum(trials: int, seed: int) -> list[str]:
    """Families of ceil((1 - eps) n) sets for every n <= 10."""
    return _excess_sum_trials("excess-sum", trials, seed, integral_only=False)


def suite_excess_sum_integral(trials: int, seed: int) -> list[str]:
    """Only ranks where (1 - eps) n is a whole number of sets."""
    return _excess_sum_trials("excess-sum-integral", trials, seed, integral_only=True)


def suite_reduction(trials: int, seed: int) -> list[str]:
    failures = []
    for t in range(trials):
        rng = trial_rng("reduction", seed, t)
        inst = random_rota(rng, 2, 7)
        T = random_family(inst, rng.randint(1, inst.n), rng)
        keep = rng.uniform(0.3, 1.0)
        S_hat = T.restrict(x for x in T.elements if rng.random() < keep)
        ell = rng.randint(1, max(1, T.m - 1))
        RT, RS = reduce_once(T, ell), reduce_once(S_hat, ell)
        if not RS.is_subfamily_of(RT):
            failures.append(f"trial {t}: monotonicity fails at ell={ell}")
        full = set(range(inst.n)).intersection(*T.set_colours) if T.m else set()
        for c in full:
            if any(c not in cs for cs in RT.set_colours):
                failures.append(f"trial {t}: colour {c} lost from some set by reduction")
        for F in (RT, RS):
            if not F.is_valid():
                failures.append(f"trial {t}: reduced family invalid: {F.problems()}")
    return failures


def suite_increment(trials: int, seed: int) -> list[str]:
    failures = []
    for t in range(trials):
        rng = trial_rng("increment", seed, t)
        inst = random_rota(rng, 2, 6)
        m = rng.randint(1, inst.n)
        F = random_family(inst, m, rng)
        c = rng.randrange(inst.n)
        k = rng.randint(1, m + 1)
        ell = rng.randint(1, m)
        rep = check_increment_lemma(F, c, k, ell)
        if not rep.holds:
            failures.append(f"trial {t}: neither branch holds: {rep}")
    return failures


def suite_switching(trials: int, seed: int) -> list[str]:
    failures = []
    for t in range(trials):
        rng = trial_rng("switching", seed, t)
        r = t % 3
        scenario = None
        while scenario is None:
            scenario = switch_scenario(rng, r)
        S, T, trace, e, i0, protected = scenario
        try:
            res = switch(S, T, trace, r, e, i0, protected)
        except SwitchError as exc:
            failures.append(f"trial {t} (r={r}): switch raised {exc}")
            continue
        for p in check_switch_result(S, T, r, e, protected, res):
            failures.append(f"trial {t} (r={r}): {p}")
    return failures


def suite_rota(trials: int, seed: int) -> list[str]:
    failures = []
    for t in range(trials):
        n = 1 + t % 3
        kind = KINDS[(t // 3) % 3]
        inst = generate_instance(kind, n, seed * 100_003 + t)
        dec = exact_rota(inst)
        if dec is None:
            failures.append(f"trial {t}: no decomposition for {kind} n={n}")
            continue
        F = RainbowFamily(inst, tuple(dec))
        if F.problems() or F.volume != n * n or any(len(b) != n for b in dec):
            failures.append(f"trial {t}: decomposition invalid: {F.problems()}")
    return failures


SUITES: dict[str, Callable[[int, int], list[str]]] = {
    "axioms": suite_axioms,
    "4": suite_zero_excess,
    "5": suite_k_excess,
    "6": suite_increment,
    "7": suite_switching,
    "excess-sum": suite_excess_sum,
    "excess-sum-integral": suite_excess_sum_integral,
    "excess-identity": suite_excess_identity,
    "reduction": suite_reduction,
    "rota": suite_rota,
}


def run_suite(name: str, trials: int, seed: int = 0) -> SuiteResult:
    return SuiteResult(name, trials, seed, SUITES[name](trials, seed))
