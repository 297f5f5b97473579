"""Coloured matroids: construction, random Rota instances, dummies, JSON I/O."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import jsonschema

from .matroid import (
    FreeExtension,
    GraphicMatroid,
    LinearMatroid,
    Matroid,
    MatroidError,
    UniformMatroid,
    next_prime,
    rank_of,
)

__all__ = [
    "InstanceError",
    "ColouredInstance",
    "make_rota_instance",
    "generate_instance",
    "extend_with_dummies",
    "serialize_instance",
    "parse_instance",
    "serialize_family",
    "parse_family",
    "INSTANCE_SCHEMA",
    "FAMILY_SCHEMA",
]


class InstanceError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ColouredInstance:
    """A matroid with a colour per element; every colour class is independent.

    ``n`` is the number of colours.  For a Rota instance every class is a
    basis of size ``n`` and the matroid has rank ``n``.
    """

    matroid: Matroid
    colour_of: tuple[int, ...]
    n: int
    colour_class: tuple[frozenset[int], ...] = field(init=False, repr=False)

    def __post_init__(self):
        colour_of = tuple(int(c) for c in self.colour_of)
        object.__setattr__(self, "colour_of", colour_of)
        if len(colour_of) != self.matroid.ground_size:
            raise InstanceError(
                f"colour map covers {len(colour_of)} elements but the ground set has {self.matroid.ground_size}"
            )
        classes: list[set[int]] = [set() for _ in range(self.n)]
        for x, c in enumerate(colour_of):
            if not 0 <= c < self.n:
                raise InstanceError(f"element {x} has colour {c} outside 0..{self.n - 1}")
            classes[c].add(x)
        frozen = tuple(frozenset(s) for s in classes)
        for c, cls in enumerate(frozen):
            if not self.matroid.is_independent(cls):
                raise InstanceError(f"colour class {c} is dependent")
        object.__setattr__(self, "colour_class", frozen)

    @property
    def ground_size(self) -> int:
        return self.matroid.ground_size

    def colours(self, elements: Iterable[int]) -> list[int]:
        return [self.colour_of[x] for x in elements]

    def is_rainbow(self, elements: Iterable[int]) -> bool:
        cs = self.colours(elements)
        return len(cs) == len(set(cs))

    def is_canonical(self) -> bool:
        """True for a Rota instance: ``n`` bases of size ``n`` in a rank-``n`` matroid."""
        if any(len(cls) != self.n for cls in self.colour_class):
            return False
        return rank_of(self.matroid, self.matroid.ground) == self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColouredInstance):
            return NotImplemented
        return self.n == other.n and self.colour_of == other.colour_of and self.matroid == other.matroid

    def __hash__(self) -> int:
        return hash((self.n, self.colour_of, self.matroid))


def make_rota_instance(M: Matroid, bases: Sequence[Iterable[int]]) -> ColouredInstance:
    """Colour ``bases[i]`` with colour ``i`` after checking the Rota hypotheses."""
    bases = [frozenset(b) for b in bases]
    n = len(bases)
    seen: dict[int, int] = {}
    for i, b in enumerate(bases):
        for x in b:
            if not 0 <= x < M.ground_size:
                raise InstanceError(f"basis {i} contains element {x} outside the ground set")
            if x in seen:
                raise InstanceError(f"element {x} lies in both basis {seen[x]} and basis {i}")
            seen[x] = i
    if len(seen) != M.ground_size:
        missing = sorted(set(M.ground) - set(seen))
        raise InstanceError(f"bases do not cover the ground set; uncovered elements {missing[:10]}")
    rank = rank_of(M, M.ground)
    if rank != n:
        raise InstanceError(f"matroid rank {rank} does not match the number of bases {n}")
    for i, b in enumerate(bases):
        if len(b) != n or not M.is_independent(b):
            raise InstanceError(f"colour class {i} is not a basis")
    colour_of = [0] * M.ground_size
    for x, i in seen.items():
        colour_of[x] = i
    return ColouredInstance(M, tuple(colour_of), n)


def _random_spanning_tree(num_vertices: int, rng: random.Random) -> list[tuple[int, int]]:
    # decode a uniformly random Pruefer sequence
    if num_vertices == 2:
        return [(0, 1)]
    seq = [rng.randrange(num_vertices) for _ in range(num_vertices - 2)]
    degree = [1] * num_vertices
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = min(u for u in range(num_vertices) if degree[u] == 1)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = (x for x in range(num_vertices) if degree[x] == 1)
    edges.append((u, w))
    return edges


def _random_invertible(n: int, p: int, rng: random.Random) -> list[list[int]]:
    while True:
        cols = [[rng.randrange(p) for _ in range(n)] for _ in range(n)]
        if LinearMatroid(cols, p).is_independent(range(n)):
            return cols


def generate_instance(kind: str, n: int, seed: int) -> ColouredInstance:
    """Deterministic random Rota instance of rank ``n``.

    ``uniform`` gives U(n, n^2) with colour ``i`` on elements ``i*n .. i*n+n-1``
    (every partition works, so the seed is unused).  ``graphic`` stacks ``n``
    random spanning trees on ``n + 1`` vertices.  ``linear`` concatenates ``n``
    random invertible matrices over the smallest prime field with ``p > n``.
    """
    if n < 1:
        raise InstanceError(f"rank must be at least 1, got {n}")
    rng = random.Random(seed)
    colour_of = tuple(x // n for x in range(n * n))
    if kind == "uniform":
        M: Matroid = UniformMatroid(n, n * n)
    elif kind == "graphic":
        edges = [e for _ in range(n) for e in _random_spanning_tree(n + 1, rng)]
        M = GraphicMatroid(edges, n + 1)
    elif kind == "linear":
        p = next_prime(n)
        columns = [col for _ in range(n) for col in _random_invertible(n, p, rng)]
        M = LinearMatroid(columns, p)
    else:
        raise InstanceError(f"unknown instance kind {kind!r}")
    return make_rota_instance(M, [range(i * n, (i + 1) * n) for i in range(n)])


def extend_with_dummies(
    inst: ColouredInstance, demand: Mapping[tuple[int, int], int]
) -> tuple[ColouredInstance, dict[int, tuple[int, int]]]:
    """Append one coloop per demanded ``(set index, colour)`` slot.

    Returns the extended instance and a registry from dummy element to the
    slot it was created for.  Slots are allocated in sorted key order.
    """
    registry: dict[int, tuple[int, int]] = {}
    colours = list(inst.colour_of)
    nxt = inst.ground_size
    for (idx, colour), count in sorted(demand.items()):
        if not 0 <= colour < inst.n:
            raise InstanceError(f"demanded colour {colour} does not exist")
        for _ in range(count):
            registry[nxt] = (idx, colour)
            colours.append(colour)
            nxt += 1
    if not registry:
        return inst, registry
    M = FreeExtension(inst.matroid, len(registry))
    return ColouredInstance(M, tuple(colours), inst.n), registry


# -- serialization ---------------------------------------------------------

INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["kind", "n", "colour_of"],
    "properties": {
        "kind": {"enum": ["uniform", "graphic", "linear"]},
        "n": {"type": "integer", "minimum": 1},
        "prime": {"type": "integer", "minimum": 2},
        "edges": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2},
        },
        "matrix_columns": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "colour_of": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "graphic"}}}, "then": {"required": ["edges"]}},
        {"if": {"properties": {"kind": {"const": "linear"}}}, "then": {"required": ["prime", "matrix_columns"]}},
    ],
}

FAMILY_SCHEMA = {
    "type": "object",
    "required": ["sets"],
    "properties": {
        "sets": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
    },
}


def _dump(obj: dict) -> str:
    return json.dumps(obj, separators=(", ", ": ")) + "\n"


def serialize_instance(inst: ColouredInstance) -> str:
    M = inst.matroid
    doc: dict = {"kind": M.kind, "n": inst.n}
    if isinstance(M, UniformMatroid):
        if M.r != inst.n:
            raise InstanceError("only rank-n uniform instances can be serialized")
    elif isinstance(M, GraphicMatroid):
        doc["edges"] = [list(e) for e in M.edges]
    elif isinstance(M, LinearMatroid):
        doc["prime"] = M.prime
        doc["matrix_columns"] = [list(c) for c in M.columns]
    else:
        raise InstanceError(f"matroid kind {M.kind!r} has no file representation")
    doc["colour_of"] = list(inst.colour_of)
    return _dump(doc)


def _load(text: str, schema: dict, what: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{what}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InstanceError(f"{what}: schema violation at {where}: {exc.message}") from None
    return doc


def parse_instance(text: str) -> ColouredInstance:
    doc = _load(text, INSTANCE_SCHEMA, "instance")
    n, colour_of, kind = doc["n"], doc["colour_of"], doc["kind"]
    try:
        if kind == "uniform":
            M: Matroid = UniformMatroid(n, len(colour_of))
        elif kind == "graphic":
            M = GraphicMatroid(doc["edges"])
        else:
            M = LinearMatroid(doc["matrix_columns"], doc["prime"])
    except MatroidError as exc:
        raise InstanceError(f"instance: {exc}") from None
    if len(colour_of) != M.ground_size:
        raise InstanceError(
            f"instance: colour_of has {len(colour_of)} entries but the matroid has {M.ground_size} elements"
        )
    for x, c in enumerate(colour_of):
        if c >= n:
            raise InstanceError(f"instance: colour_of/{x}: colour {c} out of range 0..{n - 1}")
    bases: list[list[int]] = [[] for _ in range(n)]
    for x, c in enumerate(colour_of):
        bases[c].append(x)
    return make_rota_instance(M, bases)


def serialize_family(sets: Iterable[Iterable[int]]) -> str:
    return _dump({"sets": [sorted(s) for s in sets]})


def parse_family(text: str) -> list[frozenset[int]]:
    doc = _load(text, FAMILY_SCHEMA, "family")
    out = []
    for i, s in enumerate(doc["sets"]):
        fs = frozenset(s)
        if len(fs) != len(s):
            raise InstanceError(f"family: sets/{i}: repeated element")
        out.append(fs)
    return out
