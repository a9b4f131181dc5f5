"""Seed selection: simple-path enumeration and ranking under vector objectives."""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import groupby
from typing import Sequence

from .graph import GraphEdge, SeedGraph, SubsetKey, seed_vertices
from .model import CostVector, GenerationSystem

__all__ = [
    "DEFAULT_MAX_PATHS",
    "TRANSPORT_MASS",
    "GenerationPath",
    "Mode",
    "NoPathError",
    "Objective",
    "ObjectiveError",
    "PathEnumeration",
    "Ranking",
    "SeedReport",
    "enumerate_simple_paths",
    "path_cost",
    "rank_seeds",
]

TRANSPORT_MASS = "transport_mass"
DEFAULT_MAX_PATHS = 1_000_000


class NoPathError(ValueError):
    """The requested source cannot reach the target."""


class ObjectiveError(ValueError):
    pass


class Mode(str, enum.Enum):
    LEXICOGRAPHIC = "lex"
    PARETO = "pareto"


@dataclass(frozen=True)
class GenerationPath:
    source: SubsetKey
    edges: tuple[GraphEdge, ...]
    cost: CostVector

    @property
    def rule_ids(self) -> list[str]:
        return [e.rule_id for e in self.edges]


@dataclass(frozen=True)
class PathEnumeration:
    paths: list[GenerationPath]
    overflow: bool = False

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def __getitem__(self, i):
        return self.paths[i]


def path_cost(edges: Sequence[GraphEdge] | GenerationPath, width: int | None = None) -> CostVector:
    """Componentwise sum of edge costs; the zero vector for an empty path."""
    if isinstance(edges, GenerationPath):
        edges = edges.edges
    if not edges:
        if width is None:
            raise ValueError("width is required for an empty path")
        return CostVector.zero(width)
    total = edges[0].cost
    for e in edges[1:]:
        total = total + e.cost
    return total


def enumerate_simple_paths(g: SeedGraph, source: SubsetKey,
                           max_paths: int = DEFAULT_MAX_PATHS) -> PathEnumeration:
    """Depth-first enumeration of every simple path from ``source`` to the target.

    Stops after ``max_paths`` paths and flags ``overflow`` if more exist.
    """
    if max_paths < 1:
        raise ValueError("max_paths must be positive")
    if source not in seed_vertices(g):
        raise NoPathError(f"{source} cannot generate {g.target}")

    if source == g.target:
        return PathEnumeration([GenerationPath(source, (), CostVector.zero(g.width))])

    found: list[GenerationPath] = []
    on_path = {source}
    trail: list[GraphEdge] = []
    stack = [iter(g.out_edges(source))]
    while stack:
        e = next(stack[-1], None)
        if e is None:
            stack.pop()
            if trail:
                on_path.discard(trail.pop().target)
            continue
        if e.target in on_path:
            continue
        if e.target == g.target:
            if len(found) == max_paths:
                return PathEnumeration(found, overflow=True)
            edges = (*trail, e)
            found.append(GenerationPath(source, edges, path_cost(edges)))
            continue
        on_path.add(e.target)
        trail.append(e)
        stack.append(iter(g.out_edges(e.target)))
    return PathEnumeration(found)


@dataclass(frozen=True)
class Objective:
    keys: tuple[str, ...]
    mode: Mode = Mode.LEXICOGRAPHIC
    rng_seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "keys", tuple(self.keys))
        object.__setattr__(self, "mode", Mode(self.mode))
        if not self.keys:
            raise ObjectiveError("objective needs at least one key")
        if len(set(self.keys)) != len(self.keys):
            raise ObjectiveError("objective keys must be distinct")
        if self.rng_seed is not None and (isinstance(self.rng_seed, bool) or self.rng_seed < 0):
            raise ObjectiveError("rng_seed must be a nonnegative integer")

    def check(self, sys: GenerationSystem) -> None:
        comps = sys.schema.components
        if TRANSPORT_MASS in comps and TRANSPORT_MASS in self.keys:
            raise ObjectiveError(f"{TRANSPORT_MASS!r} is ambiguous: it is also a cost component")
        for k in self.keys:
            if k != TRANSPORT_MASS and k not in comps:
                raise ObjectiveError(f"unknown objective component {k!r}")


@dataclass(frozen=True)
class SeedReport:
    seed: SubsetKey
    transport_mass: Fraction
    best_path: GenerationPath
    key: tuple[Fraction, ...]
    rank: int
    pareto_optimal: bool | None = None

    @property
    def best_cost(self) -> CostVector:
        return self.best_path.cost


@dataclass(frozen=True)
class Ranking:
    reports: list[SeedReport]
    objective: Objective
    target: SubsetKey
    overflow: bool = False

    def __len__(self) -> int:
        return len(self.reports)

    def __iter__(self):
        return iter(self.reports)

    def __getitem__(self, i):
        return self.reports[i]

    @property
    def optimal(self) -> SeedReport:
        return self.reports[0]


@dataclass
class _Candidate:
    seed: SubsetKey
    mass: Fraction
    path: GenerationPath
    key: tuple[Fraction, ...]


def _dominates(a: Sequence[Fraction], b: Sequence[Fraction]) -> bool:
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def rank_seeds(g: SeedGraph, sys: GenerationSystem, obj: Objective,
               max_paths: int = DEFAULT_MAX_PATHS) -> Ranking:
    """Rank every seed of the target by the objective's key vector.

    Each seed is represented by its lexicographically cheapest simple path over
    the objective's cost keys (then the full cost vector, then path length).
    Exact key ties between seeds go to the shorter path, then canonical subset
    order; with ``rng_seed`` set they are shuffled by a seeded generator instead.
    """
    obj.check(sys)
    comps = sys.schema.components
    cost_idx = [comps.index(k) for k in obj.keys if k != TRANSPORT_MASS]

    candidates: list[_Candidate] = []
    overflow = False
    for seed in seed_vertices(g):
        paths = enumerate_simple_paths(g, seed, max_paths)
        overflow |= paths.overflow
        best = min(
            paths,
            key=lambda p: (tuple(p.cost[i] for i in cost_idx), p.cost.values, len(p.edges)),
        )
        mass = sum((sys.masses[m] for m in seed.ids), Fraction(0))
        key = tuple(mass if k == TRANSPORT_MASS else best.cost[comps.index(k)] for k in obj.keys)
        candidates.append(_Candidate(seed, mass, best, key))

    if obj.mode is Mode.PARETO:
        ordered, flags = _pareto_order(candidates)
    else:
        ordered = _lex_order(candidates, obj.rng_seed)
        flags = {}

    reports = [
        SeedReport(c.seed, c.mass, c.path, c.key, rank, flags.get(c.seed))
        for rank, c in enumerate(ordered, start=1)
    ]
    return Ranking(reports, obj, g.target, overflow)


def _lex_order(cands: list[_Candidate], rng_seed: int | None) -> list[_Candidate]:
    if rng_seed is None:
        return sorted(cands, key=lambda c: (c.key, len(c.path.edges), c.seed))
    rng = random.Random(rng_seed)
    out: list[_Candidate] = []
    for _, group in groupby(sorted(cands, key=lambda c: (c.key, c.seed)), key=lambda c: c.key):
        tied = list(group)
        rng.shuffle(tied)
        out.extend(tied)
    return out


def _pareto_order(cands: list[_Candidate]) -> tuple[list[_Candidate], dict[SubsetKey, bool]]:
    remaining = sorted(cands, key=lambda c: c.seed)
    ordered: list[_Candidate] = []
    flags: dict[SubsetKey, bool] = {}
    first = True
    while remaining:
        front = [c for c in remaining if not any(_dominates(o.key, c.key) for o in remaining)]
        for c in front:
            flags[c.seed] = first
        ordered.extend(front)
        taken = {c.seed for c in front}
        remaining = [c for c in remaining if c.seed not in taken]
        first = False
    return ordered, flags
