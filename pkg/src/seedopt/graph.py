"""The generation graph over machine subsets and its structural queries."""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .model import CostVector, GenerationSystem, SystemValidationError, validate_system

__all__ = [
    "MAX_MACHINES",
    "CapacityError",
    "GraphEdge",
    "SeedGraph",
    "SubsetKey",
    "build_graph",
    "export_dot",
    "seed_vertices",
]

MAX_MACHINES = 24


class CapacityError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class SubsetKey:
    """Canonical handle for a machine subset.

    Ordered lexicographically by the sorted id tuple.  ``mask`` has bit ``i`` set
    for the ``i``-th machine in sorted id order of the owning system.
    """

    ids: tuple[str, ...]
    mask: int = field(default=0, compare=False)

    @classmethod
    def of(cls, subset: Iterable[str], machine_order: tuple[str, ...] = ()) -> "SubsetKey":
        ids = tuple(sorted(set(subset)))
        position = {m: i for i, m in enumerate(machine_order)}
        mask = 0
        for m in ids:
            if m in position:
                mask |= 1 << position[m]
        return cls(ids, mask)

    @property
    def members(self) -> frozenset[str]:
        return frozenset(self.ids)

    def __len__(self) -> int:
        return len(self.ids)

    def __str__(self) -> str:
        return "{" + ",".join(self.ids) + "}"


@dataclass(frozen=True)
class GraphEdge:
    source: SubsetKey
    target: SubsetKey
    rule_id: str
    cost: CostVector


@dataclass(frozen=True)
class SeedGraph:
    vertices: frozenset[SubsetKey]
    edges: tuple[GraphEdge, ...]
    target: SubsetKey
    width: int  # number of cost components

    def out_edges(self, vertex: SubsetKey) -> list[GraphEdge]:
        """Edges leaving ``vertex`` in canonical (target, rule_id) order."""
        return self._adjacency.get(vertex, [])

    @cached_property
    def _adjacency(self) -> dict[SubsetKey, list[GraphEdge]]:
        adj: dict[SubsetKey, list[GraphEdge]] = defaultdict(list)
        for e in sorted(self.edges, key=lambda e: (e.target, e.rule_id)):
            adj[e.source].append(e)
        return dict(adj)


def build_graph(sys: GenerationSystem) -> SeedGraph:
    """Materialize one edge per rule; vertices are rule endpoints plus the target.

    Raises :class:`SystemValidationError` if validation reports errors and
    :class:`CapacityError` beyond :data:`MAX_MACHINES` machines.
    """
    if len(sys.machines) > MAX_MACHINES:
        raise CapacityError(f"{len(sys.machines)} machines exceeds the cap of {MAX_MACHINES}")
    diagnostics = validate_system(sys)
    if any(d.severity == "error" for d in diagnostics):
        raise SystemValidationError(diagnostics)

    order = tuple(sorted(sys.machine_ids))
    target = SubsetKey.of(order, order)
    vertices = {target}
    edges = []
    for rule in sys.rules:
        src = SubsetKey.of(rule.lhs_machines, order)
        dst = SubsetKey.of(rule.output, order)
        vertices.update((src, dst))
        edges.append(GraphEdge(src, dst, rule.rule_id, rule.cost))
    edges.sort(key=lambda e: (e.source, e.target, e.rule_id))
    return SeedGraph(frozenset(vertices), tuple(edges), target, len(sys.schema))


def seed_vertices(g: SeedGraph) -> list[SubsetKey]:
    """All vertices with a directed path (possibly empty) to the target, sorted."""
    incoming: dict[SubsetKey, list[SubsetKey]] = defaultdict(list)
    for e in g.edges:
        incoming[e.target].append(e.source)
    seen = {g.target}
    queue = deque([g.target])
    while queue:
        v = queue.popleft()
        for u in incoming.get(v, ()):
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return sorted(seen)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(g: SeedGraph) -> str:
    lines = ["digraph generation {"]
    for v in sorted(g.vertices):
        attrs = " [peripheries=2]" if v == g.target else ""
        lines.append(f"  {_quote(str(v))}{attrs};")
    for e in g.edges:
        label = _quote(f"{e.rule_id} {e.cost}")
        lines.append(f"  {_quote(str(e.source))} -> {_quote(str(e.target))} [label={label}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
