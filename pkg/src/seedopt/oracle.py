"""Brute-force ground truth for seeds and cheapest generation sequences.

Nothing here touches the graph or solver modules: states are plain bitmasks
and costs are summed by hand, so agreement with the fast path means something.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import SubsetKey
from .model import CostSchema, GenerationRule, GenerationSystem, MachineSpec

__all__ = ["ORACLE_CAP", "OracleError", "oracle_best_cost", "oracle_seeds", "random_system"]

ORACLE_CAP = 12


class OracleError(ValueError):
    pass


def _encoder(sys: GenerationSystem):
    if len(sys.machines) > ORACLE_CAP:
        raise OracleError(f"oracle handles at most {ORACLE_CAP} machines")
    index = {m: i for i, m in enumerate(sorted(sys.machine_ids))}

    def encode(ids: Iterable[str]) -> int:
        mask = 0
        for m in ids:
            mask |= 1 << index[m]
        return mask

    return encode, (1 << len(index)) - 1


def _moves(sys: GenerationSystem, encode) -> dict[int, list[tuple[int, GenerationRule]]]:
    moves: dict[int, list[tuple[int, GenerationRule]]] = {}
    for rule in sys.rules:
        if rule.output & rule.resources:
            continue
        moves.setdefault(encode(rule.lhs_machines), []).append((encode(rule.output), rule))
    return moves


def _decode(sys: GenerationSystem, mask: int) -> SubsetKey:
    order = sorted(sys.machine_ids)
    return SubsetKey.of([m for i, m in enumerate(order) if mask >> i & 1], tuple(order))


def oracle_seeds(sys: GenerationSystem) -> set[SubsetKey]:
    encode, full = _encoder(sys)
    moves = _moves(sys, encode)
    limit = 1 << len(sys.machines)

    def reaches_full(start: int) -> bool:
        seen = {start}
        stack = [(start, 0)]
        while stack:
            state, steps = stack.pop()
            if state == full:
                return True
            if steps >= limit:
                continue
            for nxt, _ in moves.get(state, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append((nxt, steps + 1))
        return False

    candidates = set(moves) | {full}
    return {_decode(sys, s) for s in candidates if reaches_full(s)}


def oracle_best_cost(sys: GenerationSystem, seed: SubsetKey | Iterable[str],
                     keys: Sequence[str]) -> tuple[Fraction, ...]:
    """Lexicographic minimum over all simple rule sequences of the cost restricted to ``keys``."""
    encode, full = _encoder(sys)
    moves = _moves(sys, encode)
    cols = [sys.schema.components.index(k) for k in keys]
    ids = seed.ids if isinstance(seed, SubsetKey) else seed
    start = encode(ids)

    def best(state: int, on_path: frozenset[int]):
        if state == full:
            return tuple(Fraction(0) for _ in cols)
        result = None
        for nxt, rule in moves.get(state, ()):
            if nxt in on_path:
                continue
            rest = best(nxt, on_path | {nxt})
            if rest is None:
                continue
            here = tuple(rule.cost.values[c] for c in cols)
            total = tuple(a + b for a, b in zip(here, rest))
            if result is None or total < result:
                result = total
        return result

    answer = best(start, frozenset([start]))
    if answer is None:
        raise OracleError(f"{sorted(ids)} is not a seed")
    return answer


def _random_subset(rng: random.Random, pool: Sequence[str]) -> frozenset[str]:
    return frozenset(x for x in pool if rng.random() < 0.5)


def random_system(rng: random.Random, *, cannibalize: float = 0.25) -> GenerationSystem:
    """Draw a small valid system: 1-4 machines, 1-3 resources, 0-6 rules, integer costs 0-10.

    Resources reuse a machine id with probability ``cannibalize``.  Rules that
    break weak regularity or repeat an existing (machines, resources) pair are
    redrawn; the rule count is capped by the number of distinct pairs.
    """
    n_machines = rng.randint(1, 4)
    machines = [f"m{i}" for i in range(n_machines)]
    resources: list[str] = []
    for i in range(rng.randint(1, 3)):
        rid = rng.choice(machines) if rng.random() < cannibalize else f"r{i}"
        if rid not in resources:
            resources.append(rid)
    rules: list[GenerationRule] = []
    used: set[tuple[frozenset[str], frozenset[str]]] = set()
    n_rules = min(rng.randint(0, 6), 2 ** (len(machines) + len(resources)))
    for i in range(n_rules):
        while True:
            lhs = _random_subset(rng, machines)
            res = _random_subset(rng, resources)
            out = _random_subset(rng, machines)
            if out & res or (lhs, res) in used:
                continue
            break
        used.add((lhs, res))
        cost = (rng.randint(0, 10), rng.randint(0, 10))
        rules.append(GenerationRule(f"g{i}", lhs, res, out, cost))
    specs = [MachineSpec(m, rng.randint(1, 5)) for m in machines]
    return GenerationSystem(specs, resources, CostSchema(("money", "time")), rules)
