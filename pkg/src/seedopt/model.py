"""Generation systems: machines, resources and a rule table for the generation function.

A generation system is the triple ``(M, R, G)``.  ``G`` maps a machine subset and a
resource subset to a machine subset; here it is stored as a finite table of
:class:`GenerationRule` objects and evaluates to the empty set off-table.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

__all__ = [
    "CostSchema",
    "CostVector",
    "Diagnostic",
    "GenerationRule",
    "GenerationSystem",
    "InvalidArgumentError",
    "MachineSpec",
    "SystemValidationError",
    "exact",
    "generate",
    "is_self_replicating",
    "is_token",
    "validate_system",
]

_TOKEN = re.compile(r"[^\s,]+")


class InvalidArgumentError(ValueError):
    """An argument falls outside the declared machine or resource sets."""


class SystemValidationError(ValueError):
    """Raised when an operation needs a valid system and validation found errors."""

    def __init__(self, diagnostics: Sequence["Diagnostic"]):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.severity == "error"]
        super().__init__("; ".join(str(d) for d in errors) or "invalid system")


def is_token(value: object) -> bool:
    return isinstance(value, str) and _TOKEN.fullmatch(value) is not None


def exact(value: int | float | Fraction | Decimal | str) -> Fraction:
    """Convert a number to an exact rational.

    Floats are read through their shortest decimal repr, so ``exact(0.1) == Fraction(1, 10)``.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, Decimal) and not value.is_finite():
        raise ValueError(f"non-finite value {value!r}")
    return Fraction(value)


@dataclass(frozen=True)
class CostVector:
    values: tuple[Fraction, ...]

    def __init__(self, values: Iterable[int | float | Fraction | Decimal | str]):
        object.__setattr__(self, "values", tuple(exact(v) for v in values))

    @classmethod
    def zero(cls, width: int) -> "CostVector":
        return cls([0] * width)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.values)

    def __getitem__(self, i: int) -> Fraction:
        return self.values[i]

    def __add__(self, other: "CostVector") -> "CostVector":
        if len(other) != len(self):
            raise ValueError("cost vectors of different length")
        return CostVector(a + b for a, b in zip(self.values, other.values))

    def scaled(self, index: int, factor) -> "CostVector":
        f = exact(factor)
        return CostVector(v * f if i == index else v for i, v in enumerate(self.values))

    def __str__(self) -> str:
        return "(" + ", ".join(format_number(v) for v in self.values) + ")"


def format_number(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return repr(float(value))


@dataclass(frozen=True)
class MachineSpec:
    id: str
    mass: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "mass", exact(self.mass))


@dataclass(frozen=True)
class CostSchema:
    components: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    def __len__(self) -> int:
        return len(self.components)

    def index(self, name: str) -> int:
        return self.components.index(name)


@dataclass(frozen=True)
class GenerationRule:
    rule_id: str
    lhs_machines: frozenset[str]
    resources: frozenset[str]
    output: frozenset[str]
    cost: CostVector

    def __post_init__(self):
        object.__setattr__(self, "lhs_machines", frozenset(self.lhs_machines))
        object.__setattr__(self, "resources", frozenset(self.resources))
        object.__setattr__(self, "output", frozenset(self.output))
        if not isinstance(self.cost, CostVector):
            object.__setattr__(self, "cost", CostVector(self.cost))


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    where: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.where}: {self.message}"


@dataclass(frozen=True)
class GenerationSystem:
    machines: tuple[MachineSpec, ...]
    resources: tuple[str, ...]
    schema: CostSchema
    rules: tuple[GenerationRule, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "machines", tuple(self.machines))
        object.__setattr__(self, "resources", tuple(self.resources))
        object.__setattr__(self, "rules", tuple(self.rules))
        if not isinstance(self.schema, CostSchema):
            object.__setattr__(self, "schema", CostSchema(tuple(self.schema)))

    @cached_property
    def machine_ids(self) -> frozenset[str]:
        return frozenset(m.id for m in self.machines)

    @cached_property
    def resource_ids(self) -> frozenset[str]:
        return frozenset(self.resources)

    @cached_property
    def masses(self) -> dict[str, Fraction]:
        return {m.id: m.mass for m in self.machines}

    @cached_property
    def _table(self) -> dict[tuple[frozenset[str], frozenset[str]], GenerationRule]:
        table = {}
        for rule in self.rules:
            table.setdefault((rule.lhs_machines, rule.resources), rule)
        return table

    def rule(self, rule_id: str) -> GenerationRule:
        for r in self.rules:
            if r.rule_id == rule_id:
                return r
        raise KeyError(rule_id)

    def lookup(self, machines: Iterable[str], resources: Iterable[str]) -> GenerationRule | None:
        return self._table.get((frozenset(machines), frozenset(resources)))

    def without_rule(self, rule_id: str) -> "GenerationSystem":
        return GenerationSystem(
            self.machines, self.resources, self.schema,
            tuple(r for r in self.rules if r.rule_id != rule_id),
        )


def _check_subset(items: frozenset[str], universe: frozenset[str], kind: str) -> None:
    for item in sorted(items - universe):
        raise InvalidArgumentError(f"{item!r} is not a declared {kind}")


def generate(sys: GenerationSystem, machines: Iterable[str], resources: Iterable[str]) -> frozenset[str]:
    """Evaluate the generation function; off-table pairs produce the empty set."""
    machines, resources = frozenset(machines), frozenset(resources)
    _check_subset(machines, sys.machine_ids, "machine")
    _check_subset(resources, sys.resource_ids, "resource")
    rule = sys.lookup(machines, resources)
    return rule.output if rule is not None else frozenset()


def is_self_replicating(sys: GenerationSystem, subset: Iterable[str]) -> bool:
    subset = frozenset(subset)
    _check_subset(subset, sys.machine_ids, "machine")
    return any(r.lhs_machines == subset and r.output == subset for r in sys.rules)


def _fmt_ids(ids: Iterable[str]) -> str:
    return "{" + ",".join(sorted(ids)) + "}"


def validate_system(sys: GenerationSystem) -> list[Diagnostic]:
    """Check every structural invariant of ``sys``.

    Errors make the system unusable for graph construction.  Warnings flag
    legal but suspicious content: a target set with no self-replication rule,
    and rules with an empty machine side or an empty outcome.
    """
    out: list[Diagnostic] = []

    def error(where: str, message: str) -> None:
        out.append(Diagnostic("error", where, message))

    def warning(where: str, message: str) -> None:
        out.append(Diagnostic("warning", where, message))

    if not sys.machines and not sys.resources:
        error("system", "machine and resource sets are both empty")

    seen: set[str] = set()
    for i, m in enumerate(sys.machines):
        where = f"machines[{i}]"
        if not is_token(m.id):
            error(where, f"invalid machine id {m.id!r}")
        elif m.id in seen:
            error(where, f"duplicate machine id {m.id!r}")
        seen.add(m.id)
        if m.mass < 0:
            error(where, f"mass of {m.id!r} is negative")

    seen = set()
    for i, r in enumerate(sys.resources):
        where = f"resources[{i}]"
        if not is_token(r):
            error(where, f"invalid resource id {r!r}")
        elif r in seen:
            error(where, f"duplicate resource id {r!r}")
        seen.add(r)

    comps = sys.schema.components
    if not comps:
        error("cost_components", "at least one cost component is required")
    if len(set(comps)) != len(comps):
        error("cost_components", "cost component names are not distinct")
    for name in comps:
        if not isinstance(name, str) or not name:
            error("cost_components", f"invalid cost component name {name!r}")

    rule_ids: set[str] = set()
    keys: dict[tuple[frozenset[str], frozenset[str]], str] = {}
    for i, rule in enumerate(sys.rules):
        rid = rule.rule_id
        where = f"rule {rid}" if is_token(rid) else f"rules[{i}]"
        if not is_token(rid):
            error(where, f"invalid rule id {rid!r}")
        elif rid in rule_ids:
            error(where, "duplicate rule id")
        rule_ids.add(rid)

        if unknown := rule.lhs_machines - sys.machine_ids:
            error(where, f"machines {_fmt_ids(unknown)} are not declared machines")
        if unknown := rule.output - sys.machine_ids:
            error(where, f"output {_fmt_ids(unknown)} are not declared machines")
        if unknown := rule.resources - sys.resource_ids:
            error(where, f"resources {_fmt_ids(unknown)} are not declared resources")
        if clash := rule.output & rule.resources:
            error(where, f"weak regularity violated: output {_fmt_ids(clash)} also used as resources")

        if len(rule.cost) != len(comps):
            error(where, f"cost has {len(rule.cost)} components, schema has {len(comps)}")
        if any(v < 0 for v in rule.cost):
            error(where, "cost has negative components")

        key = (rule.lhs_machines, rule.resources)
        if key in keys:
            error(where, f"same machines and resources as rule {keys[key]}; generation must be a function")
        else:
            keys[key] = rid

        if not rule.lhs_machines:
            warning(where, "rule has no machines (spontaneous generation)")
        if not rule.output:
            warning(where, "rule has an empty outcome")

    target = sys.machine_ids
    if not any(r.lhs_machines == target and r.output == target for r in sys.rules):
        warning("rules", "target set is not self-replicating: no rule maps the full machine set to itself")
    return out
