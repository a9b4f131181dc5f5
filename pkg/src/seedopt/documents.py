"""JSON documents: system input files and seed reports."""
from __future__ import annotations

import json
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Any

from .model import CostSchema, CostVector, GenerationRule, GenerationSystem, MachineSpec
from .solver import Ranking

__all__ = [
    "DocumentError",
    "MAX_SIGNIFICANT_DIGITS",
    "decode_system",
    "encode_report",
    "encode_system",
    "json_number",
    "report_to_dict",
]

MAX_SIGNIFICANT_DIGITS = 15

_SYSTEM_KEYS = ("machines", "resources", "cost_components", "rules")
_MACHINE_KEYS = {"id", "mass"}
_RULE_KEYS = ("id", "machines", "resources", "output", "cost")


class DocumentError(ValueError):
    """Malformed JSON or a document that does not fit the schema."""


class _Number:
    """A JSON number kept as its exact rational value."""

    __slots__ = ("value",)

    def __init__(self, literal: str):
        try:
            dec = Decimal(literal)
        except InvalidOperation as exc:
            raise DocumentError(f"bad number {literal!r}") from exc
        digits = dec.as_tuple().digits
        significant = len(digits) - next((i for i, d in enumerate(digits) if d), len(digits))
        if significant > MAX_SIGNIFICANT_DIGITS:
            raise DocumentError(
                f"number {literal} has more than {MAX_SIGNIFICANT_DIGITS} significant digits"
            )
        self.value = Fraction(dec)


def _reject_constant(name: str):
    raise DocumentError(f"non-finite number {name} is not allowed")


def _no_duplicates(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for k, v in pairs:
        if k in out:
            raise DocumentError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _load(text: str) -> Any:
    try:
        return json.loads(
            text,
            object_pairs_hook=_no_duplicates,
            parse_float=_Number,
            parse_int=_Number,
            parse_constant=_reject_constant,
        )
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed JSON: {exc}") from exc


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise DocumentError(message)


def _object(value: Any, where: str, required, optional=()) -> dict[str, Any]:
    _expect(isinstance(value, dict), f"{where}: expected an object")
    unknown = set(value) - set(required) - set(optional)
    _expect(not unknown, f"{where}: unknown keys {sorted(unknown)}")
    missing = [k for k in required if k not in value]
    _expect(not missing, f"{where}: missing keys {missing}")
    return value


def _strings(value: Any, where: str) -> list[str]:
    _expect(isinstance(value, list) and all(isinstance(x, str) for x in value),
            f"{where}: expected an array of strings")
    return value


def _numbers(value: Any, where: str) -> list[Fraction]:
    _expect(isinstance(value, list) and all(isinstance(x, _Number) for x in value),
            f"{where}: expected an array of numbers")
    return [x.value for x in value]


def decode_system(text: str | bytes) -> GenerationSystem:
    """Parse a system document.

    Only the document shape is checked here; semantic checks are left to
    :func:`~seedopt.model.validate_system`.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentError(f"not UTF-8: {exc}") from exc
    doc = _object(_load(text), "document", _SYSTEM_KEYS)

    _expect(isinstance(doc["machines"], list), "machines: expected an array")
    machines = []
    for i, m in enumerate(doc["machines"]):
        m = _object(m, f"machines[{i}]", ("id",), ("mass",))
        _expect(isinstance(m["id"], str), f"machines[{i}].id: expected a string")
        mass = m.get("mass")
        if mass is None:
            machines.append(MachineSpec(m["id"]))
        else:
            _expect(isinstance(mass, _Number), f"machines[{i}].mass: expected a number")
            machines.append(MachineSpec(m["id"], mass.value))

    resources = _strings(doc["resources"], "resources")
    components = _strings(doc["cost_components"], "cost_components")

    _expect(isinstance(doc["rules"], list), "rules: expected an array")
    rules = []
    for i, r in enumerate(doc["rules"]):
        where = f"rules[{i}]"
        r = _object(r, where, _RULE_KEYS)
        _expect(isinstance(r["id"], str), f"{where}.id: expected a string")
        sets = {}
        for key in ("machines", "resources", "output"):
            ids = _strings(r[key], f"{where}.{key}")
            _expect(len(set(ids)) == len(ids), f"{where}.{key}: repeated id")
            sets[key] = ids
        cost = _numbers(r["cost"], f"{where}.cost")
        rules.append(GenerationRule(r["id"], sets["machines"], sets["resources"], sets["output"], cost))

    return GenerationSystem(machines, resources, CostSchema(tuple(components)), rules)


def json_number(value: Fraction) -> int | float:
    value = Fraction(value)
    return value.numerator if value.denominator == 1 else float(value)


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def encode_system(sys: GenerationSystem) -> str:
    """Canonical text of a system: fixed key order, sorted id sets, trailing newline."""
    doc = {
        "machines": [{"id": m.id, "mass": json_number(m.mass)} for m in sys.machines],
        "resources": list(sys.resources),
        "cost_components": list(sys.schema.components),
        "rules": [
            {
                "id": r.rule_id,
                "machines": sorted(r.lhs_machines),
                "resources": sorted(r.resources),
                "output": sorted(r.output),
                "cost": [json_number(v) for v in r.cost],
            }
            for r in sys.rules
        ],
    }
    return _dumps(doc)


def _cost(cost: CostVector) -> list[int | float]:
    return [json_number(v) for v in cost]


def report_to_dict(ranking: Ranking) -> dict[str, Any]:
    obj = ranking.objective
    seeds = []
    for rep in ranking:
        entry: dict[str, Any] = {
            "seed": list(rep.seed.ids),
            "transport_mass": json_number(rep.transport_mass),
            "best_path": rep.best_path.rule_ids,
            "best_cost": _cost(rep.best_cost),
            "rank": rep.rank,
        }
        if rep.pareto_optimal is not None:
            entry["pareto_optimal"] = rep.pareto_optimal
        seeds.append(entry)
    return {
        "target": list(ranking.target.ids),
        "objective": {"keys": list(obj.keys), "mode": obj.mode.value, "rng_seed": obj.rng_seed},
        "seeds": seeds,
        "overflow": ranking.overflow,
    }


def encode_report(ranking: Ranking) -> str:
    return _dumps(report_to_dict(ranking))
