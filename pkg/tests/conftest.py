from __future__ import annotations

import random
from pathlib import Path

import pytest

from seedopt.model import CostSchema, GenerationRule, GenerationSystem, MachineSpec
from seedopt.oracle import random_system

GOLDEN = Path(__file__).parent / "golden"

# generator seed for the shared random suite; changing it changes every suite-based result
SUITE_SEED = 20261015
SUITE_SIZE = 1000


def make_sys1() -> GenerationSystem:
    return GenerationSystem(
        machines=[MachineSpec("a", 2), MachineSpec("b", 3), MachineSpec("c", 5)],
        resources=["r1", "r2"],
        schema=CostSchema(("money", "time")),
        rules=[
            GenerationRule("ρ1", {"a"}, {"r1"}, {"a", "b"}, (5, 2)),
            GenerationRule("ρ2", {"a", "b"}, {"r2"}, {"a", "b", "c"}, (3, 4)),
            GenerationRule("ρ3", {"b"}, {"r1"}, {"a", "b", "c"}, (10, 1)),
            GenerationRule("ρ4", {"a", "b", "c"}, {"r1", "r2"}, {"a", "b", "c"}, (1, 1)),
        ],
    )


def make_single(machine: str = "a") -> GenerationSystem:
    return GenerationSystem([MachineSpec(machine)], ["r"], CostSchema(("money", "time")), [])


@pytest.fixture
def sys1() -> GenerationSystem:
    return make_sys1()


@pytest.fixture
def single() -> GenerationSystem:
    return make_single()


@pytest.fixture(scope="session")
def random_suite() -> list[GenerationSystem]:
    rng = random.Random(SUITE_SEED)
    return [random_system(rng) for _ in range(SUITE_SIZE)]


_ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for an acceptance criterion, printed in the terminal summary."""
    name = request.node.name

    def record(label: str, ok: bool, detail: str = "") -> None:
        _ACCEPTANCE[f"{label} ({name})"] = (ok, detail)
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, (ok, detail) in sorted(_ACCEPTANCE.items(), key=lambda kv: kv[0]):
        line = f"{'PASS' if ok else 'FAIL'}  {label}"
        terminalreporter.write_line(f"{line}  {detail}" if detail else line)
