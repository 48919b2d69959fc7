"""Result records shared by the solver, checker and CLI layers."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Optional

from .chain import HalfInteger


class Method(enum.Enum):
    DENSE = "dense"
    SECTOR = "sector"
    POWER_ITERATION = "power"


class Status(enum.Enum):
    HOLDS_STRICT = "holds-strict"
    HOLDS_NONSTRICT = "holds-nonstrict"
    VIOLATED = "violated"
    PRECONDITION_FAILED = "precondition-failed"

    @property
    def holds(self) -> bool:
        return self in (Status.HOLDS_STRICT, Status.HOLDS_NONSTRICT)


@dataclass(frozen=True)
class EnergyEntry:
    S: HalfInteger
    dimension: int
    energy: float
    method: Method

    def to_json(self) -> dict:
        return {
            "S_doubled": self.S.doubled,
            "dim": self.dimension,
            "energy": self.energy,
            "method": self.method.value,
        }


@dataclass
class EnergyTable:
    entries: list[EnergyEntry]
    max_spin: Optional[HalfInteger] = None

    def __post_init__(self):
        self.entries = sorted(self.entries, key=lambda e: -e.S.doubled)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def energy(self, S) -> float:
        S = HalfInteger.of(S)
        for e in self.entries:
            if e.S == S:
                return e.energy
        raise KeyError(str(S))

    def as_dict(self) -> dict[HalfInteger, float]:
        return {e.S: e.energy for e in self.entries}

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.entries]


@dataclass
class ComparisonVerdict:
    status: Status
    witnesses: list[tuple[Any, float]] = field(default_factory=list)
    e_small: Optional[float] = None
    e_large: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        if self.status is Status.VIOLATED and not self.witnesses:
            raise ValueError("a violated verdict needs at least one witness")

    @property
    def holds(self) -> bool:
        return self.status.holds

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "status": self.status.value,
            "witnesses": [[_jsonable(loc), val] for loc, val in self.witnesses],
            "e_small": self.e_small,
            "e_large": self.e_large,
        }


@dataclass
class FoelReport:
    table: EnergyTable
    status: Status
    first_violation: Optional[tuple[HalfInteger, HalfInteger, float, float]] = None
    pairs: list[tuple[HalfInteger, HalfInteger, Status]] = field(default_factory=list)

    def to_json(self, chain=None) -> dict:
        violations = []
        for lower, upper, st in self.pairs:
            if st is not Status.HOLDS_STRICT:
                violations.append(
                    {
                        "S_doubled": lower.doubled,
                        "S_prime_doubled": upper.doubled,
                        "status": st.value,
                        "energy_S": self.table.energy(lower),
                        "energy_S_prime": self.table.energy(upper),
                    }
                )
        return {
            "chain": chain.to_json() if chain is not None else None,
            "table": self.table.to_json(),
            "status": self.status.value,
            "violations": violations,
        }


def _jsonable(loc):
    if isinstance(loc, HalfInteger):
        return str(loc)
    if isinstance(loc, tuple):
        return [_jsonable(v) for v in loc]
    return loc
