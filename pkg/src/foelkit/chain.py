"""Spin chain instances, half-integer bookkeeping and Clebsch-Gordan counting."""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, total_ordering
from types import MappingProxyType
from typing import Iterable, Sequence, Union

from .errors import InvalidChain

SpinLike = Union["HalfInteger", int, float, str, Fraction]


@total_ordering
@dataclass(frozen=True)
class HalfInteger:
    """A non-negative or signed half-integer stored as twice its value."""

    doubled: int

    def __post_init__(self):
        if not isinstance(self.doubled, int) or isinstance(self.doubled, bool):
            raise TypeError(f"doubled must be an int, got {self.doubled!r}")

    @classmethod
    def of(cls, value: SpinLike) -> "HalfInteger":
        """Parse ``"3/2"``, ``1.5``, ``Fraction(3, 2)`` or ``3`` into a half-integer."""
        if isinstance(value, HalfInteger):
            return value
        if isinstance(value, str):
            value = Fraction(value.strip())
        twice = Fraction(value) * 2
        if twice.denominator != 1:
            raise ValueError(f"{value!r} is not a half-integer")
        return cls(int(twice))

    @property
    def value(self) -> Fraction:
        return Fraction(self.doubled, 2)

    @property
    def is_integer(self) -> bool:
        return self.doubled % 2 == 0

    def __float__(self) -> float:
        return self.doubled / 2

    def __add__(self, other: SpinLike) -> "HalfInteger":
        return HalfInteger(self.doubled + HalfInteger.of(other).doubled)

    __radd__ = __add__

    def __sub__(self, other: SpinLike) -> "HalfInteger":
        return HalfInteger(self.doubled - HalfInteger.of(other).doubled)

    def __rsub__(self, other: SpinLike) -> "HalfInteger":
        return HalfInteger(HalfInteger.of(other).doubled - self.doubled)

    def __neg__(self) -> "HalfInteger":
        return HalfInteger(-self.doubled)

    def __lt__(self, other: SpinLike) -> bool:
        return self.doubled < HalfInteger.of(other).doubled

    def __eq__(self, other) -> bool:
        try:
            return self.doubled == HalfInteger.of(other).doubled
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self) -> int:
        return hash(("HalfInteger", self.doubled))

    def __str__(self) -> str:
        if self.doubled % 2 == 0:
            return str(self.doubled // 2)
        return f"{self.doubled}/2"

    def __repr__(self) -> str:
        return f"HalfInteger({self})"


HALF = HalfInteger(1)


@dataclass(frozen=True)
class Heisenberg:
    """Normalized ferromagnetic XXX interaction, ``-J [S.S/(s s') - 1]`` per bond."""

    kind = "heisenberg"

    def to_json(self) -> dict:
        return {"type": self.kind}


@dataclass(frozen=True)
class BilinearBiquadratic:
    """Spin-1 bond ``J [(1 - S.S) + t (1 - (S.S)^2)]``."""

    t: float
    kind = "bilinear-biquadratic"

    def to_json(self) -> dict:
        return {"type": self.kind, "t": self.t}


ModelKind = Union[Heisenberg, BilinearBiquadratic]


@dataclass(frozen=True)
class SpinChainSpec:
    spins: tuple[HalfInteger, ...]
    couplings: tuple[float, ...]
    model: ModelKind = field(default_factory=Heisenberg)

    def __post_init__(self):
        spins = tuple(HalfInteger.of(s) for s in self.spins)
        couplings = tuple(float(j) for j in self.couplings)
        object.__setattr__(self, "spins", spins)
        object.__setattr__(self, "couplings", couplings)
        if not spins:
            raise InvalidChain("a chain needs at least one site")
        for x, s in enumerate(spins):
            if s.doubled < 1:
                raise InvalidChain(f"site {x}: spin {s} must be at least 1/2")
        if len(couplings) != len(spins) - 1:
            raise InvalidChain(
                f"expected {len(spins) - 1} couplings for {len(spins)} sites, "
                f"got {len(couplings)}"
            )
        for x, j in enumerate(couplings):
            if not (j > 0 and math.isfinite(j)):
                raise InvalidChain(f"bond {x}: coupling {j} must be positive and finite")
        if isinstance(self.model, BilinearBiquadratic):
            if any(s.doubled != 2 for s in spins):
                raise InvalidChain("the bilinear-biquadratic model requires spin 1 on every site")
        elif not isinstance(self.model, Heisenberg):
            raise InvalidChain(f"unknown model {self.model!r}")

    @property
    def length(self) -> int:
        return len(self.spins)

    @property
    def doubled_spins(self) -> tuple[int, ...]:
        return tuple(s.doubled for s in self.spins)

    @property
    def hilbert_dim(self) -> int:
        return math.prod(s.doubled + 1 for s in self.spins)

    @property
    def all_half(self) -> bool:
        return all(s.doubled == 1 for s in self.spins)

    @property
    def is_heisenberg(self) -> bool:
        return isinstance(self.model, Heisenberg)

    def to_json(self) -> dict:
        return {
            "spins": [str(s) for s in self.spins],
            "couplings": list(self.couplings),
            "model": self.model.to_json(),
        }

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def with_model(self, model: ModelKind) -> "SpinChainSpec":
        return SpinChainSpec(self.spins, self.couplings, model)


def chain(
    spins: Iterable[SpinLike],
    couplings: Sequence[float] | float | None = None,
    model: ModelKind | None = None,
) -> SpinChainSpec:
    """Convenience constructor; scalar or missing couplings are broadcast (default 1)."""
    spins = tuple(HalfInteger.of(s) for s in spins)
    if couplings is None:
        couplings = 1.0
    if isinstance(couplings, (int, float)):
        couplings = (float(couplings),) * (len(spins) - 1)
    return SpinChainSpec(spins, tuple(couplings), model or Heisenberg())


def uniform_chain(s: SpinLike, L: int, J: float = 1.0) -> SpinChainSpec:
    return chain([s] * L, J)


def max_total_spin(chain: SpinChainSpec) -> HalfInteger:
    return HalfInteger(sum(chain.doubled_spins))


@lru_cache(maxsize=64)
def _multiplicities(doubled_spins: tuple[int, ...]) -> MappingProxyType:
    # doubled total spin -> multiplicity, reducing left to right
    mult = {0: 1}
    for s2 in doubled_spins:
        nxt: dict[int, int] = {}
        for j2, count in mult.items():
            for k2 in range(abs(j2 - s2), j2 + s2 + 1, 2):
                nxt[k2] = nxt.get(k2, 0) + count
        mult = nxt
    return MappingProxyType(mult)


def _spin_range(doubled_spins: Sequence[int]) -> tuple[int, int]:
    # doubled (min, max) total spin: the largest spin may be cancelled by the rest at best
    top = sum(doubled_spins)
    low = max(2 * max(doubled_spins) - top, top % 2)
    return low, top


def multiplicity(chain: SpinChainSpec, S: SpinLike) -> int:
    """Number of spin-``S`` multiplets (= highest-weight dimension) in the chain."""
    S = HalfInteger.of(S)
    return _multiplicities(chain.doubled_spins).get(S.doubled, 0)


def multiplicity_table(chain: SpinChainSpec) -> dict[HalfInteger, int]:
    mult = _multiplicities(chain.doubled_spins)
    return {HalfInteger(k): v for k, v in sorted(mult.items(), reverse=True) if v > 0}


def admissible_spins(chain: SpinChainSpec) -> list[HalfInteger]:
    """Admissible total spins in descending order."""
    low, top = _spin_range(chain.doubled_spins)
    return [HalfInteger(k) for k in range(top, low - 1, -2)]


def is_admissible(chain: SpinChainSpec, S: SpinLike) -> bool:
    try:
        S = HalfInteger.of(S)
    except ValueError:
        return False
    low, top = _spin_range(chain.doubled_spins)
    return low <= S.doubled <= top and (top - S.doubled) % 2 == 0


class StepKind(enum.Enum):
    START = "start"
    CASE_I = "I"
    CASE_II = "II"


@dataclass(frozen=True)
class IncrementStep:
    kind: StepKind
    resulting_chain: SpinChainSpec


def build_sequence(chain: SpinChainSpec) -> list[IncrementStep]:
    """Grow the chain from a single spin-1/2 in steps that raise the maximal spin by 1/2.

    Sites are appended left to right (case I) and each is then raised to its
    final magnitude (case II).  The first element is the single-site start.
    Bonds carry the final chain's couplings as soon as they exist.
    """
    if not chain.is_heisenberg:
        raise InvalidChain("the increment sequence is defined for Heisenberg chains")
    steps = []
    current: list[int] = []
    for x, s2 in enumerate(chain.doubled_spins):
        current.append(1)
        kind = StepKind.START if x == 0 else StepKind.CASE_I
        steps.append(IncrementStep(kind, _partial(chain, current)))
        for _ in range(s2 - 1):
            current[-1] += 1
            steps.append(IncrementStep(StepKind.CASE_II, _partial(chain, current)))
    return steps


def _partial(chain: SpinChainSpec, doubled: list[int]) -> SpinChainSpec:
    return SpinChainSpec(
        tuple(HalfInteger(d) for d in doubled),
        chain.couplings[: len(doubled) - 1],
        chain.model,
    )
