"""Arc-diagram basis of highest-weight vectors.

A site of spin ``s`` is a block of ``2s`` spin-1/2 strands carrying the
symmetric (maximal spin) part.  An ordered Ising configuration puts ``k``
down arrows at the start of a block and ups after them; pairing every down
with the nearest free up on its left yields non-crossing arcs.  Each arc
stands for the singlet ``|up down> - |down up>`` (up on the left strand) and
each block is then projected onto its symmetric subspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Sequence

import numpy as np

from . import kernels
from .chain import (
    HalfInteger,
    IncrementStep,
    SpinChainSpec,
    SpinLike,
    StepKind,
    is_admissible,
    max_total_spin,
)
from .errors import InconsistentDiagram, InvalidStep, NotAdmissible
from .oracle import DEFAULT_DENSE_LIMIT, _check_dim


@dataclass(frozen=True)
class OrderedIsingConfig:
    """Down-arrow count per site block; ``sizes`` holds ``2 s_x``."""

    downs_per_site: tuple[int, ...]
    sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "downs_per_site", tuple(int(k) for k in self.downs_per_site))
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        if len(self.downs_per_site) != len(self.sizes):
            raise InconsistentDiagram("one down count per site is required")
        for x, (k, n) in enumerate(zip(self.downs_per_site, self.sizes)):
            if not 0 <= k <= n:
                raise InconsistentDiagram(f"site {x}: {k} downs do not fit in a block of {n}")

    @classmethod
    def for_chain(cls, chain: SpinChainSpec, downs: Sequence[int]) -> "OrderedIsingConfig":
        return cls(tuple(downs), chain.doubled_spins)

    @property
    def magnetization(self) -> HalfInteger:
        return HalfInteger(sum(self.sizes) - 2 * sum(self.downs_per_site))

    def strands(self) -> list[int]:
        """Arrow per strand, 1 for down, blocks laid out left to right."""
        out = []
        for k, n in zip(self.downs_per_site, self.sizes):
            out.extend([1] * k + [0] * (n - k))
        return out


@dataclass(frozen=True)
class ArcDiagram:
    """Non-crossing arcs over strands plus unpaired strands.

    Strand indices are 0-based.  ``blocks`` lists ``(start, length)`` per site.
    """

    strand_count: int
    blocks: tuple[tuple[int, int], ...]
    arcs: tuple[tuple[int, int], ...]
    ups: tuple[int, ...]
    downs: tuple[int, ...] = ()

    @property
    def max_spin(self) -> HalfInteger:
        return HalfInteger(self.strand_count)

    @property
    def total_spin(self) -> HalfInteger:
        return HalfInteger(self.strand_count - 2 * len(self.arcs))

    @property
    def magnetization(self) -> HalfInteger:
        return HalfInteger(len(self.ups) - len(self.downs))

    @property
    def is_highest_weight(self) -> bool:
        return not self.downs

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(n for _, n in self.blocks)

    @cached_property
    def site_of(self) -> tuple[int, ...]:
        out = []
        for x, (_, n) in enumerate(self.blocks):
            out.extend([x] * n)
        return tuple(out)

    def downs_per_site(self) -> tuple[int, ...]:
        counts = [0] * len(self.blocks)
        for _, j in self.arcs:
            counts[self.site_of[j]] += 1
        for j in self.downs:
            counts[self.site_of[j]] += 1
        return tuple(counts)

    def config(self) -> OrderedIsingConfig:
        return OrderedIsingConfig(self.downs_per_site(), self.sizes)

    def validate(self) -> None:
        """Raise ``InconsistentDiagram`` unless every structural invariant holds."""
        n = self.strand_count
        pos = 0
        for start, length in self.blocks:
            if start != pos or length < 1:
                raise InconsistentDiagram("blocks must tile the strands contiguously")
            pos += length
        if pos != n:
            raise InconsistentDiagram("blocks do not cover all strands")
        seen = sorted([i for a in self.arcs for i in a] + list(self.ups) + list(self.downs))
        if seen != list(range(n)):
            raise InconsistentDiagram("every strand must be used exactly once")
        for i, j in self.arcs:
            if not i < j:
                raise InconsistentDiagram(f"arc {(i, j)} is not left-to-right")
            if self.site_of[i] == self.site_of[j]:
                raise InconsistentDiagram(f"arc {(i, j)} lies inside one block")
        for (i, j), (k, l) in product(self.arcs, repeat=2):
            if i < k < j < l:
                raise InconsistentDiagram(f"arcs {(i, j)} and {(k, l)} cross")
        for i, j in self.arcs:
            for u in list(self.ups) + list(self.downs):
                if i < u < j:
                    raise InconsistentDiagram(f"arc {(i, j)} spans unpaired strand {u}")
        arrow = [0] * n
        for _, j in self.arcs:
            arrow[j] = 1
        for j in self.downs:
            arrow[j] = 1
        for start, length in self.blocks:
            block = arrow[start : start + length]
            if block != sorted(block, reverse=True):
                raise InconsistentDiagram("within a block downs must precede ups")

    def dump(self) -> str:
        """One-line text form with 1-based strand indices."""
        arcs = "".join(f"({i + 1},{j + 1})" for i, j in self.arcs)
        unpaired = sorted([(u, "↑") for u in self.ups] + [(d, "↓") for d in self.downs])
        tail = " ".join(f"{u + 1}{a}" for u, a in unpaired)
        return f"S={self.total_spin} arcs={arcs} unpaired={tail}"


def _blocks(sizes: Sequence[int]) -> tuple[tuple[int, int], ...]:
    out, pos = [], 0
    for n in sizes:
        out.append((pos, n))
        pos += n
    return tuple(out)


def pair_arcs(config: OrderedIsingConfig) -> ArcDiagram:
    """Pair each down with the nearest unpaired up to its left, repeatedly."""
    strands = config.strands()
    partner = kernels.pair_strands(np.asarray(strands, dtype=np.uint8))
    arcs, ups, downs = [], [], []
    for i, p in enumerate(partner):
        if p < 0:
            (downs if strands[i] else ups).append(i)
        elif p > i:
            arcs.append((i, int(p)))
    return ArcDiagram(len(strands), _blocks(config.sizes), tuple(arcs), tuple(ups), tuple(downs))


def hw_configs(chain: SpinChainSpec, S: SpinLike) -> np.ndarray:
    """Down counts of every highest-weight diagram of spin ``S``, one per row."""
    S = HalfInteger.of(S)
    if not is_admissible(chain, S):
        raise NotAdmissible(S, chain)
    n_down = (max_total_spin(chain).doubled - S.doubled) // 2
    return kernels.enumerate_hw_downs(np.asarray(chain.doubled_spins, dtype=np.int64), n_down)


def enumerate_hw_basis(chain: SpinChainSpec, S: SpinLike) -> list[ArcDiagram]:
    sizes = chain.doubled_spins
    return [pair_arcs(OrderedIsingConfig(tuple(row), sizes)) for row in hw_configs(chain, S)]


@dataclass(frozen=True)
class TensorVector:
    dim: int
    amplitudes: dict[int, float]

    def to_dense(self) -> np.ndarray:
        v = np.zeros(self.dim)
        for i, a in self.amplitudes.items():
            v[i] = a
        return v


def _check_chain(diagram: ArcDiagram, chain: SpinChainSpec) -> None:
    if diagram.sizes != chain.doubled_spins:
        raise InconsistentDiagram(
            f"diagram blocks {diagram.sizes} do not match chain spins {chain.doubled_spins}"
        )


def expand_to_tensor(
    diagram: ArcDiagram, chain: SpinChainSpec, limit: int | None = None
) -> TensorVector:
    """Expand a diagram in the site tensor basis.

    Arcs become singlets and the unpaired strands the symmetric state with
    the diagram's number of downs; then each block is projected on its symmetric
    subspace: a block arrangement with ``k`` downs among ``n`` strands has
    overlap ``C(n, k)^(-1/2)`` with the site state ``|s, s-k>``.
    """
    _check_chain(diagram, chain)
    _check_dim(chain, limit if limit is not None else DEFAULT_DENSE_LIMIT)
    sizes = chain.doubled_spins
    # place value of each site in the tensor index (site 0 most significant)
    place = [1] * len(sizes)
    for x in range(len(sizes) - 2, -1, -1):
        place[x] = place[x + 1] * (sizes[x + 1] + 1)
    site_of = diagram.site_of
    # unpaired strands carry one spin-S multiplet: spread their downs symmetrically
    unpaired = sorted(diagram.ups + diagram.downs)
    bases = []
    for chosen in combinations(unpaired, len(diagram.downs)):
        base = [0] * len(sizes)
        for d in chosen:
            base[site_of[d]] += 1
        bases.append(base)
    amps: dict[int, float] = {}
    for base in bases:
        for choice in product((0, 1), repeat=len(diagram.arcs)):
            downs = list(base)
            sign = 1
            for (i, j), flip in zip(diagram.arcs, choice):
                # flip 0: up at i, down at j (+1); flip 1: down at i, up at j (-1)
                downs[site_of[j if flip == 0 else i]] += 1
                if flip:
                    sign = -sign
            idx = sum(k * p for k, p in zip(downs, place))
            amps[idx] = amps.get(idx, 0.0) + sign
    weights = [[1.0 / math.sqrt(math.comb(n, k)) for k in range(n + 1)] for n in sizes]
    out = {}
    for idx, a in amps.items():
        if a == 0:
            continue
        rest, w = idx, a
        for x in range(len(sizes) - 1, -1, -1):
            k = rest % (sizes[x] + 1)
            rest //= sizes[x] + 1
            w *= weights[x][k]
        out[idx] = w
    return TensorVector(chain.hilbert_dim, out)


def expansion_matrix(
    diagrams: Sequence[ArcDiagram], chain: SpinChainSpec, limit: int | None = None
) -> np.ndarray:
    """Expanded diagrams as the columns of a dense real matrix."""
    V = np.zeros((chain.hilbert_dim, len(diagrams)))
    for a, d in enumerate(diagrams):
        for i, amp in expand_to_tensor(d, chain, limit).amplitudes.items():
            V[i, a] = amp
    return V


def gram_matrix(
    diagrams: Sequence[ArcDiagram], chain: SpinChainSpec, limit: int | None = None
) -> np.ndarray:
    if len({d.total_spin for d in diagrams}) > 1:
        raise InconsistentDiagram("gram_matrix needs diagrams from a single sector")
    V = expansion_matrix(diagrams, chain, limit)
    return V.T @ V


def _previous_sizes(step: IncrementStep) -> tuple[int, ...]:
    sizes = list(step.resulting_chain.doubled_spins)
    if step.kind is StepKind.CASE_I:
        if sizes[-1] != 1:
            raise InvalidStep("a case I step must end in a new spin-1/2 site")
        return tuple(sizes[:-1])
    if step.kind is StepKind.CASE_II:
        if sizes[-1] < 2:
            raise InvalidStep("a case II step must end in a site of spin at least 1")
        sizes[-1] -= 1
        return tuple(sizes)
    raise InvalidStep("the start of a sequence has no predecessor")


def embed_next(diagram: ArcDiagram, step: IncrementStep) -> ArcDiagram:
    """Append one up strand, as a new site (case I) or to the last site (case II)."""
    if diagram.sizes != _previous_sizes(step):
        raise InvalidStep(
            f"diagram blocks {diagram.sizes} do not precede the step to "
            f"{step.resulting_chain.doubled_spins}"
        )
    new = diagram.strand_count
    sizes = step.resulting_chain.doubled_spins
    return ArcDiagram(new + 1, _blocks(sizes), diagram.arcs, diagram.ups + (new,), diagram.downs)


def embedding_indices(
    small: SpinChainSpec, S: SpinLike, step: IncrementStep
) -> list[int]:
    """Position of each embedded spin-``S`` diagram in the spin ``S+1/2`` basis."""
    S = HalfInteger.of(S)
    large = enumerate_hw_basis(step.resulting_chain, S + HalfInteger(1))
    where = {d: i for i, d in enumerate(large)}
    return [where[embed_next(d, step)] for d in enumerate_hw_basis(small, S)]
