"""Ground-truth tensor-product construction of chain operators.

Everything here works in the full product space of the chain, with site
``x`` the most significant tensor factor and each site ordered
``m = s, s-1, ..., -s``.  Index 0 is therefore the all-up state.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .chain import (
    BilinearBiquadratic,
    HalfInteger,
    SpinChainSpec,
    SpinLike,
    admissible_spins,
    is_admissible,
    max_total_spin,
    multiplicity,
)
from .errors import DimensionTooLarge, NotAdmissible
from .results import EnergyEntry, EnergyTable, Method

DEFAULT_DENSE_LIMIT = 4096
CASIMIR_TOL = 1e-6


@dataclass(frozen=True)
class SpinMatrices:
    s: HalfInteger
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray

    @property
    def splus(self) -> np.ndarray:
        return self.sx + 1j * self.sy

    @property
    def sminus(self) -> np.ndarray:
        return self.sx - 1j * self.sy


@dataclass(frozen=True)
class SectorProjector:
    S: HalfInteger
    projector: np.ndarray


@lru_cache(maxsize=None)
def _ladder(s2: int) -> tuple[np.ndarray, np.ndarray]:
    # (S^+, S^z) for spin s2/2 in the m = s..-s basis
    m = (s2 - 2 * np.arange(s2 + 1)) / 2.0
    s = s2 / 2.0
    splus = np.zeros((s2 + 1, s2 + 1))
    for i in range(1, s2 + 1):
        splus[i - 1, i] = np.sqrt(s * (s + 1) - m[i] * (m[i] + 1))
    splus.flags.writeable = False
    sz = np.diag(m)
    sz.flags.writeable = False
    return splus, sz


def spin_matrices(s: SpinLike) -> SpinMatrices:
    s = HalfInteger.of(s)
    if s.doubled < 1:
        raise ValueError("spin magnitude must be at least 1/2")
    splus, sz = _ladder(s.doubled)
    sminus = splus.T
    sx = (splus + sminus).astype(complex) / 2
    sy = (splus - sminus).astype(complex) / 2j
    return SpinMatrices(s, sx, sy, sz.astype(complex))


def _check_dim(chain: SpinChainSpec, limit: int | None):
    dim = chain.hilbert_dim
    limit = DEFAULT_DENSE_LIMIT if limit is None else limit
    if dim > limit:
        raise DimensionTooLarge(dim, limit)
    return dim


def _embed(op: sp.spmatrix, x: int, dims: tuple[int, ...]) -> sp.csr_matrix:
    left = int(np.prod(dims[:x], dtype=np.int64))
    right = int(np.prod(dims[x + 1 :], dtype=np.int64))
    out = sp.kron(sp.identity(left, format="csr"), op, format="csr")
    return sp.kron(out, sp.identity(right, format="csr"), format="csr")


def _site_ops(chain: SpinChainSpec):
    dims = tuple(d + 1 for d in chain.doubled_spins)
    ops = []
    for x, s2 in enumerate(chain.doubled_spins):
        m = spin_matrices(HalfInteger(s2))
        ops.append(
            tuple(_embed(sp.csr_matrix(a), x, dims) for a in (m.sx, m.sy, m.sz))
        )
    return ops


def _dot(a, b) -> sp.csr_matrix:
    return (a[0] @ b[0] + a[1] @ b[1] + a[2] @ b[2]).tocsr()


def bond_dot(chain: SpinChainSpec, x: int) -> sp.csr_matrix:
    """Sparse ``S_x . S_{x+1}`` on the full chain."""
    dims = tuple(d + 1 for d in chain.doubled_spins)
    a = spin_matrices(chain.spins[x])
    b = spin_matrices(chain.spins[x + 1])
    local = sum(np.kron(p, q) for p, q in ((a.sx, b.sx), (a.sy, b.sy), (a.sz, b.sz)))
    left = int(np.prod(dims[:x], dtype=np.int64))
    right = int(np.prod(dims[x + 2 :], dtype=np.int64))
    out = sp.kron(sp.identity(left, format="csr"), sp.csr_matrix(local), format="csr")
    return sp.kron(out, sp.identity(right, format="csr"), format="csr")


def bond_term(chain: SpinChainSpec, x: int) -> sp.csr_matrix:
    """Sparse contribution of bond ``(x, x+1)`` to the Hamiltonian."""
    J = chain.couplings[x]
    dim = chain.hilbert_dim
    eye = sp.identity(dim, dtype=complex, format="csr")
    dot = bond_dot(chain, x)
    if isinstance(chain.model, BilinearBiquadratic):
        t = chain.model.t
        return (J * ((eye - dot) + t * (eye - dot @ dot))).tocsr()
    ss = float(chain.spins[x]) * float(chain.spins[x + 1])
    return (-J * (dot / ss - eye)).tocsr()


def hamiltonian_sparse(chain: SpinChainSpec) -> sp.csr_matrix:
    """Sparse Hamiltonian on the full tensor space (no dense limit)."""
    dim = chain.hilbert_dim
    H = sp.csr_matrix((dim, dim), dtype=complex)
    for x in range(chain.length - 1):
        H = H + bond_term(chain, x)
    return H.tocsr()


def hamiltonian_dense(chain: SpinChainSpec, limit: int | None = None) -> np.ndarray:
    _check_dim(chain, limit)
    return hamiltonian_sparse(chain).toarray()


def total_spin_sparse(chain: SpinChainSpec):
    """Sparse total ``(S^x, S^y, S^z)``."""
    ops = _site_ops(chain)
    return tuple(sum(op[i] for op in ops).tocsr() for i in range(3))


def casimir_total(chain: SpinChainSpec, limit: int | None = None) -> np.ndarray:
    _check_dim(chain, limit)
    tot = total_spin_sparse(chain)
    return _dot(tot, tot).toarray()


def ladder_operators(chain: SpinChainSpec, limit: int | None = None):
    """Dense total ``(S^+, S^-, S^3)``."""
    _check_dim(chain, limit)
    sx, sy, sz = (op.toarray() for op in total_spin_sparse(chain))
    return sx + 1j * sy, sx - 1j * sy, sz


def sector_projector(
    chain: SpinChainSpec, S: SpinLike, limit: int | None = None
) -> SectorProjector:
    """Orthogonal projector on total spin ``S`` by Lagrange filtering of the Casimir."""
    S = HalfInteger.of(S)
    if not is_admissible(chain, S):
        raise NotAdmissible(S, chain)
    C = casimir_total(chain, limit)
    dim = C.shape[0]
    target = _cas(S)
    P = np.eye(dim, dtype=complex)
    for other in admissible_spins(chain):
        if other == S:
            continue
        c = _cas(other)
        P = P @ (C - c * np.eye(dim)) / (target - c)
    return SectorProjector(S, P)


def _cas(S: HalfInteger) -> float:
    s = float(S)
    return s * (s + 1)


def magnetization_order(chain: SpinChainSpec) -> np.ndarray:
    """Doubled ``S^3`` eigenvalue of every tensor basis state."""
    m2 = np.zeros(1, dtype=np.int64)
    for s2 in chain.doubled_spins:
        m2 = (m2[:, None] + (s2 - 2 * np.arange(s2 + 1))[None, :]).ravel()
    return m2


def hw_spectrum_dense(chain: SpinChainSpec, limit: int | None = None) -> dict[HalfInteger, np.ndarray]:
    """All energies of H classified by total spin, one entry per multiplet.

    H is diagonalized within each ``S^3`` block; degenerate eigenspaces are
    resolved by diagonalizing the Casimir inside them, and each eigenvector is
    assigned the spin whose ``S(S+1)`` is within ``CASIMIR_TOL``.
    """
    _check_dim(chain, limit)
    H = hamiltonian_sparse(chain)
    tot = total_spin_sparse(chain)
    C = _dot(tot, tot)
    m2 = magnetization_order(chain)
    spins = admissible_spins(chain)
    cas = np.array([_cas(S) for S in spins])
    found: dict[HalfInteger, list[float]] = {S: [] for S in spins}
    counts: dict[HalfInteger, list[float]] = {S: [] for S in spins}
    for M2 in np.unique(m2):
        idx = np.flatnonzero(m2 == M2)
        Hb = H[idx][:, idx].toarray()
        Cb = C[idx][:, idx].toarray()
        w, V = np.linalg.eigh(Hb)
        start = 0
        while start < len(w):
            stop = start + 1
            while stop < len(w) and w[stop] - w[start] < 1e-8:
                stop += 1
            Vg = V[:, start:stop]
            cw = np.linalg.eigvalsh(Vg.conj().T @ Cb @ Vg)
            for e, c in zip(w[start:stop], cw):
                k = int(np.argmin(np.abs(cas - c)))
                if abs(cas[k] - c) > CASIMIR_TOL:
                    raise RuntimeError(f"eigenvector with Casimir {c} matches no admissible spin")
                S = spins[k]
                # each spin-S multiplet shows up once in every block with |M| <= S
                if M2 == S.doubled:
                    found[S].append(float(e))
                counts[S].append(float(e))
            start = stop
    out = {}
    for S in spins:
        vals = np.sort(np.array(found[S]))
        if len(vals) != multiplicity(chain, S) or len(counts[S]) != len(vals) * (S.doubled + 1):
            raise RuntimeError(f"spin {S}: multiplet count mismatch in dense classification")
        out[S] = vals
    return out


def min_energy_per_sector_dense(chain: SpinChainSpec, limit: int | None = None) -> EnergyTable:
    spectrum = hw_spectrum_dense(chain, limit)
    entries = []
    for S, vals in spectrum.items():
        entries.append(
            EnergyEntry(S, len(vals) * (S.doubled + 1), float(vals[0]), Method.DENSE)
        )
    return EnergyTable(entries, max_total_spin(chain))
