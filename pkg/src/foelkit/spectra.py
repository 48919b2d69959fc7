"""Sector energies and the level-ordering checks built on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .chain import (
    HALF,
    BilinearBiquadratic,
    HalfInteger,
    SpinChainSpec,
    SpinLike,
    StepKind,
    admissible_spins,
    build_sequence,
    is_admissible,
    max_total_spin,
    uniform_chain,
)
from .errors import DimensionTooLarge, InvalidExtension, NotAdmissible
from .oracle import (
    DEFAULT_DENSE_LIMIT,
    _check_dim,
    hamiltonian_sparse,
    hw_spectrum_dense,
    spin_matrices,
)
from .pf import DENSE_MAX, min_eigenvalue
from .results import ComparisonVerdict, EnergyEntry, EnergyTable, FoelReport, Method, Status
from .tl import sector_hamiltonian

FOEL_TOL = 1e-9
STRICT_TOL = 1e-10
OPERATOR_TOL = 1e-10
# below this Hilbert dimension "auto" simply diagonalizes the full H
AUTO_DENSE_DIM = 256

METHODS = ("auto", "dense", "sector", "power")


def _resolve(chain: SpinChainSpec, method: str) -> str:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if method == "auto":
        return "dense" if chain.hilbert_dim <= AUTO_DENSE_DIM else "sector"
    return method


def _matrix(chain, S, limit, cache):
    if cache is not None:
        return cache.get(chain, S, limit)
    return sector_hamiltonian(chain, S, limit=limit)


def _sector_entry(chain: SpinChainSpec, S: HalfInteger, method: str, limit, cache=None) -> EnergyEntry:
    M = _matrix(chain, S, limit, cache)
    if method == "power":
        return EnergyEntry(S, M.dim, min_eigenvalue(M, "power"), Method.POWER_ITERATION)
    e = min_eigenvalue(M, "auto")
    used = Method.POWER_ITERATION if M.dim > DENSE_MAX and not _is_tridiagonal(M) else Method.SECTOR
    return EnergyEntry(S, M.dim, e, used)


def _is_tridiagonal(M) -> bool:
    return bool(M.nnz == 0 or np.all(np.abs(M.rows - M.cols) <= 1))


def sector_entry(
    chain: SpinChainSpec, S: SpinLike, method: str = "auto", limit: int | None = None, cache=None
) -> EnergyEntry:
    """Lowest energy of the spin-``S`` sector with its dimension and solver."""
    S = HalfInteger.of(S)
    if not is_admissible(chain, S):
        raise NotAdmissible(S, chain)
    how = _resolve(chain, method)
    if how == "dense":
        vals = hw_spectrum_dense(chain, limit)[S]
        return EnergyEntry(S, len(vals) * (S.doubled + 1), float(vals[0]), Method.DENSE)
    return _sector_entry(chain, S, how, limit, cache)


def min_energy_sector(
    chain: SpinChainSpec, S: SpinLike, method: str = "auto", limit: int | None = None, cache=None
) -> tuple[float, int]:
    """``(E(H, S), dimension)``.

    The dimension is the number of highest-weight vectors for the sector
    solvers and the full multiplet count ``d (2S+1)`` for the dense one.
    """
    entry = sector_entry(chain, S, method, limit, cache)
    return entry.energy, entry.dimension


def energy_table(
    chain: SpinChainSpec, method: str = "auto", limit: int | None = None, cache=None
) -> EnergyTable:
    how = _resolve(chain, method)
    if how == "dense":
        spectrum = hw_spectrum_dense(chain, limit)
        entries = [
            EnergyEntry(S, len(v) * (S.doubled + 1), float(v[0]), Method.DENSE)
            for S, v in spectrum.items()
        ]
    else:
        entries = [_sector_entry(chain, S, how, limit, cache) for S in admissible_spins(chain)]
    return EnergyTable(entries, max_total_spin(chain))


def _order_status(e_low_spin: float, e_high_spin: float, tol: float) -> Status:
    if e_low_spin > e_high_spin + tol:
        return Status.HOLDS_STRICT
    if e_low_spin >= e_high_spin - tol:
        return Status.HOLDS_NONSTRICT
    return Status.VIOLATED


def foel_report(table: EnergyTable, tol: float = FOEL_TOL) -> FoelReport:
    entries = table.entries  # descending S
    pairs = []
    worst = Status.HOLDS_STRICT
    first = None
    for hi, lo in zip(entries, entries[1:]):
        st = _order_status(lo.energy, hi.energy, tol)
        pairs.append((lo.S, hi.S, st))
        if st is not Status.HOLDS_STRICT and first is None:
            first = (lo.S, hi.S, lo.energy, hi.energy)
        if st is Status.VIOLATED:
            worst = Status.VIOLATED
        elif st is Status.HOLDS_NONSTRICT and worst is Status.HOLDS_STRICT:
            worst = Status.HOLDS_NONSTRICT
    if worst is Status.VIOLATED:
        first = next((lo, hi, table.energy(lo), table.energy(hi)) for lo, hi, st in pairs if st is Status.VIOLATED)
    return FoelReport(table, worst, first, pairs)


def foel_check(
    chain: SpinChainSpec,
    method: str = "auto",
    limit: int | None = None,
    tol: float = FOEL_TOL,
    cache=None,
) -> FoelReport:
    """Energy table and whether ``E(H, S)`` strictly decreases as ``S`` grows."""
    return foel_report(energy_table(chain, method, limit, cache), tol)


# --------------------------------------------------------------------------
# increments


def _case_i_verdict(big: SpinChainSpec, small: SpinChainSpec, label: str) -> ComparisonVerdict:
    """``H_{k+1} - H_k (x) 1`` is the new bond, ``1 (x) B``; check ``B >= 0``."""
    D = (hamiltonian_sparse(big) - sp.kron(hamiltonian_sparse(small), sp.identity(2))).tocsr()
    m = (small.spins[-1].doubled + 1) * 2
    left = big.hilbert_dim // m
    B = D[:m, :m].toarray()
    resid = D - sp.kron(sp.identity(left), sp.csr_matrix(B))
    res = float(abs(resid).max()) if resid.nnz else 0.0
    lam = float(np.linalg.eigvalsh((B + B.conj().T) / 2)[0])
    witnesses = [(("min-eig",), lam), (("kron-residual",), res)]
    ok = res < OPERATOR_TOL and lam >= -OPERATOR_TOL
    return ComparisonVerdict(Status.HOLDS_NONSTRICT if ok else Status.VIOLATED, witnesses, label=label)


def raising_isometry(s: SpinLike) -> np.ndarray:
    """Rows are ``|s+1/2, m>`` written in the ``|s, m1> (x) |1/2, m2>`` basis."""
    s = HalfInteger.of(s)
    a = spin_matrices(s)
    b = spin_matrices(HALF)
    lower = np.kron(a.sminus, np.eye(2)) + np.kron(np.eye(s.doubled + 1), b.sminus)
    n = s.doubled + 2
    rows = np.zeros((n, 2 * (s.doubled + 1)), dtype=complex)
    v = np.zeros(2 * (s.doubled + 1), dtype=complex)
    v[0] = 1.0
    for k in range(n):
        rows[k] = v
        v = lower @ v
        nrm = np.linalg.norm(v)
        if nrm > 0:
            v = v / nrm
    return rows


def _case_ii_verdict(big: SpinChainSpec, small: SpinChainSpec, label: str) -> ComparisonVerdict:
    W = raising_isometry(small.spins[-1])
    left = small.hilbert_dim // (small.spins[-1].doubled + 1)
    P = sp.kron(sp.identity(left), sp.csr_matrix(W)).tocsr()
    Hk = sp.kron(hamiltonian_sparse(small), sp.identity(2))
    R = (hamiltonian_sparse(big) - P @ Hk @ P.conj().T).tocsr()
    res = float(spla.norm(R)) if R.nnz else 0.0
    witnesses = [(("residual",), res)]
    ok = res < OPERATOR_TOL
    return ComparisonVerdict(Status.HOLDS_NONSTRICT if ok else Status.VIOLATED, witnesses, label=label)


def _strict_decrease(e_small: float, e_large: float, label: str, where, tol: float) -> ComparisonVerdict:
    if e_large < e_small - tol:
        st = Status.HOLDS_STRICT
    elif e_large <= e_small + tol:
        st = Status.HOLDS_NONSTRICT
    else:
        st = Status.VIOLATED
    return ComparisonVerdict(st, [(where, e_small - e_large)], e_small, e_large, label)


def increment_relations_check(
    chain: SpinChainSpec,
    method: str = "auto",
    limit: int | None = None,
    tol: float = STRICT_TOL,
) -> list[ComparisonVerdict]:
    """Operator relation and sector-energy decrease for every increment step.

    Per step one verdict for the operator relation (case I: the added bond is
    positive semidefinite; case II: the compressed Hamiltonian reproduces the
    new one), then one verdict per sub-maximal spin ``S`` of the smaller
    chain comparing ``E(H_{k+1}, S+1/2)`` with ``E(H_k, S)``.
    """
    lim = DEFAULT_DENSE_LIMIT if limit is None else limit
    _check_dim(chain, lim)
    steps = build_sequence(chain)
    verdicts = []
    prev_table = energy_table(steps[0].resulting_chain, method, lim)
    for k, step in enumerate(steps[1:], start=1):
        small = steps[k - 1].resulting_chain
        big = step.resulting_chain
        if step.kind is StepKind.CASE_I:
            verdicts.append(_case_i_verdict(big, small, f"step {k} case I operator"))
        else:
            verdicts.append(_case_ii_verdict(big, small, f"step {k} case II operator"))
        table = energy_table(big, method, lim)
        top = max_total_spin(small)
        for S in admissible_spins(small):
            if S == top:
                continue
            verdicts.append(
                _strict_decrease(
                    prev_table.energy(S),
                    table.energy(S + HALF),
                    f"step {k} S={S}",
                    ("S", S),
                    tol,
                )
            )
        prev_table = table
    return verdicts


def _extension_side(chain: SpinChainSpec, ext: SpinChainSpec) -> str:
    L, Lx = chain.length, ext.length
    if ext.model != chain.model:
        raise InvalidExtension("the extension must use the same model")
    if Lx <= L:
        raise InvalidExtension("the extension must add at least one site")
    if ext.spins[:L] == chain.spins and ext.couplings[: L - 1] == chain.couplings:
        return "right"
    if ext.spins[Lx - L :] == chain.spins and ext.couplings[Lx - L :] == chain.couplings:
        return "left"
    raise InvalidExtension("the extension does not contain the chain at either end")


def extension_mono_check(
    chain: SpinChainSpec,
    extension: SpinChainSpec,
    method: str = "auto",
    limit: int | None = None,
    tol: float = STRICT_TOL,
) -> list[ComparisonVerdict]:
    """Compare ``E(H, S_max - n)`` with ``E(H', S'_max - n)`` for ``n >= 1``.

    Values of ``n`` where ``S_max - n`` is not admissible for the shorter
    chain are skipped.
    """
    lim = DEFAULT_DENSE_LIMIT if limit is None else limit
    _extension_side(chain, extension)
    _check_dim(extension, lim)
    small = energy_table(chain, method, lim)
    large = energy_table(extension, method, lim)
    top, top_x = max_total_spin(chain), max_total_spin(extension)
    out = []
    n = 1
    while 2 * n <= top.doubled:
        S = top - HalfInteger(2 * n)
        if is_admissible(chain, S):
            S_x = top_x - HalfInteger(2 * n)
            out.append(_strict_decrease(small.energy(S), large.energy(S_x), f"n={n}", ("n", n), tol))
        n += 1
    return out


# --------------------------------------------------------------------------
# section-three applications


def spectral_gap(
    chain: SpinChainSpec, method: str = "auto", limit: int | None = None, cache=None
) -> float:
    """``E(H, S_max - 1)``, the gap above the ferromagnetic ground multiplet."""
    S = max_total_spin(chain) - HalfInteger(2)
    if S.doubled < 0 or not is_admissible(chain, S):
        raise NotAdmissible(S, chain)
    if method == "auto" and chain.all_half and chain.is_heisenberg:
        method = "sector"
    return min_energy_sector(chain, S, method, limit, cache)[0]


def sector_spectrum(
    chain: SpinChainSpec, S: SpinLike, method: str = "auto", limit=None, cache=None
) -> np.ndarray:
    """All energies of highest-weight vectors of spin ``S``, ascending."""
    S = HalfInteger.of(S)
    if not is_admissible(chain, S):
        raise NotAdmissible(S, chain)
    if _resolve(chain, method) == "dense":
        return np.asarray(hw_spectrum_dense(chain, limit)[S])
    M = _matrix(chain, S, limit, cache).to_dense()
    return np.sort(np.linalg.eigvals(M).real)


@dataclass(frozen=True)
class BelowResult:
    levels: list[tuple[HalfInteger, float]]
    sectors: int


def eigenvalues_below(
    chain: SpinChainSpec, e_max: float, method: str = "auto", limit: int | None = None, cache=None
) -> list[tuple[HalfInteger, float]]:
    """Every highest-weight energy below ``e_max``, walking down from ``S_max``."""
    return eigenvalues_below_detail(chain, e_max, method, limit, cache).levels


def eigenvalues_below_detail(
    chain: SpinChainSpec, e_max: float, method: str = "auto", limit: int | None = None, cache=None
) -> BelowResult:
    """Like ``eigenvalues_below``; also reports how many sectors were diagonalized."""
    if not e_max > 0:
        raise ValueError("e_max must be positive")
    dense = _resolve(chain, method) == "dense"
    spectrum = hw_spectrum_dense(chain, limit) if dense else None
    levels = []
    used = 0
    for S in admissible_spins(chain):
        vals = spectrum[S] if dense else sector_spectrum(chain, S, method, limit, cache)
        if vals[0] >= e_max:
            break
        used += 1
        levels.extend((S, float(v)) for v in vals if v < e_max)
    return BelowResult(levels, used)


def biquadratic_sweep(
    L: int, t_values: Iterable[float], method: str = "auto", limit: int | None = None
) -> list[tuple[float, FoelReport]]:
    """FOEL verdicts for spin-1 chains with a biquadratic term of strength ``t``."""
    if L < 2:
        raise ValueError("the sweep needs at least two sites")
    base = uniform_chain(1, L)
    lim = DEFAULT_DENSE_LIMIT if limit is None else limit
    if base.hilbert_dim > lim:
        raise DimensionTooLarge(base.hilbert_dim, lim)
    out = []
    for t in t_values:
        c = base.with_model(BilinearBiquadratic(float(t)))
        out.append((float(t), foel_check(c, method, lim)))
    return out

