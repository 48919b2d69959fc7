"""Sector Hamiltonians in the arc-diagram basis.

The matrix ``M`` of a sector is the coefficient matrix of the Hamiltonian,
``H |a> = sum_b M[b, a] |b>``, in the (non-orthogonal) highest-weight arc
basis.  Three routes build it:

* ``"diagram"`` on all-spin-1/2 chains: the cup-cap rules, in the compiled
  kernel.
* ``"diagram"`` on general spins: the bond between blocks ``X`` and ``Y`` is
  ``2 J`` times the block-symmetrized cup-cap, which equals the average of
  cup-caps over all strand pairs ``(i in X, j in Y)``.  Results are rewritten
  in the basis using the symmetrizer's permutation invariance and the
  three-term singlet identities.
* ``"expansion"``: expand the basis in the tensor space, apply the sparse
  Hamiltonian and solve the least-squares system.  Works for every model.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from . import kernels
from .basis import ArcDiagram, enumerate_hw_basis, expansion_matrix, hw_configs, pair_arcs
from .basis import OrderedIsingConfig, _blocks
from .chain import HalfInteger, SpinChainSpec, SpinLike, is_admissible
from .errors import DimensionMismatch, DimensionTooLarge, NotAdmissible, UnsupportedSpin
from .oracle import DEFAULT_DENSE_LIMIT, hamiltonian_sparse
from .results import ComparisonVerdict, Status

NORMALIZATION_VERSION = 2
OFFDIAG_TOL = 1e-12
EMBED_TOL = 1e-10


@dataclass(frozen=True)
class SparseSectorMatrix:
    """Triplet storage, duplicates summed, grouped by column."""

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    sector: HalfInteger
    fingerprint: str = ""

    @classmethod
    def from_triplets(cls, dim, rows, cols, vals, sector, fingerprint=""):
        coo = sp.coo_matrix(
            (np.asarray(vals, dtype=float), (np.asarray(rows), np.asarray(cols))),
            shape=(dim, dim),
        )
        coo.sum_duplicates()
        order = np.lexsort((coo.row, coo.col))
        return cls(
            dim,
            coo.row[order].astype(np.int64),
            coo.col[order].astype(np.int64),
            coo.data[order],
            HalfInteger.of(sector),
            fingerprint,
        )

    @classmethod
    def from_dense(cls, M, sector, fingerprint=""):
        M = np.asarray(M, dtype=float)
        r, c = np.nonzero(M)
        return cls.from_triplets(M.shape[0], r, c, M[r, c], sector, fingerprint)

    @property
    def nnz(self) -> int:
        return len(self.vals)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        np.add.at(out, (self.rows, self.cols), self.vals)
        return out

    def to_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.vals, (self.rows, self.cols)), shape=(self.dim, self.dim))


@dataclass(frozen=True)
class DiagramWeight:
    diagram: ArcDiagram
    weight: float


# --------------------------------------------------------------------------
# spin-1/2 cup-cap rules


def apply_bond(diagram: ArcDiagram, x: int, chain: SpinChainSpec) -> list[DiagramWeight]:
    """Cup-cap ``h`` on sites ``x, x+1`` (0-based) of an all-spin-1/2 diagram.

    A loop returns the diagram with weight 2, two unpaired ups give nothing,
    any other reconnection gives the new diagram with weight -1.
    """
    if not chain.all_half:
        raise UnsupportedSpin("the cup-cap rules need spin 1/2 on every site")
    if not 0 <= x < chain.length - 1:
        raise IndexError(f"bond {x} outside a chain of {chain.length} sites")
    if diagram.downs:
        raise UnsupportedSpin("cup-cap rules are implemented for highest-weight diagrams")
    partner = {}
    for i, j in diagram.arcs:
        partner[i], partner[j] = j, i
    p, q = partner.get(x), partner.get(x + 1)
    if p == x + 1:
        return [DiagramWeight(diagram, 2.0)]
    if p is None and q is None:
        return []
    new = dict(partner)
    new[x], new[x + 1] = x + 1, x
    ups = set(diagram.ups) - {x, x + 1}
    if p is not None and q is not None:
        new[p], new[q] = q, p
    else:
        other = p if p is not None else q
        del new[other]
        ups.add(other)
    arcs = tuple(sorted((i, j) for i, j in new.items() if i < j))
    return [DiagramWeight(ArcDiagram(diagram.strand_count, diagram.blocks, arcs, tuple(sorted(ups))), -1.0)]


def _assemble_half(chain: SpinChainSpec, S: HalfInteger) -> SparseSectorMatrix:
    states = hw_configs(chain, S).astype(np.uint8)
    n = states.shape[0]
    if chain.length == 1:
        rows = cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0)
    else:
        rows, cols, vals = kernels.assemble_half(states, np.asarray(chain.couplings, dtype=float))
    return SparseSectorMatrix.from_triplets(n, rows, cols, vals, S, chain.fingerprint())


# --------------------------------------------------------------------------
# Jones-Wenzl recursion


@dataclass(frozen=True)
class JonesWenzlReduction:
    """``P_{n+1} = P_n (x) 1 + turnback * (P_n (x) 1) U (P_n (x) 1)``.

    ``U`` is the negated cup-cap on the last two strands, so every closed
    loop is worth ``-2``.
    """

    strands: int
    identity_coeff: Fraction
    turnback_coeff: Fraction


def jones_wenzl_reduce(n: int) -> JonesWenzlReduction:
    """Peel one strand off the ``n+1``-strand symmetrizer; ``n = 2s``."""
    if n < 1:
        raise ValueError("the inner symmetrizer needs at least one strand")
    return JonesWenzlReduction(n, Fraction(1), Fraction(n, n + 1))


_EPS = np.array([[0, 1], [-1, 0]])
_UP = np.array([1, 0])


def _cupcap(n: int, i: int) -> np.ndarray:
    """Cup-cap ``|s><s|`` on strands ``i, i+1`` of ``n`` spin-1/2 strands."""
    s = np.array([0.0, 1.0, -1.0, 0.0])
    local = np.outer(s, s)
    return np.kron(np.kron(np.eye(2**i), local), np.eye(2 ** (n - i - 2)))


@lru_cache(maxsize=None)
def jones_wenzl_projector(n: int) -> np.ndarray:
    """Symmetrizer on ``n`` strands built by the recursion, as a ``2^n`` matrix."""
    if n < 1:
        raise ValueError("need at least one strand")
    if n == 1:
        return np.eye(2)
    red = jones_wenzl_reduce(n - 1)
    Pn = np.kron(jones_wenzl_projector(n - 1), np.eye(2))
    U = -_cupcap(n, n - 2)
    return float(red.identity_coeff) * Pn + float(red.turnback_coeff) * (Pn @ U @ Pn)


# --------------------------------------------------------------------------
# general-spin diagram calculus
#
# Under the block symmetrizers a diagram only depends on how many arcs join
# each pair of blocks and how many free ups sit in each block.  A state is
# ``(arcs, ups)`` with ``arcs`` a sorted tuple of ((A, B), count), A < B.


class _DiagramCalculus:
    def __init__(self, sizes: Sequence[int]):
        self.sizes = tuple(sizes)
        self.L = len(sizes)
        self.starts = [s for s, _ in _blocks(sizes)]
        self.N = sum(sizes)
        self.block_of = []
        for x, n in enumerate(sizes):
            self.block_of.extend([x] * n)
        self._memo: dict = {}
        self._active: set = set()

    def state_of(self, diagram: ArcDiagram):
        counts: dict = {}
        for i, j in diagram.arcs:
            key = (self.block_of[i], self.block_of[j])
            counts[key] = counts.get(key, 0) + 1
        ups = [0] * self.L
        for u in diagram.ups:
            ups[self.block_of[u]] += 1
        return (tuple(sorted(counts.items())), tuple(ups))

    def arrange(self, state):
        """Canonical strand layout: partners, free-up flags."""
        arcs, ups = state
        counts = dict(arcs)
        partner = [-1] * self.N
        pos = list(self.starts)
        left_slots: dict = {}
        # left-going ends, nearest partner block first
        for B in range(self.L):
            for A in range(B - 1, -1, -1):
                c = counts.get((A, B), 0)
                if c:
                    left_slots[(A, B)] = list(range(pos[B], pos[B] + c))
                    pos[B] += c
        up_flag = [False] * self.N
        for B in range(self.L):
            for _ in range(ups[B]):
                up_flag[pos[B]] = True
                pos[B] += 1
        # right-going ends, farthest partner block first; nest with the left ends
        for A in range(self.L):
            for B in range(self.L - 1, A, -1):
                c = counts.get((A, B), 0)
                if c:
                    rights = list(range(pos[A], pos[A] + c))
                    pos[A] += c
                    for r, l in zip(rights, reversed(left_slots[(A, B)])):
                        partner[r], partner[l] = l, r
        if pos != [s + n for s, n in zip(self.starts, self.sizes)]:
            raise AssertionError("state does not fill the blocks")
        return partner, up_flag

    def state_from_strands(self, partner, up_flag):
        counts: dict = {}
        for i, p in enumerate(partner):
            if p > i:
                A, B = self.block_of[i], self.block_of[p]
                if A == B:
                    return None
                counts[(A, B)] = counts.get((A, B), 0) + 1
        ups = [0] * self.L
        for i, f in enumerate(up_flag):
            if f:
                ups[self.block_of[i]] += 1
        return (tuple(sorted(counts.items())), tuple(ups))

    def _shift(self, state, remove, add, ups_delta):
        arcs, ups = state
        counts = dict(arcs)
        for key in remove:
            counts[key] -= 1
            if counts[key] == 0:
                del counts[key]
        for A, B in add:
            if A == B:
                return None
            key = (min(A, B), max(A, B))
            counts[key] = counts.get(key, 0) + 1
        ups = list(ups)
        for x, d in ups_delta:
            ups[x] += d
        return (tuple(sorted(counts.items())), tuple(ups))

    def reduce(self, state) -> dict:
        """Expand the symmetrized state over basis downs-vectors."""
        if state in self._memo:
            return self._memo[state]
        if state in self._active:
            raise RuntimeError("diagram rewriting entered a cycle")
        self._active.add(state)
        try:
            result = self._reduce(state)
        finally:
            self._active.discard(state)
        self._memo[state] = result
        return result

    def _reduce(self, state) -> dict:
        partner, up_flag = self.arrange(state)
        bo = self.block_of
        arcs = [(i, p) for i, p in enumerate(partner) if p > i]
        for i, j in arcs:
            for k, l in arcs:
                if i < k < j < l:
                    # e_ij e_kl = e_ik e_jl + e_il e_kj
                    terms = [
                        self._shift(state, [(bo[i], bo[j]), (bo[k], bo[l])], [(bo[i], bo[k]), (bo[j], bo[l])], []),
                        self._shift(state, [(bo[i], bo[j]), (bo[k], bo[l])], [(bo[i], bo[l]), (bo[k], bo[j])], []),
                    ]
                    return self._combine(terms)
        for i, j in arcs:
            for u in range(i + 1, j):
                if up_flag[u]:
                    # e_ij up_u = e_iu up_j + e_uj up_i
                    terms = [
                        self._shift(state, [(bo[i], bo[j])], [(bo[i], bo[u])], [(bo[u], -1), (bo[j], 1)]),
                        self._shift(state, [(bo[i], bo[j])], [(bo[u], bo[j])], [(bo[u], -1), (bo[i], 1)]),
                    ]
                    return self._combine(terms)
        downs = [0] * self.L
        for i, p in enumerate(partner):
            if 0 <= p < i:
                downs[bo[i]] += 1
        return {tuple(downs): Fraction(1)}

    def _combine(self, terms) -> dict:
        out: dict = {}
        for t in terms:
            if t is None:
                continue
            for key, c in self.reduce(t).items():
                out[key] = out.get(key, 0) + c
        return {k: v for k, v in out.items() if v != 0}

    def _leg(self, i, partner, up_flag):
        p = partner[i]
        if p < 0:
            return None, _UP
        # tensor T[v_i, v_p] of the arc's singlet, oriented left to right
        return p, (_EPS if i < p else _EPS.T)

    def contract(self, i, j, partner, up_flag):
        """Apply ``|s><s|`` on strands ``i < j``; returns (coefficient, partner, up_flag)."""
        if partner[i] == j:
            return 2, partner, up_flag
        p, Ti = self._leg(i, partner, up_flag)
        q, Tj = self._leg(j, partner, up_flag)
        new_p, new_u = list(partner), list(up_flag)
        new_p[i], new_p[j] = j, i
        new_u[i] = new_u[j] = False
        if p is None and q is None:
            return 0, None, None
        if p is not None and q is not None:
            R = Ti.T @ _EPS @ Tj
            lo, hi = (p, q) if p < q else (q, p)
            E = _EPS if p < q else _EPS.T
            coef = int(R[0, 1] * E[0, 1])
            assert np.array_equal(R, coef * E)
            new_p[lo], new_p[hi] = hi, lo
            return coef, new_p, new_u
        if p is not None:
            v = Ti.T @ _EPS @ Tj
            other = p
        else:
            v = Ti @ _EPS @ Tj
            other = q
        coef = int(v[0])
        assert v[1] == 0
        new_p[other] = -1
        new_u[other] = True
        return coef, new_p, new_u

    def bond_column(self, state, x: int) -> dict:
        """``P U_{X,X+1} P`` on a basis state, as {downs-vector: coefficient}."""
        partner, up_flag = self.arrange(state)
        X, Y = x, x + 1
        nX, nY = self.sizes[X], self.sizes[Y]

        def groups(block):
            g: dict = {}
            for i in range(self.starts[block], self.starts[block] + self.sizes[block]):
                p = partner[i]
                key = ("up",) if p < 0 else (("left" if p < i else "right"), self.block_of[p])
                g.setdefault(key, []).append(i)
            return g

        gx, gy = groups(X), groups(Y)
        out: dict = {}
        for kx, sx in gx.items():
            for ky, sy in gy.items():
                pairs = []
                if kx == ("right", Y) and ky == ("left", X):
                    c = len(sx)
                    i = sx[0]
                    pairs.append((i, partner[i], c))
                    if c >= 2:
                        j = next(j for j in sy if j != partner[i])
                        pairs.append((i, j, c * (c - 1)))
                else:
                    pairs.append((sx[0], sy[0], len(sx) * len(sy)))
                for i, j, mult in pairs:
                    coef, np_, nu = self.contract(i, j, partner, up_flag)
                    if coef == 0:
                        continue
                    new_state = self.state_from_strands(np_, nu)
                    if new_state is None:
                        continue
                    for key, c in self.reduce(new_state).items():
                        out[key] = out.get(key, 0) + Fraction(coef * mult) * c
        scale = Fraction(1, nX * nY)
        return {k: v * scale for k, v in out.items() if v != 0}


def _assemble_general(chain: SpinChainSpec, S: HalfInteger) -> SparseSectorMatrix:
    configs = hw_configs(chain, S)
    index = {tuple(int(k) for k in row): a for a, row in enumerate(configs)}
    calc = _DiagramCalculus(chain.doubled_spins)
    rows, cols, vals = [], [], []
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10000))
    try:
        for a, row in enumerate(configs):
            state = calc.state_of(pair_arcs(OrderedIsingConfig(tuple(row), chain.doubled_spins)))
            for x, J in enumerate(chain.couplings):
                for key, c in calc.bond_column(state, x).items():
                    rows.append(index[key])
                    cols.append(a)
                    # exact rational times 2J keeps the sign exact
                    vals.append(float(2 * c) * J)
    finally:
        sys.setrecursionlimit(limit)
    return SparseSectorMatrix.from_triplets(len(configs), rows, cols, vals, S, chain.fingerprint())


def _assemble_expansion(chain: SpinChainSpec, S: HalfInteger, limit: int | None) -> SparseSectorMatrix:
    diagrams = enumerate_hw_basis(chain, S)
    V = expansion_matrix(diagrams, chain, limit)
    H = hamiltonian_sparse(chain)
    if H.nnz and abs(H.imag).max() > 1e-12:
        raise RuntimeError("Hamiltonian is expected to be real in the m basis")
    HV = H.real @ V
    # least squares V M = H V by QR on unit columns; the Gram route squares the condition number
    norms = np.linalg.norm(V, axis=0)
    Q, R = np.linalg.qr(V / norms)
    M = sla.solve_triangular(R, Q.T @ HV) / norms[:, None]
    return SparseSectorMatrix.from_dense(M, S, chain.fingerprint())


def sector_hamiltonian(
    chain: SpinChainSpec, S: SpinLike, method: str = "auto", limit: int | None = None
) -> SparseSectorMatrix:
    """Coefficient matrix of H on the spin-``S`` highest-weight arc basis.

    ``method`` is ``"diagram"``, ``"expansion"`` or ``"auto"`` (cup-cap kernel
    for spin-1/2 Heisenberg chains, the expansion inside the dense limit,
    the general diagram calculus beyond it).
    """
    S = HalfInteger.of(S)
    if not is_admissible(chain, S):
        raise NotAdmissible(S, chain)
    lim = DEFAULT_DENSE_LIMIT if limit is None else limit
    if method == "auto":
        if chain.is_heisenberg and chain.all_half:
            method = "diagram"
        elif chain.hilbert_dim <= lim:
            method = "expansion"
        elif chain.is_heisenberg:
            method = "diagram"
        else:
            raise DimensionTooLarge(chain.hilbert_dim, lim)
    if method == "diagram":
        if not chain.is_heisenberg:
            raise UnsupportedSpin("diagrammatic assembly covers the Heisenberg model only")
        if chain.all_half:
            return _assemble_half(chain, S)
        return _assemble_general(chain, S)
    if method == "expansion":
        if chain.hilbert_dim > lim:
            raise DimensionTooLarge(chain.hilbert_dim, lim)
        return _assemble_expansion(chain, S, lim)
    raise ValueError(f"unknown assembly method {method!r}")


# --------------------------------------------------------------------------
# sign structure and embedding comparison


def _as_dense(m) -> np.ndarray:
    if isinstance(m, SparseSectorMatrix):
        return m.to_dense()
    return np.asarray(m, dtype=float)


def offdiag_nonpositive_check(m, tol: float = OFFDIAG_TOL) -> ComparisonVerdict:
    """Every off-diagonal entry must be at most ``tol``; violations are witnesses."""
    if isinstance(m, SparseSectorMatrix):
        mask = (m.rows != m.cols) & (m.vals > tol)
        bad = [((int(r), int(c)), float(v)) for r, c, v in zip(m.rows[mask], m.cols[mask], m.vals[mask])]
    else:
        A = _as_dense(m)
        off = A.copy()
        np.fill_diagonal(off, -np.inf)
        r, c = np.nonzero(off > tol)
        bad = [((int(i), int(j)), float(A[i, j])) for i, j in zip(r, c)]
    if bad:
        return ComparisonVerdict(Status.VIOLATED, bad, label="off-diagonal sign")
    return ComparisonVerdict(Status.HOLDS_STRICT, label="off-diagonal sign")


def compare_embedded(m_small, m_large, embedding: Sequence[int], tol: float = EMBED_TOL) -> ComparisonVerdict:
    """Check ``large[e(i), e(j)] <= small[i, j]`` on the embedded block."""
    A = _as_dense(m_small)
    B = _as_dense(m_large)
    emb = np.asarray(embedding, dtype=np.int64)
    if len(emb) != A.shape[0]:
        raise DimensionMismatch(f"embedding has {len(emb)} entries for a {A.shape[0]}-dim sector")
    if len(emb) and (emb.min() < 0 or emb.max() >= B.shape[0]):
        raise DimensionMismatch("embedding points outside the larger sector")
    if len(set(emb.tolist())) != len(emb):
        raise DimensionMismatch("embedding is not injective")
    sub = B[np.ix_(emb, emb)]
    diff = sub - A
    bad = [((int(i), int(j)), float(diff[i, j])) for i, j in zip(*np.nonzero(diff > tol))]
    if bad:
        return ComparisonVerdict(Status.VIOLATED, bad, label="embedded entries")
    strict = [((int(i), int(j)), float(diff[i, j])) for i, j in zip(*np.nonzero(diff < -tol))]
    status = Status.HOLDS_STRICT if strict else Status.HOLDS_NONSTRICT
    return ComparisonVerdict(status, strict, label="embedded entries")
