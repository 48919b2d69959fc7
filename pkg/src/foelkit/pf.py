"""Minimum-eigenvalue comparison for matrices with non-positive off-diagonals.

If ``B`` is at least as large as ``A``, both have non-positive off-diagonal
entries and ``B`` is entrywise below ``A`` on ``A``'s index block, then the
lowest eigenvalue of ``B`` does not exceed that of ``A``.  Strictness needs
either a larger ``B`` or one strict entry, plus primitivity of ``cI - B``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import shortest_path

from .errors import NoConvergence
from .results import ComparisonVerdict, Status
from .tl import OFFDIAG_TOL, SparseSectorMatrix

DENSE_MAX = 2000
GAP_TOL = 1e-10
MAX_ITER = 100_000
RESIDUAL_TOL = 1e-12
POWER_STEPS = 2000
POLISH_START = 1e-4


@dataclass(frozen=True)
class IrreducibilityCertificate:
    shift: float
    power: int
    attained: bool


def _as_matrix(m):
    if isinstance(m, SparseSectorMatrix):
        return m.to_csr()
    if sp.issparse(m):
        return m.tocsr()
    return np.atleast_2d(np.asarray(m, dtype=float))


def _dense(m) -> np.ndarray:
    m = _as_matrix(m)
    return m.toarray() if sp.issparse(m) else m


def _tridiagonal_min(A) -> float | None:
    """Exact route for tridiagonal matrices with positive off-diagonal products.

    Such a matrix is diagonally similar to the symmetric tridiagonal with
    off-diagonals ``-sqrt(a_{i,i+1} a_{i+1,i})``.
    """
    coo = sp.coo_matrix(A)
    if coo.nnz and np.any(np.abs(coo.row - coo.col) > 1):
        return None
    A = coo.tocsr()
    n = A.shape[0]
    d = A.diagonal(0)
    up = A.diagonal(1) if n > 1 else np.zeros(0)
    lo = A.diagonal(-1) if n > 1 else np.zeros(0)
    prod = up * lo
    if np.any(prod <= 0):
        return None
    e = -np.sqrt(prod)
    w = sla.eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 0))
    return float(w[0])


def power_iteration_min(m, max_iter: int = MAX_ITER, tol: float = RESIDUAL_TOL) -> float:
    """Lowest eigenvalue of a matrix with non-positive off-diagonals.

    Power iteration on ``T = c I - M`` with ``c = max diag + 1`` keeps the
    iterate positive.  Its Collatz-Wielandt bound ``max (T v)_i / v_i`` gives a
    shift at or below the lowest eigenvalue, which every other eigenvalue
    exceeds in real part, so inverse iteration from that shift locks onto it.
    Both phases share the ``max_iter`` budget.
    """
    M = _as_matrix(m)
    M = sp.csc_matrix(M) if not sp.issparse(M) else M.tocsc()
    n = M.shape[0]
    c = float(M.diagonal().max()) + 1.0
    T = (c * sp.identity(n, format="csc") - M).tocsr()
    v = np.ones(n) / np.sqrt(n)
    scale = max(1.0, abs(c))
    res = np.inf
    it = 0
    for it in range(1, min(max_iter, POWER_STEPS) + 1):
        w = T @ v
        lam = float(v @ w)
        res = float(np.linalg.norm(w - lam * v))
        v = w / np.linalg.norm(w)
        if res < POLISH_START * scale:
            break
    if it >= max_iter:
        if res < tol * max(1.0, abs(lam)):
            return c - lam
        raise NoConvergence(max_iter, res)
    # the bound holds for any positive vector; the floor covers underflowed entries
    u = v + 1e-12
    bound = float(np.max((T @ u) / u))
    sigma = c - bound - 1e-8 * scale
    lu = spla.splu((M - sigma * sp.identity(n, format="csc")).tocsc())
    for it in range(it + 1, max_iter + 1):
        x = lu.solve(v)
        v = x / np.linalg.norm(x)
        Mv = M @ v
        lam = float(v @ Mv)
        res = float(np.linalg.norm(Mv - lam * v))
        if res < tol * scale:
            return lam
    raise NoConvergence(max_iter, res)


def min_eigenvalue(m, method: str = "auto") -> float:
    """Lowest (real) eigenvalue.

    ``auto`` uses a dense eigensolve up to ``DENSE_MAX`` rows, the exact
    symmetrized tridiagonal route when it applies, and power iteration
    otherwise.
    """
    M = _as_matrix(m)
    n = M.shape[0]
    if n == 0:
        raise ValueError("empty matrix has no eigenvalues")
    if method == "power":
        return power_iteration_min(M)
    if method == "auto":
        tri = _tridiagonal_min(M) if n > 2 else None
        if tri is not None:
            return tri
        if n > DENSE_MAX:
            return power_iteration_min(M)
        method = "dense"
    if method != "dense":
        raise ValueError(f"unknown eigenvalue method {method!r}")
    w = np.linalg.eigvals(_dense(M))
    k = int(np.argmin(w.real))
    return float(w[k].real)


def irreducibility_certificate(b) -> IrreducibilityCertificate:
    """Smallest ``p`` with ``(cI - B)^p`` entrywise positive, ``c = max diag + 1``.

    The diagonal of ``cI - B`` is positive, so entry ``(i, j)`` of the ``p``-th
    power is positive exactly when ``j`` is reachable from ``i`` in at most
    ``p`` steps along the positive entries.
    """
    B = _as_matrix(b)
    n = B.shape[0]
    c = float(B.diagonal().max()) + 1.0
    T = c * sp.identity(n, format="csr") - sp.csr_matrix(B)
    pattern = sp.csr_matrix(T > 0, dtype=float)
    dist = shortest_path(pattern, method="D", directed=True, unweighted=True)
    if not np.all(np.isfinite(dist)):
        return IrreducibilityCertificate(c, n, False)
    p = max(1, int(dist.max()))
    return IrreducibilityCertificate(c, p, p <= n)


def pf_compare(a, b, tol: float = GAP_TOL) -> ComparisonVerdict:
    """Check the comparison hypotheses on ``(A, B)`` and compare lowest eigenvalues."""
    A, B = _dense(a), _dense(b)
    m, n = A.shape[0], B.shape[0]
    problems = []
    if n < m:
        problems.append(("size", float(n - m)))
    for name, X in (("A", A), ("B", B)):
        off = X - np.diag(np.diag(X))
        for i, j in zip(*np.nonzero(off > OFFDIAG_TOL)):
            problems.append(((name, int(i), int(j)), float(X[i, j])))
    k = min(m, n)
    diff = B[:k, :k] - A[:k, :k]
    for i, j in zip(*np.nonzero(diff > OFFDIAG_TOL)):
        problems.append((("B>A", int(i), int(j)), float(diff[i, j])))
    if problems:
        return ComparisonVerdict(Status.PRECONDITION_FAILED, problems, label="comparison")
    e_small = min_eigenvalue(A)
    e_large = min_eigenvalue(B)
    strict_entries = [((int(i), int(j)), float(diff[i, j])) for i, j in zip(*np.nonzero(diff < -OFFDIAG_TOL))]
    strict_hyp = m < n or bool(strict_entries)
    cert = irreducibility_certificate(B)
    witnesses = [(("gap",), e_small - e_large)]
    if strict_hyp and cert.attained and e_large < e_small - tol:
        status = Status.HOLDS_STRICT
    elif e_large <= e_small + tol:
        status = Status.HOLDS_NONSTRICT
    else:
        status = Status.VIOLATED
    return ComparisonVerdict(status, witnesses, e_small, e_large, label="comparison")


def embedded_order(b, embedding) -> np.ndarray:
    """Permute ``B`` so the embedded indices come first, in embedding order."""
    B = _dense(b)
    emb = list(embedding)
    rest = [i for i in range(B.shape[0]) if i not in set(emb)]
    perm = np.asarray(emb + rest, dtype=np.int64)
    return B[np.ix_(perm, perm)]
