import itertools

import numpy as np
import pytest

from foelkit.chain import chain

SPIN_CHOICES = ("1/2", "1", "3/2")


def exhaustive_chains(max_len=4, spins=SPIN_CHOICES):
    for L in range(1, max_len + 1):
        for combo in itertools.product(spins, repeat=L):
            yield chain(combo)


def random_chains(n, seed=2024, max_len=6, spins=SPIN_CHOICES):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        L = int(rng.integers(1, max_len + 1))
        combo = [spins[int(k)] for k in rng.integers(0, len(spins), L)]
        # J in (0, 2]
        J = 2.0 - rng.uniform(0.0, 2.0, L - 1)
        out.append(chain(combo, list(J)))
    return out


def z_matrix(rng, n, density=0.6, symmetric=True):
    """Random matrix with non-positive off-diagonal entries."""
    off = -rng.uniform(0, 1, (n, n)) * (rng.uniform(size=(n, n)) < density)
    if symmetric:
        off = (off + off.T) / 2
    np.fill_diagonal(off, 0)
    return off + np.diag(rng.uniform(-1, 3, n))


def random_pair(rng, max_dim=20):
    m = int(rng.integers(1, max_dim + 1))
    n = int(rng.integers(m, max_dim + 1))
    sym = bool(rng.integers(0, 2))
    B = z_matrix(rng, n, density=rng.uniform(0.1, 0.9), symmetric=sym)
    # A dominates B entrywise on the leading block, keeping its off-diagonals <= 0
    bump = rng.uniform(0, 0.5, (m, m)) * (rng.uniform(size=(m, m)) < 0.3)
    if sym:
        bump = (bump + bump.T) / 2
    A = B[:m, :m] + bump
    off = ~np.eye(m, dtype=bool)
    A[off] = np.minimum(A[off], 0.0)
    return A, B


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


SMALL_CHAINS = [
    chain(["1/2"]),
    chain(["1"]),
    chain(["1/2", "1/2"]),
    chain(["1/2", "1"]),
    chain(["1", "1"]),
    chain(["1/2"] * 3),
    chain(["1/2"] * 4, [0.7, 1.3, 0.4]),
    chain(["1", "1/2", "3/2"], [1.2, 0.5]),
    chain(["3/2", "1", "1"], [0.9, 1.9]),
    chain(["1/2", "2", "1/2"], [1.0, 0.25]),
    chain(["1", "1", "1", "1"], [0.3, 1.0, 1.7]),
]


@pytest.fixture(params=SMALL_CHAINS, ids=lambda c: "-".join(str(s) for s in c.spins))
def small_chain(request):
    return request.param
