import os
import subprocess
import sys

import numpy as np
import pytest

from foelkit import _kernels_py, kernels
from foelkit.basis import hw_configs
from foelkit.chain import chain

compiled = pytest.importorskip("foelkit._kernels")


def _sorted_triplets(t):
    rows, cols, vals = (np.asarray(a) for a in t)
    order = np.lexsort((rows, cols))
    return rows[order], cols[order], vals[order]


def test_pair_strands_parity(rng):
    for _ in range(300):
        n = int(rng.integers(0, 40))
        down = rng.integers(0, 2, n).astype(np.uint8)
        a = compiled.pair_strands(down)
        b = _kernels_py.pair_strands(down)
        assert np.array_equal(np.asarray(a), np.asarray(b))


def test_enumeration_parity(rng):
    for _ in range(100):
        sizes = rng.integers(1, 5, int(rng.integers(1, 7))).astype(np.int64)
        for n_down in range(-1, sum(sizes) // 2 + 2):
            a = np.asarray(compiled.enumerate_hw_downs(sizes, n_down))
            b = np.asarray(_kernels_py.enumerate_hw_downs(sizes, n_down))
            assert a.shape == b.shape and np.array_equal(a, b)


def test_assembly_parity(rng):
    for L in range(2, 12):
        c = chain(["1/2"] * L, list(rng.uniform(0.1, 2, L - 1)))
        J = np.asarray(c.couplings)
        for n_down in range(L // 2 + 1):
            S = (L - 2 * n_down) / 2
            states = hw_configs(c, S).astype(np.uint8)
            a = _sorted_triplets(compiled.assemble_half(states, J))
            b = _sorted_triplets(_kernels_py.assemble_half(states, J))
            for x, y in zip(a, b):
                assert np.array_equal(x, y)


def test_backend_selection():
    assert kernels.BACKEND == ("python" if os.environ.get("FOELKIT_PURE_PYTHON") else "cython")
    env = dict(os.environ, FOELKIT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from foelkit import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
