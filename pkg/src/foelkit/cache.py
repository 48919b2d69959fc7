"""On-disk cache of assembled sector matrices.

File layout: a header ``dim nnz sector_doubled`` followed by one
``row col value`` line per stored entry (0-based, 17 significant digits).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .chain import HalfInteger, SpinChainSpec, SpinLike
from .tl import NORMALIZATION_VERSION, SparseSectorMatrix, sector_hamiltonian

ENV_VAR = "FOEL_CACHE_DIR"
DEFAULT_DIR = ".foel-cache"


def cache_key(chain: SpinChainSpec, S: SpinLike) -> str:
    S = HalfInteger.of(S)
    blob = json.dumps(
        {
            "spins": [s.doubled for s in chain.spins],
            "couplings": [repr(j) for j in chain.couplings],
            "model": chain.model.to_json(),
            "sector": S.doubled,
            "normalization": NORMALIZATION_VERSION,
        },
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()


def write_matrix(path: Path, m: SparseSectorMatrix) -> None:
    """Write atomically: a temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".txt")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(f"{m.dim} {m.nnz} {m.sector.doubled}\n")
            for r, c, v in zip(m.rows, m.cols, m.vals):
                fh.write(f"{int(r)} {int(c)} {float(v):.17g}\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_matrix(path: Path, fingerprint: str = "") -> SparseSectorMatrix:
    with open(path) as fh:
        dim, nnz, s2 = (int(x) for x in fh.readline().split())
        data = np.loadtxt(fh, ndmin=2) if nnz else np.zeros((0, 3))
    if data.shape[0] != nnz:
        raise ValueError(f"{path}: header promises {nnz} entries, found {data.shape[0]}")
    rows = data[:, 0].astype(np.int64)
    cols = data[:, 1].astype(np.int64)
    return SparseSectorMatrix(dim, rows, cols, data[:, 2].copy(), HalfInteger(s2), fingerprint)


class SectorCache:
    """Directory of cached sector matrices keyed by chain, sector and normalization."""

    def __init__(self, directory: str | os.PathLike | None = None):
        if directory is None:
            directory = os.environ.get(ENV_VAR) or DEFAULT_DIR
        self.directory = Path(directory)
        self.hits = 0
        self.misses = 0

    def path_for(self, chain: SpinChainSpec, S: SpinLike) -> Path:
        return self.directory / f"{cache_key(chain, S)}.txt"

    def get(self, chain: SpinChainSpec, S: SpinLike, limit: int | None = None) -> SparseSectorMatrix:
        path = self.path_for(chain, S)
        if path.exists():
            self.hits += 1
            return read_matrix(path, chain.fingerprint())
        self.misses += 1
        m = sector_hamiltonian(chain, S, limit=limit)
        write_matrix(path, m)
        return m
