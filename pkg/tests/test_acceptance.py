"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import time

import numpy as np
import pytest

from foelkit.basis import embedding_indices, enumerate_hw_basis, expansion_matrix
from foelkit.chain import HalfInteger, admissible_spins, build_sequence, multiplicity, uniform_chain
from foelkit.chain import chain
from foelkit.oracle import DEFAULT_DENSE_LIMIT, _dot, hw_spectrum_dense, total_spin_sparse
from foelkit.pf import pf_compare, power_iteration_min
from foelkit.results import Status
from foelkit.spectra import (
    biquadratic_sweep,
    eigenvalues_below,
    energy_table,
    foel_check,
    increment_relations_check,
    spectral_gap,
)
from foelkit.tl import compare_embedded, offdiag_nonpositive_check, sector_hamiltonian

from conftest import exhaustive_chains, random_chains, random_pair, z_matrix

pytestmark = pytest.mark.slow

SUITE = list(exhaustive_chains(4)) + random_chains(200, seed=2024, max_len=6)
IN_LIMIT = [c for c in SUITE if c.hilbert_dim <= DEFAULT_DENSE_LIMIT]


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail, elapsed):
        with capsys.disabled():
            flag = "PASS" if ok else "FAIL"
            print(f"\n[{flag}] criterion {number}: {title} | {detail} | {elapsed:.2f}s")

    return emit


def test_criterion_1_golden_spectra(report):
    start = time.perf_counter()
    golden = {
        ("1/2", "1/2"): [0, 4],
        ("1", "1"): [0, 2, 3],
        ("1/2", "1"): [0, 3],
        ("1/2", "1/2", "1/2"): [0, 2],
    }
    worst = 0.0
    for spins, expected in golden.items():
        for method in ("dense", "sector"):
            got = [e.energy for e in energy_table(chain(spins), method)]
            worst = max(worst, float(np.max(np.abs(np.array(got) - expected))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 1.0
    report(1, "golden sector energies", ok, f"max error {worst:.1e}", elapsed)
    assert ok


def test_criterion_2_foel_suite(report):
    start = time.perf_counter()
    bad = []
    for c in SUITE:
        r = foel_check(c, tol=1e-9)
        if r.status is not Status.HOLDS_STRICT:
            bad.append((c.to_json(), r.status.value))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 300
    report(2, "strict level ordering", ok, f"{len(SUITE)} chains, {len(bad)} failures", elapsed)
    assert ok, bad[:3]


def test_criterion_3_increment_suite(report):
    start = time.perf_counter()
    bad, n_op, n_eq = [], 0, 0
    for c in IN_LIMIT:
        for v in increment_relations_check(c):
            if "operator" in v.label:
                n_op += 1
                if not v.holds:
                    bad.append((c.to_json(), v.label, v.witnesses))
            else:
                n_eq += 1
                if v.status is not Status.HOLDS_STRICT:
                    bad.append((c.to_json(), v.label, v.witnesses))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 600
    detail = f"{n_op} operator relations, {n_eq} sector decreases, {len(bad)} failures"
    report(3, "increment relations", ok, detail, elapsed)
    assert ok, bad[:3]


def test_criterion_4_basis(report):
    start = time.perf_counter()
    failures, worst_hw, worst_cas, worst_gram = 0, 0.0, 0.0, np.inf
    for c in IN_LIMIT:
        sx, sy, sz = total_spin_sparse(c)
        cas = _dot((sx, sy, sz), (sx, sy, sz))
        splus = sx + 1j * sy
        for S in admissible_spins(c):
            diagrams = enumerate_hw_basis(c, S)
            if len(diagrams) != multiplicity(c, S):
                failures += 1
            V = expansion_matrix(diagrams, c)
            s = float(S)
            hw = float(np.linalg.norm(splus @ V, axis=0).max())
            ce = float(np.abs(cas @ V - s * (s + 1) * V).max())
            g = float(np.linalg.eigvalsh(V.T @ V)[0])
            worst_hw, worst_cas, worst_gram = max(worst_hw, hw), max(worst_cas, ce), min(worst_gram, g)
    elapsed = time.perf_counter() - start
    ok = failures == 0 and worst_hw < 1e-10 and worst_cas < 1e-8 and worst_gram > 1e-10
    detail = (
        f"count mismatches {failures}, max |S+ psi| {worst_hw:.1e}, "
        f"max Casimir residual {worst_cas:.1e}, min Gram eigenvalue {worst_gram:.2e}"
    )
    report(4, "highest-weight basis", ok, detail, elapsed)
    assert ok


def test_criterion_5_signs_and_embedding(report):
    start = time.perf_counter()
    sign_bad, emb_bad, exact_bad, n_mat, n_emb = 0, 0, 0, 0, 0
    for c in IN_LIMIT:
        seq = build_sequence(c)
        mats = {}
        for step in seq:
            cur = step.resulting_chain
            for S in admissible_spins(cur):
                m = sector_hamiltonian(cur, S)
                mats[(cur, S)] = m
                n_mat += 1
                if not offdiag_nonpositive_check(m, 1e-12).holds:
                    sign_bad += 1
                d = sector_hamiltonian(cur, S, method="diagram")
                if np.any(d.vals[d.rows != d.cols] > 0):
                    exact_bad += 1
        for prev, step in zip(seq, seq[1:]):
            small = prev.resulting_chain
            for S in admissible_spins(small):
                v = compare_embedded(
                    mats[(small, S)],
                    mats[(step.resulting_chain, S + HalfInteger(1))],
                    embedding_indices(small, S, step),
                )
                n_emb += 1
                emb_bad += not v.holds
    elapsed = time.perf_counter() - start
    ok = sign_bad == emb_bad == exact_bad == 0
    detail = (
        f"{n_mat} matrices ({sign_bad} sign, {exact_bad} exact-sign failures), "
        f"{n_emb} embeddings ({emb_bad} failures)"
    )
    report(5, "sign structure and embedding", ok, detail, elapsed)
    assert ok


def test_criterion_6_eigenvalue_comparison(report):
    start = time.perf_counter()
    rng = np.random.default_rng(6)
    violated, strict_bad, strict, prec = 0, 0, 0, 0
    for _ in range(1000):
        A, B = random_pair(rng, max_dim=20)
        v = pf_compare(A, B)
        violated += v.status is Status.VIOLATED
        prec += v.status is Status.PRECONDITION_FAILED
        if v.status is Status.HOLDS_STRICT:
            strict += 1
            ea, eb = np.linalg.eigvals(A).real.min(), np.linalg.eigvals(B).real.min()
            strict_bad += not eb < ea
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 201))
        M = z_matrix(rng, n, density=rng.uniform(0.02, 0.5), symmetric=bool(rng.integers(0, 2)))
        worst = max(worst, abs(power_iteration_min(M) - np.linalg.eigvals(M).real.min()))
    elapsed = time.perf_counter() - start
    ok = violated == prec == strict_bad == 0 and worst < 1e-8
    detail = (
        f"1000 pairs: {violated} violated, {strict} strict ({strict_bad} unconfirmed); "
        f"power iteration max error {worst:.1e}"
    )
    report(6, "eigenvalue comparison", ok, detail, elapsed)
    assert ok


def test_criterion_7_biquadratic(report):
    start = time.perf_counter()
    two = dict(biquadratic_sweep(2, [0.0, 0.1, 0.2, 0.3, 1 / 3, 0.5]))
    ok_two = all(two[t].status is Status.HOLDS_STRICT for t in (0.0, 0.1, 0.2, 0.3))
    boundary = two[1 / 3]
    ok_two &= boundary.status is Status.HOLDS_NONSTRICT
    ok_two &= abs(boundary.table.energy(0) - 2) < 1e-10 and abs(boundary.table.energy(1) - 2) < 1e-10
    ok_two &= two[0.5].status is Status.VIOLATED
    grid = [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 1 / 3]
    longer = []
    for L in range(3, 7):
        for t, rep in biquadratic_sweep(L, grid):
            longer.append((L, t, rep.status))
    n_viol = sum(st is Status.VIOLATED for _, _, st in longer)
    elapsed = time.perf_counter() - start
    ok = ok_two and n_viol == 0
    at_third = ", ".join(f"L={L}:{st.value}" for L, t, st in longer if t == 1 / 3)
    report(7, "biquadratic boundary", ok, f"two-site ok={ok_two}; L=3..6 violations {n_viol}; t=1/3 {at_third}", elapsed)
    assert ok


def test_criterion_8_sector_truncation(report):
    start = time.perf_counter()
    rng = np.random.default_rng(8)
    chains = [c for c in random_chains(80, seed=88, max_len=6) if c.hilbert_dim <= DEFAULT_DENSE_LIMIT][:50]
    worst, mismatched = 0.0, 0
    for c in chains:
        e_max = float(rng.uniform(0.5, 6.0))
        got = sorted(e for _, e in eigenvalues_below(c, e_max, method="sector"))
        spec = hw_spectrum_dense(c)
        want = sorted(v for vals in spec.values() for v in vals if v < e_max)
        if len(got) != len(want):
            mismatched += 1
            continue
        if got:
            worst = max(worst, float(np.max(np.abs(np.array(got) - want))))
    elapsed = time.perf_counter() - start
    ok = len(chains) == 50 and mismatched == 0 and worst < 1e-8
    report(8, "sector truncation", ok, f"{len(chains)} chains, {mismatched} count mismatches, max error {worst:.1e}", elapsed)
    assert ok


def test_criterion_9_gap_scaling(report):
    t0 = time.perf_counter()
    g2000 = spectral_gap(uniform_chain("1/2", 2000))
    t_big = time.perf_counter() - t0
    Ls = np.unique(np.geomspace(50, 2000, 25).astype(int))
    gaps = np.array([spectral_gap(uniform_chain("1/2", int(L))) for L in Ls])
    slope = float(np.polyfit(np.log(Ls), np.log(gaps), 1)[0])
    elapsed = time.perf_counter() - t0
    dim = sector_hamiltonian(uniform_chain("1/2", 2000), 999).dim
    ok = t_big < 10 and abs(slope + 2) <= 0.05 and dim == 1999
    detail = f"L=2000 gap {g2000:.4e} in {t_big:.2f}s (sector dim {dim}); slope {slope:.4f}"
    report(9, "gap scaling", ok, detail, elapsed)
    assert ok
