import numpy as np
import pytest

from foelkit.errors import NoConvergence
from foelkit.pf import (
    embedded_order,
    irreducibility_certificate,
    min_eigenvalue,
    pf_compare,
    power_iteration_min,
)
from foelkit.results import Status
from foelkit.tl import SparseSectorMatrix

from conftest import random_pair, z_matrix


class TestMinEigenvalue:
    @pytest.mark.parametrize(
        "m, e", [([[4, -2], [-2, 4]], 2.0), ([[0.0]], 0.0), ([[2, -1], [-1, 2]], 1.0)]
    )
    def test_examples(self, m, e):
        assert abs(min_eigenvalue(np.array(m, dtype=float)) - e) < 1e-12
        assert abs(power_iteration_min(np.array(m, dtype=float)) - e) < 1e-9

    def test_sparse_sector_input(self):
        m = SparseSectorMatrix.from_dense(np.array([[4.0, -2], [-2, 4]]), "1/2")
        assert abs(min_eigenvalue(m) - 2) < 1e-12

    def test_tridiagonal_route(self, rng):
        n = 60
        d = rng.uniform(1, 3, n)
        up, lo = -rng.uniform(0.1, 1, n - 1), -rng.uniform(0.1, 1, n - 1)
        T = np.diag(d) + np.diag(up, 1) + np.diag(lo, -1)
        w = np.linalg.eigvals(T)
        assert abs(min_eigenvalue(T) - w.real.min()) < 1e-10

    def test_power_matches_dense(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 201))
            M = z_matrix(rng, n, density=rng.uniform(0.02, 0.5), symmetric=bool(rng.integers(0, 2)))
            ref = np.linalg.eigvals(M).real.min()
            assert abs(power_iteration_min(M) - ref) < 1e-8

    def test_close_top_levels(self):
        # two weakly coupled blocks: the shifted ratio is about 1 - 1e-6
        eps = 1e-6
        M = np.array([[1.0, -eps, 0], [-eps, 1.0 + 2e-6, -1e-3], [0, -1e-3, 50.0]])
        ref = np.linalg.eigvalsh(M)[0]
        assert abs(power_iteration_min(M) - ref) < 1e-12

    def test_no_convergence(self, rng):
        M = z_matrix(rng, 30)
        with pytest.raises(NoConvergence):
            power_iteration_min(M, max_iter=3)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            min_eigenvalue(np.zeros((0, 0)))
        with pytest.raises(ValueError):
            min_eigenvalue(np.eye(2), method="lanczos")


class TestCertificate:
    def test_full(self):
        c = irreducibility_certificate(np.array([[4.0, -2], [-2, 4]]))
        assert c.attained and c.power == 1 and c.shift == 5

    def test_disconnected(self):
        assert not irreducibility_certificate(np.zeros((2, 2))).attained

    def test_path(self):
        T = 2 * np.eye(5) - np.eye(5, k=1) - np.eye(5, k=-1)
        c = irreducibility_certificate(T)
        assert c.attained and c.power == 4

    def test_against_explicit_powers(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 13))
            B = z_matrix(rng, n, density=rng.uniform(0.05, 0.5), symmetric=bool(rng.integers(0, 2)))
            cert = irreducibility_certificate(B)
            T = cert.shift * np.eye(n) - B
            powers = [np.linalg.matrix_power(T, p) for p in range(1, n + 1)]
            positive = [bool(np.all(P > 0)) for P in powers]
            assert cert.attained == any(positive)
            if cert.attained:
                assert positive.index(True) + 1 == cert.power


class TestCompare:
    def test_strict_example(self):
        v = pf_compare(np.array([[2.0, -1], [-1, 2]]), np.array([[1.0, -1], [-1, 1]]))
        assert v.status is Status.HOLDS_STRICT
        assert abs(v.e_small - 1) < 1e-12 and abs(v.e_large) < 1e-12

    def test_equal(self):
        v = pf_compare(np.zeros((1, 1)), np.zeros((1, 1)))
        assert v.status is Status.HOLDS_NONSTRICT

    def test_preconditions(self):
        assert pf_compare(np.eye(2), np.eye(1)).status is Status.PRECONDITION_FAILED
        assert pf_compare(np.array([[1.0, 0.2], [0.2, 1]]), np.eye(2)).status is Status.PRECONDITION_FAILED
        v = pf_compare(np.eye(2), 2 * np.eye(2))
        assert v.status is Status.PRECONDITION_FAILED
        assert v.witnesses[0][0][0] == "B>A"

    def test_reducible_never_strict(self):
        v = pf_compare(np.eye(2), np.diag([0.5, 0.5]))
        assert v.status is Status.HOLDS_NONSTRICT

    def test_random_pairs(self, rng):
        for _ in range(200):
            A, B = random_pair(rng)
            v = pf_compare(A, B)
            assert v.status is not Status.VIOLATED
            assert v.status is not Status.PRECONDITION_FAILED
            ea = np.linalg.eigvals(A).real.min()
            eb = np.linalg.eigvals(B).real.min()
            assert eb <= ea + 1e-10
            if v.status is Status.HOLDS_STRICT:
                assert eb < ea


def test_embedded_order():
    B = np.arange(9.0).reshape(3, 3)
    P = embedded_order(B, [2, 0])
    assert np.array_equal(P[:2, :2], B[np.ix_([2, 0], [2, 0])])
    assert P[2, 2] == B[1, 1]
