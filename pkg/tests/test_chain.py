import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foelkit.chain import (
    BilinearBiquadratic,
    HalfInteger,
    StepKind,
    admissible_spins,
    build_sequence,
    chain,
    is_admissible,
    max_total_spin,
    multiplicity,
    multiplicity_table,
)
from foelkit.errors import InvalidChain
from foelkit.oracle import casimir_total

spin_lists = st.lists(st.integers(min_value=1, max_value=5), min_size=1, max_size=7).map(
    lambda ds: [HalfInteger(d) for d in ds]
)


class TestHalfInteger:
    def test_parsing(self):
        assert HalfInteger.of("3/2").doubled == 3
        assert HalfInteger.of(2).doubled == 4
        assert HalfInteger.of(Fraction(1, 2)).doubled == 1
        assert HalfInteger.of(0.5) == HalfInteger(1)

    def test_rejects_thirds(self):
        with pytest.raises(ValueError):
            HalfInteger.of("1/3")

    def test_arithmetic_is_exact(self):
        a, b = HalfInteger.of("3/2"), HalfInteger.of("1/2")
        assert a + b == 2
        assert a - b == 1
        assert b < a
        assert str(a) == "3/2" and str(a + b) == "2"

    def test_hash_matches_equality(self):
        assert len({HalfInteger(2), HalfInteger.of(1), HalfInteger.of("2/2")}) == 1


class TestChainSpec:
    def test_defaults(self):
        c = chain(["1/2", "1"])
        assert c.couplings == (1.0,)
        assert c.hilbert_dim == 6

    @pytest.mark.parametrize(
        "spins, couplings",
        [([], None), (["0"], None), (["1/2", "1/2"], [1.0, 2.0]), (["1/2", "1/2"], [0.0]), (["1/2", "1"], [-1.0])],
    )
    def test_invalid(self, spins, couplings):
        with pytest.raises(InvalidChain):
            chain(spins, couplings)

    def test_biquadratic_needs_spin_one(self):
        with pytest.raises(InvalidChain):
            chain(["1", "1/2"], model=BilinearBiquadratic(0.1))
        assert chain(["1", "1"], model=BilinearBiquadratic(0.1)).model.t == 0.1

    def test_fingerprint_sensitive_to_every_field(self):
        base = chain(["1/2", "1"], [1.0])
        others = [chain(["1/2", "3/2"], [1.0]), chain(["1/2", "1"], [1.5]), chain(["1", "1"], model=BilinearBiquadratic(0.2))]
        assert len({base.fingerprint(), *(o.fingerprint() for o in others)}) == 4


@pytest.mark.parametrize(
    "spins, expected",
    [(["1/2"], "1/2"), (["1/2", "1", "3/2"], "3"), (["1/2"] * 4, "2")],
)
def test_max_total_spin(spins, expected):
    assert max_total_spin(chain(spins)) == HalfInteger.of(expected)


def test_multiplicity_examples():
    two = chain(["1/2", "1/2"])
    assert multiplicity(two, 0) == 1 and multiplicity(two, 1) == 1
    four = chain(["1/2"] * 4)
    assert [multiplicity(four, S) for S in (2, 1, 0)] == [1, 3, 2]
    assert multiplicity(four, "1/2") == 0


def test_admissible_examples():
    assert admissible_spins(chain(["1/2", "1/2"])) == [1, 0]
    assert admissible_spins(chain(["1/2", "1"])) == [HalfInteger(3), HalfInteger(1)]
    assert admissible_spins(chain(["1"])) == [1]
    assert not is_admissible(chain(["1/2", "1"]), 1)
    assert not is_admissible(chain(["1/2", "1"]), "5/2")


@given(spin_lists)
@settings(max_examples=200, deadline=None)
def test_completeness_and_top_multiplicity(spins):
    c = chain(spins)
    total = sum(multiplicity(c, S) * (S.doubled + 1) for S in admissible_spins(c))
    assert total == math.prod(s.doubled + 1 for s in spins)
    assert multiplicity(c, max_total_spin(c)) == 1
    # closed-form admissible range agrees with the full reduction
    assert admissible_spins(c) == list(multiplicity_table(c))


def _brute_multiplicities(doubled):
    # count states per doubled magnetization, then difference adjacent counts
    counts = np.zeros(1, dtype=object)
    counts[0] = 1
    for d in doubled:
        new = np.zeros(len(counts) + d, dtype=object)
        for k in range(d + 1):
            new[k : k + len(counts)] += counts
        counts = new
    top = sum(doubled)
    out = {}
    # index i corresponds to doubled M = top - 2 i
    for i in range(len(counts)):
        M2 = top - 2 * i
        if M2 < 0:
            break
        nxt = counts[i - 1] if i > 0 else 0
        if counts[i] - nxt:
            out[M2] = counts[i] - nxt
    return out


@given(spin_lists)
@settings(max_examples=100, deadline=None)
def test_multiplicity_matches_magnetization_counting(spins):
    c = chain(spins)
    brute = _brute_multiplicities(c.doubled_spins)
    assert {S.doubled: multiplicity(c, S) for S in admissible_spins(c)} == brute


@pytest.mark.parametrize("spins", [["1/2"] * 4, ["1", "1/2", "1"], ["3/2", "1"], ["1/2", "1/2", "3/2"]])
def test_multiplicity_matches_casimir_eigenspaces(spins):
    c = chain(spins)
    w = np.linalg.eigvalsh(casimir_total(c))
    for S in admissible_spins(c):
        cas = float(S) * (float(S) + 1)
        count = int(np.sum(np.abs(w - cas) < 1e-8))
        assert count == multiplicity(c, S) * (S.doubled + 1)


class TestBuildSequence:
    def test_examples(self):
        seq = build_sequence(chain(["1/2", "1/2"]))
        assert [s.kind for s in seq] == [StepKind.START, StepKind.CASE_I]
        seq = build_sequence(chain(["1/2", "1"]))
        assert [s.kind for s in seq] == [StepKind.START, StepKind.CASE_I, StepKind.CASE_II]
        assert [s.resulting_chain.doubled_spins for s in seq] == [(1,), (1, 1), (1, 2)]
        seq = build_sequence(chain(["1"]))
        assert [s.kind for s in seq] == [StepKind.START, StepKind.CASE_II]

    @given(spin_lists, st.integers(0, 10_000))
    @settings(max_examples=100, deadline=None)
    def test_invariants(self, spins, seed):
        J = list(np.random.default_rng(seed).uniform(0.1, 2.0, len(spins) - 1))
        c = chain(spins, J)
        seq = build_sequence(c)
        assert len(seq) == max_total_spin(c).doubled
        assert seq[0].resulting_chain.doubled_spins == (1,)
        assert seq[-1].resulting_chain == c
        for prev, step in zip(seq, seq[1:]):
            a, b = prev.resulting_chain, step.resulting_chain
            assert max_total_spin(b) - max_total_spin(a) == HalfInteger(1)
            assert b.couplings == c.couplings[: b.length - 1]
            if step.kind is StepKind.CASE_I:
                assert b.doubled_spins == a.doubled_spins + (1,)
            else:
                assert b.doubled_spins[:-1] == a.doubled_spins[:-1]
                assert b.doubled_spins[-1] == a.doubled_spins[-1] + 1
            # multiplicities never shrink when moving to S + 1/2
            for S in admissible_spins(a):
                assert multiplicity(a, S) <= multiplicity(b, S + HalfInteger(1))

    def test_rejects_biquadratic(self):
        with pytest.raises(InvalidChain):
            build_sequence(chain(["1", "1"], model=BilinearBiquadratic(0.0)))
