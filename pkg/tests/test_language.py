from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperbilliard.direction import Direction
from hyperbilliard.dynamics import sample_word
from hyperbilliard.language import (
    PAIR_FACTORS_D2,
    ChamberError,
    _pair_table,
    cell_frequency_d1,
    chamber_permutation,
    complexity,
    eigenvalue_group_membership,
    empirical_frequency,
    exact_frequency,
    factor_table,
    frequency_csv,
    frequency_rows,
    letter_frequency,
    occurrences,
    pair_frequency_d2,
)
from hyperbilliard.scalars.parser import parse_direction

SYM = Direction.generic_symbolic(2)
T1, T2 = SYM.thetas


def test_factor_table_hand_count():
    t = factor_table("121312", 2)
    assert t.counts == {"12": 2, "21": 1, "13": 1, "31": 1}
    assert sum(t.counts.values()) == 5


@given(st.text(alphabet="123", min_size=1, max_size=60), st.integers(1, 25))
def test_factor_table_matches_python_counter(word, n):
    if n > len(word):
        with pytest.raises(ValueError):
            factor_table(word, n)
        return
    expected = Counter(word[i:i + n] for i in range(len(word) - n + 1))
    t = factor_table(word, n)
    assert t.counts == dict(expected)
    assert sum(t.counts.values()) == len(word) - n + 1
    for w in list(expected)[:3]:
        assert int(occurrences(word, w).sum()) == expected[w]


def test_letter_frequencies_reference(ref_dir):
    got = [float(letter_frequency(ref_dir, a).value) for a in (1, 2, 3)]
    assert np.allclose(got, [0.2411810, 0.4177354, 0.3410836], atol=5e-8)


def test_letter_frequencies_symbolic_sum():
    assert sum(letter_frequency(SYM, a).value for a in (1, 2, 3)) == 1


def test_letter_frequency_d1(golden_dir):
    t = golden_dir.thetas[0]
    assert letter_frequency(golden_dir, 1).value == 1 / (1 + t)


def test_pair_frequencies_reference(ref_dir):
    want = {"31": 0.098462, "21": 0.142719, "23": 0.242619, "22": 0.032399}
    for w, v in want.items():
        assert abs(float(pair_frequency_d2(ref_dir, w).value) - v) < 1e-6
    assert pair_frequency_d2(ref_dir, "11").value == 0
    assert pair_frequency_d2(ref_dir, "33").value == 0


def test_pair_table_symbolic_sum_is_one():
    table = _pair_table(T1, T2)
    assert set(table) == set(PAIR_FACTORS_D2)
    assert sum(table.values()) == 1


def test_pair_table_marginals_equal_letter_frequencies():
    table = _pair_table(T1, T2)
    for a in "123":
        mu = letter_frequency(SYM, int(a)).value
        assert sum((v for w, v in table.items() if w[0] == a), T1 * 0) == mu
        assert sum((v for w, v in table.items() if w[1] == a), T1 * 0) == mu


@settings(max_examples=100)
@given(st.floats(1.001, 20), st.floats(0.001, 0.999))
def test_pair_table_nonnegative_on_chamber(t1, frac):
    t2 = t1 * frac
    assert all(v >= -1e-15 for v in _pair_table(t1, t2).values())


def test_pair_frequencies_match_counts(ref_dir, ref_word):
    t = factor_table(ref_word, 2)
    for w in PAIR_FACTORS_D2:
        assert abs(t.frequency(w) - float(pair_frequency_d2(ref_dir, w).value)) < 1e-3


def test_chamber_permutation_reference_is_identity(ref_dir):
    canon, mapping = chamber_permutation(ref_dir)
    assert mapping == {1: 1, 2: 2, 3: 3} and canon is ref_dir


@pytest.mark.parametrize("text", ["1,sqrt(2),sqrt(3)", "1,sqrt(2)/3,sqrt(3)/5",
                                  "1,sqrt(3)/4,sqrt(2)/2"])
def test_permuted_directions_match_counts(text):
    d = parse_direction(text)
    canon, mapping = chamber_permutation(d)
    t1, t2 = canon.thetas
    assert t1 > t2 > 0 and t1 > 1
    word = sample_word(d, 5, 200_000)
    table = factor_table(word, 2)
    total = 0
    for a in "123":
        for b in "123":
            mu = float(pair_frequency_d2(d, a + b).value)
            total += mu
            assert abs(table.frequency(a + b) - mu) < 3e-3
    assert abs(total - 1) < 1e-12


def test_chamber_ties_refused():
    with pytest.raises(ChamberError):
        chamber_permutation(parse_direction("1,sqrt(2),sqrt(2)"))
    with pytest.raises(ChamberError):
        pair_frequency_d2(parse_direction("1,sqrt(2)"), "12")


def test_eigenvalue_group_membership():
    mu = {a: letter_frequency(SYM, a).value for a in (1, 2, 3)}
    table = _pair_table(T1, T2)
    assert eigenvalue_group_membership(mu[2], SYM) == (0, 1, 0)
    assert eigenvalue_group_membership(2 * mu[1] - 3 * mu[3], SYM) == (2, 0, -3)
    assert eigenvalue_group_membership(table["31"], SYM) is None
    assert eigenvalue_group_membership(table["22"], SYM) is None
    dilated = {w for w, v in table.items()
               if eigenvalue_group_membership(v * 2 * T1, SYM) is not None}
    assert dilated == {"12", "21", "13", "31"}


def test_letters_balanced_implies_eigenvalue():
    for a in (1, 2, 3):
        assert eigenvalue_group_membership(letter_frequency(SYM, a).value, SYM) is not None


def test_eigenvalue_membership_needs_symbolic(ref_dir):
    with pytest.raises(TypeError):
        eigenvalue_group_membership(0.5, ref_dir)


def test_cell_frequency_d1_matches_counts(golden_dir, golden_word):
    for n in (1, 2, 3, 4):
        table = factor_table(golden_word, n)
        for w in table.counts:
            mu = float(cell_frequency_d1(golden_dir, w).value)
            assert abs(table.frequency(w) - mu) < 1e-4
        if n >= 2:
            assert "2" * n not in table.counts
            assert float(cell_frequency_d1(golden_dir, "2" * n).value) == 0


def test_exact_frequency_provenance(ref_dir, golden_dir):
    assert exact_frequency(ref_dir, "1").provenance == "closed-form"
    assert exact_frequency(ref_dir, "22").provenance == "closed-form"
    assert exact_frequency(ref_dir, "123") is None
    assert exact_frequency(golden_dir, "212").provenance == "cell-measure"


def test_complexity_monotone(ref_word_short):
    values = [complexity(ref_word_short, n) for n in range(1, 12)]
    assert values[:2] == [3, 7]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_complexity_monotone_in_prefix_length(ref_word):
    values = [complexity(ref_word.letters[:N], 6) for N in (10**3, 10**4, 10**5)]
    assert values == sorted(values)


def test_empirical_frequency(ref_word_short):
    f = empirical_frequency(ref_word_short, "2")
    assert f.provenance == "empirical"
    assert abs(f.value - 0.4177354) < 1e-3


def test_frequency_rows_and_csv(ref_dir, ref_word_short):
    rows = frequency_rows(ref_dir, ref_word_short, 2)
    assert [r["factor"] for r in rows] == sorted(PAIR_FACTORS_D2)
    text = frequency_csv(rows, ["direction=x"])
    lines = text.splitlines()
    assert lines[0] == "# direction=x"
    assert lines[1] == "factor,closed_form,empirical,abs_error,N"
    assert len(lines) == 9
