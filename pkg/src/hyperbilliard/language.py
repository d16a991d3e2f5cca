"""Factors, complexity and frequencies of billiard words."""

import csv
import io
from dataclasses import dataclass

import numpy as np

from .scalars.numeric import Ordering, compare
from .scalars.symbolic import integer_affine_coefficients

# Length-2 frequencies in the chamber theta_1 > theta_2 > 0, theta_1 > 1.
# The mu[21] and mu[23] entries use the readings that make the table sum to 1.
PAIR_FACTORS_D2 = ("12", "21", "13", "31", "23", "32", "22")
ADOPTED_READINGS_NOTE = (
    "mu[21] uses (2t1-t2)/(2t1 s) and mu[23] uses t2(2t1-1)/(2t1 s); "
    "these are the readings under which the seven frequencies sum to 1."
)


class ChamberError(ValueError):
    """Direction cannot be brought into theta_1 > theta_2 > 0, theta_1 > 1."""


@dataclass(frozen=True)
class FactorTable:
    counts: dict
    N: int
    n: int

    @property
    def complexity(self):
        return len(self.counts)

    def frequency(self, w):
        return self.counts.get(w, 0) / (self.N - self.n + 1)


@dataclass(frozen=True)
class FrequencyValue:
    value: object
    provenance: str  # "closed-form", "cell-measure" or "empirical"

    def __float__(self):
        return float(self.value)


def letters_of(word):
    """uint8 letter array from a CodedWord, a digit string or an array."""
    if hasattr(word, "letters"):
        return word.letters
    if isinstance(word, str):
        return np.frombuffer(word.encode("ascii"), dtype=np.uint8) - ord("0")
    return np.asarray(word, dtype=np.uint8)


def factor_codes(letters, n):
    """Integer code (base 10 digits) of the factor starting at each position."""
    w = letters.astype(np.int64)
    N = len(w)
    codes = np.zeros(N - n + 1, dtype=np.int64)
    for j in range(n):
        codes = codes * 10 + w[j:N - n + 1 + j]
    return codes


MAX_CODE_LEN = 18  # base-10 codes of this many digits fit in int64


def occurrences(word, w):
    """Boolean array: does factor w start at position i (i = 0..N-|w|)."""
    letters = letters_of(word)
    if len(w) > len(letters):
        raise ValueError(f"factor length {len(w)} exceeds word length {len(letters)}")
    if len(w) <= MAX_CODE_LEN:
        return factor_codes(letters, len(w)) == int(w)
    target = np.frombuffer(w.encode("ascii"), dtype=np.uint8) - ord("0")
    windows = np.lib.stride_tricks.sliding_window_view(letters, len(w))
    return np.all(windows == target, axis=1)


def factor_table(word, n):
    letters = letters_of(word)
    if n < 1:
        raise ValueError("factor length must be at least 1")
    if n > len(letters):
        raise ValueError(f"factor length {n} exceeds word length {len(letters)}")
    if n <= MAX_CODE_LEN:
        codes, counts = np.unique(factor_codes(letters, n), return_counts=True)
        keys = [str(c) for c in codes]
    else:
        windows = np.ascontiguousarray(np.lib.stride_tricks.sliding_window_view(letters, n))
        rows = windows.view(np.dtype((np.void, n))).ravel()
        uniq, counts = np.unique(rows, return_counts=True)
        keys = [(np.frombuffer(u.tobytes(), np.uint8) + ord("0")).tobytes().decode()
                for u in uniq]
    return FactorTable({k: int(c) for k, c in zip(keys, counts)}, len(letters), n)


def complexity(word, n):
    return factor_table(word, n).complexity


def letter_frequency(direction, a):
    """mu[1] = 1/(1 + sum theta_j), mu[i+1] = theta_i/(1 + sum theta_j)."""
    comps = direction.components
    if not 1 <= a <= len(comps):
        raise ValueError(f"letter {a} outside alphabet 1..{len(comps)}")
    total = comps[0]
    for c in comps[1:]:
        total = total + c
    return FrequencyValue(comps[a - 1] / total, "closed-form")


def _pair_table(t1, t2):
    s = 1 + t1 + t2
    q = 2 * t1 * s
    a = t2 / q
    b = (2 * t1 - t2) / q
    c = t2 * (2 * t1 - 1) / q
    e = (t1 - 1) * (t1 - t2) / (t1 * s)
    return {"13": a, "31": a, "12": b, "21": b, "23": c, "32": c, "22": e}


def chamber_permutation(direction):
    """Relabel letters so that the canonical direction is in the chamber.

    The largest component moves to letter 2, the other two keep their order.
    Returns ``(canonical direction, letter map original -> canonical)``.
    """
    if direction.d != 2:
        raise ChamberError("the chamber reduction is defined for d = 2")
    if direction.symbolic:
        return direction, {1: 1, 2: 2, 3: 3}
    comps = direction.components
    order = sorted(range(3), key=lambda i: comps[i], reverse=True)
    for i, j in ((order[0], order[1]), (order[1], order[2])):
        if compare(comps[i], comps[j], direction.epsilon) is Ordering.MARGINAL:
            raise ChamberError("tied components: no unique chamber")
    big = order[0]
    others = [i for i in range(3) if i != big]
    new_order = [others[0], big, others[1]]  # canonical letter k+1 <- original new_order[k]
    if new_order == [0, 1, 2]:
        return direction, {1: 1, 2: 2, 3: 3}
    base = comps[new_order[0]]
    thetas = (comps[new_order[1]] / base, comps[new_order[2]] / base)
    mapping = {orig + 1: k + 1 for k, orig in enumerate(new_order)}
    note = f"letters relabelled {mapping} to reach theta_1 > theta_2, theta_1 > 1"
    return direction.with_thetas(thetas, notes=(note,)), mapping


def pair_frequency_d2(direction, w):
    """Closed-form frequency of a two-letter factor for d = 2."""
    if direction.d != 2:
        raise ChamberError("length-2 closed forms are available for d = 2 only")
    if len(w) != 2 or any(ch not in "123" for ch in w):
        raise ValueError(f"not a two-letter word over 1..3: {w!r}")
    canon, mapping = chamber_permutation(direction)
    key = "".join(str(mapping[int(ch)]) for ch in w)
    t1, t2 = canon.thetas
    table = _pair_table(t1, t2)
    zero = t1 - t1
    return FrequencyValue(table.get(key, zero), "closed-form")


def cell_frequency_d1(direction, w):
    """Exact measure of the window cell coded by w, for d = 1.

    The window is the interval [-theta_1, 1] in f_2-coordinates, with
    W^(1) = [0, 1] translated by -theta_1 and W^(2) = [-theta_1, 0] by +1.
    The cell of w is pulled back letter by letter.
    """
    if direction.d != 1 or direction.symbolic:
        raise ValueError("interval cells need a numeric direction with d = 1")
    t = direction.thetas[0]
    pieces = {1: (0, 1, -t), 2: (-t, 0, 1)}
    lo, hi = -t, 1
    for ch in reversed(w):
        plo, phi, shift = pieces[int(ch)]
        lo, hi = max(plo, lo - shift), min(phi, hi - shift)
        if lo >= hi:
            return FrequencyValue(t - t, "cell-measure")
    return FrequencyValue((hi - lo) / (1 + t), "cell-measure")


def exact_frequency(direction, w):
    """Closed-form or cell-measure frequency of w, or None if unavailable."""
    if len(w) == 1:
        return letter_frequency(direction, int(w))
    if direction.d == 2 and len(w) == 2:
        return pair_frequency_d2(direction, w)
    if direction.d == 1 and not direction.symbolic:
        return cell_frequency_d1(direction, w)
    return None


def empirical_frequency(word, w):
    letters = letters_of(word)
    return FrequencyValue(int(occurrences(letters, w).sum()) / (len(letters) - len(w) + 1),
                          "empirical")


def eigenvalue_group_membership(value, direction):
    """Integers (n_1..n_{d+1}) with value = sum n_i mu[i], or None.

    Equivalent to value * (1 + sum t_j) being an integer affine polynomial.
    """
    if not direction.symbolic:
        raise TypeError("exact membership needs the symbolic direction")
    total = direction.components[0]
    for c in direction.components[1:]:
        total = total + c
    return integer_affine_coefficients(value * total)


def frequency_rows(direction, word, n):
    """Rows (factor, closed_form, empirical, abs_error, N) for all length-n factors."""
    table = factor_table(word, n)
    denom = table.N - n + 1
    rows = []
    keys = set(table.counts)
    if direction.d == 2 and n == 2:
        canon, mapping = chamber_permutation(direction)
        inverse = {v: k for k, v in mapping.items()}
        keys |= {"".join(str(inverse[int(ch)]) for ch in w) for w in PAIR_FACTORS_D2}
    for w in sorted(keys):
        exact = exact_frequency(direction, w)
        emp = table.counts.get(w, 0) / denom
        closed = None if exact is None else float(exact.value)
        err = None if closed is None else abs(emp - closed)
        rows.append({"factor": w, "closed_form": closed, "empirical": emp,
                     "abs_error": err, "N": table.N,
                     "provenance": "empirical" if exact is None else exact.provenance})
    return rows


def frequency_csv(rows, header_lines=()):
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["factor", "closed_form", "empirical", "abs_error", "N"])
    for r in rows:
        writer.writerow([r["factor"],
                         "" if r["closed_form"] is None else repr(r["closed_form"]),
                         repr(r["empirical"]),
                         "" if r["abs_error"] is None else repr(r["abs_error"]),
                         r["N"]])
    return buf.getvalue()
