"""Discrepancy series S_n(1_w) - n mu[w] and finite-data balance verdicts."""

import csv
import enum
import io
from dataclasses import dataclass, field

import numpy as np

from .geometry import letter_discrepancy_bound
from .language import (
    empirical_frequency,
    exact_frequency,
    factor_table,
)

GROWTH_FACTOR = 1.5
FINITE_DATA_NOTE = (
    "No finite computation proves boundedness: empirical verdicts report "
    "running maxima at checkpoints only."
)
MONOTONICITY_NOTE = (
    "Balance on factors of length n+1 implies balance on factors of length n, "
    "so a growing length-n factor forces every longer factor to be unbalanced too."
)


@dataclass
class DiscrepancySeries:
    factor: str
    mu: float
    n: np.ndarray  # sampled prefix lengths
    count: np.ndarray
    D: np.ndarray
    running_max: np.ndarray  # of |D_k| for k <= n, at the sampled n
    checkpoints: dict  # checkpoint -> running max
    N_max: int
    mu_provenance: str = "closed-form"

    def to_csv(self, header_lines=()):
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "count", "expected", "D_n", "running_max"])
        for n, c, d, r in zip(self.n, self.count, self.D, self.running_max):
            w.writerow([int(n), int(c), repr(float(n * self.mu)), repr(float(d)),
                        repr(float(r))])
        return buf.getvalue()


def discrepancy_series(word, w, mu, checkpoints, stride=1):
    """D_n = (occurrences of w starting at i with i + |w| <= n) - n mu, n = 0..N.

    ``mu`` may be a FrequencyValue or a number. The running maximum is taken
    over every n (not only the sampled ones).
    """
    from .language import letters_of, occurrences

    letters = letters_of(word)
    N = len(letters)
    checkpoints = sorted(int(c) for c in checkpoints)
    if checkpoints and checkpoints[-1] > N:
        raise ValueError(f"checkpoint {checkpoints[-1]} exceeds word length {N}")
    provenance = getattr(mu, "provenance", "given")
    mu = float(getattr(mu, "value", mu))
    ind = occurrences(letters, w).astype(np.int64)
    count = np.zeros(N + 1, dtype=np.int64)
    count[len(w):] = np.cumsum(ind)
    n = np.arange(N + 1)
    D = count - n * mu
    rmax = np.maximum.accumulate(np.abs(D))
    sample = n[::stride]
    if sample[-1] != N:
        sample = np.append(sample, N)
    return DiscrepancySeries(w, mu, sample, count[sample], D[sample], rmax[sample],
                             {c: float(rmax[c]) for c in checkpoints}, N, provenance)


class VerdictKind(enum.Enum):
    CERTIFIED = "CertifiedBoundedByC"
    BOUNDED = "EmpiricallyBounded"
    GROWTH = "GrowthDetected"


@dataclass
class BalanceVerdict:
    kind: VerdictKind
    maxima: dict
    bound: float = None
    notes: list = field(default_factory=list)

    @property
    def bounded(self):
        return self.kind is not VerdictKind.GROWTH


def balance_verdict(series, certified_bound=None):
    """Classify a series from its running maxima at (>= 3) checkpoints."""
    cps = sorted(series.checkpoints)
    if len(cps) < 3:
        raise ValueError("a verdict needs at least three checkpoints")
    maxima = {c: series.checkpoints[c] for c in cps}
    first, last = maxima[cps[0]], maxima[cps[-1]]
    notes = [FINITE_DATA_NOTE]
    if series.mu_provenance == "empirical":
        notes.append("empirical-mu: frequency error and discrepancy are conflated")
    if certified_bound is not None:
        C = float(certified_bound)
        if float(series.running_max[-1]) <= C:
            return BalanceVerdict(VerdictKind.CERTIFIED, maxima, C, notes)
        notes.append(f"certified bound {C} exceeded: geometry or dynamics bug")
    if last > 0 and last >= GROWTH_FACTOR * first:
        return BalanceVerdict(VerdictKind.GROWTH, maxima, None, notes)
    return BalanceVerdict(VerdictKind.BOUNDED, maxima, None, notes)


def default_checkpoints(N):
    return [max(1, N // 100), max(2, N // 10), N]


@dataclass
class BalanceEntry:
    factor: str
    mu: float
    mu_provenance: str
    certified_bound: float
    verdict: BalanceVerdict


@dataclass
class BalanceReport:
    direction: object
    N: int
    seed: int
    checkpoints: list
    entries: list
    notes: list

    def verdict_counts(self):
        out = {}
        for e in self.entries:
            out[e.verdict.kind.value] = out.get(e.verdict.kind.value, 0) + 1
        return out


def balance_report(direction, max_factor_len, N, seed, checkpoints=None, word=None):
    """Verdicts for every factor of length <= max_factor_len in a generated word."""
    from .dynamics import sample_word

    checkpoints = default_checkpoints(N) if checkpoints is None else list(checkpoints)
    if word is None:
        word = sample_word(direction, seed, N)
    entries = []
    for n in range(1, max_factor_len + 1):
        for w in sorted(factor_table(word, n).counts):
            bound = None
            exact = exact_frequency(direction, w)
            mu = exact if exact is not None else empirical_frequency(word, w)
            if n == 1:
                bound = float(letter_discrepancy_bound(direction, int(w)))
            series = discrepancy_series(word, w, mu, checkpoints)
            entries.append(BalanceEntry(w, series.mu, mu.provenance, bound,
                                        balance_verdict(series, bound)))
    return BalanceReport(direction, N, seed, checkpoints, entries,
                         [FINITE_DATA_NOTE, MONOTONICITY_NOTE])


def report_rows(report):
    rows = []
    for e in report.entries:
        row = {"factor": e.factor, "mu": e.mu, "mu_provenance": e.mu_provenance,
               "certified_bound": e.certified_bound, "verdict": e.verdict.kind.value}
        for c in report.checkpoints:
            row[f"max_{c}"] = e.verdict.maxima[c]
        rows.append(row)
    return rows
