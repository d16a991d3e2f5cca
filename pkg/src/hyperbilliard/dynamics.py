"""Domain exchange on the window, word generation and the mirror-law simulator.

Orbits run in fixed point: internal coordinates are integers scaled by
2**precision and theta is rounded once to that grid. Every step then adds an
exact integer vector, so the orbit point after n steps is exactly
m + sum of f_{x_k}, with no accumulated rounding.
"""

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .geometry import InternalPoint, NearBoundary, OutsideWindow
from .scalars.numeric import to_fixed, to_fraction


class CornerHit(ArithmeticError):
    """Two faces are reached at (numerically) the same time."""


class SamplingExhausted(RuntimeError):
    """No generic parameter found within the rejection budget."""


@dataclass
class CodedWord:
    letters: np.ndarray  # uint8 values in 1..d+1
    origin: int
    direction: object
    m: InternalPoint
    min_margin: float = float("inf")

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return self.letters.tobytes().translate(_DIGITS).decode("ascii")

    @property
    def alphabet_size(self):
        return self.direction.d + 1


_DIGITS = bytes.maketrans(bytes(range(10)), b"0123456789")


class FixedPointWindow:
    """Integer model of the window pieces at 2**bits resolution."""

    def __init__(self, direction, epsilon=None):
        if direction.symbolic:
            raise TypeError("orbits need a numeric direction")
        self.direction = direction
        self.d = direction.d
        self.bits = direction.precision
        self.S = 1 << self.bits
        self.theta = [to_fixed(t, self.bits) for t in direction.thetas]
        eps = direction.epsilon if epsilon is None else epsilon
        self.E = max(1, int(Fraction(eps) * self.S))
        # f_i as integer vectors
        self.f = [tuple(-t for t in self.theta)] + [
            tuple(self.S if k == j else 0 for k in range(self.d)) for j in range(self.d)]

    def to_fixed(self, p):
        return [to_fixed(c, self.bits) for c in p.coords]

    def to_point(self, A):
        return InternalPoint(tuple(Fraction(a, self.S) for a in A))

    def in_piece(self, A, i, E):
        """True if every coefficient of A in piece i lies in [E/S, 1 - E/S]."""
        S, th = self.S, self.theta
        if i == 1:
            lo, hi = E, S - E
            for a in A:
                if a < lo or a > hi:
                    return False
            return True
        k = i - 2
        tk, ak = th[k], A[k]
        # s_1 = -a_k / theta_k
        if -ak * S < E * tk or -ak * S > (S - E) * tk:
            return False
        lo, hi = E * tk, (S - E) * tk
        for j in range(self.d):
            if j != k:
                x = A[j] * tk - ak * th[j]
                if x < lo or x > hi:
                    return False
        return True

    def margin(self, A, i):
        """Smallest distance of a piece-i coefficient to {0, 1} (float)."""
        S, th = self.S, self.theta
        if i == 1:
            return min(min(a, S - a) for a in A) / S
        k = i - 2
        tk, ak = th[k], A[k]
        best = min(-ak, tk + ak) / tk
        den = S * tk
        for j in range(self.d):
            if j != k:
                x = A[j] * tk - ak * th[j]
                best = min(best, min(x, den - x) / den)
        return best

    def locate(self, A, step=None):
        for i in range(1, self.d + 2):
            if self.in_piece(A, i, self.E):
                return i
        margins = [self.margin(A, i) for i in range(1, self.d + 2)]
        best = max(range(len(margins)), key=margins.__getitem__)
        if margins[best] < -self.E / self.S:
            raise OutsideWindow("orbit point left the window")
        raise NearBoundary(best + 1, margins[best], step)

    def locate_inverse(self, A, step=None):
        """Piece i such that A - f_i lies in W^(i) (A is in the image piece)."""
        for i in range(1, self.d + 2):
            fi = self.f[i - 1]
            B = [a - b for a, b in zip(A, fi)]
            if self.in_piece(B, i, self.E):
                return i, B
        margins = []
        for i in range(1, self.d + 2):
            B = [a - b for a, b in zip(A, self.f[i - 1])]
            margins.append(self.margin(B, i))
        best = max(range(len(margins)), key=margins.__getitem__)
        raise NearBoundary(best + 1, margins[best], step)

    def run(self, A, n, step_offset=0, track_margin=False):
        """Iterate the exchange map n times; return (letters, final point, min margin)."""
        A = list(A)
        out = bytearray(n)
        f = self.f
        min_margin = float("inf")
        for k in range(n):
            i = self.locate(A, step_offset + k)
            if track_margin:
                min_margin = min(min_margin, self.margin(A, i))
            out[k] = i
            fi = f[i - 1]
            for j in range(self.d):
                A[j] += fi[j]
        return out, A, min_margin

    def run_backward(self, A, n, track_margin=False):
        A = list(A)
        out = bytearray(n)
        min_margin = float("inf")
        for k in range(n):
            i, A = self.locate_inverse(A, -(k + 1))
            if track_margin:
                min_margin = min(min_margin, self.margin(A, i))
            out[k] = i
        return out, A, min_margin


def exchange_step(p, direction):
    """One step of the exchange map: ``(i, p + f_i)`` with p in W^(i)."""
    W = FixedPointWindow(direction)
    A = W.to_fixed(p)
    i = W.locate(A)
    return i, W.to_point([a + b for a, b in zip(A, W.f[i - 1])])


def exchange_inverse(p, direction):
    """Inverse step: ``(i, p - f_i)`` for p in the image piece W^(i) + f_i."""
    W = FixedPointWindow(direction)
    i, B = W.locate_inverse(W.to_fixed(p))
    return i, W.to_point(B)


def generate_word(m, direction, n_back=0, n_fwd=0, track_margin=True):
    """Coding x_{-n_back} .. x_{n_fwd - 1} of the orbit of m.

    Raises NearBoundary (with the step index) if any visited point is within
    the margin of a piece boundary; the caller should re-sample m.
    """
    if n_back < 0 or n_fwd < 0:
        raise ValueError("word lengths must be non-negative")
    W = FixedPointWindow(direction)
    A0 = W.to_fixed(m)
    fwd, _, mm_f = W.run(A0, n_fwd, track_margin=track_margin)
    back, _, mm_b = W.run_backward(A0, n_back, track_margin=track_margin)
    letters = np.frombuffer(bytes(back[::-1]) + bytes(fwd), dtype=np.uint8).copy()
    return CodedWord(letters, n_back, direction, m, min(mm_f, mm_b))


def orbit_point(m, direction, letters):
    """m + sum of f_{x_k} over the given letters, exactly in fixed point."""
    W = FixedPointWindow(direction)
    A = W.to_fixed(m)
    counts = np.bincount(np.asarray(letters, dtype=np.int64), minlength=direction.d + 2)
    for i in range(1, direction.d + 2):
        c = int(counts[i])
        A = [a + c * b for a, b in zip(A, W.f[i - 1])]
    return W.to_point(A)


def sample_generic_parameter(direction, seed, check_steps=1000, max_tries=100):
    """Deterministic pseudo-random generic point of W_theta.

    Draws subset-sum coefficients uniformly, then rejects points whose first
    ``check_steps`` iterates come within 10 * epsilon of a piece boundary.
    """
    W = FixedPointWindow(direction)
    strict = FixedPointWindow(direction, epsilon=10 * direction.epsilon)
    rng = random.Random(seed)
    S = W.S
    for _ in range(max_tries):
        r = [rng.getrandbits(W.bits) for _ in range(direction.d + 1)]
        # p = sum_i (r_i / S) f_i
        A = [r[j + 1] - (r[0] * W.theta[j]) // S for j in range(direction.d)]
        try:
            strict.run(A, check_steps)
        except (NearBoundary, OutsideWindow):
            continue
        return W.to_point(A)
    raise SamplingExhausted(f"no generic parameter after {max_tries} draws")


def sample_word(direction, seed, n, attempts=10):
    """A generic n-letter word; re-samples the parameter if the orbit nears a boundary.

    Attempt k > 0 uses the derived seed ``f"{seed}:{k}"``, so the result is a
    deterministic function of ``seed``.
    """
    last = None
    for k in range(attempts):
        try:
            m = sample_generic_parameter(direction, seed if k == 0 else f"{seed}:{k}")
            return generate_word(m, direction, 0, n, track_margin=False)
        except (NearBoundary, SamplingExhausted) as exc:
            last = exc
    raise SamplingExhausted(f"every one of {attempts} parameters hit a boundary") from last


@dataclass
class TilingSegment:
    letters: np.ndarray
    tile_lengths: dict  # letter -> length
    offset: object = 0

    @property
    def lengths(self):
        table = np.array([0.0] + [float(self.tile_lengths[i])
                                  for i in sorted(self.tile_lengths)])
        return table[self.letters]

    def positions(self):
        """Left endpoints of the tiles on the physical line."""
        return float(self.offset) + np.concatenate([[0.0], np.cumsum(self.lengths)[:-1]])


def tile_lengths(direction):
    """Length of the tile coded by letter i: theta_{i-1} / |theta| (theta_0 = 1)."""
    norm = direction.norm()
    return {i: c / norm for i, c in enumerate(direction.components, start=1)}


def cut_project_segment(m, direction, count):
    """First ``count`` tiles of the cut-and-project tiling with parameter m."""
    word = generate_word(m, direction, 0, count, track_margin=False)
    return TilingSegment(word.letters, tile_lengths(direction), 0)


@dataclass
class BilliardState:
    position: tuple  # d+1 coordinates in [0, 1]
    signs: tuple  # +1/-1 per coordinate
    face: int = None  # 0-based coordinate currently on a face


def random_billiard_state(direction, seed):
    """Start point in the interior of the face x_1 = 0, moving inwards."""
    ctx = direction.ctx
    rng = random.Random(seed)
    n = direction.d + 1
    pos = [ctx.mpf(0)] + [ctx.mpf(rng.getrandbits(60)) / 2 ** 60 for _ in range(n - 1)]
    signs = [1] + [rng.choice((-1, 1)) for _ in range(n - 1)]
    return BilliardState(tuple(pos), tuple(signs), 0)


def billiard_simulate(start, direction, n):
    """Code n bounces of the mirror-law billiard in the unit cube.

    Letter j is emitted when the ball reaches a face x_j = 0 or x_j = 1;
    that velocity component then flips sign.
    """
    if direction.symbolic:
        raise TypeError("billiard simulation needs a numeric direction")
    ctx = direction.ctx
    eps = direction.epsilon
    speed = list(direction.components)
    x = list(start.position)
    s = list(start.signs)
    dim = len(x)
    out = bytearray(n)
    for k in range(n):
        times = []
        for j in range(dim):
            dist = (1 - x[j]) if s[j] > 0 else x[j]
            times.append(dist / speed[j])
        order = sorted(range(dim), key=times.__getitem__)
        j0, j1 = order[0], order[1]
        if times[j1] - times[j0] <= eps * max(1, times[j1]):
            raise CornerHit(f"two faces reached together at bounce {k}")
        t = times[j0]
        for j in range(dim):
            x[j] = x[j] + s[j] * speed[j] * t
        x[j0] = ctx.mpf(1) if s[j0] > 0 else ctx.mpf(0)
        s[j0] = -s[j0]
        out[k] = j0 + 1
    return np.frombuffer(bytes(out), dtype=np.uint8).copy()


def read_word_file(path):
    """Parse a word file; returns (header dict, letters array)."""
    header, body = {}, []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("#"):
                for item in line[1:].split():
                    if "=" in item:
                        key, value = item.split("=", 1)
                        header[key] = value
            elif line:
                body.append(line)
    text = "".join(body).encode("ascii")
    return header, np.frombuffer(text, dtype=np.uint8) - ord("0")


def format_word_file(word, theta_text):
    """Word file: a header line and one line of digits."""
    if word.alphabet_size > 9:
        raise ValueError("word files support at most 9 letters")
    coeffs = ";".join(str(to_fraction(c)) for c in word.m.coords)
    return (f"# theta={theta_text.replace(' ', '')} m={coeffs} origin={word.origin}\n"
            f"{word}\n")
