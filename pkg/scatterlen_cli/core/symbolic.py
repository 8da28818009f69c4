"""Symbolic dynamics: admissible words, necklaces and cycle counts"""

import math
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from scatterlen_cli.utils.errors import ConfigurationError

Word = Tuple[int, ...]


def _check_kappa(kappa):
    if int(kappa) != kappa or kappa < 3:
        raise ConfigurationError(f"Number of obstacles must be an integer >= 3, got {kappa!r}")


def is_admissible(word: Sequence[int], cyclic: bool = False) -> bool:
    """No two consecutive symbols are equal (also last/first when cyclic)."""
    if any(a == b for a, b in zip(word, word[1:])):
        return False
    if cyclic and len(word) > 0 and word[0] == word[-1]:
        return False
    return True


def rotations(word: Sequence[int]) -> List[Word]:
    word = tuple(word)
    return [word[i:] + word[:i] for i in range(len(word))]


def canonical_rotation(word: Sequence[int]) -> Word:
    """Lexicographically minimal rotation."""
    return min(rotations(word))


def reversed_necklace(word: Sequence[int]) -> Word:
    """Canonical word of the time-reversed orbit."""
    return canonical_rotation(tuple(reversed(tuple(word))))


def primitive_root(word: Sequence[int]) -> Tuple[Word, int]:
    """
    Split a word into its primitive root and repetition count.

    Returns:
        tuple: (root, k) with root * k == word
    """
    word = tuple(word)
    m = len(word)
    for p in range(1, m + 1):
        if m % p == 0 and word[:p] * (m // p) == word:
            return word[:p], m // p
    return word, 1


@dataclass(frozen=True, order=True)
class Necklace:
    """Primitive cyclically admissible word in minimal-rotation form."""
    representative: Word

    def __post_init__(self):
        rep = tuple(int(s) for s in self.representative)
        object.__setattr__(self, 'representative', rep)
        if len(rep) < 2 or not is_admissible(rep, cyclic=True):
            raise ValueError(f"Word {format_word(rep)} is not cyclically admissible")
        if primitive_root(rep)[1] != 1:
            raise ValueError(f"Word {format_word(rep)} is not primitive")
        if canonical_rotation(rep) != rep:
            raise ValueError(f"Word {format_word(rep)} is not the minimal rotation")

    @classmethod
    def from_word(cls, word: Sequence[int]) -> "Necklace":
        """Necklace of any rotation of a primitive admissible word."""
        return cls(canonical_rotation(word))

    @property
    def period(self):
        return len(self.representative)

    def __len__(self):
        return len(self.representative)

    def __iter__(self):
        return iter(self.representative)

    def __str__(self):
        return format_word(self.representative)


def format_word(word: Sequence[int]) -> str:
    """``(1, 2, 3)`` -> ``'123'``; symbols above 9 switch to dotted form ``'1.10.2'``."""
    if any(s > 9 for s in word):
        return ".".join(str(s) for s in word)
    return "".join(str(s) for s in word)


def parse_word(text: str) -> Word:
    """Inverse of format_word."""
    text = text.strip()
    if not text:
        raise ValueError("Empty word")
    parts = text.split('.') if '.' in text else list(text)
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"Invalid word: {text!r}")


def adjacency_matrix(kappa: int) -> np.ndarray:
    """A(i, j) = 1 for i != j and A(i, i) = 0."""
    _check_kappa(kappa)
    return np.ones((kappa, kappa), dtype=np.int64) - np.eye(kappa, dtype=np.int64)


def map_entropy(kappa: int) -> float:
    """h0 = log(kappa - 1), the log of the Perron eigenvalue of A."""
    _check_kappa(kappa)
    return math.log(kappa - 1)


def perron_eigenvalue(matrix, tol=1e-13, max_iter=10000) -> float:
    """
    Leading eigenvalue of a non-negative irreducible matrix by power iteration.

    Args:
        matrix: square non-negative matrix
        tol (float): stop when successive Rayleigh estimates differ by less
        max_iter (int): iteration cap

    Returns:
        float: the Perron eigenvalue
    """
    a = np.asarray(matrix, dtype=float)
    v = np.ones(a.shape[0]) / math.sqrt(a.shape[0])
    estimate = 0.0
    for _ in range(max_iter):
        w = a @ v
        new_estimate = float(v @ w)
        w /= np.linalg.norm(w)
        if abs(new_estimate - estimate) < tol:
            return new_estimate
        v, estimate = w, new_estimate
    return estimate


def enumerate_necklaces(kappa: int, m: int) -> Iterator[Necklace]:
    """
    Primitive cyclically admissible necklaces of period exactly ``m``.

    Depth-first generation of Lyndon words over the symbols 1..kappa with
    branches pruned as soon as two adjacent symbols repeat. Output is in
    lexicographic order of representatives.

    Args:
        kappa (int): number of obstacles
        m (int): period

    Yields:
        Necklace
    """
    _check_kappa(kappa)
    if m < 2:
        return

    a = [0] * (m + 1)

    def descend(t, p):
        if t > m:
            if p == m and a[m] != a[1]:
                yield Necklace(tuple(s + 1 for s in a[1:]))
            return
        a[t] = a[t - p]
        if t == 1 or a[t] != a[t - 1]:
            yield from descend(t + 1, p)
        for j in range(a[t - p] + 1, kappa):
            if t > 1 and j == a[t - 1]:
                continue
            a[t] = j
            yield from descend(t + 1, t)

    yield from descend(1, 1)


def count_periodic_points(kappa: int, n: int) -> int:
    """trace(A^n), computed with exact integer arithmetic."""
    _check_kappa(kappa)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    power = np.linalg.matrix_power(adjacency_matrix(kappa).astype(object), n)
    return int(sum(power[i, i] for i in range(kappa)))


def _mobius(n):
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


def divisors(n: int) -> List[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def prime_cycle_count(kappa: int, n: int) -> int:
    """c_n, the number of primitive necklaces of period n (Moebius inversion of the traces)."""
    total = sum(_mobius(n // d) * count_periodic_points(kappa, d) for d in divisors(n))
    return total // n


@dataclass(frozen=True)
class CycleCountRow:
    n: int
    cycles: int
    divisor_sum: int
    trace: int
    cumulative: int
    asymptotic: float
    ratio: float

    @property
    def identity_holds(self):
        return self.divisor_sum == self.trace


def cycle_count_check(kappa: int, n_max: int, enumerate_cycles: bool = True) -> List[CycleCountRow]:
    """
    Verify sum_{d|n} d c_d = trace(A^n) and compare #{|gamma| <= n} with
    e^{h0}/(e^{h0} - 1) e^{h0 n}/n.

    Args:
        kappa (int): number of obstacles
        n_max (int): largest word length
        enumerate_cycles (bool): count c_n by enumeration (True) or by
            Moebius inversion (False)

    Returns:
        list of CycleCountRow, one per n = 1..n_max
    """
    _check_kappa(kappa)
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    lam = kappa - 1
    counts = {}
    rows = []
    cumulative = 0
    for n in range(1, n_max + 1):
        if enumerate_cycles:
            counts[n] = sum(1 for _ in enumerate_necklaces(kappa, n))
        else:
            counts[n] = prime_cycle_count(kappa, n)
        cumulative += counts[n]
        asymptotic = lam / (lam - 1) * lam ** n / n
        rows.append(CycleCountRow(
            n=n,
            cycles=counts[n],
            divisor_sum=sum(d * counts[d] for d in divisors(n)),
            trace=count_periodic_points(kappa, n),
            cumulative=cumulative,
            asymptotic=asymptotic,
            ratio=cumulative / asymptotic,
        ))
    return rows
