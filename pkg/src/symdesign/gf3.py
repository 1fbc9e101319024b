"""Exact linear algebra over GF(3) and analysis of ternary linear codes.

A code is the row space of a generator matrix, kept in reduced row echelon
form so that code equality is generator equality.  Weight distributions come
from exact exhaustive codeword enumeration, organised as a split-table sweep
(all codewords u*G1 + w*G2 over the two halves of the generator) so the inner
loop runs vectorised.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

DEFAULT_DIMENSION_CAP = 20

# One-parameter weight enumerator family for self-dual [36,18] ternary codes
# of minimum weight 9: coefficient of y^w is const + mult * A9.
NEAR_EXTREMAL_LENGTH = 36
NEAR_EXTREMAL_TERMS = (
    (0, 1, 0),
    (9, 0, 1),
    (12, 42840, -9),
    (15, 1400256, 36),
    (18, 18452280, -84),
    (21, 90370368, 126),
    (24, 162663480, -126),
    (27, 97808480, 84),
    (30, 16210656, -36),
    (33, 471240, 9),
    (36, 888, -1),
)
# A9 = 8*beta with beta in this closed range for codes of this profile.
A9_BETA_RANGE = (1, 111)


class BudgetExceededError(RuntimeError):
    """Raised when a codeword sweep would exceed the configured dimension cap."""


def _entries(data) -> np.ndarray:
    a = np.asarray(data, dtype=np.int64)
    if a.ndim != 2:
        raise ValueError("matrix data must be two-dimensional")
    if a.size and not np.all((a >= 0) & (a <= 2)):
        raise ValueError("entries must be residues in {0,1,2}")
    return a.astype(np.uint8)


@dataclass(frozen=True)
class Gf3Matrix:
    """Dense matrix over GF(3); entries stored row-major as residue bytes."""

    rows: int
    cols: int
    data: bytes

    @classmethod
    def from_rows(cls, rows_data) -> "Gf3Matrix":
        a = _entries(rows_data)
        return cls(a.shape[0], a.shape[1], a.tobytes())

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Gf3Matrix":
        return cls(rows, cols, bytes(rows * cols))

    def to_array(self) -> np.ndarray:
        a = np.frombuffer(self.data, dtype=np.uint8)
        return a.reshape(self.rows, self.cols).copy()

    def row(self, i: int) -> tuple:
        return tuple(self.data[i * self.cols : (i + 1) * self.cols])


def rref(m) -> tuple[Gf3Matrix, int]:
    """Reduced row echelon form over GF(3) and the rank."""
    a = m.to_array().astype(np.int64) if isinstance(m, Gf3Matrix) else _entries(m).astype(np.int64)
    nrows, ncols = a.shape
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pivot = None
        for i in range(r, nrows):
            if a[i, c]:
                pivot = i
                break
        if pivot is None:
            continue
        a[[r, pivot]] = a[[pivot, r]]
        if a[r, c] == 2:
            a[r] = (a[r] * 2) % 3  # 2 is its own inverse mod 3
        factors = a[:, c].copy()
        factors[r] = 0
        a = (a - np.outer(factors, a[r])) % 3
        r += 1
    return Gf3Matrix.from_rows(a), r


def _pivot_columns(rr: np.ndarray) -> list[int]:
    pivots = []
    for i in range(rr.shape[0]):
        nz = np.flatnonzero(rr[i])
        if nz.size:
            pivots.append(int(nz[0]))
    return pivots


@dataclass(frozen=True)
class TernaryCode:
    """Linear code over GF(3): length n, dimension k, generator in RREF."""

    n: int
    k: int
    generator: Gf3Matrix

    @classmethod
    def from_spanning(cls, m) -> "TernaryCode":
        """Code spanned by the rows of m (any matrix over GF(3))."""
        rr, rank = rref(m)
        a = rr.to_array()[:rank]
        n = rr.cols
        return cls(n, rank, Gf3Matrix.from_rows(a.reshape(rank, n)))

    @classmethod
    def from_incidence(cls, m) -> "TernaryCode":
        """Code spanned by the rows of a 0/1 incidence matrix."""
        return cls.from_spanning(m.dense() if hasattr(m, "dense") else m)

    def contains(self, word: Sequence[int]) -> bool:
        w = np.asarray(word, dtype=np.int64) % 3
        if w.shape != (self.n,):
            raise ValueError("word length must equal n")
        if self.k == 0:
            return not w.any()
        g = self.generator.to_array().astype(np.int64)
        _, rank = rref(np.vstack([g, w[None, :]]))
        return rank == self.k


def dual_code(c: TernaryCode) -> TernaryCode:
    """Dual code: all words orthogonal to every codeword of c."""
    g = c.generator.to_array().astype(np.int64)
    pivots = _pivot_columns(g)
    free = [j for j in range(c.n) if j not in pivots]
    basis = np.zeros((len(free), c.n), dtype=np.int64)
    for row, fcol in enumerate(free):
        basis[row, fcol] = 1
        for i, pcol in enumerate(pivots):
            basis[row, pcol] = (-g[i, fcol]) % 3
    return TernaryCode.from_spanning(basis if len(free) else np.zeros((0, c.n), dtype=np.int64))


def is_self_dual(c: TernaryCode) -> bool:
    """True when c equals its dual: n = 2k and the generator is self-orthogonal."""
    if c.n != 2 * c.k:
        return False
    g = c.generator.to_array().astype(np.int64)
    return not ((g @ g.T) % 3).any()


@dataclass(frozen=True)
class WeightDistribution:
    """Counts A_w of codewords of each weight w = 0..n."""

    n: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != self.n + 1:
            raise ValueError("counts must have n+1 entries")
        if any(x < 0 for x in self.counts):
            raise ValueError("counts must be non-negative")
        if self.counts[0] != 1:
            raise ValueError("A_0 must be 1")

    @property
    def total(self) -> int:
        return sum(self.counts)


def _combo_table(gen: np.ndarray) -> np.ndarray:
    """All 3^r linear combinations of the given rows, as a 3^r x n array."""
    n = gen.shape[1]
    table = np.zeros((1, n), dtype=np.uint8)
    for row in gen[::-1]:
        table = np.vstack([table, (table + row) % 3, (table + 2 * row) % 3]).astype(np.uint8)
    return table


def _sweep_counts(a_rows: np.ndarray, b_table: np.ndarray, n: int) -> np.ndarray:
    counts = np.zeros(n + 1, dtype=np.int64)
    # sums of two residues lie in 0..4; zero mod 3 iff 0 or 3
    for i in range(a_rows.shape[0]):
        s = a_rows[i][None, :] + b_table
        nonzero = (s != 0) & (s != 3)
        w = nonzero.sum(axis=1)
        counts += np.bincount(w, minlength=n + 1)
    return counts


def weight_distribution(
    c: TernaryCode,
    *,
    dimension_cap: int = DEFAULT_DIMENSION_CAP,
    threads: int = 1,
) -> WeightDistribution:
    """Exact weight distribution by exhaustive enumeration of all 3^k codewords.

    Raises BudgetExceededError when k exceeds dimension_cap; the cap is a
    guard against accidental 3^k blowups, never a silent truncation.
    """
    if c.k > dimension_cap:
        raise BudgetExceededError(
            f"dimension {c.k} exceeds cap {dimension_cap}; raise dimension_cap to enumerate 3^{c.k} words"
        )
    n = c.n
    if c.k == 0:
        return WeightDistribution(n, (1,) + (0,) * n)
    g = c.generator.to_array()
    k1 = c.k // 2
    a_table = _combo_table(g[:k1])
    b_table = _combo_table(g[k1:])
    if threads <= 1 or a_table.shape[0] == 1:
        counts = _sweep_counts(a_table, b_table, n)
    else:
        chunks = np.array_split(a_table, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ch: _sweep_counts(ch, b_table, n), chunks))
        counts = np.sum(parts, axis=0)
    assert int(counts.sum()) == 3**c.k
    return WeightDistribution(n, tuple(int(x) for x in counts))


def min_weight(
    c: TernaryCode,
    *,
    dimension_cap: int = DEFAULT_DIMENSION_CAP,
    threads: int = 1,
) -> tuple[int, int]:
    """Minimum nonzero weight d and the count A_d."""
    if c.k == 0:
        raise ValueError("zero code has no nonzero codewords")
    dist = weight_distribution(c, dimension_cap=dimension_cap, threads=threads)
    for w in range(1, c.n + 1):
        if dist.counts[w]:
            if is_self_dual(c) and c.n % 12 == 0:
                assert w <= c.n // 4 + 3
            return w, dist.counts[w]
    raise AssertionError("nonzero code with no nonzero weight")


def near_extremal_family(alpha: int) -> WeightDistribution:
    """The [36,18] near-extremal weight distribution at parameter alpha = A_9."""
    counts = [0] * (NEAR_EXTREMAL_LENGTH + 1)
    for w, const, mult in NEAR_EXTREMAL_TERMS:
        counts[w] = const + mult * alpha
    return WeightDistribution(NEAR_EXTREMAL_LENGTH, tuple(counts))


def near_extremal_profile(dist: WeightDistribution) -> Optional[int]:
    """A_9 when dist matches the [36,18] self-dual d=9 enumerator family, else None."""
    if dist.n != NEAR_EXTREMAL_LENGTH:
        return None
    if dist.total != 3**18:
        return None
    alpha = dist.counts[9]
    expected = {w: const + mult * alpha for w, const, mult in NEAR_EXTREMAL_TERMS}
    for w in range(dist.n + 1):
        if dist.counts[w] != expected.get(w, 0):
            return None
    return alpha


def a9_within_range(alpha: int) -> bool:
    """Whether alpha = 8*beta for beta in the admissible closed range."""
    lo, hi = A9_BETA_RANGE
    return alpha % 8 == 0 and lo <= alpha // 8 <= hi


def parse_generator_text(text: str) -> TernaryCode:
    """Parse 'n k' header plus k rows of digits in {0,1,2} (spaces optional)."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty generator text")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("header must be 'n k'")
    n, k = int(head[0]), int(head[1])
    if len(lines) != 1 + k:
        raise ValueError(f"expected {k} rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        digits = ln.replace(" ", "")
        if len(digits) != n or any(ch not in "012" for ch in digits):
            raise ValueError(f"bad generator row: {ln!r}")
        rows.append([int(ch) for ch in digits])
    if k == 0:
        return TernaryCode(n, 0, Gf3Matrix.zero(0, n))
    return TernaryCode.from_spanning(rows)


def format_generator_text(c: TernaryCode) -> str:
    out = [f"{c.n} {c.k}"]
    a = c.generator.to_array()
    for i in range(c.k):
        out.append("".join(str(int(x)) for x in a[i]))
    return "\n".join(out) + "\n"
