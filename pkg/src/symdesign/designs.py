"""Incidence matrices of symmetric 2-designs.

Rows are blocks, columns are points.  Each row is kept as an integer bitmask
(bit j = point j), so block intersections are popcounts of ANDed masks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional


class DesignError(ValueError):
    """Validation failure; carries the first violated axiom and its indices."""

    def __init__(self, axiom: str, indices: tuple, message: str):
        super().__init__(message)
        self.axiom = axiom
        self.indices = indices


@dataclass(frozen=True)
class IncidenceMatrix:
    v: int
    b: int
    rows: tuple[int, ...]  # bitmask per block

    def __post_init__(self):
        if len(self.rows) != self.b:
            raise ValueError("row count must equal b")
        if self.v < 0 or any(r < 0 or r >> self.v for r in self.rows):
            raise ValueError("row bits must fit in v columns")

    @classmethod
    def from_rows(cls, rows_data: Iterable[Iterable[int]]) -> "IncidenceMatrix":
        masks = []
        width = None
        for row in rows_data:
            row = list(row)
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError("ragged rows")
            mask = 0
            for j, x in enumerate(row):
                if x not in (0, 1):
                    raise ValueError("entries must be 0 or 1")
                mask |= x << j
            masks.append(mask)
        if width is None:
            raise ValueError("no rows")
        return cls(width, len(masks), tuple(masks))

    @classmethod
    def from_blocks(cls, v: int, blocks: Iterable[Iterable[int]]) -> "IncidenceMatrix":
        masks = []
        for blk in blocks:
            mask = 0
            for p in blk:
                mask |= 1 << p
            masks.append(mask)
        return cls(v, len(masks), tuple(masks))

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def row_tuple(self, i: int) -> tuple[int, ...]:
        return tuple((self.rows[i] >> j) & 1 for j in range(self.v))

    def dense(self) -> list[list[int]]:
        return [list(self.row_tuple(i)) for i in range(self.b)]

    def block_points(self, i: int) -> tuple[int, ...]:
        return tuple(j for j in range(self.v) if (self.rows[i] >> j) & 1)


def validate_symmetric_design(m: IncidenceMatrix) -> tuple[int, int, int]:
    """Return (v, k, lambda) or raise DesignError naming the first violated axiom.

    Checks: square, constant row sums, constant pairwise block intersections,
    non-degenerate parameters 0 < lambda < k < v.
    """
    if m.v != m.b:
        raise DesignError("square", (m.v, m.b), f"matrix is {m.b}x{m.v}, not square")
    k = m.rows[0].bit_count() if m.b else 0
    for i in range(m.b):
        ki = m.rows[i].bit_count()
        if ki != k:
            raise DesignError("row-sum", (0, i), f"row 0 has sum {k} but row {i} has sum {ki}")
    lam = None
    for i in range(m.b):
        for j in range(i + 1, m.b):
            inter = (m.rows[i] & m.rows[j]).bit_count()
            if lam is None:
                lam = inter
            elif inter != lam:
                raise DesignError(
                    "intersection",
                    (i, j),
                    f"blocks {i} and {j} meet in {inter} points, expected {lam}",
                )
    if lam is None:
        raise DesignError("degenerate", (), "no block pairs")
    if not (0 < lam < k < m.v):
        raise DesignError(
            "degenerate", (m.v, k, lam), f"parameters ({m.v},{k},{lam}) violate 0 < lambda < k < v"
        )
    return m.v, k, lam


def dual(m: IncidenceMatrix) -> IncidenceMatrix:
    """Transpose; blocks and points trade roles."""
    if m.v != m.b:
        raise DesignError("square", (m.v, m.b), "dual requires a square matrix")
    cols = []
    for j in range(m.v):
        mask = 0
        for i in range(m.b):
            mask |= ((m.rows[i] >> j) & 1) << i
        cols.append(mask)
    return IncidenceMatrix(m.b, m.v, tuple(cols))


def _permute_mask(mask: int, point_perm) -> int:
    out = 0
    j = 0
    while mask:
        if mask & 1:
            out |= 1 << point_perm[j]
        mask >>= 1
        j += 1
    return out


def relabel(m: IncidenceMatrix, point_perm, block_perm) -> IncidenceMatrix:
    """Relabeled copy: new[block_perm[i]][point_perm[j]] = old[i][j]."""
    rows = [0] * m.b
    for i in range(m.b):
        rows[block_perm[i]] = _permute_mask(m.rows[i], point_perm)
    return IncidenceMatrix(m.v, m.b, tuple(rows))


def induced_block_perm(m: IncidenceMatrix, point_perm) -> Optional[tuple[int, ...]]:
    """Block permutation induced by a point permutation, or None if the point
    permutation does not map the block set to itself."""
    index = {mask: i for i, mask in enumerate(m.rows)}
    beta = []
    for i in range(m.b):
        image = _permute_mask(m.rows[i], point_perm)
        target = index.get(image)
        if target is None:
            return None
        beta.append(target)
    if len(set(beta)) != m.b:
        return None
    return tuple(beta)


def _perm_order_le2(perm) -> bool:
    return all(perm[perm[x]] == x for x in range(len(perm)))


@dataclass(frozen=True)
class Involution:
    """Order-two automorphism, as its point and block permutations."""

    point_perm: tuple[int, ...]
    block_perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.point_perm) != list(range(len(self.point_perm))):
            raise ValueError("point_perm is not a permutation")
        if sorted(self.block_perm) != list(range(len(self.block_perm))):
            raise ValueError("block_perm is not a permutation")
        if not _perm_order_le2(self.point_perm) or not _perm_order_le2(self.block_perm):
            raise ValueError("permutations must have order at most two")
        fixed_blocks = sum(1 for i, x in enumerate(self.block_perm) if x == i)
        if fixed_blocks != self.f:
            raise ValueError(
                f"{self.f} fixed points but {fixed_blocks} fixed blocks; counts must agree"
            )

    @property
    def f(self) -> int:
        return sum(1 for j, x in enumerate(self.point_perm) if x == j)

    @property
    def is_identity(self) -> bool:
        return all(x == j for j, x in enumerate(self.point_perm))


def _involutive_point_perms(v: int, f: int):
    """All order-<=2 point permutations of range(v) with exactly f fixed points."""
    if (v - f) % 2:
        return
    points = list(range(v))
    for fixed in itertools.combinations(points, f):
        moved = [p for p in points if p not in fixed]

        def pairings(rest):
            if not rest:
                yield []
                return
            first = rest[0]
            for idx in range(1, len(rest)):
                partner = rest[idx]
                remainder = rest[1:idx] + rest[idx + 1 :]
                for tail in pairings(remainder):
                    yield [(first, partner)] + tail

        for pairs in pairings(moved):
            perm = list(range(v))
            for a_, b_ in pairs:
                perm[a_], perm[b_] = b_, a_
            yield tuple(perm)


def find_involution(m: IncidenceMatrix, f: int, *, method: str = "group") -> Optional[Involution]:
    """An order-two automorphism with exactly f fixed points, or None.

    method="group" walks every element of the full automorphism group, so a
    None answer is an exhaustive certificate of absence.  method="scan" is a
    naive direct scan over involutive point permutations, kept as an oracle
    for tiny instances (v <= 8).
    """
    if (m.v - f) % 2:
        return None
    if method == "scan":
        if m.v > 8:
            raise ValueError("scan method is an oracle for v <= 8 only")
        for perm in _involutive_point_perms(m.v, f):
            if all(perm[j] == j for j in range(m.v)):
                continue
            beta = induced_block_perm(m, perm)
            if beta is not None:
                return Involution(perm, beta)
        return None
    if method != "group":
        raise ValueError(f"unknown method {method!r}")
    for inv in involutions(m):
        if inv.f == f:
            return inv
    return None


def involutions(m: IncidenceMatrix) -> Iterator[Involution]:
    """Every order-two automorphism of the design, from its full group.

    Exhaustive: the underlying group closure enumerates all elements, so the
    stream being empty certifies that no involution exists at all.
    """
    from .canonical import automorphism_group, group_elements

    aut = automorphism_group(m)
    for point_perm in group_elements(aut, m.v):
        if all(point_perm[j] == j for j in range(m.v)):
            continue
        if not _perm_order_le2(point_perm):
            continue
        beta = induced_block_perm(m, point_perm)
        assert beta is not None
        yield Involution(point_perm, beta)


def involution_census(m: IncidenceMatrix) -> dict[int, int]:
    """Count the involutions of a design grouped by fixed-point count."""
    census: dict[int, int] = {}
    for inv in involutions(m):
        census[inv.f] = census.get(inv.f, 0) + 1
    return dict(sorted(census.items()))


def parse_incidence_text(text: str) -> IncidenceMatrix:
    """Parse a 'v b' header plus b rows of 0/1 digits.

    Spaces and surrounding brackets in row lines are tolerated; output is
    always written as dense digit rows.
    """
    records = parse_incidence_stream(text)
    if len(records) != 1:
        raise ValueError(f"expected one record, found {len(records)}")
    return records[0]


def _clean_row_line(line: str) -> str:
    return line.replace("[", "").replace("]", "").replace(" ", "").replace("\t", "")


def parse_incidence_stream(text: str) -> list[IncidenceMatrix]:
    """Parse blank-line separated incidence records."""
    lines = text.splitlines()
    pos = 0
    records = []
    while True:
        while pos < len(lines) and not lines[pos].strip():
            pos += 1
        if pos >= len(lines):
            break
        head = lines[pos].split()
        if len(head) != 2:
            raise ValueError(f"bad header line: {lines[pos]!r}")
        v, b = int(head[0]), int(head[1])
        pos += 1
        rows = []
        while len(rows) < b:
            if pos >= len(lines):
                raise ValueError(f"record truncated: expected {b} rows, found {len(rows)}")
            digits = _clean_row_line(lines[pos])
            pos += 1
            if not digits:
                continue
            if len(digits) != v or any(ch not in "01" for ch in digits):
                raise ValueError(f"bad row line: expected {v} binary digits, got {digits!r}")
            mask = 0
            for j, ch in enumerate(digits):
                mask |= (ch == "1") << j
            rows.append(mask)
        records.append(IncidenceMatrix(v, b, tuple(rows)))
    return records


def format_incidence_text(m: IncidenceMatrix) -> str:
    lines = [f"{m.v} {m.b}"]
    for i in range(m.b):
        lines.append("".join("1" if (m.rows[i] >> j) & 1 else "0" for j in range(m.v)))
    return "\n".join(lines) + "\n"


def format_incidence_stream(ms: Iterable[IncidenceMatrix]) -> str:
    return "\n".join(format_incidence_text(m) for m in ms)
