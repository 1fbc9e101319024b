"""Expansion of orbit matrices into full incidence matrices ("indexing").

The incidence matrix of a design with the prescribed involution is laid out
so that fixed points occupy columns 0..f-1 and the p-th point pair occupies
columns f+2p, f+2p+1; blocks use the same layout on rows.  Each orbit-matrix
cell then expands to a small binary block that must be preserved by swapping
the paired rows and columns.  The only cells admitting more than one
expansion are entries 1 on a 2x2 orbit pair (identity or anti-diagonal
pattern), so an orbit matrix with t such cells yields at most 2^t designs.

The expansion walks block orbits in layout order, keeps the running inner
product of every partially built row against every completed row, and cuts a
branch as soon as a pair of blocks either exceeds lambda common points or
can no longer reach lambda.  The intersection of the two blocks inside one
length-2 orbit is forced to lambda by the orbit-matrix conditions, so only
cross-orbit products need tracking.
"""

from __future__ import annotations

import time
from typing import Iterator, Optional

from .designs import (
    IncidenceMatrix,
    Involution,
    relabel,
    validate_symmetric_design,
)
from .orbits import OrbitMatrix, OrbitStructure, orbit_structure, verify_orbit_matrix


class IndexingBudgetError(RuntimeError):
    """Raised by the expansion stream when its time budget runs out."""


def cell_expansions(c: int, point_len: int, block_len: int) -> list:
    """All expansions of one orbit-matrix entry: a list of block_len x point_len
    binary blocks, each invariant under swapping the paired rows/columns."""
    if point_len not in (1, 2) or block_len not in (1, 2):
        raise ValueError("orbit lengths must be 1 or 2")
    if point_len == 1 and block_len == 1:
        if c in (0, 1):
            return [((c,),)]
    elif point_len == 2 and block_len == 1:
        if c == 0:
            return [((0, 0),)]
        if c == 2:
            return [((1, 1),)]
    elif point_len == 1 and block_len == 2:
        if c == 0:
            return [((0,), (0,))]
        if c == 1:
            return [((1,), (1,))]
    else:
        if c == 0:
            return [((0, 0), (0, 0))]
        if c == 2:
            return [((1, 1), (1, 1))]
        if c == 1:
            return [((1, 0), (0, 1)), ((0, 1), (1, 0))]
    raise ValueError(
        f"entry {c} is impossible for a length-{block_len} block orbit "
        f"meeting a length-{point_len} point orbit"
    )


def structure_involution(s: OrbitStructure) -> Involution:
    """The involution fixing points/blocks 0..f-1 and swapping f+2p with f+2p+1."""
    perm = list(range(s.v))
    for p in range(s.n_pairs):
        a = s.f + 2 * p
        perm[a], perm[a + 1] = perm[a + 1], perm[a]
    return Involution(tuple(perm), tuple(perm))


def _orbit_columns(s: OrbitStructure, j: int) -> tuple:
    if j < s.f:
        return (j,)
    p = j - s.f
    return (s.f + 2 * p, s.f + 2 * p + 1)


def free_cell_count(om: OrbitMatrix) -> int:
    s = om.structure
    return sum(
        1
        for i in range(s.m)
        for j in range(s.m)
        if om.rows[i][j] == 1 and s.point_orbit_lengths[j] == 2 and s.block_orbit_lengths[i] == 2
    )


class _Indexer:
    def __init__(self, om: OrbitMatrix, pins: Optional[dict] = None, deadline=None):
        verify_orbit_matrix(om)
        self.om = om
        self.s = om.structure
        self.deadline = deadline
        self.pins = pins or {}
        self._tick = 0
        s = self.s
        # per cell: the expansion choices as per-row bitmasks at final columns
        self.options = []
        for i in range(s.m):
            W = s.block_orbit_lengths[i]
            row_opts = []
            for j in range(s.m):
                cols = _orbit_columns(s, j)
                choices = []
                for block in cell_expansions(om.rows[i][j], s.point_orbit_lengths[j], W):
                    masks = []
                    for r in range(W):
                        mask = 0
                        for x, col in zip(block[r], cols):
                            mask |= x << col
                        masks.append(mask)
                    choices.append(tuple(masks))
                row_opts.append(choices)
            self.options.append(row_opts)
        # suffix feasibility: two rows from block orbits a and b can still gain
        # at most min(c[a][j'], c[b][j']) common points in point orbit j' >= j
        self.suffmin = [
            [
                [0] * (s.m + 1)
                for _ in range(s.m)
            ]
            for _ in range(s.m)
        ]
        for a in range(s.m):
            for b in range(s.m):
                suff = self.suffmin[a][b]
                for j in range(s.m - 1, -1, -1):
                    suff[j] = suff[j + 1] + min(om.rows[a][j], om.rows[b][j])

    def stream(self) -> Iterator[IncidenceMatrix]:
        yield from self._orbit(0, [], [])

    def _check_budget(self):
        self._tick += 1
        if self.deadline is not None and not self._tick % 64:
            if time.monotonic() > self.deadline:
                raise IndexingBudgetError("indexing time budget exceeded")

    def _orbit(self, i: int, rows: list, row_orbits: list) -> Iterator[IncidenceMatrix]:
        s = self.s
        if i == s.m:
            m = IncidenceMatrix(s.v, s.v, tuple(rows))
            validate_symmetric_design(m)
            yield m
            return
        W = s.block_orbit_lengths[i]
        lam = s.lam
        suff_rows = [self.suffmin[i][oi] for oi in row_orbits]
        n_old = len(rows)

        def cells(j: int, cur: list, dots: list) -> Iterator[IncidenceMatrix]:
            self._check_budget()
            if j == s.m:
                yield from self._orbit(i + 1, rows + cur, row_orbits + [i] * W)
                return
            choices = self.options[i][j]
            if len(choices) > 1:
                pin = self.pins.get((i, j))
                if pin is not None:
                    choices = [choices[pin]]
            for choice in choices:
                new_dots = []
                ok = True
                for r in range(W):
                    add = choice[r]
                    row_dots = dots[r]
                    nd = []
                    for o in range(n_old):
                        d = row_dots[o] + (add & rows[o]).bit_count()
                        if d > lam or d + suff_rows[o][j + 1] < lam:
                            ok = False
                            break
                        nd.append(d)
                    if not ok:
                        break
                    new_dots.append(nd)
                if not ok:
                    continue
                yield from cells(
                    j + 1,
                    [cur[r] | choice[r] for r in range(W)],
                    new_dots,
                )

        yield from cells(0, [0] * W, [[0] * n_old for _ in range(W)])


def index_orbit_matrix(
    om: OrbitMatrix, *, budget_seconds: Optional[float] = None
) -> Iterator[IncidenceMatrix]:
    """Exhaustive stream of incidence matrices expanding the orbit matrix.

    Every output validates as a symmetric 2-(v,k,lam) design and is preserved
    by structure_involution(om.structure).  Raises IndexingBudgetError when a
    time budget is given and exceeded.
    """
    deadline = None if budget_seconds is None else time.monotonic() + budget_seconds
    return _Indexer(om, deadline=deadline).stream()


def index_orbit_matrix_all(
    om: OrbitMatrix, *, threads: int = 1, budget_seconds: Optional[float] = None
) -> tuple:
    """Materialized expansion with optional prefix-partitioned parallelism.

    Returns (designs, complete).  The choice of thread count never changes the
    design list: the tree is split by the first free cells and merged back in
    the sequential order.
    """
    deadline = None if budget_seconds is None else time.monotonic() + budget_seconds
    if threads <= 1:
        out = []
        try:
            out.extend(_Indexer(om, deadline=deadline).stream())
        except IndexingBudgetError:
            return out, False
        return out, True

    s = om.structure
    free = [
        (i, j)
        for i in range(s.m)
        for j in range(s.m)
        if len(
            cell_expansions(
                om.rows[i][j], s.point_orbit_lengths[j], s.block_orbit_lengths[i]
            )
        )
        > 1
    ]
    depth = 0
    while (1 << depth) < threads and depth < len(free):
        depth += 1
    if depth == 0:
        return index_orbit_matrix_all(om, budget_seconds=budget_seconds)

    from concurrent.futures import ThreadPoolExecutor

    def work(assignment: int):
        pins = {free[d]: (assignment >> (depth - 1 - d)) & 1 for d in range(depth)}
        try:
            return list(_Indexer(om, pins=pins, deadline=deadline).stream()), True
        except IndexingBudgetError:
            return [], False

    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(work, range(1 << depth)))
    designs = [m for part, _ in parts for m in part]
    complete = all(ok for _, ok in parts)
    return designs, complete


def collapse_to_orbit_matrix(m: IncidenceMatrix, inv: Involution) -> OrbitMatrix:
    """Orbit matrix of a design under one of its involutions.

    Rejects the identity and any pair of permutations that is not an
    automorphism of m.  The inverse of indexing: expanding the result yields
    a stream containing (a relabeling of) m.
    """
    v, k, lam = validate_symmetric_design(m)
    if len(inv.point_perm) != m.v or len(inv.block_perm) != m.b:
        raise ValueError("involution size does not match the design")
    if inv.is_identity:
        raise ValueError("the identity is not an order-two automorphism")
    if relabel(m, inv.point_perm, inv.block_perm).rows != m.rows:
        raise ValueError("the given permutations are not an automorphism of the design")

    fixed_points = [j for j in range(m.v) if inv.point_perm[j] == j]
    point_orbits = [(j,) for j in fixed_points]
    point_orbits += sorted(
        (j, inv.point_perm[j]) for j in range(m.v) if inv.point_perm[j] > j
    )
    fixed_blocks = [i for i in range(m.b) if inv.block_perm[i] == i]
    block_orbits = [(i,) for i in fixed_blocks]
    block_orbits += sorted(
        (i, inv.block_perm[i]) for i in range(m.b) if inv.block_perm[i] > i
    )

    s = orbit_structure(v, k, lam, len(fixed_points))
    rows = []
    for orbit in block_orbits:
        rep = m.rows[orbit[0]]
        row = []
        for points in point_orbits:
            row.append(sum((rep >> p) & 1 for p in points))
        rows.append(tuple(row))
    om = OrbitMatrix(s, tuple(rows))
    verify_orbit_matrix(om)
    return om
