"""Orbit structures and orbit matrices of a symmetric design under an
order-two automorphism.

An involution splits the points and blocks of a symmetric 2-(v,k,lam) design
into f fixed orbits and (v-f)/2 orbits of length two.  The orbit matrix entry
c[i][j] counts the points of point-orbit j incident with one block of
block-orbit i (the count is the same for either block of a length-2 orbit).
Writing W[i] for block-orbit lengths and w[j] for point-orbit lengths,
double counting incidence flags and point pairs gives, for every row i and
every pair of rows s != t:

    sum_j c[i][j]                      = k                      (row sum)
    sum_j (W[i]/w[j]) * c[i][j]**2     = lam*W[i] + (k - lam)   (diagonal)
    sum_i W[i] * c[i][j]               = k * w[j]               (column)
    sum_j (W[t]/w[j]) * c[s][j]*c[t][j] = lam*W[t]              (pair)

together with the divisibility facts that a fixed block meets a length-2
point orbit in 0 or 2 points and a length-2 block orbit meets a fixed point
in 0 or 1 of its blocks' copies.  All conditions are handled in integer
arithmetic by scaling with 2/w[j] in {1, 2}.

The enumerator performs an exhaustive backtracking search, placing the rows
for block orbits of length two first (the fixed rows are then heavily
constrained), and restricts itself to semi-canonical matrices: rows are
non-increasing within a same-orbit-length segment, and entries are
non-increasing inside every run of columns that previous rows cannot
distinguish.  Every equivalence class under row/column permutations within
orbit-length classes contains its lexicographically maximal member, which
satisfies both restrictions, so the search is exhaustive; exact uniqueness
is then enforced with a canonical certificate per completed matrix.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from operator import add as _add, le as _le
from typing import Iterable, Optional

import numpy as np

from .canonical import canonical_matrix_key


@dataclass(frozen=True)
class OrbitStructure:
    """Orbit bookkeeping for an involution with f fixed points (and blocks).

    Orbits are ordered with the f fixed ones first, then the (v-f)/2 orbits
    of length two; points and blocks use the same layout.
    """

    v: int
    k: int
    lam: int
    f: int

    @property
    def n_pairs(self) -> int:
        return (self.v - self.f) // 2

    @property
    def m(self) -> int:
        """Number of orbits on points (= on blocks)."""
        return self.f + self.n_pairs

    @property
    def point_orbit_lengths(self) -> tuple:
        return (1,) * self.f + (2,) * self.n_pairs

    @property
    def block_orbit_lengths(self) -> tuple:
        return self.point_orbit_lengths


def orbit_structure(v: int, k: int, lam: int, f: int) -> OrbitStructure:
    """Validated orbit structure for an order-two automorphism."""
    if v <= 0 or k <= 0 or lam <= 0:
        raise ValueError("parameters must be positive")
    if lam * (v - 1) != k * (k - 1):
        raise ValueError(f"({v},{k},{lam}) are not symmetric 2-design parameters")
    if not 0 <= f <= v:
        raise ValueError(f"fixed point count {f} outside 0..{v}")
    if (v - f) % 2:
        raise ValueError(f"v - f = {v - f} must be even for an order-two automorphism")
    if f == v:
        raise ValueError("an order-two automorphism must move at least one point")
    return OrbitStructure(v, k, lam, f)


def _allowed_values(block_len: int, point_len: int) -> tuple:
    """Entry values a cell may take, in decreasing order."""
    if point_len == 1:
        return (1, 0)
    return (2, 1, 0) if block_len == 2 else (2, 0)


@dataclass(frozen=True)
class RowType:
    """Multiset of orbit-matrix row entries, one sorted tuple per orbit-length class."""

    block_orbit_length: int
    fixed_part: tuple  # entries on fixed point-orbits, non-increasing
    orbit_part: tuple  # entries on length-2 point-orbits, non-increasing

    def vector(self) -> tuple:
        """Concrete representative row: fixed columns then orbit columns."""
        return self.fixed_part + self.orbit_part


def generate_row_types(s: OrbitStructure, block_orbit_length: int) -> list:
    """All row types for the given block-orbit length, deduplicated up to
    permutation within each point-orbit-length class, lexicographically
    largest vector first."""
    if block_orbit_length not in (1, 2):
        raise ValueError("block orbit length must be 1 or 2")
    W = block_orbit_length
    diag_target = 2 * (s.lam * W + (s.k - s.lam))
    fixed_vals = _allowed_values(W, 1)
    orbit_vals = _allowed_values(W, 2)
    types = []
    for fixed_counts in _count_vectors(fixed_vals, s.f):
        for orbit_counts in _count_vectors(orbit_vals, s.n_pairs):
            row_sum = sum(v * n for v, n in zip(fixed_vals, fixed_counts))
            row_sum += sum(v * n for v, n in zip(orbit_vals, orbit_counts))
            if row_sum != s.k:
                continue
            diag = sum(2 * W * v * v * n for v, n in zip(fixed_vals, fixed_counts))
            diag += sum(W * v * v * n for v, n in zip(orbit_vals, orbit_counts))
            if diag != diag_target:
                continue
            fixed_part = _expand_counts(fixed_vals, fixed_counts)
            orbit_part = _expand_counts(orbit_vals, orbit_counts)
            types.append(RowType(W, fixed_part, orbit_part))
    types.sort(key=RowType.vector, reverse=True)
    return types


def _count_vectors(values: tuple, size: int):
    """All ways to assign a count to each value with total exactly size."""
    if len(values) == 1:
        yield (size,)
        return
    for n in range(size, -1, -1):
        for rest in _count_vectors(values[1:], size - n):
            yield (n,) + rest


def _expand_counts(values: tuple, counts: tuple) -> tuple:
    out = []
    for v, n in zip(values, counts):
        out.extend([v] * n)
    return tuple(out)


def rows_compatible(r: Iterable, t: Iterable, s: OrbitStructure) -> bool:
    """Pair condition between two concrete complete rows.

    The condition sum_j (W[t]/w[j]) r[j] t[j] = lam*W[t] does not depend on
    the block-orbit lengths once divided through, so a single integer check
    sum_j (2/w[j]) r[j] t[j] = 2*lam covers every combination.
    """
    total = 0
    for rj, tj, wj in zip(r, t, s.point_orbit_lengths):
        total += (2 // wj) * rj * tj
    return total == 2 * s.lam


@dataclass(frozen=True)
class OrbitMatrix:
    """Concrete m x m orbit matrix; row i belongs to block orbit i in
    structure order (fixed orbits first)."""

    structure: OrbitStructure
    rows: tuple  # tuple of m tuples of m ints


def verify_orbit_matrix(om: OrbitMatrix) -> None:
    """Independent full check of every orbit-matrix condition; raises
    ValueError naming the first violated condition."""
    s = om.structure
    w = s.point_orbit_lengths
    W = s.block_orbit_lengths
    if len(om.rows) != s.m or any(len(r) != s.m for r in om.rows):
        raise ValueError(f"orbit matrix must be {s.m}x{s.m}")
    for i, row in enumerate(om.rows):
        for j, c in enumerate(row):
            if c not in _allowed_values(W[i], w[j]):
                raise ValueError(f"entry ({i},{j})={c} violates divisibility")
        if sum(row) != s.k:
            raise ValueError(f"row {i} sum {sum(row)} != k = {s.k}")
        diag = sum((2 * W[i] // w[j]) * c * c for j, c in enumerate(row))
        if diag != 2 * (s.lam * W[i] + s.k - s.lam):
            raise ValueError(f"row {i} violates the diagonal condition")
    for j in range(s.m):
        col = sum(W[i] * om.rows[i][j] for i in range(s.m))
        if col != s.k * w[j]:
            raise ValueError(f"column {j} sum {col} != k*w = {s.k * w[j]}")
    c = np.array(om.rows, dtype=np.int64)
    wv = np.array(w, dtype=np.int64)
    # all pair conditions at once: sum_j (2/w[j]) c[s][j] c[t][j] = 2*lam, s != t
    prod = c @ (c * (2 // wv)).T
    if np.any(prod[~np.eye(s.m, dtype=bool)] != 2 * s.lam):
        bad = np.argwhere((prod != 2 * s.lam) & ~np.eye(s.m, dtype=bool))[0]
        raise ValueError(f"rows {bad[0]},{bad[1]} violate the pair condition")
    # the transposed conditions follow from the others for a square orbit
    # matrix, so a failure here means an internal inconsistency
    dual = (c * np.array(W, dtype=np.int64)[:, None]).T @ c
    dual_target = s.lam * np.outer(wv, wv)
    np.fill_diagonal(dual_target, (s.k - s.lam) * wv + s.lam * wv * wv)
    if np.any(dual != dual_target):
        bad = np.argwhere(dual != dual_target)[0]
        raise ValueError(f"columns {bad[0]},{bad[1]} violate the transposed pair condition")


@dataclass(frozen=True)
class EnumerationOptions:
    budget_seconds: Optional[float] = None
    threads: int = 1
    pairs_first: bool = True  # search length-2 block-orbit rows before fixed rows
    max_matrices: Optional[int] = None  # cap on raw completions; hitting it marks the run incomplete
    # enforce the transposed-condition bounds and the per-column dual row-type
    # test while searching.  Both hold on every completable matrix, so turning
    # them off never changes the output, only the work done to reach it; the
    # slow diagnostic mode exists to cross-check exactly that.
    strong_checks: bool = True


@dataclass
class SearchStats:
    """Counters reported by :func:`enumerate_orbit_matrices`.

    ``max_pair_depth`` is the largest number of length-2 block-orbit rows that
    were ever simultaneously *placed*.  A row counts as placed only once it has
    passed every feasibility check the search enforces (row/diagonal/pair
    conditions, column bounds, the transposed pair-condition bounds and the
    per-column dual row-type test) — all of which hold on every completable
    matrix, so a rejected row is one that provably extends to nothing.
    """

    matrices: int = 0
    raw_completions: int = 0
    max_pair_depth: int = 0
    nodes: int = 0
    wall_seconds: float = 0.0
    complete: bool = True


class _Budget(Exception):
    pass


@lru_cache(maxsize=None)
def _compositions(values: tuple, size: int) -> tuple:
    """Count vectors over values summing to size, largest-value-heavy first
    (the induced non-increasing sequences appear in decreasing lex order)."""
    return tuple(_count_vectors(values, size))


class _Search:
    """Backtracking enumerator over semi-canonical orbit matrices.

    Column state is kept per *group*: a maximal run of columns of equal
    point-orbit length that every placed row so far assigns equal values.
    Group columns share their column sum, entries of the next row must be
    non-increasing inside a group, and the pair condition against previous
    rows only needs one term per group.
    """

    def __init__(self, s: OrbitStructure, opts: EnumerationOptions, deadline=None):
        self.s = s
        self.opts = opts
        self.deadline = deadline
        segments = [(2, s.n_pairs), (1, s.f)] if opts.pairs_first else [(1, s.f), (2, s.n_pairs)]
        self.row_omegas = [W for W, n in segments for _ in range(n)]
        # remaining block-orbit length after each row position, for column bounds
        total = sum(self.row_omegas)
        self.future = []
        acc = 0
        for W in self.row_omegas:
            acc += W
            self.future.append(total - acc)
        self.stats = SearchStats()
        self.raw: list = []
        self._pair_depth = 0
        # column-pair state: cov[a][b] accumulates sum_i W[i]*c[i][a]*c[i][b],
        # which must finish at lam*w[a]*w[b] (a != b); the diagonal variant
        # finishes at (k-lam)*w[a] + lam*w[a]^2.  Both follow from the row and
        # column-sum conditions for a completed square orbit matrix, so cutting
        # branches whose partial sums overshoot (or can no longer reach) the
        # targets never loses a matrix.  A remaining row contributes at most
        # W[i]*w[a]*w[b] to cov[a][b].
        wv = np.array(s.point_orbit_lengths, dtype=np.int64)
        self._outer_w = np.outer(wv, wv)
        self._cov_target = s.lam * self._outer_w
        np.fill_diagonal(self._cov_target, (s.k - s.lam) * wv + s.lam * wv * wv)
        self._wvec = wv
        # per-column completability against the transposed matrix's row types:
        # scaling the transpose by W[i]/w[j] gives an orbit matrix of the dual
        # design with the same parameters and orbit layout, so column j (in
        # dual-value space, d = W*c/w[j]) must be completable to a row type
        # for block-orbit length w[j].  Placed entries are tracked as counts
        # per value, split by the originating row segment.
        self._dual_sigs = {}
        for wlen in (1, 2):
            sig_f = []
            sig_o = []
            for t in generate_row_types(s, wlen):
                fc = [0, 0, 0]
                oc = [0, 0, 0]
                for v in t.fixed_part:
                    fc[v] += 1
                for v in t.orbit_part:
                    oc[v] += 1
                sig_f.append(fc)
                sig_o.append(oc)
            if not sig_f:
                sig_f = [[-1, -1, -1]]
                sig_o = [[-1, -1, -1]]
            self._dual_sigs[wlen] = (
                np.array(sig_f, dtype=np.int64),
                np.array(sig_o, dtype=np.int64),
            )
        self._col_idx = np.arange(s.m)

    # groups are tuples (size, omega, colsum, entries) where entries is the
    # tuple of values previous rows gave these columns, newest last

    def _initial_groups(self) -> tuple:
        groups = []
        if self.s.f:
            groups.append((self.s.f, 1, 0, ()))
        if self.s.n_pairs:
            groups.append((self.s.n_pairs, 2, 0, ()))
        return tuple(groups)

    def run(self, first_rows: Optional[list] = None) -> None:
        groups = self._initial_groups()
        cov = np.zeros((self.s.m, self.s.m), dtype=np.int64)
        cnt = np.zeros((2, 3, self.s.m), dtype=np.int64)
        try:
            if first_rows is None:
                self._place(0, groups, [], None, cov, cnt)
            else:
                for row in first_rows:
                    self._enter(0, groups, [], row, cov, cnt)
        except _Budget:
            self.stats.complete = False

    def first_candidates(self) -> list:
        if not self.row_omegas:
            return []
        cov = np.zeros((self.s.m, self.s.m), dtype=np.int64)
        return list(self._candidates(0, self._initial_groups(), [], None, cov))

    def _place(self, i: int, groups: tuple, prev_rows: list, prev_same, cov, cnt) -> None:
        if i == len(self.row_omegas):
            if all(colsum == self.s.k * omega for _, omega, colsum, _ in groups):
                if (
                    self.opts.max_matrices is not None
                    and self.stats.raw_completions >= self.opts.max_matrices
                ):
                    raise _Budget
                self.stats.raw_completions += 1
                self.raw.append(list(prev_rows))
            return
        for row in self._candidates(i, groups, prev_rows, prev_same, cov):
            self._enter(i, groups, prev_rows, row, cov, cnt)

    def _enter(self, i: int, groups: tuple, prev_rows: list, row: tuple, cov, cnt) -> None:
        self.stats.nodes += 1
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise _Budget
        W = self.row_omegas[i]
        # a row only counts as placed (for the depth statistic) after passing
        # the feasibility tests below: a row breaking a condition every
        # completed orbit matrix provably satisfies is not constructible
        if self.opts.strong_checks:
            r = np.array(row, dtype=np.int64)
            new_cov = cov + W * np.outer(r, r)
            if np.any(new_cov > self._cov_target):
                return
            if np.any(new_cov + self.future[i] * self._outer_w < self._cov_target):
                return
            new_cnt = cnt.copy()
            new_cnt[0 if W == 1 else 1, (W * r) // self._wvec, self._col_idx] += 1
            f = self.s.f
            for wlen, cols in ((1, slice(0, f)), (2, slice(f, self.s.m))):
                if cols.start == cols.stop:
                    continue
                sig_f, sig_o = self._dual_sigs[wlen]
                cf = new_cnt[0, :, cols]
                co = new_cnt[1, :, cols]
                ok = (
                    (sig_f[:, :, None] >= cf[None, :, :]).all(1)
                    & (sig_o[:, :, None] >= co[None, :, :]).all(1)
                ).any(0)
                if not ok.all():
                    return
        else:
            new_cov, new_cnt = cov, cnt
        if W == 2:
            self._pair_depth += 1
            self.stats.max_pair_depth = max(self.stats.max_pair_depth, self._pair_depth)
        try:
            new_groups = []
            pos = 0
            for size, omega, colsum, entries in groups:
                j = pos
                while j < pos + size:
                    run = j
                    while run < pos + size and row[run] == row[j]:
                        run += 1
                    new_groups.append(
                        (run - j, omega, colsum + W * row[j], entries + (row[j],))
                    )
                    j = run
                pos += size
            prev_rows.append(row)
            next_same = (
                row if i + 1 < len(self.row_omegas) and self.row_omegas[i + 1] == W else None
            )
            self._place(i + 1, tuple(new_groups), prev_rows, next_same, new_cov, new_cnt)
            prev_rows.pop()
        finally:
            if W == 2:
                self._pair_depth -= 1

    def _candidates(self, i: int, groups: tuple, prev_rows: list, prev_same, cov):
        """All semi-canonical rows placeable at position i, decreasing lex."""
        s = self.s
        W = self.row_omegas[i]
        k, lam = s.k, s.lam
        diag_target = 2 * (lam * W + k - lam)
        future = self.future[i]
        n_groups = len(groups)
        n_prev = len(prev_rows)
        values = [_allowed_values(W, g[1]) for g in groups]
        # per group: the values its shared column sum still admits.  A value
        # that overshoots k*omega, or leaves a column unable to reach k*omega
        # with every remaining row at its maximum, can never appear in a
        # completable row, so the whole group is confined to [vmin, vmax] and
        # the forced minimum contributes to every bound below.
        col_vals = []
        for gi in range(n_groups):
            size, omega, colsum, entries = groups[gi]
            ok = tuple(
                v
                for v in values[gi]
                if colsum + W * v <= k * omega
                and colsum + W * v + future * omega >= k * omega
            )
            if not ok:
                return []
            col_vals.append(ok)
        # the column-pair accumulators checked after a row is placed are
        # constant on group-by-group blocks (a group is a run of columns that
        # every previous row treats alike), so the same bounds can already
        # box this row's values while it is being built.  Everything cut here
        # would be rejected right after placement, so the emitted candidate
        # rows do not change, only the work to find them.
        conflict_mask = [0] * n_groups
        cap_one = [False] * n_groups
        if self.opts.strong_checks:
            pos_list = []
            pos = 0
            for size, _, _, _ in groups:
                pos_list.append(pos)
                pos += size
            slack = self._cov_target - cov
            dmin = slack - future * self._outer_w
            # own-column slack boxes each group's value directly
            for gi in range(n_groups):
                p = pos_list[gi]
                su = int(slack[p, p])
                sl = int(dmin[p, p])
                ok = tuple(v for v in col_vals[gi] if sl <= W * v * v <= su)
                if not ok:
                    return []
                col_vals[gi] = ok
            if W == 1:
                # fixed-block rows take one nonzero value per group, so the
                # pair slack between two groups either admits a high entry in
                # both or makes them mutually exclusive, and a positive lower
                # target forces every column of both groups high
                highs = [cv[0] for cv in col_vals]
                # lower targets first: they pin whole groups
                for gi in range(n_groups):
                    size_g = groups[gi][0]
                    pg = pos_list[gi]
                    if size_g >= 2:
                        de = int(dmin[pg, pg + 1])
                        if de > 0:
                            h = highs[gi]
                            if h == 0 or h * h < de or h * h > int(slack[pg, pg + 1]):
                                return []
                            col_vals[gi] = (h,)
                    for gj in range(gi + 1, n_groups):
                        if int(dmin[pg, pos_list[gj]]) > 0:
                            hg, hj = highs[gi], highs[gj]
                            if hg == 0 or hj == 0 or hg * hj < int(dmin[pg, pos_list[gj]]):
                                return []
                            col_vals[gi] = (hg,)
                            col_vals[gj] = (hj,)
                # upper targets: exclusions between groups, or a cap of one
                # high column inside a group
                pinned = [len(cv) == 1 and cv[0] > 0 for cv in col_vals]
                for gi in range(n_groups):
                    size_g = groups[gi][0]
                    pg = pos_list[gi]
                    h = highs[gi]
                    if h == 0:
                        continue
                    if size_g >= 2 and h * h > int(slack[pg, pg + 1]):
                        if pinned[gi]:
                            return []
                        cap_one[gi] = True
                    for gj in range(gi + 1, n_groups):
                        hj = highs[gj]
                        if hj == 0:
                            continue
                        if h * hj > int(slack[pg, pos_list[gj]]):
                            if pinned[gi] and pinned[gj]:
                                return []
                            if pinned[gi]:
                                if col_vals[gj][-1] != 0:
                                    return []
                                col_vals[gj] = (0,)
                            elif pinned[gj]:
                                if col_vals[gi][-1] != 0:
                                    return []
                                col_vals[gi] = (0,)
                            else:
                                conflict_mask[gi] |= 1 << gj
                                conflict_mask[gj] |= 1 << gi
        vmax = [cv[0] for cv in col_vals]
        vmin = [cv[-1] for cv in col_vals]
        # suffix bounds over groups: least/greatest further row-sum and
        # diagonal contribution
        max_sum_rest = [0] * (n_groups + 1)
        min_sum_rest = [0] * (n_groups + 1)
        max_diag_rest = [0] * (n_groups + 1)
        min_diag_rest = [0] * (n_groups + 1)
        for gi in range(n_groups - 1, -1, -1):
            size, omega, _, _ = groups[gi]
            dfac = 2 * W // omega
            max_sum_rest[gi] = max_sum_rest[gi + 1] + size * vmax[gi]
            min_sum_rest[gi] = min_sum_rest[gi + 1] + size * vmin[gi]
            max_diag_rest[gi] = max_diag_rest[gi + 1] + size * dfac * vmax[gi] ** 2
            min_diag_rest[gi] = min_diag_rest[gi + 1] + size * dfac * vmin[gi] ** 2
        # per previous row: bounds on the further pair-condition contribution.
        # Above the forced minimum, extra units of row sum can only land in
        # groups whose value window is not pinned, so the budget coefficient
        # ignores pinned groups.
        pair_rest = []
        pair_minfut = []
        pair_coef = []
        for pi in range(n_prev):
            rest = [0] * (n_groups + 1)
            minfut = [0] * (n_groups + 1)
            coef = [0] * (n_groups + 1)
            for gi in range(n_groups - 1, -1, -1):
                size, omega, _, entries = groups[gi]
                unit = (2 // omega) * entries[pi]
                rest[gi] = rest[gi + 1] + unit * vmax[gi] * size
                minfut[gi] = minfut[gi + 1] + unit * vmin[gi] * size
                coef[gi] = max(coef[gi + 1], unit if vmax[gi] > vmin[gi] else 0)
            pair_rest.append(rest)
            pair_minfut.append(minfut)
            pair_coef.append(coef)
        pair_target = 2 * lam
        prev_vals = None
        if prev_same is not None:
            # previous row is constant on each group; record its value per group
            prev_vals = []
            pos = 0
            for size, _, _, _ in groups:
                prev_vals.append(prev_same[pos])
                pos += size
        # per-composition data hoisted out of the recursion: the column-sum
        # screen depends only on the group's shared column sum, which is fixed
        # for the whole call, so it is applied once here instead of on every
        # visit to the group level.  Each surviving composition is stored as
        # (largest value used, row-sum delta, diagonal delta, expanded
        # segment, exhausts-previous-value flag).
        comp_data = []
        unit_vecs = []
        rest_vecs = []
        minfut_vecs = []
        coef_vecs = []
        for gi in range(n_groups):
            size, omega, colsum, entries = groups[gi]
            vals = values[gi]
            dfac = 2 * W // omega
            allowed = set(col_vals[gi])
            cap = 1 if cap_one[gi] else size
            prev_idx = vals.index(prev_vals[gi]) if prev_vals is not None else -1
            comps = []
            for counts in _compositions(vals, size):
                ok = True
                top = -1
                add_sum = 0
                add_diag = 0
                n_pos = 0
                for v, n in zip(vals, counts):
                    if not n:
                        continue
                    if top < 0:
                        top = v
                    if v not in allowed:
                        ok = False
                        break
                    if v:
                        n_pos += n
                    add_sum += v * n
                    add_diag += dfac * v * v * n
                if not ok or n_pos > cap:
                    continue
                comps.append(
                    (
                        top,
                        add_sum,
                        add_diag,
                        _expand_counts(vals, counts),
                        prev_idx >= 0 and counts[prev_idx] == size,
                    )
                )
            comp_data.append(comps)
            factor = 2 // omega
            unit_vecs.append(tuple(factor * entries[pi] for pi in range(n_prev)))
            rest_vecs.append(tuple(pair_rest[pi][gi + 1] for pi in range(n_prev)))
            minfut_vecs.append(tuple(pair_minfut[pi][gi + 1] for pi in range(n_prev)))
            coef_vecs.append(tuple(pair_coef[pi][gi + 1] for pi in range(n_prev)))
        # joint pair budget: a discretionary unit of row sum placed in group g
        # raises the sum of all pair dots by sum_pi unit_g[pi], so beyond the
        # forced contribution the total gap sum_pi (2*lam - dot[pi]) can never
        # exceed the discretionary budget times the best single-group coverage
        # among the remaining unpinned groups
        usum = [sum(u) for u in unit_vecs]
        max_cov_rest = [0] * (n_groups + 1)
        total_minfut = [0] * (n_groups + 1)
        rel_mask = [0] * (n_groups + 1)
        for gi in range(n_groups - 1, -1, -1):
            size = groups[gi][0]
            max_cov_rest[gi] = max(
                max_cov_rest[gi + 1], usum[gi] if vmax[gi] > vmin[gi] else 0
            )
            total_minfut[gi] = total_minfut[gi + 1] + usum[gi] * vmin[gi] * size
            rel_mask[gi] = rel_mask[gi + 1] | conflict_mask[gi]
        total_target = n_prev * pair_target
        segments: list = [None] * n_groups
        out: list = []
        # states whose whole suffix was explored without a single completed
        # row; keyed by the residual state, so equal residuals reached along
        # different prefixes are pruned instead of re-explored
        dead: set = set()
        # (group, delta, budget) -> per-previous-row dot increments and the
        # window the current dots must lie in for every bound to hold:
        # dot + increment <= 2*lam  and  the gap to 2*lam coverable within
        # both the capacity and the budget bound
        win_cache: dict = {}

        def rec(
            gi: int, row_sum: int, diag: int, dots: tuple, sdots: int,
            hi_mask: int, tight: bool,
        ) -> bool:
            if gi == n_groups:
                if row_sum == k and diag == diag_target and sdots == total_target and all(
                    d == pair_target for d in dots
                ):
                    out.append(tuple(x for seg in segments for x in seg))
                    return True
                return False
            # a state that yielded nothing under the full candidate set also
            # yields nothing under the tighter ordering-restricted set, so the
            # lookup is safe for tight states; only the insert must not be
            key = (gi, row_sum, diag, dots, hi_mask & rel_mask[gi])
            if key in dead:
                return False
            if tight:
                key = None
            produced = False
            gbit = 1 << gi
            cmask_g = conflict_mask[gi]
            prev_v = prev_vals[gi] if tight else 2
            sum_hi = k - row_sum - min_sum_rest[gi + 1]
            sum_lo = k - row_sum - max_sum_rest[gi + 1]
            diag_hi = diag_target - diag - min_diag_rest[gi + 1]
            diag_lo = diag_target - diag - max_diag_rest[gi + 1]
            unit_g = unit_vecs[gi]
            usum_g = usum[gi]
            cov_next = max_cov_rest[gi + 1]
            forced_next = total_minfut[gi + 1]
            rest_g = rest_vecs[gi]
            minfut_g = minfut_vecs[gi]
            coef_g = coef_vecs[gi]
            # within one call the pair-condition update depends on the chosen
            # composition only through its row-sum delta, so it is resolved
            # once per distinct delta
            dots_cache: dict = {}
            for top, add_sum, add_diag, exp, full_prev in comp_data[gi]:
                if top > prev_v:
                    continue
                if add_sum < sum_lo or add_sum > sum_hi:
                    continue
                if add_diag < diag_lo or add_diag > diag_hi:
                    continue
                if add_sum and hi_mask & cmask_g:
                    continue
                hit = dots_cache.get(add_sum)
                if hit is None:
                    ebudget = sum_hi - add_sum
                    nsd = sdots + usum_g * add_sum
                    gap_total = total_target - nsd
                    if (
                        gap_total < forced_next
                        or gap_total > forced_next + cov_next * ebudget
                    ):
                        dots_cache[add_sum] = (None, 0)
                        continue
                    wk = (gi, add_sum, ebudget)
                    win = win_cache.get(wk)
                    if win is None:
                        delta = tuple(u * add_sum for u in unit_g)
                        high = tuple(
                            pair_target - d - m for d, m in zip(delta, minfut_g)
                        )
                        low = tuple(
                            pair_target - d - min(r, m + c * ebudget)
                            for d, r, m, c in zip(delta, rest_g, minfut_g, coef_g)
                        )
                        win = (delta, low, high)
                        win_cache[wk] = win
                    delta, low, high = win
                    if all(map(_le, low, dots)) and all(map(_le, dots, high)):
                        hit = (tuple(map(_add, dots, delta)), nsd)
                    else:
                        hit = (None, 0)
                    dots_cache[add_sum] = hit
                new_dots, nsd = hit
                if new_dots is None:
                    continue
                segments[gi] = exp
                if rec(
                    gi + 1, row_sum + add_sum, diag + add_diag, new_dots, nsd,
                    hi_mask | gbit if add_sum else hi_mask,
                    tight and full_prev,
                ):
                    produced = True
            if key is not None and not produced:
                dead.add(key)
            return produced

        rec(0, 0, 0, (0,) * n_prev, 0, 0, prev_vals is not None)
        return out

    def assemble(self, rows_in_search_order: list) -> OrbitMatrix:
        """Reorder searched rows into structure order (fixed block orbits first)."""
        if self.opts.pairs_first:
            pairs = rows_in_search_order[: self.s.n_pairs]
            fixed = rows_in_search_order[self.s.n_pairs :]
        else:
            fixed = rows_in_search_order[: self.s.f]
            pairs = rows_in_search_order[self.s.f :]
        return OrbitMatrix(self.s, tuple(fixed) + tuple(pairs))


def _row_col_classes(s: OrbitStructure):
    classes = []
    if s.f:
        classes.append(range(s.f))
    if s.n_pairs:
        classes.append(range(s.f, s.m))
    return classes


def orbit_matrix_key(om: OrbitMatrix) -> bytes:
    """Canonical certificate under the declared equivalence: simultaneous
    row/column permutations within orbit-length classes."""
    classes = _row_col_classes(om.structure)
    return canonical_matrix_key([list(r) for r in om.rows], classes, classes)


def orbit_matrices_equivalent(a: OrbitMatrix, b: OrbitMatrix) -> bool:
    if a.structure != b.structure:
        return False
    return orbit_matrix_key(a) == orbit_matrix_key(b)


def enumerate_orbit_matrices(
    s: OrbitStructure, opts: EnumerationOptions = EnumerationOptions()
) -> tuple:
    """Exhaustive, duplicate-free list of orbit matrices for the structure,
    plus search statistics.  Deterministic for any thread count."""
    start = time.monotonic()
    deadline = None if opts.budget_seconds is None else start + opts.budget_seconds
    if opts.threads > 1:
        searches, complete = _run_threaded(s, opts, deadline)
    else:
        search = _Search(s, opts, deadline)
        search.run()
        searches, complete = [search], search.stats.complete

    stats = SearchStats(complete=complete)
    stats.nodes = sum(x.stats.nodes for x in searches)
    stats.raw_completions = sum(x.stats.raw_completions for x in searches)
    stats.max_pair_depth = max((x.stats.max_pair_depth for x in searches), default=0)

    assembler = searches[0]
    seen = set()
    result = []
    for search in searches:
        for rows in search.raw:
            om = assembler.assemble(rows)
            key = orbit_matrix_key(om)
            if key in seen:
                continue
            seen.add(key)
            result.append(om)
    for om in result:
        verify_orbit_matrix(om)
    stats.matrices = len(result)
    stats.wall_seconds = time.monotonic() - start
    return result, stats


def _run_threaded(s: OrbitStructure, opts: EnumerationOptions, deadline):
    """Partition the search tree by the first-row choice across a thread pool."""
    probe = _Search(s, opts, deadline)
    first = probe.first_candidates()
    if not first:
        return [probe], True
    chunks = [first[i :: opts.threads] for i in range(opts.threads)]
    # keep deterministic order: chunk j holds candidates j, j+T, ...; merge by
    # original candidate index afterwards
    order = {}
    for idx, row in enumerate(first):
        order[row] = idx
    searches = [_Search(s, opts, deadline) for _ in chunks]

    def work(search, rows):
        search.run(first_rows=rows)
        return search

    with ThreadPoolExecutor(max_workers=opts.threads) as pool:
        list(pool.map(work, searches, chunks))
    # merge raw results in first-candidate order to match the sequential run
    merged = _Search(s, opts, deadline)
    tagged = []
    for search in searches:
        for rows in search.raw:
            tagged.append((order[rows[0]], rows))
    tagged.sort(key=lambda t: t[0])
    merged.raw = [rows for _, rows in tagged]
    merged.stats.nodes = sum(x.stats.nodes for x in searches)
    merged.stats.raw_completions = len(merged.raw)
    merged.stats.max_pair_depth = max(x.stats.max_pair_depth for x in searches)
    complete = all(x.stats.complete for x in searches)
    return [merged], complete


# ---- text format ----


def format_orbit_matrix(om: OrbitMatrix) -> str:
    s = om.structure
    lines = [f"{s.v} {s.k} {s.lam} {s.f}"]
    lines.append(" ".join(str(w) for w in s.point_orbit_lengths))
    lines.append(" ".join(str(W) for W in s.block_orbit_lengths))
    for row in om.rows:
        lines.append(" ".join(str(c) for c in row))
    return "\n".join(lines) + "\n"


def parse_orbit_matrix(text: str) -> OrbitMatrix:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) < 3:
        raise ValueError("orbit matrix text needs a header, two length vectors, and rows")
    v, k, lam, f = (int(x) for x in lines[0].split())
    s = orbit_structure(v, k, lam, f)
    omega = tuple(int(x) for x in lines[1].split())
    W = tuple(int(x) for x in lines[2].split())
    if omega != s.point_orbit_lengths or W != s.block_orbit_lengths:
        raise ValueError("orbit length vectors do not match the header (fixed orbits first)")
    rows = tuple(tuple(int(x) for x in ln.split()) for ln in lines[3:])
    if len(rows) != s.m:
        raise ValueError(f"expected {s.m} rows, found {len(rows)}")
    om = OrbitMatrix(s, rows)
    verify_orbit_matrix(om)
    return om


def format_orbit_matrix_stream(oms: Iterable) -> str:
    return "\n".join(format_orbit_matrix(om) for om in oms)


def parse_orbit_matrix_stream(text: str) -> list:
    records = [r for r in text.split("\n\n") if r.strip()]
    return [parse_orbit_matrix(r) for r in records]
