"""Canonical forms, automorphism groups, and isomorph rejection.

The engine canonically labels an integer matrix under row and column
permutations that preserve given row/column classes (for an incidence
matrix: one row class of blocks, one column class of points; the two sides
are never mixed).  It is an individualization-refinement search:

  * equitable refinement of an ordered partition of rows and columns, where
    a vertex's signature is the count of each entry value against every
    opposite-side cell (refinement alone fixes nothing for a 2-design,
    whose rows and columns are all alike);
  * branching individualizes one vertex of the first smallest non-singleton
    cell, then re-refines;
  * each node carries an invariant (cell shape + quotient sums); a subtree
    is pruned when its invariant path can neither beat the best leaf found
    so far nor reproduce the first leaf's path (the automorphism anchor);
  * leaves whose certificates collide yield automorphisms, which prune
    sibling branches via orbit computations on the target cell.

The canonical labeling is the leaf minimizing (invariant path, certificate);
both components are relabeling-invariant, so isomorphic inputs canonize to
identical certificates.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .designs import IncidenceMatrix, dual, format_incidence_text, parse_incidence_text, relabel

ALGORITHM_VERSION = "cert-1"

STORE_FORMAT = "dedupe-store"


class _Partition:
    """Ordered partition of rows and of columns.

    Each side is stored as an array mapping vertex -> cell ordinal, where the
    ordinal is the cell's position in the partition order.  Splitting a cell
    renumbers ordinals so that order is preserved and subcells appear in
    signature order; whole-side operations then need no per-cell loops.
    """

    __slots__ = ("row_ids", "col_ids")

    def __init__(self, row_ids: np.ndarray, col_ids: np.ndarray):
        self.row_ids = row_ids
        self.col_ids = col_ids

    def copy(self) -> "_Partition":
        return _Partition(self.row_ids.copy(), self.col_ids.copy())


def _ids_from_classes(classes, n: int) -> np.ndarray:
    ids = np.full(n, -1, dtype=np.int64)
    ord_ = 0
    for cl in classes:
        members = sorted(cl)
        if not members:
            continue
        for x in members:
            ids[x] = ord_
        ord_ += 1
    if np.any(ids < 0):
        raise ValueError("classes do not cover every index")
    return ids


class _Canonizer:
    def __init__(self, matrix, row_classes=None, col_classes=None):
        a = np.asarray(matrix, dtype=np.uint8)
        self.a = a
        self.r, self.c = a.shape
        self.values = tuple(int(v) for v in np.unique(a) if v)
        # per-value indicators, both orientations, for vectorized signatures
        self.row_ind = [np.ascontiguousarray((a == v), dtype=np.int32) for v in self.values]
        self.col_ind = [np.ascontiguousarray((a == v).T, dtype=np.int32) for v in self.values]
        if row_classes is None:
            row_classes = [range(self.r)]
        if col_classes is None:
            col_classes = [range(self.c)]
        self.initial = _Partition(
            _ids_from_classes(row_classes, self.r), _ids_from_classes(col_classes, self.c)
        )
        self.gens: list[np.ndarray] = []  # vertex perms over 0..r+c-1 (rows, then cols)
        self._first = None  # (path, cert, labeling)
        self._best = None

    # ---- refinement ----

    @staticmethod
    def _split_by_keys(ids: np.ndarray, keys: np.ndarray) -> tuple[np.ndarray, bool]:
        """Renumber ids so every cell is split by its members' key rows.

        Old ordinal is the primary sort key, so partition order is preserved
        and subcells land in ascending key order.  Each (ordinal, key) row is
        packed big-endian so one flat sort orders them lexicographically.
        """
        n = ids.shape[0]
        combo = np.column_stack((ids, keys)).astype(">i4")
        packed = np.ascontiguousarray(combo).view(np.dtype((np.void, combo.shape[1] * 4)))
        packed = packed.ravel()
        order = np.argsort(packed, kind="stable")
        sp = packed[order]
        brk = np.empty(n, dtype=bool)
        brk[0] = True
        brk[1:] = sp[1:] != sp[:-1]
        new_sorted = np.cumsum(brk) - 1
        out = np.empty(n, dtype=np.int64)
        out[order] = new_sorted
        return out, int(new_sorted[-1]) + 1 > int(ids.max()) + 1

    def _keys_against(self, inds: list, opp_ids: np.ndarray, opp_n: int) -> np.ndarray:
        onehot = np.zeros((opp_n, int(opp_ids.max()) + 1), dtype=np.int32)
        onehot[np.arange(opp_n), opp_ids] = 1
        if len(inds) == 1:
            return inds[0] @ onehot
        return np.hstack([ind @ onehot for ind in inds])

    def _refine(self, part: _Partition) -> None:
        """Coarsest equitable refinement: every vertex is keyed by its per-value
        counts against every opposite cell, and every cell splits by that full
        signature; a side is re-keyed only after the opposite side changed."""
        if not self.values or self.r == 0 or self.c == 0:
            return
        rows_stale = cols_stale = True
        while rows_stale or cols_stale:
            if rows_stale:
                rows_stale = False
                keys = self._keys_against(self.row_ind, part.col_ids, self.c)
                part.row_ids, changed = self._split_by_keys(part.row_ids, keys)
                cols_stale |= changed
            if cols_stale:
                cols_stale = False
                keys = self._keys_against(self.col_ind, part.row_ids, self.r)
                part.col_ids, changed = self._split_by_keys(part.col_ids, keys)
                rows_stale |= changed

    def _node_invariant(self, part: _Partition) -> bytes:
        """Relabeling-invariant summary of the node: cell sizes on both sides
        plus the per-value quotient matrix (cell-by-cell entry counts)."""
        ncr = int(part.row_ids.max()) + 1 if self.r else 0
        ncc = int(part.col_ids.max()) + 1 if self.c else 0
        parts = [
            np.array([ncr, ncc], dtype=np.int64).tobytes(),
            np.bincount(part.row_ids, minlength=ncr).astype(np.int64).tobytes(),
            np.bincount(part.col_ids, minlength=ncc).astype(np.int64).tobytes(),
        ]
        if self.values and self.r and self.c:
            onehot_r = np.zeros((self.r, ncr), dtype=np.int32)
            onehot_r[np.arange(self.r), part.row_ids] = 1
            onehot_c = np.zeros((self.c, ncc), dtype=np.int32)
            onehot_c[np.arange(self.c), part.col_ids] = 1
            for ind in self.row_ind:
                parts.append((onehot_r.T @ ind @ onehot_c).astype(np.int64).tobytes())
        return b"".join(parts)

    # ---- search ----

    def run(self):
        part = self.initial.copy()
        self._refine(part)
        self._descend(part, [], [])
        path, cert, labeling = self._best
        return cert, labeling, self.gens

    @staticmethod
    def _target_cell(part: _Partition) -> Optional[tuple[int, int]]:
        """(side, ordinal) of the first smallest non-singleton cell; rows side first."""
        best = None
        for side, ids in ((0, part.row_ids), (1, part.col_ids)):
            if ids.shape[0] == 0:
                continue
            sizes = np.bincount(ids)
            for ord_, size in enumerate(sizes):
                if size > 1 and (best is None or size < best[0]):
                    best = (int(size), side, ord_)
        return None if best is None else (best[1], best[2])

    def _leaf(self, part: _Partition):
        row_order = np.argsort(part.row_ids)
        col_order = np.argsort(part.col_ids)
        cert = self.a[np.ix_(row_order, col_order)].tobytes()
        return cert, (row_order, col_order)

    def _leaf_perm(self, lab1, lab2) -> np.ndarray:
        """Vertex permutation carrying leaf 1's labeling onto leaf 2's."""
        ro1, co1 = lab1
        ro2, co2 = lab2
        perm = np.empty(self.r + self.c, dtype=np.int64)
        perm[ro1] = ro2
        perm[co1 + self.r] = co2 + self.r
        return perm

    def _is_automorphism(self, perm: np.ndarray) -> bool:
        rho = perm[: self.r]
        gamma = perm[self.r :] - self.r
        return np.array_equal(self.a[np.ix_(rho, gamma)], self.a)

    def _record_automorphism(self, perm: np.ndarray) -> None:
        assert self._is_automorphism(perm)
        if not np.array_equal(perm, np.arange(self.r + self.c)):
            for g in self.gens:
                if np.array_equal(g, perm):
                    return
            self.gens.append(perm)

    def _orbit(self, vertex: int, prefix: list[int]) -> set[int]:
        """Orbit of a vertex under discovered automorphisms fixing prefix pointwise."""
        gens = [g for g in self.gens if all(g[p] == p for p in prefix)]
        orbit = {vertex}
        frontier = [vertex]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = int(g[x])
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        return orbit

    def _descend(self, part: _Partition, path: list, prefix: list[int]) -> None:
        inv = self._node_invariant(part)
        new_path = path + [inv]
        depth = len(path)
        on_first = (
            self._first is not None
            and len(self._first[0]) > depth
            and self._first[0][: depth + 1] == new_path
        )
        if self._best is not None and not on_first:
            best_prefix = self._best[0][: depth + 1]
            if len(best_prefix) == depth + 1 and new_path > best_prefix:
                return
        target = self._target_cell(part)
        if target is None:
            cert, labeling = self._leaf(part)
            if self._first is None:
                self._first = (new_path, cert, labeling)
                self._best = self._first
                return
            if new_path == self._first[0] and cert == self._first[1]:
                self._record_automorphism(self._leaf_perm(self._first[2], labeling))
            key = (new_path, cert)
            best_key = (self._best[0], self._best[1])
            if key < best_key:
                self._best = (new_path, cert, labeling)
            elif key == best_key and self._best is not self._first:
                self._record_automorphism(self._leaf_perm(self._best[2], labeling))
            return
        side, t = target
        ids = part.row_ids if side == 0 else part.col_ids
        members = np.flatnonzero(ids == t)
        offset = 0 if side == 0 else self.r
        tried: list[int] = []
        for raw in members:
            raw = int(raw)
            cid = raw + offset
            if tried and self._orbit(cid, prefix) & set(tried):
                tried.append(cid)
                continue
            # split cell t into [raw] at position t and the rest right after it
            new_ids = ids + (ids > t)
            new_ids[members] = t + 1
            new_ids[raw] = t
            child = (
                _Partition(new_ids, part.col_ids.copy())
                if side == 0
                else _Partition(part.row_ids.copy(), new_ids)
            )
            self._refine(child)
            self._descend(child, new_path, prefix + [cid])
            tried.append(cid)


@dataclass(frozen=True)
class CanonicalForm:
    canonical_matrix: IncidenceMatrix
    digest: str
    algorithm_version: str


@dataclass(frozen=True)
class AutGroup:
    """Automorphism group given by generators (point_perm, block_perm) and order."""

    generators: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    order: int


def _canonize(m: IncidenceMatrix):
    dense = np.array(m.dense(), dtype=np.uint8).reshape(m.b, m.v)
    engine = _Canonizer(dense)
    cert, labeling, gens = engine.run()
    return engine, cert, labeling, gens


def canonical_form(m: IncidenceMatrix) -> CanonicalForm:
    """Canonical representative and digest; equal across all relabelings of m."""
    _, cert, labeling, _ = _canonize(m)
    row_order, col_order = labeling
    block_perm = [0] * m.b
    for pos, i in enumerate(row_order):
        block_perm[int(i)] = pos
    point_perm = [0] * m.v
    for pos, j in enumerate(col_order):
        point_perm[int(j)] = pos
    canon = relabel(m, tuple(point_perm), tuple(block_perm))
    digest = hashlib.sha256(
        ALGORITHM_VERSION.encode() + b"\x00" + f"{m.b}x{m.v}".encode() + b"\x00" + cert
    ).hexdigest()
    return CanonicalForm(canon, digest, ALGORITHM_VERSION)


def automorphism_group(m: IncidenceMatrix) -> AutGroup:
    """Full automorphism group; order is the exact size of the generated group."""
    engine, _, _, gens = _canonize(m)
    pairs = []
    for g in gens:
        block_perm = tuple(int(x) for x in g[: m.b])
        point_perm = tuple(int(x) - m.b for x in g[m.b :])
        pairs.append((point_perm, block_perm))
    order = len(_closure(gens, m.b + m.v))
    return AutGroup(tuple(pairs), order)


def _closure(gens: Sequence, degree: int, cap: int = 2_000_000) -> list[tuple]:
    """Every element of the generated permutation group, sorted."""
    identity = tuple(range(degree))
    seen = {identity}
    frontier = [identity]
    gen_tuples = [tuple(int(x) for x in g) for g in gens]
    while frontier:
        base = frontier.pop()
        for g in gen_tuples:
            prod = tuple(g[x] for x in base)
            if prod not in seen:
                if len(seen) >= cap:
                    raise RuntimeError(f"group closure exceeds cap {cap}")
                seen.add(prod)
                frontier.append(prod)
    return sorted(seen)


def group_elements(aut: AutGroup, v: int) -> Iterator[tuple[int, ...]]:
    """Every point permutation in the group, in sorted order."""
    gens = [np.array(pp, dtype=np.int64) for pp, _ in aut.generators]
    for perm in _closure(gens, v):
        yield perm


def is_self_dual_design(m: IncidenceMatrix) -> bool:
    """Whether m is isomorphic to its dual."""
    return canonical_form(m).digest == canonical_form(dual(m)).digest


def canonical_matrix_key(matrix, row_classes, col_classes) -> bytes:
    """Canonical certificate of an integer matrix under class-preserving
    row/column permutations; used for orbit-matrix equivalence."""
    engine = _Canonizer(np.asarray(matrix, dtype=np.uint8), row_classes, col_classes)
    cert, _, _ = engine.run()
    return cert


@dataclass(frozen=True)
class DedupeClass:
    digest: str
    representative: IncidenceMatrix  # the canonical matrix itself
    multiplicity: int


def dedupe(stream: Iterable[IncidenceMatrix]) -> list[DedupeClass]:
    """One representative per isomorphism class, sorted by digest.

    The representative is the canonical matrix, so the result is independent
    of input order and of how the stream was sharded.
    """
    classes: dict[str, list] = {}
    for m in stream:
        cf = canonical_form(m)
        entry = classes.get(cf.digest)
        if entry is None:
            classes[cf.digest] = [cf.canonical_matrix, 1]
        else:
            entry[1] += 1
    return [DedupeClass(digest, rep, count) for digest, (rep, count) in sorted(classes.items())]


class StoreVersionError(RuntimeError):
    pass


class DedupeStore:
    """On-disk accumulator of canonical representatives keyed by digest."""

    def __init__(self, algorithm_version: str = ALGORITHM_VERSION):
        self.algorithm_version = algorithm_version
        self.records: dict[str, list] = {}  # digest -> [matrix_text, multiplicity]

    def add_matrix(self, m: IncidenceMatrix, multiplicity: int = 1) -> str:
        cf = canonical_form(m)
        self._accumulate(cf.digest, format_incidence_text(cf.canonical_matrix), multiplicity)
        return cf.digest

    def _accumulate(self, digest: str, matrix_text: str, multiplicity: int) -> None:
        entry = self.records.get(digest)
        if entry is None:
            self.records[digest] = [matrix_text, multiplicity]
        else:
            entry[1] += multiplicity

    def merge(self, other: "DedupeStore") -> None:
        if other.algorithm_version != self.algorithm_version:
            raise StoreVersionError(
                f"cannot merge store version {other.algorithm_version!r} "
                f"into {self.algorithm_version!r}"
            )
        for digest, (matrix_text, multiplicity) in other.records.items():
            self._accumulate(digest, matrix_text, multiplicity)

    def classes(self) -> list[DedupeClass]:
        return [
            DedupeClass(digest, parse_incidence_text(text), mult)
            for digest, (text, mult) in sorted(self.records.items())
        ]

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(
                json.dumps({"format": STORE_FORMAT, "algorithm_version": self.algorithm_version})
                + "\n"
            )
            for digest, (text, mult) in sorted(self.records.items()):
                fh.write(
                    json.dumps({"digest": digest, "matrix": text, "multiplicity": mult}) + "\n"
                )

    @classmethod
    def load(cls, path) -> "DedupeStore":
        with open(path) as fh:
            lines = fh.read().splitlines()
        if not lines:
            raise ValueError("empty store file")
        head = json.loads(lines[0])
        if head.get("format") != STORE_FORMAT:
            raise ValueError(f"not a {STORE_FORMAT} file")
        store = cls(head["algorithm_version"])
        for line in lines[1:]:
            if not line.strip():
                continue
            rec = json.loads(line)
            store._accumulate(rec["digest"], rec["matrix"], rec["multiplicity"])
        return store
