import random

import pytest

from symdesign.canonical import (
    ALGORITHM_VERSION,
    DedupeStore,
    StoreVersionError,
    automorphism_group,
    canonical_form,
    canonical_matrix_key,
    dedupe,
    group_elements,
    is_self_dual_design,
)
from symdesign.designs import dual, relabel, validate_symmetric_design

from _oracles import are_isomorphic, automorphism_count


def _random_relabel(m, rng):
    pp = list(range(m.v))
    bp = list(range(m.b))
    rng.shuffle(pp)
    rng.shuffle(bp)
    return relabel(m, tuple(pp), tuple(bp))


def test_canonical_form_invariant_under_relabeling(fano, comp4, biplane11):
    rng = random.Random(20240817)
    for m in (fano, comp4, biplane11):
        cf = canonical_form(m)
        assert cf.algorithm_version == ALGORITHM_VERSION
        for _ in range(50):
            r = _random_relabel(m, rng)
            rf = canonical_form(r)
            assert rf.digest == cf.digest
            assert rf.canonical_matrix.rows == cf.canonical_matrix.rows


def test_canonical_form_large_designs(design_a104, design_a120):
    rng = random.Random(7)
    for m in (design_a104, design_a120):
        cf = canonical_form(m)
        for _ in range(5):
            assert canonical_form(_random_relabel(m, rng)).digest == cf.digest


def test_canonical_separates_inequivalent(design_a104, design_a120):
    assert canonical_form(design_a104).digest != canonical_form(design_a120).digest


def test_canonical_matrix_is_isomorphic_relabeling(fano):
    cf = canonical_form(fano)
    assert validate_symmetric_design(cf.canonical_matrix) == (7, 3, 1)
    assert are_isomorphic(fano, cf.canonical_matrix)


def test_automorphism_orders_match_brute_force(fano, comp4, biplane11):
    for m, expected in ((fano, 168), (comp4, 24), (biplane11, 660)):
        g = automorphism_group(m)
        assert g.order == expected
        assert automorphism_count(m) == expected


def test_generators_are_automorphisms(biplane11):
    g = automorphism_group(biplane11)
    for point_perm, block_perm in g.generators:
        assert relabel(biplane11, point_perm, block_perm).rows == biplane11.rows


def test_group_elements_count(fano):
    g = automorphism_group(fano)
    elements = list(group_elements(g, fano.v))
    assert len(elements) == g.order == 168
    assert len(set(elements)) == 168


def test_self_duality(fano, comp4, biplane11, design_a104, design_a120):
    assert is_self_dual_design(fano)
    assert is_self_dual_design(comp4)
    assert is_self_dual_design(biplane11)
    # the two 36-point reference designs are not isomorphic to their duals
    assert not is_self_dual_design(design_a104)
    assert not is_self_dual_design(design_a120)


def test_dual_canonical_consistency(design_a104):
    d = dual(design_a104)
    assert validate_symmetric_design(d) == (36, 15, 6)
    assert canonical_form(d).digest == canonical_form(dual(design_a104)).digest


def test_dedupe_collapses_relabelings(fano, biplane11):
    rng = random.Random(99)
    stream = [_random_relabel(fano, rng) for _ in range(6)] + [
        _random_relabel(biplane11, rng) for _ in range(4)
    ]
    classes = dedupe(stream)
    assert len(classes) == 2
    assert sorted(c.multiplicity for c in classes) == [4, 6]
    for c in classes:
        assert canonical_form(c.representative).digest == c.digest


def test_dedupe_store_roundtrip(tmp_path, fano, comp4):
    store = DedupeStore()
    store.add_matrix(fano)
    store.add_matrix(comp4)
    store.add_matrix(fano, multiplicity=2)
    path = tmp_path / "classes.jsonl"
    store.save(path)
    again = DedupeStore.load(path)
    assert again.records == store.records
    # saving the loaded store is byte-identical (idempotent)
    path2 = tmp_path / "classes2.jsonl"
    again.save(path2)
    assert path.read_bytes() == path2.read_bytes()


def test_dedupe_store_merge(tmp_path, fano, biplane11):
    a = DedupeStore()
    a.add_matrix(fano)
    b = DedupeStore()
    b.add_matrix(fano)
    b.add_matrix(biplane11)
    a.merge(b)
    classes = a.classes()
    assert len(classes) == 2
    assert sorted(c.multiplicity for c in classes) == [1, 2]


def test_dedupe_store_version_guard(fano):
    a = DedupeStore()
    b = DedupeStore(algorithm_version="other-0")
    b.add_matrix(fano)
    with pytest.raises(StoreVersionError):
        a.merge(b)


def test_canonical_matrix_key_respects_classes():
    matrix = [[2, 1, 0], [1, 0, 1], [0, 1, 2]]
    classes = [[0, 1], [2]]  # first two rows/cols interchangeable, third separate
    key = canonical_matrix_key(matrix, classes, classes)
    swapped = [[0, 1, 1], [1, 2, 0], [1, 0, 2]]  # rows 0,1 and cols 0,1 swapped
    assert canonical_matrix_key(swapped, classes, classes) == key
    # swapping across class boundaries is a different object
    cross = [[2, 0, 1], [1, 1, 0], [0, 2, 1]]  # cols 1,2 swapped
    assert canonical_matrix_key(cross, classes, classes) != key
