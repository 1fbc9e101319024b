import pytest

from symdesign.orbits import (
    EnumerationOptions,
    OrbitMatrix,
    enumerate_orbit_matrices,
    format_orbit_matrix,
    format_orbit_matrix_stream,
    generate_row_types,
    orbit_matrices_equivalent,
    orbit_matrix_key,
    orbit_structure,
    parse_orbit_matrix,
    parse_orbit_matrix_stream,
    rows_compatible,
    verify_orbit_matrix,
)


def test_orbit_structure_layout():
    s = orbit_structure(36, 15, 6, 14)
    assert (s.v, s.k, s.lam, s.f) == (36, 15, 6, 14)
    assert s.n_pairs == 11 and s.m == 25
    assert s.point_orbit_lengths == (1,) * 14 + (2,) * 11
    assert s.point_orbit_lengths == s.block_orbit_lengths


def test_orbit_structure_rejects_bad_f():
    with pytest.raises(ValueError):
        orbit_structure(36, 15, 6, 15)  # v - f odd
    with pytest.raises(ValueError):
        orbit_structure(36, 15, 6, 36)  # identity action
    with pytest.raises(ValueError):
        orbit_structure(36, 15, 6, -2)


def test_row_types_36_counts():
    # (36,15,6): type counts per fixed-point count and block-orbit length
    expected = {0: (0, 1), 6: (3, 4), 14: (7, 3), 18: (8, 1)}
    for f, (n1, n2) in expected.items():
        s = orbit_structure(36, 15, 6, f)
        assert len(generate_row_types(s, 1)) == n1
        assert len(generate_row_types(s, 2)) == n2


def test_row_types_f14_vectors():
    s = orbit_structure(36, 15, 6, 14)
    got = [(t.fixed_part, t.orbit_part) for t in generate_row_types(s, 2)]
    assert got == [
        ((1,) * 6 + (0,) * 8, (1,) * 9 + (0,) * 2),
        ((1,) * 4 + (0,) * 10, (2,) + (1,) * 9 + (0,)),
        ((1,) * 2 + (0,) * 12, (2, 2) + (1,) * 9),
    ]


def test_row_types_f18_vector():
    s = orbit_structure(36, 15, 6, 18)
    (t,) = generate_row_types(s, 2)
    assert t.fixed_part == (1,) * 6 + (0,) * 12
    assert t.orbit_part == (1,) * 9


def test_row_types_f0_vector():
    s = orbit_structure(36, 15, 6, 0)
    (t,) = generate_row_types(s, 2)
    assert t.fixed_part == ()
    assert t.orbit_part == (2, 2, 2) + (1,) * 9 + (0,) * 6


def test_row_type_sums():
    for f in (0, 6, 10, 14, 18):
        s = orbit_structure(36, 15, 6, f)
        for wlen in (1, 2):
            for t in generate_row_types(s, wlen):
                assert sum(t.vector()) == 15


def test_rows_compatible_f18_self():
    # the unique length-2 type can never sit twice in one matrix: the pair
    # condition would need an odd shared fixed-column count times two
    s = orbit_structure(36, 15, 6, 18)
    (t,) = generate_row_types(s, 2)
    row = t.vector()
    assert not rows_compatible(row, row, s)
    # no rearrangement of the orbit part helps: 2*shared + 9 = 12 is unsolvable
    shifted = t.fixed_part + (t.orbit_part[1:] + t.orbit_part[:1])
    assert not rows_compatible(row, shifted, s)


def test_enumerate_fano_and_biplane(fano):
    oms, stats = enumerate_orbit_matrices(orbit_structure(7, 3, 1, 3))
    assert len(oms) == 1 and stats.complete
    for om in oms:
        verify_orbit_matrix(om)

    counts = {}
    for f in (1, 3, 5, 7, 9):
        oms, stats = enumerate_orbit_matrices(orbit_structure(11, 5, 2, f))
        assert stats.complete
        counts[f] = len(oms)
    assert counts == {1: 0, 3: 1, 5: 0, 7: 0, 9: 0}


def test_enumerate_comp4():
    oms, stats = enumerate_orbit_matrices(orbit_structure(4, 3, 2, 0))
    assert stats.complete
    assert [om.rows for om in oms] == [((2, 1), (1, 2))]


def test_enumerate_f18_empty():
    oms, stats = enumerate_orbit_matrices(orbit_structure(36, 15, 6, 18))
    assert oms == [] and stats.complete


def test_enumerate_f14_empty_with_depth():
    oms, stats = enumerate_orbit_matrices(orbit_structure(36, 15, 6, 14))
    assert oms == [] and stats.complete
    # max simultaneously placed length-2 rows under the full feasibility
    # checks (see SearchStats): a fourth row always violates one of them
    assert stats.max_pair_depth == 3


def test_enumerate_thread_determinism():
    s = orbit_structure(11, 5, 2, 3)
    base, stats1 = enumerate_orbit_matrices(s)
    for threads in (2, 3):
        oms, stats = enumerate_orbit_matrices(s, EnumerationOptions(threads=threads))
        assert [om.rows for om in oms] == [om.rows for om in base]
        assert stats.complete


def test_enumerate_budget_zero_incomplete():
    s = orbit_structure(36, 15, 6, 12)
    oms, stats = enumerate_orbit_matrices(s, EnumerationOptions(budget_seconds=0.0))
    assert not stats.complete


def test_enumerate_max_matrices_cap():
    s = orbit_structure(11, 5, 2, 3)
    oms, stats = enumerate_orbit_matrices(s, EnumerationOptions(max_matrices=0))
    assert not stats.complete and oms == []


def test_verify_rejects_tampered(fano):
    oms, _ = enumerate_orbit_matrices(orbit_structure(7, 3, 1, 3))
    om = oms[0]
    rows = [list(r) for r in om.rows]
    rows[0][0] ^= 1
    with pytest.raises(ValueError):
        verify_orbit_matrix(OrbitMatrix(om.structure, tuple(tuple(r) for r in rows)))


def test_format_parse_roundtrip():
    oms, _ = enumerate_orbit_matrices(orbit_structure(11, 5, 2, 3))
    text = format_orbit_matrix(oms[0])
    assert parse_orbit_matrix(text).rows == oms[0].rows
    stream = format_orbit_matrix_stream(oms)
    assert [om.rows for om in parse_orbit_matrix_stream(stream)] == [om.rows for om in oms]


def test_orbit_matrix_equivalence_under_class_permutation():
    oms, _ = enumerate_orbit_matrices(orbit_structure(7, 3, 1, 3))
    om = oms[0]
    s = om.structure
    # swap the last two rows and the last two columns (both in the length-2
    # class): an equivalent matrix with the same key
    perm = list(range(s.m))
    perm[-1], perm[-2] = perm[-2], perm[-1]
    rows = tuple(tuple(om.rows[perm[i]][perm[j]] for j in range(s.m)) for i in range(s.m))
    other = OrbitMatrix(s, rows)
    verify_orbit_matrix(other)
    assert orbit_matrices_equivalent(om, other)
    assert orbit_matrix_key(om) == orbit_matrix_key(other)


def test_strong_checks_off_same_output():
    # the transposed-condition bounds and the dual row-type screen are
    # redundant for the final answer (every completable matrix satisfies
    # them); diagnostic mode must therefore return the same matrices in the
    # same order, just more slowly
    for v, k, lam, f in ((7, 3, 1, 3), (7, 3, 1, 1), (11, 5, 2, 3), (4, 3, 2, 2), (36, 15, 6, 18)):
        s = orbit_structure(v, k, lam, f)
        strong, st1 = enumerate_orbit_matrices(s)
        basic, st2 = enumerate_orbit_matrices(s, EnumerationOptions(strong_checks=False))
        assert st1.complete and st2.complete
        assert [om.rows for om in strong] == [om.rows for om in basic]
