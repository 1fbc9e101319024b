import pytest

from symdesign.canonical import canonical_form
from symdesign.designs import validate_symmetric_design
from symdesign.indexing import (
    cell_expansions,
    collapse_to_orbit_matrix,
    free_cell_count,
    index_orbit_matrix,
    index_orbit_matrix_all,
    structure_involution,
)
from symdesign.orbits import enumerate_orbit_matrices, orbit_structure


def _single_om(v, k, lam, f):
    oms, stats = enumerate_orbit_matrices(orbit_structure(v, k, lam, f))
    assert stats.complete and len(oms) == 1
    return oms[0]


def test_cell_expansions_tables():
    # fixed block, fixed point: the entry is the incidence bit
    assert cell_expansions(1, 1, 1) == [((1,),)]
    assert cell_expansions(0, 1, 1) == [((0,),)]
    # fixed block, paired points: both or neither (the block is fixed setwise)
    assert cell_expansions(2, 2, 1) == [((1, 1),)]
    assert cell_expansions(0, 2, 1) == [((0, 0),)]
    # paired blocks, fixed point: both rows share the point's bit
    assert cell_expansions(1, 1, 2) == [((1,), (1,))]
    # paired blocks, paired points: c = 1 is the only branching cell,
    # identity arrangement enumerated before the swapped one
    assert cell_expansions(1, 2, 2) == [((1, 0), (0, 1)), ((0, 1), (1, 0))]
    assert cell_expansions(2, 2, 2) == [((1, 1), (1, 1))]
    assert cell_expansions(0, 2, 2) == [((0, 0), (0, 0))]


def test_cell_expansions_rejects_impossible():
    with pytest.raises(ValueError):
        cell_expansions(2, 1, 1)
    with pytest.raises(ValueError):
        cell_expansions(1, 2, 1)  # a fixed block meets a point pair 0 or 2 times
    with pytest.raises(ValueError):
        cell_expansions(3, 2, 2)


def test_index_comp4_exhausts_free_cells():
    om = _single_om(4, 3, 2, 0)
    t = free_cell_count(om)
    designs, complete = index_orbit_matrix_all(om)
    assert complete and len(designs) == 2**t == 4
    assert len({d.rows for d in designs}) == 4
    for d in designs:
        assert validate_symmetric_design(d) == (4, 3, 2)


def test_index_fano(fano):
    om = _single_om(7, 3, 1, 3)
    designs, complete = index_orbit_matrix_all(om)
    assert complete and len(designs) == 8
    keys = {canonical_form(d).digest for d in designs}
    assert keys == {canonical_form(fano).digest}


def test_expansions_respect_prescribed_action():
    om = _single_om(11, 5, 2, 3)
    sigma = structure_involution(om.structure)
    for d in index_orbit_matrix(om):
        # the structure involution is an automorphism of every expansion
        from symdesign.designs import relabel

        assert relabel(d, sigma.point_perm, sigma.block_perm).rows == d.rows


def test_collapse_index_roundtrip_small():
    for v, k, lam, f in ((7, 3, 1, 3), (11, 5, 2, 3), (4, 3, 2, 0)):
        om = _single_om(v, k, lam, f)
        sigma = structure_involution(om.structure)
        designs, complete = index_orbit_matrix_all(om)
        assert complete
        for d in designs:
            assert collapse_to_orbit_matrix(d, sigma).rows == om.rows


def test_collapse_reference_designs(design_a104, design_a120):
    from symdesign.designs import involutions

    for m in (design_a104, design_a120):
        inv = next(iter(involutions(m)))
        assert inv.f == 12
        om = collapse_to_orbit_matrix(m, inv)
        assert om.structure.f == 12
        sigma = structure_involution(om.structure)
        stream = index_orbit_matrix(om)
        for _ in range(3):
            d = next(stream)
            assert validate_symmetric_design(d) == (36, 15, 6)
            assert collapse_to_orbit_matrix(d, sigma).rows == om.rows
        stream.close()


def test_collapse_rejects_non_automorphism(fano):
    from symdesign.designs import Involution

    ident = Involution(tuple(range(7)), tuple(range(7)))
    with pytest.raises(ValueError):
        collapse_to_orbit_matrix(fano, ident)
    # a transposition of points that is not an automorphism
    pp = (1, 0, 2, 3, 4, 5, 6)
    with pytest.raises(ValueError):
        collapse_to_orbit_matrix(fano, Involution(pp, pp))


def test_index_thread_determinism():
    om = _single_om(11, 5, 2, 3)
    base, complete = index_orbit_matrix_all(om)
    assert complete and len(base) == 128
    for threads in (2, 4, 7):
        out, ok = index_orbit_matrix_all(om, threads=threads)
        assert ok
        assert [d.rows for d in out] == [d.rows for d in base]


def test_index_budget_zero_incomplete():
    om = _single_om(11, 5, 2, 3)
    designs, complete = index_orbit_matrix_all(om, budget_seconds=0.0)
    assert not complete
