import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symdesign.designs import (
    DesignError,
    IncidenceMatrix,
    Involution,
    dual,
    find_involution,
    format_incidence_stream,
    format_incidence_text,
    induced_block_perm,
    involution_census,
    involutions,
    parse_incidence_stream,
    parse_incidence_text,
    relabel,
    validate_symmetric_design,
)


def test_validate_parameters(fano, comp4, biplane11, design_a104, design_a120):
    assert validate_symmetric_design(fano) == (7, 3, 1)
    assert validate_symmetric_design(comp4) == (4, 3, 2)
    assert validate_symmetric_design(biplane11) == (11, 5, 2)
    assert validate_symmetric_design(design_a104) == (36, 15, 6)
    assert validate_symmetric_design(design_a120) == (36, 15, 6)


def test_validate_rejects_non_design():
    with pytest.raises(DesignError):
        validate_symmetric_design(IncidenceMatrix.from_rows([[1, 1], [1, 1]]))
    # square but pair counts are wrong
    broken = IncidenceMatrix.from_rows(
        [[1, 1, 1, 0], [1, 1, 0, 1], [1, 0, 1, 1], [1, 1, 1, 0]]
    )
    with pytest.raises(DesignError):
        validate_symmetric_design(broken)


def test_validate_rejects_non_square(fano):
    rect = IncidenceMatrix(7, 6, fano.rows[:6])
    with pytest.raises(DesignError):
        validate_symmetric_design(rect)


def test_dual_is_design_and_involutive(fano, biplane11):
    for m in (fano, biplane11):
        d = dual(m)
        assert validate_symmetric_design(d) == validate_symmetric_design(m)
        assert dual(d).rows == m.rows


def test_relabel_roundtrip(fano):
    pp = (3, 0, 6, 1, 5, 2, 4)
    bp = (1, 4, 0, 2, 6, 5, 3)
    r = relabel(fano, pp, bp)
    assert validate_symmetric_design(r) == (7, 3, 1)
    inv_pp = tuple(pp.index(j) for j in range(7))
    inv_bp = tuple(bp.index(i) for i in range(7))
    assert relabel(r, inv_pp, inv_bp).rows == fano.rows


def test_relabel_entry_mapping(fano):
    pp = (3, 0, 6, 1, 5, 2, 4)
    bp = (1, 4, 0, 2, 6, 5, 3)
    r = relabel(fano, pp, bp)
    for i in range(7):
        for j in range(7):
            assert r.entry(bp[i], pp[j]) == fano.entry(i, j)


def test_induced_block_perm(fano):
    ident = tuple(range(7))
    assert induced_block_perm(fano, ident) == ident
    # x -> 2x mod 7 multiplies the difference set {0,1,3} into itself
    doubling = tuple((2 * j) % 7 for j in range(7))
    beta = induced_block_perm(fano, doubling)
    assert beta is not None
    # an arbitrary transposition is not an automorphism of the Fano plane
    assert induced_block_perm(fano, (1, 0, 2, 3, 4, 5, 6)) is None


def test_involution_validation():
    with pytest.raises(ValueError):
        Involution((1, 2, 0), (0, 1, 2))  # 3-cycle, not order <= 2
    inv = Involution((1, 0, 2), (2, 1, 0))
    assert inv.f == 1 and not inv.is_identity


def test_find_involution_methods_agree(fano):
    for f in (1, 3, 5, 7):
        a = find_involution(fano, f, method="scan")
        b = find_involution(fano, f, method="group")
        assert (a is None) == (b is None)
        if a is not None:
            assert a.f == b.f == f
    # parity: v - f must be even
    assert find_involution(fano, 2) is None


def test_involution_census_biplane(biplane11):
    # PSL(2,11) has 55 involutions; each fixes 3 of the 11 points
    assert involution_census(biplane11) == {3: 55}


def test_involutions_are_automorphisms(fano):
    seen = 0
    for inv in involutions(fano):
        seen += 1
        assert relabel(fano, inv.point_perm, inv.block_perm).rows == fano.rows
    assert seen == 21  # the 21 involutions of PGL(3,2)


def test_parse_format_roundtrip(design_a104):
    text = format_incidence_text(design_a104)
    assert parse_incidence_text(text).rows == design_a104.rows
    assert text.splitlines()[0] == "36 36"


def test_parse_tolerates_spacing():
    m = parse_incidence_text("2 2\n[1 0]\n[0 1]\n")
    assert m.rows == (1, 2)


def test_stream_roundtrip(fano, comp4):
    text = format_incidence_stream([fano, comp4])
    out = parse_incidence_stream(text)
    assert [m.rows for m in out] == [fano.rows, comp4.rows]


@given(
    st.lists(
        st.lists(st.integers(min_value=0, max_value=1), min_size=5, max_size=5),
        min_size=1,
        max_size=6,
    )
)
@settings(max_examples=60, deadline=None)
def test_parse_format_roundtrip_random(rows):
    m = IncidenceMatrix.from_rows(rows)
    again = parse_incidence_text(format_incidence_text(m))
    assert again.v == m.v and again.rows == m.rows
