import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from symdesign.designs import IncidenceMatrix, parse_incidence_text

DATA = Path(__file__).parent / "data"


def _cyclic(v: int, base: tuple) -> IncidenceMatrix:
    blocks = [[(p + i) % v for p in base] for i in range(v)]
    return IncidenceMatrix.from_blocks(v, blocks)


@pytest.fixture(scope="session")
def fano() -> IncidenceMatrix:
    """2-(7,3,1), cyclic difference set {0,1,3} mod 7."""
    return _cyclic(7, (0, 1, 3))


@pytest.fixture(scope="session")
def comp4() -> IncidenceMatrix:
    """2-(4,3,2): every 3-subset of a 4-set."""
    return IncidenceMatrix.from_blocks(
        4, [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]
    )


@pytest.fixture(scope="session")
def biplane11() -> IncidenceMatrix:
    """2-(11,5,2), quadratic residues mod 11."""
    return _cyclic(11, (1, 3, 4, 5, 9))


@pytest.fixture(scope="session")
def design_a104() -> IncidenceMatrix:
    return parse_incidence_text((DATA / "design_a9_104.txt").read_text())


@pytest.fixture(scope="session")
def design_a120() -> IncidenceMatrix:
    return parse_incidence_text((DATA / "design_a9_120.txt").read_text())
