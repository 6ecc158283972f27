import pytest

from ellcommute.elliptic import elliptic_constants
from ellcommute.lame import lame_operator, lame_q_genus_one


@pytest.fixture(scope="session")
def lame_i():
    """B = 2 at Ω = i, expanded at 1/2, with its classical third-order partner."""
    p = lame_operator(2.0, 1j, 0.5, 20)
    q = lame_q_genus_one(1j, 0.5, 20)
    return p, q, elliptic_constants(1j)
