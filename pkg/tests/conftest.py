import numpy as np
import pytest

from sconv.operators import HermitianOperator, rand_density


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)


@pytest.fixture
def qubit_pair(rng):
    """A fixed full-rank non-commuting qubit pair."""
    return rand_density(2, rng), rand_density(2, rng)


@pytest.fixture
def qutrit_pair(rng):
    return rand_density(3, rng), rand_density(3, rng)


def classical_pair(p, q):
    """Diagonal (commuting) pair from two probability vectors."""
    return (
        HermitianOperator(np.diag(np.asarray(p, dtype=float))),
        HermitianOperator(np.diag(np.asarray(q, dtype=float))),
    )
