import pytest

from govsim.experiments import run_grid


@pytest.fixture(scope="session")
def default_grid():
    """The full default experiment: 5 scenarios x 5 levels x 30 replicates, seed 42."""
    return run_grid(42, 30)
