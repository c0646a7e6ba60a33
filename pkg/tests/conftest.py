import numpy as np
import pytest

from epr_ifo import EprSource, IfoParams, squeeze_db_to_r
from epr_ifo.solver import solve


@pytest.fixture(scope="session")
def table1() -> IfoParams:
    """Default sample interferometer (4 km arms, 50 m recycling cavity)."""
    return IfoParams()


@pytest.fixture(scope="session")
def solved(table1):
    """Design solution for the default interferometer, computed once."""
    return solve(table1)


@pytest.fixture(scope="session")
def solved_ifo(table1, solved) -> IfoParams:
    return solved.apply(table1)


@pytest.fixture(scope="session")
def src15() -> EprSource:
    return EprSource(r=squeeze_db_to_r(15.0))
