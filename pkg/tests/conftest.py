import warnings

import pytest

from cirmax.errors import FellerWarning
from cirmax.model import AffineParams
from cirmax.replication import TABLE1, table1_case


@pytest.fixture(scope="session")
def case1():
    return AffineParams(0.02, 0.2, 0.02, 0.002, 0.1)


@pytest.fixture(scope="session")
def case5():
    return AffineParams(0.02, 0.2, 0.0002, 0.00002, 0.1)


@pytest.fixture(scope="session")
def table_cases():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FellerWarning)
        return {case: table1_case(case) for case in TABLE1}
