import os
import tempfile

# keep test runs out of the working log directory
os.environ.setdefault("OPKIT_LOG_DIR", tempfile.mkdtemp(prefix="opkit-logs-"))

import pytest

from src.basecat import FinSet, Monoid
from src.operads import ass, com


@pytest.fixture
def trivial_monoid():
    return Monoid.trivial()


@pytest.fixture
def z2():
    return Monoid.cyclic(2)


@pytest.fixture
def semilattice():
    """{1, 0} under multiplication: unit 1, 0 absorbing."""
    carrier = FinSet([0, 1])
    return Monoid(carrier, {(a, b): a * b for a in carrier for b in carrier}, 1, name="{0,1}")


@pytest.fixture
def ass3():
    return ass(3)


@pytest.fixture
def com3():
    return com(3)


@pytest.fixture
def data_dir():
    return os.path.join(os.path.dirname(os.path.dirname(__file__)), "data")
