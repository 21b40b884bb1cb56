import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vmreassign.instance import tiny1 as _tiny1  # noqa: E402

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


@pytest.fixture
def tiny1():
    return _tiny1()


@pytest.fixture
def instances_dir():
    return INSTANCES
