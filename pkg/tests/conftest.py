import sys

import pytest


@pytest.fixture
def switch_interval():
    """Set the GIL switch interval for a test and restore it afterwards."""
    old = sys.getswitchinterval()

    def set_interval(value: float) -> None:
        sys.setswitchinterval(value)

    yield set_interval
    sys.setswitchinterval(old)
