import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from losbw.geometry import ArrayConfig


@pytest.fixture(scope="session")
def cfg():
    """The desk-scale array pair used throughout the case study."""
    return ArrayConfig(1000.0, 20.0)
