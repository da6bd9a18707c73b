import os
import pathlib

import pytest


@pytest.fixture
def root():
    env = os.environ.get("RSFQLOCK_SOURCE_DIR")
    return pathlib.Path(env) if env else pathlib.Path(__file__).resolve().parents[2]
