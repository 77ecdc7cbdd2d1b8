import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from gtl import catalog  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def cat():
    cache = {}

    def load(name):
        if name not in cache:
            cache[name] = catalog.get(name)
        return cache[name]

    return load
