import os
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def start_set_cache(tmp_path_factory):
    """Shared start-set cache for the whole test session.

    Point MVT_TEST_CACHE at a persistent directory to skip the monodromy
    builds on repeated runs.
    """
    env = os.environ.get("MVT_TEST_CACHE")
    if env:
        path = Path(env)
        path.mkdir(parents=True, exist_ok=True)
        return path
    return tmp_path_factory.mktemp("startsets")
