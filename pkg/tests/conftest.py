import pytest

import progfree.progressions as progressions


@pytest.fixture(autouse=True, scope="session")
def crosscheck_differences():
    """Run the whole suite with the two difference routes checking each other."""
    progressions.CROSSCHECK_DELTA = True
    yield
    progressions.CROSSCHECK_DELTA = False


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Keep the solver cache out of the repository during tests."""
    monkeypatch.setenv("PROGFREE_CACHE", str(tmp_path / "cache.json"))
