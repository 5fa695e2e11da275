import pytest


@pytest.fixture(autouse=True)
def isolated_env(tmp_path, monkeypatch):
    """Run every test in a scratch directory with a single worker thread."""
    monkeypatch.setenv("CSPI_THREADS", "1")
    monkeypatch.chdir(tmp_path)
    yield tmp_path
