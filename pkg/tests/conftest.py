import pytest

from entwit.graphs import build_chain, build_lattice


@pytest.fixture(autouse=True)
def log_dir(tmp_path, monkeypatch):
    path = tmp_path / "logs"
    monkeypatch.setenv("ENTWIT_LOG_DIR", str(path))
    return path


@pytest.fixture
def chain6():
    return build_chain(6)


@pytest.fixture
def lattice4x4():
    return build_lattice(4, 4)
