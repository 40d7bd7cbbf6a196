import os
import sys
from pathlib import Path

import pytest

# Ensure project root (parent of tests) is on sys.path before importing app
ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from app import create_app  # noqa: E402

FIXTURES = Path(ROOT) / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


class TestConfig:
    TESTING = True
    THREADS = 2
    LOG_LEVEL = "DEBUG"


@pytest.fixture()
def app():
    flask_app = create_app(TestConfig)
    with flask_app.app_context():
        yield flask_app


@pytest.fixture()
def runner(app):
    return app.test_cli_runner()


@pytest.fixture()
def fixtures_dir():
    return FIXTURES


@pytest.fixture()
def dimer_paths():
    return {
        "hole": FIXTURES / "cubes" / "dimer_hole.cube",
        "particle": FIXTURES / "cubes" / "dimer_particle.cube",
        "groups": FIXTURES / "groups" / "dimer.json",
    }


@pytest.fixture()
def charges_dir():
    return FIXTURES / "charges"


@pytest.fixture()
def synthetic_paths():
    """Pares sintéticos versionados em fixtures/synthetic/ (ver scripts/generate_fixtures.py)."""

    def paths(name: str) -> dict:
        base = FIXTURES / "synthetic"
        return {
            "hole": base / f"{name}_hole.cube",
            "particle": base / f"{name}_particle.cube",
            "groups": base / f"{name}_groups.json",
        }

    return paths


def assert_golden(name: str, data: bytes) -> None:
    """Compara com tests/golden/<name> (versionado).

    NTX_UPDATE_GOLDEN=1 regrava o arquivo; revise o diff antes de versionar.
    """
    path = GOLDEN / name
    if os.environ.get("NTX_UPDATE_GOLDEN") == "1":
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    if not path.exists():
        pytest.fail(f"tests/golden/{name} ausente; gere com NTX_UPDATE_GOLDEN=1 e versione")
    assert data == path.read_bytes(), f"saída difere de tests/golden/{name}"


@pytest.fixture()
def golden():
    return assert_golden
