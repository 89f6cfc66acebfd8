# tests/conftest.py
from pathlib import Path

import pytest

from provcalc.calculus.syntax import parse_process, parse_triples
from provcalc.calculus.terms import Process
from provcalc.config import Settings

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def load(name: str) -> Process:
    text = (FIXTURES / name).read_text(encoding="utf-8")
    return parse_triples(text) if name.endswith(".nt") else parse_process(text)


def p(text: str) -> Process:
    return parse_process(text)


@pytest.fixture
def config() -> Settings:
    return Settings(_env_file=None)


@pytest.fixture
def turner_init() -> Process:
    return load("turner_init.proc")


@pytest.fixture
def turner_mid() -> Process:
    return load("turner_mid.proc")


@pytest.fixture
def turner_final() -> Process:
    return load("turner_final.proc")


@pytest.fixture
def baltic() -> Process:
    return load("baltic.proc")


@pytest.fixture
def baltic_final() -> Process:
    return load("baltic_final.proc")


@pytest.fixture
def sage_baltic():
    return (
        load("sage_baltic_init.proc"),
        load("sage_baltic_indep.proc"),
        load("sage_baltic_joint.proc"),
    )


@pytest.fixture(autouse=True)
def _isolated_environment(monkeypatch):
    for key in ("PROVCALC_SEED", "PROVCALC_MAX_STATES", "PROVCALC_STRATEGY", "PROVCALC_UNIVERSE_EXTRAS"):
        monkeypatch.delenv(key, raising=False)
