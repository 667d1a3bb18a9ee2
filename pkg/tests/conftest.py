from __future__ import annotations

from pathlib import Path

import pytest

from mad.prompts import load_prompt_assets

REPO = Path(__file__).resolve().parents[1]
FIXTURES = REPO / "fixtures"
PROMPTS = REPO / "prompts"


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def assets():
    return load_prompt_assets(PROMPTS)


@pytest.fixture(scope="session")
def corpus_modules() -> list[Path]:
    dirs = sorted(d for d in (FIXTURES / "corpus").iterdir() if d.is_dir())
    assert len(dirs) == 30
    return dirs
