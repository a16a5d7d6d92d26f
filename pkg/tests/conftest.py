from __future__ import annotations

from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = REPO_ROOT / "fixtures"

FIXTURE_NAMES = ("asserted", "balanced", "narrowstrong", "weakoracle")


@pytest.fixture
def fixtures_root() -> Path:
    return FIXTURES
