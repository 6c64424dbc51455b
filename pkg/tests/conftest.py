from __future__ import annotations

from pathlib import Path

import pytest

GOLDEN_DIR = Path(__file__).parent / "golden"
FIXTURE_DIR = Path(__file__).parent / "fixtures"


def golden_paths() -> list[Path]:
    paths = sorted(GOLDEN_DIR.glob("*.v"))
    assert paths, "golden corpus is missing"
    return paths


@pytest.fixture(scope="session")
def golden_sources() -> dict[str, str]:
    return {p.name: p.read_text(encoding="utf-8") for p in golden_paths()}


@pytest.fixture(params=[p.name for p in golden_paths()])
def golden_source(request, golden_sources) -> str:
    """One golden file's source text; parametrized over the whole corpus."""
    return golden_sources[request.param]


@pytest.fixture(scope="session")
def reordered_pair() -> tuple[str, str]:
    left = (FIXTURE_DIR / "reordered_left.v").read_text(encoding="utf-8")
    right = (FIXTURE_DIR / "reordered_right.v").read_text(encoding="utf-8")
    return left, right
