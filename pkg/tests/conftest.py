from __future__ import annotations

from pathlib import Path

import pytest

from focalviz.model import NarrativeDocument
from focalviz.store import load_story

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def stories_dir() -> Path:
    return FIXTURES / "stories"


@pytest.fixture(scope="session")
def wallpaper() -> NarrativeDocument:
    return load_story(FIXTURES / "stories" / "yellow-wallpaper.focal.json")


@pytest.fixture(scope="session")
def open_boat() -> NarrativeDocument:
    return load_story(FIXTURES / "stories" / "open-boat.focal.json")


@pytest.fixture(scope="session")
def unannotated_wallpaper() -> NarrativeDocument:
    return load_story(FIXTURES / "unannotated" / "yellow-wallpaper.focal.json")
