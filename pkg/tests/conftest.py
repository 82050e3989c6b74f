import json
from pathlib import Path

import pytest

from slidegen.docmodel import ingest_deck, ingest_paper

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def manifest():
    return json.loads((FIXTURES / "manifest.json").read_text())


@pytest.fixture(scope="session")
def paper_bytes():
    return (FIXTURES / "sample_paper.json").read_bytes()


@pytest.fixture(scope="session")
def deck_bytes():
    return (FIXTURES / "sample_deck.json").read_bytes()


@pytest.fixture(scope="session")
def paper(paper_bytes):
    return ingest_paper(paper_bytes)


@pytest.fixture(scope="session")
def deck(deck_bytes):
    return ingest_deck(deck_bytes)
