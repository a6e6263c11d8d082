import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
FIXTURES = TESTS_DIR / "fixtures"

# Shared helpers (docgen, mutations) live next to the tests.
sys.path.insert(0, str(TESTS_DIR))

from contribkit import ingest


def load_fixture(relative: str) -> bytes:
    return (FIXTURES / relative).read_bytes()


def parse_fixture(relative: str) -> ingest.ParseResult:
    return ingest.parse_document(load_fixture(relative))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
