import pathlib

import pytest

TESTS_DIR = pathlib.Path(__file__).parent
CORPUS_DIR = TESTS_DIR / "corpus"
GOLDEN_DIR = TESTS_DIR / "golden"
DATA_DIR = TESTS_DIR / "data"


def corpus_source(name: str) -> bytes:
    return (CORPUS_DIR / name).read_bytes()


@pytest.fixture
def corpus_dir() -> pathlib.Path:
    return CORPUS_DIR


@pytest.fixture
def golden_dir() -> pathlib.Path:
    return GOLDEN_DIR


@pytest.fixture
def data_dir() -> pathlib.Path:
    return DATA_DIR
