from pathlib import Path

import pytest

from syp import extract_sentences, parse_bpmn, script_sentences

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def bookstore_model():
    return parse_bpmn((FIXTURES / "bookstore.bpmn").read_bytes())


@pytest.fixture(scope="session")
def bookstore_sentences(bookstore_model):
    return extract_sentences(bookstore_model)


@pytest.fixture(scope="session")
def bookstore_sheet(bookstore_model, bookstore_sentences):
    return script_sentences(bookstore_model, bookstore_sentences, numbering="list")


@pytest.fixture(scope="session")
def big26_model():
    return parse_bpmn((FIXTURES / "big26.bpmn").read_bytes())


@pytest.fixture(scope="session")
def big26_gold(big26_model):
    return script_sentences(big26_model, extract_sentences(big26_model), numbering="dfs")
