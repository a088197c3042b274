from pathlib import Path

import pytest

from analysis.cmd_graph import build_cmd, method_node
from dsl.model_parser import parse_model
from dsl.trace_parser import parse_traces

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load_model(name: str):
    path = fixture_path(name)
    return parse_model(path.read_text(encoding="utf-8"), model_id=path.stem, file=str(path))


def load_traces(name: str, model=None):
    path = fixture_path(name)
    return parse_traces(path.read_text(encoding="utf-8"), model=model, file=str(path))


def m(qualified: str):
    """Method node from 'Class.selector'."""
    class_name, selector = qualified.split(".", 1)
    return method_node(class_name, selector)


@pytest.fixture
def fig5_model():
    return load_model("fig5.mdl")


@pytest.fixture
def fig5_cmd(fig5_model):
    return build_cmd(fig5_model)


@pytest.fixture
def fig5_traces(fig5_model):
    return load_traces("fig5.trc", fig5_model)


@pytest.fixture
def mediator_model():
    return load_model("mediator.mdl")


@pytest.fixture
def mediator_v2_model():
    return load_model("mediator_v2.mdl")


@pytest.fixture
def mediator_cmd(mediator_model):
    return build_cmd(mediator_model)


@pytest.fixture
def mediator_traces(mediator_model):
    return load_traces("mediator.trc", mediator_model)


@pytest.fixture
def vending_model():
    return load_model("vending.mdl")
