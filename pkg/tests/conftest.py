import pytest

from congestion.diagram import build_diagram
from congestion.model import parse_model

from importlib import resources as importlib_resources


def load_fixture(name: str):
    ref = importlib_resources.files("congestion.fixtures") / f"{name}.toml"
    return parse_model(ref.read_text())


@pytest.fixture(scope="session")
def ed_reduced():
    return load_fixture("ed-reduced")


@pytest.fixture(scope="session")
def ed_full():
    return load_fixture("ed-full")


@pytest.fixture(scope="session")
def ems_b():
    return load_fixture("ems-b")


@pytest.fixture(scope="session")
def reduced_diagram(ed_reduced):
    return build_diagram(ed_reduced, jobs=2)


@pytest.fixture(scope="session")
def full_diagram_timed(ed_full):
    import time

    start = time.monotonic()
    diagram = build_diagram(ed_full, jobs=4)
    return diagram, time.monotonic() - start
