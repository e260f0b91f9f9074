from pathlib import Path

import pytest

from popmatch.instance import add_last_resorts, parse_instance, parse_matching

FIXTURES = Path(__file__).parent / "fixtures"


def load(name, augment=True):
    inst = parse_instance((FIXTURES / f"{name}.txt").read_bytes())
    if augment and inst.variant.one_sided:
        inst = add_last_resorts(inst)
    return inst


def mt(inst, text):
    return parse_matching(inst, text)


def v(inst, name):
    return inst.vertex(name)


@pytest.fixture
def i1():
    return load("i1")


@pytest.fixture
def i2():
    return load("i2")


@pytest.fixture
def i3():
    return load("i3")


@pytest.fixture
def i4():
    return load("i4")


@pytest.fixture
def fixtures_dir():
    return FIXTURES
