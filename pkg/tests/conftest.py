import functools

import pytest

from kummerf.cli import resolve_spec
from kummerf.structure import build_model, load_spec
from kummerf.verify import verify


@functools.lru_cache(maxsize=None)
def bundled(name):
    return load_spec(resolve_spec(name))


@functools.lru_cache(maxsize=None)
def report_for(name):
    return verify(bundled(name))


@functools.lru_cache(maxsize=None)
def model_for(name):
    return build_model(bundled(name))


@pytest.fixture
def spec_of():
    return bundled


@pytest.fixture
def report_of():
    return report_for


@pytest.fixture
def model_of():
    return model_for
