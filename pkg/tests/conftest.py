"""Shared fixtures."""

import numpy as np
import pytest
from hypothesis import settings

from physics.field_tensor import Coupling, FieldTensor, UniformFieldMap

# Numerical examples are slow on the first call (numpy warm-up)
settings.register_profile("lorentz", deadline=None, max_examples=50)
settings.load_profile("lorentz")


@pytest.fixture
def unit_coupling() -> Coupling:
    return Coupling(1.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def free_map() -> UniformFieldMap:
    return UniformFieldMap(FieldTensor.zero())


@pytest.fixture
def crossed_map() -> UniformFieldMap:
    return UniformFieldMap(FieldTensor((0.3, 0.0, 0.0), (0.0, 0.0, 1.0)))


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Auto-named outputs land in a per-test directory."""
    target = tmp_path / "out"
    monkeypatch.setenv("LORENTZ_LAB_OUTPUT_DIR", str(target))
    return target
