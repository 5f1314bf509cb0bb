import math
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lorentz_lib.errors import ConfigurationError, ScenarioParseError
from lorentz_lib.scenario import Scenario, load_scenario, parse_scenario, render_scenario
from physics.dynamics import Stepper, integrate
from physics.field_tensor import (
    FieldMapKind,
    GradientBFieldMap,
    MagneticBottleFieldMap,
    UniformFieldMap,
)

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

MINIMAL = """\
# minimal run
name = minimal
k = 1.0
E = 0, 0, 0
B = 0, 0, 1   # along axis 3
x0 = 0, 0, 0, 0
u0_spatial = 3, 0, 0
dt = 0.01
n_steps = 10
stepper = EXACT
"""


def _replace(text: str, key: str, line: str) -> str:
    lines = [line if raw.split("=")[0].strip() == key else raw for raw in text.splitlines()]
    return "\n".join(lines) + "\n"


def _without(text: str, key: str) -> str:
    return "\n".join(
        raw for raw in text.splitlines() if raw.split("=")[0].strip() != key
    ) + "\n"


def test_parse_minimal_document():
    scenario = parse_scenario(MINIMAL)
    assert scenario.name == "minimal"
    assert scenario.B == (0.0, 0.0, 1.0)
    assert scenario.x0 == (0.0, 0.0, 0.0, 0.0)
    assert scenario.n_steps == 10
    assert scenario.stepper is Stepper.EXACT
    assert scenario.field_map == "uniform"
    assert scenario.output_stride == 1
    assert scenario.gradient is None


def test_initial_four_velocity_is_completed_on_the_mass_shell():
    u0 = parse_scenario(MINIMAL).u0
    assert u0.c0 == pytest.approx(math.sqrt(10.0), rel=1e-15)
    assert u0.spatial == (3.0, 0.0, 0.0)


def test_largest_accepted_four_velocity_integrates():
    scenario = parse_scenario(_replace(MINIMAL, "u0_spatial", "u0_spatial = 10000, 0, 0"))
    trajectory = integrate(
        scenario.x0_vector,
        scenario.u0,
        scenario.build_field_map(),
        scenario.coupling,
        scenario.dt,
        scenario.n_steps,
        scenario.stepper,
    )
    assert len(trajectory) == scenario.n_steps + 1


@pytest.mark.parametrize("value", ["6000, 6000, 6000", "10000.5, 0, 0", "1e200, 0, 0"])
def test_four_velocity_beyond_the_integrable_limit_is_rejected(value):
    with pytest.raises(ScenarioParseError, match="integrable limit") as excinfo:
        parse_scenario(_replace(MINIMAL, "u0_spatial", f"u0_spatial = {value}"))
    assert excinfo.value.key == "u0_spatial"


def test_zero_dt_is_rejected():
    with pytest.raises(ScenarioParseError, match="dt must be positive") as excinfo:
        parse_scenario(_replace(MINIMAL, "dt", "dt = 0"))
    assert excinfo.value.key == "dt"


@pytest.mark.parametrize(
    "key, line",
    [
        ("n_steps", "n_steps = 0"),
        ("n_steps", "n_steps = 2.5"),
        ("k", "k = fast"),
        ("k", "k = nan"),
        ("x0", "x0 = 0, 0, 0"),
        ("E", "E = 1, 2, three"),
        ("stepper", "stepper = EULER"),
        ("name", "name ="),
    ],
)
def test_bad_values_name_the_offending_key(key, line):
    with pytest.raises(ScenarioParseError) as excinfo:
        parse_scenario(_replace(MINIMAL, key, line))
    assert excinfo.value.key == key


@pytest.mark.parametrize("key", ["name", "k", "E", "B", "x0", "u0_spatial", "dt", "n_steps", "stepper"])
def test_missing_required_key(key):
    with pytest.raises(ScenarioParseError, match="missing required key") as excinfo:
        parse_scenario(_without(MINIMAL, key))
    assert excinfo.value.key == key


def test_unknown_and_duplicate_keys():
    with pytest.raises(ScenarioParseError, match="unknown key") as excinfo:
        parse_scenario(MINIMAL + "mass = 1\n")
    assert excinfo.value.key == "mass"

    with pytest.raises(ScenarioParseError, match="duplicate key") as excinfo:
        parse_scenario(MINIMAL + "k = 2.0\n")
    assert excinfo.value.key == "k"


def test_line_without_equals_sign():
    with pytest.raises(ScenarioParseError, match="line 11"):
        parse_scenario(MINIMAL + "just some words\n")


def test_stepper_names_are_case_insensitive():
    scenario = parse_scenario(_replace(MINIMAL, "stepper", "stepper = rk4_renorm"))
    assert scenario.stepper is Stepper.RK4_RENORM


def test_exact_stepper_needs_uniform_field():
    text = MINIMAL + "field_map = gradient_b\ngradient = 0.1\n"
    with pytest.raises(ConfigurationError) as excinfo:
        parse_scenario(text)
    assert not isinstance(excinfo.value, ScenarioParseError)


def test_field_map_parameters_are_required():
    text = _replace(MINIMAL, "stepper", "stepper = RK4") + "field_map = gradient_b\n"
    with pytest.raises(ScenarioParseError) as excinfo:
        parse_scenario(text)
    assert excinfo.value.key == "gradient"


def test_unknown_field_map():
    with pytest.raises(ScenarioParseError) as excinfo:
        parse_scenario(MINIMAL + "field_map = dipole\n")
    assert excinfo.value.key == "field_map"


def test_bottle_length_must_be_positive():
    text = _replace(MINIMAL, "stepper", "stepper = RK4") + (
        "field_map = magnetic_bottle\nbottle_length = -1\n"
    )
    with pytest.raises(ScenarioParseError) as excinfo:
        parse_scenario(text)
    assert excinfo.value.key == "bottle_length"


def test_build_field_map_from_scenario():
    uniform = parse_scenario(MINIMAL).build_field_map()
    assert isinstance(uniform, UniformFieldMap)
    assert uniform.kind is FieldMapKind.UNIFORM

    gradient = parse_scenario(
        _replace(MINIMAL, "stepper", "stepper = RK4") + "field_map = gradient_b\ngradient = 0.25\n"
    ).build_field_map()
    assert isinstance(gradient, GradientBFieldMap)
    assert gradient.gradient == 0.25


finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
positive = st.floats(min_value=1e-6, max_value=10.0)


@st.composite
def scenarios(draw: st.DrawFn) -> Scenario:
    field_map = draw(st.sampled_from(["uniform", "gradient_b", "magnetic_bottle"]))
    steppers = list(Stepper) if field_map == "uniform" else [Stepper.RK4, Stepper.RK4_RENORM]
    return Scenario(
        name=draw(st.from_regex(r"[a-z][a-z0-9_]{0,15}", fullmatch=True)),
        k=draw(finite),
        E=tuple(draw(finite) for _ in range(3)),
        B=tuple(draw(finite) for _ in range(3)),
        x0=tuple(draw(finite) for _ in range(4)),
        u0_spatial=tuple(draw(finite) for _ in range(3)),
        dt=draw(positive),
        n_steps=draw(st.integers(min_value=1, max_value=10**7)),
        stepper=draw(st.sampled_from(steppers)),
        field_map=field_map,
        output_stride=draw(st.integers(min_value=1, max_value=1000)),
        gradient=draw(finite) if field_map == "gradient_b" else None,
        bottle_length=draw(positive) if field_map == "magnetic_bottle" else None,
    )


@given(scenario=scenarios())
def test_render_then_parse_gives_the_same_scenario(scenario):
    assert parse_scenario(render_scenario(scenario)) == scenario


def test_load_scenario_reads_file(tmp_path):
    path = tmp_path / "run.scn"
    path.write_text(MINIMAL, encoding="utf-8")
    assert load_scenario(path) == parse_scenario(MINIMAL)


def test_load_missing_scenario_is_a_configuration_error(tmp_path):
    with pytest.raises(ConfigurationError, match="cannot read scenario file"):
        load_scenario(tmp_path / "absent.scn")


@pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.scn")), ids=lambda p: p.stem)
def test_bundled_scenarios_parse(path):
    scenario = load_scenario(path)
    assert scenario.name == path.stem
    field_map = scenario.build_field_map()
    if scenario.field_map == "magnetic_bottle":
        assert isinstance(field_map, MagneticBottleFieldMap)
