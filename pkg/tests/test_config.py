import pytest
import yaml

from polfock.config import (BASE, PRESETS, SCENARIOS, dump_config, load_config,
                            parse_channel, parse_override)
from polfock.errors import ConfigError
from polfock.hamiltonian import BasisKind, Variant
from polfock.units import ev_to_hartree


@pytest.mark.parametrize("scenario", SCENARIOS)
def test_presets_validate(scenario):
    cfg = load_config(scenario)
    assert cfg.scenario == scenario
    assert cfg.omega_c == pytest.approx(ev_to_hartree(cfg.omega_ev))
    assert set(PRESETS[scenario]) <= set(BASE)


def test_dissociation_preset():
    cfg = load_config("dissociation")
    assert cfg.chi_values == (0.0, 0.004, 0.007, 0.01)
    assert cfg.omega_ev == 7.5
    assert cfg.initial_state.state == 1 and cfg.initial_state.channel is None
    assert cfg.propagation.n_steps == 8000 and cfg.propagation.stride == 50


def test_overrides_are_typed():
    cfg = load_config("downconversion", overrides=["cavity.chi=[0.002, 0.004]",
                                                   "basis.kind=diabatic-fock",
                                                   "basis.n_fock=20",
                                                   "propagation.derivative_couplings=true"])
    assert cfg.chi_values == (0.002, 0.004)
    assert cfg.basis_kind is BasisKind.DIABATIC_FOCK
    assert cfg.propagation.derivative_couplings is True


def test_parse_override():
    assert parse_override("a.b.c=3") == {"a": {"b": {"c": 3}}}
    with pytest.raises(ConfigError):
        parse_override("nothing")
    with pytest.raises(ConfigError):
        parse_override("=1")


@pytest.mark.parametrize("label,expected", [("C0", (1, 0)), ("I,3", (0, 3)), ("i 12", (0, 12))])
def test_parse_channel(label, expected):
    assert parse_channel(label) == expected


def test_parse_channel_rejects_junk():
    with pytest.raises(ConfigError, match="initial_state.channel"):
        parse_channel("X1")


@pytest.mark.parametrize("override,path", [
    ("grid.n_points=1000", "grid.n_points"),
    ("cavity.chi=-0.1", "cavity.chi"),
    ("cavity.omega_ev=0", "cavity.omega_ev"),
    ("basis.kind=adiabatic-fock", "basis.kind"),
    ("variant=rabi", "basis.kind"),
    ("propagation.t_final=4000.3", "propagation.t_final"),
    ("initial_state.state=3", "initial_state"),
    ("grid.r_max=80", "grid"),
    ("model.name=nope", "model.name"),
    ("cavity.colour=red", "cavity.colour"),
    ("initial_state.channel=C9", "initial_state.channel"),
])
def test_errors_name_the_field(override, path):
    with pytest.raises(ConfigError) as info:
        load_config("downconversion", overrides=[override])
    assert info.value.path == path
    assert str(info.value).startswith(path + ": ")


def test_rabi_allowed_in_adiabatic_basis_for_surfaces():
    cfg = load_config("surfaces", overrides=["variant=rabi", "basis.kind=adiabatic-fock"])
    assert cfg.variant is Variant.RABI


def test_file_then_overrides(tmp_path):
    p = tmp_path / "run.yaml"
    p.write_text("cavity:\n  chi: 0.003\nbasis:\n  n_fock: 10\n")
    cfg = load_config("downconversion", p, ["basis.n_fock=12"])
    assert cfg.chi_values == (0.003,)
    assert cfg.n_fock == 12


def test_bad_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config("surfaces", tmp_path / "missing.yaml")
    p = tmp_path / "list.yaml"
    p.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_config("surfaces", p)
    p.write_text("cavity: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config("surfaces", p)


@pytest.mark.parametrize("scenario", SCENARIOS)
def test_dump_round_trip(scenario):
    cfg = load_config(scenario, overrides=["model.parameters.b_coupling=0.1"])
    again = load_config(scenario, data=yaml.safe_load(dump_config(cfg)))
    assert again == cfg
    assert again.model().parameters["b_coupling"] == 0.1


def test_unknown_scenario():
    with pytest.raises(ConfigError):
        load_config("nope")
