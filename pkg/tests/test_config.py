"""Tests de la lectura y validación de configuraciones."""

import json
import math
from pathlib import Path

import pytest

from src.config import apply_overrides, load_config, parse_config, sweep_configs, validate_config_text
from src.errors import ConfigError, JSONSyntaxError
from src.models import Command
from src.utils import config_hash

SIMULATE = {
    'command': 'simulate',
    'sim': {'chi': 1.0, 'mass': 2.0, 'initial': {'kind': 'gaussian', 's': 0.5}},
}


def _text(data):
    return json.dumps(data)


class TestParseSimulate:
    """Bloque de simulación."""

    def test_defaults_filled(self):
        config = parse_config(_text(SIMULATE))
        assert config.command == Command.SIMULATE
        assert config.output == "output"
        assert config.sim.rho_max == 12.0
        assert config.sim.n_cells == 1024
        assert config.sim.seed == 0
        assert config.resolved['sim']['dt_policy']['dt_max'] == 1e-3
        assert config.resolved['tolerances']['mass_rel'] == 1e-12

    def test_hash_ignores_key_order(self):
        reordered = {'sim': {'initial': {'s': 0.5, 'kind': 'gaussian'}, 'mass': 2.0, 'chi': 1.0},
                     'command': 'simulate'}
        a = parse_config(_text(SIMULATE))
        b = parse_config(_text(reordered))
        assert config_hash(a.resolved) == config_hash(b.resolved)

    def test_explicit_defaults_hash_like_omitted(self):
        explicit = json.loads(_text(SIMULATE))
        explicit['sim']['n_cells'] = 1024
        assert config_hash(parse_config(_text(explicit)).resolved) == \
            config_hash(parse_config(_text(SIMULATE)).resolved)

    def test_missing_chi_named(self):
        data = {'command': 'simulate', 'sim': {'mass': 2.0, 'initial': {'s': 0.5}}}
        with pytest.raises(ConfigError) as exc:
            parse_config(_text(data))
        assert any("sim.chi" in e for e in exc.value.errors)

    def test_errors_accumulate(self):
        data = {'command': 'simulate', 'extra': 1,
                'sim': {'mass': -1.0, 'n_cells': 'x', 'initial': {'kind': 'gaussian'}}}
        with pytest.raises(ConfigError) as exc:
            parse_config(_text(data))
        errors = exc.value.errors
        assert len(errors) >= 4
        assert any(e.startswith("extra") for e in errors)
        assert any("sim.n_cells" in e for e in errors)
        assert any("sim.initial" in e for e in errors)

    def test_unknown_sim_key_rejected(self):
        data = json.loads(_text(SIMULATE))
        data['sim']['viscosity'] = 1.0
        with pytest.raises(ConfigError) as exc:
            parse_config(_text(data))
        assert exc.value.errors == ["sim.viscosity: clave desconocida"]

    def test_semantic_sim_errors(self):
        data = json.loads(_text(SIMULATE))
        data['sim']['n_cells'] = 8
        with pytest.raises(ConfigError):
            parse_config(_text(data))

    @pytest.mark.parametrize("initial", [
        {'kind': 'annulus', 'a': 1.0, 'b': 0.5},
        {'kind': 'annulus', 'a': 0.5},
        {'kind': 'gaussian', 's': -1.0},
        {'kind': 'mixture', 'components': [{'s': 0.5}], 'weights': [1.0, 2.0]},
        {'kind': 'delta'},
    ])
    def test_invalid_initial(self, initial):
        data = {'command': 'simulate', 'sim': {'chi': 1.0, 'mass': 2.0, 'initial': initial}}
        with pytest.raises(ConfigError):
            parse_config(_text(data))

    def test_mixture_accepted(self):
        initial = {'kind': 'mixture', 'components': [{'s': 0.5}, {'kind': 'annulus', 'a': 0.2, 'b': 1.0}],
                   'weights': [1.0, 1.0]}
        data = {'command': 'simulate', 'sim': {'chi': 1.0, 'mass': 2.0, 'initial': initial}}
        config = parse_config(_text(data))
        assert len(config.sim.initial.components) == 2


class TestSyntaxAndCommand:
    """Errores de forma del documento."""

    def test_json_syntax_error_has_line(self):
        text = '{\n  "command": "simulate",\n  "sim": {\n}'
        with pytest.raises(JSONSyntaxError) as exc:
            parse_config(text)
        assert exc.value.line == 4

    def test_not_an_object(self):
        with pytest.raises(ConfigError):
            parse_config("[1, 2]")

    def test_unknown_command(self):
        with pytest.raises(ConfigError) as exc:
            parse_config(_text({'command': 'plot'}))
        assert exc.value.errors[0].startswith("command:")

    def test_missing_block_for_command(self):
        with pytest.raises(ConfigError) as exc:
            parse_config(_text({'command': 'sweep'}))
        assert any(e.startswith("sweep:") for e in exc.value.errors)

    def test_negative_tolerance_rejected(self):
        data = dict(SIMULATE, tolerances={'virial_rel': -1.0})
        with pytest.raises(ConfigError):
            parse_config(_text(data))

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_config(tmp_path / "nope.json")

    def test_load_from_file(self, write_config):
        config = load_config(write_config(SIMULATE))
        assert config.sim.mass == 2.0


class TestOtherBlocks:
    """Barridos, batería de desigualdades y cotas."""

    def test_sweep_product(self):
        data = {'command': 'sweep',
                'sweep': {'chi': [1.0], 'mass': [2.0, 4.0, 8.0], 'p_moment': [1.0, 5.0, 10.0],
                          'base': {'n_cells': 64, 'rho_max': 6.0}}}
        config = parse_config(_text(data))
        cells = sweep_configs(config.sweep)
        assert len(cells) == 9
        assert [c.mass for c in cells[:3]] == [2.0, 2.0, 2.0]
        assert [c.initial.p_moment for c in cells[:3]] == [1.0, 5.0, 10.0]
        assert all(c.n_cells == 64 for c in cells)

    def test_sweep_rejects_bad_axes(self):
        data = {'command': 'sweep', 'sweep': {'chi': [-1.0], 'mass': [], 'p_moment': [1.0]}}
        with pytest.raises(ConfigError) as exc:
            parse_config(_text(data))
        assert len(exc.value.errors) == 2

    def test_inequalities_defaults(self):
        config = parse_config(_text({'command': 'inequalities'}))
        assert config.inequalities.n_densities == 50
        assert config.inequalities.lambdas == [0.5, 1.0, 1.5]
        assert config.inequalities.ops

    @pytest.mark.parametrize("block", [
        {'ops': ['nope']},
        {'samples': 10},
        {'lambdas': [2.0]},
        {'n_densities': 0},
    ])
    def test_inequalities_invalid(self, block):
        with pytest.raises(ConfigError):
            parse_config(_text({'command': 'inequalities', 'inequalities': block}))

    def test_bounds_block(self):
        data = {'command': 'bounds',
                'bounds': [{'chi': 1.0, 'mass': 16 * math.pi, 'p_moment': 10.0},
                           {'chi': 1.0, 'mass': 4 * math.pi, 'p_moment': 1.0}]}
        config = parse_config(_text(data))
        assert [b.mass for b in config.bounds] == [16 * math.pi, 4 * math.pi]

    def test_bounds_missing_field(self):
        data = {'command': 'bounds', 'bounds': [{'chi': 1.0, 'mass': 1.0}]}
        with pytest.raises(ConfigError) as exc:
            parse_config(_text(data))
        assert exc.value.errors == ["bounds[0].p_moment: campo obligatorio"]


class TestHelpers:
    """Validación sin excepciones y overrides."""

    def test_validate_text(self):
        ok, message = validate_config_text(_text(SIMULATE))
        assert ok
        assert "simulate" in message
        ok, message = validate_config_text("{")
        assert not ok
        assert "línea" in message

    def test_overrides(self):
        config = apply_overrides(parse_config(_text(SIMULATE)), output="out2", seed=7)
        assert config.output == "out2"
        assert config.sim.seed == 7
        assert config.resolved['sim']['seed'] == 7

    def test_override_changes_hash(self):
        base = parse_config(_text(SIMULATE))
        before = config_hash(base.resolved)
        after = config_hash(apply_overrides(parse_config(_text(SIMULATE)), seed=3).resolved)
        assert before != after

    def test_seed_out_of_range(self):
        with pytest.raises(ConfigError):
            apply_overrides(parse_config(_text(SIMULATE)), seed=-1)


CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.mark.parametrize("name", ["simulate.json", "blowup.json", "sweep.json", "bounds.json",
                                  "inequalities.json"])
def test_shipped_configs_are_valid(name):
    config = load_config(CONFIG_DIR / name)
    assert config.output.startswith("output/")
