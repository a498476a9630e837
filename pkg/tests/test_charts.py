"""Tests de los constructores de gráficos y utilidades de formato."""

import math

import pandas as pd
import plotly.graph_objects as go
import pytest

from src.charts import (
    create_deficit_chart, create_entropy_chart, create_flag_bars, create_norms_chart,
    create_phase_diagram, create_virial_chart
)
from src.utils import config_hash, format_metric, stable_hash, to_jsonable

BUILDERS = [
    create_virial_chart, create_entropy_chart, create_norms_chart, create_flag_bars,
    create_phase_diagram, create_deficit_chart
]


@pytest.fixture
def series_df():
    return pd.DataFrame({
        't': [0.0, 0.1, 0.2],
        'mass': [1.0, 1.0, 1.0],
        'p_moment': [1.0, 1.3, 1.7],
        'entropy': [-1.0, -1.2, -1.3],
        'free_energy': [-1.0, -1.25, -1.4],
        'lq_1.5': [0.5, 0.4, 0.35],
        'linf': [0.3, 0.2, 0.15],
        'envelope_rhs': [4.0, 5.0, 6.2],
        'p_bound': [2.0, 2.5, 3.0],
        'ent_lower': [-3.0, -3.2, -3.4],
        'ent_upper': [float('nan')] * 3,
        'flags': ['ok', 'rho_bound', 'rho_bound;ent_decay'],
    })


class TestBuilders:
    """Todos devuelven None sin datos."""

    @pytest.mark.parametrize("builder", BUILDERS)
    def test_none_and_empty(self, builder):
        assert builder(None) is None
        assert builder(pd.DataFrame()) is None

    def test_series_charts(self, series_df):
        for builder in (create_virial_chart, create_entropy_chart, create_norms_chart):
            assert isinstance(builder(series_df), go.Figure)

    def test_entropy_chart_skips_empty_bounds(self, series_df):
        fig = create_entropy_chart(series_df)
        names = {trace.name for trace in fig.data}
        assert 'Cota inferior' in names
        assert 'Cota superior' not in names

    def test_flag_counts(self, series_df):
        fig = create_flag_bars(series_df)
        counts = dict(zip(fig.data[0].x, fig.data[0].y))
        assert counts['rho_bound'] == 2
        assert counts['ent_decay'] == 1
        assert counts['mass'] == 0

    def test_phase_diagram(self):
        df = pd.DataFrame({
            'chi': [1.0, 1.0], 'mass': [4 * math.pi, 16 * math.pi],
            'chi_mass': [4 * math.pi, 16 * math.pi], 'p_moment': [10.0, 10.0],
            'lambda_star': [-4.0, 20.8], 'regime': ['subcritical', 'blowup_condition'],
            't_bl': [float('nan'), 0.144], 'outcome': ['completed', None],
            'blowup_time': [float('nan'), float('nan')],
        })
        assert isinstance(create_phase_diagram(df), go.Figure)

    def test_deficit_chart(self):
        df = pd.DataFrame({'op': ['a', 'b'], 'label': ['f', 'g'], 'deficit': [0.1, -2.0],
                           'mc_error': [0.0, 0.01], 'passed': [True, False]})
        assert isinstance(create_deficit_chart(df), go.Figure)


class TestUtils:
    """Hashes y formato."""

    def test_hash_ignores_key_order(self):
        assert config_hash({'a': 1, 'b': [1.0, 2.0]}) == config_hash({'b': [1.0, 2.0], 'a': 1})
        assert config_hash({'a': 1}) != config_hash({'a': 2})

    def test_stable_hash_is_32_bits(self):
        value = stable_hash("log_hls_deficit")
        assert 0 <= value < 2 ** 32
        assert value == stable_hash("log_hls_deficit")

    def test_float_keys(self):
        assert to_jsonable({1.5: 2.0, 2.0: 3.0}) == {'1.5': 2.0, '2': 3.0}

    @pytest.mark.parametrize("value, text", [
        (None, "—"),
        (float('nan'), "—"),
        (0.0, "0.0000"),
        (0.14377, "0.1438"),
        (2.5e-5, "2.500e-05"),
    ])
    def test_format_metric(self, value, text):
        assert format_metric(value) == text
