"""
Módulo de gráficos.
Genera visualizaciones con Plotly a partir de los artefactos de los experimentos.
"""

import math
from typing import List, Optional

import numpy as np
import pandas as pd
import plotly.express as px
import plotly.graph_objects as go

from .checks import FLAG_NAMES


def _has(df: Optional[pd.DataFrame], columns: List[str]) -> bool:
    return df is not None and not df.empty and all(c in df.columns for c in columns)


def _add_optional_line(fig: go.Figure, df: pd.DataFrame, column: str, name: str, dash: str):
    if column in df.columns and df[column].notna().any():
        fig.add_trace(go.Scatter(x=df['t'], y=df[column], name=name, mode='lines',
                                 line={'dash': dash}))


def create_virial_chart(df: Optional[pd.DataFrame], title: str = "Envolvente del virial") -> Optional[go.Figure]:
    """
    Compara (I(t) + M)^2 con la envolvente del virial y el momento p con su cota.

    Args:
        df: DataFrame de series.csv
        title: Título del gráfico

    Returns:
        Figura de Plotly o None si no hay datos
    """
    if not _has(df, ['t', 'mass', 'p_moment', 'envelope_rhs']):
        return None

    fig = go.Figure()
    fig.add_trace(go.Scatter(x=df['t'], y=(df['p_moment'] + df['mass']) ** 2,
                             name='(I + M)²', mode='lines+markers'))
    fig.add_trace(go.Scatter(x=df['t'], y=df['envelope_rhs'], name='Envolvente', mode='lines',
                             line={'dash': 'dash'}))
    if 'p_bound' in df.columns:
        fig.add_trace(go.Scatter(x=df['t'], y=(df['p_bound'] + df['mass']) ** 2,
                                 name='(C₊e²ᵗ + λ* + M)²', mode='lines', line={'dash': 'dot'}))

    fig.update_layout(
        title=title,
        xaxis_title='t',
        yaxis_title='Momento',
        yaxis_type='log',
        height=450
    )

    return fig


def create_entropy_chart(df: Optional[pd.DataFrame], title: str = "Entropía y cotas") -> Optional[go.Figure]:
    """
    Entropía frente a sus cotas inferior, superior y de decaimiento.

    Args:
        df: DataFrame de series.csv
        title: Título del gráfico

    Returns:
        Figura de Plotly o None si no hay datos
    """
    if not _has(df, ['t', 'entropy']):
        return None

    fig = go.Figure()
    fig.add_trace(go.Scatter(x=df['t'], y=df['entropy'], name='Ent(n)', mode='lines+markers'))
    _add_optional_line(fig, df, 'ent_lower', 'Cota inferior', 'dash')
    _add_optional_line(fig, df, 'ent_upper', 'Cota superior', 'dash')
    _add_optional_line(fig, df, 'ent_decay_linear', 'Decaimiento lineal', 'dot')
    _add_optional_line(fig, df, 'ent_decay_strong', 'Decaimiento fuerte', 'dot')
    if 'free_energy' in df.columns:
        fig.add_trace(go.Scatter(x=df['t'], y=df['free_energy'], name='F[n]', mode='lines'))

    fig.update_layout(title=title, xaxis_title='t', yaxis_title='Valor', height=450)

    return fig


def create_norms_chart(df: Optional[pd.DataFrame], title: str = "Normas Lᵠ") -> Optional[go.Figure]:
    """Normas L^q registradas y norma del supremo, en escala logarítmica."""
    if not _has(df, ['t', 'linf']):
        return None

    columns = [c for c in df.columns if c.startswith('lq_')] + ['linf']
    long_df = df.melt(id_vars='t', value_vars=columns, var_name='norma', value_name='valor')

    fig = px.line(
        long_df,
        x='t',
        y='valor',
        color='norma',
        title=title,
        labels={'t': 't', 'valor': '‖n‖', 'norma': 'Norma'},
        log_y=True
    )
    fig.update_layout(height=450)

    return fig


def create_flag_bars(df: Optional[pd.DataFrame]) -> Optional[go.Figure]:
    """
    Número de filas que violan cada comprobación.

    Returns:
        Figura de Plotly o None si no hay columna de flags
    """
    if not _has(df, ['flags']):
        return None

    counts = {name: 0 for name in FLAG_NAMES}
    for value in df['flags'].fillna('ok'):
        if value == 'ok':
            continue
        for name in str(value).split(';'):
            counts[name] = counts.get(name, 0) + 1

    fig = go.Figure(data=[go.Bar(
        x=list(counts.keys()),
        y=list(counts.values()),
        marker_color=['#dc3545' if v else '#28a745' for v in counts.values()]
    )])
    fig.update_layout(
        title='Violaciones por comprobación',
        xaxis_title='Comprobación',
        yaxis_title='Filas',
        xaxis_tickangle=-45,
        height=400
    )

    return fig


def create_phase_diagram(df: Optional[pd.DataFrame]) -> Optional[go.Figure]:
    """
    Diagrama de fases (chi M, I0): color por régimen predicho, símbolo por
    resultado observado, con la línea crítica chi M = 8 pi.
    """
    if not _has(df, ['chi_mass', 'p_moment', 'regime', 'outcome']):
        return None

    plot_df = df.copy()
    plot_df['outcome'] = plot_df['outcome'].fillna('error')
    fig = px.scatter(
        plot_df,
        x='chi_mass',
        y='p_moment',
        color='regime',
        symbol='outcome',
        hover_data=[c for c in ('chi', 'mass', 'lambda_star', 't_bl', 'blowup_time') if c in plot_df.columns],
        labels={'chi_mass': 'χM', 'p_moment': 'I₀', 'regime': 'Régimen', 'outcome': 'Resultado'},
        title='Diagrama de fases'
    )
    fig.add_vline(x=8 * math.pi, line_dash='dash', annotation_text='χM = 8π')
    fig.update_traces(marker={'size': 12})
    fig.update_layout(height=500)

    return fig


def create_deficit_chart(df: Optional[pd.DataFrame]) -> Optional[go.Figure]:
    """
    Déficits del banco por operación (escala simétrica logarítmica).

    Returns:
        Figura de Plotly o None si no hay datos
    """
    if not _has(df, ['op', 'deficit', 'passed']):
        return None

    plot_df = df.copy()
    plot_df['signed_log'] = np.sign(plot_df['deficit']) * np.log10(1.0 + np.abs(plot_df['deficit']))
    plot_df['estado'] = np.where(plot_df['passed'], 'cumple', 'falla')
    fig = px.strip(
        plot_df,
        x='op',
        y='signed_log',
        color='estado',
        hover_data=['label', 'deficit', 'mc_error'] if 'mc_error' in plot_df.columns else ['label', 'deficit'],
        labels={'op': 'Desigualdad', 'signed_log': 'sign·log₁₀(1 + |déficit|)', 'estado': 'Estado'},
        color_discrete_map={'cumple': '#28a745', 'falla': '#dc3545'},
        title='Déficits del banco de desigualdades'
    )
    fig.add_hline(y=0.0, line_dash='dot')
    fig.update_layout(xaxis_tickangle=-30, height=500)

    return fig
