"""
Explorador de resultados del laboratorio de Keller-Segel hiperbólico.
Lee los artefactos que escribe la línea de comandos (series.csv,
summary.json, phase_diagram.csv, bounds.json, inequalities.csv) y los muestra.

Ejecutar con: streamlit run app.py
"""

from pathlib import Path

import pandas as pd
import streamlit as st

from src.artifacts import (
    BOUNDS_FILE, INEQUALITIES_FILE, INEQUALITIES_SUMMARY_FILE, PHASE_FILE,
    SERIES_FILE, SUMMARY_FILE, available_artifacts, load_csv, load_json
)
from src.charts import (
    create_deficit_chart, create_entropy_chart, create_flag_bars,
    create_norms_chart, create_phase_diagram, create_virial_chart
)
from src.config import validate_config_text
from src.utils import format_metric

# Configuración de la página
st.set_page_config(
    page_title="Laboratorio Keller-Segel hiperbólico",
    page_icon="🧫",
    layout="wide",
    initial_sidebar_state="expanded"
)


def main():
    """Función principal de la aplicación."""

    st.sidebar.title("🧫 Keller-Segel en B²")
    st.sidebar.markdown("---")

    directory = st.sidebar.text_input("Directorio de resultados:", value="output")
    if not Path(directory).is_dir():
        st.warning(f"⚠️ El directorio '{directory}' no existe.")
        st.info("Genera resultados con: `python -m src.cli simulate --config configs/simulate.json --output output`")
        return

    found = available_artifacts(directory)
    st.sidebar.markdown("**Artefactos:**")
    for name, present in found.items():
        st.sidebar.markdown(f"{'✅' if present else '▫️'} `{name}`")

    render_config_validator()

    tab1, tab2, tab3, tab4 = st.tabs([
        "📈 Simulación",
        "🗺️ Diagrama de fases",
        "📐 Cotas",
        "⚖️ Desigualdades"
    ])

    with tab1:
        render_simulation_view(directory)
    with tab2:
        render_phase_view(directory)
    with tab3:
        render_bounds_view(directory)
    with tab4:
        render_inequalities_view(directory)


def render_config_validator():
    """Valida un fichero de configuración subido desde la barra lateral."""
    st.sidebar.markdown("---")
    config_file = st.sidebar.file_uploader("Validar configuración JSON", type=['json'])
    if config_file is None:
        return
    ok, message = validate_config_text(config_file.getvalue().decode('utf-8'))
    if ok:
        st.sidebar.success(f"✅ {message}")
    else:
        st.sidebar.error(message)


def render_simulation_view(directory: str):
    """Serie temporal de una simulación frente a sus cotas."""
    st.header("📈 Simulación")

    df = load_csv(directory, SERIES_FILE)
    summary = load_json(directory, SUMMARY_FILE)
    if df is None or summary is None:
        st.info("No hay series.csv / summary.json en este directorio.")
        return

    status = summary['status']
    theory = summary['theory']
    col1, col2, col3, col4 = st.columns(4)
    col1.metric("Resultado", status['outcome'])
    col2.metric("t final", format_metric(status['t_final']))
    col3.metric("Pasos", status['steps'])
    col4.metric("Régimen", theory['regime'])

    comparison = summary.get('blowup_comparison')
    if comparison:
        if comparison['within_bound']:
            st.success(f"✅ Explosión en t = {format_metric(comparison['blowup_time'])} "
                       f"≤ 1.1·T_bl = {format_metric(1.1 * comparison['t_bl'])}")
        else:
            st.warning(f"⚠️ T_bl = {format_metric(comparison['t_bl'])}; "
                       f"tiempo detectado: {format_metric(comparison['blowup_time'])}")

    hard = summary['flag_violations']['hard_failures']
    if hard:
        st.error(f"❌ {hard} violaciones de masa o positividad")

    fig = create_virial_chart(df)
    if fig:
        st.plotly_chart(fig, use_container_width=True)

    col1, col2 = st.columns(2)
    with col1:
        fig = create_entropy_chart(df)
        if fig:
            st.plotly_chart(fig, use_container_width=True)
    with col2:
        fig = create_norms_chart(df)
        if fig:
            st.plotly_chart(fig, use_container_width=True)

    fig = create_flag_bars(df)
    if fig:
        st.plotly_chart(fig, use_container_width=True)

    st.subheader("Monitores por paso")
    st.json(summary['monitors'])

    st.subheader("Serie")
    st.dataframe(df, use_container_width=True, hide_index=True)
    st.download_button(
        "📥 Descargar series.csv",
        data=df.to_csv(index=False),
        file_name=SERIES_FILE,
        mime="text/csv"
    )


def render_phase_view(directory: str):
    """Diagrama de fases de un barrido."""
    st.header("🗺️ Diagrama de fases")

    df = load_csv(directory, PHASE_FILE)
    if df is None:
        st.info("No hay phase_diagram.csv en este directorio.")
        return

    errors = df[df['outcome'] == 'error'] if 'outcome' in df.columns else pd.DataFrame()
    if not errors.empty:
        st.warning(f"⚠️ {len(errors)} celdas fallaron")

    fig = create_phase_diagram(df)
    if fig:
        st.plotly_chart(fig, use_container_width=True)

    st.dataframe(df, use_container_width=True, hide_index=True)


def render_bounds_view(directory: str):
    """Informe de cotas cerradas."""
    st.header("📐 Cotas")

    payload = load_json(directory, BOUNDS_FILE)
    if payload is None:
        st.info("No hay bounds.json en este directorio.")
        return

    rows = []
    for report in payload['reports']:
        row = {k: v for k, v in report.items() if k != 'h_of_q'}
        row.update({f"h({q})": value for q, value in report.get('h_of_q', {}).items()})
        rows.append(row)
    st.dataframe(pd.DataFrame(rows), use_container_width=True, hide_index=True)
    st.caption(f"Hash de configuración: `{payload.get('config_hash', '')}`")


def render_inequalities_view(directory: str):
    """Resultados de la batería de desigualdades."""
    st.header("⚖️ Desigualdades")

    df = load_csv(directory, INEQUALITIES_FILE)
    summary = load_json(directory, INEQUALITIES_SUMMARY_FILE)
    if df is None or summary is None:
        st.info("No hay inequalities.csv en este directorio.")
        return

    col1, col2, col3 = st.columns(3)
    col1.metric("Casos", summary['total'])
    col2.metric("Cumplen", summary['passed'])
    col3.metric("Tasa", format_metric(summary['pass_rate']))

    if summary['failures']:
        st.error(f"❌ {len(summary['failures'])} casos no cumplen el criterio")
    else:
        st.success("✅ Todos los casos cumplen el criterio")

    fig = create_deficit_chart(df)
    if fig:
        st.plotly_chart(fig, use_container_width=True)

    per_op = pd.DataFrame.from_dict(summary['per_op'], orient='index')
    st.dataframe(per_op, use_container_width=True)
    st.dataframe(df, use_container_width=True, hide_index=True)


if __name__ == "__main__":
    main()
