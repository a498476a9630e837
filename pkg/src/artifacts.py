"""
Módulo de artefactos.
Convierte series temporales, diagramas de fase, informes de cotas y
resultados del banco de desigualdades en DataFrames y diccionarios JSON, y
los vuelve a cargar para el explorador.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from .checks import failed_flags
from .models import DeficitReport, TimeSeries

FLOAT_FORMAT = "%.17g"

SERIES_FILE = "series.csv"
SUMMARY_FILE = "summary.json"
PHASE_FILE = "phase_diagram.csv"
BOUNDS_FILE = "bounds.json"
INEQUALITIES_FILE = "inequalities.csv"
INEQUALITIES_SUMMARY_FILE = "inequalities_summary.json"

# Columnas estables de series.csv (las lq_* dependen de q_list)
BOUND_COLUMNS = ['envelope_rhs', 'p_bound', 'ent_lower', 'ent_upper']
EXTRA_BOUND_COLUMNS = ['rho_jensen', 'rho_log_chain', 'rho_bound', 'ent_decay_linear',
                       'ent_decay_strong', 'mtk_bound']


def _nullable(value: Optional[float]) -> float:
    return np.nan if value is None else value


def series_to_frame(series: TimeSeries) -> pd.DataFrame:
    """
    Convierte una TimeSeries anotada en DataFrame.

    Columnas: t, mass, p_moment, rho_moment, entropy, fisher, interaction,
    free_energy, lq_<q>, linf, envelope_rhs, p_bound, ent_lower, ent_upper,
    flags y a continuación las columnas auxiliares (dt, n_min, M_t(K), ...).
    """
    data = []
    for row in series.rows:
        rec = row.record
        item: Dict[str, Any] = {
            't': row.t,
            'mass': rec.mass,
            'p_moment': rec.p_moment,
            'rho_moment': rec.rho_moment,
            'entropy': rec.entropy,
            'fisher': rec.fisher,
            'interaction': rec.interaction,
            'free_energy': rec.free_energy,
        }
        for q, norm in rec.lq_norms.items():
            item[f"lq_{q:g}"] = norm
        item['linf'] = rec.linf
        for name in BOUND_COLUMNS:
            item[name] = _nullable(row.bounds.get(name))
        failed = failed_flags(row)
        item['flags'] = ";".join(failed) if failed else "ok"
        item['dt'] = row.dt
        item['n_min'] = rec.n_min
        for k, m in rec.m_t_K.items():
            item[f"mtk_{k:g}"] = m
        for name in EXTRA_BOUND_COLUMNS:
            item[name] = _nullable(row.bounds.get(name))
        data.append(item)
    return pd.DataFrame(data)


def frame_to_csv(df: pd.DataFrame) -> str:
    """CSV con 17 cifras significativas; los valores ausentes quedan vacíos."""
    return df.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="")


def deficits_to_frame(reports: List[DeficitReport], passed: List[bool]) -> pd.DataFrame:
    """
    Tabla del banco de desigualdades.

    Returns:
        DataFrame con columnas: op, label, deficit, mc_error, nodes_or_samples,
        resampled, budget_exhausted, passed
    """
    data = []
    for report, ok in zip(reports, passed):
        data.append({
            'op': report.op,
            'label': report.label,
            'deficit': report.value,
            'mc_error': report.mc_error,
            'nodes_or_samples': report.nodes_or_samples,
            'resampled': report.resampled,
            'budget_exhausted': report.budget_exhausted,
            'passed': ok
        })
    return pd.DataFrame(data)


def inequality_summary(df: pd.DataFrame) -> Dict[str, Any]:
    """Tasa de aprobados global y por operación."""
    if df.empty:
        return {'total': 0, 'passed': 0, 'pass_rate': None, 'per_op': {}, 'failures': []}
    per_op = {}
    for op, group in df.groupby('op', sort=False):
        per_op[op] = {
            'total': int(len(group)),
            'passed': int(group['passed'].sum()),
            'min_deficit': float(group['deficit'].min())
        }
    failures = df.loc[~df['passed'], ['op', 'label']].to_dict('records')
    return {
        'total': int(len(df)),
        'passed': int(df['passed'].sum()),
        'pass_rate': float(df['passed'].mean()),
        'per_op': per_op,
        'failures': failures
    }


# =============================================================================
# CARGA (EXPLORADOR)
# =============================================================================

def load_csv(directory, name: str) -> Optional[pd.DataFrame]:
    """Carga un CSV de un directorio de salida (None si no existe)."""
    path = Path(directory) / name
    if not path.exists():
        return None
    return pd.read_csv(path)


def load_json(directory, name: str) -> Optional[Dict[str, Any]]:
    """Carga un JSON de un directorio de salida (None si no existe)."""
    path = Path(directory) / name
    if not path.exists():
        return None
    with open(path, encoding='utf-8') as handle:
        return json.load(handle)


def available_artifacts(directory) -> Dict[str, bool]:
    """Qué artefactos hay en el directorio."""
    path = Path(directory)
    names = [SERIES_FILE, SUMMARY_FILE, PHASE_FILE, BOUNDS_FILE, INEQUALITIES_FILE,
             INEQUALITIES_SUMMARY_FILE]
    return {name: (path / name).exists() for name in names}
