"""
Módulo de comprobaciones por fila.
Evalúa las cotas teóricas en cada instante de una serie temporal y marca cada
fila con flags de cumplimiento (True = se cumple) según las tolerancias.
"""

import math
from typing import Dict, List, Optional

from .bounds import (
    CRITICAL_CHI_MASS, entropy_decay_bounds, entropy_lower_bound, entropy_upper_bound,
    log_abs_entropy_bound, lq_monotonicity_threshold, p_moment_bound, rho_moment_bound,
    rho_moment_jensen, rho_moment_log_chain, virial_envelope
)
from .models import SeriesRow, TheoryInputs, TimeSeries, Tolerances

# Flags cuya violación es un fallo duro del experimento
HARD_FLAGS = ('mass', 'positivity')

FLAG_NAMES = (
    'mass', 'positivity', 'virial', 'p_bound', 'rho_jensen', 'rho_bound',
    'ent_lower', 'ent_upper', 'ent_decay', 'free_energy', 'lq_monotone', 'excess_mass'
)


def row_bounds(row: SeriesRow, inputs: TheoryInputs) -> Dict[str, Optional[float]]:
    """
    Cotas teóricas evaluadas en t = row.t.

    Las que no aplican en el régimen de `inputs` quedan en None.
    """
    t = row.t
    record = row.record
    subcritical = inputs.chi_mass < CRITICAL_CHI_MASS
    linear, strong = entropy_decay_bounds(inputs, t)
    return {
        'envelope_rhs': virial_envelope(inputs, t),
        'p_bound': p_moment_bound(inputs, t),
        'ent_lower': entropy_lower_bound(inputs, t),
        'ent_upper': entropy_upper_bound(inputs, t) if subcritical else None,
        'rho_jensen': rho_moment_jensen(record.mass, record.p_moment),
        'rho_log_chain': rho_moment_log_chain(record.mass, record.p_moment),
        'rho_bound': rho_moment_bound(inputs, t),
        'ent_decay_linear': linear,
        'ent_decay_strong': strong,
        'mtk_bound': log_abs_entropy_bound(inputs, t) if subcritical else None,
    }


def _row_flags(row: SeriesRow, previous: Optional[SeriesRow], inputs: TheoryInputs,
               tol: Tolerances) -> Dict[str, bool]:
    record = row.record
    bounds = row.bounds
    mass0 = inputs.mass
    ent_scale = max(1.0, abs(inputs.entropy))
    flags = {
        'mass': abs(record.mass - mass0) <= tol.mass_rel * mass0,
        'positivity': record.n_min >= 0.0,
        'virial': (record.p_moment + mass0) ** 2 <= bounds['envelope_rhs'] * (1.0 + tol.virial_rel),
        'p_bound': record.p_moment + mass0 <= (bounds['p_bound'] + mass0) * (1.0 + tol.virial_rel),
        'rho_jensen': (record.rho_moment <= bounds['rho_jensen'] * (1.0 + tol.moment_rel)
                       and bounds['rho_jensen'] <= bounds['rho_log_chain'] * (1.0 + tol.moment_rel)),
        'rho_bound': record.rho_moment <= bounds['rho_bound'] * (1.0 + tol.virial_rel),
        'ent_lower': record.entropy >= bounds['ent_lower'] - tol.entropy_decay_rel * ent_scale,
    }
    if bounds['ent_upper'] is not None:
        flags['ent_upper'] = record.entropy <= bounds['ent_upper'] + tol.entropy_decay_rel * ent_scale
    decay = [b for b in (bounds['ent_decay_linear'], bounds['ent_decay_strong']) if b is not None]
    if decay:
        flags['ent_decay'] = record.entropy <= min(decay) + tol.entropy_decay_rel * abs(inputs.entropy)
    if previous is not None and inputs.chi_mass < CRITICAL_CHI_MASS:
        f_prev = previous.record.free_energy
        flags['free_energy'] = record.free_energy <= f_prev + tol.free_energy_rel * abs(f_prev)
    if previous is not None:
        checks = []
        for q, norm in record.lq_norms.items():
            if q > 1 and inputs.chi_mass <= lq_monotonicity_threshold(q):
                prev = previous.record.lq_norms.get(q)
                if prev is not None:
                    checks.append(norm <= prev * (1.0 + tol.lq_rel))
        if checks:
            flags['lq_monotone'] = all(checks)
    if bounds['mtk_bound'] is not None:
        levels = [(k, m) for k, m in record.m_t_K.items() if k > 1]
        if levels:
            worst = max(m * math.log(k) for k, m in levels)
            flags['excess_mass'] = worst <= bounds['mtk_bound']
    return flags


def annotate_series(series: TimeSeries, inputs: TheoryInputs,
                    tolerances: Optional[Tolerances] = None) -> TimeSeries:
    """
    Rellena bounds y flags de cada fila (en el sitio).

    Args:
        series: Serie temporal del solver
        inputs: Datos iniciales (chi, M, I0, Ent0, F0)
        tolerances: Tolerancias de los flags

    Returns:
        La misma serie, anotada
    """
    tol = tolerances or Tolerances()
    previous = None
    for row in series.rows:
        row.bounds = row_bounds(row, inputs)
        row.flags = _row_flags(row, previous, inputs, tol)
        previous = row
    return series


def flag_summary(series: TimeSeries) -> Dict[str, int]:
    """
    Número de filas que violan cada flag, más el total de fallos duros.

    Returns:
        Dict {flag: violaciones, ..., 'hard_failures': n}
    """
    counts = {name: 0 for name in FLAG_NAMES}
    for row in series.rows:
        for name, ok in row.flags.items():
            if not ok:
                counts[name] = counts.get(name, 0) + 1
    counts['hard_failures'] = sum(counts[name] for name in HARD_FLAGS)
    return counts


def failed_flags(row: SeriesRow) -> List[str]:
    """Nombres de los flags violados en una fila, en orden estable."""
    return [name for name in FLAG_NAMES if row.flags.get(name) is False]
