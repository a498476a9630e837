"""
Módulo del solver radial.
Volúmenes finitos conservativos para soluciones radiales del sistema de
Keller-Segel parabólico-elíptico en el disco hiperbólico: difusión implícita,
deriva explícita con upwind, paso adaptativo, semigrupo del calor y detector
de explosión.
"""

import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import solveh_banded

from .densities import gauss_panels, profile_from_spec
from .errors import (
    EmptySeriesError, LabError, ParameterError, TimeStepError, TruncationError,
    WindowTooNarrowError
)
from .functionals import cumulative_mass, free_energy, functional_record, lq_norm
from .models import (
    DtPolicy, RadialGrid, RadialState, RunOutcome, RunStatus, SeriesRow,
    SimConfig, TimeSeries
)
from .utils import code_version, config_hash

logger = logging.getLogger(__name__)

# Masa mínima que debe quedar dentro de la rejilla al proyectar el dato inicial
MIN_CAPTURED_MASS = 0.99
# Defecto relativo de masa por paso que se atribuye a redondeo y se corrige
ROUNDOFF_MASS_DEFECT = 1e-9
# Tolerancia relativa por paso de los monitores de F y ||n||_2
MONITOR_RTOL = 1e-6
# Cota de la reconstrucción minmod respecto a la celda aguas arriba
EDGE_OVERSHOOT = 1.5


# =============================================================================
# REJILLA Y DATO INICIAL
# =============================================================================

def build_grid(rho_max: float, n_cells: int) -> RadialGrid:
    """
    Rejilla uniforme en rho con volúmenes exactos 2pi (cosh rho_{i+1} - cosh rho_i).

    Args:
        rho_max: Radio exterior (> 0)
        n_cells: Número de celdas (>= 1)

    Returns:
        RadialGrid
    """
    if not rho_max > 0:
        raise ParameterError("rho_max debe ser > 0")
    if int(n_cells) < 1:
        raise ParameterError("n_cells debe ser >= 1")
    edges = np.linspace(0.0, float(rho_max), int(n_cells) + 1)
    a, b = edges[:-1], edges[1:]
    # Forma producto de la diferencia de cosenos hiperbólicos (sin cancelación)
    volumes = 4.0 * np.pi * np.sinh((a + b) / 2.0) * np.sinh((b - a) / 2.0)
    return RadialGrid(rho_edges=edges, cell_centers=0.5 * (a + b), cell_volumes=volumes)


def project_initial(config: SimConfig, grid: RadialGrid) -> RadialState:
    """
    Promedios por celda del perfil inicial y reescalado global a masa M.

    Integra el perfil en p con Gauss de 8 puntos en cada trozo de celda,
    partiendo las celdas en los bordes de los paneles del perfil.

    Raises:
        TruncationError: si más de un 1% de la masa cae fuera de la rejilla
        ParameterError: si el perfil es degenerado
    """
    profile = profile_from_spec(config.initial, config.mass)
    p_edges = grid.p_edges
    breaks = profile.panels()
    breaks = breaks[(breaks > 0.0) & (breaks < p_edges[-1])]
    pieces = np.union1d(p_edges, breaks)
    nodes, weights = gauss_panels(pieces, 8)
    values = 2.0 * np.pi * profile.value(nodes) * weights
    cell = np.clip(np.searchsorted(p_edges, nodes, side='right') - 1, 0, grid.n_cells - 1)
    cell_mass = np.bincount(cell, weights=values, minlength=grid.n_cells)
    captured = float(np.sum(cell_mass))
    if captured < MIN_CAPTURED_MASS:
        raise TruncationError(
            f"Solo {captured:.4f} de la masa del dato inicial cae en rho <= {grid.rho_max:g}"
        )
    n = cell_mass / grid.cell_volumes * (config.mass / captured)
    return RadialState(grid=grid, n=n, t=0.0, chi=config.chi)


# =============================================================================
# PASO DE VOLÚMENES FINITOS
# =============================================================================

def elliptic_drift(state: RadialState) -> np.ndarray:
    """
    d_rho c en las aristas interiores: -m(rho_e) / (2 pi sinh rho_e).

    Integra (sinh rho c')' = -sinh rho n una vez desde el origen con la masa
    acumulada exacta.
    """
    m = cumulative_mass(state)[1:-1]
    return -m / (2.0 * np.pi * np.sinh(state.grid.rho_edges[1:-1]))


def positivity_dt(state: RadialState) -> float:
    """
    Mayor dt con el que la deriva explícita conserva la positividad.

    La reconstrucción minmod acota el valor en la arista por 1.5 veces el de la
    celda aguas arriba, de ahí min V_i / (1.5 chi m_i).
    """
    if state.chi == 0:
        return np.inf
    m_inner = cumulative_mass(state)[1:-1]
    volumes = state.grid.cell_volumes[1:]
    active = m_inner > 0
    if not np.any(active):
        return np.inf
    return float(np.min(volumes[active] / (EDGE_OVERSHOOT * state.chi * m_inner[active])))


def upwind_edge_values(n: np.ndarray) -> np.ndarray:
    """
    Densidad en las aristas interiores reconstruida desde la celda exterior.

    La deriva apunta hacia dentro, así que la celda aguas arriba de la arista
    entre i e i+1 es i+1; su pendiente se limita con minmod entre las
    diferencias hacia i y hacia i+2 (nula en la última arista).
    """
    n = np.asarray(n, dtype=float)
    upstream = n[1:]
    inner = upstream - n[:-1]
    outer = np.zeros_like(upstream)
    outer[:-1] = n[2:] - n[1:-1]
    slope = np.where(inner * outer > 0, np.sign(inner) * np.minimum(np.abs(inner), np.abs(outer)), 0.0)
    return upstream - 0.5 * slope


def stable_dt(state: RadialState, policy: DtPolicy) -> float:
    """
    Paso limitado por la deriva: safety * min(cota de positividad, drho / max|chi d_rho c|).
    """
    if state.chi == 0:
        return np.inf
    speed = float(np.max(np.abs(state.chi * elliptic_drift(state)), initial=0.0))
    cfl = state.grid.d_rho / speed if speed > 0 else np.inf
    return policy.safety * min(positivity_dt(state), cfl)


def step_fv(state: RadialState, dt: float) -> RadialState:
    """
    Un paso de volúmenes finitos: deriva explícita upwind (minmod) y difusión implícita.

    El flujo en cada arista interior es 2 pi sinh(rho_e) (d_rho n)_e menos el
    flujo de deriva; en rho = 0 y rho_max el flujo es nulo, así que la masa
    se conserva exactamente salvo redondeo.

    Args:
        state: Estado actual
        dt: Paso de tiempo (> 0)

    Returns:
        Estado en t + dt

    Raises:
        TimeStepError: si dt supera la cota de positividad o la deriva deja densidades negativas
    """
    if not dt > 0:
        raise ParameterError("dt debe ser > 0")
    grid = state.grid
    n = state.n
    volumes = grid.cell_volumes
    rho_e = grid.rho_edges[1:-1]
    mass0 = state.mass

    # Deriva explícita: la velocidad chi d_rho c apunta hacia dentro
    n_star = n
    if state.chi != 0 and n.size > 1:
        if dt > positivity_dt(state):
            raise TimeStepError(f"dt = {dt:.3e} supera la cota de positividad {positivity_dt(state):.3e}")
        area = 2.0 * np.pi * np.sinh(rho_e)
        velocity = state.chi * elliptic_drift(state)
        flux = area * velocity * upwind_edge_values(n)
        assert np.all(np.isfinite(flux)), "flujo de deriva no finito"
        # Positivo hacia fuera; la celda i+1 cede hacia la i lo que cruza la arista
        transfer = np.zeros_like(n)
        transfer[1:] += flux
        transfer[:-1] -= flux
        n_star = n + dt * transfer / volumes
        if np.any(n_star < 0):
            raise TimeStepError("La deriva produjo densidades negativas")

    # Difusión implícita: (V + dt A) n_new = V n_star, A simétrica definida positiva
    diffusion = 2.0 * np.pi * np.sinh(rho_e) / grid.d_rho
    bands = np.zeros((2, n.size))
    bands[0, 1:] = -dt * diffusion
    diag = volumes.copy()
    diag[:-1] += dt * diffusion
    diag[1:] += dt * diffusion
    bands[1] = diag
    n_new = solveh_banded(bands, volumes * n_star)

    if not np.all(np.isfinite(n_new)):
        raise TimeStepError("El paso produjo valores no finitos")
    if np.any(n_new < 0):
        raise TimeStepError("El paso produjo densidades negativas")
    mass1 = float(np.sum(n_new * volumes))
    if mass0 > 0:
        defect = abs(mass1 - mass0) / mass0
        if defect > ROUNDOFF_MASS_DEFECT:
            raise LabError(f"Defecto de masa {defect:.3e} no atribuible a redondeo")
        n_new = n_new * (mass0 / mass1)
    return state.with_values(n_new, state.t + dt)


# =============================================================================
# INTEGRACIÓN EN TIEMPO
# =============================================================================

def _row(state: RadialState, dt: float, config: SimConfig) -> SeriesRow:
    record = functional_record(state, config.q_list, config.k_list)
    return SeriesRow(t=state.t, dt=dt, record=record)


def collapse_dt(config: SimConfig, grid: Optional[RadialGrid] = None) -> float:
    """
    Suelo del paso para el detector: dt_floor_factor * safety * V_0 / (chi M).

    Con toda la masa en la celda central el paso de deriva vale del orden de
    2 safety V_0 / (chi M), así que el suelo se alcanza cuando al menos
    2 M / dt_floor_factor de masa se concentra en la primera celda.

    Args:
        config: Configuración de la simulación
        grid: Rejilla ya construida (se construye si falta)

    Returns:
        Suelo del paso (0 sin quimiotaxis: nunca se alcanza)
    """
    if config.chi == 0 or config.mass == 0:
        return 0.0
    grid = grid if grid is not None else build_grid(config.rho_max, config.n_cells)
    unit = float(grid.cell_volumes[0]) / (config.chi * config.mass)
    return config.blowup.dt_floor_factor * config.dt_policy.safety * unit


def _is_blowup(linf: float, linf0: float, dt_adaptive: float, config: SimConfig, dt_floor: float) -> bool:
    """Explosión: amplitud >= density_factor veces la inicial Y paso adaptativo en el suelo."""
    return linf >= config.blowup.density_factor * linf0 and dt_adaptive <= dt_floor


def run_simulation(config: SimConfig, monitor: bool = True) -> Tuple[TimeSeries, RunStatus]:
    """
    Integra el sistema desde el dato inicial hasta t_end, explosión o agotamiento.

    Emite una fila cada output_every (más una final) y, si `monitor`, cuenta
    en los metadatos los pasos aceptados en los que F[n] o ||n||_2 crecen por
    encima de la tolerancia relativa.

    Args:
        config: Configuración validada
        monitor: Activa los monitores por paso

    Returns:
        (TimeSeries, RunStatus)
    """
    errors = config.errors()
    if errors:
        raise ParameterError("; ".join(errors))
    policy = config.dt_policy
    grid = build_grid(config.rho_max, config.n_cells)
    state = project_initial(config, grid)

    monitors: Dict[str, float] = {
        'free_energy_increases': 0,
        'free_energy_max_rel_increase': 0.0,
        'l2_increases': 0,
        'l2_max_rel_increase': 0.0
    }
    series = TimeSeries(metadata={
        'config_hash': config_hash(config.to_dict()),
        'grid': {'rho_max': grid.rho_max, 'n_cells': grid.n_cells},
        'version': code_version(),
        'monitors': monitors
    })

    dt_pref = min(policy.dt_init, policy.dt_max)
    dt_floor = collapse_dt(config, grid)
    series.metadata['dt_floor'] = dt_floor
    # Las filas guardan el mismo dt adaptativo que evalúa el detector
    first = _row(state, min(dt_pref, stable_dt(state, policy)), config)
    series.append(first)
    linf0 = first.record.linf
    if config.t_end == 0:
        return series, RunStatus(RunOutcome.COMPLETED, t_final=0.0)

    f_prev = first.record.free_energy
    l2_prev = lq_norm(state, 2.0)
    k_out = 1
    steps = 0
    clean = 0
    outcome, blowup_time, message = RunOutcome.COMPLETED, None, ""
    dt_adaptive = first.dt

    while state.t < config.t_end:
        dt_adaptive = min(dt_pref, stable_dt(state, policy))
        linf = float(np.max(state.n))
        if _is_blowup(linf, linf0, dt_adaptive, config, dt_floor):
            outcome, blowup_time = RunOutcome.BLOWUP_DETECTED, state.t
            message = f"||n||_inf = {linf:.3e} y dt = {dt_adaptive:.3e} en t = {state.t:.6g}"
            logger.warning("Explosión detectada: %s", message)
            break
        if steps >= policy.max_steps or dt_adaptive < policy.dt_min:
            outcome = RunOutcome.BUDGET_EXHAUSTED
            message = f"presupuesto agotado tras {steps} pasos (dt = {dt_adaptive:.3e})"
            logger.warning("Simulación detenida: %s", message)
            break

        target = min(k_out * config.output_every, config.t_end)
        dt = dt_adaptive
        clipped = state.t + dt >= target
        if clipped:
            dt = target - state.t
        try:
            new_state = step_fv(state, dt)
        except TimeStepError as exc:
            dt_pref = dt / 2.0
            clean = 0
            logger.debug("Paso rechazado en t = %.6g (%s); dt -> %.3e", state.t, exc, dt_pref)
            continue
        if clipped:
            new_state = new_state.with_values(new_state.n, target)
        state = new_state
        steps += 1
        clean += 1
        if clean >= policy.clean_steps:
            dt_pref = min(dt_pref * policy.growth, policy.dt_max)
            clean = 0

        if monitor:
            f_now = free_energy(state)
            rel = (f_now - f_prev) / max(abs(f_prev), 1e-300)
            monitors['free_energy_max_rel_increase'] = max(monitors['free_energy_max_rel_increase'], rel)
            if rel > MONITOR_RTOL:
                monitors['free_energy_increases'] += 1
            l2_now = lq_norm(state, 2.0)
            rel = (l2_now - l2_prev) / max(l2_prev, 1e-300)
            monitors['l2_max_rel_increase'] = max(monitors['l2_max_rel_increase'], rel)
            if rel > MONITOR_RTOL:
                monitors['l2_increases'] += 1
            f_prev, l2_prev = f_now, l2_now

        if clipped:
            series.append(_row(state, min(dt_pref, stable_dt(state, policy)), config))
            k_out += 1

    if series.rows[-1].t < state.t:
        series.append(_row(state, min(dt_pref, stable_dt(state, policy)), config))
    monitors['steps'] = steps
    status = RunStatus(outcome, t_final=state.t, blowup_time=blowup_time, steps=steps, message=message)
    logger.info("Simulación terminada: %s en t = %.6g tras %d pasos", outcome.value, state.t, steps)
    return series, status


def detect_blowup(series: TimeSeries, config: SimConfig) -> RunStatus:
    """
    Aplica el criterio de explosión a las filas de una serie.

    La explosión se declara en la primera fila con ||n||_inf >= density_factor
    veces el valor inicial y dt adaptativo <= collapse_dt(config). Las filas
    de run_simulation guardan ese mismo dt, así que sobre su serie el
    veredicto coincide con el estado de la corrida.
    """
    if len(series) == 0:
        raise EmptySeriesError("La serie está vacía")
    linf0 = series.rows[0].record.linf
    t_final = series.rows[-1].t
    dt_floor = collapse_dt(config)
    for row in series.rows:
        if _is_blowup(row.record.linf, linf0, row.dt, config, dt_floor):
            return RunStatus(RunOutcome.BLOWUP_DETECTED, t_final=t_final, blowup_time=row.t,
                             steps=len(series))
    return RunStatus(RunOutcome.COMPLETED, t_final=t_final, steps=len(series))


# =============================================================================
# SEMIGRUPO DEL CALOR
# =============================================================================

def heat_propagate(state: RadialState, t: float, dt_max: float = 1e-3) -> RadialState:
    """
    e^{t Delta_H} aplicado a un estado (el mismo esquema con chi = 0).

    Args:
        state: Dato inicial
        t: Tiempo de propagación (>= 0)
        dt_max: Paso máximo de Euler implícito

    Returns:
        Estado en state.t + t
    """
    if not t >= 0:
        raise ParameterError("t debe ser >= 0")
    if not dt_max > 0:
        raise ParameterError("dt_max debe ser > 0")
    current = RadialState(grid=state.grid, n=state.n.copy(), t=state.t, chi=0.0)
    n_steps = int(np.ceil(t / dt_max - 1e-12)) if t > 0 else 0
    for k in range(n_steps):
        target = state.t + t * (k + 1) / n_steps
        stepped = step_fv(current, target - current.t)
        current = stepped.with_values(stepped.n, target)
    return current


def dispersive_rate_fit(u0: RadialState, q: float, t_window: Tuple[float, float],
                        n_times: int = 8, mode: str = "algebraic") -> float:
    """
    Pendiente por mínimos cuadrados de log ||e^{t Delta_H} u0||_q.

    Args:
        u0: Dato inicial (concentrado para aproximar datos L^1)
        q: Exponente de la norma (>= 1)
        t_window: (t_lo, t_hi) con t_hi / t_lo >= 1.5
        n_times: Tiempos logarítmicamente espaciados en la ventana
        mode: "algebraic" (frente a log t) o "exponential" (frente a t)

    Returns:
        Pendiente ajustada

    Raises:
        WindowTooNarrowError: si la ventana no permite un ajuste
    """
    t_lo, t_hi = float(t_window[0]), float(t_window[1])
    if not t_lo > 0 or not t_hi / t_lo >= 1.5:
        raise WindowTooNarrowError(f"Ventana [{t_lo:g}, {t_hi:g}] demasiado estrecha (t_hi/t_lo >= 1.5)")
    if mode not in ("algebraic", "exponential"):
        raise ParameterError(f"Modo de ajuste desconocido: {mode}")
    if n_times < 3:
        raise ParameterError("Se necesitan al menos 3 tiempos")
    times = np.geomspace(t_lo, t_hi, n_times)
    dt_max = min(1e-4, t_lo / 20.0)
    norms: List[float] = []
    state = u0
    elapsed = 0.0
    for t in times:
        state = heat_propagate(state, t - elapsed, dt_max=dt_max)
        elapsed = t
        norms.append(lq_norm(state, q))
    x = np.log(times) if mode == "algebraic" else times
    slope, _ = np.polyfit(x, np.log(norms), 1)
    return float(slope)
