"""
Módulo de funcionales.
Diagnósticos escalares de un estado radial: masa, momentos p y rho, entropía,
información de Fisher, energía de interacción, energía libre, normas L^q,
masa en exceso truncada y la seminorma X_{T,q} de una trayectoria.
"""

from typing import Dict, Iterable, Optional

import numpy as np

from .errors import EmptySeriesError, ParameterError
from .models import FunctionalRecord, RadialState, TimeSeries

# Celdas por debajo de este valor no contribuyen a entropía ni Fisher (0 log 0 = 0)
DENSITY_FLOOR = 1e-300

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(8)


def cumulative_mass(state: RadialState) -> np.ndarray:
    """
    Masa acumulada m(rho_e) = sum_{celdas interiores} n_i vol_i en todas las aristas.

    Returns:
        Array de longitud n_cells + 1 con m(0) = 0 y m(rho_max) = M
    """
    return np.concatenate([[0.0], np.cumsum(state.n * state.grid.cell_volumes)])


def _mass_profile_nodes(state: RadialState, lo: np.ndarray, hi: np.ndarray):
    """
    Nodos de Gauss en [lo_i, hi_i] dentro de cada celda y m(r) exacto en ellos.

    Dentro de la celda i la densidad es constante, así que
    m(r) = m_i + n_i 4pi sinh((r + rho_i)/2) sinh((r - rho_i)/2).
    """
    grid = state.grid
    m_edges = cumulative_mass(state)
    left = grid.rho_edges[:-1, None]
    r = 0.5 * (hi - lo)[:, None] * _GAUSS_X[None, :] + 0.5 * (hi + lo)[:, None]
    w = 0.5 * (hi - lo)[:, None] * _GAUSS_W[None, :]
    m = m_edges[:-1, None] + state.n[:, None] * 4.0 * np.pi * np.sinh((r + left) / 2.0) * np.sinh((r - left) / 2.0)
    return r, w, m


def _newton_tail(mass: float, rho_max: float) -> float:
    """Potencial de la masa total vista desde rho_max: -(M/2pi) log tanh(rho_max/2)."""
    return -mass / (2.0 * np.pi) * np.log(np.tanh(rho_max / 2.0))


def radial_potential(state: RadialState) -> np.ndarray:
    """
    Potencial químico absoluto c = G_H * n en los centros de celda.

    Integra c' = -m / (2 pi sinh rho) desde el infinito, usando la cola
    analítica de Newton más allá de rho_max.
    """
    grid = state.grid
    edges = grid.rho_edges
    r, w, m = _mass_profile_nodes(state, edges[:-1], edges[1:])
    per_cell = np.sum(w * m / (2.0 * np.pi * np.sinh(r)), axis=1)
    tail = _newton_tail(state.mass, grid.rho_max)
    # c en la arista exterior de cada celda
    c_outer = tail + np.concatenate([np.cumsum(per_cell[::-1])[::-1][1:], [0.0]])
    r, w, m = _mass_profile_nodes(state, grid.cell_centers, edges[1:])
    half = np.sum(w * m / (2.0 * np.pi * np.sinh(r)), axis=1)
    return c_outer + half


def interaction(state: RadialState) -> float:
    """
    Energía de interacción <n, (-Delta_H)^{-1} n> = int m(rho)^2 / (2 pi sinh rho) drho.

    Incluye la cola (M^2 / 2pi)(-log tanh(rho_max / 2)) del exterior de la rejilla.
    """
    edges = state.grid.rho_edges
    r, w, m = _mass_profile_nodes(state, edges[:-1], edges[1:])
    inner = float(np.sum(w * m * m / (2.0 * np.pi * np.sinh(r))))
    return inner + state.mass * _newton_tail(state.mass, state.grid.rho_max)


def lq_norm(state: RadialState, q: float) -> float:
    """
    Norma L^q (sum n_i^q vol_i)^{1/q}; q = inf da el máximo.

    Args:
        state: Estado radial
        q: Exponente >= 1

    Returns:
        ||n||_q
    """
    if not q >= 1:
        raise ParameterError(f"La norma L^q necesita q >= 1 (q={q})")
    n = np.abs(state.n)
    if np.isinf(q):
        return float(np.max(n))
    if q == 1:
        return float(np.sum(n * state.grid.cell_volumes))
    # Escalado por el máximo para evitar desbordes con q grande
    top = float(np.max(n))
    if top == 0.0:
        return 0.0
    return top * float(np.sum((n / top) ** q * state.grid.cell_volumes)) ** (1.0 / q)


def p_moment(state: RadialState) -> float:
    """I = int p n dV con la media exacta de p sobre cada celda, (p_i + p_{i+1}) / 2."""
    p = state.grid.p_edges
    p_bar = 0.5 * (p[:-1] + p[1:])
    return float(np.sum(p_bar * state.n * state.grid.cell_volumes))


def rho_moment(state: RadialState) -> float:
    """int rho n dV evaluado en los centros de celda."""
    return float(np.sum(state.grid.cell_centers * state.n * state.grid.cell_volumes))


def entropy(state: RadialState) -> float:
    """Ent(n) = int n log n dV con el convenio 0 log 0 = 0."""
    n = state.n
    mask = n > DENSITY_FLOOR
    return float(np.sum(n[mask] * np.log(n[mask]) * state.grid.cell_volumes[mask]))


def fisher_information(state: RadialState) -> float:
    """
    I(n) = int n |d_rho log n|^2 dV con diferencias de log n entre celdas vecinas.

    Solo cuentan las aristas con ambas celdas por encima del umbral.
    """
    grid = state.grid
    n = state.n
    ok = (n[:-1] > DENSITY_FLOOR) & (n[1:] > DENSITY_FLOOR)
    if not np.any(ok):
        return 0.0
    h = grid.d_rho
    rho_e = grid.rho_edges[1:-1][ok]
    a, b = n[:-1][ok], n[1:][ok]
    grad_log = (np.log(b) - np.log(a)) / h
    n_edge = 0.5 * (a + b)
    return float(np.sum(n_edge * grad_log**2 * 2.0 * np.pi * np.sinh(rho_e) * h))


def truncated_excess_mass(state: RadialState, K: float) -> float:
    """
    M_t(K) = int (n - K)_+ dV.

    Args:
        state: Estado radial
        K: Nivel de truncamiento >= 0

    Returns:
        Masa por encima de K (no creciente en K)
    """
    if not K >= 0:
        raise ParameterError("K debe ser >= 0")
    return float(np.sum(np.maximum(state.n - K, 0.0) * state.grid.cell_volumes))


def free_energy(state: RadialState, chi: Optional[float] = None) -> float:
    """F[n] = Ent(n) - (chi / 2) <n, (-Delta_H)^{-1} n>."""
    chi = state.chi if chi is None else chi
    return entropy(state) - 0.5 * chi * interaction(state)


def functional_record(state: RadialState, q_list: Iterable[float] = (1.5, 2.0),
                      k_list: Iterable[float] = (10.0, 100.0, 1000.0)) -> FunctionalRecord:
    """
    Instantánea de todos los funcionales calculados sobre el mismo estado.

    Args:
        state: Estado radial
        q_list: Exponentes de las normas L^q a registrar
        k_list: Niveles K de la masa en exceso

    Returns:
        FunctionalRecord con free_energy = entropy - (chi/2) interaction
    """
    ent = entropy(state)
    inter = interaction(state)
    return FunctionalRecord(
        t=state.t,
        mass=state.mass,
        p_moment=p_moment(state),
        rho_moment=rho_moment(state),
        entropy=ent,
        fisher=fisher_information(state),
        interaction=inter,
        free_energy=ent - 0.5 * state.chi * inter,
        lq_norms={float(q): lq_norm(state, q) for q in q_list},
        linf=lq_norm(state, np.inf),
        m_t_K={float(k): truncated_excess_mass(state, k) for k in k_list},
        n_min=float(np.min(state.n)),
        chi=state.chi
    )


def xtq_seminorm(series: TimeSeries, q: float, T: float) -> float:
    """
    sup_{[0, T]} t^{1 - 1/q} ||n_t||_q sobre las instantáneas de la serie.

    Raises:
        EmptySeriesError: si la serie no tiene filas
        ParameterError: si q no se registró en la serie
    """
    if len(series) == 0:
        raise EmptySeriesError("La serie está vacía")
    if not q > 1:
        raise ParameterError("La seminorma X_{T,q} necesita q > 1")
    best = 0.0
    for row in series.rows:
        if row.t > T * (1.0 + 1e-12):
            break
        norms: Dict[float, float] = row.record.lq_norms
        if float(q) not in norms:
            raise ParameterError(f"La serie no registra ||n||_{q:g}")
        best = max(best, row.t ** (1.0 - 1.0 / q) * norms[float(q)])
    return best
