"""
Módulo del banco de desigualdades.
Evalúa los déficits (LHS - RHS, >= 0 si la desigualdad se cumple) de las
desigualdades funcionales del análisis sobre familias de densidades de
prueba: log-HLS en forma sinh y en forma de Green, HLS con su constante,
Mugelli-Talenti, Beckner y la cota de entropía relativa.

Las integrales dobles de densidades radiales (o trasladadas de una radial)
se calculan por cuadratura determinista con las medias angulares cerradas de
cada núcleo; el resto por Monte Carlo con pares muestreados y semilla por
(operación, densidades, bloque).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.special import ellipkm1, gamma, hyp2f1

from .bounds import c2_constant, hls_constant, hls_exponent, k2_constant
from .densities import (
    RadialProfile, TestDensity, annulus, gauss_panels, hyperbolic_gaussian,
    mixture, mobius_translated, p_to_rho
)
from .errors import NonDifferentiableError, ParameterError, ZeroFunctionError
from .functionals import entropy as state_entropy
from .functionals import fisher_information
from .geometry import _norm_sq, distance_raw, origin_distance_raw, polar_raw
from .models import Budget, DeficitReport, RadialState
from .utils import stable_hash

logger = logging.getLogger(__name__)

# Pares más cercanos que esto (en rho) se vuelven a muestrear
PAIR_EXCLUSION = 1e-10
# Orden de Gauss de la integral interior alrededor de la diagonal
INNER_ORDER = 24
# Exponente de la sustitución graduada hacia la diagonal
GRADING_POWER = 4
# Número de nodos angulares para integrales simples no radiales
ANGULAR_NODES = 64
LOG_FLOOR = 1e-300


# =============================================================================
# MEDIAS ANGULARES DE LOS NÚCLEOS (DENSIDADES RADIALES)
# =============================================================================
# Para x, y a pesos p1, p2 del origen, media sobre el ángulo relativo.

def mean_log_sinh(p1, p2):
    """Media angular de log(2 sinh(rho(x,y)/2)) = (1/2) log(p_> (p_< + 2))."""
    hi, lo = np.maximum(p1, p2), np.minimum(p1, p2)
    return 0.5 * np.log(hi * (lo + 2.0))


def mean_log_cosh(p1, p2):
    """Media angular de log(cosh(rho(x,y)/2)) = (1/2) log((p1 + 2)(p2 + 2)) - log 2."""
    return 0.5 * np.log((p1 + 2.0) * (p2 + 2.0)) - math.log(2.0)


def mean_green(p1, p2):
    """Media angular de G_H: (1/4pi) log((p_> + 2) / p_>), el valor de Newton."""
    hi = np.maximum(p1, p2)
    return np.log1p(2.0 / hi) / (4.0 * np.pi)


def mean_hls_kernel(p1, p2, lam: float):
    """
    Media angular de (2 sinh(rho(x,y)/2))^{-lambda}.

    Con mu = lambda/2 vale (4 sinh^2(S/2))^{-mu} 2F1(mu, 1/2; 1; 1 - w),
    S = rho1 + rho2 y w = sinh^2(D/2) / sinh^2(S/2), D = rho1 - rho2. Cerca de
    la diagonal (w pequeño) se usa la fórmula de conexión en 1 - z = w.
    """
    mu = lam / 2.0
    r1, r2 = p_to_rho(p1), p_to_rho(p2)
    s_sum = np.sinh((r1 + r2) / 2.0) ** 2
    w = np.sinh((r1 - r2) / 2.0) ** 2 / s_sum
    base = (4.0 * s_sum) ** (-mu)
    far = w >= 0.5
    out = np.empty(np.broadcast(w, base).shape)
    w = np.broadcast_to(w, out.shape)
    base = np.broadcast_to(base, out.shape)
    out[far] = hyp2f1(mu, 0.5, 1.0, 1.0 - w[far])
    near = w[~far]
    if math.isclose(mu, 0.5):
        out[~far] = 2.0 / np.pi * ellipkm1(near)
    else:
        regular = gamma(0.5 - mu) / (gamma(1.0 - mu) * gamma(0.5)) * hyp2f1(mu, 0.5, mu + 0.5, near)
        singular = (gamma(mu - 0.5) / (gamma(mu) * gamma(0.5)) * near ** (0.5 - mu)
                    * hyp2f1(1.0 - mu, 0.5, 1.5 - mu, near))
        out[~far] = regular + singular
    return base * out


# =============================================================================
# CUADRATURAS
# =============================================================================

def _outer_nodes(profile: RadialProfile, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodos en p sobre los paneles del perfil; el primer panel graduado hacia su borde izquierdo."""
    edges = profile.panels()
    x, w = np.polynomial.legendre.leggauss(order)
    u, wu = 0.5 * (x + 1.0), 0.5 * w
    a, b = edges[0], edges[1]
    first = a + (b - a) * u**3
    w_first = (b - a) * 3.0 * u**2 * wu
    if edges.size > 2:
        rest, w_rest = gauss_panels(edges[1:], order)
        return np.concatenate([first, rest]), np.concatenate([w_first, w_rest])
    return first, w_first


def _graded(a: float, b: float, toward_left: bool, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    u, wu = 0.5 * (x + 1.0), 0.5 * w
    step = (b - a) * u**GRADING_POWER
    weight = (b - a) * GRADING_POWER * u ** (GRADING_POWER - 1) * wu
    return (a + step if toward_left else b - step), weight


def _inner_nodes(edges: np.ndarray, p1: float, order: int = INNER_ORDER):
    """
    Nodos en p2 sobre los paneles `edges`, partidos en p1 y graduados hacia
    el extremo más cercano a p1 para absorber la singularidad diagonal.
    """
    cuts = edges
    if edges[0] < p1 < edges[-1]:
        cuts = np.union1d(edges, [p1])
    nodes, weights = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        toward_left = abs(p1 - a) <= abs(p1 - b)
        n, w = _graded(a, b, toward_left, order)
        nodes.append(n)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def radial_pair_integral(f_profile: RadialProfile, g_profile: RadialProfile,
                         kernel_mean: Callable, order: int = 32) -> Tuple[float, int]:
    """
    int int phi_f phi_g K dV dV para perfiles radiales de masa unidad.

    Con dV = dp dtheta el doble integral vale (2pi)^2 int int phi_f(p1)
    phi_g(p2) <K>(p1, p2) dp1 dp2, donde <K> es la media angular del núcleo.

    Returns:
        (valor, número de evaluaciones del núcleo)
    """
    p1, w1 = _outer_nodes(f_profile, order)
    g_edges = g_profile.panels()
    inner = np.empty_like(p1)
    count = 0
    for k, p in enumerate(p1):
        p2, w2 = _inner_nodes(g_edges, p)
        inner[k] = np.sum(w2 * g_profile.value(p2) * kernel_mean(p, p2))
        count += p2.size
    value = (2.0 * np.pi) ** 2 * float(np.sum(w1 * f_profile.value(p1) * inner))
    return value, count


def _profile_integral(profile: RadialProfile, integrand: Callable, order: int) -> float:
    """2pi int integrand(p, phi(p)) dp sobre los paneles del perfil."""
    p, w = gauss_panels(profile.panels(), order)
    return 2.0 * np.pi * float(np.sum(w * integrand(p, profile.value(p))))


def _safe_log(values):
    return np.log(np.maximum(values, LOG_FLOOR))


def density_entropy(f: TestDensity, order: int = 32) -> float:
    """int f log f dV (invariante por isometrías)."""
    profile = f.isometric_profile()
    mass = f.mass
    if profile is not None:
        return _profile_integral(profile, lambda p, v: mass * v * _safe_log(mass * v), order)
    points, weights = f.quadrature(order, ANGULAR_NODES)
    return float(np.sum(weights * _safe_log(f.evaluate(points))))


def density_rho_moment(f: TestDensity, order: int = 32) -> float:
    """int rho(x, 0) f dV."""
    profile = f.radial_profile()
    if profile is not None:
        return _profile_integral(profile, lambda p, v: f.mass * v * p_to_rho(p), order)
    return f.integrate(origin_distance_raw, order, ANGULAR_NODES)


def density_p_moment(f: TestDensity, order: int = 32) -> float:
    """int p f dV."""
    profile = f.radial_profile()
    if profile is not None:
        return _profile_integral(profile, lambda p, v: f.mass * v * p, order)

    def weight(x):
        r2 = _norm_sq(x)
        return 2.0 * r2 / (1.0 - r2)
    return f.integrate(weight, order, ANGULAR_NODES)


def density_lp_norm(f: TestDensity, p_exp: float, order: int = 32) -> float:
    """||f||_p (invariante por isometrías)."""
    profile = f.isometric_profile()
    if profile is not None:
        return _profile_integral(profile, lambda p, v: (f.mass * v) ** p_exp, order) ** (1.0 / p_exp)
    points, weights = f.quadrature(order, ANGULAR_NODES)
    return float(np.sum(weights * f.evaluate(points) ** (p_exp - 1.0))) ** (1.0 / p_exp)


# =============================================================================
# MONTE CARLO DE PARES
# =============================================================================

@dataclass
class PairEstimate:
    """Media de un núcleo sobre pares (x ~ f/M_f, y ~ g/M_g) y su error estándar."""
    mean: float
    stderr: float
    samples: int
    resampled: int = 0
    budget_exhausted: bool = False


def _kernel_log_sinh(x, y, rho):
    return np.log(2.0 * np.sinh(rho / 2.0))


def _kernel_log_cosh(x, y, rho):
    half = rho / 2.0
    return half + np.log1p(np.exp(-2.0 * half)) - math.log(2.0)


def _kernel_green(x, y, rho):
    return -np.log(np.tanh(rho / 2.0)) / (2.0 * np.pi)


def _kernel_hls(lam: float):
    def kernel(x, y, rho):
        return (2.0 * np.sinh(rho / 2.0)) ** (-lam)
    return kernel


def pair_monte_carlo(f: TestDensity, g: TestDensity, kernel: Callable, op: str,
                     budget: Budget, scale: float = 1.0) -> PairEstimate:
    """
    Estimador Monte Carlo de E[K(x, y)] con x ~ f, y ~ g independientes.

    Cada bloque usa su propio flujo SeedSequence([seed, op, f, g, bloque]),
    así que el resultado es idéntico en ejecución serie o paralela. Si hay
    target_error se añaden bloques hasta que scale * stderr lo alcanza o se
    agota max_samples.
    """
    key = [budget.seed, stable_hash(op), f.fingerprint(), g.fingerprint()]
    limit = budget.max_samples if budget.target_error is not None else budget.samples
    values: List[np.ndarray] = []
    total, chunk, resampled = 0, 0, 0
    while total < limit:
        size = min(budget.chunk_size, limit - total)
        rng = np.random.default_rng(np.random.SeedSequence(key + [chunk]))
        x = f.sample(size, rng)
        y = g.sample(size, rng)
        rho = distance_raw(x, y)
        close = rho < PAIR_EXCLUSION
        while np.any(close):
            k = int(np.sum(close))
            resampled += k
            x[close] = f.sample(k, rng)
            y[close] = g.sample(k, rng)
            rho[close] = distance_raw(x[close], y[close])
            close = rho < PAIR_EXCLUSION
        values.append(kernel(x, y, rho))
        total += size
        chunk += 1
        if budget.target_error is not None and total >= budget.samples:
            merged = np.concatenate(values)
            if scale * merged.std(ddof=1) / math.sqrt(merged.size) <= budget.target_error:
                break
    merged = np.concatenate(values)
    stderr = float(merged.std(ddof=1) / math.sqrt(merged.size)) if merged.size > 1 else 0.0
    exhausted = budget.target_error is not None and scale * stderr > budget.target_error
    if exhausted:
        logger.warning("%s: error %.3e por encima del objetivo con %d muestras", op, scale * stderr, total)
    return PairEstimate(mean=float(np.mean(merged)), stderr=stderr, samples=total,
                        resampled=resampled, budget_exhausted=exhausted)


def _self_pair(f: TestDensity, kernel_mean: Callable, kernel: Callable, op: str,
               budget: Budget) -> PairEstimate:
    """E[K] para pares de f consigo misma; determinista si f es radial respecto de algún centro."""
    profile = f.isometric_profile()
    if profile is not None:
        value, count = radial_pair_integral(profile, profile, kernel_mean, budget.quad_order)
        return PairEstimate(mean=value, stderr=0.0, samples=count)
    return pair_monte_carlo(f, f, kernel, op, budget)


def _require_mass(f: TestDensity):
    if not f.mass > 0:
        raise ParameterError("La densidad necesita masa > 0")


# =============================================================================
# DÉFICITS
# =============================================================================

def log_hls_deficit(f: TestDensity, budget: Optional[Budget] = None) -> DeficitReport:
    """
    Déficit del log-HLS en forma de Green:
    int f log f - (4pi/M) int int f f G_H + K_2(M) + 2 int rho f >= 0.
    """
    budget = budget or Budget()
    _require_mass(f)
    mass = f.mass
    pair = _self_pair(f, mean_green, _kernel_green, "log_hls_deficit", budget)
    ent = density_entropy(f, budget.quad_order)
    rho_m = density_rho_moment(f, budget.quad_order)
    interaction = 4.0 * np.pi * mass * pair.mean
    value = ent - interaction + k2_constant(mass) + 2.0 * rho_m
    return DeficitReport(
        value=value, mc_error=4.0 * np.pi * mass * pair.stderr, nodes_or_samples=pair.samples,
        op="log_hls_deficit", label=f.label, resampled=pair.resampled,
        budget_exhausted=pair.budget_exhausted,
        terms={'entropy': ent, 'interaction': interaction, 'constant': k2_constant(mass), 'rho_moment': rho_m}
    )


def sinh_log_hls_deficit(f: TestDensity, budget: Optional[Budget] = None) -> DeficitReport:
    """
    Déficit del log-HLS en forma sinh:
    int f log f + (2/M) int int f f log(2 sinh(rho/2)) + C_2(M) >= 0.
    """
    budget = budget or Budget()
    _require_mass(f)
    mass = f.mass
    pair = _self_pair(f, mean_log_sinh, _kernel_log_sinh, "sinh_log_hls_deficit", budget)
    ent = density_entropy(f, budget.quad_order)
    interaction = 2.0 * mass * pair.mean
    value = ent + interaction + c2_constant(mass)
    return DeficitReport(
        value=value, mc_error=2.0 * mass * pair.stderr, nodes_or_samples=pair.samples,
        op="sinh_log_hls_deficit", label=f.label, resampled=pair.resampled,
        budget_exhausted=pair.budget_exhausted,
        terms={'entropy': ent, 'interaction': interaction, 'constant': c2_constant(mass)}
    )


def cosh_correction(f: TestDensity, budget: Optional[Budget] = None) -> DeficitReport:
    """
    Holgura entre las dos formas del log-HLS:
    2 int rho f - (2/M) int int f f log cosh(rho/2) >= 0.

    Coincide con (déficit de Green) - (déficit sinh).
    """
    budget = budget or Budget()
    _require_mass(f)
    mass = f.mass
    pair = _self_pair(f, mean_log_cosh, _kernel_log_cosh, "cosh_correction", budget)
    rho_m = density_rho_moment(f, budget.quad_order)
    cosh_term = 2.0 * mass * pair.mean
    return DeficitReport(
        value=2.0 * rho_m - cosh_term, mc_error=2.0 * mass * pair.stderr,
        nodes_or_samples=pair.samples, op="cosh_correction", label=f.label,
        resampled=pair.resampled, budget_exhausted=pair.budget_exhausted,
        terms={'rho_moment': rho_m, 'cosh_term': cosh_term}
    )


def hls_ratio(f: TestDensity, g: TestDensity, lam: float,
              budget: Optional[Budget] = None) -> DeficitReport:
    """
    Déficit HLS: C_{2,lambda} ||f||_p ||g||_p - int int f g (2 sinh(rho/2))^{-lambda},
    con p = 4 / (4 - lambda).

    Las parejas concéntricas (o f consigo misma trasladada) se integran de
    forma determinista; el resto por Monte Carlo, cuya varianza solo es
    finita para lambda < 1.
    """
    budget = budget or Budget()
    _require_mass(f)
    _require_mass(g)
    constant = hls_constant(lam)
    p_exp = hls_exponent(lam)
    kernel_mean = lambda p1, p2: mean_hls_kernel(p1, p2, lam)
    op = f"hls_ratio[{lam:g}]"

    f_prof, g_prof = f.radial_profile(), g.radial_profile()
    if f is g and f.isometric_profile() is not None:
        f_prof = g_prof = f.isometric_profile()
    if f_prof is not None and g_prof is not None:
        unit, count = radial_pair_integral(f_prof, g_prof, kernel_mean, budget.quad_order)
        pair = PairEstimate(mean=unit, stderr=0.0, samples=count)
    else:
        if lam >= 1.0:
            logger.warning("%s: Monte Carlo con varianza infinita para lambda >= 1", op)
        pair = pair_monte_carlo(f, g, _kernel_hls(lam), op, budget)
    scale = f.mass * g.mass
    norm_f = density_lp_norm(f, p_exp, budget.quad_order)
    norm_g = norm_f if g is f else density_lp_norm(g, p_exp, budget.quad_order)
    lhs = constant * norm_f * norm_g
    rhs = scale * pair.mean
    return DeficitReport(
        value=lhs - rhs, mc_error=scale * pair.stderr, nodes_or_samples=pair.samples,
        op="hls_ratio", label=f"{f.label}|{g.label}|lambda={lam:g}",
        resampled=pair.resampled, budget_exhausted=pair.budget_exhausted,
        terms={'constant': constant, 'norm_f': norm_f, 'norm_g': norm_g, 'pair': rhs}
    )


def _differentiable_profile(u: TestDensity) -> RadialProfile:
    profile = u.isometric_profile()
    if profile is None:
        raise NonDifferentiableError("Solo familias radiales C^1 (respecto de algún centro)")
    # El anillo lanza NonDifferentiableError aquí
    profile.derivative(np.array([profile.panels()[0]]))
    return profile


def mugelli_talenti_deficit(u: TestDensity, budget: Optional[Budget] = None) -> DeficitReport:
    """
    Déficit de Mugelli-Talenti: (int |grad_H u|)^2 - (int |u|)^2 - 4pi int u^2 >= 0.

    Para u radial, |grad_H u| = |u'(rho)| = |du/dp| sinh(rho) con sinh(rho) = sqrt(p (p + 2)).
    """
    budget = budget or Budget()
    if u.mass == 0:
        return DeficitReport(value=0.0, op="mugelli_talenti_deficit", label=u.label)
    profile = _differentiable_profile(u)
    mass, order = u.mass, budget.quad_order
    grad_l1 = _profile_integral(
        profile, lambda p, v: mass * np.abs(profile.derivative(p)) * np.sqrt(p * (p + 2.0)), order
    )
    l1 = _profile_integral(profile, lambda p, v: mass * v, order)
    l2_sq = _profile_integral(profile, lambda p, v: (mass * v) ** 2, order)
    value = grad_l1**2 - l1**2 - 4.0 * np.pi * l2_sq
    nodes = gauss_panels(profile.panels(), order)[0].size
    return DeficitReport(
        value=value, nodes_or_samples=nodes, op="mugelli_talenti_deficit", label=u.label,
        terms={'grad_l1': grad_l1, 'l1': l1, 'l2_sq': l2_sq}
    )


def beckner_deficit(u: TestDensity, budget: Optional[Budget] = None) -> DeficitReport:
    """
    Déficit de Beckner para v = u / ||u||_2:
    (1/2) log((1 / pi e) int |grad_H v|^2) - int v^2 log|v| >= 0.

    Raises:
        ZeroFunctionError: si u es idénticamente nula
    """
    budget = budget or Budget()
    if u.mass == 0:
        raise ZeroFunctionError("No se puede normalizar la función nula")
    profile = _differentiable_profile(u)
    order = budget.quad_order
    # El déficit es invariante por escala: se trabaja con el perfil de masa unidad
    l2 = math.sqrt(_profile_integral(profile, lambda p, v: v * v, order))
    if l2 == 0:
        raise ZeroFunctionError("No se puede normalizar la función nula")
    dirichlet = _profile_integral(
        profile, lambda p, v: (profile.derivative(p) / l2) ** 2 * p * (p + 2.0), order
    )
    log_term = _profile_integral(profile, lambda p, v: (v / l2) ** 2 * _safe_log(v / l2), order)
    value = 0.5 * math.log(dirichlet / (np.pi * np.e)) - log_term
    nodes = gauss_panels(profile.panels(), order)[0].size
    return DeficitReport(
        value=value, nodes_or_samples=nodes, op="beckner_deficit", label=u.label,
        terms={'dirichlet': dirichlet, 'log_term': log_term}
    )


def beckner_entropy_deficit(state: RadialState) -> DeficitReport:
    """
    Consecuencia en forma de entropía (u = sqrt(n / M)):
    M log(I(n) / (4 pi e)) - int n log n >= 0.
    """
    mass = state.mass
    if not mass > 0:
        raise ZeroFunctionError("Estado sin masa")
    fisher = fisher_information(state)
    if not fisher > 0:
        raise ZeroFunctionError("Información de Fisher nula: sqrt(n/M) es constante en la rejilla")
    ent = state_entropy(state)
    value = mass * math.log(fisher / (4.0 * np.pi * np.e)) - ent
    return DeficitReport(
        value=value, nodes_or_samples=state.grid.n_cells, op="beckner_entropy_deficit",
        label=f"state(t={state.t:g})", terms={'fisher': fisher, 'entropy': ent}
    )


def relative_entropy_check(f: TestDensity, s: float, budget: Optional[Budget] = None) -> DeficitReport:
    """
    Cota inferior de la entropía relativa a q_s:
    int f log f + (1/s) int p f - M log(M / 2 pi s) >= 0, con igualdad en f = M q_s.
    """
    if not s > 0:
        raise ParameterError("s debe ser > 0")
    budget = budget or Budget()
    _require_mass(f)
    mass = f.mass
    ent = density_entropy(f, budget.quad_order)
    p_m = density_p_moment(f, budget.quad_order)
    value = ent + p_m / s - mass * math.log(mass / (2.0 * np.pi * s))
    return DeficitReport(
        value=value, op="relative_entropy_check", label=f"{f.label}|s={s:g}",
        terms={'entropy': ent, 'p_moment': p_m}
    )


def passes(report: DeficitReport, tol: float = 1e-6) -> bool:
    """Criterio del banco: déficit >= -3 mc_error - tol."""
    return bool(report.value >= -3.0 * report.mc_error - tol)


# =============================================================================
# BATERÍA POR DEFECTO
# =============================================================================

OPS = {
    'log_hls_deficit': log_hls_deficit,
    'sinh_log_hls_deficit': sinh_log_hls_deficit,
    'cosh_correction': cosh_correction,
    'hls_ratio': hls_ratio,
    'mugelli_talenti_deficit': mugelli_talenti_deficit,
    'beckner_deficit': beckner_deficit,
    'relative_entropy_check': relative_entropy_check,
}

DEFAULT_OPS = list(OPS)


@dataclass
class BatteryCase:
    """Un caso del banco: operación, densidades y parámetros."""
    op: str
    index: int
    densities: Tuple[TestDensity, ...]
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def label(self) -> str:
        extra = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        names = "|".join(d.label for d in self.densities)
        return f"{names}|{extra}" if extra else names


def _random_center(rng: np.random.Generator) -> np.ndarray:
    return polar_raw(rng.uniform(0.2, 1.5), rng.uniform(0.0, 2.0 * np.pi))


def _random_density(kind: int, rng: np.random.Generator, smooth: bool = False) -> TestDensity:
    """
    Densidad aleatoria de la familia `kind` con masa en [1, 5]:
    0 gaussiana, 1 anillo (o mezcla concéntrica si smooth), 2 gaussiana
    trasladada, 3 mezcla no concéntrica.
    """
    mass = float(rng.uniform(1.0, 5.0))
    s = float(np.exp(rng.uniform(np.log(0.1), np.log(5.0))))
    if kind == 0:
        return hyperbolic_gaussian(s, mass)
    if kind == 1:
        if smooth:
            s2 = float(np.exp(rng.uniform(np.log(0.1), np.log(5.0))))
            w = float(rng.uniform(0.2, 0.8))
            return mixture([hyperbolic_gaussian(s), hyperbolic_gaussian(s2)], [w, 1.0 - w], mass)
        a = float(rng.uniform(0.0, 1.0))
        return annulus(a, a + float(rng.uniform(0.2, 1.5)), mass)
    if kind == 2:
        return mobius_translated(hyperbolic_gaussian(s, mass), _random_center(rng))
    w = float(rng.uniform(0.2, 0.8))
    other = mobius_translated(hyperbolic_gaussian(float(rng.uniform(0.1, 1.0))), _random_center(rng))
    return mixture([hyperbolic_gaussian(s), other], [w, 1.0 - w], mass)


def default_battery(op: str, n: int = 50, seed: int = 0,
                    lambdas: Tuple[float, ...] = (0.5, 1.0, 1.5)) -> List[BatteryCase]:
    """
    Batería determinista de `n` casos para una operación.

    Las familias rotan entre gaussiana, anillo, gaussiana trasladada y mezcla
    no concéntrica; Mugelli-Talenti y Beckner usan solo familias C^1 y HLS con
    lambda >= 1 solo parejas deterministas.
    """
    if op not in OPS:
        raise ParameterError(f"Operación desconocida: {op}")
    cases = []
    for i in range(n):
        rng = np.random.default_rng(np.random.SeedSequence([seed, stable_hash(op), i]))
        kind = i % 4
        if op in ('mugelli_talenti_deficit', 'beckner_deficit'):
            density = _random_density(min(kind, 2), rng, smooth=True)
            cases.append(BatteryCase(op, i, (density,)))
        elif op == 'hls_ratio':
            lam = float(lambdas[i % len(lambdas)])
            if lam >= 1.0:
                kind = kind % 3
            f = _random_density(kind, rng)
            if kind in (0, 1):
                g = _random_density(int(rng.integers(0, 2)), rng)
                cases.append(BatteryCase(op, i, (f, g), {'lam': lam}))
            else:
                cases.append(BatteryCase(op, i, (f, f), {'lam': lam}))
        elif op == 'relative_entropy_check':
            density = _random_density(kind, rng)
            s = float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))
            cases.append(BatteryCase(op, i, (density,), {'s': s}))
        else:
            cases.append(BatteryCase(op, i, (_random_density(kind, rng),)))
    return cases


def evaluate_case(case: BatteryCase, budget: Budget) -> DeficitReport:
    """Evalúa un caso del banco con el presupuesto dado."""
    func = OPS[case.op]
    if case.op == 'hls_ratio':
        f, g = case.densities
        if f is g or g.describe() == f.describe():
            g = f
        report = func(f, g, case.params['lam'], budget)
    elif case.op == 'relative_entropy_check':
        report = func(case.densities[0], case.params['s'], budget)
    else:
        report = func(case.densities[0], budget)
    report.label = case.label
    return report
