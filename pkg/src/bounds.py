"""
Módulo de cotas teóricas.
Evaluación cerrada de umbrales, envolventes y constantes del análisis del
sistema: lambda*, tiempo de explosión, envolvente del virial, cotas de los
momentos p y rho, cotas de entropía, decaimiento y constantes HLS.

Las cotas que no aplican en el régimen pedido devuelven None (nunca NaN).
"""

import math
from typing import Optional, Tuple

from scipy.special import gamma

from .errors import ParameterError, SupercriticalInputError
from .models import BoundsReport, Regime, TheoryInputs

CRITICAL_CHI_MASS = 8.0 * math.pi
ENTROPY_DECAY_CHI_MASS = 4.0 * math.pi


def _check(chi: float, mass: float):
    if not chi >= 0:
        raise ParameterError("chi debe ser >= 0")
    if not mass > 0:
        raise ParameterError("M debe ser > 0")


def _check_time(t: float):
    if not t >= 0:
        raise ParameterError("t debe ser >= 0")


# =============================================================================
# UMBRALES Y RÉGIMEN
# =============================================================================

def lambda_star(chi: float, mass: float) -> float:
    """
    Umbral del momento p inicial: M (sqrt(chi M / 8 pi) - 1).

    Es negativo en el régimen subcrítico, donde la condición de explosión
    no puede cumplirse.
    """
    _check(chi, mass)
    return mass * (math.sqrt(chi * mass / CRITICAL_CHI_MASS) - 1.0)


def is_critical(chi: float, mass: float) -> bool:
    return math.isclose(chi * mass, CRITICAL_CHI_MASS, rel_tol=1e-12, abs_tol=0.0)


def is_supercritical(chi: float, mass: float) -> bool:
    return chi * mass > CRITICAL_CHI_MASS and not is_critical(chi, mass)


def blowup_condition(inputs: TheoryInputs) -> bool:
    """chi M > 8 pi y I0 < lambda*."""
    return is_supercritical(inputs.chi, inputs.mass) and inputs.p_moment < lambda_star(inputs.chi, inputs.mass)


def classify_regime(chi: float, mass: float, p_moment: float) -> Regime:
    """
    Régimen predicho para (chi, M, I0).

    El caso crítico chi M = 8 pi y el supercrítico con I0 >= lambda* quedan
    como no cubiertos.
    """
    _check(chi, mass)
    if chi * mass < CRITICAL_CHI_MASS and not is_critical(chi, mass):
        return Regime.SUBCRITICAL
    if is_supercritical(chi, mass) and p_moment < lambda_star(chi, mass):
        return Regime.BLOWUP_CONDITION
    return Regime.UNCOVERED


# =============================================================================
# VIRIAL Y MOMENTOS
# =============================================================================

def blowup_time_bound(inputs: TheoryInputs) -> Optional[float]:
    """
    Cota superior del tiempo máximo de existencia bajo la condición de explosión.

    T_bl = (1/4) log[(M^2 / 8pi)(chi M - 8pi) / (chi M^3 / 8pi - (M + I0)^2)]

    Returns:
        T_bl >= 0, o None si no se cumple la condición
    """
    if not blowup_condition(inputs):
        return None
    chi, mass, i0 = inputs.chi, inputs.mass, inputs.p_moment
    numerator = mass**2 / CRITICAL_CHI_MASS * (chi * mass - CRITICAL_CHI_MASS)
    denominator = chi * mass**3 / CRITICAL_CHI_MASS - (mass + i0) ** 2
    return max(0.25 * math.log(numerator / denominator), 0.0)


def virial_envelope(inputs: TheoryInputs, t: float) -> float:
    """Cota de (I(t) + M)^2: ((I0 + M)^2 - chi M^3 / 8pi) e^{4t} + chi M^3 / 8pi."""
    _check_time(t)
    b = inputs.chi * inputs.mass**3 / CRITICAL_CHI_MASS
    return ((inputs.p_moment + inputs.mass) ** 2 - b) * math.exp(4.0 * t) + b


def c_plus(inputs: TheoryInputs) -> float:
    """C_+ = (I0 - lambda*)_+^{1/2} (I0 + M + M sqrt(chi M / 8pi))^{1/2}."""
    lam = lambda_star(inputs.chi, inputs.mass)
    excess = max(inputs.p_moment - lam, 0.0)
    root = math.sqrt(inputs.chi * inputs.mass / CRITICAL_CHI_MASS)
    return math.sqrt(excess) * math.sqrt(inputs.p_moment + inputs.mass + inputs.mass * root)


def p_moment_bound(inputs: TheoryInputs, t: float) -> float:
    """I(t) <= C_+ e^{2t} + lambda*."""
    _check_time(t)
    return c_plus(inputs) * math.exp(2.0 * t) + lambda_star(inputs.chi, inputs.mass)


def k_plus(inputs: TheoryInputs) -> float:
    """
    K_+ = 2M log(max(2 sqrt(C_+ / 2M), 2 sqrt(lambda*_+ / 2M) + 1)).

    Se usa la forma con raíz cuadrada en ambas ramas.
    """
    mass = inputs.mass
    lam_pos = max(lambda_star(inputs.chi, mass), 0.0)
    first = 2.0 * math.sqrt(c_plus(inputs) / (2.0 * mass))
    second = 2.0 * math.sqrt(lam_pos / (2.0 * mass)) + 1.0
    return 2.0 * mass * math.log(max(first, second))


def rho_moment_bound(inputs: TheoryInputs, t: float) -> float:
    """Cota lineal del momento rho: K_+ + 2 M t."""
    _check_time(t)
    return k_plus(inputs) + 2.0 * inputs.mass * t


def rho_moment_jensen(mass: float, p_moment: float) -> float:
    """Cota de Jensen del momento rho por el momento p: 2M asinh(sqrt(I / 2M))."""
    return 2.0 * mass * math.asinh(math.sqrt(max(p_moment, 0.0) / (2.0 * mass)))


def rho_moment_log_chain(mass: float, p_moment: float) -> float:
    """Paso siguiente de la cadena: 2M log(2 sqrt(I / 2M) + 1) >= 2M asinh(sqrt(I / 2M))."""
    return 2.0 * mass * math.log(2.0 * math.sqrt(max(p_moment, 0.0) / (2.0 * mass)) + 1.0)


# =============================================================================
# ENTROPÍA
# =============================================================================

def c2_constant(mass: float) -> float:
    """C_2(M) = M log(e pi M), constante de la forma sinh del log-HLS."""
    return mass * math.log(math.e * math.pi * mass)


def k2_constant(mass: float) -> float:
    """K_2(M) = M log(4 e pi M), constante de la forma de Green del log-HLS."""
    return mass * math.log(4.0 * math.e * math.pi * mass)


def entropy_lower_bound(inputs: TheoryInputs, t: float) -> float:
    """Ent(n_t) >= -I0 - M + M e^{-2t} + M log(M / 2pi) - 2Mt."""
    _check_time(t)
    mass = inputs.mass
    return (-inputs.p_moment - mass + mass * math.exp(-2.0 * t)
            + mass * math.log(mass / (2.0 * math.pi)) - 2.0 * mass * t)


def entropy_upper_bound(inputs: TheoryInputs, T: float) -> float:
    """
    Cota superior de Ent(n_t) en [0, T] para chi M < 8 pi.

    (1 - chi M / 8pi)^{-1} (F0 + (chi M / 8pi)(K_2(M) + 2 K_+ + 4 M T))

    Raises:
        SupercriticalInputError: si chi M >= 8 pi
    """
    _check_time(T)
    ratio = inputs.chi_mass / CRITICAL_CHI_MASS
    if ratio >= 1.0 or is_critical(inputs.chi, inputs.mass):
        raise SupercriticalInputError("La cota superior de entropía exige chi M < 8 pi")
    mass = inputs.mass
    inner = k2_constant(mass) + 2.0 * k_plus(inputs) + 4.0 * mass * T
    return (inputs.free_energy + ratio * inner) / (1.0 - ratio)


def log_abs_entropy_bound(inputs: TheoryInputs, T: float, s: float = 1.0) -> float:
    """
    Cota C(T) de int n |log n| en [0, T].

    C(T) = Ent_sup(T) + 2/e + 2M log(2 pi s) + (C_+ e^{2T} + lambda*) / s
    """
    if not s > 0:
        raise ParameterError("s debe ser > 0")
    mass = inputs.mass
    return (entropy_upper_bound(inputs, T) + 2.0 / math.e
            + 2.0 * mass * math.log(2.0 * math.pi * s) + p_moment_bound(inputs, T) / s)


def excess_mass_bound(inputs: TheoryInputs, T: float, K: float, s: float = 1.0) -> float:
    """sup_{[0,T]} M_t(K) <= C(T) / log K para K > 1."""
    if not K > 1:
        raise ParameterError("K debe ser > 1")
    return log_abs_entropy_bound(inputs, T, s) / math.log(K)


def entropy_decay_bounds(inputs: TheoryInputs, t: float) -> Tuple[Optional[float], Optional[float]]:
    """
    Cotas de decaimiento de la entropía.

    Returns:
        (lineal si chi M <= 4pi, fuerte si chi M < 4pi); None fuera de régimen
    """
    _check_time(t)
    chi_mass = inputs.chi_mass
    mass = inputs.mass
    ent0 = inputs.entropy
    on_boundary = math.isclose(chi_mass, ENTROPY_DECAY_CHI_MASS, rel_tol=1e-12, abs_tol=0.0)
    linear = None
    if chi_mass <= ENTROPY_DECAY_CHI_MASS or on_boundary:
        linear = ent0 - inputs.chi * mass**2 * t / ENTROPY_DECAY_CHI_MASS
    strong = None
    if chi_mass < ENTROPY_DECAY_CHI_MASS and not on_boundary:
        if chi_mass == 0:
            growth = t
        else:
            growth = (ENTROPY_DECAY_CHI_MASS / chi_mass - 1.0) * -math.expm1(-chi_mass * t / ENTROPY_DECAY_CHI_MASS)
        inside = math.exp(-ent0 / mass) + 4.0 * math.pi * math.e / mass * growth
        strong = -inputs.chi * mass**2 * t / ENTROPY_DECAY_CHI_MASS - mass * math.log(inside)
    return linear, strong


# =============================================================================
# L^q Y HLS
# =============================================================================

def h_of_q(q: float) -> float:
    """h(q) = 4q / (q + 1)^2."""
    if not q >= 1:
        raise ParameterError("q debe ser >= 1")
    return 4.0 * q / (q + 1.0) ** 2


def lq_monotonicity_threshold(q: float) -> float:
    """||n_t||_q es no creciente cuando chi M <= 4 pi h(q)."""
    return 4.0 * math.pi * h_of_q(q)


def hls_constant(lam: float) -> float:
    """C_{2,lambda} = pi^{lambda/2} Gamma(1 - lambda/2) / Gamma(2 - lambda/2)."""
    if not 0 < lam < 2:
        raise ParameterError("lambda debe estar en (0, 2)")
    return math.pi ** (lam / 2.0) * float(gamma(1.0 - lam / 2.0)) / float(gamma(2.0 - lam / 2.0))


def hls_exponent(lam: float) -> float:
    """Exponente p = 4 / (4 - lambda) de la desigualdad HLS en dimensión 2."""
    if not 0 < lam < 2:
        raise ParameterError("lambda debe estar en (0, 2)")
    return 4.0 / (4.0 - lam)


def theory_report(inputs: TheoryInputs) -> BoundsReport:
    """Evalúa todas las cantidades cerradas para unos TheoryInputs."""
    return BoundsReport(
        inputs=inputs,
        lambda_star=lambda_star(inputs.chi, inputs.mass),
        supercritical=is_supercritical(inputs.chi, inputs.mass),
        blowup_condition=blowup_condition(inputs),
        regime=classify_regime(inputs.chi, inputs.mass, inputs.p_moment),
        t_bl=blowup_time_bound(inputs),
        c_plus=c_plus(inputs),
        k_plus=k_plus(inputs),
        h_of_q=h_of_q
    )
