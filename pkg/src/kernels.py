"""
Módulo de núcleos.
Función de Green de -Delta_H, gradiente de H(x, y) = log|T_x(y)|^2, el factor
L(x, y) del argumento del virial y la evaluación por cuadratura del potencial
químico c = G * n.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import CoincidenceError, ParameterError, QuadratureBudgetError, SingularityError
from .geometry import (
    PointLike, _coords, _norm_sq, distance_raw, grad_weight_p, metric_factor,
    mobius_raw, origin_distance_raw, polar_raw, v_raw
)

logger = logging.getLogger(__name__)

# Constante de la función de Green en dimensión 2
K1 = 1.0 / (2.0 * np.pi)
# Nodos más cercanos que esto (en rho) al punto de evaluación se omiten
NODE_EXCLUSION = 1e-8
COINCIDENCE_TOL = 1e-12


@dataclass
class KernelValue:
    """Valor del núcleo de Green y su gradiente euclídeo en x."""
    g: float
    grad: np.ndarray


@dataclass
class QuadratureSpec:
    """Nodos iniciales (radial x angular), tope y tolerancia relativa de la cuadratura."""
    n_radial: int = 32
    n_angular: int = 64
    max_nodes: int = 2_000_000
    rtol: float = 1e-7


def green_value(rho):
    """
    Función de Green G_H = -(1/2pi) log tanh(rho/2).

    Args:
        rho: Distancia hiperbólica (> 0)

    Returns:
        Valor positivo, decreciente en rho
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise SingularityError("G_H es singular en rho = 0")
    value = -K1 * np.log(np.tanh(rho / 2.0))
    return float(value) if value.ndim == 0 else value


def green_radial_derivative(rho):
    """dG_H/drho = -1 / (2pi sinh rho)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise SingularityError("dG_H/drho es singular en rho = 0")
    value = -K1 / np.sinh(rho)
    return float(value) if value.ndim == 0 else value


def green_kernel(x: PointLike, y: PointLike) -> KernelValue:
    """G_H(x, y) y su gradiente euclídeo en x (G_H = -H / 4pi)."""
    rho = distance_raw(_coords(x), _coords(y))
    return KernelValue(g=green_value(rho), grad=-grad_x_H(x, y) / (4.0 * np.pi))


def log_mobius_norm_sq(x: PointLike, y: PointLike):
    """H(x, y) = log |T_x(y)|^2 = log(|x - y|^2 / V)."""
    xa, ya = _coords(x), _coords(y)
    value = np.log(_norm_sq(xa - ya) / v_raw(xa, ya))
    return float(value) if np.ndim(value) == 0 else value


def _grad_x_H_raw(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    d = x - y
    d2 = _norm_sq(d)
    v = v_raw(x, y)
    one_x = 1.0 - _norm_sq(x)
    one_y = 1.0 - _norm_sq(y)
    first = (2.0 * one_x * one_y / (d2 * v))[..., None] * d
    second = (2.0 * one_y / v)[..., None] * x
    return first + second


def grad_x_H(x: PointLike, y: PointLike) -> np.ndarray:
    """
    Gradiente euclídeo de H respecto de x.

    2(1-|x|^2)(1-|y|^2)(x-y) / (|x-y|^2 V) + 2(1-|y|^2) x / V

    Raises:
        CoincidenceError: si |x - y| < 1e-12
    """
    xa, ya = _coords(x), _coords(y)
    if np.any(np.sqrt(_norm_sq(xa - ya)) < COINCIDENCE_TOL):
        raise CoincidenceError("grad_x H no está definido para x = y")
    return _grad_x_H_raw(xa, ya)


def l_factor(x: PointLike, y: PointLike):
    """L(x, y) = 2 (1 - |x|^2 |y|^2) / V(x, y)."""
    xa, ya = _coords(x), _coords(y)
    value = 2.0 * (1.0 - _norm_sq(xa) * _norm_sq(ya)) / v_raw(xa, ya)
    return float(value) if np.ndim(value) == 0 else value


def l_assembly(x: PointLike, y: PointLike):
    """
    L ensamblado desde sus piezas: el gradiente hiperbólico de p contra el de H,
    simetrizado en (x, y).
    """
    xa, ya = _coords(x), _coords(y)
    left = np.asarray(metric_factor(xa))[..., None] * grad_weight_p(xa)
    right = np.asarray(metric_factor(ya))[..., None] * grad_weight_p(ya)
    value = np.sum(left * grad_x_H(xa, ya), axis=-1) + np.sum(right * grad_x_H(ya, xa), axis=-1)
    return float(value) if np.ndim(value) == 0 else value


def l_lower_bound(x: PointLike, y: PointLike):
    """Cota inferior 2 (1 - |x||y|) / (1 + |x||y|) que se sigue de V <= (1 + |x||y|)^2."""
    xa, ya = _coords(x), _coords(y)
    ab = np.sqrt(_norm_sq(xa) * _norm_sq(ya))
    value = 2.0 * (1.0 - ab) / (1.0 + ab)
    return float(value) if np.ndim(value) == 0 else value


# =============================================================================
# CUADRATURA DEL POTENCIAL
# =============================================================================

def _gauss_unit(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodos y pesos de Gauss-Legendre en [0, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def _centered_nodes(x: np.ndarray, d_max: float, n_radial: int, n_angular: int):
    """
    Nodos (d, alpha) centrados en x: y = T_x(z), z a distancia d del origen.

    Usa d = d_max u^2 para suavizar la singularidad logarítmica en d = 0.
    Devuelve (puntos y, pesos dV, distancias d) sin los nodos con d < 1e-8.
    """
    u, wu = _gauss_unit(n_radial)
    d = d_max * u**2
    wd = 2.0 * d_max * u * wu
    alpha = 2.0 * np.pi * np.arange(n_angular) / n_angular
    dd, aa = np.meshgrid(d, alpha, indexing='ij')
    weights = (wd * np.sinh(d))[:, None] * np.full(n_angular, 2.0 * np.pi / n_angular)[None, :]
    keep = dd.ravel() >= NODE_EXCLUSION
    z = polar_raw(dd.ravel()[keep], aa.ravel()[keep])
    y = mobius_raw(np.broadcast_to(x, z.shape), z)
    return y, weights.ravel()[keep], dd.ravel()[keep]


def _adaptive(evaluate, nodes: QuadratureSpec, what: str):
    """Duplica nodos radiales y angulares hasta que dos estimaciones consecutivas coinciden."""
    n_r, n_a = nodes.n_radial, nodes.n_angular
    previous = evaluate(n_r, n_a)
    while True:
        n_r, n_a = 2 * n_r, 2 * n_a
        if n_r * n_a > nodes.max_nodes:
            raise QuadratureBudgetError(
                f"{what}: tolerancia {nodes.rtol:g} no alcanzada con {nodes.max_nodes} nodos",
                partial=previous
            )
        current = evaluate(n_r, n_a)
        scale = max(np.max(np.abs(current)), 1e-300)
        if np.max(np.abs(current - previous)) <= nodes.rtol * scale:
            logger.debug("%s convergida con %d x %d nodos", what, n_r, n_a)
            return current
        previous = current


def potential_quadrature(density, x: PointLike, nodes: QuadratureSpec = None) -> float:
    """
    Potencial c(x) = int G_H(x, y) n(y) dV_y por cuadratura.

    Si x cae fuera del soporte declarado de la densidad el núcleo es suave y se
    integran los nodos propios de la densidad; en otro caso se usan nodos
    (rho, theta) centrados en x mediante y = T_x(z).

    Args:
        density: TestDensity (evaluate, support_radius, quadrature)
        x: Punto de evaluación
        nodes: Especificación de la cuadratura (>= 100 nodos)

    Returns:
        c(x)

    Raises:
        QuadratureBudgetError: si no se alcanza la tolerancia
    """
    nodes = nodes or QuadratureSpec()
    if nodes.n_radial * nodes.n_angular < 100:
        raise ParameterError("La cuadratura necesita al menos 100 nodos")
    xa = _coords(x).reshape(2)
    if density.mass == 0:
        return 0.0
    rho_x = float(origin_distance_raw(xa))
    support = density.support_radius

    if rho_x > support + 1e-6:
        def evaluate(n_r, n_a):
            points, mass_weights = density.quadrature(n_r, n_a)
            return np.sum(green_value(distance_raw(xa[None, :], points)) * mass_weights)
    else:
        d_max = support + rho_x

        def evaluate(n_r, n_a):
            y, w, d = _centered_nodes(xa, d_max, n_r, n_a)
            return np.sum(green_value(d) * density.evaluate(y) * w)

    return float(_adaptive(evaluate, nodes, "potential_quadrature"))


def potential_gradient_quadrature(density, x: PointLike, nodes: QuadratureSpec = None) -> np.ndarray:
    """
    Gradiente euclídeo de c en x: -(1/4pi) int grad_x H(x, y) n(y) dV_y.

    En nodos centrados en x el integrando multiplicado por sinh d queda acotado.
    """
    nodes = nodes or QuadratureSpec()
    xa = _coords(x).reshape(2)
    if density.mass == 0:
        return np.zeros(2)
    rho_x = float(origin_distance_raw(xa))
    support = density.support_radius

    if rho_x > support + 1e-6:
        def evaluate(n_r, n_a):
            points, mass_weights = density.quadrature(n_r, n_a)
            grads = _grad_x_H_raw(np.broadcast_to(xa, points.shape), points)
            return -np.sum(grads * mass_weights[:, None], axis=0) / (4.0 * np.pi)
    else:
        d_max = support + rho_x

        def evaluate(n_r, n_a):
            y, w, _ = _centered_nodes(xa, d_max, n_r, n_a)
            grads = _grad_x_H_raw(np.broadcast_to(xa, y.shape), y)
            values = density.evaluate(y) * w
            return -np.sum(grads * values[:, None], axis=0) / (4.0 * np.pi)

    return _adaptive(evaluate, nodes, "potential_gradient_quadrature")


def potential_radial_derivative(density, rho: float, nodes: QuadratureSpec = None) -> float:
    """d c / d rho en el punto (rho, 0) a partir del gradiente euclídeo (dr/drho = (1 - r^2)/2)."""
    r = np.tanh(rho / 2.0)
    grad = potential_gradient_quadrature(density, np.array([r, 0.0]), nodes)
    return float(grad[0] * (1.0 - r * r) / 2.0)
