"""
Módulo de geometría del disco de Poincaré.
Distancias, traslaciones de Möbius, factores métricos, el peso exponencial p
y el laplaciano de Laplace-Beltrami radial.

Todas las funciones aceptan DiskPoint o arrays con última dimensión 2 y
vectorizan sobre el resto de dimensiones.
"""

from typing import Union

import numpy as np

from .errors import DomainError, GridTooCoarseError
from .models import BOUNDARY_MARGIN, DiskPoint

PointLike = Union[DiskPoint, np.ndarray]


def _coords(x: PointLike) -> np.ndarray:
    """Convierte a array (..., 2) validando que los puntos están en el disco."""
    arr = x.to_array() if isinstance(x, DiskPoint) else np.asarray(x, dtype=float)
    if arr.shape[-1:] != (2,):
        raise DomainError(f"Se esperaban coordenadas (..., 2), recibido {arr.shape}")
    norms = np.sqrt(np.sum(arr * arr, axis=-1))
    if not np.all(np.isfinite(norms)) or np.any(norms > 1.0 - BOUNDARY_MARGIN):
        raise DomainError("Punto fuera del disco abierto o demasiado cerca del borde")
    return arr


def _norm_sq(x: np.ndarray) -> np.ndarray:
    return np.sum(x * x, axis=-1)


def _wrap(result: np.ndarray, *inputs: PointLike):
    """Devuelve float/DiskPoint si todas las entradas eran DiskPoint."""
    if all(isinstance(p, DiskPoint) for p in inputs):
        if result.shape == (2,):
            return DiskPoint.from_array(result)
        return float(result)
    return result


# =============================================================================
# NÚCLEO SIN VALIDACIÓN (uso interno de kernels y densidades)
# =============================================================================

def v_raw(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """V(x, y) = |x - y|^2 + (1 - |x|^2)(1 - |y|^2), forma simétrica bit a bit."""
    d = x - y
    return _norm_sq(d) + (1.0 - _norm_sq(x)) * (1.0 - _norm_sq(y))


def mobius_raw(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """T_x(y) = (|y - x|^2 x - (1 - |x|^2)(y - x)) / V(x, y)."""
    d = y - x
    num = _norm_sq(d)[..., None] * x - (1.0 - _norm_sq(x))[..., None] * d
    return num / v_raw(x, y)[..., None]


def distance_raw(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """rho(x, y) = 2 artanh |T_x(y)| con |T_x(y)|^2 = |x - y|^2 / V."""
    t = np.sqrt(_norm_sq(x - y) / v_raw(x, y))
    return 2.0 * np.arctanh(np.minimum(t, 1.0 - 1e-16))


def origin_distance_raw(x: np.ndarray) -> np.ndarray:
    return 2.0 * np.arctanh(np.sqrt(_norm_sq(x)))


def polar_raw(rho, theta) -> np.ndarray:
    """Punto a distancia rho del origen y ángulo theta."""
    r = np.tanh(np.asarray(rho, dtype=float) / 2.0)
    theta = np.asarray(theta, dtype=float)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)


# =============================================================================
# OPERACIONES PÚBLICAS
# =============================================================================

def hyperbolic_distance(x: PointLike, y: PointLike):
    """
    Distancia hiperbólica calculada a través de |T_x(y)|.

    Args:
        x: Punto (o array de puntos) del disco
        y: Punto (o array de puntos) del disco

    Returns:
        rho(x, y) >= 0 (float si ambos son DiskPoint)
    """
    return _wrap(distance_raw(_coords(x), _coords(y)), x, y)


def mobius_translate(x: PointLike, y: PointLike):
    """
    Traslación de Möbius T_x(y); envía x al origen y es involutiva.

    Args:
        x: Centro de la traslación
        y: Punto a trasladar

    Returns:
        T_x(y), estrictamente dentro del disco
    """
    return _wrap(mobius_raw(_coords(x), _coords(y)), x, y)


def v_factor(x: PointLike, y: PointLike):
    """
    Factor V(x, y) = 1 - 2 x.y + |x|^2 |y|^2.

    Returns:
        V > 0, igual a |x - y|^2 + (1 - |x|^2)(1 - |y|^2)
    """
    xa, ya = _coords(x), _coords(y)
    value = 1.0 - 2.0 * np.sum(xa * ya, axis=-1) + _norm_sq(xa) * _norm_sq(ya)
    return _wrap(value, x, y)


def weight_p(rho) -> np.ndarray:
    """
    Peso exponencial p = cosh(rho) - 1 = 2 sinh^2(rho / 2).

    Args:
        rho: Distancia(s) al origen, rho >= 0

    Returns:
        p(rho), con la forma 2 sinh^2 para evitar cancelación cerca de 0
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError("rho debe ser >= 0")
    value = 2.0 * np.sinh(rho / 2.0) ** 2
    return float(value) if value.ndim == 0 else value


def weight_p_point(x: PointLike):
    """Peso p en forma puntual: 2|x|^2 / (1 - |x|^2)."""
    xa = _coords(x)
    r2 = _norm_sq(xa)
    value = 2.0 * r2 / (1.0 - r2)
    return float(value) if isinstance(x, DiskPoint) else value


def grad_weight_p(x: PointLike) -> np.ndarray:
    """Gradiente euclídeo del peso: 4x / (1 - |x|^2)^2."""
    xa = _coords(x)
    return 4.0 * xa / ((1.0 - _norm_sq(xa)) ** 2)[..., None]


def metric_factor(x: PointLike):
    """Factor conforme ((1 - |x|^2) / 2)^2 que pasa de gradiente euclídeo a hiperbólico."""
    xa = _coords(x)
    value = ((1.0 - _norm_sq(xa)) / 2.0) ** 2
    return float(value) if isinstance(x, DiskPoint) else value


def distance_from_origin(x: PointLike):
    """rho(x, 0) = log((1 + |x|) / (1 - |x|))."""
    value = origin_distance_raw(_coords(x))
    return float(value) if isinstance(x, DiskPoint) else value


def sinh_half_distance(x: PointLike, y: PointLike):
    """sinh(rho(x, y) / 2) = |x - y| / sqrt((1 - |x|^2)(1 - |y|^2))."""
    xa, ya = _coords(x), _coords(y)
    value = np.sqrt(_norm_sq(xa - ya) / ((1.0 - _norm_sq(xa)) * (1.0 - _norm_sq(ya))))
    return _wrap(value, x, y)


def point_from_polar(rho, theta) -> np.ndarray:
    """Coordenadas euclídeas del punto (rho, theta); rechaza puntos pegados al borde."""
    return _coords(polar_raw(rho, theta))


def laplace_beltrami_radial(f, rho) -> np.ndarray:
    """
    Aproximación de segundo orden de f'' + coth(rho) f' en una rejilla uniforme.

    En rho = 0 se usa el límite 2 f''(0) con f''(0) ~ 2 (f_1 - f_0) / h^2
    (f par). En los extremos restantes se usan esténciles unilaterales de
    cuatro puntos (tres si la rejilla es mínima, entonces de primer orden).

    Args:
        f: Valores de la función radial
        rho: Rejilla uniforme en rho (>= 3 puntos)

    Returns:
        Valores de Delta_H f en la rejilla
    """
    f = np.asarray(f, dtype=float)
    rho = np.asarray(rho, dtype=float)
    n = rho.size
    if n < 3 or f.shape != rho.shape:
        raise GridTooCoarseError("Se necesitan al menos 3 puntos con la misma forma que f")
    h = rho[1] - rho[0]
    if h <= 0 or not np.allclose(np.diff(rho), h, rtol=1e-9, atol=0.0):
        raise GridTooCoarseError("La rejilla en rho debe ser uniforme y creciente")
    if rho[0] < 0:
        raise DomainError("rho debe ser >= 0")

    d2 = np.empty(n)
    d1 = np.empty(n)
    d2[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h**2
    d1[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)

    # Extremo derecho (y el izquierdo si no es el origen)
    if n >= 4:
        d2[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / h**2
        d2[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h**2
    else:
        d2[-1] = (f[-1] - 2.0 * f[-2] + f[-3]) / h**2
        d2[0] = (f[0] - 2.0 * f[1] + f[2]) / h**2
    d1[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    d1[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)

    out = np.empty(n)
    out[1:] = d2[1:] + d1[1:] / np.tanh(rho[1:])
    if rho[0] == 0.0:
        out[0] = 4.0 * (f[1] - f[0]) / h**2
    else:
        out[0] = d2[0] + d1[0] / np.tanh(rho[0])
    return out
