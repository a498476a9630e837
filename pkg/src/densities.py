"""
Módulo de densidades de prueba.
Perfiles radiales en la variable p = cosh(rho) - 1 (donde dV = dp dtheta) y
densidades sobre el disco con evaluador, muestreador con semilla y nodos de
cuadratura: gaussiana hiperbólica, anillo, trasladada por Möbius y mezcla.
"""

import math
from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NonDifferentiableError, ParameterError
from .geometry import _coords, _norm_sq, mobius_raw, origin_distance_raw
from .models import InitialSpec
from .utils import stable_hash

# Tolerancia de la comprobación de masa en la construcción
MASS_CHECK_RTOL = 1e-6


def gauss_panels(edges: Sequence[float], order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodos y pesos de Gauss-Legendre de orden `order` en cada panel [e_k, e_{k+1}]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (b + a)
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()


def p_to_radius(p: np.ndarray) -> np.ndarray:
    """Radio euclídeo |x| del punto con peso p: |x|^2 = p / (p + 2)."""
    return np.sqrt(p / (p + 2.0))


def p_to_rho(p):
    """rho = arccosh(1 + p) escrito sin cancelación."""
    return 2.0 * np.arcsinh(np.sqrt(np.asarray(p, dtype=float) / 2.0))


# =============================================================================
# PERFILES RADIALES (MASA UNIDAD)
# =============================================================================

class RadialProfile(ABC):
    """Perfil radial f(p) con 2pi int f dp = 1."""

    p_support: float = 0.0

    @abstractmethod
    def value(self, p: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def derivative(self, p: np.ndarray) -> np.ndarray:
        """df/dp."""

    @abstractmethod
    def panels(self) -> np.ndarray:
        """Bordes de paneles en p que cubren el soporte y aíslan las discontinuidades."""

    @abstractmethod
    def sample_p(self, n: int, rng: np.random.Generator) -> np.ndarray:
        ...

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        ...

    @property
    def rho_support(self) -> float:
        return float(p_to_rho(self.p_support))


class GaussianProfile(RadialProfile):
    """q_s(p) = exp(-p/s) / (2 pi s); su momento p vale s."""

    def __init__(self, s: float):
        if not s > 0:
            raise ParameterError("La gaussiana necesita s > 0")
        self.s = float(s)
        self.p_support = 40.0 * self.s

    def value(self, p):
        return np.exp(-np.asarray(p, dtype=float) / self.s) / (2.0 * np.pi * self.s)

    def derivative(self, p):
        return -self.value(p) / self.s

    def panels(self):
        return self.s * np.array([0.0, 1.0, 3.0, 8.0, 18.0, 40.0])

    def sample_p(self, n, rng):
        return rng.exponential(self.s, n)

    def describe(self):
        return {'kind': 'gaussian', 's': self.s}


class AnnulusProfile(RadialProfile):
    """Densidad uniforme (respecto de dV) en a <= rho <= b."""

    def __init__(self, a: float, b: float):
        if not (a >= 0 and b > a):
            raise ParameterError(f"Anillo degenerado: se necesita 0 <= a < b (a={a}, b={b})")
        self.a, self.b = float(a), float(b)
        self.pa = 2.0 * math.sinh(self.a / 2.0) ** 2
        self.pb = 2.0 * math.sinh(self.b / 2.0) ** 2
        self.p_support = self.pb
        self._height = 1.0 / (2.0 * np.pi * (self.pb - self.pa))

    def value(self, p):
        p = np.asarray(p, dtype=float)
        return np.where((p >= self.pa) & (p <= self.pb), self._height, 0.0)

    def derivative(self, p):
        raise NonDifferentiableError("El anillo no es C^1 en sus bordes")

    def panels(self):
        return np.array([self.pa, self.pb])

    def sample_p(self, n, rng):
        # cosh(rho) uniforme en [cosh a, cosh b]
        return rng.uniform(self.pa, self.pb, n)

    def describe(self):
        return {'kind': 'annulus', 'a': self.a, 'b': self.b}


class MixtureProfile(RadialProfile):
    """Combinación convexa de perfiles concéntricos."""

    def __init__(self, components: List[RadialProfile], weights: Sequence[float]):
        weights = np.asarray(weights, dtype=float)
        if len(components) == 0 or weights.shape != (len(components),):
            raise ParameterError("La mezcla necesita un peso por componente")
        if np.any(weights < 0) or not weights.sum() > 0:
            raise ParameterError("Los pesos de la mezcla deben ser >= 0 y no todos nulos")
        self.components = list(components)
        self.weights = weights / weights.sum()
        self.p_support = max(c.p_support for c in self.components)

    def value(self, p):
        return sum(w * c.value(p) for w, c in zip(self.weights, self.components))

    def derivative(self, p):
        return sum(w * c.derivative(p) for w, c in zip(self.weights, self.components))

    def panels(self):
        edges = np.concatenate([c.panels() for c in self.components])
        return np.unique(edges)

    def sample_p(self, n, rng):
        counts = rng.multinomial(n, self.weights)
        parts = [c.sample_p(k, rng) for c, k in zip(self.components, counts)]
        return rng.permutation(np.concatenate(parts))

    def describe(self):
        return {
            'kind': 'mixture',
            'components': [c.describe() for c in self.components],
            'weights': self.weights.tolist()
        }


def profile_from_spec(spec: InitialSpec, mass: float) -> RadialProfile:
    """
    Construye el perfil radial de masa unidad descrito por un InitialSpec.

    Una gaussiana puede darse por s o por su momento p total (s = I0 / M).
    """
    if spec.kind == 'gaussian':
        if spec.s is not None:
            return GaussianProfile(spec.s)
        if spec.p_moment is not None:
            return GaussianProfile(spec.p_moment / mass)
        raise ParameterError("La gaussiana necesita 's' o 'p_moment'")
    if spec.kind == 'annulus':
        if spec.a is None or spec.b is None:
            raise ParameterError("El anillo necesita 'a' y 'b'")
        return AnnulusProfile(spec.a, spec.b)
    if spec.kind == 'mixture':
        return MixtureProfile([profile_from_spec(c, mass) for c in spec.components], spec.weights)
    raise ParameterError(f"Tipo de perfil desconocido: {spec.kind}")


# =============================================================================
# DENSIDADES DE PRUEBA EN EL DISCO
# =============================================================================

class DensityKind(Enum):
    """Familias de densidades de prueba."""
    HYPERBOLIC_GAUSSIAN = "hyperbolic_gaussian"
    MOBIUS_TRANSLATED = "mobius_translated"
    ANNULUS = "annulus"
    MIXTURE = "mixture"


class TestDensity(ABC):
    """Densidad sobre el disco con evaluador, muestreador y cuadratura."""

    __test__ = False
    kind: DensityKind

    def __init__(self, mass: float):
        if not mass >= 0:
            raise ParameterError("La masa debe ser >= 0")
        self.mass = float(mass)

    @abstractmethod
    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Valor de la densidad en puntos (..., 2)."""

    @abstractmethod
    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n puntos distribuidos según la densidad normalizada."""

    @abstractmethod
    def quadrature(self, n_radial: int = 32, n_angular: int = 32) -> Tuple[np.ndarray, np.ndarray]:
        """Nodos y pesos de masa (f dV) que discretizan la medida f dV."""

    @property
    @abstractmethod
    def support_radius(self) -> float:
        """Radio hiperbólico (desde el origen) que contiene el soporte efectivo."""

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        ...

    def radial_profile(self) -> Optional[RadialProfile]:
        """Perfil de masa unidad si la densidad es radial respecto del origen."""
        return None

    def isometric_profile(self) -> Optional[RadialProfile]:
        """Perfil radial respecto de algún centro (invariante por isometrías)."""
        return self.radial_profile()

    @property
    def is_radial(self) -> bool:
        return self.radial_profile() is not None

    @property
    def label(self) -> str:
        params = self.describe()
        inner = ",".join(f"{k}={v:g}" for k, v in params.items() if isinstance(v, float))
        return f"{self.kind.value}({inner})"

    def fingerprint(self) -> int:
        """Entero estable que identifica la densidad (para sembrar flujos Monte Carlo)."""
        return stable_hash(self.describe())

    def integrate(self, g, n_radial: int = 32, n_angular: int = 32) -> float:
        """int g f dV con la cuadratura propia de la densidad."""
        points, weights = self.quadrature(n_radial, n_angular)
        return float(np.sum(g(points) * weights))

    def _check_mass(self):
        _, weights = self.quadrature(32, 4)
        total = float(np.sum(weights))
        if abs(total - self.mass) > MASS_CHECK_RTOL * max(self.mass, 1.0):
            raise ParameterError(
                f"La densidad integra {total:.9g} en lugar de la masa declarada {self.mass:.9g}"
            )


class RadialDensity(TestDensity):
    """Densidad radial respecto del origen construida desde un perfil."""

    def __init__(self, profile: RadialProfile, mass: float, kind: DensityKind):
        super().__init__(mass)
        self.profile = profile
        self.kind = kind
        self._check_mass()

    def evaluate(self, points):
        r2 = _norm_sq(np.asarray(points, dtype=float))
        p = 2.0 * r2 / (1.0 - r2)
        return self.mass * self.profile.value(p)

    def sample(self, n, rng):
        p = self.profile.sample_p(n, rng)
        theta = rng.uniform(0.0, 2.0 * np.pi, n)
        r = p_to_radius(p)
        return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)

    def quadrature(self, n_radial=32, n_angular=32):
        p, wp = gauss_panels(self.profile.panels(), n_radial)
        theta = 2.0 * np.pi * (np.arange(n_angular) + 0.5) / n_angular
        r = p_to_radius(p)
        points = np.stack([
            (r[:, None] * np.cos(theta)[None, :]).ravel(),
            (r[:, None] * np.sin(theta)[None, :]).ravel()
        ], axis=-1)
        weights = (self.mass * self.profile.value(p) * wp)[:, None] * np.full(n_angular, 2.0 * np.pi / n_angular)
        return points, weights.ravel()

    @property
    def support_radius(self):
        return self.profile.rho_support

    def radial_profile(self):
        return self.profile

    def describe(self):
        data = dict(self.profile.describe())
        data['mass'] = self.mass
        return data


class TranslatedDensity(TestDensity):
    """Empuje de una densidad base por la traslación de Möbius T_c (T_c(0) = c)."""

    kind = DensityKind.MOBIUS_TRANSLATED

    def __init__(self, base: TestDensity, center):
        super().__init__(base.mass)
        self.base = base
        self.center = _coords(center).reshape(2)

    def evaluate(self, points):
        points = np.asarray(points, dtype=float)
        pulled = mobius_raw(np.broadcast_to(self.center, points.shape), points)
        return self.base.evaluate(pulled)

    def sample(self, n, rng):
        z = self.base.sample(n, rng)
        return mobius_raw(np.broadcast_to(self.center, z.shape), z)

    def quadrature(self, n_radial=32, n_angular=32):
        z, weights = self.base.quadrature(n_radial, n_angular)
        return mobius_raw(np.broadcast_to(self.center, z.shape), z), weights

    @property
    def support_radius(self):
        return self.base.support_radius + float(origin_distance_raw(self.center))

    def radial_profile(self):
        if np.all(self.center == 0.0):
            return self.base.radial_profile()
        return None

    def isometric_profile(self):
        return self.base.isometric_profile()

    def describe(self):
        return {
            'kind': 'mobius_translated',
            'base': self.base.describe(),
            'c1': float(self.center[0]),
            'c2': float(self.center[1]),
            'mass': self.mass
        }


class MixtureDensity(TestDensity):
    """Mezcla de densidades (posiblemente no concéntricas) con pesos de masa."""

    kind = DensityKind.MIXTURE

    def __init__(self, components: List[TestDensity], weights: Sequence[float], mass: float):
        super().__init__(mass)
        weights = np.asarray(weights, dtype=float)
        if len(components) == 0 or weights.shape != (len(components),):
            raise ParameterError("La mezcla necesita un peso por componente")
        if np.any(weights < 0) or not weights.sum() > 0:
            raise ParameterError("Los pesos de la mezcla deben ser >= 0 y no todos nulos")
        if any(c.mass <= 0 for c in components):
            raise ParameterError("Cada componente de la mezcla debe tener masa > 0")
        self.components = list(components)
        self.weights = weights / weights.sum()
        self._check_mass()

    def _scales(self):
        return [self.mass * w / c.mass for w, c in zip(self.weights, self.components)]

    def evaluate(self, points):
        return sum(k * c.evaluate(points) for k, c in zip(self._scales(), self.components))

    def sample(self, n, rng):
        counts = rng.multinomial(n, self.weights)
        parts = [c.sample(k, rng) for c, k in zip(self.components, counts)]
        return rng.permutation(np.concatenate(parts, axis=0), axis=0)

    def quadrature(self, n_radial=32, n_angular=32):
        points, weights = [], []
        for k, c in zip(self._scales(), self.components):
            pts, w = c.quadrature(n_radial, n_angular)
            points.append(pts)
            weights.append(k * w)
        return np.concatenate(points, axis=0), np.concatenate(weights)

    @property
    def support_radius(self):
        return max(c.support_radius for c in self.components)

    def radial_profile(self):
        profiles = [c.radial_profile() for c in self.components]
        if any(p is None for p in profiles):
            return None
        return MixtureProfile(profiles, self.weights)

    def describe(self):
        return {
            'kind': 'mixture',
            'components': [c.describe() for c in self.components],
            'weights': self.weights.tolist(),
            'mass': self.mass
        }


# =============================================================================
# CONSTRUCTORES
# =============================================================================

def hyperbolic_gaussian(s: float, mass: float = 1.0) -> RadialDensity:
    """M q_s con q_s = exp(-p/s) / (2 pi s)."""
    return RadialDensity(GaussianProfile(s), mass, DensityKind.HYPERBOLIC_GAUSSIAN)


def annulus(a: float, b: float, mass: float = 1.0) -> RadialDensity:
    """Densidad uniforme en el anillo a <= rho <= b."""
    return RadialDensity(AnnulusProfile(a, b), mass, DensityKind.ANNULUS)


def mobius_translated(base: TestDensity, center) -> TranslatedDensity:
    """Traslada `base` para que su centro quede en `center`."""
    return TranslatedDensity(base, center)


def mixture(components: List[TestDensity], weights: Sequence[float], mass: float = 1.0) -> MixtureDensity:
    """Mezcla de densidades con masa total `mass`."""
    return MixtureDensity(components, weights, mass)


def zero_density() -> RadialDensity:
    """Densidad nula (masa 0) con soporte nominal de una gaussiana unidad."""
    return RadialDensity(GaussianProfile(1.0), 0.0, DensityKind.HYPERBOLIC_GAUSSIAN)


def scaled(density: TestDensity, factor: float) -> TestDensity:
    """La misma densidad multiplicada por `factor` (masa factor * M)."""
    if isinstance(density, RadialDensity):
        return RadialDensity(density.profile, density.mass * factor, density.kind)
    if isinstance(density, TranslatedDensity):
        return TranslatedDensity(scaled(density.base, factor), density.center)
    if isinstance(density, MixtureDensity):
        return MixtureDensity(density.components, density.weights, density.mass * factor)
    raise ParameterError(f"No se puede escalar {type(density).__name__}")
