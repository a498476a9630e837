"""
Módulo de modelos de datos (dataclasses).
Define las estructuras compartidas por el solver radial, las cotas teóricas,
el banco de desigualdades y la línea de comandos.
"""

import math
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from .errors import DomainError, ParameterError

# Distancia mínima al borde del disco admitida en las entradas
BOUNDARY_MARGIN = 1e-9

# Las distancias hiperbólicas son reales no negativos
HyperbolicDistance = float


class RunOutcome(Enum):
    """Resultados posibles de una simulación."""
    COMPLETED = "completed"
    BLOWUP_DETECTED = "blowup_detected"
    BUDGET_EXHAUSTED = "budget_exhausted"


class Regime(Enum):
    """Régimen predicho por las cotas cerradas para (chi, M, I0)."""
    SUBCRITICAL = "subcritical"
    BLOWUP_CONDITION = "blowup_condition"
    UNCOVERED = "uncovered"


class Command(Enum):
    """Subcomandos del experimento."""
    SIMULATE = "simulate"
    SWEEP = "sweep"
    BOUNDS = "bounds"
    INEQUALITIES = "inequalities"


# =============================================================================
# GEOMETRÍA
# =============================================================================

@dataclass(frozen=True)
class DiskPoint:
    """Punto del disco de Poincaré en coordenadas euclídeas."""
    x1: float = 0.0
    x2: float = 0.0

    def __post_init__(self):
        norm = math.hypot(self.x1, self.x2)
        if not math.isfinite(norm) or norm > 1.0 - BOUNDARY_MARGIN:
            raise DomainError(f"El punto ({self.x1}, {self.x2}) no está en el disco abierto")

    @property
    def norm(self) -> float:
        """Norma euclídea |x|."""
        return math.hypot(self.x1, self.x2)

    def to_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2], dtype=float)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.to_array(), dtype=dtype)

    @classmethod
    def from_array(cls, values) -> 'DiskPoint':
        """Crea un DiskPoint desde un array de dos componentes."""
        arr = np.asarray(values, dtype=float).reshape(2)
        return cls(x1=float(arr[0]), x2=float(arr[1]))

    @classmethod
    def from_polar(cls, rho: float, theta: float = 0.0) -> 'DiskPoint':
        """Crea el punto a distancia hiperbólica rho del origen con ángulo theta."""
        r = math.tanh(rho / 2.0)
        return cls(x1=r * math.cos(theta), x2=r * math.sin(theta))


# =============================================================================
# SOLVER RADIAL
# =============================================================================

@dataclass
class RadialGrid:
    """Rejilla de volúmenes finitos uniforme en rho con volúmenes hiperbólicos exactos."""
    rho_edges: np.ndarray
    cell_centers: np.ndarray
    cell_volumes: np.ndarray

    @property
    def n_cells(self) -> int:
        return int(self.cell_volumes.size)

    @property
    def rho_max(self) -> float:
        return float(self.rho_edges[-1])

    @property
    def d_rho(self) -> float:
        return float(self.rho_edges[1] - self.rho_edges[0])

    @property
    def p_edges(self) -> np.ndarray:
        """Peso p = cosh(rho) - 1 en las aristas."""
        return 2.0 * np.sinh(self.rho_edges / 2.0) ** 2

    @property
    def total_volume(self) -> float:
        return float(np.sum(self.cell_volumes))


@dataclass
class RadialState:
    """Densidad radial promediada por celdas en un instante."""
    grid: RadialGrid
    n: np.ndarray
    t: float = 0.0
    chi: float = 0.0

    @property
    def mass(self) -> float:
        return float(np.sum(self.n * self.grid.cell_volumes))

    def with_values(self, n: np.ndarray, t: float) -> 'RadialState':
        """Devuelve un estado nuevo sobre la misma rejilla."""
        return RadialState(grid=self.grid, n=n, t=t, chi=self.chi)


@dataclass
class InitialSpec:
    """Perfil inicial: gaussiana hiperbólica, anillo o mezcla de ambos."""
    kind: str = "gaussian"
    s: Optional[float] = None
    p_moment: Optional[float] = None
    a: Optional[float] = None
    b: Optional[float] = None
    components: List['InitialSpec'] = field(default_factory=list)
    weights: List[float] = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'InitialSpec':
        """Crea un InitialSpec desde un diccionario de configuración."""
        return cls(
            kind=data.get('kind', 'gaussian'),
            s=data.get('s'),
            p_moment=data.get('p_moment'),
            a=data.get('a'),
            b=data.get('b'),
            components=[cls.from_dict(c) for c in data.get('components', [])],
            weights=[float(w) for w in data.get('weights', [])]
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'kind': self.kind}
        for key in ('s', 'p_moment', 'a', 'b'):
            value = getattr(self, key)
            if value is not None:
                data[key] = value
        if self.kind == 'mixture':
            data['components'] = [c.to_dict() for c in self.components]
            data['weights'] = list(self.weights)
        return data


@dataclass
class DtPolicy:
    """Política de paso de tiempo adaptativo."""
    dt_init: float = 1e-4
    dt_min: float = 1e-9
    dt_max: float = 1e-3
    safety: float = 0.4
    growth: float = 1.2
    clean_steps: int = 10
    max_steps: int = 200_000

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DtPolicy':
        defaults = cls()
        return cls(**{k: data.get(k, getattr(defaults, k)) for k in asdict(defaults)})


@dataclass
class BlowupThresholds:
    """
    Umbrales del detector de explosión (amplitud y colapso del paso).

    El suelo del paso es relativo a la rejilla: dt_floor_factor veces
    safety * V_0 / (chi M), el paso que permite la deriva cuando toda la masa
    está en la celda central de volumen V_0.
    """
    density_factor: float = 100.0
    dt_floor_factor: float = 100.0

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'BlowupThresholds':
        defaults = cls()
        return cls(**{k: data.get(k, getattr(defaults, k)) for k in asdict(defaults)})


@dataclass
class SimConfig:
    """Configuración completa de una simulación radial."""
    chi: float
    mass: float
    initial: InitialSpec
    rho_max: float = 12.0
    n_cells: int = 1024
    dt_policy: DtPolicy = field(default_factory=DtPolicy)
    t_end: float = 1.0
    blowup: BlowupThresholds = field(default_factory=BlowupThresholds)
    output_every: float = 0.05
    seed: int = 0
    q_list: Tuple[float, ...] = (1.5, 2.0)
    k_list: Tuple[float, ...] = (10.0, 100.0, 1000.0)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SimConfig':
        """Crea un SimConfig rellenando los valores por defecto."""
        return cls(
            chi=float(data['chi']),
            mass=float(data['mass']),
            initial=InitialSpec.from_dict(data.get('initial', {})),
            rho_max=float(data.get('rho_max', 12.0)),
            n_cells=int(data.get('n_cells', 1024)),
            dt_policy=DtPolicy.from_dict(data.get('dt_policy', {})),
            t_end=float(data.get('t_end', 1.0)),
            blowup=BlowupThresholds.from_dict(data.get('blowup', {})),
            output_every=float(data.get('output_every', 0.05)),
            seed=int(data.get('seed', 0)),
            q_list=tuple(float(q) for q in data.get('q_list', (1.5, 2.0))),
            k_list=tuple(float(k) for k in data.get('k_list', (10.0, 100.0, 1000.0)))
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'chi': self.chi,
            'mass': self.mass,
            'initial': self.initial.to_dict(),
            'rho_max': self.rho_max,
            'n_cells': self.n_cells,
            'dt_policy': asdict(self.dt_policy),
            't_end': self.t_end,
            'blowup': asdict(self.blowup),
            'output_every': self.output_every,
            'seed': self.seed,
            'q_list': list(self.q_list),
            'k_list': list(self.k_list)
        }

    def errors(self) -> List[str]:
        """Lista todos los incumplimientos de los invariantes (vacía si es válida)."""
        found = []
        if not self.chi >= 0:
            found.append("sim.chi debe ser >= 0")
        if not self.mass > 0:
            found.append("sim.mass debe ser > 0")
        if not self.rho_max > 0:
            found.append("sim.rho_max debe ser > 0")
        if self.n_cells < 16:
            found.append("sim.n_cells debe ser >= 16")
        if not self.dt_policy.dt_min > 0:
            found.append("sim.dt_policy.dt_min debe ser > 0")
        if not self.dt_policy.dt_max >= self.dt_policy.dt_min:
            found.append("sim.dt_policy.dt_max debe ser >= dt_min")
        if not 0 < self.dt_policy.safety <= 1:
            found.append("sim.dt_policy.safety debe estar en (0, 1]")
        if not self.t_end >= 0:
            found.append("sim.t_end debe ser >= 0")
        if not self.output_every > 0:
            found.append("sim.output_every debe ser > 0")
        if not self.blowup.density_factor > 1:
            found.append("sim.blowup.density_factor debe ser > 1")
        if not self.blowup.dt_floor_factor >= 1:
            found.append("sim.blowup.dt_floor_factor debe ser >= 1")
        if any(q < 1 for q in self.q_list):
            found.append("sim.q_list solo admite q >= 1")
        if any(k < 0 for k in self.k_list):
            found.append("sim.k_list solo admite K >= 0")
        return found


@dataclass
class RunStatus:
    """Estado final de una simulación."""
    outcome: RunOutcome
    t_final: float
    blowup_time: Optional[float] = None
    steps: int = 0
    message: str = ""

    def __post_init__(self):
        has_time = self.blowup_time is not None
        if has_time != (self.outcome == RunOutcome.BLOWUP_DETECTED):
            raise ValueError("blowup_time solo existe cuando se detecta explosión")
        if has_time and self.blowup_time > self.t_final:
            raise ValueError("blowup_time no puede superar t_final")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'outcome': self.outcome.value,
            't_final': self.t_final,
            'blowup_time': self.blowup_time,
            'steps': self.steps,
            'message': self.message
        }


# =============================================================================
# FUNCIONALES Y SERIES
# =============================================================================

@dataclass
class FunctionalRecord:
    """Instantánea de todos los funcionales de un estado."""
    t: float
    mass: float
    p_moment: float
    rho_moment: float
    entropy: float
    fisher: float
    interaction: float
    free_energy: float
    lq_norms: Dict[float, float] = field(default_factory=dict)
    linf: float = 0.0
    m_t_K: Dict[float, float] = field(default_factory=dict)
    n_min: float = 0.0
    chi: float = 0.0


@dataclass
class SeriesRow:
    """Fila de la serie temporal: funcionales, cotas evaluadas y flags."""
    t: float
    dt: float
    record: FunctionalRecord
    bounds: Dict[str, Optional[float]] = field(default_factory=dict)
    flags: Dict[str, bool] = field(default_factory=dict)


@dataclass
class TimeSeries:
    """Serie temporal con metadatos (hash de configuración, rejilla, versión)."""
    rows: List[SeriesRow] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rows)

    def append(self, row: SeriesRow):
        """Añade una fila exigiendo tiempos estrictamente crecientes."""
        if self.rows and not row.t > self.rows[-1].t:
            raise ValueError(f"Tiempo no creciente: {row.t} tras {self.rows[-1].t}")
        self.rows.append(row)

    def times(self) -> np.ndarray:
        return np.array([row.t for row in self.rows])

    def records(self) -> List[FunctionalRecord]:
        return [row.record for row in self.rows]


# =============================================================================
# COTAS TEÓRICAS
# =============================================================================

@dataclass
class TheoryInputs:
    """Datos (chi, M, I0, Ent0, F0) que alimentan las cotas cerradas."""
    chi: float
    mass: float
    p_moment: float
    entropy: float = 0.0
    free_energy: float = 0.0

    def __post_init__(self):
        if not self.chi >= 0:
            raise ParameterError("chi debe ser >= 0")
        if not self.mass > 0:
            raise ParameterError("M debe ser > 0")
        if not self.p_moment >= 0:
            raise ParameterError("I0 debe ser >= 0")

    @property
    def chi_mass(self) -> float:
        return self.chi * self.mass

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TheoryInputs':
        """Crea TheoryInputs desde un diccionario de configuración."""
        return cls(
            chi=float(data['chi']),
            mass=float(data['mass']),
            p_moment=float(data['p_moment']),
            entropy=float(data.get('entropy', 0.0)),
            free_energy=float(data.get('free_energy', data.get('entropy', 0.0)))
        )

    @classmethod
    def from_record(cls, record: FunctionalRecord, chi: float) -> 'TheoryInputs':
        """Toma los datos iniciales de la primera instantánea de una serie."""
        return cls(
            chi=chi,
            mass=record.mass,
            p_moment=record.p_moment,
            entropy=record.entropy,
            free_energy=record.free_energy
        )


@dataclass
class BoundsReport:
    """Cantidades teóricas evaluadas para unos TheoryInputs."""
    inputs: TheoryInputs
    lambda_star: float
    supercritical: bool
    blowup_condition: bool
    regime: Regime
    t_bl: Optional[float]
    c_plus: float
    k_plus: float
    h_of_q: Callable[[float], float] = field(repr=False, compare=False, default=None)

    def to_dict(self, q_values: Tuple[float, ...] = (1.5, 2.0, 3.0)) -> Dict[str, Any]:
        """Serializa el informe; h(q) se tabula en q_values."""
        return {
            'chi': self.inputs.chi,
            'mass': self.inputs.mass,
            'p_moment': self.inputs.p_moment,
            'entropy': self.inputs.entropy,
            'free_energy': self.inputs.free_energy,
            'lambda_star': self.lambda_star,
            'supercritical': self.supercritical,
            'blowup_condition': self.blowup_condition,
            'regime': self.regime.value,
            't_bl': self.t_bl,
            'c_plus': self.c_plus,
            'k_plus': self.k_plus,
            'h_of_q': {f"{q:g}": self.h_of_q(q) for q in q_values} if self.h_of_q else {}
        }


# =============================================================================
# BANCO DE DESIGUALDADES
# =============================================================================

@dataclass
class Budget:
    """Presupuesto de evaluación: muestras Monte Carlo y orden de cuadratura."""
    samples: int = 20_000
    chunk_size: int = 5_000
    max_samples: int = 20_000
    target_error: Optional[float] = None
    quad_order: int = 32
    seed: int = 0

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Budget':
        defaults = cls()
        values = {k: data.get(k, getattr(defaults, k)) for k in asdict(defaults)}
        values['max_samples'] = max(int(values['max_samples']), int(values['samples']))
        return cls(**values)


@dataclass
class DeficitReport:
    """Déficit LHS - RHS orientado para que >= 0 signifique que la desigualdad se cumple."""
    value: float
    mc_error: float = 0.0
    nodes_or_samples: int = 0
    op: str = ""
    label: str = ""
    resampled: int = 0
    budget_exhausted: bool = False
    terms: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# =============================================================================
# CONFIGURACIÓN DE EXPERIMENTOS
# =============================================================================

@dataclass
class Tolerances:
    """Tolerancias de los flags por fila y del criterio de las desigualdades."""
    mass_rel: float = 1e-12
    virial_rel: float = 1e-3
    moment_rel: float = 1e-9
    free_energy_rel: float = 1e-6
    entropy_decay_rel: float = 1e-3
    lq_rel: float = 1e-6
    deficit_abs: float = 1e-6

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Tolerances':
        defaults = cls()
        return cls(**{k: float(data.get(k, getattr(defaults, k))) for k in asdict(defaults)})


@dataclass
class SweepSpec:
    """Ejes del barrido (chi, M, I0) y bloque base de simulación."""
    chi: List[float] = field(default_factory=list)
    mass: List[float] = field(default_factory=list)
    p_moment: List[float] = field(default_factory=list)
    base: Dict[str, Any] = field(default_factory=dict)


@dataclass
class InequalitySpec:
    """Batería de desigualdades a evaluar."""
    ops: List[str] = field(default_factory=list)
    n_densities: int = 50
    seed: int = 0
    samples: int = 20_000
    lambdas: List[float] = field(default_factory=lambda: [0.5, 1.0, 1.5])


@dataclass
class ExperimentConfig:
    """Configuración validada de un experimento completo."""
    command: Command
    sim: Optional[SimConfig] = None
    sweep: Optional[SweepSpec] = None
    inequalities: Optional[InequalitySpec] = None
    bounds: List[TheoryInputs] = field(default_factory=list)
    output: str = "output"
    tolerances: Tolerances = field(default_factory=Tolerances)
    resolved: Dict[str, Any] = field(default_factory=dict)
