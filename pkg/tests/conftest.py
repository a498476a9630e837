"""Fixtures compartidas de la suite."""

import json

import numpy as np
import pytest

from src.models import InitialSpec, SimConfig
from src.radial_solver import build_grid, project_initial


def make_sim(chi=1.0, mass=2.0 * np.pi, s=0.5, **overrides) -> SimConfig:
    """SimConfig pequeño con gaussiana inicial; los overrides van al diccionario."""
    data = {
        'chi': chi,
        'mass': mass,
        'initial': {'kind': 'gaussian', 's': s},
        'rho_max': 10.0,
        'n_cells': 512,
        't_end': 0.2,
        'output_every': 0.05,
        'dt_policy': {'dt_init': 1e-4, 'dt_max': 1e-3},
    }
    data.update(overrides)
    return SimConfig.from_dict(data)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def random_pairs(rng):
    """Pares de puntos aleatorios con |x|, |y| <= 0.9."""
    def draw(n):
        r = 0.9 * np.sqrt(rng.uniform(0.0, 1.0, (2, n)))
        theta = rng.uniform(0.0, 2.0 * np.pi, (2, n))
        pts = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
        return pts[0], pts[1]
    return draw


@pytest.fixture
def gaussian_state():
    """M q_s con M = 2, s = 1 en una rejilla fina (rho_max = 8, 4096 celdas)."""
    config = SimConfig(chi=0.0, mass=2.0, initial=InitialSpec(kind='gaussian', s=1.0),
                       rho_max=8.0, n_cells=4096)
    return project_initial(config, build_grid(config.rho_max, config.n_cells))


@pytest.fixture
def write_config(tmp_path):
    """Escribe un diccionario como JSON y devuelve la ruta."""
    def write(data, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding='utf-8')
        return path
    return write
