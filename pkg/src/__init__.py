"""
Paquete src - Laboratorio numérico de Keller-Segel en el disco de Poincaré.
"""

__version__ = "0.3.0"

from .errors import LabError, ConfigError
from .models import DiskPoint, RadialGrid, RadialState, SimConfig, TheoryInputs
