"""
Módulo de utilidades generales.
Incluye hashing estable de configuraciones, conversión a JSON y formato de
números para la salida.
"""

import hashlib
import json
import math
from dataclasses import asdict, is_dataclass
from enum import Enum
from typing import Any, Optional

import numpy as np

from . import __version__


def canonical_json(data: Any) -> str:
    """
    Serializa a JSON canónico (claves ordenadas, sin espacios).

    Args:
        data: Estructura JSON-compatible (se convierte con to_jsonable)

    Returns:
        Texto JSON determinista
    """
    return json.dumps(to_jsonable(data), sort_keys=True, separators=(',', ':'), allow_nan=True)


def config_hash(data: Any) -> str:
    """
    Genera un hash SHA-256 de una configuración resuelta.

    Args:
        data: Configuración (dict o dataclass)

    Returns:
        Hash hexadecimal
    """
    return hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()


def stable_hash(data: Any) -> int:
    """Entero de 32 bits derivado del hash canónico (independiente de PYTHONHASHSEED)."""
    return int(config_hash(data)[:8], 16)


def to_jsonable(value: Any) -> Any:
    """
    Convierte recursivamente dataclasses, Enums y tipos numpy a tipos JSON.

    Los flotantes no finitos se conservan; None sigue siendo None.
    """
    if isinstance(value, Enum):
        return value.value
    if is_dataclass(value) and not isinstance(value, type):
        return to_jsonable(asdict(value))
    if isinstance(value, dict):
        return {str(k) if not isinstance(k, float) else f"{k:g}": to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def format_metric(value: Optional[float]) -> str:
    """
    Formatea un valor para mostrar al usuario.

    Args:
        value: Número o None

    Returns:
        Texto corto ('—' si el valor no aplica)
    """
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "—"
    if value != 0 and (abs(value) >= 1e4 or abs(value) < 1e-3):
        return f"{value:.3e}"
    return f"{value:.4f}"


def code_version() -> str:
    """Versión del paquete que se guarda en los metadatos de las series."""
    return __version__
