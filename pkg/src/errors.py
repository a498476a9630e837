"""
Módulo de errores del laboratorio.
Define la jerarquía de excepciones usada por todos los módulos.
"""

from typing import List, Optional


class LabError(ValueError):
    """Error base del laboratorio (hereda de ValueError)."""


class ParameterError(LabError):
    """Parámetro fuera de rango (rejilla, exponentes, tiempos...)."""


class DomainError(LabError):
    """Punto fuera del disco abierto o demasiado cerca del borde."""


class GridTooCoarseError(LabError):
    """Rejilla con menos puntos de los necesarios para el esténcil."""


class SingularityError(LabError):
    """Evaluación del núcleo de Green en rho = 0."""


class CoincidenceError(LabError):
    """Gradiente de H pedido en dos puntos coincidentes."""


class QuadratureBudgetError(LabError):
    """La cuadratura no alcanza la tolerancia con el máximo de nodos."""

    def __init__(self, message: str, partial: Optional[float] = None):
        super().__init__(message)
        self.partial = partial


class TruncationError(LabError):
    """Demasiada masa inicial fuera de la rejilla."""


class TimeStepError(LabError):
    """Paso de tiempo mayor que la cota que preserva la positividad."""


class WindowTooNarrowError(LabError):
    """Ventana temporal demasiado estrecha para un ajuste de pendiente."""


class EmptySeriesError(LabError):
    """Serie temporal sin filas."""


class SupercriticalInputError(LabError):
    """Cota pedida fuera del régimen subcrítico chi*M < 8*pi."""


class ZeroFunctionError(LabError):
    """Función idénticamente nula donde se necesita normalizar."""


class NonDifferentiableError(LabError):
    """Familia sin derivada radial continua."""


class ConfigError(LabError):
    """Configuración inválida; guarda la lista completa de errores."""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class JSONSyntaxError(ConfigError):
    """Error de sintaxis JSON con línea y columna."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__([f"línea {line}, columna {column}: {message}"])
