"""
Módulo de configuración.
Lee el documento JSON de un experimento, valida todos sus campos (acumulando
los errores en lugar de parar en el primero) y rellena los valores por defecto.
"""

import itertools
import json
from dataclasses import asdict, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .errors import ConfigError, JSONSyntaxError, ParameterError
from .inequality_lab import DEFAULT_OPS, OPS
from .models import (
    Command, ExperimentConfig, InequalitySpec, SimConfig, SweepSpec,
    TheoryInputs, Tolerances
)

TOP_LEVEL_KEYS = {'command', 'sim', 'sweep', 'inequalities', 'bounds', 'output', 'tolerances'}
SIM_KEYS = {'chi', 'mass', 'initial', 'rho_max', 'n_cells', 'dt_policy', 't_end', 'blowup',
            'output_every', 'seed', 'q_list', 'k_list'}
INITIAL_KEYS = {'kind', 's', 'p_moment', 'a', 'b', 'components', 'weights'}
DT_POLICY_KEYS = {'dt_init', 'dt_min', 'dt_max', 'safety', 'growth', 'clean_steps', 'max_steps'}
BLOWUP_KEYS = {'density_factor', 'dt_floor_factor'}
SWEEP_KEYS = {'chi', 'mass', 'p_moment', 'base'}
INEQUALITY_KEYS = {'ops', 'n_densities', 'seed', 'samples', 'lambdas'}
BOUNDS_KEYS = {'chi', 'mass', 'p_moment', 'entropy', 'free_energy'}
TOLERANCE_KEYS = set(asdict(Tolerances()))

# Mínimo de muestras Monte Carlo admitido en la batería
MIN_SAMPLES = 100


# =============================================================================
# AYUDAS DE VALIDACIÓN
# =============================================================================

def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _unknown_keys(data: Dict[str, Any], allowed: set, prefix: str, errors: List[str]):
    for key in sorted(set(data) - allowed):
        name = f"{prefix}.{key}" if prefix else key
        errors.append(f"{name}: clave desconocida")


def _require_dict(value: Any, name: str, errors: List[str]) -> bool:
    if not isinstance(value, dict):
        errors.append(f"{name}: debe ser un objeto")
        return False
    return True


def _check_numbers(data: Dict[str, Any], keys, prefix: str, errors: List[str]):
    for key in keys:
        if key in data and not _is_number(data[key]):
            errors.append(f"{prefix}.{key}: debe ser un número")


def _check_number_list(value: Any, name: str, errors: List[str], allow_empty: bool = False) -> bool:
    if not isinstance(value, list) or not all(_is_number(v) for v in value):
        errors.append(f"{name}: debe ser una lista de números")
        return False
    if not value and not allow_empty:
        errors.append(f"{name}: no puede estar vacía")
        return False
    return True


def _check_initial(data: Any, prefix: str, errors: List[str]):
    """Valida un bloque `initial` (gaussiana, anillo o mezcla)."""
    if not _require_dict(data, prefix, errors):
        return
    _unknown_keys(data, INITIAL_KEYS, prefix, errors)
    _check_numbers(data, ('s', 'p_moment', 'a', 'b'), prefix, errors)
    kind = data.get('kind', 'gaussian')
    if kind == 'gaussian':
        s, p_m = data.get('s'), data.get('p_moment')
        if s is None and p_m is None:
            errors.append(f"{prefix}: la gaussiana necesita 's' o 'p_moment'")
        if _is_number(s) and not s > 0:
            errors.append(f"{prefix}.s: debe ser > 0")
        if _is_number(p_m) and not p_m > 0:
            errors.append(f"{prefix}.p_moment: debe ser > 0")
    elif kind == 'annulus':
        a, b = data.get('a'), data.get('b')
        if a is None or b is None:
            errors.append(f"{prefix}: el anillo necesita 'a' y 'b'")
        elif _is_number(a) and _is_number(b) and not 0 <= a < b:
            errors.append(f"{prefix}: el anillo exige 0 <= a < b")
    elif kind == 'mixture':
        components = data.get('components')
        weights = data.get('weights')
        if not isinstance(components, list) or not components:
            errors.append(f"{prefix}.components: debe ser una lista no vacía")
            return
        for i, component in enumerate(components):
            _check_initial(component, f"{prefix}.components[{i}]", errors)
        if _check_number_list(weights, f"{prefix}.weights", errors):
            if len(weights) != len(components):
                errors.append(f"{prefix}.weights: debe tener un peso por componente")
            elif any(w < 0 for w in weights) or sum(weights) <= 0:
                errors.append(f"{prefix}.weights: pesos no negativos con suma positiva")
    else:
        errors.append(f"{prefix}.kind: tipo desconocido '{kind}'")


def _parse_sim(data: Any, prefix: str, errors: List[str]) -> Optional[SimConfig]:
    """Valida un bloque de simulación y devuelve el SimConfig (None si hay errores)."""
    if not _require_dict(data, prefix, errors):
        return None
    before = len(errors)
    _unknown_keys(data, SIM_KEYS, prefix, errors)
    for key in ('chi', 'mass'):
        if key not in data:
            errors.append(f"{prefix}.{key}: campo obligatorio")
    _check_numbers(data, ('chi', 'mass', 'rho_max', 't_end', 'output_every'), prefix, errors)
    for key in ('n_cells', 'seed'):
        if key in data and not _is_int(data[key]):
            errors.append(f"{prefix}.{key}: debe ser un entero")
    if 'seed' in data and _is_int(data['seed']) and not 0 <= data['seed'] < 2 ** 64:
        errors.append(f"{prefix}.seed: debe estar en [0, 2^64)")
    for key in ('q_list', 'k_list'):
        if key in data:
            _check_number_list(data[key], f"{prefix}.{key}", errors, allow_empty=True)
    if 'initial' not in data:
        errors.append(f"{prefix}.initial: campo obligatorio")
    else:
        _check_initial(data['initial'], f"{prefix}.initial", errors)
    for key, allowed in (('dt_policy', DT_POLICY_KEYS), ('blowup', BLOWUP_KEYS)):
        if key in data and _require_dict(data[key], f"{prefix}.{key}", errors):
            _unknown_keys(data[key], allowed, f"{prefix}.{key}", errors)
            _check_numbers(data[key], allowed, f"{prefix}.{key}", errors)
    if len(errors) > before:
        return None
    config = SimConfig.from_dict(data)
    errors.extend(e.replace("sim.", f"{prefix}.", 1) for e in config.errors())
    return config if len(errors) == before else None


def _parse_sweep(data: Any, errors: List[str]) -> Optional[SweepSpec]:
    if not _require_dict(data, "sweep", errors):
        return None
    before = len(errors)
    _unknown_keys(data, SWEEP_KEYS, "sweep", errors)
    axes = {}
    for key in ('chi', 'mass', 'p_moment'):
        if key not in data:
            errors.append(f"sweep.{key}: campo obligatorio")
        elif _check_number_list(data[key], f"sweep.{key}", errors):
            axes[key] = [float(v) for v in data[key]]
    if any(v < 0 for v in axes.get('chi', [])):
        errors.append("sweep.chi: valores >= 0")
    if any(v <= 0 for v in axes.get('mass', [])):
        errors.append("sweep.mass: valores > 0")
    if any(v <= 0 for v in axes.get('p_moment', [])):
        errors.append("sweep.p_moment: valores > 0")
    base = data.get('base', {})
    if _require_dict(base, "sweep.base", errors) and len(axes) == 3:
        # La base se valida completando chi, M e I0 con la primera celda
        probe = _cell_dict(base, axes['chi'][0], axes['mass'][0], axes['p_moment'][0])
        _parse_sim(probe, "sweep.base", errors)
    if len(errors) > before:
        return None
    return SweepSpec(chi=axes['chi'], mass=axes['mass'], p_moment=axes['p_moment'], base=dict(base))


def _parse_inequalities(data: Any, errors: List[str]) -> Optional[InequalitySpec]:
    if not _require_dict(data, "inequalities", errors):
        return None
    before = len(errors)
    _unknown_keys(data, INEQUALITY_KEYS, "inequalities", errors)
    ops = data.get('ops', list(DEFAULT_OPS))
    if not isinstance(ops, list) or not ops:
        errors.append("inequalities.ops: debe ser una lista no vacía")
    else:
        for op in ops:
            if op not in OPS:
                errors.append(f"inequalities.ops: operación desconocida '{op}'")
    for key, minimum in (('n_densities', 1), ('seed', 0), ('samples', MIN_SAMPLES)):
        if key in data:
            if not _is_int(data[key]):
                errors.append(f"inequalities.{key}: debe ser un entero")
            elif data[key] < minimum:
                errors.append(f"inequalities.{key}: debe ser >= {minimum}")
    lambdas = data.get('lambdas', [0.5, 1.0, 1.5])
    if _check_number_list(lambdas, "inequalities.lambdas", errors):
        if any(not 0 < lam < 2 for lam in lambdas):
            errors.append("inequalities.lambdas: valores en (0, 2)")
    if len(errors) > before:
        return None
    defaults = InequalitySpec()
    return InequalitySpec(
        ops=list(ops),
        n_densities=int(data.get('n_densities', defaults.n_densities)),
        seed=int(data.get('seed', defaults.seed)),
        samples=int(data.get('samples', defaults.samples)),
        lambdas=[float(lam) for lam in lambdas]
    )


def _parse_bounds(data: Any, errors: List[str]) -> List[TheoryInputs]:
    if not isinstance(data, list) or not data:
        errors.append("bounds: debe ser una lista no vacía de objetos")
        return []
    result = []
    for i, item in enumerate(data):
        name = f"bounds[{i}]"
        if not _require_dict(item, name, errors):
            continue
        before = len(errors)
        _unknown_keys(item, BOUNDS_KEYS, name, errors)
        for key in ('chi', 'mass', 'p_moment'):
            if key not in item:
                errors.append(f"{name}.{key}: campo obligatorio")
        _check_numbers(item, BOUNDS_KEYS, name, errors)
        if len(errors) > before:
            continue
        try:
            result.append(TheoryInputs.from_dict(item))
        except ParameterError as exc:
            errors.append(f"{name}: {exc}")
    return result


def _parse_tolerances(data: Any, errors: List[str]) -> Tolerances:
    if not _require_dict(data, "tolerances", errors):
        return Tolerances()
    _unknown_keys(data, TOLERANCE_KEYS, "tolerances", errors)
    _check_numbers(data, TOLERANCE_KEYS, "tolerances", errors)
    for key in TOLERANCE_KEYS & set(data):
        if _is_number(data[key]) and data[key] < 0:
            errors.append(f"tolerances.{key}: debe ser >= 0")
    return Tolerances.from_dict({k: v for k, v in data.items() if k in TOLERANCE_KEYS and _is_number(v)})


# =============================================================================
# API PÚBLICA
# =============================================================================

def _cell_dict(base: Dict[str, Any], chi: float, mass: float, p_moment: float) -> Dict[str, Any]:
    data = dict(base)
    data['chi'] = chi
    data['mass'] = mass
    data['initial'] = {'kind': 'gaussian', 'p_moment': p_moment}
    return data


def resolve(config: ExperimentConfig) -> Dict[str, Any]:
    """Diccionario completo (con valores por defecto) de una configuración."""
    resolved: Dict[str, Any] = {
        'command': config.command.value,
        'output': config.output,
        'tolerances': asdict(config.tolerances)
    }
    if config.sim is not None:
        resolved['sim'] = config.sim.to_dict()
    if config.sweep is not None:
        resolved['sweep'] = {
            'chi': config.sweep.chi,
            'mass': config.sweep.mass,
            'p_moment': config.sweep.p_moment,
            'base': config.sweep.base
        }
    if config.inequalities is not None:
        resolved['inequalities'] = asdict(config.inequalities)
    if config.bounds:
        resolved['bounds'] = [asdict(inputs) for inputs in config.bounds]
    return resolved


def parse_config(text: str) -> ExperimentConfig:
    """
    Lee y valida el JSON de un experimento.

    Args:
        text: Documento JSON (UTF-8)

    Returns:
        ExperimentConfig validado con los valores por defecto rellenos

    Raises:
        JSONSyntaxError: Si el JSON está mal formado (con línea y columna)
        ConfigError: Con la lista completa de errores semánticos
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JSONSyntaxError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise ConfigError(["el documento debe ser un objeto JSON"])

    errors: List[str] = []
    _unknown_keys(data, TOP_LEVEL_KEYS, "", errors)

    command = None
    if 'command' not in data:
        errors.append("command: campo obligatorio")
    else:
        try:
            command = Command(data['command'])
        except ValueError:
            options = ", ".join(c.value for c in Command)
            errors.append(f"command: '{data['command']}' no es uno de {options}")

    output = data.get('output', 'output')
    if not isinstance(output, str) or not output:
        errors.append("output: debe ser una ruta no vacía")
    tolerances = _parse_tolerances(data.get('tolerances', {}), errors)

    config = ExperimentConfig(command=command or Command.SIMULATE, output=output,
                              tolerances=tolerances)
    if command == Command.SIMULATE:
        if 'sim' not in data:
            errors.append("sim: campo obligatorio para simulate")
        else:
            config.sim = _parse_sim(data['sim'], "sim", errors)
    elif command == Command.SWEEP:
        if 'sweep' not in data:
            errors.append("sweep: campo obligatorio para sweep")
        else:
            config.sweep = _parse_sweep(data['sweep'], errors)
    elif command == Command.BOUNDS:
        if 'bounds' not in data:
            errors.append("bounds: campo obligatorio para bounds")
        else:
            config.bounds = _parse_bounds(data['bounds'], errors)
    elif command == Command.INEQUALITIES:
        config.inequalities = _parse_inequalities(data.get('inequalities', {}), errors)

    if errors:
        raise ConfigError(errors)
    config.resolved = resolve(config)
    return config


def load_config(path) -> ExperimentConfig:
    """Lee y valida un fichero de configuración (OSError si no se puede leer)."""
    return parse_config(Path(path).read_text(encoding='utf-8'))


def validate_config_text(text: str) -> Tuple[bool, str]:
    """
    Valida un documento de configuración sin lanzar excepciones.

    Returns:
        Tupla (es_válido, mensaje)
    """
    try:
        config = parse_config(text)
    except ConfigError as exc:
        return False, "\n".join(exc.errors)
    return True, f"Configuración válida ({config.command.value})"


def apply_overrides(config: ExperimentConfig, output: Optional[str] = None,
                    seed: Optional[int] = None) -> ExperimentConfig:
    """
    Aplica los overrides de línea de comandos (--output, --seed).

    La semilla sustituye a la de la simulación, a la base del barrido y a la
    de la batería de desigualdades.
    """
    if output is not None:
        config.output = output
    if seed is not None:
        if not 0 <= seed < 2 ** 64:
            raise ConfigError([f"--seed: {seed} fuera de [0, 2^64)"])
        if config.sim is not None:
            config.sim = replace(config.sim, seed=seed)
        if config.sweep is not None:
            config.sweep.base = {**config.sweep.base, 'seed': seed}
        if config.inequalities is not None:
            config.inequalities.seed = seed
    config.resolved = resolve(config)
    return config


def sweep_configs(spec: SweepSpec) -> List[SimConfig]:
    """
    Producto cartesiano chi x M x I0 de un barrido, en orden declarado.

    Cada celda parte de una gaussiana con el momento p pedido.
    """
    cells = itertools.product(spec.chi, spec.mass, spec.p_moment)
    return [SimConfig.from_dict(_cell_dict(spec.base, chi, mass, p_m)) for chi, mass, p_m in cells]
