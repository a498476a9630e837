"""
Módulo de línea de comandos.
Ejecuta los experimentos descritos por un JSON de configuración:
simulaciones con comprobación de cotas, barridos del diagrama de fases,
informes de cotas y la batería de desigualdades.

Uso:
    python -m src.cli simulate --config demo.json --output out/
"""

import argparse
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from .artifacts import (
    BOUNDS_FILE, INEQUALITIES_FILE, INEQUALITIES_SUMMARY_FILE, PHASE_FILE,
    SERIES_FILE, SUMMARY_FILE, deficits_to_frame, frame_to_csv,
    inequality_summary, series_to_frame
)
from .bounds import classify_regime, lambda_star, theory_report
from .checks import annotate_series, flag_summary
from .config import apply_overrides, load_config, parse_config, sweep_configs
from .errors import ConfigError, LabError, QuadratureBudgetError
from .functionals import xtq_seminorm
from .inequality_lab import default_battery, evaluate_case, passes
from .models import (
    Budget, Command, DeficitReport, ExperimentConfig, InequalitySpec,
    SimConfig, TheoryInputs, Tolerances
)
from .radial_solver import run_simulation
from .storage import atomic_outputs
from .utils import code_version, config_hash

__all__ = ['main', 'parse_config', 'cmd_simulate', 'cmd_sweep', 'cmd_bounds', 'cmd_inequalities']

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3

# Margen sobre T_bl admitido para el tiempo de explosión detectado
BLOWUP_TIME_SLACK = 1.1


def _ordered_map(func: Callable, items: Sequence, jobs: int) -> List[Any]:
    """map en orden declarado; en paralelo con un pool de procesos si jobs > 1."""
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def _metadata(config: ExperimentConfig) -> Dict[str, Any]:
    return {'config_hash': config_hash(config.resolved), 'version': code_version()}


# =============================================================================
# SIMULATE
# =============================================================================

def simulate_outputs(sim: SimConfig, tolerances: Tolerances) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    """
    Ejecuta una simulación, anota la serie y construye series.csv y summary.json.

    Returns:
        (DataFrame de la serie, diccionario del resumen)
    """
    series, status = run_simulation(sim)
    inputs = TheoryInputs.from_record(series.rows[0].record, sim.chi)
    annotate_series(series, inputs, tolerances)
    report = theory_report(inputs)

    comparison = None
    if report.t_bl is not None:
        detected = status.blowup_time
        comparison = {
            't_bl': report.t_bl,
            'blowup_time': detected,
            'ratio': detected / report.t_bl if detected is not None and report.t_bl > 0 else None,
            'within_bound': detected is not None and detected <= BLOWUP_TIME_SLACK * report.t_bl
        }

    xtq = {}
    for q in sim.q_list:
        if 1.0 < q < 2.0:
            xtq[f"{q:g}"] = xtq_seminorm(series, q, status.t_final)

    counts = flag_summary(series)
    summary = {
        'status': status.to_dict(),
        'theory': report.to_dict(),
        'blowup_comparison': comparison,
        'flag_violations': counts,
        'monitors': series.metadata['monitors'],
        'rows': len(series),
        'sup_linf': max(row.record.linf for row in series.rows),
        'xtq_seminorm': xtq,
        'grid': series.metadata['grid'],
        'config_hash': series.metadata['config_hash'],
        'version': series.metadata['version']
    }
    return series_to_frame(series), summary


def cmd_simulate(config: ExperimentConfig, jobs: int = 1) -> int:
    """Simulación única: escribe series.csv y summary.json."""
    logger.info("simulate: chi = %g, M = %g", config.sim.chi, config.sim.mass)
    frame, summary = simulate_outputs(config.sim, config.tolerances)
    summary['tolerances'] = config.resolved['tolerances']
    with atomic_outputs(config.output) as writer:
        writer.write_text(SERIES_FILE, frame_to_csv(frame))
        writer.write_json(SUMMARY_FILE, summary)
    hard = summary['flag_violations']['hard_failures']
    logger.info("simulate: %s, %d filas, %d fallos duros",
                summary['status']['outcome'], summary['rows'], hard)
    return EXIT_CHECK_FAILED if hard else EXIT_OK


# =============================================================================
# SWEEP
# =============================================================================

def sweep_cell(sim: SimConfig) -> Dict[str, Any]:
    """
    Una celda del diagrama de fases: régimen predicho y resultado observado.

    Los errores de la celda se registran en la fila y no detienen el barrido.
    """
    p_moment = sim.initial.p_moment
    row: Dict[str, Any] = {
        'chi': sim.chi,
        'mass': sim.mass,
        'p_moment': p_moment,
        'chi_mass': sim.chi * sim.mass,
        'lambda_star': lambda_star(sim.chi, sim.mass),
        'regime': classify_regime(sim.chi, sim.mass, p_moment).value,
        't_bl': theory_report(TheoryInputs(sim.chi, sim.mass, p_moment)).t_bl,
        'outcome': None,
        't_final': None,
        'blowup_time': None,
        'error': ""
    }
    try:
        _, status = run_simulation(sim, monitor=False)
    except LabError as exc:
        row['outcome'] = 'error'
        row['error'] = str(exc)
        return row
    row['outcome'] = status.outcome.value
    row['t_final'] = status.t_final
    row['blowup_time'] = status.blowup_time
    return row


def cmd_sweep(config: ExperimentConfig, jobs: int = 1) -> int:
    """Barrido chi x M x I0: escribe phase_diagram.csv."""
    cells = sweep_configs(config.sweep)
    logger.info("sweep: %d celdas con %d procesos", len(cells), jobs)
    rows = _ordered_map(sweep_cell, cells, jobs)
    for row in rows:
        if row['outcome'] == 'error':
            logger.error("sweep: celda chi = %g, M = %g, I0 = %g falló: %s",
                         row['chi'], row['mass'], row['p_moment'], row['error'])
    frame = pd.DataFrame(rows)
    with atomic_outputs(config.output) as writer:
        writer.write_text(PHASE_FILE, frame_to_csv(frame))
    return EXIT_OK


# =============================================================================
# BOUNDS
# =============================================================================

def cmd_bounds(config: ExperimentConfig, jobs: int = 1) -> int:
    """Informe de cotas cerradas: escribe bounds.json en el orden de entrada."""
    reports = [theory_report(inputs).to_dict() for inputs in config.bounds]
    payload = {'reports': reports, **_metadata(config)}
    with atomic_outputs(config.output) as writer:
        writer.write_json(BOUNDS_FILE, payload)
    logger.info("bounds: %d informes", len(reports))
    return EXIT_OK


# =============================================================================
# INEQUALITIES
# =============================================================================

def battery_budget(spec: InequalitySpec) -> Budget:
    return Budget(samples=spec.samples, max_samples=spec.samples, seed=spec.seed)


def run_battery(task: Tuple[str, InequalitySpec, float]) -> List[Tuple[DeficitReport, bool]]:
    """Evalúa la batería completa de una operación (unidad de trabajo del pool)."""
    op, spec, tol = task
    budget = battery_budget(spec)
    results = []
    for case in default_battery(op, spec.n_densities, spec.seed, tuple(spec.lambdas)):
        try:
            report = evaluate_case(case, budget)
        except QuadratureBudgetError as exc:
            partial = exc.partial if exc.partial is not None else math.nan
            report = DeficitReport(value=partial, op=op, label=case.label, budget_exhausted=True)
        except LabError as exc:
            logger.error("%s[%d] %s: %s", op, case.index, case.label, exc)
            report = DeficitReport(value=math.nan, op=op, label=case.label)
        results.append((report, passes(report, tol) if math.isfinite(report.value) else False))
    return results


def cmd_inequalities(config: ExperimentConfig, jobs: int = 1) -> int:
    """Batería de desigualdades: escribe inequalities.csv y su resumen."""
    spec = config.inequalities
    tol = config.tolerances.deficit_abs
    logger.info("inequalities: %s, %d densidades por operación", ", ".join(spec.ops), spec.n_densities)
    batches = _ordered_map(run_battery, [(op, spec, tol) for op in spec.ops], jobs)
    reports = [report for batch in batches for report, _ in batch]
    passed = [ok for batch in batches for _, ok in batch]
    frame = deficits_to_frame(reports, passed)
    summary = {**inequality_summary(frame), **_metadata(config),
               'budget': {'samples': spec.samples, 'seed': spec.seed}}
    with atomic_outputs(config.output) as writer:
        writer.write_text(INEQUALITIES_FILE, frame_to_csv(frame))
        writer.write_json(INEQUALITIES_SUMMARY_FILE, summary)
    failed = len(passed) - sum(passed)
    if failed:
        logger.warning("inequalities: %d casos no superan el criterio", failed)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


COMMANDS = {
    Command.SIMULATE: cmd_simulate,
    Command.SWEEP: cmd_sweep,
    Command.BOUNDS: cmd_bounds,
    Command.INEQUALITIES: cmd_inequalities,
}


# =============================================================================
# PUNTO DE ENTRADA
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m src.cli",
        description="Laboratorio numérico de Keller-Segel en el disco hiperbólico"
    )
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("--config", required=True, help="Fichero JSON del experimento")
    parser.add_argument("--output", default=None, help="Directorio de salida (sustituye a 'output')")
    parser.add_argument("--seed", type=int, default=None, help="Semilla (sustituye a las del fichero)")
    parser.add_argument("--jobs", type=int, default=1, help="Procesos para barridos y baterías")
    parser.add_argument("--verbose", action="store_true", help="Mensajes de depuración")
    return parser


def main(argv: Optional[Iterable[str]] = None) -> int:
    """
    Ejecuta un subcomando.

    Returns:
        0 éxito, 1 comprobaciones fallidas, 2 configuración inválida, 3 error de E/S
    """
    args = build_parser().parse_args(None if argv is None else list(argv))
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    try:
        config = load_config(args.config)
        config = apply_overrides(config, output=args.output, seed=args.seed)
        command = Command(args.command)
        if command != config.command:
            raise ConfigError([f"command: el fichero declara '{config.command.value}', "
                               f"no '{command.value}'"])
        return COMMANDS[command](config, jobs=max(1, args.jobs))
    except ConfigError as exc:
        for message in exc.errors:
            logger.error("config: %s", message)
        return EXIT_CONFIG_ERROR
    except LabError as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG_ERROR
    except OSError as exc:
        logger.error("E/S: %s", exc)
        return EXIT_IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
