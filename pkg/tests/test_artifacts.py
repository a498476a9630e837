"""Tests de artefactos y escritura atómica."""

import json
import os
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src import storage
from src.artifacts import (
    SERIES_FILE, SUMMARY_FILE, available_artifacts, deficits_to_frame, frame_to_csv,
    inequality_summary, load_csv, load_json, series_to_frame
)
from src.checks import annotate_series
from src.functionals import functional_record
from src.models import DeficitReport, SeriesRow, TheoryInputs, TimeSeries
from src.storage import atomic_outputs


@pytest.fixture
def annotated(gaussian_state):
    series = TimeSeries()
    series.append(SeriesRow(t=0.0, dt=1e-3, record=functional_record(gaussian_state, k_list=(0.1,))))
    inputs = TheoryInputs.from_record(series.rows[0].record, chi=1.0)
    return annotate_series(series, inputs)


class TestSeriesFrame:
    """series.csv."""

    def test_column_order(self, annotated):
        frame = series_to_frame(annotated)
        assert list(frame.columns[:15]) == [
            't', 'mass', 'p_moment', 'rho_moment', 'entropy', 'fisher', 'interaction',
            'free_energy', 'lq_1.5', 'lq_2', 'linf', 'envelope_rhs', 'p_bound', 'ent_lower',
            'ent_upper'
        ]
        assert frame.columns[15] == 'flags'
        assert 'mtk_0.1' in frame.columns

    def test_missing_bounds_are_blank(self, annotated):
        annotated.rows[0].bounds['ent_upper'] = None
        frame = series_to_frame(annotated)
        assert np.isnan(frame.loc[0, 'ent_upper'])
        text = frame_to_csv(frame)
        header, values = text.splitlines()[:2]
        position = header.split(',').index('ent_upper')
        assert values.split(',')[position] == ""

    def test_full_precision(self):
        text = frame_to_csv(pd.DataFrame({'x': [1.0 / 3.0]}))
        assert float(text.splitlines()[1]) == 1.0 / 3.0


class TestDeficitFrame:
    """Tabla y resumen del banco."""

    def test_summary(self):
        reports = [
            DeficitReport(value=0.5, op='a', label='f1'),
            DeficitReport(value=-0.2, op='a', label='f2'),
            DeficitReport(value=1.0, op='b', label='f3'),
        ]
        frame = deficits_to_frame(reports, [True, False, True])
        summary = inequality_summary(frame)
        assert summary['total'] == 3
        assert summary['passed'] == 2
        assert summary['pass_rate'] == pytest.approx(2 / 3)
        assert summary['per_op']['a'] == {'total': 2, 'passed': 1, 'min_deficit': -0.2}
        assert summary['failures'] == [{'op': 'a', 'label': 'f2'}]

    def test_empty_summary(self):
        assert inequality_summary(pd.DataFrame())['pass_rate'] is None


class TestAtomicOutputs:
    """Escritura con confirmación o deshacer."""

    def test_commit(self, tmp_path):
        with atomic_outputs(tmp_path / "out") as writer:
            writer.write_text(SERIES_FILE, "t\n0\n")
            writer.write_json(SUMMARY_FILE, {'value': np.float64(1.5), 'missing': None})
        assert (tmp_path / "out" / SERIES_FILE).read_text(encoding='utf-8') == "t\n0\n"
        assert load_json(tmp_path / "out", SUMMARY_FILE) == {'value': 1.5, 'missing': None}
        assert sorted(p.name for p in (tmp_path / "out").iterdir()) == [SERIES_FILE, SUMMARY_FILE]

    def test_rollback_leaves_nothing(self, tmp_path):
        with pytest.raises(RuntimeError):
            with atomic_outputs(tmp_path) as writer:
                writer.write_text(SERIES_FILE, "t\n")
                raise RuntimeError("fallo a mitad")
        assert list(tmp_path.iterdir()) == []

    def test_existing_file_untouched_on_failure(self, tmp_path):
        (tmp_path / SERIES_FILE).write_text("viejo", encoding='utf-8')
        with pytest.raises(RuntimeError):
            with atomic_outputs(tmp_path) as writer:
                writer.write_text(SERIES_FILE, "nuevo")
                raise RuntimeError
        assert (tmp_path / SERIES_FILE).read_text(encoding='utf-8') == "viejo"

    def test_failed_rename_undoes_earlier_renames(self, tmp_path, monkeypatch):
        (tmp_path / SUMMARY_FILE).write_text("viejo", encoding='utf-8')
        real_replace = os.replace

        def flaky_replace(src, dst):
            if Path(dst).name == SERIES_FILE:
                raise OSError("disco lleno")
            real_replace(src, dst)

        monkeypatch.setattr(storage.os, "replace", flaky_replace)
        with pytest.raises(OSError):
            with atomic_outputs(tmp_path) as writer:
                writer.write_text(SUMMARY_FILE, "nuevo")
                writer.write_text(SERIES_FILE, "t\n")
        assert (tmp_path / SUMMARY_FILE).read_text(encoding='utf-8') == "viejo"
        assert sorted(p.name for p in tmp_path.iterdir()) == [SUMMARY_FILE]


class TestLoading:
    """Carga para el explorador."""

    def test_missing_files(self, tmp_path):
        assert load_csv(tmp_path, SERIES_FILE) is None
        assert load_json(tmp_path, SUMMARY_FILE) is None
        assert not any(available_artifacts(tmp_path).values())

    def test_csv_round_trip_of_frame(self, tmp_path, annotated):
        frame = series_to_frame(annotated)
        (tmp_path / SERIES_FILE).write_text(frame_to_csv(frame), encoding='utf-8')
        loaded = load_csv(tmp_path, SERIES_FILE)
        assert list(loaded.columns) == list(frame.columns)
        assert loaded.loc[0, 'mass'] == frame.loc[0, 'mass']
        assert available_artifacts(tmp_path)[SERIES_FILE]

    def test_json_loads(self, tmp_path):
        (tmp_path / SUMMARY_FILE).write_text(json.dumps({'rows': 3}), encoding='utf-8')
        assert load_json(tmp_path, SUMMARY_FILE) == {'rows': 3}
