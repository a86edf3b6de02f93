#!/usr/bin/env python3
"""
Test JSON and CSV artifact export
"""

import json
import math

import numpy as np
import pytest

import mz_settings
from report_export import export_report, rows_to_csv, write_artifact


def test_json_sorted_with_schema_version():
    """Pretty JSON, sorted keys, schema_version injected, numpy values plain"""
    text = export_report({'b': np.float64(1.5), 'a': np.arange(3), 'z': 1 + 2j})
    data = json.loads(text)
    assert data['schema_version'] == mz_settings.SCHEMA_VERSION
    assert data['a'] == [0, 1, 2]
    assert data['z'] == [1.0, 2.0]
    assert list(data) == sorted(data)
    assert text.endswith("}\n")
    assert '\n  "a"' in text


def test_json_non_finite_values():
    """NaN becomes null and infinities become strings"""
    data = json.loads(export_report({'rate': math.nan, 'q': math.inf}))
    assert data['rate'] is None
    assert data['q'] == 'inf'


def test_csv_rows_lossless():
    """Header from columns, LF endings, '.' decimals, 17 significant digits"""
    text = rows_to_csv([{'n': 20, 'error': 1 / 3}], columns=['n', 'error'])
    lines = text.split('\n')
    assert lines[0] == 'n,error'
    assert float(lines[1].split(',')[1]) == 1 / 3
    assert '\r' not in text


def test_csv_export_uses_rows():
    """csv format emits the payload rows only"""
    text = export_report({'rows': [{'param': 'upper_ratio', 'measured': 1.0}], 'seed': 3}, format="csv")
    assert text.startswith('param,measured\n')


def test_unsupported_format():
    """Anything but json and csv is refused"""
    with pytest.raises(ValueError, match="Unsupported format"):
        export_report({}, format="xml")


def test_write_artifact_relative_to_output_dir(tmp_path, monkeypatch):
    """Relative paths land under the configured output directory"""
    monkeypatch.setattr(mz_settings, 'DEFAULT_OUTPUT_DIR', str(tmp_path / 'out'))
    path = write_artifact("x\n", "nested/report.json")
    assert path == str(tmp_path / 'out' / 'nested' / 'report.json')
    with open(path, encoding='utf-8') as f:
        assert f.read() == "x\n"
