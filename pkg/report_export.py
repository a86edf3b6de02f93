#!/usr/bin/env python3
"""
Report Export - JSON and CSV artifacts for experiment results
"""

import json
import math
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

import mz_settings


def _plain(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return [_plain(value.real), _plain(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ('inf' if value > 0 else '-inf')
    return value


def rows_to_csv(rows: List[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
    """Rows as CSV: '.' decimals, LF line endings, lossless floats, no index"""
    frame = pd.DataFrame(rows, columns=list(columns) if columns else None)
    return frame.to_csv(index=False, lineterminator='\n', float_format='%.17g')


def export_report(payload: Dict[str, Any], format: str = "json",
                  columns: Optional[Sequence[str]] = None) -> str:
    """Export a report payload in various formats"""
    if format == "json":
        body = dict(payload)
        body['schema_version'] = mz_settings.SCHEMA_VERSION
        return json.dumps(_plain(body), indent=2, sort_keys=True) + "\n"
    elif format == "csv":
        return rows_to_csv(payload.get('rows', []), columns)
    else:
        raise ValueError(f"Unsupported format: {format}")


def write_artifact(text: str, path: str) -> str:
    """Write UTF-8 text under the output directory; returns the resolved path"""
    resolved = mz_settings.resolve_output_path(path)
    with open(resolved, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)
    return resolved
