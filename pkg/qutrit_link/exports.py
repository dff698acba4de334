"""Output files: JSON summaries and CSV trajectories.

Numbers carry 12 significant digits, lines end in LF, and every file
embeds the package version and the resolved configuration. Files are
written to a temporary sibling, fsynced and renamed into place.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import tempfile
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np

from qutrit_link import __version__
from qutrit_link.errors import ExportError

logger = logging.getLogger("exports")

SIGNIFICANT_DIGITS = 12

SENDER_HEADER = ["t", "f1", "phi_I", "phi_II", "pop_m-1", "pop_m0", "pop_m+1"]
RECEIVER_HEADER = ["t", "f2", "eta", "zeta", "gamma_00", "gamma_11", "gamma_12", "gamma_01", "gamma_m10"]
ORACLE_HEADER = ["t"] + [f"{part}_{name}" for name in ("c1", "c2", "c3", "c4", "d1", "d2")
                         for part in ("re", "im")] + ["norm2ph", "norm1ph"]


def format_number(value: float) -> str:
    value = float(value)
    if not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    text = f"{value:.{SIGNIFICANT_DIGITS}g}"
    return "0" if text == "-0" else text


def clean_for_json(obj: Any) -> Any:
    """Round floats to 12 significant digits; non-finite numbers become null."""
    if isinstance(obj, dict):
        return {str(k): clean_for_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean_for_json(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [clean_for_json(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            return None
        return float(format_number(value))
    return obj


def atomic_write_text(path: str, text: str) -> str:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(prefix=".tmp-", suffix=os.path.basename(path), dir=directory)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp_path, path)
    except OSError as exc:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise ExportError(f"cannot write {path}: {exc}") from exc
    logger.debug("wrote %s (%d bytes)", path, len(text))
    return path


def provenance(config: Dict[str, Any] | None) -> Dict[str, Any]:
    return {"version": __version__, "config": clean_for_json(config or {})}


def write_json(path: str, payload: Dict[str, Any], *, config: Dict[str, Any] | None = None) -> str:
    document = provenance(config)
    document.update(clean_for_json(payload))
    return atomic_write_text(path, json.dumps(document, indent=2, ensure_ascii=False) + "\n")


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], *, config: Dict[str, Any] | None = None) -> str:
    buf = io.StringIO()
    buf.write(f"# qutrit_link {__version__}\n")
    buf.write("# config: " + json.dumps(clean_for_json(config or {}), sort_keys=True, separators=(",", ":")) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) if isinstance(v, (int, float, np.number)) and not isinstance(v, bool)
                         else ("" if v is None else v) for v in row])
    return buf.getvalue()


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]], *,
              config: Dict[str, Any] | None = None) -> str:
    return atomic_write_text(path, render_csv(header, rows, config=config))


def columns_to_rows(columns: Sequence[np.ndarray]) -> List[List[float]]:
    stacked = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    return stacked.tolist()


def sender_rows(sender_result, wavepacket) -> List[List[float]]:
    pops = sender_result.populations
    return columns_to_rows([
        sender_result.times, sender_result.envelope, wavepacket.phi_I, wavepacket.phi_II,
        pops.minus, pops.zero, pops.plus,
    ])


def receiver_rows(receiver_result) -> List[List[float]]:
    area = receiver_result.area
    g = receiver_result.gammas
    return columns_to_rows([
        area.grid.times(), area.envelope, area.eta, area.zeta,
        g.g00, g.g11, g.g12, g.g01, g.gm10,
    ])


def oracle_rows(branches) -> List[List[float]]:
    columns = [branches.times()]
    for amp in list(branches.two_photon) + list(branches.one_photon):
        columns.extend([amp.real, amp.imag])
    norm2, norm1 = branches.norms()
    columns.extend([norm2, norm1])
    return columns_to_rows(columns)
