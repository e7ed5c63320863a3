"""CSV and JSON serialisation with byte-stable output.

Floats are written in their shortest round-trip form (scientific notation
in CSV), field order is fixed, and line endings are ``\\n``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .classical import Trajectory
from .core import NumericalError
from .magnetization import DhvaSpectrum, MagnetizationSweep
from .ode_oracle import Certification
from .spectrum import LevelTable
from .thermo import FreeEnergyBreakdown


class IoFailure(NumericalError):
    pass


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    return np.format_float_scientific(x, unique=True, trim="-")


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _plain(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "value") and not is_dataclass(value):
        return value.value
    if is_dataclass(value):
        return _plain(asdict(value))
    return value


def json_text(obj: Any) -> str:
    return json.dumps(_plain(obj), indent=2, allow_nan=True) + "\n"


def level_table_csv(table: LevelTable) -> str:
    return csv_text(["m", "l", "spin", "energy"], ((lv.m, lv.l, lv.spin, lv.energy) for lv in table))


def level_table_json(table: LevelTable) -> dict:
    return {
        "b": table.b,
        "truncation": asdict(table.truncation),
        "m": [lv.m for lv in table],
        "l": [lv.l for lv in table],
        "spin": [lv.spin.value for lv in table],
        "energy": [lv.energy for lv in table],
    }


def certification_csv(cert: Certification) -> str:
    return csv_text(["m", "l", "closed_form", "fd", "rel_dev"],
                    ((r.m, r.l, r.closed_form, r.fd, r.rel_dev) for r in cert.rows))


def certification_json(cert: Certification) -> dict:
    return {
        "max_rel_dev": cert.max_rel_dev,
        "worst": {"m": cert.worst[0], "l": cert.worst[1]},
        "rows": [asdict(r) for r in cert.rows],
    }


def breakdown_json(fe: FreeEnergyBreakdown) -> dict:
    return {"smooth": fe.smooth, "harmonics": list(fe.harmonics), "total": fe.total, "convention": fe.convention}


def breakdown_csv(fe: FreeEnergyBreakdown) -> str:
    rows = [("smooth", 0, fe.smooth, fe.convention)]
    rows += [("harmonic", n, v, fe.convention) for n, v in enumerate(fe.harmonics, start=1)]
    rows.append(("total", 0, fe.total, fe.convention))
    return csv_text(["component", "n", "value", "convention"], rows)


def sweep_csv(sweep: MagnetizationSweep) -> str:
    return csv_text(["b", "inv_b", "M", "source", "convention"],
                    ((b, u, m, sweep.source, sweep.sign_convention)
                     for b, u, m in zip(sweep.grid, sweep.inv_b, sweep.m_values)))


def sweep_json(sweep: MagnetizationSweep) -> dict:
    return {
        "b": sweep.grid,
        "inv_b": sweep.inv_b,
        "M": sweep.m_values,
        "source": sweep.source,
        "convention": sweep.sign_convention,
        "phase_convention": sweep.phase_convention,
    }


def dhva_json(spec: DhvaSpectrum) -> dict:
    return {"frequencies": spec.frequencies, "amplitudes": spec.amplitudes, "detrend_order": spec.detrend_order}


def dhva_csv(spec: DhvaSpectrum) -> str:
    return csv_text(["frequency", "amplitude"], zip(spec.frequencies, spec.amplitudes))


def trajectory_csv(traj: Trajectory) -> str:
    rows = (
        (t, s[0], s[1], s[2], s[3], e)
        for t, s, e in zip(traj.times, traj.states, traj.energy)
    )
    return csv_text(["t", "theta", "phi", "p_theta", "p_phi", "energy"], rows)


def trajectory_json(traj: Trajectory) -> dict:
    return {
        "t": traj.times,
        "theta": traj.states[:, 0],
        "phi": traj.states[:, 1],
        "p_theta": traj.states[:, 2],
        "p_phi": traj.states[:, 3],
        "energy": traj.energy,
        "p_phi_drift": traj.p_phi_drift,
        "chart_exit": traj.chart_exit,
    }


_RENDERERS = {
    LevelTable: (level_table_csv, level_table_json),
    Certification: (certification_csv, certification_json),
    FreeEnergyBreakdown: (breakdown_csv, breakdown_json),
    MagnetizationSweep: (sweep_csv, sweep_json),
    DhvaSpectrum: (dhva_csv, dhva_json),
    Trajectory: (trajectory_csv, trajectory_json),
}


def render(result: Any, fmt: str) -> str:
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    for kind, (to_csv, to_json) in _RENDERERS.items():
        if isinstance(result, kind):
            return to_csv(result) if fmt == "csv" else json_text(to_json(result))
    if isinstance(result, dict):
        if fmt == "json":
            return json_text(result)
        keys = list(result)
        return csv_text(keys, [[result[k] for k in keys]])
    raise TypeError(f"cannot render {type(result).__name__}")


def emit(result: Any, fmt: str, path: str | Path | None) -> str:
    """Render ``result`` and write it to ``path`` (``None`` or ``"-"`` returns the text only)."""
    text = render(result, fmt)
    if path is None or str(path) == "-":
        return text
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            tmp.unlink()
        except OSError:
            pass
        raise IoFailure(f"cannot write {path}: {exc.strerror or exc}") from exc
    return text
