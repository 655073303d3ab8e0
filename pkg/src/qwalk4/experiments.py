"""
Experiment configuration, figure presets, and deterministic file output.

Configs are JSON objects::

    {"coin": "grover4", "initial": "phi1", "steps": 12,
     "shifts": [1, -1, 2, -2], "apply_sagnac_swap": false, "recenter": false,
     "mode": "walk1d"}

``coin`` is a registry name or ``file:<path>``; ``initial`` is ``phi1``,
``phi2``, ``phi3``, ``basis:<idx>`` or eight numbers ``[re0, im0, ..., re3, im3]``.
For ``"mode": "walk2d"`` an odd ``N`` is required and the shifts are derived
from it.

1D output rows are ``step,position,p_Hp,p_Hm,p_Vp,p_Vm,p_total`` for every
step; 2D output rows are ``x,y,p`` for the final step. Floats are written with
17 significant digits so they parse back bit-identically.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .coins import COIN_REGISTRY, CoinOperator, coin_from_name
from .embedding import (
    EmbeddingParams,
    embedded_shifts,
    overlap_check,
    run_embedded_2d,
)
from .tensor_core import COIN_BASIS
from .walk import (
    DEFAULT_SHIFTS,
    PHI1,
    PHI2,
    PHI3,
    ShiftVector,
    WalkConfig,
    coin_marginal,
    evolve,
)

__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "ExperimentConfig",
    "DistributionRecord",
    "GridCell",
    "ExperimentResult",
    "parse_config",
    "config_from_dict",
    "parse_initial",
    "run_experiment",
    "emit",
    "parse_csv",
    "parse_json",
    "write_atomic",
    "PRESETS",
    "preset_config",
    "run_preset",
]

SCHEMA_VERSION = "qwalk4-distribution/1"
CSV_HEADER_1D = ("step", "position", "p_Hp", "p_Hm", "p_Vp", "p_Vm", "p_total")
CSV_HEADER_2D = ("x", "y", "p")
FORMATS = ("csv", "json", "svg")
NAMED_STATES = {"phi1": PHI1, "phi2": PHI2, "phi3": PHI3}
INITIAL_NORM_TOL = 1e-9


class ConfigError(ValueError):
    """Invalid experiment configuration; ``code`` names the failure."""

    def __init__(self, code: str, message: str):
        super().__init__(f"[{code}] {message}")
        self.code = code
        self.message = message


@dataclass(frozen=True)
class ExperimentConfig:
    coin: str = "grover4"
    initial_label: str = "phi2"
    initial: np.ndarray = field(default_factory=lambda: PHI2.copy(), repr=False)
    steps: int = 12
    shifts: tuple[int, int, int, int] = DEFAULT_SHIFTS.e
    apply_sagnac_swap: bool = False
    recenter: bool = False
    mode: str = "walk1d"
    N: int | None = None
    output: str | None = None
    format: str = "csv"


@dataclass(frozen=True)
class DistributionRecord:
    step: int
    position: int
    p_components: tuple[float, float, float, float]

    @property
    def p_total(self) -> float:
        return float(sum(self.p_components))


@dataclass(frozen=True)
class GridCell:
    x: int
    y: int
    p: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    metadata: dict[str, Any]
    records: list  # DistributionRecord (1D) or GridCell (2D)
    totals: list[float]  # total probability per step


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

_KNOWN_KEYS = {
    "coin", "initial", "steps", "shifts", "apply_sagnac_swap", "recenter",
    "mode", "N", "output", "format",
}


def parse_initial(value) -> tuple[str, np.ndarray]:
    """Return (label, normalized coin vector) for a config ``initial`` entry."""
    if isinstance(value, str):
        if value in NAMED_STATES:
            return value, NAMED_STATES[value].copy()
        if value.startswith("basis:"):
            try:
                idx = int(value[len("basis:"):])
            except ValueError:
                raise ConfigError("bad_initial", f"bad basis index in {value!r}") from None
            if not 0 <= idx < 4:
                raise ConfigError("bad_initial", f"basis index must be 0..3, got {idx}")
            v = np.zeros(4, dtype=np.complex128)
            v[idx] = 1
            return f"basis:{idx}", v
        raise ConfigError("bad_initial", f"unknown initial state {value!r}")
    try:
        nums = np.asarray(value, dtype=float).reshape(-1)
    except (TypeError, ValueError):
        raise ConfigError("bad_initial", f"cannot read initial state {value!r}") from None
    if nums.size != 8:
        raise ConfigError("bad_initial", f"need 8 numbers (re, im pairs), got {nums.size}")
    v = nums[0::2] + 1j * nums[1::2]
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0:
        raise ConfigError("bad_initial", "initial state cannot be normalized")
    v = v / norm
    if abs(np.linalg.norm(v) - 1) > INITIAL_NORM_TOL:
        raise ConfigError("bad_initial", "initial state cannot be normalized")
    label = "[" + ", ".join(f"{x:.17g}" for x in nums) + "]"
    return label, v


def _check_coin(name) -> None:
    if not isinstance(name, str):
        raise ConfigError("unknown_coin", f"coin must be a string, got {name!r}")
    if name.startswith("file:"):
        try:
            coin_from_name(name)
        except OSError as exc:
            raise ConfigError("bad_coin_file", str(exc)) from None
        except ValueError as exc:
            raise ConfigError("bad_coin_file", str(exc)) from None
    elif name not in COIN_REGISTRY:
        raise ConfigError("unknown_coin", f"unknown coin {name!r}; known: {sorted(COIN_REGISTRY)}")


def _as_int(value, code: str, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(code, f"{what} must be an integer, got {value!r}")
    return int(value)


def config_from_dict(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("invalid_json", "config must be a JSON object")
    unknown = set(d) - _KNOWN_KEYS
    if unknown:
        raise ConfigError("unknown_field", f"unknown config keys: {sorted(unknown)}")

    coin = d.get("coin", "grover4")
    _check_coin(coin)
    label, initial = parse_initial(d.get("initial", "phi2"))

    mode = d.get("mode", "walk1d")
    if mode not in ("walk1d", "walk2d"):
        raise ConfigError("bad_mode", f"mode must be walk1d or walk2d, got {mode!r}")

    N = None
    if mode == "walk2d":
        if "N" not in d:
            raise ConfigError("missing_N", "walk2d needs an odd N")
        N = _as_int(d["N"], "even_N", "N")
        if N < 3 or N % 2 == 0:
            raise ConfigError("even_N", f"N must be an odd integer >= 3, got {N}")

    default_steps = (N - 1) // 2 if N is not None else 12
    steps = _as_int(d.get("steps", default_steps), "bad_steps", "steps")
    if steps < 0:
        raise ConfigError("negative_steps", f"steps must be >= 0, got {steps}")
    if N is not None and steps > (N - 1) // 2:
        raise ConfigError("step_budget", f"walk2d with N={N} allows at most {(N - 1) // 2} steps")

    shifts = d.get("shifts", list(DEFAULT_SHIFTS.e))
    if not isinstance(shifts, (list, tuple)) or len(shifts) != 4:
        raise ConfigError("bad_shifts", f"shifts must be 4 integers, got {shifts!r}")
    shifts = tuple(_as_int(s, "bad_shifts", "shift") for s in shifts)
    if N is not None:
        shifts = embedded_shifts(EmbeddingParams(N, steps)).e

    fmt = d.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError("bad_format", f"format must be one of {FORMATS}, got {fmt!r}")

    for key in ("apply_sagnac_swap", "recenter"):
        if not isinstance(d.get(key, False), bool):
            raise ConfigError("bad_flag", f"{key} must be true or false")

    if mode == "walk2d" and d.get("apply_sagnac_swap", False):
        raise ConfigError("bad_flag", "apply_sagnac_swap is not supported in walk2d mode")

    return ExperimentConfig(
        coin=coin,
        initial_label=label,
        initial=initial,
        steps=steps,
        shifts=shifts,
        apply_sagnac_swap=d.get("apply_sagnac_swap", False),
        recenter=d.get("recenter", False),
        mode=mode,
        N=N,
        output=d.get("output"),
        format=fmt,
    )


def parse_config(text: str | bytes) -> ExperimentConfig:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("invalid_json", str(exc)) from None
    return config_from_dict(d)


# --------------------------------------------------------------------------
# running
# --------------------------------------------------------------------------


def _metadata(cfg: ExperimentConfig) -> dict[str, Any]:
    md: dict[str, Any] = {
        "schema": SCHEMA_VERSION,
        "mode": cfg.mode,
        "coin": cfg.coin,
        "initial": cfg.initial_label,
        "initial_amplitudes": [[float(z.real), float(z.imag)] for z in cfg.initial],
        "steps": cfg.steps,
        "shifts": list(cfg.shifts),
        "coin_basis": list(COIN_BASIS),
        "shift_convention": "coin state j = (H+, H-, V+, V-)[j] moves by shifts[j]",
        "apply_sagnac_swap": cfg.apply_sagnac_swap,
        "recenter": cfg.recenter,
    }
    if cfg.mode == "walk2d":
        md["N"] = cfg.N
        md["axes"] = "H+: +x, H-: -x, V+: +y, V-: -y"
    return md


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    coin: CoinOperator = coin_from_name(cfg.coin)
    md = _metadata(cfg)
    if cfg.mode == "walk2d":
        params = EmbeddingParams(cfg.N, cfg.steps)
        wcfg = WalkConfig(coin=coin, shifts=ShiftVector(cfg.shifts), steps=cfg.steps,
                          initial_coin=cfg.initial, apply_sagnac_swap=cfg.apply_sagnac_swap)
        traj = evolve(wcfg)
        report = overlap_check(params, traj)
        md["overlap_free"] = bool(report)
        grid = run_embedded_2d(coin, cfg.initial, params)
        cells = [GridCell(x, y, p) for (x, y), p in sorted(grid.items())]
        totals = [float(coin_marginal(s).sum()) for s in traj]
        return ExperimentResult(cfg, md, cells, totals)

    wcfg = WalkConfig(coin=coin, shifts=ShiftVector(cfg.shifts), steps=cfg.steps,
                      initial_coin=cfg.initial, apply_sagnac_swap=cfg.apply_sagnac_swap,
                      recenter=cfg.recenter)
    records = []
    totals = []
    for s in evolve(wcfg):
        for n in sorted(s.amplitudes):
            p = np.abs(s.amplitudes[n]) ** 2
            records.append(DistributionRecord(s.t, n, tuple(float(x) for x in p)))
        totals.append(float(coin_marginal(s).sum()))
    return ExperimentResult(cfg, md, records, totals)


# --------------------------------------------------------------------------
# emission
# --------------------------------------------------------------------------


def _f(x: float) -> str:
    return f"{x:.17g}"


def _is_2d(records) -> bool:
    return isinstance(records[0], GridCell)


def _csv_bytes(records, metadata) -> bytes:
    buf = io.StringIO()
    if metadata:
        for k, v in metadata.items():
            buf.write(f"# {k}: {json.dumps(v, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    if _is_2d(records):
        w.writerow(CSV_HEADER_2D)
        for c in sorted(records, key=lambda c: (c.x, c.y)):
            w.writerow([c.x, c.y, _f(c.p)])
    else:
        w.writerow(CSV_HEADER_1D)
        for r in sorted(records, key=lambda r: (r.step, r.position)):
            w.writerow([r.step, r.position, *(_f(p) for p in r.p_components), _f(r.p_total)])
    return buf.getvalue().encode("utf-8")


def _json_bytes(records, metadata) -> bytes:
    if _is_2d(records):
        doc: dict[str, Any] = {
            "N": (metadata or {}).get("N"),
            "steps": (metadata or {}).get("steps"),
            "cells": [[c.x, c.y, c.p] for c in sorted(records, key=lambda c: (c.x, c.y))],
        }
    else:
        doc = {
            "records": [
                {
                    "step": r.step,
                    "position": r.position,
                    "p_Hp": r.p_components[0],
                    "p_Hm": r.p_components[1],
                    "p_Vp": r.p_components[2],
                    "p_Vm": r.p_components[3],
                    "p_total": r.p_total,
                }
                for r in sorted(records, key=lambda r: (r.step, r.position))
            ]
        }
    if metadata:
        doc["metadata"] = metadata
    return (json.dumps(doc, indent=1, sort_keys=True) + "\n").encode("utf-8")


def _svg_bytes(records, metadata) -> bytes:
    title = ""
    if metadata:
        title = f"{metadata.get('coin')} / {metadata.get('initial')} / {metadata.get('steps')} steps"
    out = []
    if _is_2d(records):
        xs = [c.x for c in records]
        ys = [c.y for c in records]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
        cell = 20
        pmax = max(c.p for c in records) or 1.0
        w = (x1 - x0 + 1) * cell + 60
        h = (y1 - y0 + 1) * cell + 60
        out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">')
        out.append(f'<text x="10" y="16" font-size="12">{title}</text>')
        for c in sorted(records, key=lambda c: (c.x, c.y)):
            px = 40 + (c.x - x0) * cell
            py = 30 + (y1 - c.y) * cell
            out.append(f'<rect x="{px}" y="{py}" width="{cell}" height="{cell}" '
                       f'fill="#1f4e99" fill-opacity="{c.p / pmax:.6f}"/>')
        for x in range(x0, x1 + 1):
            out.append(f'<text x="{40 + (x - x0) * cell + cell // 2}" y="{h - 12}" '
                       f'font-size="8" text-anchor="middle">{x}</text>')
        for y in range(y0, y1 + 1):
            out.append(f'<text x="34" y="{30 + (y1 - y) * cell + cell // 2 + 3}" '
                       f'font-size="8" text-anchor="end">{y}</text>')
    else:
        last = max(r.step for r in records)
        final = sorted((r for r in records if r.step == last), key=lambda r: r.position)
        lo, hi = final[0].position, final[-1].position
        pmax = max(r.p_total for r in final) or 1.0
        bar = 14
        plot_h = 240
        w = (hi - lo + 1) * bar + 80
        h = plot_h + 80
        base = 40 + plot_h
        out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">')
        out.append(f'<text x="10" y="16" font-size="12">{title} (t = {last})</text>')
        out.append(f'<line x1="50" y1="{base}" x2="{w - 20}" y2="{base}" stroke="black"/>')
        out.append(f'<text x="45" y="44" font-size="9" text-anchor="end">{pmax:.4f}</text>')
        for r in final:
            bh = r.p_total / pmax * plot_h
            px = 50 + (r.position - lo) * bar
            out.append(f'<rect x="{px + 1}" y="{base - bh:.4f}" width="{bar - 2}" '
                       f'height="{bh:.4f}" fill="#1f4e99"/>')
            out.append(f'<text x="{px + bar // 2}" y="{base + 12}" font-size="8" '
                       f'text-anchor="middle">{r.position}</text>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def emit(records: Sequence, fmt: str, metadata: dict | None = None) -> bytes:
    """Serialize distribution records to CSV, JSON, or SVG bytes."""
    if not records:
        raise ValueError("nothing to emit")
    if fmt == "csv":
        return _csv_bytes(records, metadata)
    if fmt == "json":
        return _json_bytes(records, metadata)
    if fmt == "svg":
        return _svg_bytes(records, metadata)
    raise ValueError(f"unknown format {fmt!r}")


def parse_csv(data: bytes | str) -> list:
    """Read back records written by ``emit(..., "csv")``."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = [ln for ln in data.splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    header, body = tuple(rows[0]), rows[1:]
    if header == CSV_HEADER_2D:
        return [GridCell(int(x), int(y), float(p)) for x, y, p in body]
    if header != CSV_HEADER_1D:
        raise ValueError(f"unrecognized CSV header {header}")
    return [DistributionRecord(int(r[0]), int(r[1]), tuple(float(x) for x in r[2:6])) for r in body]


def parse_json(data: bytes | str) -> list:
    doc = json.loads(data)
    if "cells" in doc:
        return [GridCell(int(x), int(y), float(p)) for x, y, p in doc["cells"]]
    return [
        DistributionRecord(r["step"], r["position"], (r["p_Hp"], r["p_Hm"], r["p_Vp"], r["p_Vm"]))
        for r in doc["records"]
    ]


def write_atomic(path: str | os.PathLike, data: bytes) -> Path:
    """Write to a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


# --------------------------------------------------------------------------
# presets
# --------------------------------------------------------------------------

PRESETS: dict[str, dict[str, Any]] = {
    "fig_grover_localized": {"coin": "grover4", "initial": "phi1", "steps": 12},
    "fig_grover_spreading": {"coin": "grover4", "initial": "phi2", "steps": 12},
    "fig_hadamard_phi3": {"coin": "hadamard4", "initial": "phi3", "steps": 12},
    # the 2D figures do not say which initial state was used
    "fig_2d_hadamard": {"coin": "hadamard4", "initial": "phi2", "mode": "walk2d", "N": 21, "steps": 10},
    "fig_2d_grover": {"coin": "grover4", "initial": "phi1", "mode": "walk2d", "N": 21, "steps": 10},
}


def preset_config(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError("unknown_preset", f"unknown preset {name!r}; known: {sorted(PRESETS)}")
    return config_from_dict(dict(PRESETS[name]))


def run_preset(name: str, out_dir: str | os.PathLike, formats: Sequence[str] = FORMATS) -> list[Path]:
    """Run a figure preset and write ``<name>.<fmt>`` for each format."""
    cfg = preset_config(name)
    result = run_experiment(cfg)
    md = dict(result.metadata, preset=name)
    out_dir = Path(out_dir)
    paths = []
    for fmt in formats:
        paths.append(write_atomic(out_dir / f"{name}.{fmt}", emit(result.records, fmt, md)))
    return paths
