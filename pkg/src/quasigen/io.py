"""JSON reports and CSV spectra on disk."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from .genfunc import GeneralizedFunctionRep
from .specgrid import Grid
from .weights import WeightSequence, make_weight_sequence

REP_META = "rep.json"


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types; non-finite floats become ``null``, complex numbers ``[re, im]``."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return to_jsonable(obj.to_dict())
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if not f.name.startswith("_")}
    if isinstance(obj, WeightSequence):
        return obj.to_spec()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path: str | Path, payload: dict[str, Any], timestamp: bool = True) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = to_jsonable(payload)
    if timestamp:
        body = {"timestamp": datetime.now(timezone.utc).isoformat(), **body}
    path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")
    return path


def _spectrum_csv(path: Path, xi: np.ndarray, spec: np.ndarray) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xi", "re", "im"])
        for a, s in zip(xi, spec):
            w.writerow([repr(float(a)), repr(float(s.real)), repr(float(s.imag))])


def write_rep(directory: str | Path, rep: GeneralizedFunctionRep, extra: dict[str, Any] | None = None) -> Path:
    """One ``n_XXX.csv`` spectrum per member plus ``rep.json`` (1-D grids)."""
    if rep.grid.d != 1:
        raise ValueError("CSV output is one-dimensional")
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for n, spec in zip(rep.n_values, rep.spectra):
        _spectrum_csv(out / f"n_{int(n):03d}.csv", rep.grid.xi, spec)
    meta = {
        "grid": rep.grid.to_spec(),
        "n_values": rep.n_values,
        "bands": rep.bands,
        "domain": rep.domain,
        "weight": rep.weight.to_spec(),
        "noise": rep.noise,
    }
    if extra:
        meta.update(extra)
    write_json(out / REP_META, meta, timestamp=False)
    return out


def read_rep(directory: str | Path) -> GeneralizedFunctionRep:
    src = Path(directory)
    meta = json.loads((src / REP_META).read_text())
    g = meta["grid"]
    grid = Grid(g["X"], g["N"], g.get("d", 1))
    spectra = []
    for n in meta["n_values"]:
        data = np.loadtxt(src / f"n_{int(n):03d}.csv", delimiter=",", skiprows=1, ndmin=2)
        spectra.append(data[:, 1] + 1j * data[:, 2])
    noise = meta.get("noise")
    return GeneralizedFunctionRep(
        grid, np.asarray(meta["n_values"]), np.stack(spectra), np.asarray(meta["bands"], dtype=float),
        tuple(meta["domain"]), make_weight_sequence(meta["weight"]),
        None if noise is None else np.asarray(noise, dtype=float),
    )
