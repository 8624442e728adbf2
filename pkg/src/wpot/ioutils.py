"""Deterministic serialization helpers for CLI artifacts.

JSON artifacts format every float with 17 significant digits so identical
invocations produce byte-identical files; CSV readers report the offending
line number on malformed input.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ValidationError
from .manifold import Sphere, Torus, manifold_from_kind
from .potential import SampledPotential


def format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite value {x} cannot appear in artifacts")
    return f"{x:.17g}"


def _write_json(obj, out, indent: int):
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(pad + "  " + json.dumps(str(k)) + ": ")
            _write_json(v, out, indent + 2)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[")
        for i, v in enumerate(items):
            _write_json(v, out, indent)
            if i < len(items) - 1:
                out.append(", ")
        out.append("]")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif obj is None:
        out.append("null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, np.ndarray):
        _write_json(obj.tolist(), out, indent)
    else:
        raise TypeError(f"cannot serialize {type(obj)} deterministically")


def dumps_json(obj) -> str:
    out = []
    _write_json(obj, out, 0)
    out.append("\n")
    return "".join(out)


def write_json(path, obj) -> None:
    text = dumps_json(obj)
    with open(path, "w") as fh:
        fh.write(text)


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


# --------------------------------------------------------------------------
# Sampled-potential CSV format
# --------------------------------------------------------------------------

_AXIS_LABELS = {
    "torus": lambda n: [f"x{i + 1}" for i in range(n)],
    "sphere1": lambda n: ["angle"],
    "sphere2": lambda n: ["colat", "lon"],
}


def write_potential_csv(path, oracle: SampledPotential) -> None:
    manifold = oracle.manifold
    if isinstance(manifold, Torus):
        labels = _AXIS_LABELS["torus"](manifold.n)
        coords = _torus_grid_coords(manifold.n, oracle.resolution)
    elif manifold.n == 1:
        labels = _AXIS_LABELS["sphere1"](1)
        coords = _sphere1_grid_coords(oracle.resolution)
    else:
        labels = _AXIS_LABELS["sphere2"](2)
        coords = _sphere2_grid_coords(oracle.resolution)
    lines = [
        "# wpot-potential-grid",
        f"# manifold={manifold.kind}",
        f"# n={manifold.n}",
        f"# p={format_float(oracle.p)}",
        f"# resolution={oracle.resolution}",
        ",".join(labels + ["value"]),
    ]
    flat = oracle.values.ravel()
    for row, value in zip(coords, flat):
        lines.append(",".join(format_float(c) for c in row) + "," + format_float(value))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _torus_grid_coords(n, resolution):
    axis = -0.5 + np.arange(resolution) / resolution
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _sphere1_grid_coords(resolution):
    theta = -math.pi + 2 * math.pi * np.arange(resolution) / resolution
    return theta[:, None]


def _sphere2_grid_coords(resolution):
    colat = math.pi * (np.arange(resolution) + 0.5) / resolution
    lon = -math.pi + 2 * math.pi * np.arange(resolution) / resolution
    ca, lo = np.meshgrid(colat, lon, indexing="ij")
    return np.stack([ca.ravel(), lo.ravel()], axis=1)


def read_potential_csv(path) -> SampledPotential:
    meta = {}
    values = []
    header_seen = False
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, val = body.partition("=")
                    meta[key.strip()] = val.strip()
                continue
            parts = line.split(",")
            if not header_seen:
                header_seen = True
                if parts[-1] != "value":
                    raise ValidationError(
                        f"{path}: line {lineno}: expected a header ending in 'value'"
                    )
                continue
            try:
                values.append(float(parts[-1]))
            except ValueError as exc:
                raise ValidationError(
                    f"{path}: line {lineno}: malformed value {parts[-1]!r}"
                ) from exc
    for key in ("manifold", "n", "p", "resolution"):
        if key not in meta:
            raise ValidationError(f"{path}: missing '# {key}=' metadata line")
    try:
        manifold = manifold_from_kind(meta["manifold"], int(meta["n"]))
        p = float(meta["p"])
        resolution = int(meta["resolution"])
    except (ValueError, KeyError) as exc:
        raise ValidationError(f"{path}: malformed metadata: {exc}") from exc
    if isinstance(manifold, Torus):
        expected = resolution**manifold.n
        shape = (resolution,) * manifold.n
    elif manifold.n == 1:
        expected, shape = resolution, (resolution,)
    else:
        expected, shape = resolution * resolution, (resolution, resolution)
    if len(values) != expected:
        raise ValidationError(
            f"{path}: expected {expected} grid rows for resolution {resolution}, "
            f"got {len(values)}"
        )
    return SampledPotential(manifold, p, np.asarray(values).reshape(shape))


def load_points_json(path, manifold) -> np.ndarray:
    data = load_json(path)
    if isinstance(data, dict) and "support" in data:
        data = data["support"]
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != manifold.point_dim:
        raise ValidationError(
            f"{path}: expected points with {manifold.point_dim} coordinates, "
            f"got shape {arr.shape}"
        )
    if isinstance(manifold, Sphere):
        arr = arr / np.linalg.norm(arr, axis=1, keepdims=True)
    return arr
