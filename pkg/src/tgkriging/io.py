"""CSV files exchanged by the command-line pipeline.

All files are comma separated, UTF-8, LF line endings, with a header row.
Floats are written with ``repr`` so they parse back exactly.
"""
from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .alpha import AlphaProfile
from .design import DesignSet
from .pod import PodCurve


def _fmt(v):
    if v is None or (isinstance(v, float) and np.isnan(v)):
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    atomic_write(path, "\n".join(lines) + "\n")


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader if row]
    return header, rows


def _floats(rows):
    return np.array([[float(x) if x != "" else np.nan for x in row] for row in rows], dtype=float)


def coord_names(r):
    return ["a"] + [f"x{k}" for k in range(1, r)]


def write_design(path, design):
    pts = design.points if isinstance(design, DesignSet) else np.atleast_2d(design)
    write_csv(path, coord_names(pts.shape[1]), pts.tolist())


def read_design(path):
    header, rows = read_csv(path)
    if header[0] != "a":
        raise ValueError(f"{path}: first column must be 'a'")
    return DesignSet(_floats(rows))


def write_observations(path, design, z):
    pts = design.points if isinstance(design, DesignSet) else np.atleast_2d(design)
    rows = [list(p) + [float(v)] for p, v in zip(pts, z)]
    write_csv(path, coord_names(pts.shape[1]) + ["z"], rows)


def read_observations(path):
    header, rows = read_csv(path)
    if header[0] != "a" or header[-1] != "z":
        raise ValueError(f"{path}: expected columns a, x1.., z")
    data = _floats(rows)
    return data[:, :-1], data[:, -1]


def write_alpha_profile(path, profile):
    rows = [
        [float(a), float(ll), None if not np.isfinite(lm) else float(lm)]
        for a, ll, lm in zip(profile.alphas, profile.log_l_log, profile.log_l_map)
    ]
    write_csv(path, ["alpha", "log_l_log", "log_l_map"], rows)


def read_alpha_profile(path):
    header, rows = read_csv(path)
    if header != ["alpha", "log_l_log", "log_l_map"]:
        raise ValueError(f"{path}: unexpected header {header}")
    data = _floats(rows).reshape(-1, 3)
    return AlphaProfile(data[:, 0], data[:, 1], data[:, 2])


def alpha_tag(alpha):
    text = f"{float(alpha):.6f}".rstrip("0").rstrip(".")
    return text or "0"


def draws_path(out_dir, alpha):
    return Path(out_dir) / f"theta_draws_{alpha_tag(alpha)}.csv"


def write_draws(path, thetas):
    thetas = np.atleast_2d(thetas)
    write_csv(path, [f"theta{k}" for k in range(1, thetas.shape[1] + 1)], thetas.tolist())


def read_draws(path):
    _, rows = read_csv(path)
    return _floats(rows)


def write_predictions(path, points, loc, scale, safe):
    pts = np.atleast_2d(points)
    rows = [list(p) + [float(a), float(b), float(c)] for p, a, b, c in zip(pts, loc, scale, safe)]
    header = coord_names(pts.shape[1]) + ["location_transformed", "scale_transformed", "safe_prob"]
    write_csv(path, header, rows)


def read_predictions(path):
    header, rows = read_csv(path)
    return header, _floats(rows)


def gamma_column(gamma):
    return f"pod_{round(float(gamma) * 100, 6):g}"


def write_pod_curve(path, curve):
    gammas = sorted(curve.pod_gamma)
    header = ["a", "pod_mean"] + [gamma_column(g) for g in gammas]
    rows = [
        [float(a), float(curve.pod_mean[i])] + [float(curve.pod_gamma[g][i]) for g in gammas]
        for i, a in enumerate(curve.a_grid)
    ]
    write_csv(path, header, rows)


def read_pod_curve(path):
    header, rows = read_csv(path)
    if header[:2] != ["a", "pod_mean"]:
        raise ValueError(f"{path}: unexpected header {header}")
    data = _floats(rows)
    gammas = [float(h[len("pod_"):]) / 100.0 for h in header[2:]]
    return PodCurve(data[:, 0], data[:, 1], {g: data[:, 2 + k] for k, g in enumerate(gammas)})


def write_json(path, obj):
    atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
