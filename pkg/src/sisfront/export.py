"""CSV/JSON writers for every artifact the command line produces.

All floats are written with 17 significant digits so values round-trip.
"""

import csv
import hashlib
import json
import math
import os

import numpy as np


def fmt(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    return format(value, ".17g")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def write_json(path, data):
    with open(path, "w") as fh:
        json.dump(_jsonable(data), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def config_hash(config):
    text = json.dumps(_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def profile_name(t):
    return f"profile_{format(float(t), '.10g')}.csv"


def write_trajectory(directory, traj):
    """``fronts.csv`` plus one ``profile_<t>.csv`` per stored snapshot."""
    r0_by_t = {round(t, 12): r for t, r in traj.r0f_history}
    rows = []
    for t, g, h, gd, hd, sup in traj.rows:
        rows.append((t, g, h, gd, hd, sup, r0_by_t.get(round(t, 12))))
    paths = [write_csv(os.path.join(directory, "fronts.csv"), ["t", "g", "h", "gdot", "hdot", "supI", "R0F"], rows)]
    for snap in traj.snapshots:
        x, values = snap.profile()
        paths.append(write_csv(os.path.join(directory, profile_name(snap.t)), ["x", "I"], zip(x, values)))
    return paths


def write_r0_series(directory, series):
    return write_csv(os.path.join(directory, "r0_series.csv"), ["t", "g", "h", "R0F"], series)


def write_r0_probe(directory, report):
    return write_csv(os.path.join(directory, "r0_probe.csv"), ["parameter", "value", "R0"], report.rows)


def write_semiwaves(directory, results, profiles=False):
    paths = [write_csv(os.path.join(directory, "semiwave.csv"), ["direction", "k_star", "slope0"],
                       [(r.direction, r.k_star, r.slope0) for r in results])]
    if profiles:
        for r in results:
            paths.append(write_csv(os.path.join(directory, f"semiwave_profile_{r.direction}.csv"),
                                   ["z", "q"], zip(r.z, r.q)))
    return paths


def write_equilibrium(directory, profile):
    return write_csv(os.path.join(directory, "equilibrium.csv"), ["x", "Istar"], zip(profile.x, profile.values))


def write_verdict(directory, outcome, name="verdict.json"):
    return write_json(os.path.join(directory, name), outcome.to_dict())


def write_mu_scan(directory, probes):
    rows = [(mu, verdict, t0) for mu, verdict, t0 in sorted(probes, key=lambda p: p[0])]
    return write_csv(os.path.join(directory, "mu_scan.csv"), ["mu", "verdict", "t0_or_blank"], rows)


def write_manifest(directory, paths, config):
    digest = config_hash(config)
    artifacts = sorted(os.path.relpath(p, directory) for p in paths)
    return write_json(os.path.join(directory, "manifest.json"),
                      {"config_hash": digest, "config": config,
                       "artifacts": [{"path": p, "config_hash": digest} for p in artifacts]})
