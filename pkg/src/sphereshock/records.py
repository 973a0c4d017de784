"""Run records: append-only time series of solver/modulation/diagnostic
scalars plus optional field snapshots, with JSON-lines and CSV persistence.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = 1


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def config_hash(config_dict):
    blob = json.dumps(_jsonable(config_dict), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


@dataclass
class RunRecord:
    config: dict
    samples: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    status: str = "running"
    summary: dict = field(default_factory=dict)

    def add_sample(self, **row):
        if self.samples and row["t_tilde"] <= self.samples[-1]["t_tilde"]:
            raise ValueError("samples must be strictly increasing in t_tilde")
        self.samples.append(_jsonable(row))

    def add_snapshot(self, **snap):
        self.snapshots.append(snap)

    def series(self, key):
        return np.array([s[key] for s in self.samples if s.get(key) is not None])

    def write_jsonl(self, path):
        with open(path, "w") as f:
            header = {"type": "header", "schema_version": SCHEMA_VERSION,
                      "config": _jsonable(self.config), "status": self.status}
            f.write(json.dumps(header, sort_keys=True) + "\n")
            for s in self.samples:
                f.write(json.dumps({"type": "sample", **s}, sort_keys=True) + "\n")

    def write_summary(self, path):
        with open(path, "w") as f:
            json.dump(_jsonable({"schema_version": SCHEMA_VERSION,
                                 "status": self.status,
                                 "config_hash": config_hash(self.config),
                                 **self.summary}), f, sort_keys=True, indent=1)
            f.write("\n")

    @classmethod
    def read_jsonl(cls, path):
        samples = []
        config = {}
        status = "unknown"
        with open(path) as f:
            for line in f:
                row = json.loads(line)
                kind = row.pop("type", "sample")
                if kind == "header":
                    config = row.get("config", {})
                    status = row.get("status", "unknown")
                else:
                    samples.append(row)
        return cls(config=config, samples=samples, status=status)


def write_field_csv(path, theta_tilde, w, z):
    sigma = 0.5 * (np.asarray(w) - np.asarray(z))
    v = 0.5 * (np.asarray(w) + np.asarray(z))
    with open(path, "w", newline="") as f:
        out = csv.writer(f)
        out.writerow(["theta_tilde", "w", "z", "sigma", "v"])
        for row in zip(theta_tilde, w, z, sigma, v):
            out.writerow([f"{x:.17g}" for x in row])


def write_selfsim_csv(path, field_obj, wbar):
    with open(path, "w", newline="") as f:
        out = csv.writer(f)
        out.writerow(["s", "y", "W", "Z", "Wbar", "W_minus_Wbar"])
        for y, W, Z, wb in zip(field_obj.y, field_obj.W, field_obj.Z, wbar):
            out.writerow([f"{x:.17g}" for x in (field_obj.s, y, W, Z, wb, W - wb)])
