"""Experiment configuration: a nested, JSON-serializable document with
schema validation and dumpable defaults, wrapping the solver, modulation,
diagnostics, and sweep blocks.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from .equivariant import ConfigError, SolverConfig


@dataclass
class ModulationConfig:
    tracker: str = "extremal"      # "extremal" | "ode"
    validate_every: int = 1        # ODE-monitor cadence, in samples

    def __post_init__(self):
        if self.tracker not in ("extremal", "ode"):
            raise ConfigError(f"unknown tracker {self.tracker!r}")
        if self.validate_every < 1:
            raise ConfigError("validate_every must be >= 1")


@dataclass
class DiagnosticsConfig:
    holder_cap: float = 2.5        # frozen C^{1/3} seminorm bound
    rate_tol: float = 0.05
    clip_frac: float = 0.02


@dataclass
class SweepConfig:
    gamma: list = field(default_factory=list)
    tau0: list = field(default_factory=list)
    n_cells: list = field(default_factory=list)
    xi0: list = field(default_factory=list)

    def axes(self):
        return {k: v for k, v in asdict(self).items() if v}

    def size(self):
        n = 1
        for v in self.axes().values():
            n *= len(v)
        return n


@dataclass
class ExperimentConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    modulation: ModulationConfig = field(default_factory=ModulationConfig)
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    out_dir: str = "runs"
    seed: int = 0
    snapshots_csv: bool = False

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, doc):
        doc = dict(doc)
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")

        def build(klass, block, name):
            block = dict(block or {})
            valid = {f.name for f in fields(klass)}
            bad = set(block) - valid
            if bad:
                raise ConfigError(f"unknown keys in {name!r} block: {sorted(bad)}")
            if "ext_grad_deltas" in block and block["ext_grad_deltas"] is not None:
                block["ext_grad_deltas"] = tuple(block["ext_grad_deltas"])
            return klass(**block)

        return cls(solver=build(SolverConfig, doc.get("solver"), "solver"),
                   modulation=build(ModulationConfig, doc.get("modulation"), "modulation"),
                   diagnostics=build(DiagnosticsConfig, doc.get("diagnostics"), "diagnostics"),
                   sweep=build(SweepConfig, doc.get("sweep"), "sweep"),
                   out_dir=doc.get("out_dir", "runs"),
                   seed=int(doc.get("seed", 0)),
                   snapshots_csv=bool(doc.get("snapshots_csv", False)))

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def dump(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, sort_keys=True, indent=1)
            f.write("\n")


def print_defaults():
    return json.dumps(ExperimentConfig().to_dict(), sort_keys=True, indent=1)
