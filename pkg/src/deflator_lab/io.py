"""JSON model files with exact rationals written as "p/q" strings."""
from dataclasses import dataclass, field
from fractions import Fraction
import json

import numpy as np

from .errors import BadMeasure, DeflatorLabError
from .space import INF, build_space, frac, rtime


class ModelFormatError(DeflatorLabError):
    """Malformed model JSON."""


@dataclass
class Model:
    space: object
    times: dict = field(default_factory=dict)
    processes: dict = field(default_factory=dict)

    @property
    def tau(self):
        return self.times["tau"]


def fmt(x):
    return str(Fraction(x))


def time_to_json(R):
    return ["inf" if r == INF else int(r) for r in R]


def proc_to_json(X):
    return [[fmt(v) for v in row] for row in X]


def model_to_dict(space, tau=None, times=None, processes=None):
    times = dict(times or {})
    if tau is not None:
        times["tau"] = tau
    return {
        "outcomes": [str(o) for o in space.outcomes],
        "probs": [fmt(p) for p in space.prob],
        "horizon": space.T,
        "filtration": [[list(b) for b in part] for part in space.partitions],
        "times": {k: time_to_json(v) for k, v in times.items()},
        "processes": {k: proc_to_json(v) for k, v in (processes or {}).items()},
    }


def model_from_dict(data):
    try:
        probs = [frac(p) for p in data["probs"]]
        space = build_space(data["outcomes"], probs, int(data["horizon"]), data["filtration"])
        times = {k: rtime(v) for k, v in data.get("times", {}).items()}
        procs = {k: np.array([[frac(x) for x in row] for row in v], dtype=object)
                 for k, v in data.get("processes", {}).items()}
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ModelFormatError(f"malformed model: {exc}") from exc
    for name, R in times.items():
        if len(R) != space.n:
            raise ModelFormatError(f"time {name!r} has the wrong length")
    for name, X in procs.items():
        if X.shape != space.shape():
            raise ModelFormatError(f"process {name!r} has shape {X.shape}, expected {space.shape()}")
    return Model(space, times, procs)


def dumps_model(space, tau=None, times=None, processes=None):
    return json.dumps(model_to_dict(space, tau, times, processes), indent=1)


def load_model(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not JSON ({exc})") from exc
    return model_from_dict(data)


def certificate_to_dict(cert):
    out = {"feasible": cert.feasible, "slack": fmt(cert.slack)}
    for name in ("M", "z", "Phi"):
        value = getattr(cert, name)
        if value is not None:
            out[name] = proc_to_json(value)
    return out


__all__ = ["Model", "ModelFormatError", "BadMeasure", "model_to_dict", "model_from_dict",
           "dumps_model", "load_model", "certificate_to_dict", "proc_to_json", "time_to_json"]
