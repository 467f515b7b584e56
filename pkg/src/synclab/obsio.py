"""JSON form of an observation.

Each channel is a row-major list of ``[re, im]`` pairs of length n*n.  The
optional ``phases`` field carries the planted signal.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import numpy as np

from synclab import __version__
from synclab.errors import UsageError
from synclab.model import ModelParams, MultiFreqObservation, PhaseSignal

OBSERVATION_SCHEMA = {
    "type": "object",
    "required": ["n", "L", "lambda", "seed", "provenance", "tool_version", "channels"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "L": {"type": "integer", "minimum": 1},
        "lambda": {"type": "number", "minimum": 0},
        "seed": {"type": "integer"},
        "provenance": {"enum": ["planted", "null"]},
        "tool_version": {"type": "string"},
        "channels": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            },
        },
        "phases": {"type": "array", "items": {"type": "number"}},
    },
}


def observation_to_dict(obs: MultiFreqObservation, x: PhaseSignal | None = None) -> dict:
    p = obs.params
    out = {
        "n": p.n,
        "L": p.L,
        "lambda": p.lam,
        "seed": p.seed,
        "provenance": obs.provenance,
        "tool_version": __version__,
        "channels": [np.stack([ch.real.ravel(), ch.imag.ravel()], axis=1).tolist() for ch in obs.channels],
    }
    if x is not None:
        out["phases"] = x.phases.tolist()
    return out


def write_observation(path: str | Path, obs: MultiFreqObservation, x: PhaseSignal | None = None) -> None:
    Path(path).write_text(json.dumps(observation_to_dict(obs, x)) + "\n")


def read_observation(path: str | Path) -> tuple[MultiFreqObservation, PhaseSignal | None]:
    try:
        data = json.loads(Path(path).read_text())
        jsonschema.validate(data, OBSERVATION_SCHEMA)
    except (OSError, json.JSONDecodeError, jsonschema.ValidationError) as exc:
        raise UsageError(f"cannot read observation {path}: {exc}") from None
    n = data["n"]
    channels = []
    for ch in data["channels"]:
        arr = np.asarray(ch, dtype=float)
        if arr.shape != (n * n, 2):
            raise UsageError(f"channel has {arr.shape[0]} entries, expected {n * n}")
        channels.append((arr[:, 0] + 1j * arr[:, 1]).reshape(n, n))
    params = ModelParams(n, data["L"], data["lambda"], data["seed"])
    x = PhaseSignal(data["phases"]) if "phases" in data else None
    return MultiFreqObservation(channels, params, data["provenance"]), x
