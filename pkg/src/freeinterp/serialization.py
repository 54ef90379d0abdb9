"""JSON and CSV formats for sequences, certificates and maximal profiles.

Floats are written with Python's shortest round-trip repr, which is
deterministic and re-parses to the identical double.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .potential import MaximalProfile
from .sequences import Sequence


class ParseError(ValueError):
    """Malformed input file."""


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=False) + "\n"


def sequence_to_dict(seq: Sequence) -> dict:
    return {
        "label": seq.label,
        "points": [{"r": float(1.0 - g), "theta": float(t), "gap": float(g)} for g, t in zip(seq.gap, seq.theta)],
        "generator_params": dict(seq.generator_params),
    }


def sequence_from_dict(d) -> Sequence:
    try:
        pts = d["points"]
        gaps = [float(p["gap"]) if "gap" in p else 1.0 - float(p["r"]) for p in pts]
        thetas = [float(p["theta"]) for p in pts]
        return Sequence(np.array(gaps), np.array(thetas), str(d.get("label", "")), dict(d.get("generator_params", {})))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed sequence JSON: {exc!r}") from exc


def dump_sequence(seq: Sequence) -> str:
    return dumps(sequence_to_dict(seq))


def load_sequence(path) -> Sequence:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return sequence_from_dict(data)


def profile_csv(profile: MaximalProfile) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta", "M"])
    for t, m in profile.rows():
        w.writerow([repr(float(t)), repr(float(m))])
    return buf.getvalue()


def read_profile_csv(text: str) -> MaximalProfile:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["theta", "M"]:
        raise ParseError("profile CSV must start with header theta,M")
    data = np.array([[float(a), float(b)] for a, b in rows[1:]]).reshape(-1, 2)
    return MaximalProfile(data[:, 0], data[:, 1], float("nan"))
