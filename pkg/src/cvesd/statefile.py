"""JSON state files.

Two layouts are accepted::

    {"variances": {"p_minus": 0.5, "p_plus": 2.1, "q_plus": 1.7, "q_minus": 2.05}}
    {"matrix": [[...], [...], [...], [...]]}

Matrices are row-major in the ``(p1, q1, p2, q2)`` ordering. An optional
``"label"`` names the state; any other keys (e.g. the reports written by
``cvesd estimate``) are ignored on reading.
"""

import json
from pathlib import Path

from .cv_core import TwinBeamVariances, covariance_matrix

_VARIANCE_KEYS = ("p_minus", "p_plus", "q_plus", "q_minus")


class StateFileError(ValueError):
    pass


def parse_state(doc, source="<state>"):
    """Return ``(state, label)``; ``state`` is TwinBeamVariances or a 4x4 array."""
    if not isinstance(doc, dict):
        raise StateFileError(f"{source}: top level must be an object")
    label = str(doc.get("label", ""))
    if ("variances" in doc) == ("matrix" in doc):
        raise StateFileError(f"{source}: exactly one of 'variances' or 'matrix' is required")
    if "variances" in doc:
        var = doc["variances"]
        missing = [k for k in _VARIANCE_KEYS if k not in var]
        if missing:
            raise StateFileError(f"{source}: missing variances {', '.join(missing)}")
        try:
            return TwinBeamVariances(*(float(var[k]) for k in _VARIANCE_KEYS)), label
        except (TypeError, ValueError) as exc:
            raise StateFileError(f"{source}: {exc}") from None
    try:
        return covariance_matrix(doc["matrix"]), label
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"{source}: {exc}") from None


def load_state(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise StateFileError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}: invalid JSON ({exc.msg})") from None
    state, label = parse_state(doc, str(path))
    return state, label or path.stem


def state_document(state, label=""):
    if isinstance(state, TwinBeamVariances):
        doc = {"variances": dict(zip(_VARIANCE_KEYS, state.as_tuple()))}
    else:
        doc = {"matrix": [[float(x) for x in row] for row in state]}
    if label:
        doc["label"] = label
    return doc
