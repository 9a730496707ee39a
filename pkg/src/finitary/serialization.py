"""JSON encoding of machines, protocols and word distributions.

Output is canonical: keys sorted, floats written with 17 significant digits and
negative zero folded to zero, so a file re-parses and re-emits byte for byte.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import matcore
from .exceptions import MachineError
from .proclang import WordDistribution
from .protocols import MeasurementProtocol
from .quantum import KINDS as QUANTUM_KINDS
from .quantum import QuantumMachine
from .stochastic import KINDS as STOCHASTIC_KINDS
from .stochastic import StochasticMachine


class ParseError(ValueError):
    """Input that is not well-formed JSON or lacks required fields."""


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot encode non-finite number {x}")
    text = format(0.0 if x == 0 else x, ".17g")
    return text if any(c in text for c in ".e") else text + ".0"


def _is_number(v) -> bool:
    return isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)


def _encode(obj, indent: str) -> str:
    inner = indent + "  "
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if hasattr(obj, "item"):
        return _encode(obj.item(), indent)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sorted((str(k), v) for k, v in obj.items())
        body = ",\n".join(f"{inner}{json.dumps(k)}: {_encode(v, inner)}" for k, v in items)
        return "{\n" + body + "\n" + indent + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # numbers, [re, im] pairs and matrix rows stay on one line
        if all(_is_number(v) or (isinstance(v, (list, tuple)) and all(map(_is_number, v))) for v in obj):
            return "[" + ", ".join(_encode(v, inner) for v in obj) + "]"
        body = ",\n".join(inner + _encode(v, inner) for v in obj)
        return "[\n" + body + "\n" + indent + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical JSON text with a trailing newline."""
    return _encode(obj, "") + "\n"


# -- machines ------------------------------------------------------------------------


def _matrix_key(m: StochasticMachine, y: str, x: str) -> str:
    if m.kind == "SG":
        return y
    if m.kind == "SR":
        return x
    return f"{y}|{x}"


def machine_to_dict(m: StochasticMachine | QuantumMachine) -> dict:
    out = {"kind": m.kind, "states": list(m.states), "inputs": list(m.inputs), "outputs": list(m.outputs)}
    if m.name:
        out["name"] = m.name
    if isinstance(m, StochasticMachine):
        out["matrices"] = {_matrix_key(m, y, x): matcore.encode_matrix(T) for (y, x), T in m.matrices.items()}
        out["initial"] = matcore.encode_vector(m.initial)
    else:
        out["unitaries"] = {x: matcore.encode_matrix(U) for x, U in m.unitaries.items()}
        out["projectors"] = {y: list(idx) for y, idx in m.projectors.items()}
        out["start"] = matcore.encode_vector(m.start)
    return out


def _field(data: dict, key: str):
    try:
        return data[key]
    except KeyError:
        raise ParseError(f"missing field {key!r}") from None


def machine_from_dict(data: dict) -> StochasticMachine | QuantumMachine:
    """Build and validate a machine; structural problems raise ``MachineError``."""
    if not isinstance(data, dict):
        raise ParseError("machine file must hold a JSON object")
    kind = _field(data, "kind")
    states, inputs, outputs = (_field(data, k) for k in ("states", "inputs", "outputs"))
    name = data.get("name", "")
    try:
        if kind in STOCHASTIC_KINDS:
            mats = {}
            for key, rows in _field(data, "matrices").items():
                if kind == "SG":
                    y, x = key, inputs[0]
                elif kind == "SR":
                    y, x = outputs[0], key
                else:
                    y, sep, x = key.partition("|")
                    if not sep:
                        raise ParseError(f"transducer matrix key {key!r} is not of the form y|x")
                mats[(y, x)] = matcore.as_matrix(rows)
            return StochasticMachine(kind, states, inputs, outputs, mats, matcore.as_vector(_field(data, "initial")), name)
        if kind in QUANTUM_KINDS:
            unitaries = {x: matcore.as_matrix(rows) for x, rows in _field(data, "unitaries").items()}
            projectors = {y: tuple(idx) for y, idx in _field(data, "projectors").items()}
            start = matcore.as_vector(_field(data, "start"))
            return QuantumMachine(kind, states, inputs, outputs, unitaries, projectors, start, name)
    except (TypeError, AttributeError, IndexError) as exc:
        raise ParseError(f"malformed machine: {exc}") from None
    raise ParseError(f"unknown machine kind {kind!r}")


# -- files ---------------------------------------------------------------------------


def read_json(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None


def load_machine(path: str | Path) -> StochasticMachine | QuantumMachine:
    return machine_from_dict(read_json(path))


def load_protocol(path: str | Path) -> MeasurementProtocol:
    data = read_json(path)
    try:
        return MeasurementProtocol.from_dict(data)
    except MachineError as exc:
        raise ParseError(str(exc)) from None


def load_distribution(path: str | Path) -> WordDistribution:
    data = read_json(path)
    if not isinstance(data, dict):
        raise ParseError("distribution file must hold a JSON object")
    try:
        return WordDistribution.from_dict(data)
    except MachineError as exc:
        raise ParseError(str(exc)) from None


def load_distributions(path: str | Path) -> list[WordDistribution]:
    """A single distribution object or a list of them."""
    data = read_json(path)
    items = data if isinstance(data, list) else [data]
    try:
        return [WordDistribution.from_dict(d) for d in items]
    except (MachineError, AttributeError) as exc:
        raise ParseError(f"malformed distribution: {exc}") from None
