"""Model files, input vectors, timing traces and event lists.

Model files are JSON::

    {"t_in": 1.0, "lambda": 1.0, "epsilon": 0.1,
     "layers": [{"weights": [[...], ...], "bias": [...], "activation": "relu"}, ...]}

``weights`` is row-major ``[fan_in][fan_out]``. Floats are written with
Python's shortest round-trip repr, so load(save(model)) is bit-exact.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .network import Activation, DenseLayer, LayeredModel, TimingState
from .timing import EncodingConfig

__all__ = [
    "ModelFormatError",
    "model_to_dict",
    "model_from_dict",
    "dumps_model",
    "loads_model",
    "save_model",
    "load_model",
    "parse_shape",
    "generate_model",
    "parse_inputs",
    "load_inputs",
    "TRACE_HEADER",
    "write_trace",
    "parse_events",
    "format_vector",
]

TOP_KEYS = {"t_in", "lambda", "epsilon", "layers"}
LAYER_KEYS = {"weights", "bias", "activation"}
TRACE_HEADER = ("input_index", "layer_index", "neuron_index", "t_plus", "t_minus", "gain")


class ModelFormatError(ValueError):
    """A model, input or event file does not parse."""


def model_to_dict(model: LayeredModel) -> dict:
    return {
        "t_in": model.cfg.t_in,
        "lambda": model.cfg.lam,
        "epsilon": model.cfg.epsilon,
        "layers": [
            {
                "weights": layer.weights.tolist(),
                "bias": layer.biases.tolist(),
                "activation": layer.activation.value,
            }
            for layer in model.layers
        ],
    }


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelFormatError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ModelFormatError(f"{where}: non-finite value {value!r}")
    return float(value)


def _layer_from_dict(i: int, raw) -> DenseLayer:
    where = f"layers[{i}]"
    if not isinstance(raw, dict):
        raise ModelFormatError(f"{where}: expected an object")
    missing = LAYER_KEYS - raw.keys()
    extra = raw.keys() - LAYER_KEYS
    if missing or extra:
        raise ModelFormatError(
            f"{where}: missing keys {sorted(missing)}, unknown keys {sorted(extra)}")
    rows = raw["weights"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ModelFormatError(f"{where}.weights: expected a non-empty 2-D array")
    fan_out = len(rows[0])
    if fan_out == 0:
        raise ModelFormatError(f"{where}.weights: empty rows")
    weights = []
    for r, row in enumerate(rows):
        if len(row) != fan_out:
            raise ModelFormatError(
                f"{where}.weights[{r}]: row length {len(row)}, expected {fan_out}")
        weights.append([_number(v, f"{where}.weights[{r}][{c}]") for c, v in enumerate(row)])
    bias = raw["bias"]
    if not isinstance(bias, list) or len(bias) != fan_out:
        raise ModelFormatError(f"{where}.bias: expected {fan_out} numbers")
    bias = [_number(v, f"{where}.bias[{c}]") for c, v in enumerate(bias)]
    try:
        activation = Activation(raw["activation"])
    except ValueError:
        raise ModelFormatError(
            f"{where}.activation: expected 'relu' or 'none', got {raw['activation']!r}") from None
    return DenseLayer(np.array(weights), np.array(bias), activation)


def model_from_dict(doc) -> LayeredModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be an object")
    missing = TOP_KEYS - doc.keys()
    extra = doc.keys() - TOP_KEYS
    if missing or extra:
        raise ModelFormatError(f"missing keys {sorted(missing)}, unknown keys {sorted(extra)}")
    try:
        cfg = EncodingConfig(_number(doc["t_in"], "t_in"), _number(doc["lambda"], "lambda"),
                             _number(doc["epsilon"], "epsilon"))
    except ModelFormatError:
        raise
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None
    if not isinstance(doc["layers"], list) or not doc["layers"]:
        raise ModelFormatError("layers: expected a non-empty array")
    layers = [_layer_from_dict(i, raw) for i, raw in enumerate(doc["layers"])]
    for i, (a, b) in enumerate(zip(layers, layers[1:])):
        if a.fan_out != b.fan_in:
            raise ModelFormatError(
                f"layers[{i + 1}].weights: fan-in {b.fan_in} does not match "
                f"layers[{i}] fan-out {a.fan_out}")
    if layers[-1].activation is not Activation.NONE:
        raise ModelFormatError(f"layers[{len(layers) - 1}].activation: final layer must be 'none'")
    return LayeredModel(layers, cfg)


def dumps_model(model: LayeredModel) -> str:
    return json.dumps(model_to_dict(model), indent=1) + "\n"


def loads_model(text: str) -> LayeredModel:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc}") from None
    return model_from_dict(doc)


def _reject_constant(name):
    raise ModelFormatError(f"non-finite constant {name} not allowed")


def save_model(model: LayeredModel, path) -> None:
    Path(path).write_text(dumps_model(model))


def load_model(path) -> LayeredModel:
    return loads_model(Path(path).read_text())


def parse_shape(text: str) -> list[int]:
    """``"784-100-10"`` -> ``[784, 100, 10]``; at least two positive widths."""
    try:
        widths = [int(part) for part in text.split("-")]
    except ValueError:
        raise ValueError(f"bad shape {text!r}") from None
    if len(widths) < 2 or any(w <= 0 for w in widths):
        raise ValueError(f"shape needs at least two positive widths, got {text!r}")
    return widths


def generate_model(shape: list[int], seed: int, weight_mode: str = "analog",
                   cfg: EncodingConfig | None = None) -> LayeredModel:
    """Seeded random MLP: ReLU on hidden layers, identity on the last one.

    Analog weights are uniform in [-1, 1], binary weights are +-1, and biases
    are uniform in [-0.1, 0.1] in both modes.
    """
    if weight_mode not in ("analog", "binary"):
        raise ValueError(f"weight mode must be 'analog' or 'binary', got {weight_mode!r}")
    rng = np.random.default_rng(seed)
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(shape, shape[1:])):
        if weight_mode == "binary":
            w = rng.choice([-1.0, 1.0], size=(fan_in, fan_out))
        else:
            w = rng.uniform(-1.0, 1.0, size=(fan_in, fan_out))
        b = rng.uniform(-0.1, 0.1, size=fan_out)
        last = i == len(shape) - 2
        layers.append(DenseLayer(w, b, Activation.NONE if last else Activation.RELU))
    return LayeredModel(layers, cfg or EncodingConfig())


def _split(line: str) -> list[str]:
    return line.replace(",", " ").split()


def parse_inputs(text: str, width: int | None = None) -> list[np.ndarray]:
    """One vector per non-blank line, comma or whitespace separated, values in [0, 1]."""
    vectors = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            values = [float(v) for v in _split(line)]
        except ValueError:
            raise ModelFormatError(f"inputs line {lineno}: not a number list") from None
        for v in values:
            if not 0.0 <= v <= 1.0:
                raise ModelFormatError(f"inputs line {lineno}: value {v!r} outside [0, 1]")
        if width is not None and len(values) != width:
            raise ModelFormatError(
                f"inputs line {lineno}: {len(values)} values, model expects {width}")
        vectors.append(np.array(values))
    return vectors


def load_inputs(path, width: int | None = None) -> list[np.ndarray]:
    return parse_inputs(Path(path).read_text(), width)


def format_vector(values: Iterable[float]) -> str:
    return ",".join(repr(float(v)) for v in values)


def write_trace(fp: TextIO, traces: Iterable[tuple[int, list[TimingState]]],
                header: bool = True) -> int:
    """Write one CSV row per neuron per dense layer; returns the row count.

    ``traces`` yields ``(input_index, states)`` where ``states[0]`` is the
    input encoding (not written) and ``states[L]`` is the output of layer L.
    """
    writer = csv.writer(fp, lineterminator="\n")
    if header:
        writer.writerow(TRACE_HEADER)
    rows = 0
    for input_index, states in traces:
        for layer_index, state in enumerate(states[1:], 1):
            for k in range(len(state)):
                writer.writerow([input_index, layer_index, k, repr(float(state.t_plus[k])),
                                 repr(float(state.t_minus[k])), repr(float(state.gains[k]))])
                rows += 1
    return rows


def parse_events(text: str) -> list[tuple[float, float]]:
    """Rows of ``t_on, weight``; blank lines and ``#`` comments are skipped."""
    events = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = _split(line)
        try:
            t_on, weight = (float(p) for p in parts)
        except ValueError:
            raise ModelFormatError(f"events line {lineno}: expected 't_on, weight'") from None
        if not (math.isfinite(t_on) and math.isfinite(weight)) or weight <= 0:
            raise ModelFormatError(f"events line {lineno}: weight must be positive and finite")
        events.append((t_on, weight))
    return events
