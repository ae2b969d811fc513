"""Fully connected scalar-output ansatz networks over a flat parameter vector.

A network is an architecture (input dimension, hidden widths, activation)
together with a single float64 vector holding every weight matrix (row-major)
followed by its bias vector, layer by layer.  Networks are treated as
immutable values; training produces fresh parameter vectors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import ConfigurationError, NumericError, ParseError, ValidationError


class Activation:
    """Scalar activation with vectorized value, first and second derivative."""

    def __init__(self, name, f, df, d2f):
        self.name = name
        self.f = f
        self.df = df
        self.d2f = d2f

    def __repr__(self):
        return f"Activation({self.name!r})"


def _relu(x):
    return np.maximum(x, 0.0)


def _relu_d(x):
    # derivative at the kink is taken to be 0
    return (x > 0.0).astype(np.float64)


def _relu_d2(x):
    return np.zeros_like(x)


def _tanh_d(x):
    t = np.tanh(x)
    return 1.0 - t * t


def _tanh_d2(x):
    t = np.tanh(x)
    return -2.0 * t * (1.0 - t * t)


_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _norm_cdf(x):
    return 0.5 * (1.0 + erf(x / _SQRT2))


def _norm_pdf(x):
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def _gelu(x):
    # exact x * Phi(x), not the tanh approximation
    return x * _norm_cdf(x)


def _gelu_d(x):
    return _norm_cdf(x) + x * _norm_pdf(x)


def _gelu_d2(x):
    return _norm_pdf(x) * (2.0 - x * x)


ACTIVATIONS = {
    "relu": Activation("relu", _relu, _relu_d, _relu_d2),
    "tanh": Activation("tanh", np.tanh, _tanh_d, _tanh_d2),
    "gelu": Activation("gelu", _gelu, _gelu_d, _gelu_d2),
}


@dataclass(frozen=True)
class Architecture:
    """Shape of a fully connected scalar-output network.

    ``hidden_widths`` may be empty, in which case the network is a single
    affine map.  The output dimension is always 1.
    """

    input_dim: int
    hidden_widths: tuple
    activation: str = "relu"

    def __post_init__(self):
        object.__setattr__(self, "hidden_widths", tuple(int(w) for w in self.hidden_widths))
        if self.input_dim < 1:
            raise ConfigurationError(f"input_dim must be positive, got {self.input_dim}")
        if any(w < 1 for w in self.hidden_widths):
            raise ConfigurationError(f"hidden widths must be positive, got {self.hidden_widths}")
        if self.activation not in ACTIVATIONS:
            raise ConfigurationError(
                f"unknown activation {self.activation!r}; choose from {sorted(ACTIVATIONS)}"
            )

    @property
    def layer_widths(self) -> tuple:
        """Widths (N_0, ..., N_L) including input and the scalar output."""
        return (self.input_dim, *self.hidden_widths, 1)

    @property
    def depth(self) -> int:
        """Number of affine maps."""
        return len(self.hidden_widths) + 1


def param_count(arch: Architecture) -> int:
    """Total number of trainable parameters: sum of N_{l-1}*N_l + N_l."""
    widths = arch.layer_widths
    return sum(widths[l - 1] * widths[l] + widths[l] for l in range(1, len(widths)))


@dataclass(frozen=True)
class Network:
    """An architecture plus its flat parameter vector."""

    arch: Architecture
    params: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.params, dtype=np.float64)
        object.__setattr__(self, "params", p)
        expected = param_count(self.arch)
        if p.ndim != 1 or p.size != expected:
            raise ValidationError(
                f"parameter vector has {p.size} entries, architecture needs {expected}"
            )

    def with_params(self, params: np.ndarray) -> "Network":
        return Network(self.arch, params)


def layer_slices(arch: Architecture):
    """Offsets of each (weight matrix, bias) pair inside the flat vector."""
    widths = arch.layer_widths
    out, offset = [], 0
    for l in range(1, len(widths)):
        n_in, n_out = widths[l - 1], widths[l]
        w_sl = slice(offset, offset + n_in * n_out)
        offset += n_in * n_out
        b_sl = slice(offset, offset + n_out)
        offset += n_out
        out.append((w_sl, b_sl, n_out, n_in))
    return out


def layer_arrays(net: Network):
    """Views (A_l, b_l) into the flat vector; A_l has shape (N_l, N_{l-1})."""
    out = []
    for w_sl, b_sl, n_out, n_in in layer_slices(net.arch):
        A = net.params[w_sl].reshape(n_out, n_in)
        b = net.params[b_sl]
        out.append((A, b))
    return out


def flatten_layers(arch: Architecture, layers) -> np.ndarray:
    """Inverse of :func:`layer_arrays` for a list of (A, b) arrays."""
    parts = []
    for A, b in layers:
        parts.append(np.asarray(A, dtype=np.float64).ravel())
        parts.append(np.asarray(b, dtype=np.float64).ravel())
    flat = np.concatenate(parts)
    if flat.size != param_count(arch):
        raise ValidationError("layer shapes do not match the architecture")
    return flat


def init(arch: Architecture, seed: int) -> Network:
    """Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases."""
    rng = np.random.default_rng(seed)
    widths = arch.layer_widths
    layers = []
    for l in range(1, len(widths)):
        n_in, n_out = widths[l - 1], widths[l]
        bound = math.sqrt(6.0 / (n_in + n_out))
        A = rng.uniform(-bound, bound, size=(n_out, n_in))
        b = np.zeros(n_out)
        layers.append((A, b))
    return Network(arch, flatten_layers(arch, layers))


def evaluate(net: Network, points: np.ndarray) -> np.ndarray:
    """Plain forward pass: u_theta at each row of ``points``; returns (N,)."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.arch.input_dim:
        raise ConfigurationError(
            f"points have shape {x.shape}, expected (N, {net.arch.input_dim})"
        )
    act = ACTIVATIONS[net.arch.activation]
    layers = layer_arrays(net)
    z = x
    for l, (A, b) in enumerate(layers):
        z = z @ A.T + b
        if l < len(layers) - 1:
            z = act.f(z)
    return z[:, 0]


def concat_average(u: Network, v: Network) -> Network:
    """Network computing (u + v) / 2 by width-doubling concatenation.

    Both inputs must share the architecture; the result doubles every hidden
    width and halves the output weights.
    """
    if u.arch != v.arch:
        raise ConfigurationError("concat_average requires identical architectures")
    if not u.arch.hidden_widths:
        # single affine map: average the parameters directly
        return Network(u.arch, 0.5 * (u.params + v.params))
    lu, lv = layer_arrays(u), layer_arrays(v)
    layers = []
    n_layers = len(lu)
    for l in range(n_layers):
        Au, bu = lu[l]
        Av, bv = lv[l]
        if l == 0:
            A = np.vstack([Au, Av])
            b = np.concatenate([bu, bv])
        elif l < n_layers - 1:
            A = np.block([
                [Au, np.zeros((Au.shape[0], Av.shape[1]))],
                [np.zeros((Av.shape[0], Au.shape[1])), Av],
            ])
            b = np.concatenate([bu, bv])
        else:
            A = np.hstack([0.5 * Au, 0.5 * Av])
            b = 0.5 * (bu + bv)
        layers.append((A, b))
    arch = Architecture(
        u.arch.input_dim,
        tuple(2 * w for w in u.arch.hidden_widths),
        u.arch.activation,
    )
    return Network(arch, flatten_layers(arch, layers))


@dataclass(frozen=True)
class AnsatzSchedule:
    """Width sequence for a nested family sweep.

    ``depth`` counts affine maps.  When ``depth`` is None the zero-boundary
    ReLU family rule ceil(log2(d+1)) + 1 is applied at architecture build
    time (so d=1 and d=2 both give one and two hidden layers respectively).
    """

    widths: tuple
    depth: int = None

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        if not self.widths or any(w < 1 for w in self.widths):
            raise ConfigurationError("widths must be a nonempty list of positive integers")
        if any(b <= a for a, b in zip(self.widths, self.widths[1:])):
            raise ConfigurationError(f"widths must be strictly increasing, got {self.widths}")
        if self.depth is not None and self.depth < 1:
            raise ConfigurationError("depth must be a positive number of affine maps")

    def architecture(self, width: int, input_dim: int, activation: str) -> Architecture:
        depth = self.depth
        if depth is None:
            depth = math.ceil(math.log2(input_dim + 1)) + 1
        return Architecture(input_dim, (width,) * (depth - 1), activation)


def serialize(net: Network) -> bytes:
    """JSON document with full float round-trip precision."""
    doc = {
        "input_dim": net.arch.input_dim,
        "hidden_widths": list(net.arch.hidden_widths),
        "activation": net.arch.activation,
        "params": [float(p) for p in net.params],
    }
    return json.dumps(doc).encode("utf-8")


def deserialize(data) -> Network:
    """Inverse of :func:`serialize`; bit-exact round trip."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed network document at pos {exc.pos}: {exc.msg}") from exc
    for key in ("input_dim", "hidden_widths", "activation", "params"):
        if key not in doc:
            raise ParseError(f"network document missing field {key!r}")
    arch = Architecture(int(doc["input_dim"]), tuple(doc["hidden_widths"]), doc["activation"])
    params = np.asarray(doc["params"], dtype=np.float64)
    if params.size != param_count(arch):
        raise ValidationError(
            f"params length {params.size} does not match architecture "
            f"(expected {param_count(arch)})"
        )
    return Network(arch, params)


def require_finite_params(net: Network):
    if not np.all(np.isfinite(net.params)):
        raise NumericError("network parameters contain NaN/Inf", stage="parameters")
