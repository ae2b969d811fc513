"""Network outputs jointly with input-space gradients, and parameter gradients.

The forward pass propagates the value channel together with d tangent
directions (one per input coordinate), so ``grad_x u`` comes out of the same
sweep as ``u``.  Parameter gradients of any scalar objective built from these
two channels are obtained by a reverse pass over the joint computation, which
is what makes terms like d/dtheta of |grad_x u|^p work without assembling a
second-order graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tape
from .errors import ConfigurationError, NumericError
from .network import ACTIVATIONS, Network, layer_arrays, require_finite_params


@dataclass
class DualBatch:
    """u_theta and grad_x u_theta at N sample points.

    Fields are ndarrays on the plain path and tape Vars inside
    :class:`TapedNetwork`; ``input_grads`` is None when tangents were not
    requested.
    """

    values: object        # (N,)
    input_grads: object   # (N, d) or None


@dataclass
class ParamGradient:
    """d(objective)/d(theta) in the flat parameter layout."""

    grad: np.ndarray


def _check_points(net: Network, points) -> np.ndarray:
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.arch.input_dim:
        raise ConfigurationError(
            f"points have shape {x.shape}, expected (N, {net.arch.input_dim})"
        )
    return x


def _forward(arch, layers, x: np.ndarray, with_input_grads: bool) -> DualBatch:
    """Shared forward over (value, tangent) channels; layers may be Vars."""
    n, d = x.shape
    act = ACTIVATIONS[arch.activation]
    z = x
    t = np.tile(np.eye(d), (n, 1)) if with_input_grads else None  # (n*d, d)
    n_layers = len(layers)
    for l, (A, b) in enumerate(layers):
        z_pre = tape.linear(z, A, b)
        if with_input_grads:
            t_pre = tape.linear(t, A)
        if l < n_layers - 1:
            z = tape.act_apply(act, z_pre)
            if with_input_grads:
                t = tape.repeat_rows(tape.act_prime(act, z_pre), d) * t_pre
        else:
            z = z_pre
            if with_input_grads:
                t = t_pre
    values = tape.reshape(z, (n,))
    grads = tape.reshape(t, (n, d)) if with_input_grads else None
    return DualBatch(values, grads)


def forward_with_input_grad(net: Network, points) -> DualBatch:
    """u_theta and grad_x u_theta at each point (plain ndarrays)."""
    x = _check_points(net, points)
    require_finite_params(net)
    out = _forward(net.arch, layer_arrays(net), x, with_input_grads=True)
    if not (np.all(np.isfinite(out.values)) and np.all(np.isfinite(out.input_grads))):
        raise NumericError("non-finite network output", stage="forward")
    return out


class TapedNetwork:
    """One-shot differentiable view of a network's parameters.

    Build, run :meth:`forward` on as many batches as needed, combine the
    resulting Vars into one scalar, then call :meth:`param_grad` exactly once.
    """

    def __init__(self, net: Network):
        require_finite_params(net)
        self.net = net
        self.leaves = [(tape.Var(A), tape.Var(b)) for A, b in layer_arrays(net)]

    def forward(self, points, with_input_grads: bool = True) -> DualBatch:
        x = _check_points(self.net, points)
        return _forward(self.net.arch, self.leaves, x, with_input_grads)

    def param_grad(self, objective: tape.Var) -> np.ndarray:
        if not tape.is_var(objective):
            raise ConfigurationError("objective must be built from the taped forward pass")
        if objective.value.shape != ():
            raise ConfigurationError("objective must be scalar")
        if not np.isfinite(objective.value):
            raise NumericError("non-finite objective value", stage="objective")
        tape.backward(objective)
        parts = []
        for A, b in self.leaves:
            ga = A.grad if A.grad is not None else np.zeros_like(A.value)
            gb = b.grad if b.grad is not None else np.zeros_like(b.value)
            parts.append(ga.ravel())
            parts.append(gb.ravel())
        flat = np.concatenate(parts)
        if not np.all(np.isfinite(flat)):
            raise NumericError("non-finite parameter gradient", stage="parameter gradient")
        return flat


def objective_param_grad(net: Network, points, objective) -> ParamGradient:
    """Gradient w.r.t. theta of ``objective(dual_batch_at(points))``.

    ``objective`` receives a :class:`DualBatch` whose fields support the
    usual arithmetic (they are tape Vars) and must return a scalar.
    """
    taped = TapedNetwork(net)
    dual = taped.forward(points, with_input_grads=True)
    scalar = objective(dual)
    return ParamGradient(taped.param_grad(scalar))
