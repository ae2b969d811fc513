"""Minimal vectorized reverse-mode autodiff over numpy arrays.

Covers exactly what differentiating Monte Carlo energy objectives through a
network forward pass (value and input-tangent channels) requires: elementwise
arithmetic with broadcasting, scalar powers, absolute value, fused affine
maps, row replication, reshapes and reductions.  Graphs are one-shot: build,
call :func:`backward` once, read ``grad`` off the leaves.

Every helper at the bottom (``linear``, ``act_apply``, ...) dispatches on its
arguments, so the same forward code runs on plain ndarrays (no graph, no
overhead) and on :class:`Var` nodes (graph recorded).
"""

from __future__ import annotations

import numpy as np


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum ``g`` down to ``shape`` (the adjoint of numpy broadcasting)."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def _const(x) -> np.ndarray:
    return np.asarray(x.value if isinstance(x, Var) else x, dtype=np.float64)


class Var:
    """Graph node wrapping a float64 ndarray (or scalar)."""

    __slots__ = ("value", "grad", "_parents", "_backward")

    def __init__(self, value, parents=(), backward=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self._parents = parents
        self._backward = backward

    @property
    def shape(self):
        return self.value.shape

    def _accum(self, g):
        g = _unbroadcast(np.asarray(g, dtype=np.float64), self.value.shape)
        if self.grad is None:
            self.grad = g.copy()
        else:
            self.grad += g

    # -- elementwise arithmetic ------------------------------------------

    def __add__(self, other):
        if isinstance(other, Var):
            out = Var(self.value + other.value, (self, other))

            def back(g, a=self, b=other):
                a._accum(g)
                b._accum(g)
        else:
            out = Var(self.value + _const(other), (self,))

            def back(g, a=self):
                a._accum(g)
        out._backward = back
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Var(-self.value, (self,))

        def back(g, a=self):
            a._accum(-g)

        out._backward = back
        return out

    def __sub__(self, other):
        return self + (-other) if isinstance(other, Var) else self + (-_const(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Var):
            out = Var(self.value * other.value, (self, other))

            def back(g, a=self, b=other):
                a._accum(g * b.value)
                b._accum(g * a.value)
        else:
            c = _const(other)
            out = Var(self.value * c, (self,))

            def back(g, a=self, c=c):
                a._accum(g * c)
        out._backward = back
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Var):
            out = Var(self.value / other.value, (self, other))

            def back(g, a=self, b=other):
                a._accum(g / b.value)
                b._accum(-g * a.value / (b.value * b.value))
        else:
            c = _const(other)
            out = Var(self.value / c, (self,))

            def back(g, a=self, c=c):
                a._accum(g / c)
        out._backward = back
        return out

    def __rtruediv__(self, other):
        c = _const(other)
        out = Var(c / self.value, (self,))

        def back(g, a=self, c=c):
            a._accum(-g * c / (a.value * a.value))

        out._backward = back
        return out

    def __pow__(self, exponent):
        q = float(exponent)
        x = self.value
        out = Var(x ** q, (self,))

        def back(g, a=self, x=x, q=q):
            with np.errstate(divide="ignore", invalid="ignore"):
                d = q * x ** (q - 1.0)
            d = np.asarray(d)
            if not np.all(np.isfinite(d)):
                # subgradient convention: 0 at degenerate bases (|.|^q kinks)
                d = np.where(np.isfinite(d), d, 0.0)
            a._accum(g * d)

        out._backward = back
        return out

    def __abs__(self):
        out = Var(np.abs(self.value), (self,))

        def back(g, a=self):
            a._accum(g * np.sign(a.value))

        out._backward = back
        return out

    # -- reductions and shape ops ----------------------------------------

    def sum(self, axis=None):
        out = Var(self.value.sum(axis=axis), (self,))

        def back(g, a=self, axis=axis):
            g = np.asarray(g)
            if axis is not None:
                g = np.expand_dims(g, axis)
            a._accum(np.broadcast_to(g, a.value.shape))

        out._backward = back
        return out

    def mean(self, axis=None):
        n = self.value.size if axis is None else self.value.shape[axis]
        return self.sum(axis=axis) / float(n)

    def reshape(self, shape):
        out = Var(self.value.reshape(shape), (self,))

        def back(g, a=self):
            a._accum(np.asarray(g).reshape(a.value.shape))

        out._backward = back
        return out


def backward(root: Var):
    """Reverse pass from a scalar root; fills ``grad`` on every reachable Var."""
    topo, visited, stack = [], set(), [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            topo.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    root.grad = np.ones_like(root.value)
    for node in reversed(topo):
        if node._backward is not None:
            node._backward(node.grad)


# -- dispatching primitives (ndarray fast path / Var graph path) ----------


def is_var(x) -> bool:
    return isinstance(x, Var)


def linear(x, A, b=None):
    """Affine map x @ A.T (+ b) where A is (n_out, n_in); x may be batched."""
    if not (is_var(x) or is_var(A) or is_var(b)):
        y = x @ A.T
        return y if b is None else y + b

    x_val, A_val = _const(x), _const(A)
    y = x_val @ A_val.T
    if b is not None:
        y = y + _const(b)
    parents = tuple(p for p in (x, A, b) if is_var(p))
    out = Var(y, parents)

    def back(g, x=x, A=A, b=b, x_val=x_val, A_val=A_val):
        g = np.asarray(g)
        if is_var(x):
            x._accum(g @ A_val)
        if is_var(A):
            A._accum(np.einsum("...m,...k->mk", g, x_val))
        if b is not None and is_var(b):
            b._accum(g.reshape(-1, g.shape[-1]).sum(axis=0))

    out._backward = back
    return out


def act_apply(activation, x):
    """activation.f(x); backward uses activation.df."""
    if not is_var(x):
        return activation.f(x)
    pre = x.value
    out = Var(activation.f(pre), (x,))

    def back(g, x=x, pre=pre, activation=activation):
        x._accum(g * activation.df(pre))

    out._backward = back
    return out


def act_prime(activation, x):
    """activation.df(x) as a graph op; backward uses activation.d2f."""
    if not is_var(x):
        return activation.df(x)
    pre = x.value
    out = Var(activation.df(pre), (x,))

    def back(g, x=x, pre=pre, activation=activation):
        x._accum(g * activation.d2f(pre))

    out._backward = back
    return out


def repeat_rows(x, r: int):
    """Repeat each row r times along axis 0."""
    if not is_var(x):
        return np.repeat(x, r, axis=0)
    out = Var(np.repeat(x.value, r, axis=0), (x,))

    def back(g, x=x, r=r):
        g = np.asarray(g)
        x._accum(g.reshape(x.value.shape[0], r, *x.value.shape[1:]).sum(axis=1))

    out._backward = back
    return out


def reshape(x, shape):
    if not is_var(x):
        return np.asarray(x).reshape(shape)
    return x.reshape(shape)


def value_of(x) -> np.ndarray:
    return x.value if is_var(x) else np.asarray(x, dtype=np.float64)
