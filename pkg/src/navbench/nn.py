"""Dense ReLU networks with exact backprop, Adam, and soft target updates.

Plain float64 numpy throughout: nets are parameter containers, so copies,
checkpoints, and gradient checks stay trivial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

Grads = tuple[list[np.ndarray], list[np.ndarray]]  # (per-layer dW, per-layer db)


@dataclass
class Mlp:
    """Feed-forward net: ReLU hidden layers, tanh or identity output.

    weights[i] has shape (layer_sizes[i+1], layer_sizes[i]) acting as
    y = W x + b; biases[i] matches the output dimension.
    """
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    output_activation: str = "identity"


class ForwardCache(NamedTuple):
    activations: list[np.ndarray]      # per-layer inputs, then the output
    pre_activations: list[np.ndarray]  # per-layer affine results
    single: bool


def init_mlp(layer_sizes: tuple[int, ...], output_activation: str,
             rng: np.random.Generator) -> Mlp:
    """Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) init from the given generator."""
    if output_activation not in ("identity", "tanh"):
        raise ValueError(f"unknown output activation {output_activation!r}")
    if len(layer_sizes) < 2 or any(n < 1 for n in layer_sizes):
        raise ValueError("layer_sizes needs at least input and output dims >= 1")
    weights = []
    biases = []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = 1.0 / math.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return Mlp(tuple(int(n) for n in layer_sizes), weights, biases, output_activation)


def clone_mlp(net: Mlp) -> Mlp:
    return Mlp(net.layer_sizes, [w.copy() for w in net.weights],
               [b.copy() for b in net.biases], net.output_activation)


def forward(net: Mlp, x) -> tuple[np.ndarray, ForwardCache]:
    """Run the net on a vector or a (batch, dim) matrix.

    Returns the output plus a cache for backward().
    """
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    a = arr[np.newaxis, :] if single else arr
    if a.ndim != 2 or a.shape[1] != net.layer_sizes[0]:
        raise ValueError(f"input shape {arr.shape} incompatible with layers {net.layer_sizes}")
    activations = [a]
    pre_activations = []
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = activations[-1] @ w.T + b
        pre_activations.append(z)
        if i < last:
            a_out = np.maximum(z, 0.0)
        elif net.output_activation == "tanh":
            a_out = np.tanh(z)
        else:
            a_out = z
        activations.append(a_out)
    out = activations[-1][0] if single else activations[-1]
    return out, ForwardCache(activations, pre_activations, single)


def backward(net: Mlp, cache: ForwardCache, output_grad) -> tuple[Grads, np.ndarray]:
    """Exact reverse-mode gradients for the forward pass that built ``cache``.

    output_grad is dLoss/dOutput with the output's shape; returns
    ((grad_w, grad_b), input_grad), where input_grad enables chaining a
    policy update through a value network.
    """
    g = np.asarray(output_grad, dtype=float)
    if cache.single:
        g = g[np.newaxis, :]
    if g.shape != cache.activations[-1].shape:
        raise ValueError(f"output_grad shape {np.shape(output_grad)} does not match output")
    n_layers = len(net.weights)
    grad_w: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    grad_b: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    for i in range(n_layers - 1, -1, -1):
        if i == n_layers - 1:
            if net.output_activation == "tanh":
                g = g * (1.0 - cache.activations[-1] ** 2)
        else:
            g = g * (cache.pre_activations[i] > 0.0)
        grad_w[i] = g.T @ cache.activations[i]
        grad_b[i] = g.sum(axis=0)
        g = g @ net.weights[i]
    input_grad = g[0] if cache.single else g
    return (grad_w, grad_b), input_grad


@dataclass
class AdamState:
    """First/second moment accumulators mirroring one Mlp's parameters."""
    lr: float
    beta1: float
    beta2: float
    eps: float
    step: int
    m_w: list[np.ndarray]
    v_w: list[np.ndarray]
    m_b: list[np.ndarray]
    v_b: list[np.ndarray]


def adam_init(net: Mlp, lr: float, beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8) -> AdamState:
    return AdamState(
        lr, beta1, beta2, eps, 0,
        [np.zeros_like(w) for w in net.weights],
        [np.zeros_like(w) for w in net.weights],
        [np.zeros_like(b) for b in net.biases],
        [np.zeros_like(b) for b in net.biases],
    )


def adam_step(net: Mlp, grads: Grads, state: AdamState) -> None:
    """Bias-corrected Adam update, in place on the net and the state."""
    grad_w, grad_b = grads
    if len(grad_w) != len(net.weights) or len(grad_b) != len(net.biases):
        raise ValueError("gradient layer count does not match the net")
    state.step += 1
    c1 = 1.0 - state.beta1 ** state.step
    c2 = 1.0 - state.beta2 ** state.step
    params = net.weights + net.biases
    gs = list(grad_w) + list(grad_b)
    ms = state.m_w + state.m_b
    vs = state.v_w + state.v_b
    for p, g, m, v in zip(params, gs, ms, vs):
        if g.shape != p.shape:
            raise ValueError("gradient shape does not match parameter shape")
        m[:] = state.beta1 * m + (1.0 - state.beta1) * g
        v[:] = state.beta2 * v + (1.0 - state.beta2) * (g * g)
        p -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)


def soft_update(target: Mlp, source: Mlp, tau: float) -> None:
    """target <- tau * source + (1 - tau) * target, elementwise in place."""
    if target.layer_sizes != source.layer_sizes:
        raise ValueError("target and source shapes differ")
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must be in [0, 1]")
    for tw, sw in zip(target.weights, source.weights):
        tw[:] = tau * sw + (1.0 - tau) * tw
    for tb, sb in zip(target.biases, source.biases):
        tb[:] = tau * sb + (1.0 - tau) * tb


def mlp_to_dict(net: Mlp) -> dict:
    """JSON-ready dict: layer sizes plus flat row-major parameter arrays."""
    return {
        "layer_sizes": list(net.layer_sizes),
        "output_activation": net.output_activation,
        "weights": [w.ravel().tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
    }


def mlp_from_dict(data: dict) -> Mlp:
    sizes = tuple(int(n) for n in data["layer_sizes"])
    weights = []
    biases = []
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        w = np.asarray(data["weights"][i], dtype=float)
        if w.size != fan_in * fan_out:
            raise ValueError("weight array size does not match layer_sizes")
        weights.append(w.reshape(fan_out, fan_in))
        b = np.asarray(data["biases"][i], dtype=float)
        if b.size != fan_out:
            raise ValueError("bias array size does not match layer_sizes")
        biases.append(b)
    return Mlp(sizes, weights, biases, data["output_activation"])
