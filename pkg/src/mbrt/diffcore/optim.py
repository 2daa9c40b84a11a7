"""First-order parameter update rules.

Three rules are provided: plain SGD (one step is exactly w - lr*g), SGD with
momentum, and an Adadelta-style adaptive rule (the small-dataset default,
learning rate 1.0).  Updates are functional: they return a new parameter
vector and a new state.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from mbrt.errors import InputError, NumericalError

RULES = ("sgd", "momentum", "adadelta")


@dataclass
class OptimState:
    rule: str = "adadelta"
    lr: float = 1.0
    momentum: float = 0.9
    rho: float = 0.95
    eps: float = 1e-6
    weight_decay: float = 0.0
    acc: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rule not in RULES:
            raise InputError(f"unknown optimizer rule {self.rule!r}; expected one of {RULES}")


def _get_acc(state: OptimState, name: str, like: np.ndarray) -> np.ndarray:
    arr = state.acc.get(name)
    if arr is None:
        arr = np.zeros_like(like)
    elif arr.shape != like.shape:
        raise InputError(f"accumulator {name} has shape {arr.shape}, expected {like.shape}")
    return arr


def update_step(w: np.ndarray, g: np.ndarray, state: OptimState):
    """One optimizer step; returns (w', state')."""
    if w.shape != g.shape:
        raise InputError(f"gradient shape {g.shape} does not match parameters {w.shape}")
    if not np.isfinite(g).all():
        raise NumericalError("non-finite gradient passed to update_step")
    if state.weight_decay:
        g = g + state.weight_decay * w
    if state.rule == "sgd":
        return w - state.lr * g, replace(state, acc=dict(state.acc))
    if state.rule == "momentum":
        v = state.momentum * _get_acc(state, "v", w) + g
        return w - state.lr * v, replace(state, acc={**state.acc, "v": v})
    # Adadelta (Zeiler 2012): accumulate E[g^2] and E[dx^2], scale-free steps.
    eg2 = state.rho * _get_acc(state, "eg2", w) + (1.0 - state.rho) * g * g
    edx2 = _get_acc(state, "edx2", w)
    dx = -np.sqrt(edx2 + state.eps) / np.sqrt(eg2 + state.eps) * g
    edx2 = state.rho * edx2 + (1.0 - state.rho) * dx * dx
    return w + state.lr * dx, replace(state, acc={**state.acc, "eg2": eg2, "edx2": edx2})
