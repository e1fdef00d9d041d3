"""Adam optimizer as a pure step function plus a small stateful driver."""

from dataclasses import dataclass, replace
from typing import Dict

import numpy as np

from ..config import Config
from ..errors import InvalidDimensionError


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    lr: float = 1e-3
    beta1: float = Config.ADAM_BETA1
    beta2: float = Config.ADAM_BETA2
    eps: float = Config.ADAM_EPS

    @classmethod
    def fresh(cls, shape, lr: float, **kwargs) -> "AdamState":
        return cls(
            m=np.zeros(shape, dtype=np.float64),
            v=np.zeros(shape, dtype=np.float64),
            lr=lr,
            **kwargs,
        )


def adam_step(
    param: np.ndarray, grad: np.ndarray, state: AdamState
) -> tuple[np.ndarray, AdamState]:
    """One bias-corrected Adam update; returns new parameter and state"""
    if param.shape != grad.shape or param.shape != state.m.shape:
        raise InvalidDimensionError(
            f"param {param.shape}, grad {grad.shape} and state {state.m.shape} "
            "must share a shape"
        )
    t = state.t + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    v = state.beta2 * state.v + (1.0 - state.beta2) * (grad * grad)
    m_hat = m / (1.0 - state.beta1**t)
    v_hat = v / (1.0 - state.beta2**t)
    updated = param - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return updated, replace(state, m=m, v=v, t=t)


class Adam:
    """Keeps one AdamState per named parameter and writes updates in place"""

    def __init__(self, lr: float):
        if lr <= 0:
            raise ValueError(f"learning rate must be positive, got {lr}")
        self.lr = lr
        self.states: Dict[str, AdamState] = {}

    def step(
        self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]
    ) -> None:
        for name, param in params.items():
            state = self.states.get(name)
            if state is None:
                state = AdamState.fresh(param.shape, self.lr)
            updated, self.states[name] = adam_step(param, grads[name], state)
            # models hold references to these arrays
            param[...] = updated
