"""
Adam with bias correction over named parameter blocks.
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from src.domain.shared.exceptions import NumericalError, ShapeError


@dataclass
class AdamState:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    first_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray], state: AdamState
) -> Tuple[Dict[str, np.ndarray], AdamState]:
    """
    One Adam update, in place on `params`.
    Gradients are checked before any block is touched.
    """
    for name, param in params.items():
        grad = grads.get(name)
        if grad is None or grad.shape != param.shape:
            raise ShapeError(f"Gradient for {name} missing or mis-shaped", details={"block": name})
        if not np.isfinite(grad).all():
            raise NumericalError(f"Non-finite gradient in {name}", block=name)

    state.step += 1
    bias1 = 1.0 - state.beta1**state.step
    bias2 = 1.0 - state.beta2**state.step

    for name, param in params.items():
        grad = grads[name]
        m = state.first_moment.setdefault(name, np.zeros_like(param))
        v = state.second_moment.setdefault(name, np.zeros_like(param))

        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * (grad * grad)

        param -= (state.lr / bias1) * m / (np.sqrt(v / bias2) + state.eps)

    return params, state
