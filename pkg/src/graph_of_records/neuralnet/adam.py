"""Bias-corrected Adam over a GAT's parameter dictionary."""

from dataclasses import dataclass, field

import numpy as np

from graph_of_records.domain.types import FloatArray
from graph_of_records.errors import NonFiniteError
from graph_of_records.neuralnet.gat import GatModel

BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8


@dataclass(slots=True)
class AdamState:
    """First and second moment estimates per parameter, plus the step count."""

    m: dict[str, FloatArray] = field(default_factory=dict)
    v: dict[str, FloatArray] = field(default_factory=dict)
    t: int = 0
    beta1: float = BETA1
    beta2: float = BETA2
    epsilon: float = EPSILON

    @classmethod
    def for_model(cls, model: GatModel) -> "AdamState":
        return cls(
            m={k: np.zeros_like(p) for k, p in model.params.items()},
            v={k: np.zeros_like(p) for k, p in model.params.items()},
        )

    def copy(self) -> "AdamState":
        return AdamState(
            m={k: v.copy() for k, v in self.m.items()},
            v={k: v.copy() for k, v in self.v.items()},
            t=self.t,
            beta1=self.beta1,
            beta2=self.beta2,
            epsilon=self.epsilon,
        )


def adam_update(
    params: dict[str, FloatArray], grads: dict[str, FloatArray], state: AdamState, lr: float
) -> None:
    """Apply one Adam update to a parameter dictionary in place.

    Raises:
        ValueError: Gradient names or shapes differ from the parameters.
        NonFiniteError: Any gradient entry is NaN or infinite. Nothing is
            mutated in that case.
    """
    if set(grads) != set(params):
        raise ValueError(f"Gradient names {sorted(grads)} != {sorted(params)}")
    for name, g in grads.items():
        if g.shape != params[name].shape:
            raise ValueError(
                f"Gradient '{name}' has shape {g.shape}, expected {params[name].shape}"
            )
        if not np.isfinite(g).all():
            raise NonFiniteError(f"Non-finite gradient for parameter '{name}'")

    state.t += 1
    bc1 = 1.0 - state.beta1**state.t
    bc2 = 1.0 - state.beta2**state.t
    step_size = lr / bc1

    for name, param in params.items():
        g = grads[name]
        if name not in state.m:
            state.m[name] = np.zeros_like(param)
            state.v[name] = np.zeros_like(param)

        state.m[name] *= state.beta1
        state.m[name] += (1.0 - state.beta1) * g
        state.v[name] *= state.beta2
        state.v[name] += (1.0 - state.beta2) * (g * g)

        denom = np.sqrt(state.v[name] / bc2) + state.epsilon
        param -= step_size * state.m[name] / denom


def adam_step(
    model: GatModel, grads: dict[str, FloatArray], state: AdamState, lr: float
) -> None:
    """adam_update on the model parameters, then bump the model version."""
    adam_update(model.params, grads, state, lr)
    model.mark_updated()
