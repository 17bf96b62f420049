"""Learning-rate decay from the base rate to zero over the training run."""

from enum import StrEnum

import numpy as np


class DecayShape(StrEnum):
    LINEAR = "linear"
    COSINE = "cosine"


def lr_at(
    epoch: int,
    total_epochs: int = 150,
    base_lr: float = 1e-3,
    shape: DecayShape = DecayShape.LINEAR,
) -> float:
    """Learning rate for ``epoch``: ``base_lr`` at 0, zero at ``total_epochs``.

    Raises:
        ValueError: ``epoch`` outside ``[0, total_epochs]`` or non-positive total.
    """
    if total_epochs < 1:
        raise ValueError(f"total_epochs must be >= 1, got {total_epochs}")
    if not 0 <= epoch <= total_epochs:
        raise ValueError(f"epoch must be in [0, {total_epochs}], got {epoch}")

    progress = epoch / total_epochs
    if shape == DecayShape.COSINE:
        return float(base_lr * 0.5 * (1.0 + np.cos(np.pi * progress)))
    return base_lr * (1.0 - progress)
