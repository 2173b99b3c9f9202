from __future__ import annotations

from dynwalk import Deterministic, ModelConfig, validate


def make_config(
    k0: int = 3,
    lam: float = 1.0,
    horizon: int = 5,
    insertion=None,
    seed: int = 0,
) -> ModelConfig:
    return validate(
        ModelConfig(
            k0=k0,
            lam=lam,
            horizon=horizon,
            insertion=insertion if insertion is not None else Deterministic(),
            seed=seed,
        )
    )
