"""Common interface for model backends.

A model is a martingale-calibrated exponential Levy description of 2 or 3
assets with unit spot: ``S^i_t = exp(H^i_t)`` and ``kappa(e_i) = 0`` per
coordinate (unless a caller deliberately overrides the drift).  Backends
expose a closed-form cumulant per unit time, a characteristics triplet, and
a terminal sampler with deterministic block structure.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from ..characteristics import LevyTriplet


class Model(ABC):
    """Martingale exponential-Levy model with a closed-form cumulant."""

    dim: int
    name: str

    @abstractmethod
    def cumulant(self, w) -> complex:
        """Cumulant per unit time at a complex vector ``w``."""

    @abstractmethod
    def triplet(self) -> LevyTriplet:
        """Characteristics under the model's truncation convention."""

    @abstractmethod
    def sample_terminal(self, maturity: float, n: int, seed: int, *,
                        workers: int = 1, antithetic: bool = True) -> np.ndarray:
        """Draw ``n`` rows of ``H_T``, shape ``(n, dim)``, block-deterministic."""

    @abstractmethod
    def exp_moment_ok(self, u) -> bool:
        """Whether the real direction ``u`` is inside the moment domain."""

    @abstractmethod
    def describe(self) -> dict:
        """JSON-ready summary of the model kind and parameters."""

    def _check_w(self, w) -> np.ndarray:
        from ..errors import DimensionMismatch

        w = np.atleast_1d(np.asarray(w))
        if w.shape != (self.dim,):
            raise DimensionMismatch(
                f"argument shaped {w.shape}, expected ({self.dim},)")
        return w


def joint_cumulant(model: Model, w) -> complex:
    """Closed-form joint cumulant of the model at a complex vector ``w``.

    Free-function spelling of :meth:`Model.cumulant`; always satisfies
    ``joint_cumulant(model, 0) == 0`` exactly.
    """
    return model.cumulant(w)
