"""Dirac spectra, Green kernels and eigenspinor zero sets on flat tori."""

import json
from fractions import Fraction

from ._spinzero import *  # noqa: F401,F403
from ._spinzero import _a_hat, _genericity_trial, _zero_report

__all__ = [name for name in dir() if not name.startswith("_")]


def a_hat_complete_intersection(k: int, d: int) -> Fraction:
    """A-hat genus of the complete intersection V^{2k}(d) as an exact fraction."""
    return Fraction(_a_hat(k, d))


def zero_report(psi, threshold=None) -> dict:
    """Zero candidates of |psi| below the threshold (default: scaled Lipschitz bound)."""
    return json.loads(_zero_report(psi, threshold))


def genericity_trial(geometry, m: int, K: int, seed: int = default_master_seed, t0: float = 0.1) -> dict:  # noqa: F405
    """Statistics of K seeded conformal factors at t = t0."""
    return json.loads(_genericity_trial(geometry, m, K, seed, t0))


__all__ += ["a_hat_complete_intersection", "zero_report", "genericity_trial"]
