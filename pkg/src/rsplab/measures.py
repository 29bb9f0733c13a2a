"""Closed-form correlation measures for two-qubit states.

Both measures come straight from the cached Pauli decomposition:

* RSP-fidelity  F = (E2^2 + E3^2) / 2  with E1^2 >= E2^2 >= E3^2 the
  eigenvalues of E^T E,
* normalized geometric discord  D = (|a|^2 + |E|_F^2 - lambda_max) / 2
  with lambda_max the largest eigenvalue of a a^T + E E^T.

D >= F holds for every state; `measure_pair` asserts it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import sym3_eigs
from .states import TwoQubitState

ORDER_TOL = 1e-9


@dataclass(frozen=True)
class MeasureReport:
    f_rsp: float
    d_g: float
    lambda_max: float
    e_sq: tuple  # eigenvalues of E^T E, descending

    def __post_init__(self):
        e_sq = tuple(float(v) for v in self.e_sq)
        if list(e_sq) != sorted(e_sq, reverse=True):
            raise ValueError("e_sq must be sorted descending")
        if self.d_g < self.f_rsp - 1e-10:
            raise ValueError("d_g below f_rsp beyond tolerance")
        object.__setattr__(self, "e_sq", e_sq)


def _e_spectrum(s: TwoQubitState) -> np.ndarray:
    e = s.e
    vals, _ = sym3_eigs(e.T @ e)
    # E^T E is PSD; clip eigensolver noise
    return np.maximum(vals, 0.0)


def rsp_fidelity(s: TwoQubitState) -> float:
    """RSP-fidelity, the sum of the two smallest eigenvalues of E^T E over 2."""
    e_sq = _e_spectrum(s)
    return float(0.5 * (e_sq[1] + e_sq[2]))


def gmqd(s: TwoQubitState) -> float:
    """Normalized geometric quantum discord."""
    a, e = s.a, s.e
    q = np.outer(a, a) + e @ e.T
    lam_max = sym3_eigs(q)[0][0]
    return float(max(0.0, 0.5 * (a @ a + np.sum(e * e) - lam_max)))


def measure_pair(s: TwoQubitState) -> MeasureReport:
    """Both measures plus the intermediate spectra.

    Raises:
        RuntimeError: if d_g < f_rsp - 1e-9, which can only come from a
            numerical bug, never from a valid state.
    """
    e_sq = _e_spectrum(s)
    f = float(0.5 * (e_sq[1] + e_sq[2]))
    a, e = s.a, s.e
    q = np.outer(a, a) + e @ e.T
    lam_max = float(sym3_eigs(q)[0][0])
    d = float(max(0.0, 0.5 * (a @ a + np.sum(e * e) - lam_max)))
    if d < f - ORDER_TOL:
        raise RuntimeError(f"ordering violated: d_g={d!r} < f_rsp={f!r}")
    return MeasureReport(f_rsp=f, d_g=d, lambda_max=lam_max,
                         e_sq=tuple(e_sq.tolist()))
