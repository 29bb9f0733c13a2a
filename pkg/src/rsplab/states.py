"""Two-qubit density matrices and their Pauli/Bloch decomposition.

A two-qubit state rho is stored dense (4x4 complex) together with its
cached decomposition

    rho = (1/4) [ I o I + a.sigma o I + I o b.sigma
                  + sum_kl E_kl sigma_k o sigma_l ]

where ``a`` and ``b`` are the local Bloch vectors and ``E`` the 3x3
correlation matrix.  All measure computations downstream read the
cached (a, b, E), never the raw matrix, so construction is the single
source of numerical truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import DEFAULT_TOL, ID2, PAULIS

# Stack of the 16 products sigma_mu o sigma_nu with sigma_0 = I.
_BASIS1 = np.stack([ID2, *PAULIS])
_BASIS16 = np.einsum("mij,nkl->mnikjl", _BASIS1, _BASIS1).reshape(4, 4, 4, 4)
_BASIS16.setflags(write=False)

BELL_TOL = 1e-12


@dataclass(frozen=True)
class PauliDecomposition:
    """Bloch vectors and correlation matrix of a two-qubit state.

    Attributes:
        a: Alice's Bloch vector, shape (3,).
        b: Bob's Bloch vector, shape (3,).
        e: correlation matrix E with E[k, l] = tr(rho sigma_k o sigma_l).
    """

    a: np.ndarray
    b: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).reshape(3)
        b = np.asarray(self.b, dtype=float).reshape(3)
        e = np.asarray(self.e, dtype=float).reshape(3, 3)
        for arr in (a, b, e):
            if not np.all(np.isfinite(arr)):
                raise ValueError("decomposition entries must be finite")
        if np.linalg.norm(a) > 1 + 1e-9 or np.linalg.norm(b) > 1 + 1e-9:
            raise ValueError("Bloch vector norm exceeds 1")
        if np.abs(e).max() > 1 + 1e-9:
            raise ValueError("correlation matrix entry exceeds 1 in magnitude")
        for arr in (a, b, e):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "e", e)


def decompose(rho: np.ndarray, tol: float = DEFAULT_TOL) -> PauliDecomposition:
    """Pauli decomposition of a valid 4x4 density matrix.

    Args:
        rho: 4x4 complex density matrix (Hermitian, unit trace, PSD).
        tol: validation tolerance.

    Returns:
        The (a, b, E) decomposition with imaginary parts (checked to be
        below ``tol``) discarded.

    Raises:
        ValueError: if ``rho`` fails any density-matrix check.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
    herm_dev = np.abs(rho - rho.conj().T).max()
    if herm_dev > tol:
        raise ValueError(f"not Hermitian: max |rho - rho^dag| = {herm_dev:.3e}")
    tr_dev = abs(np.trace(rho) - 1.0)
    if tr_dev > tol:
        raise ValueError(f"trace differs from 1 by {tr_dev:.3e}")
    if not linalg.psd_check(rho, tol=tol):
        low = linalg.herm_eigvals(rho, tol=tol)[0]
        raise ValueError(f"not positive semidefinite: lowest eigenvalue {low:.3e}")
    coeff = np.einsum("ab,mnba->mn", rho, _BASIS16)
    imag = np.abs(coeff.imag).max()
    if imag > tol:
        raise ValueError(f"decomposition coefficients not real: max imag {imag:.3e}")
    c = coeff.real
    return PauliDecomposition(a=c[1:, 0], b=c[0, 1:], e=c[1:, 1:])


class TwoQubitState:
    """Immutable two-qubit density matrix with cached decomposition.

    Raises ValueError at construction when the matrix is not Hermitian,
    not unit trace, or not PSD, each within 1e-10.
    """

    __slots__ = ("rho", "decomposition")

    def __init__(self, rho, tol: float = DEFAULT_TOL):
        rho = np.asarray(rho, dtype=complex).copy()
        self.decomposition = decompose(rho, tol=tol)
        rho.setflags(write=False)
        self.rho = rho

    @property
    def a(self) -> np.ndarray:
        return self.decomposition.a

    @property
    def b(self) -> np.ndarray:
        return self.decomposition.b

    @property
    def e(self) -> np.ndarray:
        return self.decomposition.e

    @property
    def purity(self) -> float:
        return float(np.trace(self.rho @ self.rho).real)

    def __repr__(self):
        a, b, e = self.a, self.b, self.e
        return (f"TwoQubitState(|a|={np.linalg.norm(a):.4f}, "
                f"|b|={np.linalg.norm(b):.4f}, |E|_F={np.linalg.norm(e):.4f})")


def compose(d: PauliDecomposition) -> TwoQubitState:
    """Rebuild the density matrix from a decomposition.

    Raises:
        ValueError: if the resulting matrix is not a density matrix
            (signals an invalid decomposition).
    """
    c = np.empty((4, 4))
    c[0, 0] = 1.0
    c[1:, 0] = d.a
    c[0, 1:] = d.b
    c[1:, 1:] = d.e
    rho = 0.25 * np.einsum("mn,mnab->ab", c, _BASIS16)
    return TwoQubitState(rho)


def bell_eigenvalues(c1: float, c2: float, c3: float) -> np.ndarray:
    """Eigenvalues of the Bell-diagonal state with correlations (c1, c2, c3).

    These are the weights on the four Bell states; the state is physical
    iff all four are nonnegative.
    """
    return 0.25 * np.array([
        1.0 - c1 - c2 - c3,
        1.0 - c1 + c2 + c3,
        1.0 + c1 - c2 + c3,
        1.0 + c1 + c2 - c3,
    ])


@dataclass(frozen=True)
class BellDiagonalParams:
    """Correlation triple (c1, c2, c3) inside the Bell tetrahedron.

    The tetrahedron has corners (1,1,-1), (1,-1,1), (-1,1,1), (-1,-1,-1);
    membership is equivalent to all four Bell-basis eigenvalues being
    >= -1e-12 (tolerance admits the corner states themselves).
    """

    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        vals = bell_eigenvalues(self.c1, self.c2, self.c3)
        if not np.all(np.isfinite(vals)):
            raise ValueError("correlation parameters must be finite")
        worst = int(np.argmin(vals))
        if vals[worst] < -BELL_TOL:
            raise ValueError(
                f"({self.c1}, {self.c2}, {self.c3}) lies outside the Bell "
                f"tetrahedron: eigenvalue {worst} is {vals[worst]:.6e}")

    def as_tuple(self):
        return (float(self.c1), float(self.c2), float(self.c3))


def as_bell_params(c) -> BellDiagonalParams:
    """Coerce a params object or length-3 sequence to BellDiagonalParams."""
    if isinstance(c, BellDiagonalParams):
        return c
    c1, c2, c3 = (float(x) for x in c)
    return BellDiagonalParams(c1, c2, c3)


def bell_diagonal(c1, c2=None, c3=None) -> TwoQubitState:
    """Bell-diagonal state with a = b = 0 and E = diag(c1, c2, c3).

    Accepts either three floats or a single BellDiagonalParams/sequence.

    Raises:
        ValueError: outside the tetrahedron, naming the violated eigenvalue.
    """
    if c2 is None:
        params = as_bell_params(c1)
    else:
        params = BellDiagonalParams(float(c1), float(c2), float(c3))
    d = PauliDecomposition(a=np.zeros(3), b=np.zeros(3),
                           e=np.diag(params.as_tuple()))
    return compose(d)


def local_unitary(s: TwoQubitState, u1, u2, tol: float = 1e-10) -> TwoQubitState:
    """Conjugate a state by a product unitary U1 o U2.

    Raises:
        ValueError: if either factor is not unitary within ``tol``.
    """
    u1 = np.asarray(u1, dtype=complex)
    u2 = np.asarray(u2, dtype=complex)
    for name, u in (("u1", u1), ("u2", u2)):
        if not linalg.is_unitary(u, tol=tol):
            raise ValueError(f"{name} is not a 2x2 unitary within tolerance")
    u = np.kron(u1, u2)
    return TwoQubitState(u @ s.rho @ u.conj().T)


def state_from_json(obj: dict) -> TwoQubitState:
    """Build a state from its JSON description.

    Schemas: {"type": "bell_diagonal", "c": [c1, c2, c3]} or
    {"type": "dense", "re": [[..4x4..]], "im": [[..4x4..]]}.
    """
    if not isinstance(obj, dict):
        raise ValueError("state JSON must be an object")
    kind = obj.get("type")
    if kind == "bell_diagonal":
        c = obj.get("c")
        if c is None or len(c) != 3:
            raise ValueError("bell_diagonal state needs a 3-entry field 'c'")
        return bell_diagonal([float(x) for x in c])
    if kind == "dense":
        if "re" not in obj or "im" not in obj:
            raise ValueError("dense state needs fields 're' and 'im'")
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
        if re.shape != (4, 4) or im.shape != (4, 4):
            raise ValueError("dense state parts must be 4x4")
        return TwoQubitState(re + 1.0j * im)
    raise ValueError(f"unknown state type {kind!r}")


def state_to_json(s: TwoQubitState) -> dict:
    return {"type": "dense",
            "re": s.rho.real.tolist(),
            "im": s.rho.imag.tolist()}
