"""Qubit channels: Kraus form, affine Bloch form, Choi test, factorization.

A channel acts on single-qubit states; on Bloch vectors it is the
affine map r -> t + T r.  The two representations are kept together:
``QubitChannel.from_kraus`` derives (t, T) from the operators, and
``QubitChannel.from_affine`` accepts (t, T) directly after verifying
complete positivity through the Choi matrix.  ``factorize`` splits T by
singular value decomposition into rotations and a scaling, the form
used for the unital-monotonicity analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import DEFAULT_TOL, ID2, PAULIS, SIGMA_X, SIGMA_Y, SIGMA_Z
from .states import TwoQubitState

CHOI_TOL = 1e-9

_BASIS1 = (ID2, SIGMA_X, SIGMA_Y, SIGMA_Z)


@dataclass(frozen=True)
class AffineRep:
    """Affine Bloch-ball action r -> t + T r of a qubit channel."""

    t: np.ndarray
    tmat: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float).reshape(3)
        tmat = np.asarray(self.tmat, dtype=float).reshape(3, 3)
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(tmat))):
            raise ValueError("affine representation entries must be finite")
        t.setflags(write=False)
        tmat.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "tmat", tmat)


def _apply_kraus(kraus, x: np.ndarray) -> np.ndarray:
    out = np.zeros((2, 2), dtype=complex)
    for k in kraus:
        out += k @ x @ k.conj().T
    return out


def kraus_to_affine(kraus, tol: float = DEFAULT_TOL) -> AffineRep:
    """Affine (t, T) of a trace-preserving Kraus set.

    t_i = tr(sigma_i Phi(I)) / 2 and T_ij = tr(sigma_i Phi(sigma_j)) / 2.

    Raises:
        ValueError: if the set is not trace preserving within ``tol`` or
            the computed coefficients carry imaginary parts above it.
    """
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    if not kraus:
        raise ValueError("empty Kraus set")
    for k in kraus:
        if k.shape != (2, 2):
            raise ValueError(f"Kraus operators must be 2x2, got {k.shape}")
    complete = sum(k.conj().T @ k for k in kraus)
    dev = np.abs(complete - ID2).max()
    if dev > tol:
        raise ValueError(f"not trace preserving: max |sum K^dag K - I| = {dev:.3e}")
    phi_i = _apply_kraus(kraus, ID2)
    t = np.empty(3)
    tmat = np.empty((3, 3))
    worst_imag = 0.0
    for i, si in enumerate(PAULIS):
        val = 0.5 * np.trace(si @ phi_i)
        worst_imag = max(worst_imag, abs(val.imag))
        t[i] = val.real
    for j, sj in enumerate(PAULIS):
        phi_sj = _apply_kraus(kraus, sj)
        for i, si in enumerate(PAULIS):
            val = 0.5 * np.trace(si @ phi_sj)
            worst_imag = max(worst_imag, abs(val.imag))
            tmat[i, j] = val.real
    if worst_imag > tol:
        raise ValueError(f"affine coefficients not real: max imag {worst_imag:.3e}")
    return AffineRep(t=t, tmat=tmat)


def choi_from_kraus(kraus) -> np.ndarray:
    """Choi matrix sum_ij |i><j| o Phi(|i><j|) from Kraus operators."""
    c = np.zeros((4, 4), dtype=complex)
    for k in kraus:
        v = np.asarray(k, dtype=complex).T.reshape(4)
        c += np.outer(v, v.conj())
    return c


def choi_from_affine(t, tmat) -> np.ndarray:
    """Choi matrix of the affine map, no CP check.

    The affine action extends to all 2x2 inputs by complex linearity:
    X = x0 I + x.sigma maps to x0 I + (x0 t + T x).sigma.  Useful for
    testing maps that are not channels (the Choi then fails PSD).
    """
    t = np.asarray(t, dtype=float).reshape(3)
    tmat = np.asarray(tmat, dtype=float).reshape(3, 3)
    c = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            basis = np.zeros((2, 2), dtype=complex)
            basis[i, j] = 1.0
            x0 = 0.5 * np.trace(basis)
            x = np.array([0.5 * np.trace(s @ basis) for s in PAULIS])
            out_vec = x0 * t + tmat @ x
            phi = x0 * ID2 + sum(out_vec[k] * PAULIS[k] for k in range(3))
            c[2 * i:2 * i + 2, 2 * j:2 * j + 2] = phi
    return c


def affine_to_kraus(t, tmat, tol: float = CHOI_TOL):
    """Kraus operators of a CP affine map via Choi eigendecomposition.

    Raises:
        ValueError: if the Choi matrix is not PSD within ``tol`` (the
            map is not completely positive).
    """
    c = choi_from_affine(t, tmat)
    vals, vecs = np.linalg.eigh(c)
    if vals[0] < -tol:
        raise ValueError(f"map is not completely positive: Choi eigenvalue {vals[0]:.3e}")
    kraus = []
    for val, vec in zip(vals, vecs.T):
        if val > 1e-12:
            kraus.append(np.sqrt(val) * vec.reshape(2, 2).T)
    return kraus


class QubitChannel:
    """Immutable qubit channel holding Kraus and affine forms.

    Attributes:
        kraus: tuple of 2x2 operators, possibly empty for affine-defined
            channels (those cannot be used where Kraus form is required).
        affine: the AffineRep (always present).
        choi: 4x4 Choi matrix, PSD within 1e-9, trace 2.
    """

    __slots__ = ("kraus", "affine", "choi")

    def __init__(self, kraus, affine: AffineRep, choi: np.ndarray):
        kraus = tuple(np.asarray(k, dtype=complex).copy() for k in kraus)
        for k in kraus:
            k.setflags(write=False)
        choi = np.asarray(choi, dtype=complex).copy()
        choi.setflags(write=False)
        self.kraus = kraus
        self.affine = affine
        self.choi = choi

    @classmethod
    def from_kraus(cls, ops, tol: float = DEFAULT_TOL) -> "QubitChannel":
        affine = kraus_to_affine(ops, tol=tol)
        choi = choi_from_kraus(ops)
        if abs(np.trace(choi).real - 2.0) > tol:
            raise ValueError("Choi trace differs from 2")
        if not linalg.psd_check(choi, tol=CHOI_TOL):
            raise ValueError("Choi matrix not PSD: map is not completely positive")
        return cls(ops, affine, choi)

    @classmethod
    def from_affine(cls, t, tmat, tol: float = CHOI_TOL) -> "QubitChannel":
        choi = choi_from_affine(t, tmat)
        if not linalg.psd_check(choi, tol=tol):
            raise ValueError("Choi matrix not PSD: map is not completely positive")
        return cls((), AffineRep(t=t, tmat=tmat), choi)

    def __repr__(self):
        kind = f"{len(self.kraus)} Kraus ops" if self.kraus else "affine-only"
        return f"QubitChannel({kind}, |t|={np.linalg.norm(self.affine.t):.4f})"


def is_unital(ch: QubitChannel, tol: float = DEFAULT_TOL) -> bool:
    """True iff the channel fixes the maximally mixed state, |t| <= tol."""
    return bool(np.linalg.norm(ch.affine.t) <= tol)


def apply_single(ch: QubitChannel, rho, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Apply the channel to a single-qubit density matrix.

    Raises:
        ValueError: if ``rho`` is not a valid 2x2 density matrix.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected 2x2 density matrix, got {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("input not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError("input trace differs from 1")
    if not linalg.psd_check(rho, tol=tol):
        raise ValueError("input not PSD")
    if ch.kraus:
        return _apply_kraus(ch.kraus, rho)
    r = np.array([np.trace(s @ rho).real for s in PAULIS])
    out = ch.affine.t + ch.affine.tmat @ r
    return 0.5 * (ID2 + sum(out[k] * PAULIS[k] for k in range(3)))


def apply_local(ch_a: QubitChannel, ch_b: QubitChannel,
                s: TwoQubitState) -> TwoQubitState:
    """Apply the product channel (A on qubit 1, B on qubit 2) to a state.

    Raises:
        ValueError: if either channel has no Kraus form.
    """
    if not ch_a.kraus or not ch_b.kraus:
        raise ValueError("apply_local requires Kraus form on both channels")
    ka = np.stack(ch_a.kraus)
    kb = np.stack(ch_b.kraus)
    r4 = s.rho.reshape(2, 2, 2, 2)
    out = np.einsum("iAa,jBb,abcd,iCc,jDd->ABCD",
                    ka, kb, r4, ka.conj(), kb.conj(), optimize=True)
    return TwoQubitState(out.reshape(4, 4))


# ---------------------------------------------------------------------------
# Built-in channels

def identity_channel() -> QubitChannel:
    return QubitChannel.from_kraus([ID2])


def amplitude_damping(p: float) -> QubitChannel:
    """Amplitude damping with decay probability p, q = 1 - p.

    Kraus pair [[1,0],[0,sqrt(q)]] and [[0,sqrt(p)],[0,0]]; affine form
    t = (0,0,p), T = diag(sqrt(q), sqrt(q), q).  Nonunital for p > 0.
    """
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"damping probability must lie in [0,1], got {p!r}")
    q = 1.0 - p
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(q)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(p)], [0.0, 0.0]], dtype=complex)
    return QubitChannel.from_kraus([k0, k1])


def _check_prob(p) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0,1], got {p!r}")
    return p


def depolarizing(p: float) -> QubitChannel:
    """Depolarizing channel normalized so that T = (1 - p) I."""
    p = _check_prob(p)
    ops = [np.sqrt(1.0 - 0.75 * p) * ID2]
    ops += [np.sqrt(0.25 * p) * s for s in PAULIS]
    return QubitChannel.from_kraus(ops)


def bit_flip(p: float) -> QubitChannel:
    p = _check_prob(p)
    return QubitChannel.from_kraus([np.sqrt(1.0 - p) * ID2, np.sqrt(p) * SIGMA_X])


def phase_flip(p: float) -> QubitChannel:
    p = _check_prob(p)
    return QubitChannel.from_kraus([np.sqrt(1.0 - p) * ID2, np.sqrt(p) * SIGMA_Z])


def bit_phase_flip(p: float) -> QubitChannel:
    p = _check_prob(p)
    return QubitChannel.from_kraus([np.sqrt(1.0 - p) * ID2, np.sqrt(p) * SIGMA_Y])


_UNITAL_FACTORIES = {
    "depolarizing": depolarizing,
    "bit_flip": bit_flip,
    "phase_flip": phase_flip,
    "bit_phase_flip": bit_phase_flip,
}


def unital_builtin(name: str, p: float) -> QubitChannel:
    """One of the named unital channels at error probability p."""
    try:
        factory = _UNITAL_FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown unital channel {name!r}; "
                         f"choices: {sorted(_UNITAL_FACTORIES)}") from None
    return factory(p)


def discord_raising() -> QubitChannel:
    """The local map sending |0><0| to itself and |1><1| to |+><+|."""
    k0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    k1 = np.array([[0.0, 1.0], [0.0, 1.0]], dtype=complex) / np.sqrt(2.0)
    return QubitChannel.from_kraus([k0, k1])


# ---------------------------------------------------------------------------
# Factorization T = R1 (sign D) R2^T

@dataclass(frozen=True)
class ChannelFactorization:
    """SVD split of the linear part plus the rotated translation.

    T = r1 @ (sign * diag(diag)) @ r2.T with both rotations proper and
    diag nonnegative descending; d = r1.T @ t so that the channel is the
    simple map (d, sign*diag) sandwiched between the two rotations.
    """

    r1: np.ndarray
    r2: np.ndarray
    diag: np.ndarray
    sign: float
    d: np.ndarray

    def as_affine(self) -> AffineRep:
        tmat = self.r1 @ (self.sign * np.diag(self.diag)) @ self.r2.T
        return AffineRep(t=self.r1 @ self.d, tmat=tmat)


def probe_directions() -> np.ndarray:
    """26 unit Bloch directions: all sign patterns of {-1,0,1}^3 but 0."""
    pts = []
    for x in (-1.0, 0.0, 1.0):
        for y in (-1.0, 0.0, 1.0):
            for z in (-1.0, 0.0, 1.0):
                if x == y == z == 0.0:
                    continue
                v = np.array([x, y, z])
                pts.append(v / np.linalg.norm(v))
    return np.array(pts)


def factorize(ch: QubitChannel) -> ChannelFactorization:
    """Factorize the channel's linear part by SVD.

    Proper rotations are enforced by flipping paired columns; when
    det(T) < 0 the leftover axis flip is expressed as sign = -1 together
    with a pi rotation folded into r2, keeping diag nonnegative.
    The result is verified to reproduce the channel action on the
    26-direction probe set within 1e-9.
    """
    t = ch.affine.t
    tmat = ch.affine.tmat
    diag = np.diag(tmat).copy()
    if (np.abs(tmat - np.diag(diag)).max() <= 1e-12
            and diag[0] >= diag[1] >= diag[2] >= 0.0):
        # already in canonical form; skip the SVD so degenerate singular
        # values cannot pick up an arbitrary basis
        fact = ChannelFactorization(r1=np.eye(3), r2=np.eye(3), diag=diag,
                                    sign=1.0, d=t.copy())
        return fact
    u, svals, vt = np.linalg.svd(tmat)
    r1 = u.copy()
    r2 = vt.T.copy()
    svals = svals.copy()
    if np.linalg.det(r1) < 0:
        r1[:, 2] *= -1.0
        svals[2] *= -1.0
    if np.linalg.det(r2) < 0:
        r2[:, 2] *= -1.0
        svals[2] *= -1.0
    if svals[2] < 0:
        # diag(s1,s2,-s3) = -diag(s1,s2,s3) @ diag(-1,-1,1), fold the
        # pi rotation about z into r2
        sign = -1.0
        svals[2] *= -1.0
        r2 = r2 @ np.diag([-1.0, -1.0, 1.0])
    else:
        sign = 1.0
    fact = ChannelFactorization(r1=r1, r2=r2, diag=svals, sign=sign,
                                d=r1.T @ t)
    rebuilt = fact.as_affine()
    probes = probe_directions()
    orig = t[None, :] + probes @ tmat.T
    redo = rebuilt.t[None, :] + probes @ rebuilt.tmat.T
    err = np.abs(orig - redo).max()
    if err > 1e-9:
        raise RuntimeError(f"factorization round-trip error {err:.3e}")
    return fact


# ---------------------------------------------------------------------------
# Random unital channels

def _unit_vector(rng) -> np.ndarray:
    while True:
        v = rng.normal(size=3)
        n = np.linalg.norm(v)
        if n > 1e-12:
            return v / n


def _sample_unital(rng) -> QubitChannel:
    # rejection-sample the scaling triple from the CP tetrahedron with
    # corners (1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1)
    while True:
        lam = rng.uniform(-1.0, 1.0, size=3)
        w = 0.25 * np.array([
            1.0 + lam[0] + lam[1] + lam[2],
            1.0 + lam[0] - lam[1] - lam[2],
            1.0 - lam[0] + lam[1] - lam[2],
            1.0 - lam[0] - lam[1] + lam[2],
        ])
        if np.all(w >= 0.0):
            break
    u_a = linalg.su2_axis_angle(_unit_vector(rng), rng.uniform(0.0, 2.0 * np.pi))
    u_b = linalg.su2_axis_angle(_unit_vector(rng), rng.uniform(0.0, 2.0 * np.pi))
    ops = [np.sqrt(wi) * (u_a @ g @ u_b) for wi, g in zip(w, _BASIS1)]
    ch = QubitChannel.from_kraus(ops)
    if np.linalg.norm(ch.affine.t) > 1e-12:
        raise RuntimeError("sampled channel failed unitality")
    return ch


def sample_unital_local(seed) -> tuple:
    """Pair of independent random local unital channels.

    Each is rotation o diag(lambda) o rotation with lambda drawn
    uniformly from the CP tetrahedron.  ``seed`` may be an integer seed
    or a numpy Generator; results are deterministic per seed.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return _sample_unital(rng), _sample_unital(rng)


# ---------------------------------------------------------------------------
# JSON schema

def channel_from_json(obj) -> QubitChannel:
    """Build a channel from its JSON object form.

    Schema: {"type":"amplitude_damping","p":...} | {"type":"depolarizing"
    |"bit_flip"|"phase_flip"|"bit_phase_flip","p":...} |
    {"type":"discord_raising"} | {"type":"kraus","ops":[{"re":[[..]],
    "im":[[..]]},...]}.
    """
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError("channel JSON must be an object with a 'type' key")
    kind = obj["type"]
    if kind == "amplitude_damping":
        return amplitude_damping(_json_prob(obj))
    if kind in _UNITAL_FACTORIES:
        return unital_builtin(kind, _json_prob(obj))
    if kind == "discord_raising":
        return discord_raising()
    if kind == "kraus":
        raw_ops = obj.get("ops")
        if not isinstance(raw_ops, list) or not raw_ops:
            raise ValueError("kraus channel needs a nonempty 'ops' list")
        ops = []
        for entry in raw_ops:
            re = np.asarray(entry.get("re"), dtype=float)
            im_raw = entry.get("im")
            im = np.zeros_like(re) if im_raw is None else np.asarray(im_raw, dtype=float)
            if re.shape != (2, 2) or im.shape != (2, 2):
                raise ValueError("each Kraus op needs 2x2 're' and 'im' parts")
            ops.append(re + 1.0j * im)
        return QubitChannel.from_kraus(ops)
    raise ValueError(f"unknown channel type {kind!r}")


def _json_prob(obj) -> float:
    if "p" not in obj:
        raise ValueError(f"channel type {obj['type']!r} requires a 'p' field")
    return float(obj["p"])
