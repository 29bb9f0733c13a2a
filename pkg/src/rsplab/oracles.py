"""Brute-force verifiers independent of the closed-form measures.

The protocol oracle replays the remote-state-preparation game itself:
Alice measures along trial axes, Bob conditionally applies a pi
rotation about a correction axis, and the squared overlap with each
target is averaged over a great circle of targets and minimized over
the correction axis.  The discord oracle searches classical-quantum
states directly.  Both must land on the closed forms within stated
tolerances without sharing any code with them.

All randomness is derived per trial from (seed, trial index), so
serial and parallel runs produce identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import channels, enhancement, measures
from .linalg import ID2, PAULIS, su2_axis_angle
from .states import BellDiagonalParams, TwoQubitState, bell_diagonal, bell_eigenvalues

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


@dataclass(frozen=True)
class OracleConfig:
    """Grid sizes for the direction-search oracles."""

    seed: int = 0
    n_beta: int = 72       # correction-axis / CQ-axis grid
    n_target: int = 24     # targets per great circle
    n_alpha: int = 256     # measurement-direction grid
    refine_iters: int = 4  # local refinement rounds, shrink 0.2

    def __post_init__(self):
        for name in ("n_beta", "n_target", "n_alpha", "refine_iters"):
            if getattr(self, name) < 4:
                raise ValueError(f"{name} must be at least 4")

    def as_dict(self):
        return {"seed": int(self.seed), "n_beta": int(self.n_beta),
                "n_target": int(self.n_target), "n_alpha": int(self.n_alpha),
                "refine_iters": int(self.refine_iters)}


@dataclass(frozen=True)
class OracleReport:
    estimate: float
    reference: float
    abs_err: float
    trials: int
    seed: int
    config: dict = field(default_factory=dict)
    worst_case: str = ""
    passed: bool = True

    def __post_init__(self):
        if abs(self.abs_err - abs(self.estimate - self.reference)) > 1e-15:
            raise ValueError("abs_err must equal |estimate - reference|")

    def as_dict(self):
        """The serialized report: exactly the documented six keys."""
        return {"estimate": self.estimate, "reference": self.reference,
                "abs_err": self.abs_err, "trials": self.trials,
                "seed": self.seed, "config": dict(self.config)}


def _report(estimate, reference, trials, seed, config, worst_case, passed):
    return OracleReport(estimate=float(estimate), reference=float(reference),
                        abs_err=abs(float(estimate) - float(reference)),
                        trials=int(trials), seed=int(seed), config=config,
                        worst_case=worst_case, passed=bool(passed))


# ---------------------------------------------------------------------------
# Direction grids

def fibonacci_sphere(n: int) -> np.ndarray:
    """n roughly uniform unit vectors, no pole clustering."""
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = i * GOLDEN_ANGLE
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _orthonormal_pair(v: np.ndarray):
    aux = np.array([1.0, 0.0, 0.0]) if abs(v[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(v, aux)
    u /= np.linalg.norm(u)
    return u, np.cross(v, u)


def _cap_grid(center: np.ndarray, radius: float, n: int) -> np.ndarray:
    """Fibonacci-style points inside the spherical cap around center."""
    u, w = _orthonormal_pair(center)
    i = np.arange(n)
    cos_t = 1.0 - ((i + 0.5) / n) * (1.0 - np.cos(radius))
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - cos_t * cos_t))
    phi = i * GOLDEN_ANGLE
    return (cos_t[:, None] * center
            + sin_t[:, None] * (np.cos(phi)[:, None] * u + np.sin(phi)[:, None] * w))


def _cap_grid_batch(centers: np.ndarray, radius: float, n: int) -> np.ndarray:
    """(m, n, 3) cap grids around m centers at once."""
    aux = np.where(np.abs(centers[:, :1]) < 0.9,
                   np.array([[1.0, 0.0, 0.0]]), np.array([[0.0, 1.0, 0.0]]))
    u = np.cross(centers, aux)
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    w = np.cross(centers, u)
    i = np.arange(n)
    cos_t = 1.0 - ((i + 0.5) / n) * (1.0 - np.cos(radius))
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - cos_t * cos_t))
    phi = i * GOLDEN_ANGLE
    return (cos_t[None, :, None] * centers[:, None, :]
            + sin_t[None, :, None] * (np.cos(phi)[None, :, None] * u[:, None, :]
                                      + np.sin(phi)[None, :, None] * w[:, None, :]))


def _great_circle(axis: np.ndarray, n: int) -> np.ndarray:
    u, w = _orthonormal_pair(axis)
    th = 2.0 * np.pi * np.arange(n) / n
    return np.outer(np.cos(th), u) + np.outer(np.sin(th), w)


# ---------------------------------------------------------------------------
# Protocol oracle

def _designated_payoffs(b, e, beta, alphas, targets):
    """Payoff matrix (n_alpha, n_target) of the simulated protocol round.

    For measurement axis alpha the two outcomes leave Bob the
    subnormalized conditional vectors (b +- E^T alpha)/2 (weight times
    conditional Bloch vector, so zero-probability outcomes need no
    special casing).  Bob applies the pi rotation about beta to one
    designated outcome; the payoff of the outcome-averaged corrected
    state is its squared projection on the target.  Both designations
    are tried and the better kept.
    """
    ea = alphas @ e  # rows are E^T alpha
    vp = 0.5 * (b + ea)
    vm = 0.5 * (b - ea)
    flip = 2.0 * np.outer(beta, beta) - np.eye(3)
    w_minus = vp + vm @ flip.T   # rotate the -1 outcome
    w_plus = vp @ flip.T + vm    # rotate the +1 outcome
    pay_minus = (w_minus @ targets.T) ** 2
    pay_plus = (w_plus @ targets.T) ** 2
    return np.maximum(pay_minus, pay_plus)


def _beta_payoff(b, e, beta, cfg: OracleConfig) -> float:
    """Target-averaged payoff at one correction axis, optimized over alpha."""
    targets = _great_circle(beta, cfg.n_target)
    alphas = fibonacci_sphere(cfg.n_alpha)
    pay = _designated_payoffs(b, e, beta, alphas, targets)
    best_val = pay.max(axis=0)
    best_alpha = alphas[pay.argmax(axis=0)]
    radius = 2.0 * 3.6 / np.sqrt(cfg.n_alpha)
    n_cap = 24
    flip = 2.0 * np.outer(beta, beta) - np.eye(3)
    for _ in range(cfg.refine_iters):
        caps = _cap_grid_batch(best_alpha, radius, n_cap)  # (t, n_cap, 3)
        ea = caps @ e
        vp = 0.5 * (b + ea)
        vm = 0.5 * (b - ea)
        w_minus = vp + vm @ flip.T
        w_plus = vp @ flip.T + vm
        pm = np.einsum("tcj,tj->tc", w_minus, targets) ** 2
        pp = np.einsum("tcj,tj->tc", w_plus, targets) ** 2
        vals = np.maximum(pm, pp)
        k = vals.argmax(axis=1)
        rows = np.arange(cfg.n_target)
        better = vals[rows, k] > best_val
        best_val = np.where(better, vals[rows, k], best_val)
        best_alpha = np.where(better[:, None], caps[rows, k], best_alpha)
        radius *= 0.2
    return float(best_val.mean())


def protocol_fidelity_oracle(s: TwoQubitState,
                             cfg: Optional[OracleConfig] = None) -> OracleReport:
    """Estimate the RSP-fidelity by simulating the protocol directly.

    Minimizes the target-averaged optimized payoff over correction axes
    on a Fibonacci grid with local cap refinement.  Contract: within
    5e-3 of the closed form at default grids for Bell-diagonal states
    and random states of purity <= 0.99.
    """
    cfg = cfg or OracleConfig()
    b, e = s.b, s.e
    reference = measures.rsp_fidelity(s)
    betas = fibonacci_sphere(cfg.n_beta)
    vals = np.array([_beta_payoff(b, e, beta, cfg) for beta in betas])
    k = int(np.argmin(vals))
    best_beta, best_val = betas[k], float(vals[k])
    radius = 2.0 * 3.6 / np.sqrt(cfg.n_beta)
    for _ in range(cfg.refine_iters):
        caps = _cap_grid(best_beta, radius, 32)
        cap_vals = np.array([_beta_payoff(b, e, beta, cfg) for beta in caps])
        k = int(np.argmin(cap_vals))
        if cap_vals[k] < best_val:
            best_val = float(cap_vals[k])
            best_beta = caps[k]
        radius *= 0.2
    return _report(best_val, reference, 1, cfg.seed, cfg.as_dict(),
                   worst_case=f"abs_err={abs(best_val - reference):.3e}",
                   passed=abs(best_val - reference) <= 5e-3)


# ---------------------------------------------------------------------------
# GMQD search oracle

def _axis_ket(axis: np.ndarray) -> np.ndarray:
    """+1 eigenvector of axis.sigma."""
    h = sum(axis[k] * PAULIS[k] for k in range(3))
    vals, vecs = np.linalg.eigh(h)
    return vecs[:, int(np.argmax(vals))]


def _pinched_distance(rho: np.ndarray, axis: np.ndarray) -> float:
    """2 * HS distance^2 from rho to the CQ state pinched along axis.

    The candidate is validated as a genuine classical-quantum state
    (orthonormal axis kets, PSD parts, weights summing to one) before
    its distance is returned.
    """
    ket = _axis_ket(axis)
    proj_p = np.outer(ket, ket.conj())
    proj_m = ID2 - proj_p
    pp = np.kron(proj_p, ID2)
    pm = np.kron(proj_m, ID2)
    chi = pp @ rho @ pp + pm @ rho @ pm
    weights = []
    for proj4 in (pp, pm):
        w = np.trace(proj4 @ rho).real
        weights.append(w)
        if w > 1e-12:
            part = proj4 @ rho @ proj4 / w
            evs = np.linalg.eigvalsh(0.5 * (part + part.conj().T))
            if evs[0] < -1e-9:
                raise RuntimeError("pinched part not PSD")
    if abs(sum(weights) - 1.0) > 1e-10:
        raise RuntimeError("pinched weights do not sum to 1")
    diff = rho - chi
    return 2.0 * float(np.sum(diff * diff.conj()).real)


def gmqd_search_oracle(s: TwoQubitState,
                       cfg: Optional[OracleConfig] = None) -> OracleReport:
    """Upper-bound the discord by direct search over CQ states.

    Classical-quantum candidates are parameterized by Alice's axis; for
    each axis the best candidate is the pinching of the state, and the
    axis is optimized over a Fibonacci grid plus seeded random restarts
    with local cap refinement.  Always an upper bound (within 1e-9);
    within 1e-3 of the closed form for Bell-diagonal states.
    """
    cfg = cfg or OracleConfig()
    rho = s.rho
    reference = measures.gmqd(s)
    axes = [fibonacci_sphere(cfg.n_beta)]
    rng = np.random.default_rng([cfg.seed, 0x6d71])
    restarts = rng.normal(size=(max(4, cfg.n_beta // 4), 3))
    axes.append(restarts / np.linalg.norm(restarts, axis=1, keepdims=True))
    axes = np.concatenate(axes)
    vals = np.array([_pinched_distance(rho, ax) for ax in axes])
    k = int(np.argmin(vals))
    best_axis, best_val = axes[k], float(vals[k])
    radius = 2.0 * 3.6 / np.sqrt(cfg.n_beta)
    for _ in range(cfg.refine_iters):
        caps = _cap_grid(best_axis, radius, 32)
        cap_vals = np.array([_pinched_distance(rho, ax) for ax in caps])
        k = int(np.argmin(cap_vals))
        if cap_vals[k] < best_val:
            best_val = float(cap_vals[k])
            best_axis = caps[k]
        radius *= 0.2
    return _report(best_val, reference, 1, cfg.seed, cfg.as_dict(),
                   worst_case=f"err={best_val - reference:.3e}",
                   passed=(best_val >= reference - 1e-9))


# ---------------------------------------------------------------------------
# Random inputs

def ginibre_state(rng: np.random.Generator) -> TwoQubitState:
    """Random density matrix G G^dag / tr, G standard complex normal."""
    g = rng.normal(size=(4, 4)) + 1.0j * rng.normal(size=(4, 4))
    rho = g @ g.conj().T
    return TwoQubitState(rho / np.trace(rho).real)


def bounded_purity_state(rng: np.random.Generator,
                         max_purity: float = 0.99) -> TwoQubitState:
    s = ginibre_state(rng)
    while s.purity > max_purity:
        s = ginibre_state(rng)
    return s


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Axis uniform on the sphere, angle uniform on [0, 2pi)."""
    while True:
        v = rng.normal(size=3)
        n = np.linalg.norm(v)
        if n > 1e-12:
            break
    return su2_axis_angle(v / n, rng.uniform(0.0, 2.0 * np.pi))


def random_bell_params(rng: np.random.Generator) -> BellDiagonalParams:
    """Uniform point of the Bell tetrahedron by rejection from the cube."""
    while True:
        c = rng.uniform(-1.0, 1.0, size=3)
        if bell_eigenvalues(*c).min() >= 0.0:
            return BellDiagonalParams(*(float(x) for x in c))


# ---------------------------------------------------------------------------
# Suites

def unital_monotonicity_suite(n_trials: int = 10000, seed: int = 0) -> OracleReport:
    """Random (state, local unital channel pair) trials; the RSP-fidelity
    must never increase beyond 1e-9.  A failed report means an
    implementation bug somewhere, never a valid outcome.
    """
    if n_trials < 1:
        raise ValueError("need at least one trial")
    worst = -np.inf
    worst_idx = -1
    for i in range(n_trials):
        rng = np.random.default_rng([seed, i])
        s = ginibre_state(rng)
        ch_a, ch_b = channels.sample_unital_local(rng)
        before = measures.rsp_fidelity(s)
        after = measures.rsp_fidelity(channels.apply_local(ch_a, ch_b, s))
        if after - before > worst:
            worst = after - before
            worst_idx = i
    return _report(worst, 0.0, n_trials, seed, {"n_trials": int(n_trials)},
                   worst_case=f"max increase {worst:.3e} at trial {worst_idx}",
                   passed=worst <= 1e-9)


def nonunital_increase_witness() -> OracleReport:
    """The (-1,0,0) demonstration: zero fidelity made positive by
    symmetric amplitude damping at the optimal strength."""
    params = (-1.0, 0.0, 0.0)
    before = bell_diagonal(*params)
    p_star = enhancement.p_opt(params)
    ch = channels.amplitude_damping(p_star)
    after = channels.apply_local(ch, ch, before)
    f0 = measures.rsp_fidelity(before)
    f1 = measures.rsp_fidelity(after)
    d0 = measures.gmqd(before)
    d1 = measures.gmqd(after)
    q1v = enhancement.q1(1.0, 0.0)
    reference = 0.5 * q1v * q1v
    ok = (abs(f0) <= 1e-12 and abs(f1 - reference) <= 1e-9 and d1 > d0 + 1e-12)
    return _report(f1, reference, 1, 0, {"p_opt": p_star},
                   worst_case=(f"f {f0:.3g} -> {f1:.9g}, d_g {d0:.3g} -> {d1:.9g}"),
                   passed=ok)


def discord_raising_check() -> OracleReport:
    """The intro example: a zero-discord state gains discord 0.25 under a
    local channel while its RSP-fidelity stays zero."""
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 0.5  # |00><00|
    rho[3, 3] = 0.5  # |11><11|
    before = TwoQubitState(rho)
    after = channels.apply_local(channels.discord_raising(),
                                 channels.identity_channel(), before)
    d0 = measures.gmqd(before)
    d1 = measures.gmqd(after)
    f1 = measures.rsp_fidelity(after)
    ok = (abs(d0) <= 1e-10 and abs(d1 - 0.25) <= 1e-10 and abs(f1) <= 1e-10)
    return _report(d1, 0.25, 1, 0, {},
                   worst_case=f"d_g {d0:.3g} -> {d1:.12g}, f stays {f1:.3g}",
                   passed=ok)


def _named_states():
    singlet = bell_diagonal(-1.0, -1.0, -1.0)
    mixed = bell_diagonal(0.0, 0.0, 0.0)
    demo = bell_diagonal(0.5, 0.0, -0.5)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 0.5
    rho[3, 3] = 0.5
    gap = channels.apply_local(channels.discord_raising(),
                               channels.identity_channel(), TwoQubitState(rho))
    return [("singlet", singlet), ("maximally_mixed", mixed),
            ("bell(0.5,0,-0.5)", demo), ("cq_gap", gap)]


def protocol_suite(n_trials: int = 50, seed: int = 0,
                   cfg: Optional[OracleConfig] = None) -> OracleReport:
    """Protocol oracle over random states plus the named landmark states."""
    cfg = cfg or OracleConfig(seed=seed)
    cases = list(_named_states())
    for i in range(n_trials):
        rng = np.random.default_rng([seed, i])
        cases.append((f"random_{i}", bounded_purity_state(rng)))
    worst_err = -1.0
    worst = None
    for label, state in cases:
        rep = protocol_fidelity_oracle(state, cfg)
        if rep.abs_err > worst_err:
            worst_err = rep.abs_err
            worst = (label, rep)
    label, rep = worst
    return _report(rep.estimate, rep.reference, len(cases), seed, cfg.as_dict(),
                   worst_case=f"worst |err|={worst_err:.3e} on {label}",
                   passed=worst_err <= 5e-3)


def gmqd_suite(n_trials: int = 20, seed: int = 0,
               cfg: Optional[OracleConfig] = None) -> OracleReport:
    """Search oracle over random Bell-diagonal states."""
    if n_trials < 1:
        raise ValueError("need at least one trial")
    cfg = cfg or OracleConfig(seed=seed)
    worst_err = -np.inf
    worst = None
    ok = True
    for i in range(n_trials):
        rng = np.random.default_rng([seed, i])
        state = bell_diagonal(random_bell_params(rng))
        rep = gmqd_search_oracle(state, cfg)
        err = rep.estimate - rep.reference
        if err < -1e-9 or err > 1e-3:
            ok = False
        if abs(err) > worst_err:
            worst_err = abs(err)
            worst = (i, rep)
    i, rep = worst
    return _report(rep.estimate, rep.reference, n_trials, seed, cfg.as_dict(),
                   worst_case=f"worst |err|={worst_err:.3e} at trial {i}",
                   passed=ok)
