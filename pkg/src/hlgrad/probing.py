"""Probing states over G_p^M and their two preparation models.

The probing state at iteration q carries one register per observable, with
per-register linear phases exp(2*pi*i*2^p*x_j*g_j) whose effective gradient
g_j = 2^q (<O_j> - u_j)/pi amplifies the current estimation errors.  Two
fidelity models are supported besides the exact one:

* Hamiltonian simulation: phases stay exactly linear, but the preparation
  carries an eps''/delta' error budget that is folded into a worst-case
  outcome corruption rate (<= 1/12).
* Grover-like repetition: the amplitudes are an entrywise Chebyshev
  transform cos(t*arccos(.)) of the rescaled linear phase function over
  G_p^M x G_1; the extra 1-qubit register absorbs the phase-sign ambiguity
  and is removed by an inverse grid QFT plus a conditional index reversal.

Everything here is at the eigenvalue/amplitude level: observables enter
only through their expectation values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Union

import numpy as np

from .grids import grid_points, linear_phase_outcome_dist, qft_grid

__all__ = [
    "Ideal",
    "HamiltonianSim",
    "GroverRepetition",
    "ProbingModel",
    "ProbingSpec",
    "AmplitudeState",
    "GroverStateResult",
    "effective_gradients",
    "probing_state",
    "ideal_sampler",
    "corrupted_sampler",
    "grover_state",
    "sign_correction",
    "sign_correction_full",
    "hs_error_budget",
    "arccos_linearity_gap",
    "euclidean_distance",
]

_MAX_EXACT_QUBITS = 24


@dataclass(frozen=True)
class Ideal:
    """Exact linear phases, no preparation error."""


@dataclass(frozen=True)
class HamiltonianSim:
    """Linear phases plus the eps''/delta' preparation error budget."""

    eps2: float = 2.0**-14
    deltap: float = 2.0**-10

    def __post_init__(self):
        if not (0 < self.eps2 < 1 and 0 < self.deltap < 1):
            raise ValueError("eps2 and deltap must lie in (0, 1)")


@dataclass(frozen=True)
class GroverRepetition:
    """Chebyshev/arccos amplitudes with a 1-qubit sign-correction register.

    sigmap is the (already ceiled) rescaling factor sqrt(2(M+1) ln(2d/delta')),
    and l shifts the constant observable on the sign register; l is kept in
    the range where the shifted observable still fits a valid encoding,
    i.e. 2 pi |1/4 + 4l| / 2^p <= 1.
    """

    deltap: float = 2.0**-14
    l: int = 0
    sigmap: int = 1

    def __post_init__(self):
        if not 0 < self.deltap < 1:
            raise ValueError("deltap must lie in (0, 1)")
        if self.sigmap < 1:
            raise ValueError("sigmap must be a positive integer")

    @classmethod
    def for_dimensions(cls, M: int, d: int, deltap: float = 2.0**-14, l: int = 0) -> "GroverRepetition":
        sigmap = math.ceil(math.sqrt(2 * (M + 1) * math.log(2 * d / deltap)))
        return cls(deltap=deltap, l=l, sigmap=sigmap)

    def valid_l(self, p: int, q: int) -> int:
        """Largest-|l| value not exceeding self.l that keeps the encoding valid."""
        l = self.l
        while l != 0 and 2 * np.pi * abs(0.25 + 4 * l) / 2**p > 1:
            l -= int(np.sign(l))
        return l


ProbingModel = Union[Ideal, HamiltonianSim, GroverRepetition]


@dataclass(frozen=True)
class ProbingSpec:
    """Inputs defining one probing state: registers, iteration, and values."""

    q: int
    u_tilde: np.ndarray
    g_true: np.ndarray
    p: int = 3

    def __post_init__(self):
        u = np.atleast_1d(np.asarray(self.u_tilde, dtype=float))
        g = np.atleast_1d(np.asarray(self.g_true, dtype=float))
        object.__setattr__(self, "u_tilde", u)
        object.__setattr__(self, "g_true", g)
        if u.shape != g.shape or u.ndim != 1:
            raise ValueError("u_tilde and g_true must be 1-d arrays of equal length")
        if np.any(np.abs(u) > 1) or np.any(np.abs(g) > 1):
            raise ValueError("all entries of u_tilde and g_true must lie in [-1, 1]")
        if self.q < 0 or self.p < 1:
            raise ValueError("q must be >= 0 and p >= 1")

    @property
    def M(self) -> int:
        return len(self.g_true)


@dataclass(frozen=True)
class AmplitudeState:
    """Dense amplitudes over a product of grid registers."""

    p_per_register: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        dim = int(np.prod([2**p for p in self.p_per_register]))
        if len(self.amplitudes) != dim:
            raise ValueError("amplitude length does not match register dimensions")
        if abs(np.linalg.norm(self.amplitudes) - 1.0) > 1e-10:
            raise ValueError("amplitudes must be normalized")

    @property
    def num_registers(self) -> int:
        return len(self.p_per_register)


def effective_gradients(spec: ProbingSpec) -> np.ndarray:
    """Per-register gradient 2^q (g_j - u_j)/pi carried by the probing phase."""
    return 2**spec.q * (spec.g_true - spec.u_tilde) / np.pi


def probing_state(spec: ProbingSpec) -> AmplitudeState:
    """The exact probing state as a tensor product of linear-phase registers."""
    if spec.p * spec.M > _MAX_EXACT_QUBITS:
        raise ValueError(f"exact amplitudes limited to {_MAX_EXACT_QUBITS} qubits")
    pts = grid_points(spec.p)
    geff = effective_gradients(spec)
    regs = [np.exp(2j * np.pi * 2**spec.p * g * pts) / np.sqrt(2**spec.p) for g in geff]
    return AmplitudeState((spec.p,) * spec.M, reduce(np.kron, regs))


def _sample_indices(pmfs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF sampling; pmfs has shape (M, n), output (shots, M) indices."""
    cum = np.cumsum(pmfs, axis=1)
    u = rng.random((shots, pmfs.shape[0]))
    return (u[:, :, None] >= cum[None, :, :]).sum(axis=2)


def ideal_sampler(spec: ProbingSpec, shots: int, rng_seed) -> np.ndarray:
    """Draw measurement outcomes (shots x M grid values), coordinates independent.

    Coordinate j follows the exact Fourier-readout distribution at gradient
    g_j = 2^q (g_true_j - u_j)/pi; the distribution is 1-periodic in the
    gradient, so out-of-window gradients wrap exactly as the phases do.
    """
    rng = np.random.default_rng(rng_seed)
    pts = grid_points(spec.p)
    pmfs = np.stack([linear_phase_outcome_dist(spec.p, g).pmf for g in effective_gradients(spec)])
    return pts[_sample_indices(pmfs, shots, rng)]


def corrupted_sampler(spec: ProbingSpec, shots: int, corruption: float, rng_seed) -> np.ndarray:
    """Ideal samples with a worst-case total-variation shift of size `corruption`.

    Each shot is replaced, with probability `corruption`, by the adversarial
    outcome vector whose coordinate j is the grid point farthest from the
    effective gradient g_j.  This dominates any <= `corruption` Euclidean
    preparation error in the failure-probability sense.
    """
    if not 0 <= corruption <= 1 / 12:
        raise ValueError("corruption must lie in [0, 1/12]")
    rng = np.random.default_rng(rng_seed)
    pts = grid_points(spec.p)
    geff = effective_gradients(spec)
    pmfs = np.stack([linear_phase_outcome_dist(spec.p, g).pmf for g in geff])
    samples = pts[_sample_indices(pmfs, shots, rng)]
    if corruption > 0:
        # wrap the gradient into the outcome window before taking distances
        gwrap = (geff + 0.5) % 1.0 - 0.5
        worst = pts[np.argmax(np.abs(pts[None, :] - gwrap[:, None]), axis=1)]
        mask = rng.random(shots) < corruption
        samples[mask] = worst
    return samples


@dataclass(frozen=True)
class GroverStateResult:
    state: AmplitudeState
    n_t: float
    success_prob: float
    within_arccos_domain: bool


def grover_state(spec: ProbingSpec, model: GroverRepetition) -> GroverStateResult:
    """Chebyshev-transformed amplitudes over G_p^M x G_1 before sign correction.

    Amplitudes are proportional to T_t(f(x, y)) with the rescaled linear
    phase function f(x, y) = (y <O_{M+1}> + sum_j x_j (g_j - u_j)/2) / sigma'
    and t = 2^(p+q+2) sigma'.  n_t is the norm of the unnormalized vector
    divided by sqrt(2^(pM)); the post-selection succeeds with n_t^2/2.
    Arguments of T_t leaving the |f| <= 1/4 linearity region are flagged,
    not fatal; |f| > 1 is clamped (a block of a unitary cannot exceed 1).
    """
    p, q, M = spec.p, spec.q, spec.M
    if p * M + 1 > _MAX_EXACT_QUBITS:
        raise ValueError(f"exact amplitudes limited to {_MAX_EXACT_QUBITS} qubits")
    sigmap = model.sigmap
    t = 2 ** (p + q + 2) * sigmap
    l = model.valid_l(p, q)
    o_sign = np.pi * (0.25 + 4 * l) / 2 ** (p + q)

    pts = grid_points(p)
    o_shift = (spec.g_true - spec.u_tilde) / 2
    shape = (2**p,) * M + (2,)
    f = np.zeros(shape)
    for j in range(M):
        axis_shape = [1] * (M + 1)
        axis_shape[j] = 2**p
        f += (pts * o_shift[j]).reshape(axis_shape)
    f += (grid_points(1) * o_sign).reshape([1] * M + [2])
    f /= sigmap

    within = bool(np.max(np.abs(f)) <= 0.25)
    vec = np.cos(t * np.arccos(np.clip(f, -1.0, 1.0))).reshape(-1)
    n_t = float(np.linalg.norm(vec) / np.sqrt(2 ** (p * M)))
    state = AmplitudeState((p,) * M + (1,), (vec / np.linalg.norm(vec)).astype(complex))
    return GroverStateResult(state, n_t, n_t**2 / 2, within)


def sign_correction_full(state: AmplitudeState) -> AmplitudeState:
    """Unitary part of the sign correction, keeping the 1-qubit register.

    Applies the inverse grid QFT on the last register, then the index
    reversal x -> -x on the leading registers conditioned on the last
    register reading index 0 (grid point -1/4).
    """
    if state.p_per_register[-1] != 1:
        raise ValueError("last register must be a single qubit")
    amp = state.amplitudes.reshape(-1, 2).copy()
    amp = amp @ qft_grid(1).conj()
    amp[:, 0] = amp[::-1, 0]
    return AmplitudeState(state.p_per_register, amp.reshape(-1))


def sign_correction(state: AmplitudeState) -> AmplitudeState:
    """Sign-corrected probing-state estimate over G_p^M only.

    After the unitary part the 1-qubit register ends (approximately) in
    |+>; it is post-selected on |+> and the remainder renormalized.
    """
    amp = sign_correction_full(state).amplitudes.reshape(-1, 2)
    v = (amp[:, 0] + amp[:, 1]) / np.sqrt(2)
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        raise ValueError("post-selection on |+> has vanishing weight")
    return AmplitudeState(state.p_per_register[:-1], v / norm)


def hs_error_budget(p: int, q: int, sigma: float, eps2: float, deltap: float) -> float:
    """Euclidean-distance budget eps'' + sqrt(2 eps'') + sqrt(5 delta').

    The first two terms come from the approximate time-evolution block, the
    last from evolving the mismatched phase function with eps' = sqrt(delta')/t
    at t = 2^(p+q+2) sigma; p, q, sigma fix that choice but cancel from the
    final expression.  Callers assert < 1/12 with the production constants.
    """
    if not (0 <= eps2 < 1 and 0 <= deltap < 1):
        raise ValueError("eps2 and deltap must lie in [0, 1)")
    if p < 1 or q < 0 or sigma <= 0:
        raise ValueError("require p >= 1, q >= 0, sigma > 0")
    return eps2 + math.sqrt(2 * eps2) + math.sqrt(5 * deltap)


def arccos_linearity_gap(x: float) -> float:
    """|arccos(x) - pi/2 + x|, valid for |x| <= 1/4 where it is <= |x|^3/5."""
    if abs(x) > 0.25:
        raise ValueError("arccos linearity gap is only bounded for |x| <= 1/4")
    return abs(math.acos(x) - np.pi / 2 + x)


def euclidean_distance(a: AmplitudeState, b: AmplitudeState) -> float:
    if a.p_per_register != b.p_per_register:
        raise ValueError("states live on different register layouts")
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))
