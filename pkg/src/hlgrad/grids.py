"""Symmetric binary grids and their Fourier readout statistics.

A p-qubit register is read out over the grid

    G_p = { mu/2^p - 1/2 + 1/2^(p+1) : mu = 0, ..., 2^p - 1 },

i.e. 2^p points symmetric about 0 with spacing 1/2^p.  A register holding
relative phases exp(2*pi*i*2^p*g*x) over x in G_p, measured in the grid
Fourier basis, yields an outcome k in G_p concentrated near g.  This module
provides the grid, the grid Fourier transform, the exact outcome
distribution and its tail mass, and the sine-amplitude input state that
saturates the 1/t mean-squared-error scaling.

All distances between outcomes and targets are plain absolute differences,
not circular: every caller keeps |g| <= 1/3 while outcomes lie in
[-1/2, 1/2], so wrap-around never matters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "GridRegister",
    "OutcomeDistribution",
    "SineState",
    "grid_points",
    "qft_grid",
    "linear_phase_outcome_dist",
    "tail_probability",
    "sine_state",
    "sine_state_mse_check",
]

_MAX_P_GRID = 20
_MAX_P_DENSE = 12


def grid_points(p: int) -> np.ndarray:
    """Return the 2^p points of G_p in index (mu-ascending) order."""
    if not isinstance(p, (int, np.integer)) or not 1 <= p <= _MAX_P_GRID:
        raise ValueError(f"p must be an integer in [1, {_MAX_P_GRID}], got {p!r}")
    mu = np.arange(2**p)
    return mu / 2**p - 0.5 + 0.5 / 2**p


@dataclass(frozen=True)
class GridRegister:
    """A p-qubit readout register together with its grid G_p."""

    p: int
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "points", grid_points(self.p))

    @property
    def size(self) -> int:
        return 2**self.p

    def point_of_index(self, mu: int) -> float:
        """The bijection mu -> x between computational indices and grid points."""
        return float(self.points[mu])

    def index_of_point(self, x: float) -> int:
        """Inverse bijection; x must be a grid point up to float round-off."""
        mu = int(round((x + 0.5 - 0.5 / 2**self.p) * 2**self.p))
        if not 0 <= mu < self.size or abs(self.points[mu] - x) > 1e-9:
            raise ValueError(f"{x} is not a point of G_{self.p}")
        return mu


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact pmf over the outcomes of a single grid register."""

    register: GridRegister
    pmf: np.ndarray

    def __post_init__(self):
        if len(self.pmf) != self.register.size:
            raise ValueError("pmf length must equal 2^p")
        total = float(np.sum(self.pmf))
        if abs(total - 1.0) > 1e-12 or np.any(np.asarray(self.pmf) < -1e-15):
            raise ValueError(f"pmf must be nonnegative and sum to 1, sums to {total}")


def qft_grid(p: int) -> np.ndarray:
    """Dense grid Fourier transform, entry (k, x) = 2^(-p/2) exp(2*pi*i*2^p*x*k).

    Rows and columns are indexed by grid points in mu-ascending order, the
    same ordering as grid_points.  Unitary; equals the standard QFT up to
    conjugation by a tensor product of single-qubit diagonal phases.
    """
    if not isinstance(p, (int, np.integer)) or not 1 <= p <= _MAX_P_DENSE:
        raise ValueError(f"p must be an integer in [1, {_MAX_P_DENSE}] for dense matrices")
    x = grid_points(p)
    return np.exp(2j * np.pi * 2**p * np.outer(x, x)) / np.sqrt(2**p)


def _dirichlet_kernel(p: int, delta: np.ndarray) -> np.ndarray:
    """|2^-p sum_{x in G_p} exp(2*pi*i*2^p*x*delta)| via the closed geometric sum.

    The sum telescopes to sin(pi*N*delta) / (N*sin(pi*delta)) in magnitude,
    N = 2^p, with limit 1 when delta is an integer.
    """
    n = 2**p
    num = np.sin(np.pi * n * delta)
    den = n * np.sin(np.pi * delta)
    den_zero = np.abs(den) < 1e-12
    # n*delta integral while delta is not: the numerator is exactly 0
    num_zero = (np.abs(n * delta - np.round(n * delta)) < 1e-9) & ~den_zero
    out = np.empty_like(np.asarray(delta, dtype=float))
    ok = ~den_zero & ~num_zero
    out[ok] = np.abs(num[ok] / den[ok])
    out[num_zero] = 0.0
    out[den_zero] = 1.0
    return out


def linear_phase_outcome_dist(p: int, g: float) -> OutcomeDistribution:
    """Fourier-basis measurement statistics of a linear-phase register.

    Pr[k] = |2^-p sum_{x in G_p} exp(2*pi*i*2^p*x*(g - k))|^2 for k in G_p.
    1-periodic in g; callers keep |g| <= 1/2 (typically |g| <= 1/3).
    """
    reg = GridRegister(p)
    pr = _dirichlet_kernel(p, g - reg.points) ** 2
    pr = pr / np.sum(pr)  # removes O(1e-16) round-off; the exact sum is 1
    return OutcomeDistribution(reg, pr)


def tail_probability(p: int, g: float, threshold: float) -> float:
    """Total mass of outcomes k with |k - g| > threshold (plain distance)."""
    dist = linear_phase_outcome_dist(p, g)
    mask = np.abs(dist.register.points - g) > threshold
    return float(np.sum(dist.pmf[mask]))


@dataclass(frozen=True)
class SineState:
    """Register input with amplitudes a_k = sqrt(2/2^p) sin(k*pi/2^p), a_0 = 0."""

    register: GridRegister
    amplitudes: np.ndarray

    def __post_init__(self):
        if abs(np.linalg.norm(self.amplitudes) - 1.0) > 1e-12:
            raise ValueError("sine state must have unit norm")
        if abs(self.amplitudes[0]) > 0:
            raise ValueError("sine state must vanish at index 0")


def sine_state(p: int) -> SineState:
    reg = GridRegister(p)
    k = np.arange(reg.size)
    amp = np.sqrt(2 / 2**p) * np.sin(k * np.pi / 2**p)
    return SineState(reg, amp)


def sine_state_mse_check(p: int) -> dict:
    """Minimum eigenvalue of the cosine-loss quadratic form and MSE proxies.

    The wrap-around-aware error proxy E[(k - g')^2] ~ (1/2 pi^2)(1 - E[cos
    2 pi (k - g')]) becomes, for real input amplitudes with a_0 = 0, the
    quadratic form of the tridiagonal matrix A (diagonal 1, off-diagonal
    -1/2, dimension 2^p - 1).  Its minimum eigenvalue 2 sin^2(pi/2^(p+1))
    ~ (pi/2^(p+1))^2 is attained by the sine amplitudes, which is the 1/t^2
    scaling; the uniform input instead leaves 1 - E[cos] = 2/2^p in the
    worst case over g', i.e. only 1/t.
    """
    if not 2 <= p <= _MAX_P_DENSE:
        raise ValueError(f"p must be in [2, {_MAX_P_DENSE}]")
    dim = 2**p - 1
    diag = np.ones(dim)
    off = -0.5 * np.ones(dim - 1)
    eigvals = eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, 0))
    lam_min = float(eigvals[0])
    state = sine_state(p)
    a = state.amplitudes[1:]
    quad = a @ (diag * a) + 2 * (off * a[:-1] * a[1:]).sum()
    return {
        "min_eigenvalue": lam_min,
        "proxy_mse_sine": quad / (2 * np.pi**2),
        "proxy_mse_uniform_worst": (2 / 2**p) / (2 * np.pi**2),
    }
