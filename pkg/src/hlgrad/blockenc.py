"""Matrix-level anchors for the block-encoding constructions.

Small dense checks that pin down the unitary-dilation facts the estimation
routes rely on: the two-ancilla shift circuit whose top-left block realizes
(O - u I)/2, the matrix-Hoeffding bound on how often a random grid
combination of observables exceeds the amplification window, Chebyshev
transforms acting entrywise on diagonal arguments, and the eigenstate phase
reduction <psi| exp(-2 i x O) |psi> = exp(-2 i x g).  Dimensions are capped
at 16: these are correctness anchors, not performance paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .grids import grid_points

__all__ = [
    "DenseObservable",
    "BlockEncoding",
    "lcu_shift_encode",
    "subset_fraction",
    "chebyshev_diagonal",
    "eigenphase_oracle_check",
    "lcu_corpus_max_error",
    "arccos_scan_max_ratio",
]

_MAX_DIM = 16


@dataclass(frozen=True)
class DenseObservable:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        dim = m.shape[0]
        if dim > _MAX_DIM or dim < 1 or (dim & (dim - 1)) != 0:
            raise ValueError(f"dimension must be a power of 2 at most {_MAX_DIM}")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("matrix must be Hermitian")
        if np.linalg.norm(m, 2) > 1 + 1e-12:
            raise ValueError("spectral norm must not exceed 1")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class BlockEncoding:
    ancilla_count: int
    unitary: np.ndarray
    alpha: float
    eps: float

    def block(self, dim: int) -> np.ndarray:
        """Top-left dim x dim block <0...0| U |0...0> of the system register."""
        return self.unitary[:dim, :dim]


def _dilation(O: np.ndarray) -> np.ndarray:
    """1-ancilla unitary dilation [[O, S], [S, -O]] with S = sqrt(I - O^2)."""
    dim = O.shape[0]
    vals, vecs = np.linalg.eigh(O)
    s = vecs @ np.diag(np.sqrt(np.clip(1 - vals**2, 0, None))) @ vecs.conj().T
    return np.block([[O, s], [s, -O]])


def _ry(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]])


def lcu_shift_encode(O: DenseObservable, u: float) -> BlockEncoding:
    """Two-extra-ancilla circuit whose top-left block is (O - u I)/2.

    A theta-rotation ancilla selects between the dilated observable and the
    constant -sgn(u), with theta = 2 atan(sqrt|u|); a second ancilla rotated
    by phi = 2 atan(sqrt(4 - (1+|u|)^2)/(1+|u|)) supplies the overall 1/2
    normalization.  The observable itself enters through its exact 1-ancilla
    dilation.
    """
    if abs(u) > 1:
        raise ValueError("shift u must lie in [-1, 1]")
    d = O.dim
    theta = 2 * np.arctan(np.sqrt(abs(u)))
    phi = 2 * np.arctan(np.sqrt(4 - (1 + abs(u)) ** 2) / (1 + abs(u)))
    b = _dilation(O.matrix)  # acts on (dilation ancilla x system), dim 2d
    # the selected branch applies -sgn(u); at u = 0 its amplitude vanishes
    sgn = -1.0 if u >= 0 else 1.0
    eye2d = np.eye(2 * d)

    # registers: (phi ancilla) x (theta ancilla) x (dilation ancilla x system)
    pre = np.kron(np.kron(_ry(phi), _ry(theta)), eye2d)
    ctrl0_b = np.kron(np.diag([1.0, 0.0]), b) + np.kron(np.diag([0.0, 1.0]), sgn * eye2d)
    mid = np.kron(np.eye(2), ctrl0_b)
    post = np.kron(np.kron(np.eye(2), _ry(-theta)), eye2d)
    unitary = post @ mid @ pre

    target = (O.matrix - u * np.eye(d)) / 2
    eps = float(np.linalg.norm(unitary[:d, :d] - target, 2))
    return BlockEncoding(ancilla_count=3, unitary=unitary, alpha=1.0, eps=eps)


def subset_fraction(
    observables: list,
    p: int,
    gamma: float,
    n_mc: int,
    delta_p: float,
    rng_seed=0,
) -> float:
    """Monte-Carlo estimate of Pr_x[ ||M^-1 sum_j x_j O_j|| >= 1/(2 gamma) ].

    x is uniform on G_p^M.  With gamma = M/sigma and sigma from the matrix
    Hoeffding bound this fraction is at most delta_p.
    """
    mats = np.stack([np.asarray(o.matrix, dtype=complex) for o in observables])
    M = len(observables)
    rng = np.random.default_rng(rng_seed)
    pts = grid_points(p)
    exceed = 0
    chunk = 4096
    done = 0
    while done < n_mc:
        b = min(chunk, n_mc - done)
        xs = pts[rng.integers(0, 2**p, size=(b, M))]
        h = np.einsum("bj,jkl->bkl", xs, mats) / M
        norms = np.max(np.abs(np.linalg.eigvalsh(h)), axis=1)
        exceed += int(np.sum(norms >= 1 / (2 * gamma)))
        done += b
    return exceed / n_mc


def chebyshev_diagonal(values: np.ndarray, t: int) -> np.ndarray:
    """Entrywise Chebyshev transform T_t on a diagonal argument in [-1, 1].

    Uses the stable identity cos(t arccos x); the three-term recurrence
    drifts beyond t ~ 1e3 in double precision and is kept to the tests.
    """
    v = np.asarray(values, dtype=float)
    if np.any(np.abs(v) > 1):
        raise ValueError("all values must lie in [-1, 1]")
    if t < 0:
        raise ValueError("degree must be nonnegative")
    return np.cos(t * np.arccos(v))


def lcu_corpus_max_error(n_cases: int, rng_seed=0) -> float:
    """Worst block error of the shift encoding over random (O, u) cases."""
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for _ in range(n_cases):
        dim = int(rng.choice([2, 4, 8]))
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        h = (a + a.conj().T) / 2
        h = h / max(1.0, np.linalg.norm(h, 2))
        enc = lcu_shift_encode(DenseObservable(h), float(rng.uniform(-1, 1)))
        worst = max(worst, enc.eps)
    return worst


def arccos_scan_max_ratio(n_points: int) -> float:
    """max over [-1/4, 1/4] of |arccos(x) - pi/2 + x| / (|x|^3/5)."""
    xs = np.linspace(-0.25, 0.25, n_points)
    xs = xs[np.abs(xs) > 1e-6]
    gaps = np.abs(np.arccos(xs) - np.pi / 2 + xs)
    return float(np.max(gaps / (np.abs(xs) ** 3 / 5)))


def eigenphase_oracle_check(g: float, x: float = 1.0) -> complex:
    """<psi| exp(-2 i x O) |psi> for a 1-qubit O with O|psi> = g|psi>.

    Computed by dense matrix exponential; equals exp(-2 i x g), anchoring
    the sine reduction of the baseline response function.
    """
    if abs(g) > 1:
        raise ValueError("|g| must not exceed 1")
    O = np.diag([g, -g])
    psi = np.array([1.0, 0.0])
    return complex(psi @ expm(-2j * x * O) @ psi)
