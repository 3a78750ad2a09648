"""Schrodinger-picture Gaussian formalism in shot-noise units.

States are mean vectors and covariance matrices over the interleaved
quadrature basis (X1, P1, ..., Xn, Pn).  The commutation convention is
[X, P] = 2i, so the vacuum covariance is the identity matrix and one unit
of shot noise reads as a variance of 1.

All operations are pure: they return new states and never mutate their
inputs, so states can be shared freely across threads and engines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

Quadrature = Literal["x", "p"]

#: tolerance for exact linear-algebra identities (symmetry, symplectic form)
SYMMETRY_TOL = 1e-12

#: tolerance for derived spectral checks (uncertainty principle)
UNCERTAINTY_TOL = 1e-9


def quadrature_index(mode: int, quadrature: Quadrature) -> int:
    """Index of a mode's quadrature in the interleaved (X1, P1, ...) layout."""
    if quadrature not in ("x", "p"):
        raise ValueError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    return 2 * mode + (1 if quadrature == "p" else 0)


def symplectic_form(n_modes: int) -> np.ndarray:
    """Symplectic form Omega for the interleaved quadrature layout."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, one value per mode.

    In shot-noise units the uncertainty principle reads ``nu_k >= 1`` for
    every symplectic eigenvalue ``nu_k``; the vacuum saturates all of them.
    """
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    eigs = np.linalg.eigvals(symplectic_form(n) @ cov)
    # eigenvalues of Omega @ cov come in +/- i*nu pairs
    return np.sort(np.abs(eigs))[::2]


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Gaussian state of n bosonic modes.

    Attributes:
        mean: length-2n vector of quadrature expectation values.
        cov: 2n x 2n covariance matrix in shot-noise units (vacuum = identity).
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.size % 2 != 0:
            raise ValueError("quadrature vector length must be even")
        if cov.shape != (mean.size, mean.size):
            raise ValueError(
                f"covariance shape {cov.shape} does not match mean length {mean.size}"
            )
        if cov.size and np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL:
            raise ValueError("covariance matrix is not symmetric")
        cov = 0.5 * (cov + cov.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def validate(self) -> "GaussianState":
        """Check the uncertainty principle; raise ValueError on violation."""
        if self.n_modes:
            nu_min = symplectic_eigenvalues(self.cov).min()
            if nu_min < 1.0 - UNCERTAINTY_TOL:
                raise ValueError(
                    f"covariance violates the uncertainty principle (nu_min={nu_min!r})"
                )
        return self


def vacuum_state(n_modes: int) -> GaussianState:
    """Vacuum of ``n_modes`` modes: zero mean, identity covariance."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    return GaussianState(np.zeros(2 * n_modes), np.eye(2 * n_modes))


def coherent_state(x: float, p: float) -> GaussianState:
    """Single-mode coherent state with amplitude (x + i p) / 2.

    Displacement moves the mean only; the covariance stays at vacuum level.
    """
    return GaussianState(np.array([x, p], dtype=float), np.eye(2))


def epr_state(r: float) -> GaussianState:
    """Two-mode squeezed (EPR) state with Var(X1+X2) = Var(P1-P2) = 2 e^{-2r}.

    Both single-mode marginals are thermal with variance cosh(2r); the
    anti-correlated combinations Var(X1-X2) = Var(P1+P2) = 2 e^{+2r} carry
    the excess noise.  ``r = 0`` gives two uncorrelated vacua.
    """
    if r < 0:
        raise ValueError("squeezing parameter r must be >= 0")
    c = math.cosh(2 * r)
    s = math.sinh(2 * r)
    cov = np.array(
        [
            [c, 0.0, -s, 0.0],
            [0.0, c, 0.0, s],
            [-s, 0.0, c, 0.0],
            [0.0, s, 0.0, c],
        ]
    )
    return GaussianState(np.zeros(4), cov)


@dataclass(frozen=True, eq=False)
class SymplecticMap:
    """Affine Gaussian map: mean -> S mean + d, cov -> S cov S^T."""

    matrix: np.ndarray
    displacement: np.ndarray | None = None

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
            raise ValueError("matrix must be square with even dimension")
        if self.displacement is None:
            disp = np.zeros(matrix.shape[0])
        else:
            disp = np.array(self.displacement, dtype=float).reshape(-1)
            if disp.size != matrix.shape[0]:
                raise ValueError("displacement length does not match matrix dimension")
        matrix.setflags(write=False)
        disp.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "displacement", disp)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def is_symplectic(self, tol: float = SYMMETRY_TOL) -> bool:
        """True if S Omega S^T = Omega elementwise within ``tol``."""
        omega = symplectic_form(self.n_modes)
        return bool(np.max(np.abs(self.matrix @ omega @ self.matrix.T - omega)) <= tol)


def identity_map(n_modes: int) -> SymplecticMap:
    return SymplecticMap(np.eye(2 * n_modes))


def mixing_map(t_amp: float, r_amp: float) -> SymplecticMap:
    """Two-mode mixer with real (possibly signed) amplitudes.

    Outputs are (t a + r b, -r a + t b) applied identically to the X and P
    quadratures; ``t_amp**2 + r_amp**2`` must be 1.
    """
    if abs(t_amp * t_amp + r_amp * r_amp - 1.0) > 1e-12:
        raise ValueError("amplitudes must satisfy t^2 + r^2 = 1")
    t, r = t_amp, r_amp
    matrix = np.array(
        [
            [t, 0.0, r, 0.0],
            [0.0, t, 0.0, r],
            [-r, 0.0, t, 0.0],
            [0.0, -r, 0.0, t],
        ]
    )
    return SymplecticMap(matrix)


def beamsplitter_map(transmission: float) -> SymplecticMap:
    """Beam splitter with power transmission T and reflectivity 1 - T."""
    if not 0.0 <= transmission <= 1.0:
        raise ValueError("transmission must be in [0, 1]")
    return mixing_map(math.sqrt(transmission), math.sqrt(1.0 - transmission))


def orthogonal_map(weights: np.ndarray) -> SymplecticMap:
    """Passive map applying one real orthogonal matrix to X and P blocks alike."""
    o = np.asarray(weights, dtype=float)
    m = o.shape[0]
    if o.shape != (m, m) or np.max(np.abs(o @ o.T - np.eye(m))) > SYMMETRY_TOL:
        raise ValueError("weights must form a real orthogonal matrix")
    matrix = np.zeros((2 * m, 2 * m))
    matrix[0::2, 0::2] = o
    matrix[1::2, 1::2] = o
    return SymplecticMap(matrix)


def apply_symplectic(
    state: GaussianState, smap: SymplecticMap, modes: Sequence[int]
) -> GaussianState:
    """Apply ``smap`` to the selected modes, acting as identity elsewhere."""
    modes = list(modes)
    if len(modes) != smap.n_modes:
        raise ValueError(
            f"map acts on {smap.n_modes} modes but {len(modes)} indices were given"
        )
    if len(set(modes)) != len(modes):
        raise ValueError("mode indices must be distinct")
    if any(m < 0 or m >= state.n_modes for m in modes):
        raise ValueError("mode index out of range")

    idx = [q for m in modes for q in (2 * m, 2 * m + 1)]
    mean = state.mean.copy()
    cov = state.cov.copy()
    sub = smap.matrix
    mean[idx] = sub @ mean[idx] + smap.displacement
    cov[idx, :] = sub @ cov[idx, :]
    cov[:, idx] = cov[:, idx] @ sub.T
    return GaussianState(mean, cov)


def condition_on_homodyne(
    state: GaussianState, mode: int, quadrature: Quadrature, outcome: float
) -> GaussianState:
    """Conditional state of the remaining modes after an ideal homodyne.

    The measured mode is removed from the register; mean and covariance of
    the rest are updated by Gaussian (Schur-complement) conditioning on the
    measured quadrature's value.  The output covariance is independent of
    ``outcome`` -- only the mean moves.
    """
    if not 0 <= mode < state.n_modes:
        raise ValueError("mode index out of range")
    j = quadrature_index(mode, quadrature)
    s = state.cov[j, j]
    if s <= 0.0:
        raise ValueError("conditioning variance is not positive; covariance corrupted")
    keep = [i for i in range(2 * state.n_modes) if i // 2 != mode]
    sigma_aq = state.cov[keep, j]
    mean = state.mean[keep] + sigma_aq * ((outcome - state.mean[j]) / s)
    cov = state.cov[np.ix_(keep, keep)] - np.outer(sigma_aq, sigma_aq) / s
    return GaussianState(mean, cov)


def sample_homodyne_distribution(
    state: GaussianState, mode: int, quadrature: Quadrature
) -> tuple[float, float]:
    """Marginal (mean, variance) of one quadrature; exact for Gaussian states."""
    if not 0 <= mode < state.n_modes:
        raise ValueError("mode index out of range")
    j = quadrature_index(mode, quadrature)
    return float(state.mean[j]), float(state.cov[j, j])


def reduced_state(state: GaussianState, modes: Sequence[int]) -> GaussianState:
    """Marginal state of the selected modes, in the order given."""
    modes = list(modes)
    if len(set(modes)) != len(modes):
        raise ValueError("mode indices must be distinct")
    if any(m < 0 or m >= state.n_modes for m in modes):
        raise ValueError("mode index out of range")
    idx = [q for m in modes for q in (2 * m, 2 * m + 1)]
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])
