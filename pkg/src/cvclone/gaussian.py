"""Exact Gaussian-state evolution in the symplectic picture.

Conventions, fixed package-wide: quadratures X = (c + c†)/2, Y = (c − c†)/(2i),
so vacuum has covariance I/4 and [X, Y] = i/2. Quadratures are interleaved as
(x1, y1, x2, y2, ...). All operations are pure; states are immutable.

Gate generators and their symplectic actions (sign conventions are pinned by
the truncated-Fock backend, see tests):

  two-mode squeezer  e^{r(ij − i†j†)}:   i → i cosh r − j† sinh r
  beam splitter      e^{θ(i†j − ij†)}:   i → i cos θ + j sin θ,  j → j cos θ − i sin θ
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

_SYMMETRY_TOL = 1e-12
_SYMPLECTIC_TOL = 1e-12


def symplectic_form(n_modes: int) -> np.ndarray:
    """The canonical antisymmetric form for interleaved quadratures."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


@dataclass(frozen=True)
class GaussianState:
    """Mean quadrature vector and covariance matrix for n bosonic modes."""

    n_modes: int
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        if self.n_modes < 1:
            raise InvalidArgumentError("need at least one mode")
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        d = 2 * self.n_modes
        if mean.shape != (d,) or cov.shape != (d, d):
            raise InvalidArgumentError(
                f"mean/cov shape mismatch for {self.n_modes} modes")
        asym = np.abs(cov - cov.T).max()
        if asym > 1e-9:
            raise InvalidArgumentError(f"covariance asymmetry {asym:.2e}")
        if asym > 0:
            cov = 0.5 * (cov + cov.T)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def mode_mean(self, mode: int) -> complex:
        i = 2 * _check_mode(self, mode)
        return complex(self.mean[i], self.mean[i + 1])


@dataclass(frozen=True)
class SymplecticTransform:
    """Affine Gaussian map: state -> (S mean + d, S cov S^T)."""

    matrix: np.ndarray
    displacement: np.ndarray = field(default=None)

    def __post_init__(self):
        s = np.asarray(self.matrix, dtype=float)
        d = s.shape[0]
        if s.shape != (d, d) or d % 2:
            raise InvalidArgumentError("matrix must be square and even-sized")
        disp = (np.zeros(d) if self.displacement is None
                else np.asarray(self.displacement, dtype=float))
        if disp.shape != (d,):
            raise InvalidArgumentError("displacement length mismatch")
        omega = symplectic_form(d // 2)
        err = np.abs(s @ omega @ s.T - omega).max()
        # roundoff in S Omega S^T scales with |S|^2 (cosh/sinh cancellation
        # at large squeeze), so the defect bound must be relative
        scale = max(1.0, float(np.abs(s).max()) ** 2)
        if err > _SYMPLECTIC_TOL * scale:
            raise InvalidArgumentError(
                f"matrix is not symplectic (defect {err:.2e}, "
                f"scale {scale:.2e})")
        object.__setattr__(self, "matrix", s)
        object.__setattr__(self, "displacement", disp)

    @classmethod
    def _trusted(cls, matrix: np.ndarray, displacement: np.ndarray):
        """Wrap a product of validated transforms without re-validating.

        Roundoff in a long composition reflects the intermediate factors'
        magnitudes, which the final matrix no longer reveals, so the defect
        check would need context it cannot have.
        """
        obj = object.__new__(cls)
        object.__setattr__(obj, "matrix", matrix)
        object.__setattr__(obj, "displacement", displacement)
        return obj

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def apply(self, state: GaussianState) -> GaussianState:
        if state.n_modes != self.n_modes:
            raise InvalidArgumentError("mode-count mismatch")
        mean = self.matrix @ state.mean + self.displacement
        cov = self.matrix @ state.cov @ self.matrix.T
        cov = 0.5 * (cov + cov.T)
        return GaussianState(state.n_modes, mean, cov)

    def compose(self, inner: "SymplecticTransform") -> "SymplecticTransform":
        """The map that applies ``inner`` first, then this transform."""
        return SymplecticTransform._trusted(
            self.matrix @ inner.matrix,
            self.matrix @ inner.displacement + self.displacement)

    def inverse(self) -> "SymplecticTransform":
        omega = symplectic_form(self.n_modes)
        inv = -omega @ self.matrix.T @ omega
        return SymplecticTransform._trusted(inv, -(inv @ self.displacement))


def _check_mode(state, mode: int) -> int:
    if not 0 <= mode < state.n_modes:
        raise InvalidArgumentError(f"mode {mode} out of range")
    return mode


def vacuum_state(n_modes: int) -> GaussianState:
    if n_modes < 1:
        raise InvalidArgumentError("need at least one mode")
    return GaussianState(n_modes, np.zeros(2 * n_modes),
                         np.eye(2 * n_modes) / 4.0)


def displace(state: GaussianState, mode: int, alpha: complex) -> GaussianState:
    """Shift one mode's mean by (Re alpha, Im alpha); covariance unchanged."""
    i = 2 * _check_mode(state, mode)
    mean = state.mean.copy()
    mean[i] += np.real(alpha)
    mean[i + 1] += np.imag(alpha)
    return GaussianState(state.n_modes, mean, state.cov)


def two_mode_squeezer(n_modes: int, i: int, j: int, r: float) -> SymplecticTransform:
    """Symplectic matrix of e^{r(ij − i†j†)} acting on modes (i, j)."""
    if i == j:
        raise InvalidArgumentError("squeezer needs two distinct modes")
    s = np.eye(2 * n_modes)
    ch, sh = math.cosh(r), math.sinh(r)
    xi, yi, xj, yj = 2 * i, 2 * i + 1, 2 * j, 2 * j + 1
    s[xi, xi] = ch; s[xi, xj] = -sh
    s[xj, xj] = ch; s[xj, xi] = -sh
    s[yi, yi] = ch; s[yi, yj] = sh
    s[yj, yj] = ch; s[yj, yi] = sh
    return SymplecticTransform(s)


def beam_splitter(n_modes: int, i: int, j: int, angle: float) -> SymplecticTransform:
    """Symplectic matrix of e^{θ(i†j − ij†)} acting on modes (i, j)."""
    if i == j:
        raise InvalidArgumentError("beam splitter needs two distinct modes")
    s = np.eye(2 * n_modes)
    c, sn = math.cos(angle), math.sin(angle)
    for p, q in ((2 * i, 2 * j), (2 * i + 1, 2 * j + 1)):
        s[p, p] = c; s[p, q] = sn
        s[q, q] = c; s[q, p] = -sn
    return SymplecticTransform(s)


def apply_two_mode_squeezer(state: GaussianState, i: int, j: int,
                            r: float) -> GaussianState:
    _check_mode(state, i), _check_mode(state, j)
    return two_mode_squeezer(state.n_modes, i, j, r).apply(state)


def apply_beam_splitter(state: GaussianState, i: int, j: int,
                        angle: float) -> GaussianState:
    _check_mode(state, i), _check_mode(state, j)
    return beam_splitter(state.n_modes, i, j, angle).apply(state)


def reduce(state: GaussianState, keep) -> GaussianState:
    """Gaussian marginal on the given modes (order preserved for sequences)."""
    if isinstance(keep, (set, frozenset)):
        keep = sorted(keep)
    else:
        keep = list(keep)
    if not keep:
        raise InvalidArgumentError("keep set must be nonempty")
    if len(set(keep)) != len(keep):
        raise InvalidArgumentError("repeated mode index")
    for m in keep:
        _check_mode(state, m)
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in keep])
    return GaussianState(len(keep), state.mean[idx],
                         state.cov[np.ix_(idx, idx)])


def quadrature_moments(state: GaussianState, mode: int, phase: float):
    """Mean and variance of cos(phase) X + sin(phase) Y on one mode."""
    i = 2 * _check_mode(state, mode)
    c, s = math.cos(phase), math.sin(phase)
    mean = c * state.mean[i] + s * state.mean[i + 1]
    v = state.cov
    var = (c * c * v[i, i] + 2.0 * c * s * v[i, i + 1]
           + s * s * v[i + 1, i + 1])
    return mean, var


def _overlap_core(state: GaussianState, point: np.ndarray) -> float:
    # det/quadratic form of (cov + I/4) against a phase-space point
    m = state.cov + np.eye(2) / 4.0
    delta = state.mean - point
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    quad = delta @ np.linalg.solve(m, delta)
    return math.exp(-0.5 * quad) / math.sqrt(det)


def fidelity_with_coherent(state: GaussianState, alpha: complex) -> float:
    """<alpha| rho |alpha> for a single-mode Gaussian rho."""
    if state.n_modes != 1:
        raise InvalidArgumentError("fidelity_with_coherent needs a single mode")
    point = np.array([np.real(alpha), np.imag(alpha)])
    return 0.5 * _overlap_core(state, point)


def husimi_q(state: GaussianState, z: complex) -> float:
    """(1/pi) <z| rho |z>; integrates to 1 over the complex plane."""
    if state.n_modes != 1:
        raise InvalidArgumentError("husimi_q needs a single mode")
    point = np.array([np.real(z), np.imag(z)])
    return _overlap_core(state, point) / (2.0 * math.pi)
