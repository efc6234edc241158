"""The three-amplifier cloning network.

The machine is a chain of two-mode interactions on modes (c, a, b): a pair
squeezer on (a, b), a pair squeezer on (b, c), then a second pair squeezer on
(a, b), with strengths tied together by one knob ``lam``. For the symmetric
preparation the first stage also absorbs the twin-beam squeeze atanh(1/3).
Increasing ``lam`` drives both clones toward the optimal 1/4-plus-1/4 added
noise of a joint quadrature measurement.

Stage strengths for symmetric preparation (sigma = 1):

    stage 1: C on (a, b), strength atanh(1/3) - lam
    stage 2: A on (b, c), strength 2 exp(-lam)
    stage 3: C on (a, b), strength lam

For sigma != 1 the preparation is not a pure pair squeeze, so stage 1 carries
only -lam and the preparation state is supplied explicitly by
``preparation_state``; clones then carry noise sigma^2/4 in X and 1/(4 sigma^2)
in Y.
"""

from __future__ import annotations

import functools
import math
from collections import namedtuple
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import fock, gaussian
from .errors import InvalidArgumentError
from .fock import TWIN_BEAM_SQUEEZE

LAMBDA_CAP = 12.0
SIGMA_RANGE = (0.25, 4.0)

Stage = namedtuple("Stage", "kind modes strength")


@dataclass(frozen=True)
class CloningNetworkSpec:
    """Gate sequence of the cloner, parameterized by lam (and sigma)."""

    lam: float
    sigma: float
    stages: tuple

    @property
    def prep_absorbed(self) -> bool:
        """True when stage 1 already contains the preparation squeeze."""
        return self.sigma == 1.0


@dataclass(frozen=True)
class CloneResult:
    """Network output plus its single-mode restrictions."""

    backend: str
    state: object
    clone_c: object
    clone_a: object
    ancilla_b: object


def network_from_lambda(lam: float, sigma: float = 1.0) -> CloningNetworkSpec:
    if not 0.0 < lam <= LAMBDA_CAP:
        raise InvalidArgumentError(f"lam must lie in (0, {LAMBDA_CAP}]")
    if sigma <= 0:
        raise InvalidArgumentError("sigma must be positive")
    if sigma != 1.0 and not SIGMA_RANGE[0] <= sigma <= SIGMA_RANGE[1]:
        raise InvalidArgumentError(
            f"sigma outside supported range {SIGMA_RANGE}")
    s1 = (TWIN_BEAM_SQUEEZE - lam) if sigma == 1.0 else -lam
    stages = (Stage("C", (1, 2), s1),
              Stage("A", (2, 0), 2.0 * math.exp(-lam)),
              Stage("C", (1, 2), lam))
    return CloningNetworkSpec(float(lam), float(sigma), stages)


def gains(spec: CloningNetworkSpec):
    """Amplifier gains cosh^2 of the three stage strengths.

    For sigma = 1 these are cosh^2(lam - atanh(1/3)), cosh^2(2 e^-lam) and
    cosh^2(lam). For sigma != 1 stage 1 excludes the preparation (its strength
    is -lam), and the reported G1 reflects the stage as built.
    """
    g = tuple(math.cosh(st.strength) ** 2 for st in spec.stages)
    return g


def _sigma_prep_fock_raw(sigma: float, truncation: int, nodes: int) -> np.ndarray:
    """Two-mode preparation amplitudes chi[na, nb] for general sigma.

    Built by integrating the displacement kernel against the Gaussian weight
    f(z) = sqrt(2/pi) exp(-Re^2 z / sigma^2 - sigma^2 Im^2 z) on a
    Gauss-Hermite grid, then normalizing (the continuous kernel is built from
    unnormalizable eigenstates, so no closed-form normalization exists).
    """
    from . import _kernels

    grid, wts = np.polynomial.hermite.hermgauss(nodes)
    u, v = np.meshgrid(grid, grid, indexing="ij")
    zs = (sigma * u + 1j * v / sigma).ravel()
    weights = np.outer(wts, wts).ravel()
    disp = _kernels.displacement_columns_batch(zs, truncation, truncation)
    chi = np.einsum("b,bmn->mn", weights, disp)
    chi *= np.where(np.arange(truncation) % 2 == 0, 1.0, -1.0)[None, :]
    chi /= np.linalg.norm(chi)
    return chi


@functools.lru_cache(maxsize=32)
def _sigma_prep_cached(sigma: float, truncation: int, nodes: int):
    chi = _sigma_prep_fock_raw(sigma, truncation, nodes)
    vec = fock.FockVector((truncation, truncation), chi.ravel())
    # measured first and second quadrature moments, for the moment-matched
    # Gaussian twin of the numeric state
    d = truncation
    ann = np.diag(np.sqrt(np.arange(1.0, d)), 1)
    eye = np.eye(d)
    ops = []
    for low in (np.kron(ann, eye), np.kron(eye, ann)):
        ops.append(0.5 * (low + low.conj().T))            # X
        ops.append(0.5j * (low.conj().T - low))           # Y
    flat = chi.ravel()
    mean = np.array([np.real(flat.conj() @ (op @ flat)) for op in ops])
    cov = np.empty((4, 4))
    vecs = [op @ flat for op in ops]
    for i in range(4):
        for j in range(4):
            sym = 0.5 * (np.vdot(vecs[i], vecs[j]) + np.vdot(vecs[j], vecs[i]))
            cov[i, j] = np.real(sym) - mean[i] * mean[j]
    state = gaussian.GaussianState(2, mean, 0.5 * (cov + cov.T))
    return vec, state


def sigma_prep_covariance(sigma: float) -> np.ndarray:
    """Closed-form covariance of the general-width preparation.

    Pure by construction: the X-block eigenvalues are sigma^2/2 and
    sigma^2/8, the Y-block ones their reciprocals over 4, so det(4V) = 1.
    Validated against the numerically built Fock state (the moment-matched
    twin converges to this matrix as truncation and node count grow).
    """
    s2 = float(sigma) ** 2
    cov = np.zeros((4, 4))
    cov[0, 0] = cov[2, 2] = 5.0 * s2 / 16.0
    cov[1, 1] = cov[3, 3] = 5.0 / (16.0 * s2)
    cov[0, 2] = cov[2, 0] = -3.0 * s2 / 16.0
    cov[1, 3] = cov[3, 1] = 3.0 / (16.0 * s2)
    return cov


def preparation_state(sigma: float, backend: str = "gaussian",
                      truncation: int = 20, nodes: int = 61):
    """Entangled two-mode preparation on (a, b).

    sigma = 1 is the twin beam with tanh parameter 1/3 (exact in both
    backends); other sigma values use the closed-form covariance for the
    symplectic backend and a numerically built Fock vector otherwise.
    """
    if sigma <= 0:
        raise InvalidArgumentError("sigma must be positive")
    if sigma != 1.0 and not SIGMA_RANGE[0] <= sigma <= SIGMA_RANGE[1]:
        raise InvalidArgumentError(
            f"sigma outside supported range {SIGMA_RANGE}")
    if backend == "gaussian":
        # sigma = 1 reduces to the twin-beam dyadics, which the closed form
        # carries as exact machine numbers (the squeezer product is 1 ulp off)
        return gaussian.GaussianState(2, np.zeros(4),
                                      sigma_prep_covariance(sigma))
    if backend == "fock":
        if sigma == 1.0:
            n = np.arange(truncation)
            coeff = math.sqrt(8.0 / 9.0) * (-1.0 / 3.0) ** n
            chi = np.zeros((truncation, truncation), np.complex128)
            chi[n, n] = coeff
            chi /= np.linalg.norm(chi)
            return fock.FockVector((truncation, truncation), chi.ravel())
        return _sigma_prep_cached(float(sigma), truncation, nodes)[0]
    raise InvalidArgumentError(f"unknown backend {backend!r}")


def _network_transform(spec: CloningNetworkSpec) -> gaussian.SymplecticTransform:
    kind_builder = {
        "A": gaussian.two_mode_squeezer,
        "C": gaussian.two_mode_squeezer,
        "B": gaussian.beam_splitter,
    }
    total = gaussian.SymplecticTransform(np.eye(6))
    for st in spec.stages:
        gate = kind_builder[st.kind](3, st.modes[0], st.modes[1], st.strength)
        total = gate.compose(total)
    return total


def run_cloner(input_state: Union[complex, gaussian.GaussianState,
                                  fock.FockVector],
               spec: CloningNetworkSpec, backend: str = "gaussian",
               truncation: int = 16, method: str = "merged") -> CloneResult:
    """Clone a single-mode input; returns the full state and its restrictions.

    The symplectic backend takes a coherent amplitude or a single-mode
    GaussianState; the Fock backend takes a coherent amplitude or a
    single-mode FockVector.
    """
    if backend == "gaussian":
        if isinstance(input_state, fock.FockVector):
            raise InvalidArgumentError(
                "gaussian backend needs a coherent amplitude or GaussianState")
        if isinstance(input_state, gaussian.GaussianState):
            if input_state.n_modes != 1:
                raise InvalidArgumentError("input must be single-mode")
            mean_c, cov_c = input_state.mean, input_state.cov
        else:
            alpha = complex(input_state)
            mean_c = np.array([alpha.real, alpha.imag])
            cov_c = np.eye(2) / 4.0
        mean = np.zeros(6)
        cov = np.eye(6) / 4.0
        mean[0:2] = mean_c
        cov[0:2, 0:2] = cov_c
        if not spec.prep_absorbed:
            prep = preparation_state(spec.sigma, "gaussian")
            mean[2:6] = prep.mean
            cov[2:6, 2:6] = prep.cov
        state = gaussian.GaussianState(3, mean, cov)
        out = _network_transform(spec).apply(state)
        return CloneResult(
            "gaussian", out,
            clone_c=gaussian.reduce(out, [0]),
            clone_a=gaussian.reduce(out, [1]),
            ancilla_b=gaussian.reduce(out, [2]))
    if backend != "fock":
        raise InvalidArgumentError(f"unknown backend {backend!r}")
    if isinstance(input_state, gaussian.GaussianState):
        raise InvalidArgumentError(
            "fock backend needs a coherent amplitude or FockVector")
    if isinstance(input_state, fock.FockVector):
        if input_state.n_modes != 1 or input_state.dims[0] != truncation:
            raise InvalidArgumentError(
                "input FockVector must be single-mode at the run truncation")
        vec_c = input_state.normalized()
    else:
        vec_c = fock.coherent_fock(complex(input_state), truncation)
    if spec.prep_absorbed:
        rest = fock.vacuum_fock((truncation, truncation))
    else:
        rest = preparation_state(spec.sigma, "fock", truncation=truncation)
    full = fock.tensor(vec_c, rest)
    out = fock.apply_network_fock(spec, full, method=method)
    return CloneResult(
        "fock", out,
        clone_c=fock.reduced_density(out, 0),
        clone_a=fock.reduced_density(out, 1),
        ancilla_b=fock.reduced_density(out, 2))
