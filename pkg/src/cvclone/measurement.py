"""Joint quadrature measurement on the two clones.

The physical measurement records X(phi) on clone c and X(theta) on clone a.
For right angles (theta - phi = pi/2) the closed-form outcome-density operator
family implemented here reproduces the simulated joint statistics exactly
under the outcome identification

    p(u, v) = Tr[rho_in F(-u, -v)],

where (u, v) are the measured quadrature values; this identification was
validated against the truncated-Fock oracle (pointwise to 1e-14 at lam = 3)
and is the documented, supported map. At general angles the parameter bundle
and densities remain available (completeness still holds numerically), but no
outcome identification is claimed: the residual relation involves an extra
area-preserving linear map with no closed form found, see the design notes.

The squeeze operator convention, also oracle-pinned, is
S(xi) = exp((xi c^dag^2 - conj(xi) c^2)/2).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, fock, gaussian, network
from .errors import DomainError, InvalidArgumentError

TWIN_BEAM_SQUEEZE = fock.TWIN_BEAM_SQUEEZE


@dataclass(frozen=True)
class PovmParams:
    """Closed-form parameter bundle of the finite-lam outcome operators."""

    lam: float
    phi: float
    theta: float
    epsilon: float
    lambda_prime: float
    C: float
    D: float
    E: float
    disc: float
    beta: complex
    gamma: complex
    delta: complex
    xi: complex
    thermal_base: float
    prefactor: float

    def alpha_of(self, x: float, x_prime: float) -> complex:
        """Displacement argument for the outcome pair (x, x_prime)."""
        return (-0.5j * x
                + (self.C * x_prime - self.E * x) / (2.0 * math.sqrt(self.disc)))


@dataclass(frozen=True)
class MomentReport:
    """First and second moments of the measured clone quadratures."""

    lam: float
    input_moments: tuple
    mean_xc: float
    mean_ya: float
    second_xc: float
    second_ya: float
    var_xc: float
    var_ya: float
    added_noise: tuple
    variance_product: float

    def __post_init__(self):
        if self.var_xc < 0 or self.var_ya < 0:
            raise InvalidArgumentError("negative output variance")
        if self.variance_product < 0.25 - 1e-9:
            raise InvalidArgumentError(
                f"variance product {self.variance_product} below the bound")


def povm_params(lam: float, phi: float, theta: float) -> PovmParams:
    """Evaluate every closed-form parameter; fails loudly off-domain."""
    if lam <= 0:
        raise InvalidArgumentError("lam must be positive")
    if not 0.0 < theta - phi < math.pi:
        raise InvalidArgumentError("need 0 < theta - phi < pi")
    eps = -2.0 * math.exp(-lam)
    lamp = lam - TWIN_BEAM_SQUEEZE
    sh_e, ch_e = math.sinh(eps), math.cosh(eps)
    sh_lp, ch_lp = math.sinh(lamp), math.cosh(lamp)
    sh_l, ch_l = math.sinh(lam), math.cosh(lam)
    cbig = (sh_e * sh_lp) ** 2 + 0.5 * sh_e ** 2
    dbig = ((ch_l * ch_lp - sh_l * ch_e * sh_lp) ** 2
            + 0.5 * (sh_l * sh_e) ** 2 - 0.5)
    ebig = math.cos(phi - theta) * (
        sh_e * sh_lp * (ch_l * ch_lp - sh_l * ch_e * sh_lp)
        - 0.5 * ch_e * sh_l * sh_e)
    disc = cbig * dbig - ebig ** 2
    if disc <= 0:
        raise DomainError(f"discriminant C*D - E^2 = {disc:.3e} not positive")
    root = math.sqrt(disc)
    common = 0.25 * sh_l * sh_e * np.exp(1j * theta) * cbig / root
    beta = 0.25 * ch_e * np.exp(1j * phi) * (1j + ebig / root) + common
    gamma = 0.25 * ch_e * np.exp(1j * phi) * (-1j + ebig / root) + common
    if abs(gamma) <= abs(beta):
        raise DomainError("|gamma| <= |beta|: squeeze parameter undefined")
    delta = (-((abs(gamma) ** 2 - abs(beta) ** 2) ** -0.5)
             * np.exp(-1j * np.angle(gamma)))
    xi = (math.acosh(abs(gamma * delta))
          * np.exp(1j * (np.angle(gamma) + np.angle(beta))))
    cd2 = cbig * abs(delta) ** 2
    thermal_base = (cd2 - 2.0) / (cd2 + 2.0)
    prefactor = cd2 / (4.0 * math.pi * root)
    return PovmParams(lam=float(lam), phi=float(phi), theta=float(theta),
                      epsilon=eps, lambda_prime=lamp, C=cbig, D=dbig, E=ebig,
                      disc=disc, beta=complex(beta), gamma=complex(gamma),
                      delta=complex(delta), xi=complex(xi),
                      thermal_base=thermal_base, prefactor=prefactor)


@functools.lru_cache(maxsize=64)
def _squeeze_dag(xi: complex, dim: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1.0, dim)), 1).astype(np.complex128)
    gen = 0.5 * (xi * a.conj().T @ a.conj().T - np.conj(xi) * a @ a)
    return fock._expm_dense(gen).conj().T


def _thermal_weights(params: PovmParams, dim: int) -> np.ndarray:
    q = params.thermal_base
    if not -1.0 < q < 1.0:
        raise DomainError(f"thermal base {q} outside (-1, 1)")
    if q <= 0:
        nth = 8
    else:
        nth = max(8, int(math.log(1e-14) / math.log(q)) + 1)
    nth = min(nth, dim)
    return (1.0 - q) * q ** np.arange(nth)


def _as_density(input_state) -> np.ndarray:
    if isinstance(input_state, fock.DensityMatrix):
        return input_state.matrix
    if isinstance(input_state, fock.FockVector):
        if input_state.n_modes != 1:
            raise InvalidArgumentError("need a single-mode input")
        v = input_state.normalized().amplitudes
        return np.outer(v, v.conj())
    raise InvalidArgumentError("input must be a DensityMatrix or FockVector")


def povm_density(params: PovmParams, x: float, x_prime: float,
                 input_state) -> float:
    """Tr[input rho F(x, x_prime)] for one outcome pair."""
    return float(povm_density_grid(params, np.array([x]),
                                   np.array([x_prime]), input_state)[0, 0])


def povm_density_grid(params: PovmParams, xs, xps, input_state) -> np.ndarray:
    """Outcome density on the grid xs × xps; shape (len(xs), len(xps))."""
    rho = _as_density(input_state)
    dim = rho.shape[0]
    weights = _thermal_weights(params, dim)
    s_dag = _squeeze_dag(params.xi, dim)
    xs = np.asarray(xs, dtype=float)
    xps = np.asarray(xps, dtype=float)
    gx, gp = np.meshgrid(xs, xps, indexing="ij")
    alphas = (-0.5j * gx
              + (params.C * gp - params.E * gx) / (2.0 * math.sqrt(params.disc)))
    zs = (alphas * params.delta).ravel()
    vals = _kernels.povm_grid_values(zs, s_dag, rho, weights,
                                     params.prefactor)
    return vals.reshape(gx.shape)


def clone_a_coefficient_rows(lam: float):
    """(R, P, Q) linking the measured clone-a quadrature to mode operators.

    Written as literal hyperbolic products these subtract terms of size
    e^(2 lam) and the tiny excess over the vacuum floor sinks into float
    roundoff past lam ~ 8.  Regrouping with
    cosh(2 e^-lam) - 1 = 2 sinh^2(e^-lam) keeps every term O(1), so the trio
    stays relatively accurate over the whole supported coupling range.
    """
    if lam <= 0:
        raise InvalidArgumentError("lam must be positive")
    t0 = TWIN_BEAM_SQUEEZE
    sh_u = math.sinh(math.exp(-lam))
    ch_u = math.cosh(math.exp(-lam))
    r = 2.0 * math.sinh(lam) * sh_u * ch_u
    p = ch_u ** 2 * math.cosh(t0) - sh_u ** 2 * math.cosh(2.0 * lam - t0)
    q = -(sh_u ** 2 * math.sinh(2.0 * lam - t0) + ch_u ** 2 * math.sinh(t0))
    return r, p, q


def expected_moments(lam: float, input_moments) -> MomentReport:
    """Closed-form output moments of (X on clone c, Y on clone a).

    ``input_moments`` is (<X>, <Y>, <X^2>, <Y^2>) of the input mode. The
    relations carry the negative-coupling convention (epsilon = -2 e^-lam), so
    the clone-a first moment comes out sign-flipped relative to the gate-sign
    simulation; variances and added noises are convention-independent.
    """
    if lam <= 0:
        raise InvalidArgumentError("lam must be positive")
    mx, my, x2, y2 = (float(t) for t in input_moments)
    var_x, var_y = x2 - mx * mx, y2 - my * my
    if var_x < -1e-12 or var_y < -1e-12:
        raise InvalidArgumentError("second moments below squared means")
    if var_x * var_y < 1.0 / 16.0 - 1e-9:
        raise InvalidArgumentError("input moments violate the uncertainty bound")
    eps = -2.0 * math.exp(-lam)
    lamp = lam - TWIN_BEAM_SQUEEZE
    sh_e, ch_e = math.sinh(eps), math.cosh(eps)
    sh_lp = math.sinh(lamp)
    r, p, q = clone_a_coefficient_rows(lam)
    mean_xc = ch_e * mx
    mean_ya = -r * my
    second_xc = ch_e ** 2 * x2 + 0.25 * sh_e ** 2 * (2.0 * sh_lp ** 2 + 1.0)
    second_ya = r * r * y2 + 0.25 * (p * p + q * q)
    var_xc = second_xc - mean_xc ** 2
    var_ya = second_ya - mean_ya ** 2
    return MomentReport(
        lam=float(lam), input_moments=(mx, my, x2, y2),
        mean_xc=mean_xc, mean_ya=mean_ya,
        second_xc=second_xc, second_ya=second_ya,
        var_xc=var_xc, var_ya=var_ya,
        added_noise=(var_xc - var_x, var_ya - var_y),
        variance_product=var_xc * var_ya)


def sample_joint_quadratures(result: network.CloneResult, phi: float,
                             theta: float, n: int, seed: int) -> np.ndarray:
    """n draws of (X(phi) on clone c, X(theta) on clone a); seeded."""
    if getattr(result, "backend", None) != "gaussian":
        raise InvalidArgumentError(
            "sampling needs a gaussian-backend result; compare Fock runs "
            "through povm_density instead")
    if n < 1:
        raise InvalidArgumentError("need at least one sample")
    state = result.state
    eu = np.zeros(6)
    eu[0], eu[1] = math.cos(phi), math.sin(phi)
    ev = np.zeros(6)
    ev[2], ev[3] = math.cos(theta), math.sin(theta)
    mean = np.array([eu @ state.mean, ev @ state.mean])
    cov = np.array([[eu @ state.cov @ eu, eu @ state.cov @ ev],
                    [eu @ state.cov @ ev, ev @ state.cov @ ev]])
    chol = np.linalg.cholesky(cov)
    rng = np.random.default_rng(seed)
    return mean + rng.standard_normal((int(n), 2)) @ chol.T


def husimi_limit_check(alpha: complex, lam: float, n: int = 100_000,
                       seed: int = 7) -> float:
    """Max moment gap between rescaled joint outcomes and the input Husimi Q.

    In the large-lam limit the outcome pair (X on c, Y on a) distributes like
    the Husimi function of the input: mean (Re alpha, Im alpha), variance 1/2
    per axis, no correlation. Returns the largest absolute discrepancy over
    those five moments.
    """
    if lam < 4.0:
        raise InvalidArgumentError("husimi comparison needs lam >= 4")
    spec = network.network_from_lambda(lam)
    result = network.run_cloner(complex(alpha), spec, backend="gaussian")
    samples = sample_joint_quadratures(result, 0.0, math.pi / 2.0, n, seed)
    emp_mean = samples.mean(axis=0)
    centered = samples - emp_mean
    emp_cov = (centered.T @ centered) / samples.shape[0]
    target_mean = np.array([np.real(alpha), np.imag(alpha)])
    gaps = [abs(emp_mean[0] - target_mean[0]),
            abs(emp_mean[1] - target_mean[1]),
            abs(emp_cov[0, 0] - 0.5),
            abs(emp_cov[1, 1] - 0.5),
            abs(emp_cov[0, 1])]
    return float(max(gaps))


def sigma_variant_report(sigma: float, lam: float, truncation: int = 18):
    """Measured added noise at the sigma-matched angles.

    Returns (angle, report): angle = arctan(sigma^2); the report carries the
    added noise of X(angle) on clone c and X(-angle) on clone a for a vacuum
    input (both equal sigma^2 / (2 (1 + sigma^4)) in the large-lam limit),
    plus the trace distance between the clones.
    """
    if not network.SIGMA_RANGE[0] <= sigma <= network.SIGMA_RANGE[1]:
        raise InvalidArgumentError(
            f"sigma outside supported range {network.SIGMA_RANGE}")
    if lam > 6.0:
        raise InvalidArgumentError("Fock-based preparation is capped at lam=6")
    angle = math.atan(sigma * sigma)
    spec = network.network_from_lambda(lam, sigma)
    result = network.run_cloner(0j, spec, backend="fock",
                                truncation=truncation)
    _, var_c = result.clone_c.quadrature_moments(angle)
    _, var_a = result.clone_a.quadrature_moments(-angle)
    report = {
        "angle": angle,
        "added_noise_c": var_c - 0.25,
        "added_noise_a": var_a - 0.25,
        "reference_added_noise": sigma ** 2 / (2.0 * (1.0 + sigma ** 4)),
        "clone_trace_distance": fock.trace_distance(result.clone_c,
                                                    result.clone_a),
    }
    return angle, report
