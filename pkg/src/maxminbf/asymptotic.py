"""Deterministic equivalents of the dual/primal SINRs and the
statistics-only power solvers built on them.

All operations take the large-scale gain profile only; no instantaneous
channel realizations are involved.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .finite import ConvergenceError
from .model import LargeScaleProfile, NetworkConfig, PowerVector, as_power_array


@dataclass
class AsymptoticIterationRecord:
    iteration: int
    q_hat: np.ndarray
    p_hat: np.ndarray
    residual: float


@dataclass
class AsymptoticState:
    q_hat: PowerVector
    p_hat: PowerVector
    phi: np.ndarray
    phi_prime: np.ndarray
    varsigma: float
    zeta: float
    trace: list[AsymptoticIterationRecord]
    iterations: int
    converged: bool


@dataclass(frozen=True)
class EffectiveNetwork:
    """Large-system analogue of the gain/cross-interference structure."""

    e_vec: np.ndarray
    e_mat: np.ndarray
    kind: str  # "dual" | "primal"

    def extended(self, config: NetworkConfig) -> np.ndarray:
        """Extended coupling matrix of the effective network, scaled by 1/N
        so that its Perron value is the reciprocal optimal weighted SINR."""
        scale = (config.beta * self.e_vec)[:, None]
        if self.kind == "dual":
            core = self.e_mat + np.outer(config.w, config.sigma) / config.p_bar
        else:
            core = self.e_mat + np.outer(config.sigma, config.w) / config.p_bar
        return scale * core / config.N


def _dual_interference(q: np.ndarray, d: np.ndarray, phi: np.ndarray,
                       N: int) -> np.ndarray:
    """(1/N) sum_{n != m} q_n d[m,n] / (1 + q_n d[m,n] phi_m), per m."""
    X = d * q[None, :]
    term = X / (1.0 + X * phi[:, None])
    np.fill_diagonal(term, 0.0)
    return term.sum(axis=1) / N


def _dual_interference_sq(q: np.ndarray, d: np.ndarray, phi: np.ndarray,
                          N: int) -> np.ndarray:
    """Same sum with squared denominators (enters the phi derivative)."""
    X = d * q[None, :]
    term = X / (1.0 + X * phi[:, None]) ** 2
    np.fill_diagonal(term, 0.0)
    return term.sum(axis=1) / N


def _primal_interference(p: np.ndarray, q: np.ndarray, d: np.ndarray,
                         phi: np.ndarray, N: int) -> np.ndarray:
    """(1/N) sum_{n != m} p_n d[n,m] / (1 + q_m d[n,m] phi_n)^2, per m."""
    W = d / (1.0 + d * q[None, :] * phi[:, None]) ** 2  # W[n, m]
    np.fill_diagonal(W, 0.0)
    return (p @ W) / N


def algorithm_b(q_hat, profile: LargeScaleProfile, config: NetworkConfig,
                tol: float | None = None, phi0: np.ndarray | None = None,
                max_iter: int = 10_000) -> np.ndarray:
    """Per-stream auxiliary fixed point phi for the given dual powers.

    Iterates phi_m <- 1 / (w_m + interference(phi_m)); the map is a standard
    interference function, so any positive start converges to the unique
    solution.
    """
    q = as_power_array(q_hat)
    d = profile.d
    w = config.w
    if tol is None:
        tol = config.tol
    phi = np.full(len(q), 1.0) / w if phi0 is None else np.asarray(phi0, float).copy()
    for _ in range(max_iter):
        phi_new = 1.0 / (w + _dual_interference(q, d, phi, config.N))
        if np.max(np.abs(phi_new - phi) / phi_new) < tol:
            return phi_new
        phi = phi_new
    raise ConvergenceError("phi fixed point did not converge")


def gamma_dual(q_hat, profile: LargeScaleProfile, config: NetworkConfig,
               tol: float = 1e-13) -> np.ndarray:
    """Deterministic equivalent of the dual-network SINR for the powers q.

    Recovered as q_m d_mm phi_m from the auxiliary fixed point, which is
    equivalent to the per-stream SINR fixed point.
    """
    q = as_power_array(q_hat)
    phi = algorithm_b(q, profile, config, tol=tol)
    return q * np.diagonal(profile.d) * phi


def phi_derivative(phi_hat: np.ndarray, q_hat, profile: LargeScaleProfile,
                   config: NetworkConfig) -> np.ndarray:
    """Closed-form sensitivity of phi_m to its noise weight w_m (negative)."""
    q = as_power_array(q_hat)
    denom = config.w + _dual_interference_sq(q, profile.d, phi_hat, config.N)
    return -phi_hat / denom


def gamma_primal(p, q_hat, phi_hat: np.ndarray, phi_prime: np.ndarray,
                 profile: LargeScaleProfile, config: NetworkConfig) -> np.ndarray:
    """Deterministic equivalent of the primal-network SINR for the powers p."""
    p = as_power_array(p)
    q = as_power_array(q_hat)
    dd = np.diagonal(profile.d)
    num = p * dd * phi_hat**2 / (-phi_prime)
    den = config.sigma + _primal_interference(p, q, profile.d, phi_hat, config.N)
    return num / den


def algorithm_c(phi_hat: np.ndarray, profile: LargeScaleProfile,
                config: NetworkConfig, tol: float | None = None,
                q0: np.ndarray | None = None,
                max_iter: int = 10_000) -> tuple[np.ndarray, float, list]:
    """Normalized fixed-point iteration for the asymptotic dual powers.

    Returns (q_hat, varsigma, trace) where varsigma is the common weighted
    effective dual SINR at convergence and trace holds the per-iteration
    power vectors.
    """
    d = profile.d
    dd = np.diagonal(d)
    if tol is None:
        tol = config.tol
    q = (np.full(len(dd), config.N * config.p_bar / np.sum(config.sigma))
         if q0 is None else np.asarray(q0, float).copy())
    trace = [q.copy()]
    converged = False
    for _ in range(max_iter):
        raw = (config.beta / dd) * (
            config.w + _dual_interference(q, d, phi_hat, config.N))
        q_new = raw * config.N * config.p_bar / (config.sigma @ raw)
        if np.max(np.abs(q_new - q) / q_new) < tol:
            q = q_new
            trace.append(q.copy())
            converged = True
            break
        q = q_new
        trace.append(q.copy())
    if not converged:
        raise ConvergenceError("dual power iteration did not converge")
    ratio = q / ((config.beta / dd) * (
        config.w + _dual_interference(q, d, phi_hat, config.N)))
    return q, float(np.mean(ratio)), trace


def algorithm_d(q_hat, phi_hat: np.ndarray, phi_prime: np.ndarray,
                profile: LargeScaleProfile, config: NetworkConfig,
                tol: float | None = None, p0: np.ndarray | None = None,
                max_iter: int = 10_000) -> tuple[np.ndarray, float, list]:
    """Normalized fixed-point iteration for the asymptotic primal powers.

    Returns (p_hat, zeta, trace) with zeta the common weighted effective
    primal SINR at convergence.
    """
    q = as_power_array(q_hat)
    d = profile.d
    dd = np.diagonal(d)
    if tol is None:
        tol = config.tol
    coeff = (-phi_prime) * config.beta / (phi_hat**2 * dd)
    p = (np.full(len(dd), config.N * config.p_bar / np.sum(config.w))
         if p0 is None else np.asarray(p0, float).copy())
    trace = [p.copy()]
    converged = False
    for _ in range(max_iter):
        raw = coeff * (config.sigma +
                       _primal_interference(p, q, d, phi_hat, config.N))
        p_new = raw * config.N * config.p_bar / (config.w @ raw)
        if np.max(np.abs(p_new - p) / p_new) < tol:
            p = p_new
            trace.append(p.copy())
            converged = True
            break
        p = p_new
        trace.append(p.copy())
    if not converged:
        raise ConvergenceError("primal power iteration did not converge")
    ratio = p / (coeff * (config.sigma +
                          _primal_interference(p, q, d, phi_hat, config.N)))
    return p, float(np.mean(ratio)), trace


def algorithm_e(profile: LargeScaleProfile, config: NetworkConfig,
                tol: float | None = None,
                max_iter: int = 10_000) -> AsymptoticState:
    """Single-timescale loop combining the dual, auxiliary, and primal updates.

    Each sweep performs one dual-power update with budget normalization, one
    auxiliary update (the closed coupling applied to the raw, un-normalized
    dual update, which is exactly one sweep of the auxiliary fixed point),
    the derivative evaluation, and one normalized primal-power update. At
    convergence the state jointly satisfies the auxiliary fixed point and
    both effective-network eigen-relations.
    """
    d = profile.d
    dd = np.diagonal(d)
    N = config.N
    if tol is None:
        tol = config.tol
    JK = len(dd)
    q = np.full(JK, N * config.p_bar / np.sum(config.sigma))
    p = np.full(JK, N * config.p_bar / np.sum(config.w))
    phi = 1.0 / config.w
    trace: list[AsymptoticIterationRecord] = []
    converged = False
    it = 0
    phi_p = phi_derivative(phi, q, profile, config)
    for it in range(1, max_iter + 1):
        q_raw = (config.beta / dd) * (
            config.w + _dual_interference(q, d, phi, N))
        phi_new = (config.beta / dd) / q_raw
        q_new = q_raw * N * config.p_bar / (config.sigma @ q_raw)
        phi_p = phi_derivative(phi_new, q_new, profile, config)
        coeff = (-phi_p) * config.beta / (phi_new**2 * dd)
        p_raw = coeff * (config.sigma +
                         _primal_interference(p, q_new, d, phi_new, N))
        p_new = p_raw * N * config.p_bar / (config.w @ p_raw)

        res = max(
            float(np.max(np.abs(q_new - q) / q_new)),
            float(np.max(np.abs(p_new - p) / p_new)),
            float(np.max(np.abs(phi_new - phi) / phi_new)),
            float(np.max(np.abs(
                phi_new * (config.w +
                           _dual_interference(q_new, d, phi_new, N)) - 1.0))),
        )
        q, p, phi = q_new, p_new, phi_new
        trace.append(AsymptoticIterationRecord(it, q.copy(), p.copy(), res))
        if res < tol:
            converged = True
            break

    gdn = q * dd * phi
    varsigma = float(np.mean(gdn / config.beta))
    gpn = gamma_primal(p, q, phi, phi_p, profile, config)
    zeta = float(np.mean(gpn / config.beta))
    return AsymptoticState(
        q_hat=PowerVector(q, kind="asymptotic-dual"),
        p_hat=PowerVector(p, kind="asymptotic-primal"),
        phi=phi,
        phi_prime=phi_p,
        varsigma=varsigma,
        zeta=zeta,
        trace=trace,
        iterations=it,
        converged=converged,
    )


def build_effective(q_hat, phi_hat: np.ndarray, phi_prime: np.ndarray,
                    profile: LargeScaleProfile, config: NetworkConfig,
                    kind: str) -> EffectiveNetwork:
    """Assemble the effective direct-gain vector and cross-interference matrix."""
    q = as_power_array(q_hat)
    d = profile.d
    dd = np.diagonal(d)
    if kind == "dual":
        e_vec = 1.0 / dd
        e_mat = d / (1.0 + d * q[None, :] * phi_hat[:, None])
    elif kind == "primal":
        e_vec = (-phi_prime) / (dd * phi_hat**2)
        e_mat = (d / (1.0 + d * q[None, :] * phi_hat[:, None]) ** 2).T
    else:
        raise ValueError(f"kind must be 'dual' or 'primal', got {kind!r}")
    e_mat = e_mat.copy()
    np.fill_diagonal(e_mat, 0.0)
    return EffectiveNetwork(e_vec=e_vec, e_mat=e_mat, kind=kind)
