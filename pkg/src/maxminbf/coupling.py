"""Gain/cross-interference matrices, SINR evaluation, and MVDR beamformers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .model import (
    BeamformingMatrix,
    ChannelRealization,
    NetworkConfig,
    as_power_array,
)


class DegenerateBeamformerError(ValueError):
    """A beamformer is orthogonal to its own channel (zero direct gain)."""


@dataclass(frozen=True)
class GainMatrix:
    """Link gains G, cross-interference F (zero diagonal), and g = 1/diag(G)."""

    g_mat: np.ndarray
    f_mat: np.ndarray
    g_vec: np.ndarray


@dataclass(frozen=True)
class ExtendedCouplingMatrix:
    """Nonnegative matrix whose Perron pair encodes the optimal powers."""

    b_mat: np.ndarray
    kind: str  # "primal" | "dual"


def build_gain(channels: ChannelRealization, u: BeamformingMatrix) -> GainMatrix:
    """G[m, n] = |h(n, m)^H u_n|^2 with h(n, m) the channel from stream n's
    cell to user m."""
    JK, N = channels.n_streams, channels.N
    if u.u.shape != (JK, N):
        raise ValueError("beamformer dimensions do not match the channels")
    G = np.empty((JK, JK))
    for j in range(channels.J):
        cols = slice(j * channels.K, (j + 1) * channels.K)
        # inner products of every user's channel from cell j with that cell's
        # beamformers: (JK, N) @ (N, K)
        proj = channels.vectors[j].conj() @ u.u[cols].T
        G[:, cols] = np.abs(proj) ** 2
    diag = np.diagonal(G).copy()
    if np.any(diag <= 0.0):
        raise DegenerateBeamformerError("beamformer orthogonal to its own channel")
    F = G.copy()
    np.fill_diagonal(F, 0.0)
    return GainMatrix(g_mat=G, f_mat=F, g_vec=1.0 / diag)


def primal_sinr(p, gm: GainMatrix, config: NetworkConfig) -> np.ndarray:
    """Downlink SINR per stream: (p_m/N) G_mm / ((1/N)(F p)_m + sigma_m)."""
    p = as_power_array(p)
    N = config.N
    return (p / N) * np.diagonal(gm.g_mat) / (gm.f_mat @ p / N + config.sigma)


def dual_sinr(q, gm: GainMatrix, config: NetworkConfig) -> np.ndarray:
    """Reciprocal-uplink SINR per stream: (q_m/N) G_mm / ((1/N)(F^T q)_m + w_m)."""
    q = as_power_array(q)
    N = config.N
    return (q / N) * np.diagonal(gm.g_mat) / (gm.f_mat.T @ q / N + config.w)


def _mvdr_vectors(channels: ChannelRealization, q: np.ndarray,
                  config: NetworkConfig) -> np.ndarray:
    """All MVDR beamformers for the dual powers q, as rows of a (JK, N) array."""
    JK, N, K = channels.n_streams, channels.N, channels.K
    out = np.empty((JK, N), dtype=complex)
    eye = np.eye(N)
    for j in range(channels.J):
        H = channels.vectors[j]  # (JK, N), channels from cell j to every user
        # full interference covariance at cell j's (hypothesized) receiver
        A_full = np.einsum("n,ni,nj->ij", q / config.N, H, H.conj())
        for m in range(j * K, (j + 1) * K):
            h_mm = H[m]
            A = (A_full - (q[m] / config.N) * np.outer(h_mm, h_mm.conj())
                 + config.w[m] * eye)
            c, low = cho_factor(A)
            v = cho_solve((c, low), h_mm)
            out[m] = v / np.linalg.norm(v)
    return out


def mvdr(channels: ChannelRealization, q, config: NetworkConfig,
         m: int) -> np.ndarray:
    """MVDR beamformer for the 1-based flat stream index m.

    u = A^{-1} h(m, m) / ||A^{-1} h(m, m)|| with
    A = sum_{n != m} (q_n/N) h(m, n) h(m, n)^H + w_m I.
    """
    q = as_power_array(q)
    if not 1 <= m <= channels.n_streams:
        raise ValueError(f"flat index m must be in 1..{channels.n_streams}")
    m0 = m - 1
    j = m0 // channels.K
    H = channels.vectors[j]
    mask = np.ones(channels.n_streams, dtype=bool)
    mask[m0] = False
    A = (np.einsum("n,ni,nj->ij", q[mask] / config.N, H[mask], H[mask].conj())
         + config.w[m0] * np.eye(channels.N))
    c, low = cho_factor(A)
    v = cho_solve((c, low), H[m0])
    return v / np.linalg.norm(v)


def mvdr_matrix(channels: ChannelRealization, q,
                config: NetworkConfig) -> BeamformingMatrix:
    """MVDR beamformers for every stream at once."""
    return BeamformingMatrix(u=_mvdr_vectors(channels, as_power_array(q), config))


def dual_sinr_quadratic(channels: ChannelRealization, q,
                        config: NetworkConfig) -> np.ndarray:
    """Dual SINR directly from the quadratic form
    (q_m/N) h(m,m)^H A_m^{-1} h(m,m); equals :func:`dual_sinr` evaluated at
    the MVDR beamformers."""
    q = as_power_array(q)
    JK, N, K = channels.n_streams, channels.N, channels.K
    out = np.empty(JK)
    eye = np.eye(N)
    for j in range(channels.J):
        H = channels.vectors[j]
        A_full = np.einsum("n,ni,nj->ij", q / config.N, H, H.conj())
        for m in range(j * K, (j + 1) * K):
            h_mm = H[m]
            A = (A_full - (q[m] / config.N) * np.outer(h_mm, h_mm.conj())
                 + config.w[m] * eye)
            c, low = cho_factor(A)
            v = cho_solve((c, low), h_mm)
            out[m] = (q[m] / config.N) * float(np.real(h_mm.conj() @ v))
    return out


def extended_matrix(gm: GainMatrix, config: NetworkConfig,
                    kind: str) -> ExtendedCouplingMatrix:
    """diag(beta o g)(F + (1/p_bar) sigma w^T) for the primal network, or
    diag(beta o g)(F^T + (1/p_bar) w sigma^T) for the dual."""
    scale = (config.beta * gm.g_vec)[:, None]
    if kind == "primal":
        core = gm.f_mat + np.outer(config.sigma, config.w) / config.p_bar
    elif kind == "dual":
        core = gm.f_mat.T + np.outer(config.w, config.sigma) / config.p_bar
    else:
        raise ValueError(f"kind must be 'primal' or 'dual', got {kind!r}")
    return ExtendedCouplingMatrix(b_mat=scale * core, kind=kind)
