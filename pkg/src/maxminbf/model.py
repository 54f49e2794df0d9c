"""Domain types, index mapping, and the stochastic channel generator.

Index conventions: the public helpers :func:`flatten_index` and
:func:`unflatten_index` use 1-based cell/user/flat indices (as in all
documentation); arrays are stored and indexed 0-based internally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class LayoutError(ValueError):
    """A user placement violates the minimum-distance rule."""


def flatten_index(j: int, k: int, K: int) -> int:
    """Map 1-based (cell j, user k) to the 1-based flat stream index m.

    m = (j - 1) * K + k.
    """
    if K < 1:
        raise ValueError(f"K must be positive, got {K}")
    if j < 1:
        raise ValueError(f"cell index j must be >= 1, got {j}")
    if not 1 <= k <= K:
        raise ValueError(f"user index k must be in 1..{K}, got {k}")
    return (j - 1) * K + k


def unflatten_index(m: int, K: int) -> tuple[int, int]:
    """Inverse of :func:`flatten_index`: 1-based m -> (j, k)."""
    if K < 1:
        raise ValueError(f"K must be positive, got {K}")
    if m < 1:
        raise ValueError(f"flat index m must be >= 1, got {m}")
    j = (m + K - 1) // K  # ceil(m / K)
    k = m - (j - 1) * K
    return j, k


def cell_of(m0: int, K: int) -> int:
    """0-based cell index of the 0-based flat stream index."""
    return m0 // K


def _positive_vector(name: str, v: np.ndarray, size: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (size,):
        raise ValueError(f"{name} must have shape ({size},), got {v.shape}")
    if not np.all(v > 0) or not np.all(np.isfinite(v)):
        raise ValueError(f"{name} entries must be strictly positive and finite")
    return v


@dataclass(frozen=True)
class NetworkConfig:
    """Dimensions, power budget, weights, priorities, noise and tolerances.

    ``w`` are the per-stream power prices, ``beta`` the service priorities,
    ``sigma`` the per-user noise powers in watts. ``p_bar`` is the cluster
    power budget in watts for the weighted sum constraint (1/N) w^T p <= p_bar.
    """

    J: int
    K: int
    N: int
    p_bar: float
    w: np.ndarray
    beta: np.ndarray
    sigma: np.ndarray
    tol: float = 1e-10
    max_iter: int = 500

    def __post_init__(self):
        for name in ("J", "K", "N"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.p_bar <= 0:
            raise ValueError("p_bar must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        size = self.J * self.K
        object.__setattr__(self, "w", _positive_vector("w", self.w, size))
        object.__setattr__(self, "beta", _positive_vector("beta", self.beta, size))
        object.__setattr__(self, "sigma", _positive_vector("sigma", self.sigma, size))

    @property
    def n_streams(self) -> int:
        return self.J * self.K

    @classmethod
    def uniform(cls, J, K, N, p_bar, sigma, **kw) -> "NetworkConfig":
        """Config with unit weights and priorities and a scalar noise power."""
        size = J * K
        return cls(
            J=J, K=K, N=N, p_bar=p_bar,
            w=np.ones(size), beta=np.ones(size),
            sigma=np.full(size, float(sigma)), **kw,
        )


@dataclass(frozen=True)
class GeometrySpec:
    """Scenario constants for layout, path loss, shadowing and noise."""

    cell_radius: float = 1500.0
    inter_site_distance: float = 1500.0 * math.sqrt(3.0)
    min_user_distance: float = 35.0
    antenna_gain_db: float = 15.0
    pathloss_intercept_db: float = 15.3
    pathloss_slope: float = 37.6
    shadowing_std_db: float = 8.0
    noise_psd_dbm_hz: float = -162.0
    bandwidth_hz: float = 10e6

    def __post_init__(self):
        for name in ("cell_radius", "inter_site_distance", "min_user_distance",
                     "bandwidth_hz"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.shadowing_std_db < 0:
            raise ValueError("shadowing_std_db must be >= 0")

    def pathloss_db(self, dist_m) -> np.ndarray:
        """Distance-based path loss in dB for distances in meters."""
        return self.pathloss_intercept_db + self.pathloss_slope * np.log10(dist_m)

    @property
    def noise_power_w(self) -> float:
        """Noise power over the system bandwidth, in watts."""
        dbm = self.noise_psd_dbm_hz + 10.0 * math.log10(self.bandwidth_hz)
        return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class Layout:
    """Base-station and user coordinates (meters, complex plane)."""

    bs: np.ndarray      # (J,) complex positions
    users: np.ndarray   # (JK,) complex positions; user m served by cell m//K
    K: int

    @property
    def J(self) -> int:
        return len(self.bs)


@dataclass(frozen=True)
class LargeScaleProfile:
    """JK x JK matrix of large-scale gains.

    Entry ``d[a, b]`` is the linear gain between the base station of cell
    ``a // K`` (0-based) and user ``b``; rows belonging to the same cell are
    identical by construction.
    """

    d: np.ndarray
    K: int

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("d must be a square matrix")
        if d.shape[0] % self.K != 0:
            raise ValueError("matrix size must be a multiple of K")
        if not np.all(d > 0) or not np.all(np.isfinite(d)):
            raise ValueError("large-scale gains must be strictly positive and finite")
        object.__setattr__(self, "d", d)

    @property
    def n_streams(self) -> int:
        return self.d.shape[0]

    @property
    def J(self) -> int:
        return self.d.shape[0] // self.K

    def per_cell(self) -> np.ndarray:
        """(J, JK) view: gain from each base station to each user."""
        return self.d[:: self.K, :]


@dataclass(frozen=True)
class ChannelRealization:
    """Instantaneous channels h(a, b) = sqrt(d(a, b)) * htilde(a, b).

    Stored compactly as ``vectors[j, b]``, the length-N channel from base
    station j to user b (0-based); streams of the same cell share their
    channel vector exactly, so h(a, b) = vectors[a // K, b].
    """

    vectors: np.ndarray  # (J, JK, N) complex
    K: int
    seed: int

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 3 or v.shape[1] != v.shape[0] * self.K:
            raise ValueError("vectors must have shape (J, J*K, N)")
        object.__setattr__(self, "vectors", v)

    @property
    def J(self) -> int:
        return self.vectors.shape[0]

    @property
    def N(self) -> int:
        return self.vectors.shape[2]

    @property
    def n_streams(self) -> int:
        return self.vectors.shape[1]

    def vec(self, a: int, b: int) -> np.ndarray:
        """Channel h(a, b) for 1-based flat stream indices a, b."""
        return self.vectors[(a - 1) // self.K, b - 1]


@dataclass(frozen=True)
class PowerVector:
    """Strictly positive per-stream powers with a primal/dual tag."""

    values: np.ndarray
    kind: str = "primal"

    _KINDS = ("primal", "dual", "asymptotic-primal", "asymptotic-dual")

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or not np.all(v > 0) or not np.all(np.isfinite(v)):
            raise ValueError("power entries must be strictly positive and finite")
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown power kind {self.kind!r}")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)


def as_power_array(p) -> np.ndarray:
    """Accept a PowerVector or a bare positive array."""
    if isinstance(p, PowerVector):
        return p.values
    v = np.asarray(p, dtype=float)
    if not np.all(v > 0):
        raise ValueError("powers must be strictly positive")
    return v


@dataclass(frozen=True)
class BeamformingMatrix:
    """JK unit-norm complex beamformers, stored as rows of ``u``."""

    u: np.ndarray  # (JK, N) complex

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        if u.ndim != 2:
            raise ValueError("u must be a (JK, N) array")
        norms = np.linalg.norm(u, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("beamformers must be unit norm (within 1e-12)")
        object.__setattr__(self, "u", u)

    def __len__(self):
        return self.u.shape[0]


def generate_layout(geometry: GeometrySpec, J: int, K: int, seed: int) -> Layout:
    """Drop J base stations and K users per cell, uniform in each cell disk.

    Base stations sit on a regular J-gon with side length equal to the
    inter-site distance (a single station sits at the origin). Users are
    uniform in their serving cell's disk outside the exclusion radius.
    """
    rng = np.random.default_rng(seed)
    if J == 1:
        bs = np.zeros(1, dtype=complex)
    else:
        circumradius = geometry.inter_site_distance / (2.0 * math.sin(math.pi / J))
        angles = 2.0 * math.pi * np.arange(J) / J
        bs = circumradius * np.exp(1j * angles)
    r_min = geometry.min_user_distance
    r_max = geometry.cell_radius
    users = np.empty(J * K, dtype=complex)
    for j in range(J):
        # uniform in the annulus r_min < r <= r_max
        r = np.sqrt(rng.uniform(r_min**2, r_max**2, size=K))
        theta = rng.uniform(0.0, 2.0 * math.pi, size=K)
        users[j * K:(j + 1) * K] = bs[j] + r * np.exp(1j * theta)
    return Layout(bs=bs, users=users, K=K)


def generate_large_scale(geometry: GeometrySpec, layout: Layout,
                         seed: int) -> LargeScaleProfile:
    """Path loss plus log-normal shadowing for every (cell, user) pair.

    d = 10^((antenna_gain_db - PL(dist) + S) / 10) with S drawn once per
    (cell, user) pair; deterministic given the seed.
    """
    rng = np.random.default_rng(seed)
    J, K = layout.J, layout.K
    dist = np.abs(layout.bs[:, None] - layout.users[None, :])  # (J, JK)
    if np.any(dist <= geometry.min_user_distance):
        raise LayoutError("user closer than min_user_distance to a base station")
    shadow = rng.normal(0.0, geometry.shadowing_std_db, size=dist.shape)
    gain_db = geometry.antenna_gain_db - geometry.pathloss_db(dist) + shadow
    per_cell = 10.0 ** (gain_db / 10.0)
    d = np.repeat(per_cell, K, axis=0)  # replicate rows across streams of a cell
    return LargeScaleProfile(d=d, K=K)


def sample_channel(profile: LargeScaleProfile, N: int, seed: int) -> ChannelRealization:
    """Draw h(a, b) = sqrt(d(a, b)) * htilde with CN(0, 1) entries.

    One vector is drawn per (cell, user) pair and shared across the cell's
    streams, matching the replication of the large-scale profile.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    per_cell = profile.per_cell()  # (J, JK)
    if not np.allclose(np.repeat(per_cell, profile.K, axis=0), profile.d):
        raise ValueError("profile rows are not shared across streams of a cell")
    rng = np.random.default_rng(seed)
    J, JK = per_cell.shape
    htilde = (rng.standard_normal((J, JK, N)) +
              1j * rng.standard_normal((J, JK, N))) / math.sqrt(2.0)
    vectors = np.sqrt(per_cell)[:, :, None] * htilde
    return ChannelRealization(vectors=vectors, K=profile.K, seed=seed)
