"""Shared fixtures and helpers for building small random instances."""
import numpy as np
import pytest

from maxminbf.model import (
    ChannelRealization,
    LargeScaleProfile,
    NetworkConfig,
    sample_channel,
)


def random_profile(J, K, rng, lo=0.05, hi=2.0):
    """Random strictly positive large-scale profile with shared cell rows."""
    per_cell = rng.uniform(lo, hi, size=(J, J * K))
    return LargeScaleProfile(d=np.repeat(per_cell, K, axis=0), K=K)


def random_config(J, K, N, rng, p_bar=None):
    """Config with randomized positive weights, priorities and noises."""
    size = J * K
    return NetworkConfig(
        J=J, K=K, N=N,
        p_bar=float(rng.uniform(1.0, 10.0)) if p_bar is None else p_bar,
        w=rng.uniform(0.5, 2.0, size),
        beta=rng.uniform(0.5, 2.0, size),
        sigma=rng.uniform(0.5, 2.0, size),
    )


def random_instance(J, K, N, seed, p_bar=None):
    """(config, profile, channels) triple for a random small network."""
    rng = np.random.default_rng(seed)
    config = random_config(J, K, N, rng, p_bar=p_bar)
    profile = random_profile(J, K, rng)
    channels = sample_channel(profile, N, seed + 77)
    return config, profile, channels


def uniform_instance(J, K, N, seed, p_bar=10.0, sigma=1.0):
    """Unit-weight instance; handy when closed forms are wanted."""
    rng = np.random.default_rng(seed)
    config = NetworkConfig.uniform(J=J, K=K, N=N, p_bar=p_bar, sigma=sigma)
    profile = random_profile(J, K, rng)
    channels = sample_channel(profile, N, seed + 77)
    return config, profile, channels


def single_user_instance(seed, N=3, p_bar=4.0, w=1.3, sigma=0.7, beta=1.1):
    """J = K = 1 instance where everything is available in closed form."""
    config = NetworkConfig(J=1, K=1, N=N, p_bar=p_bar,
                           w=np.array([w]), beta=np.array([beta]),
                           sigma=np.array([sigma]))
    rng = np.random.default_rng(seed)
    d = np.array([[float(rng.uniform(0.5, 1.5))]])
    profile = LargeScaleProfile(d=d, K=1)
    channels = sample_channel(profile, N, seed + 77)
    return config, profile, channels


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
