"""Scenario files: TOML with [geometry], [network], and [seeds] sections.

Every key has a default matching the baseline simulation setup, so an empty
file is a valid scenario. See ``scenarios/baseline.toml`` for the documented
schema.
"""
from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import GeometrySpec, NetworkConfig

_NETWORK_DEFAULTS = {
    "cells": 3,
    "users_per_cell": 4,
    "antennas": 4,
    "power_budget_w": 10.0,
    "tol": 1e-10,
    "max_iter": 500,
}

_SEED_DEFAULTS = {"geometry": 1, "channel": 1}


@dataclass(frozen=True)
class Scenario:
    geometry: GeometrySpec
    J: int
    K: int
    N: int
    p_bar: float
    tol: float
    max_iter: int
    weights: np.ndarray | None
    priorities: np.ndarray | None
    noise_w: np.ndarray | None
    seeds: dict = field(default_factory=dict)

    def network_config(self, p_bar: float | None = None,
                       J: int | None = None, K: int | None = None,
                       N: int | None = None, tol: float | None = None,
                       max_iter: int | None = None) -> NetworkConfig:
        """Build a NetworkConfig, optionally overriding scenario values.

        Per-stream vectors default to unit weights/priorities and the
        geometry's noise power; explicit vectors are only honored when the
        stream count is unchanged.
        """
        J = self.J if J is None else J
        K = self.K if K is None else K
        N = self.N if N is None else N
        size = J * K
        unchanged = size == self.J * self.K

        def vec(explicit, default):
            if explicit is not None and unchanged:
                return np.asarray(explicit, dtype=float)
            return np.full(size, default)

        return NetworkConfig(
            J=J, K=K, N=N,
            p_bar=self.p_bar if p_bar is None else p_bar,
            w=vec(self.weights, 1.0),
            beta=vec(self.priorities, 1.0),
            sigma=vec(self.noise_w, self.geometry.noise_power_w),
            tol=self.tol if tol is None else tol,
            max_iter=self.max_iter if max_iter is None else max_iter,
        )


def _check_keys(section: str, given: dict, allowed) -> None:
    unknown = set(given) - set(allowed)
    if unknown:
        raise ValueError(f"unknown {section} keys: {sorted(unknown)}")


def load_scenario(path: str | Path | None = None) -> Scenario:
    """Load a scenario file; a missing path yields the all-defaults scenario."""
    raw = {}
    if path is not None:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    _check_keys("scenario", raw, ("geometry", "network", "seeds"))

    geo_raw = raw.get("geometry", {})
    _check_keys("geometry", geo_raw, GeometrySpec.__dataclass_fields__)
    geometry = GeometrySpec(**geo_raw)

    net_raw = dict(raw.get("network", {}))
    _check_keys("network", net_raw,
                list(_NETWORK_DEFAULTS) + ["weights", "priorities", "noise_w"])
    net = {**_NETWORK_DEFAULTS, **net_raw}

    seeds = {**_SEED_DEFAULTS, **raw.get("seeds", {})}
    _check_keys("seeds", seeds, _SEED_DEFAULTS)

    def opt_vec(key):
        v = net.get(key)
        return None if v is None else np.asarray(v, dtype=float)

    return Scenario(
        geometry=geometry,
        J=int(net["cells"]),
        K=int(net["users_per_cell"]),
        N=int(net["antennas"]),
        p_bar=float(net["power_budget_w"]),
        tol=float(net["tol"]),
        max_iter=int(net["max_iter"]),
        weights=opt_vec("weights"),
        priorities=opt_vec("priorities"),
        noise_w=opt_vec("noise_w"),
        seeds=seeds,
    )
