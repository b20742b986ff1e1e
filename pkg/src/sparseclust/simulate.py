"""Benchmark data generators: four spherical settings and two half moons.

Settings 1-4 draw labels uniformly over K in {2, 4} clusters and put the
signal in the first 20 features (unit-variance Gaussian around sign-patterned
means +-mu); the remaining features are standard normal noise.  Setting 5
traces two interlocking semicircular arcs in the first two features and fills
the rest with N(0, 0.5)-variance noise.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

N_INFORMATIVE_SPHERICAL = 20

# Table of per-setting defaults: (K, n, p, mu).
SETTING_DEFAULTS = {
    1: (2, 60, 150, 0.6),
    2: (2, 60, 500, 0.7),
    3: (4, 60, 150, 0.9),
    4: (4, 60, 500, 1.2),
    5: (2, 100, 40, None),
}


@dataclass(frozen=True)
class SimSpec:
    """A benchmark scenario: setting id, sizes, separation, and seed."""

    setting: int
    n: int
    p: int
    K: int
    mu: Optional[float]
    seed: int = 0

    def __post_init__(self):
        if self.setting not in SETTING_DEFAULTS:
            raise ValueError(f"setting must be 1..5, got {self.setting}")
        if self.setting in (1, 2, 3, 4) and self.p < N_INFORMATIVE_SPHERICAL:
            raise ValueError(f"spherical settings need p >= {N_INFORMATIVE_SPHERICAL}")
        if self.setting == 5 and self.p < 2:
            raise ValueError("the half-moon setting needs p >= 2")


def setting_spec(setting, seed=0, n=None, p=None, mu=None, K=None):
    """SimSpec for a benchmark setting with Table-style defaults, overridable."""
    k0, n0, p0, mu0 = SETTING_DEFAULTS[int(setting)]
    return SimSpec(
        setting=int(setting),
        n=int(n) if n is not None else n0,
        p=int(p) if p is not None else p0,
        K=int(K) if K is not None else k0,
        mu=float(mu) if mu is not None else mu0,
        seed=int(seed),
    )


def generate(spec, rng=None):
    """Dispatch to the spherical or half-moon generator for the given spec."""
    if spec.setting == 5:
        return generate_half_moons(spec, rng)
    return generate_spherical(spec, rng)


def _resolve_rng(spec, rng):
    return np.random.default_rng(spec.seed) if rng is None else rng


def cluster_means(K, mu, n_inf=N_INFORMATIVE_SPHERICAL):
    """Mean vectors of the informative block, one row per cluster id 1..K."""
    if K == 2:
        return np.vstack([mu * np.ones(n_inf), -mu * np.ones(n_inf)])
    if K == 4:
        half = n_inf // 2
        blocks = [(+1, -1), (-1, -1), (-1, +1), (+1, +1)]
        return np.vstack([
            np.concatenate([s1 * mu * np.ones(half), s2 * mu * np.ones(n_inf - half)])
            for s1, s2 in blocks
        ])
    raise ValueError(f"spherical settings define K in {{2, 4}}, got {K}")


def generate_spherical(spec, rng=None):
    """Raw data, true labels (1..K), and the informative set {1..20}."""
    if spec.setting not in (1, 2, 3, 4):
        raise ValueError("generate_spherical handles settings 1-4")
    rng = _resolve_rng(spec, rng)
    means = cluster_means(spec.K, spec.mu)
    labels = rng.integers(1, spec.K + 1, size=spec.n)
    X = rng.standard_normal((spec.n, spec.p))
    X[:, :N_INFORMATIVE_SPHERICAL] += means[labels - 1]
    informative = frozenset(range(1, N_INFORMATIVE_SPHERICAL + 1))
    return X, labels, informative


def generate_half_moons(spec, rng=None, arc_noise=0.1, noise_var=0.5):
    """Two interlocking half moons in features 1-2, Gaussian noise elsewhere.

    Arc 1 is (cos t, sin t) and arc 2 is (1 - cos t, 0.5 - sin t) for
    t ~ Uniform[0, pi], plus N(0, arc_noise^2) coordinate noise; the
    remaining p - 2 features are N(0, noise_var).
    """
    if spec.setting != 5:
        raise ValueError("generate_half_moons handles setting 5")
    rng = _resolve_rng(spec, rng)
    n, p = spec.n, spec.p
    labels = rng.integers(1, 3, size=n)
    theta = rng.uniform(0.0, np.pi, size=n)
    X = np.empty((n, p))
    arc1 = labels == 1
    X[arc1, 0] = np.cos(theta[arc1])
    X[arc1, 1] = np.sin(theta[arc1])
    X[~arc1, 0] = 1.0 - np.cos(theta[~arc1])
    X[~arc1, 1] = 0.5 - np.sin(theta[~arc1])
    X[:, :2] += arc_noise * rng.standard_normal((n, 2))
    X[:, 2:] = np.sqrt(noise_var) * rng.standard_normal((n, p - 2))
    return X, labels, frozenset({1, 2})
