"""Heuristic hopping-rate estimate from sampled single-flip energy gaps.

The dynamic coefficient chi = x / (1 + x)^2 with x = zeta / gamma peaks at
0.25 exactly when the scaled gap zeta matches the hopping rate. Averaging chi
over sampled bit-flip pairs and maximizing over gamma yields gamma_heur.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class ChiEstimate:
    chi_bar: float
    err: float
    n_samples: int


def default_gamma_grid() -> np.ndarray:
    """0.05 .. 3.2 in steps of 0.05 (64 points)."""
    return np.linspace(0.05, 3.2, 64)


def dynamic_coefficient(zeta, gamma: float):
    """chi = x/(1+x)^2 with x = zeta/gamma; in [0, 0.25], maximal at zeta = gamma."""
    if gamma <= 0:
        raise InvalidArgumentError(f"gamma must be > 0, got {gamma}")
    z = np.asarray(zeta, dtype=np.float64)
    if np.any(z < 0):
        raise InvalidArgumentError("zeta must be >= 0")
    x = z / gamma
    out = x / (1.0 + x) ** 2
    return float(out) if np.isscalar(zeta) else out


def sample_gaps(diag: np.ndarray, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Sample zeta = |E_j - E_k| / 2 over uniformly random single-bit-flip pairs."""
    if n_samples < 1:
        raise InvalidArgumentError(f"n_samples must be >= 1, got {n_samples}")
    diag = np.asarray(diag, dtype=np.float64)
    m = int(round(np.log2(len(diag))))
    if (1 << m) != len(diag):
        raise InvalidArgumentError("diag length must be a power of two")
    j = rng.integers(0, len(diag), size=n_samples)
    qubit = rng.integers(0, m, size=n_samples)
    k = j ^ (1 << (m - 1 - qubit))
    return np.abs(diag[j] - diag[k]) / 2.0


def exhaustive_gaps(diag: np.ndarray) -> np.ndarray:
    """zeta over every hypercube edge, each edge once (oracle for sampling tests)."""
    diag = np.asarray(diag, dtype=np.float64)
    m = int(round(np.log2(len(diag))))
    z = np.arange(len(diag), dtype=np.int64)
    out = []
    for q in range(m):
        mask = 1 << (m - 1 - q)
        lower = z[(z & mask) == 0]
        out.append(np.abs(diag[lower] - diag[lower | mask]) / 2.0)
    return np.concatenate(out)


def chi_bar(samples: np.ndarray, gamma: float) -> ChiEstimate:
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise InvalidArgumentError("need at least one gap sample")
    chi = dynamic_coefficient(samples, gamma)
    return ChiEstimate(
        chi_bar=float(np.mean(chi)),
        err=0.25 / np.sqrt(samples.size),
        n_samples=int(samples.size),
    )


def chi_curve(diag, gamma_grid, n_samples: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """chi_bar over a gamma grid, reusing one shared sample set for every point."""
    grid = np.asarray(gamma_grid, dtype=np.float64)
    if grid.ndim != 1 or len(grid) < 1:
        raise InvalidArgumentError("gamma grid must be a nonempty 1-D array")
    samples = sample_gaps(diag, n_samples, rng)
    values = np.array([chi_bar(samples, g).chi_bar for g in grid])
    return values, samples


def gamma_heur(diag, gamma_grid, n_samples: int, rng) -> float:
    """Grid argmax of chi_bar; ties resolve toward the smaller gamma."""
    grid = np.asarray(gamma_grid, dtype=np.float64)
    if len(grid) < 2:
        raise InvalidArgumentError("gamma grid needs >= 2 points")
    values, _ = chi_curve(diag, grid, n_samples, rng)
    return float(grid[int(np.argmax(values))])
