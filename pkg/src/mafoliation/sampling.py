"""Seeded point sampling and grids for scans.

The sampling measure is uniform on the real 2n-cube [-r, r]^{2n} identified
with C^n via interleaved (re, im) pairs; points with rho below a floor are
rejected. Identical seeds reproduce identical samples.
"""

from __future__ import annotations

import numpy as np

DEFAULT_BOX = 1.5
DEFAULT_MIN_RHO = 1e-12


def complex_from_reals(x):
    """Map (..., 2n) real coordinates to (..., n) complex (re, im interleaved)."""
    x = np.asarray(x, dtype=float)
    return x[..., 0::2] + 1j * x[..., 1::2]


def sample_box(dim, count, radius=DEFAULT_BOX, rng=None):
    """Uniform complex points in the 2n-cube, no domain filtering."""
    rng = np.random.default_rng(rng)
    return complex_from_reals(rng.uniform(-radius, radius, size=(count, 2 * dim)))


def sample_domain(
    p,
    count,
    radius=DEFAULT_BOX,
    rng=None,
    min_rho=DEFAULT_MIN_RHO,
    rho_max=None,
    max_batches=1000,
):
    """Rejection-sample `count` points with rho > min_rho (and rho < rho_max).

    Deterministic for a given seed/generator state.
    """
    rng = np.random.default_rng(rng)
    kept = []
    have = 0
    for _ in range(max_batches):
        batch = sample_box(p.dim, max(count, 64), radius, rng)
        rho = p.evaluate_many(batch).real
        mask = rho > min_rho
        if rho_max is not None:
            mask &= rho < rho_max
        good = batch[mask]
        if len(good):
            kept.append(good)
            have += len(good)
        if have >= count:
            break
    else:
        raise ValueError(
            f"could not collect {count} admissible samples in {max_batches} batches"
        )
    return np.concatenate(kept, axis=0)[:count]


def real_grid(dim, per_axis, radius=DEFAULT_BOX):
    """Uniform grid over the real 2n-cube: per_axis**(2*dim) complex points."""
    axes = [np.linspace(-radius, radius, per_axis)] * (2 * dim)
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = np.stack([m.ravel() for m in mesh], axis=-1)
    return complex_from_reals(flat)
