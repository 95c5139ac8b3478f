"""Deterministic synthetic luma content for tests and experiments."""

from __future__ import annotations

import numpy as np

from .transform_quant import PixelPlane


def gradient_plane(width=176, height=144, seed=0, noise=3.0, texture=18.0) -> PixelPlane:
    """Smooth gradient with a low-frequency texture and mild Gaussian noise."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    phase = rng.uniform(0, 2 * np.pi, size=2)
    img = (
        60.0
        + 100.0 * xx / max(width - 1, 1)
        + 50.0 * yy / max(height - 1, 1)
        + texture * np.sin(xx / 7.0 + phase[0]) * np.cos(yy / 5.0 + phase[1])
        + rng.normal(0.0, noise, size=xx.shape)
    )
    return PixelPlane(np.clip(np.rint(img), 0, 255).astype(np.uint8))


def clip(frames=3, width=176, height=144, seed=0, **kw) -> list[PixelPlane]:
    """A short clip whose texture drifts a little from frame to frame."""
    return [gradient_plane(width, height, seed=seed + k, **kw) for k in range(frames)]


def random_levels(rng, frames, mb_count, density=0.25, scale=2.0) -> np.ndarray:
    """Sparse Laplacian-ish levels, with AC15 drawn so every class occurs."""
    shape = (frames, mb_count, 16, 16)
    mags = np.ceil(rng.exponential(scale, size=shape)).astype(np.int32)
    signs = rng.choice(np.array([-1, 1], dtype=np.int32), size=shape)
    levels = np.where(rng.random(shape) < density, mags * signs, 0)
    empty = rng.random(shape[:3]) < 0.15
    levels[empty, :15] = 0
    ac15 = rng.choice(np.array([0, 0, 0, 0, 1, -1, 2, -3], dtype=np.int32), size=shape[:3])
    levels[..., 15] = ac15
    return levels.astype(np.int32)
