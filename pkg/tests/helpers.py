"""Shared generators for randomized test problems."""

from __future__ import annotations

import numpy as np

from coupledfix import Box, make_linear_operator


def random_linear_operator(rng, d=None, norm_sum=None, radius=2.0, name="linear"):
    """Random linear-family operator that maps its box domain into itself.

    Both matrices are scaled so that the spectral norm AND the max-row-sum
    norm stay below their share of ``norm_sum``; the box is centered at the
    solved fixed point with the given radius, so F(C x C) stays inside C by
    the row-sum bound and the attached fixed point is interior.
    """
    if d is None:
        d = int(rng.integers(1, 21))
    if norm_sum is None:
        norm_sum = float(rng.uniform(0.3, 0.945))
    split = float(rng.uniform(0.15, 0.85))
    targets = (norm_sum * split, norm_sum * (1.0 - split))
    mats = []
    for target in targets:
        m = rng.standard_normal((d, d))
        scale = max(np.linalg.norm(m, 2), np.linalg.norm(m, np.inf))
        mats.append(m * (target / scale))
    a, b = mats
    xbar = rng.uniform(-radius / 2, radius / 2, size=d)
    c = (np.eye(d) - a - b) @ xbar
    box = Box(xbar - radius, xbar + radius)
    return make_linear_operator(a, b, c, box, name=name)


def sample_in_box(rng, box, n=None):
    if n is None:
        return rng.uniform(box.lower, box.upper)
    return rng.uniform(box.lower, box.upper, size=(n, box.dim))
