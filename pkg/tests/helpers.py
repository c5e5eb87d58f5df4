"""Shared fixtures-by-hand for the test suite."""

import numpy as np

from tribasis import (
    CoefficientVector,
    FunctionObservation,
    NOISY_EVALS,
    SobolevSpec,
    reconstruct,
    sample_input_function,
)


def observe(coeffs: CoefficientVector, n: int, noise_sd: float, rng) -> FunctionObservation:
    """Noisy evaluations of a coefficient-space function at uniform points."""
    d = coeffs.index_set.dimension
    pts = rng.uniform(size=(n, d))
    vals = reconstruct(coeffs, pts) + noise_sd * rng.standard_normal(n)
    return FunctionObservation(NOISY_EVALS, pts, vals)


def identity_task(root_seed: int, n_train: int, n_test: int, n_points: int,
                  noise_sd: float = 0.1, amplitude: float = 2.0):
    """Dataset whose output function equals its input function.

    Returns (train_pairs, test_pairs, test_truths).
    """
    spec = SobolevSpec(np.ones(1), np.ones(1), amplitude)
    children = np.random.SeedSequence(root_seed).spawn(n_train + n_test)
    pairs, truths = [], []
    for child in children:
        rng = np.random.default_rng(child)
        p = sample_input_function(spec, rng)
        pairs.append((observe(p, n_points, noise_sd, rng),
                      observe(p, n_points, noise_sd, rng)))
        truths.append(p)
    return pairs[:n_train], pairs[n_train:], truths[n_train:]


def cosine_basis_reference(alpha, x):
    """Basis functions recomputed from their closed form, independent of the
    library's evaluation kernels. alpha is a multi-index, x an (n, d) array."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.ones(x.shape[0])
    for axis, j in enumerate(alpha):
        if j > 0:
            out = out * (np.sqrt(2.0) * np.cos(np.pi * j * x[:, axis]))
    return out
