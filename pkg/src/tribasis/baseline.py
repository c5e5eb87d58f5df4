"""Linear smoother baseline: a kernel-weighted average of training output
functions, with weights from an Epanechnikov kernel on input-coefficient
distances.

This estimator must touch every stored training instance per prediction;
that linear cost is the point of comparison for the scalable estimator, so
no indexing structures are used to speed up the distance scan.
"""

from dataclasses import dataclass

import numpy as np

from .basis import (
    BasisIndexSet,
    CoefficientVector,
    FunctionObservation,
    project,
    project_coefficients,
)

EPANECHNIKOV = "epanechnikov"


def kernel_weight(u):
    """Epanechnikov profile max(0, 1 - u^2): symmetric, bounded support."""
    u = np.asarray(u, dtype=float)
    return np.maximum(0.0, 1.0 - u * u)


@dataclass
class LinearSmootherModel:
    """Stored projections of the full training set plus a bandwidth.

    Memory grows linearly with the number of training pairs; prediction
    scans all of them.
    """

    input_index_set: BasisIndexSet
    output_index_set: BasisIndexSet
    train_inputs: np.ndarray
    train_outputs: np.ndarray
    bandwidth: float
    kernel_tag: str = EPANECHNIKOV

    def __post_init__(self):
        tin = np.asarray(self.train_inputs, dtype=float)
        tout = np.asarray(self.train_outputs, dtype=float)
        if tin.ndim != 2 or tout.ndim != 2 or tin.shape[0] != tout.shape[0]:
            raise ValueError("training coefficient matrices must align")
        if tin.shape[0] < 1:
            raise ValueError("at least one training pair required")
        if tin.shape[1] != len(self.input_index_set):
            raise ValueError("input coefficients do not match the input index set")
        if tout.shape[1] != len(self.output_index_set):
            raise ValueError("output coefficients do not match the output index set")
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")
        if self.kernel_tag != EPANECHNIKOV:
            raise ValueError(f"unknown kernel tag {self.kernel_tag!r}")
        self.train_inputs = tin
        self.train_outputs = tout

    @property
    def training_count(self) -> int:
        return self.train_inputs.shape[0]


def lse_fit(
    dataset,
    input_index_set: BasisIndexSet,
    output_index_set: BasisIndexSet,
    bandwidth: float,
) -> LinearSmootherModel:
    """Project and store every training pair; nothing else is precomputed."""
    dataset = list(dataset)
    if not dataset:
        raise ValueError("dataset must be non-empty")
    tin = np.vstack([project(p, input_index_set).coefficients for p, _ in dataset])
    tout = np.vstack([project(q, output_index_set).coefficients for _, q in dataset])
    return LinearSmootherModel(
        input_index_set=input_index_set,
        output_index_set=output_index_set,
        train_inputs=tin,
        train_outputs=tout,
        bandwidth=float(bandwidth),
    )


def lse_weights(model: LinearSmootherModel, input_coeffs: np.ndarray) -> np.ndarray:
    """Normalized kernel weights of the query against every training input;
    all-zero when the query is outside every kernel support."""
    diffs = model.train_inputs - input_coeffs
    dists = np.sqrt((diffs * diffs).sum(axis=1))
    w = kernel_weight(dists / model.bandwidth)
    total = w.sum()
    if total <= 0.0:
        return np.zeros_like(w)
    return w / total


def lse_predict(
    model: LinearSmootherModel, input_obs: FunctionObservation
) -> CoefficientVector:
    """Kernel-weighted average of training outputs; the all-zero vector when
    every training input is outside the kernel support."""
    a = project_coefficients(input_obs, model.input_index_set)
    w = lse_weights(model, a)
    return CoefficientVector(model.output_index_set, w @ model.train_outputs)


def lse_fit_cv(
    dataset,
    input_index_set: BasisIndexSet,
    output_index_set: BasisIndexSet,
    bandwidth_grid,
    seed: int,
    holdout_fraction: float = 0.2,
):
    """Pick the bandwidth on one seeded 80/20 split (same protocol as the
    triple-basis hyperparameter search), then refit on all data.

    Returns (model, validation_mse).
    """
    dataset = list(dataset)
    if len(dataset) < 2:
        raise ValueError("bandwidth search needs at least two instances")
    bandwidth_grid = [float(b) for b in bandwidth_grid]
    if not bandwidth_grid:
        raise ValueError("bandwidth_grid must be non-empty")
    tin = np.vstack([project(p, input_index_set).coefficients for p, _ in dataset])
    tout = np.vstack([project(q, output_index_set).coefficients for _, q in dataset])
    n = len(dataset)
    order = np.random.default_rng(seed).permutation(n)
    n_val = max(1, int(round(holdout_fraction * n)))
    val_idx, train_idx = order[:n_val], order[n_val:]

    best = None
    for bw in bandwidth_grid:
        sub = LinearSmootherModel(
            input_index_set=input_index_set,
            output_index_set=output_index_set,
            train_inputs=tin[train_idx],
            train_outputs=tout[train_idx],
            bandwidth=bw,
        )
        sse = 0.0
        for i in val_idx:
            pred = lse_weights(sub, tin[i]) @ sub.train_outputs
            resid = pred - tout[i]
            sse += float(resid @ resid)
        mse = sse / len(val_idx)
        if best is None or mse < best[0]:
            best = (mse, bw)

    mse, bw = best
    model = LinearSmootherModel(
        input_index_set=input_index_set,
        output_index_set=output_index_set,
        train_inputs=tin,
        train_outputs=tout,
        bandwidth=bw,
    )
    return model, mse
