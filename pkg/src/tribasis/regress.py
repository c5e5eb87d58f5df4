"""The triple-basis estimator: a linear map from random cosine features of
input projection coefficients to output projection coefficients.

Training accumulates the feature Gram matrix and the feature/target cross
product, so memory stays O(D^2 + D*r) no matter how many instances are
seen, and shards built independently merge by entrywise addition. The
linear system is solved by a symmetric positive-definite factorization
(ridge) or, for the plain least-squares case, a condition-guarded
factorization with a pivoted symmetric fallback; an explicit inverse is
never formed.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

from .basis import (
    BasisIndexSet,
    CoefficientVector,
    FunctionObservation,
    project,
    project_coefficients,
    select_truncation,
)
from .features import RksFeatureMap, compute_features, compute_features_batch

DEFAULT_MAX_CONDITION = 1e12
_BATCH_ROWS = 4096


class IllConditionedError(RuntimeError):
    """Raised when a plain least-squares solve meets a numerically singular
    Gram matrix; carries the condition estimate."""

    def __init__(self, condition_estimate: float, max_condition: float):
        self.condition_estimate = float(condition_estimate)
        self.max_condition = float(max_condition)
        super().__init__(
            f"gram matrix condition estimate {condition_estimate:.3e} exceeds "
            f"the ridgeless limit {max_condition:.3e}; use a positive ridge "
            "penalty"
        )


@dataclass
class TrainingSummary:
    """Accumulated normal-equation blocks: gram (D, D), cross (D, r), and
    the instance count."""

    gram: np.ndarray
    cross: np.ndarray
    count: int = 0

    def __post_init__(self):
        gram = np.asarray(self.gram, dtype=float)
        cross = np.asarray(self.cross, dtype=float)
        if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
            raise ValueError("gram must be square")
        if cross.ndim != 2 or cross.shape[0] != gram.shape[0]:
            raise ValueError("cross must have one row per feature")
        if self.count < 0:
            raise ValueError("count must be non-negative")
        self.gram = gram
        self.cross = cross

    @classmethod
    def zeros(cls, feature_count: int, output_dim: int) -> "TrainingSummary":
        return cls(
            np.zeros((feature_count, feature_count)),
            np.zeros((feature_count, output_dim)),
            0,
        )

    @property
    def feature_count(self) -> int:
        return self.gram.shape[0]

    @property
    def output_dim(self) -> int:
        return self.cross.shape[1]

    def merge(self, other: "TrainingSummary") -> "TrainingSummary":
        """Entrywise sum of two summaries (shards commute up to round-off)."""
        if self.gram.shape != other.gram.shape or self.cross.shape != other.cross.shape:
            raise ValueError("summary shapes do not match")
        return TrainingSummary(
            self.gram + other.gram, self.cross + other.cross, self.count + other.count
        )


def accumulate(
    summary: TrainingSummary,
    input_coeffs: CoefficientVector,
    output_coeffs: CoefficientVector,
    fmap: RksFeatureMap,
) -> TrainingSummary:
    """Fold one training pair into a summary (inputs are not mutated)."""
    if fmap.input_dim != len(input_coeffs):
        raise ValueError(
            f"feature map expects {fmap.input_dim} input coefficients, "
            f"got {len(input_coeffs)}"
        )
    if fmap.feature_count != summary.feature_count:
        raise ValueError("feature map and summary disagree on feature count")
    if len(output_coeffs) != summary.output_dim:
        raise ValueError(
            f"summary expects {summary.output_dim} output coefficients, "
            f"got {len(output_coeffs)}"
        )
    z = compute_features(fmap, input_coeffs.coefficients)
    return TrainingSummary(
        summary.gram + np.outer(z, z),
        summary.cross + np.outer(z, output_coeffs.coefficients),
        summary.count + 1,
    )


def _accumulate_matrices(
    inputs: np.ndarray, outputs: np.ndarray, fmap: RksFeatureMap
) -> TrainingSummary:
    """Batched equivalent of repeated accumulate over coefficient rows."""
    n = inputs.shape[0]
    gram = np.zeros((fmap.feature_count, fmap.feature_count))
    cross = np.zeros((fmap.feature_count, outputs.shape[1]))
    for start in range(0, n, _BATCH_ROWS):
        stop = min(start + _BATCH_ROWS, n)
        z = compute_features_batch(fmap, inputs[start:stop])
        gram += z.T @ z
        cross += z.T @ outputs[start:stop]
    return TrainingSummary(gram, cross, n)


def solve(
    summary: TrainingSummary,
    ridge_lambda: float,
    max_condition: float = DEFAULT_MAX_CONDITION,
) -> np.ndarray:
    """Solve (gram + lambda * I) psi = cross for the coefficient matrix.

    lambda = 0 is ordinary least squares and requires the Gram matrix to be
    numerically non-singular; a condition estimate past ``max_condition``
    raises IllConditionedError. Borderline ridgeless systems fall back to a
    pivoted symmetric solve.
    """
    if ridge_lambda < 0:
        raise ValueError("ridge penalty must be non-negative")
    lhs = summary.gram
    if ridge_lambda > 0:
        lhs = lhs + ridge_lambda * np.eye(summary.feature_count)
        try:
            factor = sla.cho_factor(lhs, lower=True, check_finite=False)
        except sla.LinAlgError:
            # accumulated grams are positive semidefinite only up to
            # round-off; a penalty below that noise can leave the shifted
            # matrix numerically indefinite
            return sla.solve(lhs, summary.cross, assume_a="sym", check_finite=False)
        return sla.cho_solve(factor, summary.cross, check_finite=False)

    try:
        factor = sla.cho_factor(lhs, lower=True, check_finite=False)
    except sla.LinAlgError:
        cond = np.linalg.cond(lhs)
        raise IllConditionedError(cond, max_condition) from None
    anorm = np.abs(lhs).sum(axis=0).max()
    rcond, info = sla.lapack.dpocon(factor[0], anorm, uplo="L")
    cond = np.inf if rcond == 0 or info != 0 else 1.0 / rcond
    if cond > max_condition:
        raise IllConditionedError(cond, max_condition)
    if cond > max_condition * 1e-4:
        # borderline: pivoted symmetric (Bunch-Kaufman) solve is sturdier
        return sla.solve(lhs, summary.cross, assume_a="sym", check_finite=False)
    return sla.cho_solve(factor, summary.cross, check_finite=False)


@dataclass
class TripleBasisModel:
    """Fitted function-to-function regressor.

    Holds the input/output index sets, the frozen feature map, the solved
    coefficient matrix psi (D, r), and the ridge penalty used. Prediction
    cost does not depend on ``training_count``.
    """

    input_index_set: BasisIndexSet
    output_index_set: BasisIndexSet
    feature_map: RksFeatureMap
    psi: np.ndarray
    ridge_lambda: float
    basis_tag: str = "cosine"
    training_count: int = 0

    def __post_init__(self):
        # C layout keeps prediction matmuls on one BLAS path, so a model
        # reloaded from its file predicts bit-identically
        psi = np.ascontiguousarray(self.psi, dtype=float)
        expected = (self.feature_map.feature_count, len(self.output_index_set))
        if psi.shape != expected:
            raise ValueError(f"psi shape {psi.shape} does not match {expected}")
        if self.feature_map.input_dim != len(self.input_index_set):
            raise ValueError(
                "feature map input_dim does not match the input index set size"
            )
        if self.ridge_lambda < 0:
            raise ValueError("ridge penalty must be non-negative")
        self.psi = psi


def fit(
    dataset,
    input_index_set: BasisIndexSet,
    output_index_set: BasisIndexSet,
    fmap: RksFeatureMap,
    ridge_lambda: float = 0.0,
    max_condition: float = DEFAULT_MAX_CONDITION,
) -> TripleBasisModel:
    """Project every observation pair, accumulate, solve, wrap as a model.

    ``dataset`` is a sequence of (input, output) FunctionObservation pairs.
    """
    dataset = list(dataset)
    if not dataset:
        raise ValueError("dataset must be non-empty")
    inputs = np.vstack(
        [project(p, input_index_set).coefficients for p, _ in dataset]
    )
    outputs = np.vstack(
        [project(q, output_index_set).coefficients for _, q in dataset]
    )
    summary = _accumulate_matrices(inputs, outputs, fmap)
    psi = solve(summary, ridge_lambda, max_condition)
    return TripleBasisModel(
        input_index_set=input_index_set,
        output_index_set=output_index_set,
        feature_map=fmap,
        psi=psi,
        ridge_lambda=float(ridge_lambda),
        training_count=len(dataset),
    )


def predict_coeffs(
    model: TripleBasisModel, input_obs: FunctionObservation
) -> CoefficientVector:
    """Predicted output projection coefficients for one input observation.

    Cost is projection + featurization + one matrix-vector product,
    independent of how many instances the model was trained on.
    """
    a = project_coefficients(input_obs, model.input_index_set)
    z = compute_features(model.feature_map, a)
    return CoefficientVector(model.output_index_set, z @ model.psi)


def predict_function(model: TripleBasisModel, input_obs: FunctionObservation, x):
    """Predicted output function evaluated at x (point or batch)."""
    from .basis import reconstruct

    return reconstruct(predict_coeffs(model, input_obs), x)


def average_truncation_radius(
    observations,
    candidate_radii,
    folds: int = 5,
    subset_limit: int = 50,
) -> float:
    """Average of per-observation cross-validated truncation radii.

    Only the first ``subset_limit`` observations are cross-validated; small
    subsets are known to give stable averages at a fraction of the cost.
    """
    observations = list(observations)
    if not observations:
        raise ValueError("need at least one observation")
    subset = observations[: max(1, min(subset_limit, len(observations)))]
    radii = [select_truncation(o, candidate_radii, folds) for o in subset]
    return float(np.mean(radii))


@dataclass
class CvResult:
    """Outcome of the held-out hyperparameter search."""

    model: TripleBasisModel
    bandwidth: float
    ridge_lambda: float
    validation_mse: float
    grid: list = field(default_factory=list)


def fit_cv(
    dataset,
    input_index_set: BasisIndexSet,
    output_index_set: BasisIndexSet,
    feature_count: int,
    seed: int,
    bandwidth_grid=(0.25, 0.5, 1.0, 2.0, 4.0),
    lambda_grid=(1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 1.0),
    holdout_fraction: float = 0.2,
) -> CvResult:
    """Grid-search (bandwidth, ridge) on one seeded 80/20 split, scored by
    held-out output-coefficient mean squared error, then refit on all data.

    Ties keep the first grid point in iteration order.
    """
    from .features import sample_feature_map

    dataset = list(dataset)
    if len(dataset) < 2:
        raise ValueError("hyperparameter search needs at least two instances")
    inputs = np.vstack(
        [project(p, input_index_set).coefficients for p, _ in dataset]
    )
    outputs = np.vstack(
        [project(q, output_index_set).coefficients for _, q in dataset]
    )
    n = len(dataset)
    order = np.random.default_rng(seed).permutation(n)
    n_val = max(1, int(round(holdout_fraction * n)))
    val_idx, train_idx = order[:n_val], order[n_val:]

    best = None
    grid_log = []
    for bw in bandwidth_grid:
        fmap = sample_feature_map(inputs.shape[1], feature_count, bw, seed)
        z_train = compute_features_batch(fmap, inputs[train_idx])
        z_val = compute_features_batch(fmap, inputs[val_idx])
        summary = TrainingSummary(
            z_train.T @ z_train, z_train.T @ outputs[train_idx], len(train_idx)
        )
        for lam in lambda_grid:
            psi = solve(summary, lam)
            resid = z_val @ psi - outputs[val_idx]
            mse = float((resid * resid).sum() / len(val_idx))
            grid_log.append({"bandwidth": bw, "ridge_lambda": lam, "mse": mse})
            if best is None or mse < best[0]:
                best = (mse, bw, lam)

    mse, bw, lam = best
    fmap = sample_feature_map(inputs.shape[1], feature_count, bw, seed)
    summary = _accumulate_matrices(inputs, outputs, fmap)
    psi = solve(summary, lam)
    model = TripleBasisModel(
        input_index_set=input_index_set,
        output_index_set=output_index_set,
        feature_map=fmap,
        psi=psi,
        ridge_lambda=float(lam),
        training_count=n,
    )
    return CvResult(
        model=model,
        bandwidth=float(bw),
        ridge_lambda=float(lam),
        validation_mse=mse,
        grid=grid_log,
    )
