"""Command-line entry point and benchmark harness.

Subcommands: fit, predict, eval, bench, synth, window. Datasets travel as
JSON lines (one observation pair per line); raw scalar series are plain
one-number-per-line text. Reports are JSON documents whose non-timing
fields reproduce exactly from the recorded seed and config.

Exit codes: 0 success, 1 user error (bad flags, unreadable or invalid
files), 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import _accel
from .baseline import LinearSmootherModel, lse_fit, lse_fit_cv, lse_predict
from .basis import (
    NOISY_EVALS,
    BasisIndexSet,
    CoefficientVector,
    FunctionObservation,
    SobolevSpec,
    design_matrix,
    enumerate_ball,
    project,
)
from .features import sample_feature_map
from .modelio import load_model, save_model
from .regress import TripleBasisModel, average_truncation_radius, fit, fit_cv, predict_coeffs
from .synth import SyntheticConfig, generate_dataset, make_mapping

REPORT_FORMAT_VERSION = 1
KNOWN_METHODS = ("triple-basis", "linear-smoother", "mean")
DEFAULT_RADII = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0)
MAX_FEATURES = 20_000


class DatasetFormatError(ValueError):
    """Invalid dataset file; messages carry 1-based line numbers."""


# --------------------------------------------------------------------------
# dataset ingestion / emission


def _obs_to_json(obs: FunctionObservation) -> dict:
    doc = {"kind": obs.kind, "points": obs.points.tolist()}
    if obs.values is not None:
        doc["values"] = obs.values.tolist()
    return doc


def _obs_from_json(doc, line_no: int) -> FunctionObservation:
    if not isinstance(doc, dict):
        raise DatasetFormatError(f"line {line_no}: observation must be an object")
    kind = doc.get("kind", NOISY_EVALS)
    points = doc.get("points")
    if points is None:
        raise DatasetFormatError(f"line {line_no}: observation missing 'points'")
    try:
        return FunctionObservation(kind, points, doc.get("values"))
    except ValueError as exc:
        raise DatasetFormatError(f"line {line_no}: {exc}") from None


def write_dataset(pairs, path) -> None:
    """Emit observation pairs as JSON lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for pin, pout in pairs:
            doc = {"input": _obs_to_json(pin)}
            if pout is not None:
                doc["output"] = _obs_to_json(pout)
            fh.write(json.dumps(doc) + "\n")


def ingest_dataset(path, fmt: str = "jsonl", require_output: bool = True):
    """Read and validate a dataset file; returns (input, output) pairs.

    All inputs must share one dimension, likewise all outputs; offending
    lines are named in the error.
    """
    if fmt != "jsonl":
        raise DatasetFormatError(f"unknown dataset format {fmt!r}; known: jsonl")
    pairs = []
    in_dim = out_dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(
                    f"line {line_no}: malformed JSON ({exc.msg})"
                ) from None
            if not isinstance(doc, dict) or "input" not in doc:
                raise DatasetFormatError(
                    f"line {line_no}: each line must be an object with an "
                    "'input' observation"
                )
            pin = _obs_from_json(doc["input"], line_no)
            pout = None
            if "output" in doc:
                pout = _obs_from_json(doc["output"], line_no)
            elif require_output:
                raise DatasetFormatError(
                    f"line {line_no}: missing 'output' observation"
                )
            if in_dim is None:
                in_dim = pin.dimension
            elif pin.dimension != in_dim:
                raise DatasetFormatError(
                    f"line {line_no}: input dimension {pin.dimension} differs "
                    f"from dimension {in_dim} established earlier"
                )
            if pout is not None:
                if out_dim is None:
                    out_dim = pout.dimension
                elif pout.dimension != out_dim:
                    raise DatasetFormatError(
                        f"line {line_no}: output dimension {pout.dimension} "
                        f"differs from dimension {out_dim} established earlier"
                    )
            pairs.append((pin, pout))
    if not pairs:
        raise DatasetFormatError(f"empty dataset: {path}")
    return pairs


def read_series(path) -> np.ndarray:
    """Read a raw scalar series: one number per line, blanks skipped."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise DatasetFormatError(
                    f"line {line_no}: not a number: {text!r}"
                ) from None
    if not values:
        raise DatasetFormatError(f"empty series: {path}")
    return np.asarray(values, dtype=float)


# --------------------------------------------------------------------------
# series windowing

FORWARD = "forward"
CO_OCCURRING = "co-occurring"


@dataclass(frozen=True)
class SeriesWindowing:
    """How a scalar series is cut into function observations."""

    window_length: int
    mode: str = FORWARD
    stride: int | None = None

    def __post_init__(self):
        if self.window_length < 2:
            raise ValueError("window_length must be at least 2")
        if self.mode not in (FORWARD, CO_OCCURRING):
            raise ValueError(
                f"unknown windowing mode {self.mode!r}; known: "
                f"{FORWARD!r}, {CO_OCCURRING!r}"
            )
        stride = self.window_length if self.stride is None else self.stride
        if stride < 1:
            raise ValueError("stride must be at least 1")
        object.__setattr__(self, "stride", int(stride))


@dataclass(frozen=True)
class SeriesTransform:
    """Affine rescale applied to series values before windowing."""

    offset: float
    scale: float

    def apply(self, values):
        return (np.asarray(values, dtype=float) - self.offset) / self.scale

    def invert(self, values):
        return self.offset + self.scale * np.asarray(values, dtype=float)


def _window_obs(values: np.ndarray, start: int, w: int) -> FunctionObservation:
    pts = (np.arange(w) + 0.5) / w
    return FunctionObservation(NOISY_EVALS, pts, values[start : start + w])


def window_series(values, windowing: SeriesWindowing, co_values=None):
    """Cut a scalar series into observation pairs.

    Forward mode pairs each window with the window that follows it;
    co-occurring mode pairs aligned windows of two series. Values are
    rescaled to [0, 1] by the global min/max; the transform comes back for
    inverse mapping. Returns (pairs, transform).
    """
    series = np.asarray(values, dtype=float).reshape(-1)
    w, stride = windowing.window_length, windowing.stride
    if windowing.mode == FORWARD:
        if co_values is not None:
            raise ValueError("forward windowing uses a single series")
        if series.shape[0] < 2 * w:
            raise ValueError(
                f"series of length {series.shape[0]} too short for forward "
                f"windows of length {w} (need at least {2 * w})"
            )
        lo, hi = float(series.min()), float(series.max())
        transform = SeriesTransform(lo, hi - lo if hi > lo else 1.0)
        scaled = transform.apply(series)
        pairs = []
        start = 0
        while start + 2 * w <= scaled.shape[0]:
            pairs.append(
                (_window_obs(scaled, start, w), _window_obs(scaled, start + w, w))
            )
            start += stride
        return pairs, transform

    if co_values is None:
        raise ValueError("co-occurring windowing needs a second series")
    co = np.asarray(co_values, dtype=float).reshape(-1)
    if co.shape[0] != series.shape[0]:
        raise ValueError("co-occurring series must have equal length")
    if series.shape[0] < w:
        raise ValueError(
            f"series of length {series.shape[0]} too short for windows of "
            f"length {w}"
        )
    both = np.concatenate([series, co])
    lo, hi = float(both.min()), float(both.max())
    transform = SeriesTransform(lo, hi - lo if hi > lo else 1.0)
    scaled_a, scaled_b = transform.apply(series), transform.apply(co)
    pairs = []
    start = 0
    while start + w <= scaled_a.shape[0]:
        pairs.append((_window_obs(scaled_a, start, w), _window_obs(scaled_b, start, w)))
        start += stride
    return pairs, transform


# --------------------------------------------------------------------------
# quadrature evaluation


def midpoint_grid(dimension: int, points_per_axis: int = 1024) -> np.ndarray:
    """Midpoint-rule nodes on the unit cube, (points_per_axis^d, d)."""
    if dimension < 1:
        raise ValueError("dimension must be positive")
    if points_per_axis < 1:
        raise ValueError("points_per_axis must be positive")
    if points_per_axis**dimension > 2**24:
        raise ValueError("quadrature grid too large; reduce points_per_axis")
    axis = (np.arange(points_per_axis) + 0.5) / points_per_axis
    grids = np.meshgrid(*([axis] * dimension), indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)


def quadrature_mse(
    pred_matrix: np.ndarray,
    pred_set: BasisIndexSet,
    truth_matrix: np.ndarray,
    truth_set: BasisIndexSet,
    points_per_axis: int = 1024,
) -> float:
    """Mean (over instances) integrated squared error between reconstructed
    predictions and reconstructed truths, by the midpoint rule."""
    grid = midpoint_grid(pred_set.dimension, points_per_axis)
    pred_vals = design_matrix(pred_set, grid) @ pred_matrix.T
    truth_vals = design_matrix(truth_set, grid) @ truth_matrix.T
    diff = pred_vals - truth_vals
    return float((diff * diff).mean(axis=0).mean())


# --------------------------------------------------------------------------
# prediction wrappers and evaluation


@dataclass
class MeanPredictorModel:
    """Trivial baseline: always predicts the average training output."""

    output_index_set: BasisIndexSet
    mean_coefficients: np.ndarray

    def __post_init__(self):
        mc = np.asarray(self.mean_coefficients, dtype=float).reshape(-1)
        if mc.shape[0] != len(self.output_index_set):
            raise ValueError("mean coefficients do not match the output index set")
        self.mean_coefficients = mc


def model_predict(model, input_obs: FunctionObservation) -> CoefficientVector:
    """Uniform prediction entry point for all three model kinds."""
    if isinstance(model, TripleBasisModel):
        return predict_coeffs(model, input_obs)
    if isinstance(model, LinearSmootherModel):
        return lse_predict(model, input_obs)
    if isinstance(model, MeanPredictorModel):
        return CoefficientVector(model.output_index_set, model.mean_coefficients)
    raise TypeError(f"cannot predict with {type(model).__name__}")


def evaluate_model(
    model,
    test_pairs,
    truth_matrix: np.ndarray,
    truth_set: BasisIndexSet,
    points_per_axis: int = 1024,
):
    """Predict every test input with per-prediction timing (one unmeasured
    warm-up first) and score against the truth by quadrature.

    Returns (mse, median_prediction_seconds, prediction_matrix).
    """
    if not test_pairs:
        raise ValueError("need at least one test pair")
    model_predict(model, test_pairs[0][0])  # warm-up
    preds = []
    times = []
    for pin, _ in test_pairs:
        t0 = time.perf_counter()
        cv = model_predict(model, pin)
        times.append(time.perf_counter() - t0)
        preds.append(cv.coefficients)
    pred_matrix = np.vstack(preds)
    mse = quadrature_mse(
        pred_matrix, model.output_index_set, truth_matrix, truth_set, points_per_axis
    )
    return mse, float(np.median(times)), pred_matrix


# --------------------------------------------------------------------------
# benchmark harness


@dataclass
class BenchmarkConfig:
    """Everything a benchmark run needs; serialized into the report."""

    methods: tuple = KNOWN_METHODS
    seed: int = 0
    data_path: str | None = None
    ordered_split: bool = False
    test_fraction: float = 0.2
    # synthetic task (used when data_path is None)
    train_count: int = 500
    test_count: int = 100
    points_per_function: int = 100
    noise_sd: float = 0.1
    anchor_count: int = 25
    map_sigma: float = 1.0
    input_dim: int = 1
    output_dim: int = 1
    input_amplitude: float = 2.0
    output_amplitude: float = 2.0
    # estimator knobs
    feature_count: int | None = None
    radius_in: float | None = None
    radius_out: float | None = None
    radius_candidates: tuple = DEFAULT_RADII
    folds: int = 5
    sigma_grid: tuple = (0.25, 0.5, 1.0, 2.0, 4.0)
    lambda_grid: tuple = (1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)
    bandwidth_grid: tuple | None = None
    fixed_sigma: float | None = None
    fixed_lambda: float | None = None
    quadrature_points: int = 1024
    report_path: str | None = None
    model_out: str | None = None


def default_feature_count(points_per_function: int) -> int:
    """Feature-count rule of thumb: ceil(n * ln n), capped at 20000."""
    n = max(2, points_per_function)
    return min(MAX_FEATURES, int(math.ceil(n * math.log(n))))


def _split_pairs(pairs, config: BenchmarkConfig):
    n = len(pairs)
    n_test = max(1, int(round(config.test_fraction * n)))
    if n_test >= n:
        raise ValueError("dataset too small to split into train and test")
    if config.ordered_split:
        return pairs[: n - n_test], pairs[n - n_test :], None
    order = np.random.default_rng(config.seed).permutation(n)
    train = [pairs[i] for i in order[: n - n_test]]
    test = [pairs[i] for i in order[n - n_test :]]
    return train, test, order[n - n_test :]


def _derive_bandwidth_grid(train_inputs: np.ndarray, seed: int):
    n = train_inputs.shape[0]
    take = min(n, 200)
    idx = np.random.default_rng(seed).choice(n, size=take, replace=False)
    sub = train_inputs[idx]
    diffs = sub[:, None, :] - sub[None, :, :]
    dists = np.sqrt((diffs * diffs).sum(axis=2))
    med = float(np.median(dists[np.triu_indices(take, k=1)])) if take > 1 else 0.0
    if med <= 0:
        med = 1.0
    return tuple(med * m for m in (0.25, 0.5, 1.0, 2.0, 4.0))


def run_benchmark(config: BenchmarkConfig) -> dict:
    """Fit every requested method, score held-out function-space MSE by
    quadrature, measure median prediction time, and return the report."""
    unknown = [m for m in config.methods if m not in KNOWN_METHODS]
    if unknown:
        raise ValueError(
            f"unknown methods {unknown}; known methods: {list(KNOWN_METHODS)}"
        )
    if not config.methods:
        raise ValueError(f"no methods requested; known: {list(KNOWN_METHODS)}")

    seedseq = np.random.SeedSequence(config.seed)
    map_seed, data_seed, cv_seed = (s.generate_state(1)[0] for s in seedseq.spawn(3))

    truth_all = None
    truth_set = None
    if config.data_path is not None:
        pairs = ingest_dataset(config.data_path)
        if any(q is None for _, q in pairs):
            raise ValueError("benchmark dataset lines must carry outputs")
        train, test, test_idx = _split_pairs(pairs, config)
    else:
        input_spec = SobolevSpec(
            np.ones(config.input_dim), np.ones(config.input_dim),
            config.input_amplitude,
        )
        output_spec = SobolevSpec(
            np.ones(config.output_dim), np.ones(config.output_dim),
            config.output_amplitude,
        )
        mapping = make_mapping(
            input_spec, output_spec, n_anchors=config.anchor_count,
            sigma=config.map_sigma, seed=int(map_seed),
        )
        synth_config = SyntheticConfig(
            input_spec=input_spec,
            output_spec=output_spec,
            noise_sd=config.noise_sd,
            points_per_function=config.points_per_function,
            instance_count=config.train_count + config.test_count,
            seed=int(data_seed),
        )
        pairs, _, truths_out = generate_dataset(synth_config, mapping, return_truth=True)
        train, test = pairs[: config.train_count], pairs[config.train_count :]
        truth_set = mapping.output_index_set
        truth_all = np.vstack([t.coefficients for t in truths_out])
        truth_all = truth_all[config.train_count :]

    in_dim = train[0][0].dimension
    out_dim = train[0][1].dimension
    n_points = train[0][0].n

    if config.radius_in is not None:
        t_in = float(config.radius_in)
    else:
        t_in = average_truncation_radius(
            [p for p, _ in train], config.radius_candidates, config.folds
        )
    if config.radius_out is not None:
        t_out = float(config.radius_out)
    else:
        t_out = average_truncation_radius(
            [q for _, q in train], config.radius_candidates, config.folds
        )
    input_set = enumerate_ball(in_dim, t_in)
    output_set = enumerate_ball(out_dim, t_out)

    if truth_set is None:
        truth_set = output_set
        truth_all = np.vstack(
            [project(q, output_set).coefficients for _, q in test]
        )

    feature_count = config.feature_count or default_feature_count(n_points)
    train_out_coeffs = np.vstack(
        [project(q, output_set).coefficients for _, q in train]
    )

    records = []
    for method in config.methods:
        hyper = {}
        t0 = time.perf_counter()
        if method == "triple-basis":
            if config.fixed_sigma is not None and config.fixed_lambda is not None:
                fmap = sample_feature_map(
                    len(input_set), feature_count, config.fixed_sigma, int(cv_seed)
                )
                model = fit(train, input_set, output_set, fmap, config.fixed_lambda)
                hyper = {
                    "sigma": float(config.fixed_sigma),
                    "lambda": float(config.fixed_lambda),
                }
            else:
                sigma_grid = (
                    (config.fixed_sigma,) if config.fixed_sigma is not None
                    else config.sigma_grid
                )
                lambda_grid = (
                    (config.fixed_lambda,) if config.fixed_lambda is not None
                    else config.lambda_grid
                )
                cv = fit_cv(
                    train, input_set, output_set, feature_count, int(cv_seed),
                    bandwidth_grid=sigma_grid, lambda_grid=lambda_grid,
                )
                model = cv.model
                hyper = {"sigma": cv.bandwidth, "lambda": cv.ridge_lambda}
            if config.model_out:
                save_model(model, config.model_out)
        elif method == "linear-smoother":
            grid = config.bandwidth_grid
            if grid is None:
                train_in_coeffs = np.vstack(
                    [project(p, input_set).coefficients for p, _ in train]
                )
                grid = _derive_bandwidth_grid(train_in_coeffs, int(cv_seed))
            model, _ = lse_fit_cv(train, input_set, output_set, grid, int(cv_seed))
            hyper = {"bandwidth": model.bandwidth}
        else:  # mean
            model = MeanPredictorModel(output_set, train_out_coeffs.mean(axis=0))
        fit_seconds = time.perf_counter() - t0

        mse, mpt, _ = evaluate_model(
            model, test, truth_all, truth_set, config.quadrature_points
        )
        records.append(
            {
                "method": method,
                "mse": mse,
                "mpt_seconds": mpt,
                "fit_seconds": fit_seconds,
                "N": len(train),
                "n": n_points,
                "s": len(input_set),
                "r": len(output_set),
                "D": feature_count if method == "triple-basis" else 0,
                "seed": config.seed,
                "hyperparameters": hyper,
            }
        )

    report = {
        "format_version": REPORT_FORMAT_VERSION,
        "seed": config.seed,
        "backend": _accel.backend_name(),
        "radius_in": t_in,
        "radius_out": t_out,
        "config": _config_doc(config),
        "records": records,
    }
    if config.report_path:
        with open(config.report_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
    return report


def _config_doc(config: BenchmarkConfig) -> dict:
    doc = asdict(config)
    doc["methods"] = list(config.methods)
    doc["radius_candidates"] = list(config.radius_candidates)
    doc["sigma_grid"] = list(config.sigma_grid)
    doc["lambda_grid"] = list(config.lambda_grid)
    if config.bandwidth_grid is not None:
        doc["bandwidth_grid"] = list(config.bandwidth_grid)
    return doc


# --------------------------------------------------------------------------
# CLI plumbing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self.prog + ": error: " + message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="tribasis", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a model and save it")
    p_fit.add_argument("--data", required=True, help="JSON-lines dataset")
    p_fit.add_argument("--model", required=True, help="output model file")
    p_fit.add_argument(
        "--method", default="triple-basis",
        choices=["triple-basis", "linear-smoother"],
    )
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--sigma", type=float, default=None,
                       help="fix the feature bandwidth (skips its grid search)")
    p_fit.add_argument("--lambda", dest="ridge_lambda", type=float, default=None,
                       help="fix the ridge penalty (skips its grid search)")
    p_fit.add_argument("--features", type=int, default=None, metavar="D")
    p_fit.add_argument("--radius-in", type=float, default=None)
    p_fit.add_argument("--radius-out", type=float, default=None)
    p_fit.add_argument("--folds", type=int, default=5)
    p_fit.add_argument("--bandwidth", type=float, default=None,
                       help="fix the smoother bandwidth (linear-smoother only)")

    p_pred = sub.add_parser("predict", help="predict output coefficients")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--data", required=True,
                        help="JSON-lines inputs ('output' fields optional)")
    p_pred.add_argument("--out", required=True, help="output JSON-lines file")
    p_pred.add_argument("--grid", type=int, default=0,
                        help="also emit values on a midpoint grid this fine")

    p_eval = sub.add_parser("eval", help="score a saved model on a dataset")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--report", default=None)
    p_eval.add_argument("--quadrature", type=int, default=1024)

    p_bench = sub.add_parser("bench", help="run the benchmark harness")
    p_bench.add_argument("--report", required=True)
    p_bench.add_argument("--methods", default="triple-basis,linear-smoother,mean")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--data", default=None, help="JSON-lines dataset; "
                         "omit to run the synthetic task")
    p_bench.add_argument("--ordered-split", action="store_true",
                         help="hold out the tail of the dataset (for series)")
    p_bench.add_argument("--test-fraction", type=float, default=0.2)
    p_bench.add_argument("--train-count", type=int, default=500)
    p_bench.add_argument("--test-count", type=int, default=100)
    p_bench.add_argument("--points", type=int, default=100)
    p_bench.add_argument("--noise", type=float, default=0.1)
    p_bench.add_argument("--anchors", type=int, default=25)
    p_bench.add_argument("--map-sigma", type=float, default=1.0)
    p_bench.add_argument("--features", type=int, default=None, metavar="D")
    p_bench.add_argument("--sigma", type=float, default=None)
    p_bench.add_argument("--lambda", dest="ridge_lambda", type=float, default=None)
    p_bench.add_argument("--radius-in", type=float, default=None)
    p_bench.add_argument("--radius-out", type=float, default=None)
    p_bench.add_argument("--folds", type=int, default=5)
    p_bench.add_argument("--model", default=None,
                         help="save the fitted triple-basis model here")
    p_bench.add_argument("--quadrature", type=int, default=1024)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset")
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--instances", type=int, default=500)
    p_synth.add_argument("--points", type=int, default=100)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--noise", type=float, default=0.1)
    p_synth.add_argument("--anchors", type=int, default=25)
    p_synth.add_argument("--map-sigma", type=float, default=1.0)
    p_synth.add_argument("--dim-in", type=int, default=1)
    p_synth.add_argument("--dim-out", type=int, default=1)
    p_synth.add_argument("--amplitude-in", type=float, default=2.0)
    p_synth.add_argument("--amplitude-out", type=float, default=2.0)

    p_win = sub.add_parser("window", help="cut a scalar series into pairs")
    p_win.add_argument("--series", required=True, help="one value per line")
    p_win.add_argument("--out", required=True)
    p_win.add_argument("--window", type=int, required=True, metavar="W")
    p_win.add_argument("--stride", type=int, default=None)
    p_win.add_argument("--mode", default=FORWARD, choices=[FORWARD, CO_OCCURRING])
    p_win.add_argument("--co-series", default=None,
                       help="second series (co-occurring mode)")
    return parser


def _cmd_fit(args) -> int:
    pairs = ingest_dataset(args.data)
    if any(q is None for _, q in pairs):
        raise ValueError("fit needs 'output' observations on every line")
    in_dim, out_dim = pairs[0][0].dimension, pairs[0][1].dimension
    t_in = args.radius_in
    if t_in is None:
        t_in = average_truncation_radius(
            [p for p, _ in pairs], DEFAULT_RADII, args.folds
        )
    t_out = args.radius_out
    if t_out is None:
        t_out = average_truncation_radius(
            [q for _, q in pairs], DEFAULT_RADII, args.folds
        )
    input_set = enumerate_ball(in_dim, t_in)
    output_set = enumerate_ball(out_dim, t_out)

    if args.method == "triple-basis":
        n_points = pairs[0][0].n
        feature_count = args.features or default_feature_count(n_points)
        if args.sigma is not None and args.ridge_lambda is not None:
            fmap = sample_feature_map(
                len(input_set), feature_count, args.sigma, args.seed
            )
            model = fit(pairs, input_set, output_set, fmap, args.ridge_lambda)
        else:
            sigma_grid = (
                (args.sigma,) if args.sigma is not None
                else (0.25, 0.5, 1.0, 2.0, 4.0)
            )
            lambda_grid = (
                (args.ridge_lambda,) if args.ridge_lambda is not None
                else (1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)
            )
            cv = fit_cv(
                pairs, input_set, output_set, feature_count, args.seed,
                bandwidth_grid=sigma_grid, lambda_grid=lambda_grid,
            )
            model = cv.model
            print(
                f"selected sigma={cv.bandwidth:g} lambda={cv.ridge_lambda:g} "
                f"(validation mse {cv.validation_mse:.6g})"
            )
    else:
        if args.bandwidth is not None:
            model = lse_fit(pairs, input_set, output_set, args.bandwidth)
        else:
            tin = np.vstack([project(p, input_set).coefficients for p, _ in pairs])
            grid = _derive_bandwidth_grid(tin, args.seed)
            model, _ = lse_fit_cv(pairs, input_set, output_set, grid, args.seed)
            print(f"selected bandwidth={model.bandwidth:g}")
    save_model(model, args.model)
    print(f"saved {args.method} model to {args.model}")
    return 0


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    pairs = ingest_dataset(args.data, require_output=False)
    grid = midpoint_grid(model.output_index_set.dimension, args.grid) if args.grid else None
    grid_design = design_matrix(model.output_index_set, grid) if args.grid else None
    with open(args.out, "w", encoding="utf-8") as fh:
        for pin, _ in pairs:
            cv = model_predict(model, pin)
            doc = {"coefficients": cv.coefficients.tolist()}
            if grid_design is not None:
                doc["values"] = (grid_design @ cv.coefficients).tolist()
            fh.write(json.dumps(doc) + "\n")
    print(f"wrote {len(pairs)} predictions to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    model = load_model(args.model)
    pairs = ingest_dataset(args.data)
    if any(q is None for _, q in pairs):
        raise ValueError("eval needs 'output' observations on every line")
    output_set = model.output_index_set
    truth = np.vstack([project(q, output_set).coefficients for _, q in pairs])
    mse, mpt, _ = evaluate_model(model, pairs, truth, output_set, args.quadrature)
    print(f"mse={mse:.8g} mpt_seconds={mpt:.6g} instances={len(pairs)}")
    if args.report:
        doc = {
            "format_version": REPORT_FORMAT_VERSION,
            "model": args.model,
            "data": args.data,
            "mse": mse,
            "mpt_seconds": mpt,
            "instances": len(pairs),
            "backend": _accel.backend_name(),
        }
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
    return 0


def _cmd_bench(args) -> int:
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    config = BenchmarkConfig(
        methods=methods,
        seed=args.seed,
        data_path=args.data,
        ordered_split=args.ordered_split,
        test_fraction=args.test_fraction,
        train_count=args.train_count,
        test_count=args.test_count,
        points_per_function=args.points,
        noise_sd=args.noise,
        anchor_count=args.anchors,
        map_sigma=args.map_sigma,
        feature_count=args.features,
        radius_in=args.radius_in,
        radius_out=args.radius_out,
        folds=args.folds,
        fixed_sigma=args.sigma,
        fixed_lambda=args.ridge_lambda,
        quadrature_points=args.quadrature,
        report_path=args.report,
        model_out=args.model,
    )
    report = run_benchmark(config)
    for rec in report["records"]:
        print(
            f"{rec['method']}: mse={rec['mse']:.6g} "
            f"mpt={rec['mpt_seconds']:.6g}s fit={rec['fit_seconds']:.3g}s"
        )
    print(f"report written to {args.report}")
    return 0


def _cmd_synth(args) -> int:
    input_spec = SobolevSpec(
        np.ones(args.dim_in), np.ones(args.dim_in), args.amplitude_in
    )
    output_spec = SobolevSpec(
        np.ones(args.dim_out), np.ones(args.dim_out), args.amplitude_out
    )
    seedseq = np.random.SeedSequence(args.seed)
    map_seed, data_seed = (s.generate_state(1)[0] for s in seedseq.spawn(2))
    mapping = make_mapping(
        input_spec, output_spec, n_anchors=args.anchors,
        sigma=args.map_sigma, seed=int(map_seed),
    )
    config = SyntheticConfig(
        input_spec=input_spec,
        output_spec=output_spec,
        noise_sd=args.noise,
        points_per_function=args.points,
        instance_count=args.instances,
        seed=int(data_seed),
    )
    pairs = generate_dataset(config, mapping)
    write_dataset(pairs, args.out)
    print(f"wrote {len(pairs)} pairs to {args.out}")
    return 0


def _cmd_window(args) -> int:
    series = read_series(args.series)
    co = read_series(args.co_series) if args.co_series else None
    windowing = SeriesWindowing(
        window_length=args.window, mode=args.mode, stride=args.stride
    )
    pairs, transform = window_series(series, windowing, co_values=co)
    write_dataset(pairs, args.out)
    sidecar = args.out + ".transform.json"
    with open(sidecar, "w", encoding="utf-8") as fh:
        json.dump({"offset": transform.offset, "scale": transform.scale}, fh)
    print(f"wrote {len(pairs)} pairs to {args.out} (transform in {sidecar})")
    return 0


_COMMANDS = {
    "fit": _cmd_fit,
    "predict": _cmd_predict,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
    "synth": _cmd_synth,
    "window": _cmd_window,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except SystemExit as exc:
        # raised by the parser on bad flags: user error
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        return 0 if not exc.code else 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:  # pragma: no cover - internal errors
        import traceback

        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
