"""Model files: a single self-describing JSON document per fitted model.

Floats are written with Python's shortest round-trip repr, so a load
restores every array bit-for-bit and predictions from a reloaded model are
identical to predictions from the original. Both model types share the
same envelope ({format_version, type, ...}) with distinct type tags.
"""


import json

import numpy as np

from .baseline import LinearSmootherModel
from .basis import BasisIndexSet
from .features import RksFeatureMap
from .regress import TripleBasisModel

FORMAT_VERSION = 1
TYPE_TRIPLE_BASIS = "triple-basis"
TYPE_LINEAR_SMOOTHER = "linear-smoother"


class ModelFormatError(ValueError):
    """Malformed or truncated model file."""


class ModelVersionError(ModelFormatError):
    """Model file written by an unsupported format version."""


class ModelDimensionError(ModelFormatError):
    """Internally inconsistent dimensions in a model file."""


def _matrix(doc, key, rows, cols) -> np.ndarray:
    raw = doc.get(key)
    if not isinstance(raw, list) or len(raw) != rows:
        raise ModelDimensionError(
            f"field {key!r} must hold {rows} rows, found "
            f"{len(raw) if isinstance(raw, list) else type(raw).__name__}"
        )
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != cols:
            raise ModelDimensionError(
                f"field {key!r} row {i} has length "
                f"{len(row) if isinstance(row, list) else 'non-list'}, "
                f"expected {cols}"
            )
    return np.asarray(raw, dtype=float).reshape(rows, cols)


def _vector(doc, key, length) -> np.ndarray:
    raw = doc.get(key)
    if not isinstance(raw, list) or len(raw) != length:
        raise ModelDimensionError(
            f"field {key!r} must hold {length} entries"
        )
    return np.asarray(raw, dtype=float)


def _require(doc, key):
    if key not in doc:
        raise ModelFormatError(f"model file is missing field {key!r}")
    return doc[key]


def _index_set(doc, key, dimension, rule_key) -> BasisIndexSet:
    raw = _require(doc, key)
    if not isinstance(raw, list) or not raw:
        raise ModelDimensionError(f"field {key!r} must be a non-empty index list")
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != dimension:
            raise ModelDimensionError(
                f"field {key!r} index {i} does not have dimension {dimension}"
            )
    try:
        return BasisIndexSet(
            dimension, np.asarray(raw), rule=doc.get(rule_key, "explicit")
        )
    except ValueError as exc:
        raise ModelDimensionError(f"field {key!r}: {exc}") from None


def _tolist(arr) -> list:
    return np.asarray(arr, dtype=float).tolist()


def save_model(model, destination) -> None:
    """Write a fitted model (either type) to a JSON model file."""
    if isinstance(model, TripleBasisModel):
        fmap = model.feature_map
        doc = {
            "format_version": FORMAT_VERSION,
            "type": TYPE_TRIPLE_BASIS,
            "basis_tag": model.basis_tag,
            "dimensions": {
                "l": model.input_index_set.dimension,
                "k": model.output_index_set.dimension,
                "s": len(model.input_index_set),
                "r": len(model.output_index_set),
                "D": fmap.feature_count,
            },
            "input_indices": model.input_index_set.indices.tolist(),
            "input_rule": model.input_index_set.rule,
            "output_indices": model.output_index_set.indices.tolist(),
            "output_rule": model.output_index_set.rule,
            "sigma": fmap.bandwidth,
            "lambda": model.ridge_lambda,
            "seed": fmap.seed,
            "frequencies": _tolist(fmap.frequencies),
            "phases": _tolist(fmap.phases),
            "psi": _tolist(model.psi),
            "training_count": model.training_count,
        }
    elif isinstance(model, LinearSmootherModel):
        doc = {
            "format_version": FORMAT_VERSION,
            "type": TYPE_LINEAR_SMOOTHER,
            "basis_tag": "cosine",
            "dimensions": {
                "l": model.input_index_set.dimension,
                "k": model.output_index_set.dimension,
                "s": len(model.input_index_set),
                "r": len(model.output_index_set),
                "N": model.training_count,
            },
            "input_indices": model.input_index_set.indices.tolist(),
            "input_rule": model.input_index_set.rule,
            "output_indices": model.output_index_set.indices.tolist(),
            "output_rule": model.output_index_set.rule,
            "bandwidth": model.bandwidth,
            "kernel_tag": model.kernel_tag,
            "train_inputs": _tolist(model.train_inputs),
            "train_outputs": _tolist(model.train_outputs),
        }
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    if hasattr(destination, "write"):
        json.dump(doc, destination)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)


def load_model(source):
    """Read a model file back; returns the same model type that was saved.

    Raises ModelVersionError on unknown format versions, and
    ModelDimensionError / ModelFormatError on corrupt documents.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"truncated or malformed model file: {exc}") from None
    if not isinstance(doc, dict):
        raise ModelFormatError("model file must hold a JSON object")

    version = _require(doc, "format_version")
    if version != FORMAT_VERSION:
        raise ModelVersionError(
            f"model file has format version {version!r}; this build reads "
            f"version {FORMAT_VERSION}"
        )
    kind = _require(doc, "type")
    dims = _require(doc, "dimensions")
    if not isinstance(dims, dict):
        raise ModelFormatError("field 'dimensions' must be an object")

    if kind == TYPE_TRIPLE_BASIS:
        l, k = int(dims["l"]), int(dims["k"])
        s, r, D = int(dims["s"]), int(dims["r"]), int(dims["D"])
        input_set = _index_set(doc, "input_indices", l, "input_rule")
        output_set = _index_set(doc, "output_indices", k, "output_rule")
        if len(input_set) != s or len(output_set) != r:
            raise ModelDimensionError(
                "declared index-set sizes do not match the stored index lists"
            )
        fmap = RksFeatureMap(
            input_dim=s,
            feature_count=D,
            bandwidth=float(_require(doc, "sigma")),
            frequencies=_matrix(doc, "frequencies", D, s),
            phases=_vector(doc, "phases", D),
            seed=int(_require(doc, "seed")),
        )
        try:
            return TripleBasisModel(
                input_index_set=input_set,
                output_index_set=output_set,
                feature_map=fmap,
                psi=_matrix(doc, "psi", D, r),
                ridge_lambda=float(_require(doc, "lambda")),
                basis_tag=str(_require(doc, "basis_tag")),
                training_count=int(doc.get("training_count", 0)),
            )
        except ValueError as exc:
            raise ModelDimensionError(str(exc)) from None
    if kind == TYPE_LINEAR_SMOOTHER:
        l, k = int(dims["l"]), int(dims["k"])
        s, r, n = int(dims["s"]), int(dims["r"]), int(dims["N"])
        input_set = _index_set(doc, "input_indices", l, "input_rule")
        output_set = _index_set(doc, "output_indices", k, "output_rule")
        if len(input_set) != s or len(output_set) != r:
            raise ModelDimensionError(
                "declared index-set sizes do not match the stored index lists"
            )
        try:
            return LinearSmootherModel(
                input_index_set=input_set,
                output_index_set=output_set,
                train_inputs=_matrix(doc, "train_inputs", n, s),
                train_outputs=_matrix(doc, "train_outputs", n, r),
                bandwidth=float(_require(doc, "bandwidth")),
                kernel_tag=str(doc.get("kernel_tag", "epanechnikov")),
            )
        except ValueError as exc:
            raise ModelDimensionError(str(exc)) from None
    raise ModelFormatError(f"unknown model type {kind!r}")
