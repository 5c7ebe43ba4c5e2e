"""Datasets and the LibSVM sparse text format."""

from __future__ import annotations

import gzip
import io
import math
import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

# below this many features rows are stored densely
DENSE_BELOW = 64


class DataError(ValueError):
    """Malformed or inconsistent data; carries the offending line when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray | sp.csr_matrix
    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=float).ravel()
        object.__setattr__(self, "labels", labels)
        if self.features.ndim != 2:
            raise DataError("features must be a two-dimensional matrix")
        if self.features.shape[0] != labels.shape[0]:
            raise DataError(
                f"{self.features.shape[0]} feature rows but {labels.shape[0]} labels"
            )

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.features)

    @property
    def is_classification(self) -> bool:
        return bool(np.all(np.isin(self.labels, (-1.0, 1.0))))

    def dense(self) -> np.ndarray:
        return self.features.toarray() if self.is_sparse else np.asarray(self.features)

    def row_norms(self, p: float = 2.0) -> np.ndarray:
        A = self.dense()
        if math.isinf(p):
            return np.abs(A).max(axis=1) if A.size else np.zeros(self.n)
        return np.linalg.norm(A, ord=p, axis=1)

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(self.features[idx], self.labels[idx])

    def identical(self, other: "Dataset") -> bool:
        return (
            self.features.shape == other.features.shape
            and self.is_sparse == other.is_sparse
            and np.array_equal(self.dense(), other.dense())
            and np.array_equal(self.labels, other.labels)
        )


def _storage(indptr, indices, values, n, d, dense_below):
    mat = sp.csr_matrix(
        (np.asarray(values, dtype=float), np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
        shape=(n, d),
    )
    return mat.toarray() if d < dense_below else mat


def parse_libsvm(text: bytes | str, d: int | None = None, *,
                 dense_below: int = DENSE_BELOW) -> Dataset:
    """Parse ``<label> <idx>:<val> ...`` lines (1-based, strictly increasing indices).

    ``#`` starts a comment.  ``d`` may only raise the dimension above the
    largest index present.  gzip-compressed bytes are accepted.
    """
    if isinstance(text, bytes):
        if text[:2] == b"\x1f\x8b":
            text = gzip.decompress(text)
        try:
            text = text.decode("ascii")
        except UnicodeDecodeError as exc:
            raise DataError(f"non-ASCII input ({exc.reason})") from None
    labels: list[float] = []
    indptr = [0]
    indices: list[int] = []
    values: list[float] = []
    max_index = 0
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise DataError(f"label {tokens[0]!r} is not a number", lineno) from None
        if not math.isfinite(label):
            raise DataError("label must be finite", lineno)
        prev = 0
        for tok in tokens[1:]:
            key, sep, val = tok.partition(":")
            if not sep or not key or not val:
                raise DataError(f"malformed feature token {tok!r}", lineno)
            try:
                idx = int(key)
            except ValueError:
                raise DataError(f"feature index {key!r} is not an integer", lineno) from None
            try:
                fval = float(val)
            except ValueError:
                raise DataError(f"feature value {val!r} is not a number", lineno) from None
            if idx < 1:
                raise DataError(f"feature index {idx} must be at least 1", lineno)
            if idx <= prev:
                raise DataError(f"feature index {idx} does not increase (after {prev})", lineno)
            if not math.isfinite(fval):
                raise DataError(f"feature value {val!r} is not finite", lineno)
            prev = idx
            indices.append(idx - 1)
            values.append(fval)
        max_index = max(max_index, prev)
        labels.append(label)
        indptr.append(len(indices))
    if d is None:
        d = max_index
    elif d < max_index:
        raise DataError(f"dimension override {d} is below the largest index {max_index}")
    if not labels:
        raise DataError("no data rows found")
    return Dataset(_storage(indptr, indices, values, len(labels), max(d, 1), dense_below),
                   np.array(labels))


def load_libsvm(path: str | os.PathLike, d: int | None = None, **kwargs) -> Dataset:
    with open(path, "rb") as fh:
        return parse_libsvm(fh.read(), d, **kwargs)


def _fmt(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def to_libsvm(data: Dataset) -> str:
    """Serialise exactly: floats use their shortest round-trip repr."""
    A = sp.csr_matrix(data.features)
    A.sort_indices()
    lines = []
    for i in range(data.n):
        lo, hi = A.indptr[i], A.indptr[i + 1]
        toks = [_fmt(data.labels[i])]
        toks += [f"{j + 1}:{_fmt(v)}" for j, v in zip(A.indices[lo:hi], A.data[lo:hi]) if v != 0]
        lines.append(" ".join(toks))
    return "\n".join(lines) + "\n"


def minmax_scale(data: Dataset, lower: float = -1.0, upper: float = 1.0) -> Dataset:
    """Per-feature affine rescaling to [lower, upper]; constant columns map to lower."""
    A = data.dense()
    lo, hi = A.min(axis=0), A.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    scaled = lower + (A - lo) / span * (upper - lower)
    scaled[:, hi == lo] = lower
    feats = scaled if data.d < DENSE_BELOW else sp.csr_matrix(scaled)
    return Dataset(feats, data.labels.copy())
