"""Dataset ingestion, serialization, corruption and splitting.

Two interchange formats:

* CSV — UTF-8, comma separated, '.' decimal, one sample per row.  An
  optional first line ``# labeled`` means the last column holds an
  integer class label.
* BIN — magic ``ARSSMAT1``, then unsigned 64-bit little-endian feature
  count L and sample count N, a flag byte (0x01 = labels follow), the
  L*N float64 little-endian values in column-major order, and, when
  flagged, N signed 32-bit little-endian labels.  Bit-exact round trip.

Internally a dataset always stores X as (L, N) with columns as samples.
All randomized operations are pure functions of (input, seed).
"""

from __future__ import annotations

import logging
import math
import os
import struct
import tempfile
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import (BadMagic, ConfigError, DataError, InvalidCount,
                         MissingLabels, ParseError)
from .linalg import as_matrix

logger = logging.getLogger(__name__)

BIN_MAGIC = b"ARSSMAT1"
FORMATS = ("csv", "bin")
NOISE_KINDS = ("gaussian", "laplace", "salt_pepper")


@dataclass
class LabeledDataset:
    """A data matrix with optional per-sample integer labels and a
    provenance log (source, seeds, corruption masks, split indices)."""

    X: np.ndarray
    labels: np.ndarray | None = None
    provenance: dict = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return self.X.shape[0]

    @property
    def n_samples(self) -> int:
        return self.X.shape[1]

    def __post_init__(self):
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int32)
            if self.labels.shape != (self.X.shape[1],):
                raise DataError(
                    f"labels length {self.labels.shape[0]} != sample count {self.X.shape[1]}")


@dataclass(frozen=True)
class NoiseSpec:
    """Corruption protocol: a fraction of samples (per class when labels
    exist) each get one noise kind, drawn uniformly from `kinds`.

    Magnitudes are relative to the per-feature value range, so the same
    spec is meaningful across datasets; salt & pepper sets a fraction of
    a sample's entries to the global min or max of X on a fair coin.
    """

    fraction: float = 0.1
    kinds: tuple[str, ...] = NOISE_KINDS
    gaussian_sigma_rel: float = 0.1
    laplace_scale_rel: float = 0.1
    sp_fraction: float = 0.1
    seed: int | None = None

    def __post_init__(self):
        if not (0.0 <= self.fraction <= 1.0):
            raise ConfigError(f"fraction must lie in [0, 1], got {self.fraction}")
        if not self.kinds or any(k not in NOISE_KINDS for k in self.kinds):
            raise ConfigError(f"kinds must be a nonempty subset of {NOISE_KINDS}")
        if self.gaussian_sigma_rel <= 0 or self.laplace_scale_rel <= 0:
            raise ConfigError("noise magnitudes must be > 0")
        if not (0.0 < self.sp_fraction <= 1.0):
            raise ConfigError(f"sp_fraction must lie in (0, 1], got {self.sp_fraction}")


def _float_cell(text: str, path, line_no: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"bad numeric value {text!r}", path=path, line=line_no) from None


def _read_csv(path) -> LabeledDataset:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    labeled = False
    rows: list[list[float]] = []
    labels: list[int] = []
    width = None
    for line_no, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        if text.startswith("#"):
            if line_no == 1 and text == "# labeled":
                labeled = True
            continue
        cells = text.split(",")
        if width is None:
            width = len(cells)
            if labeled and width < 2:
                raise ParseError("labeled rows need at least one feature and a label",
                                 path=path, line=line_no)
        elif len(cells) != width:
            raise ParseError(f"expected {width} columns, found {len(cells)}",
                             path=path, line=line_no)
        if labeled:
            try:
                labels.append(int(cells[-1]))
            except ValueError:
                raise ParseError(f"bad integer label {cells[-1]!r}",
                                 path=path, line=line_no) from None
            cells = cells[:-1]
        rows.append([_float_cell(c, path, line_no) for c in cells])
    if not rows:
        raise ParseError("no data rows", path=path)
    X = as_matrix(np.array(rows, dtype=np.float64).T, "matrix from CSV")
    return LabeledDataset(X=X, labels=np.array(labels, dtype=np.int32) if labeled else None,
                          provenance={"source": str(path), "format": "csv"})


def _read_bin(path) -> LabeledDataset:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 8 or blob[:8] != BIN_MAGIC:
        raise BadMagic(f"expected magic {BIN_MAGIC!r}", path=path, byte=0)
    if len(blob) < 25:
        raise ParseError("truncated header", path=path, byte=len(blob))
    n_feat, n_samp = struct.unpack_from("<QQ", blob, 8)
    flag = blob[24]
    if flag not in (0, 1):
        raise ParseError(f"bad label flag {flag:#x}", path=path, byte=24)
    if n_feat < 1 or n_samp < 1:
        raise ParseError(f"bad dimensions {n_feat}x{n_samp}", path=path, byte=8)
    body = 25
    values_len = 8 * n_feat * n_samp
    labels_len = 4 * n_samp if flag else 0
    expected = body + values_len + labels_len
    if len(blob) != expected:
        raise ParseError(f"expected {expected} bytes, file has {len(blob)}",
                         path=path, byte=len(blob))
    values = np.frombuffer(blob, dtype="<f8", count=n_feat * n_samp, offset=body)
    X = as_matrix(values.reshape((n_feat, n_samp), order="F"), "matrix from BIN")
    labels = None
    if flag:
        labels = np.frombuffer(blob, dtype="<i4", count=n_samp,
                               offset=body + values_len).astype(np.int32)
    return LabeledDataset(X=X, labels=labels,
                          provenance={"source": str(path), "format": "bin"})


def read_matrix(path, format: str = "csv") -> LabeledDataset:
    """Load a dataset from `path` in the given format ("csv" or "bin")."""
    if format not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {format!r}")
    if format == "csv":
        return _read_csv(path)
    return _read_bin(path)


def _atomic_write(path, data: bytes):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix(dataset: LabeledDataset, path, format: str = "csv"):
    """Serialize a dataset; the exact inverse of read_matrix.

    Writes to a temp file and renames, so a failed write never leaves a
    partial file behind.
    """
    if format not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {format!r}")
    X = dataset.X
    if format == "csv":
        out = []
        if dataset.labels is not None:
            out.append("# labeled")
        for n in range(X.shape[1]):
            row = ",".join(repr(float(v)) for v in X[:, n])
            if dataset.labels is not None:
                row += f",{int(dataset.labels[n])}"
            out.append(row)
        _atomic_write(path, ("\n".join(out) + "\n").encode("utf-8"))
        return
    n_feat, n_samp = X.shape
    parts = [BIN_MAGIC,
             struct.pack("<QQB", n_feat, n_samp, 1 if dataset.labels is not None else 0),
             np.asarray(X, dtype="<f8").flatten(order="F").tobytes()]
    if dataset.labels is not None:
        parts.append(np.asarray(dataset.labels, dtype="<i4").tobytes())
    _atomic_write(path, b"".join(parts))


def _corrupt_column(col, kind: str, rng, feature_range, global_min, global_max, sp_fraction):
    n_feat = col.shape[0]
    if kind == "gaussian":
        return col + rng.normal(0.0, 1.0, size=n_feat) * feature_range
    if kind == "laplace":
        return col + rng.laplace(0.0, 1.0, size=n_feat) * feature_range
    count = math.ceil(sp_fraction * n_feat)
    idx = rng.choice(n_feat, size=count, replace=False)
    out = col.copy()
    out[idx] = np.where(rng.random(count) < 0.5, global_min, global_max)
    return out


def inject_noise(dataset: LabeledDataset, spec: NoiseSpec,
                 stratified: bool | None = None) -> LabeledDataset:
    """Corrupt a seeded fraction of samples, one noise kind each.

    With labels present the corrupted fraction is drawn per class
    (ceil(fraction * class size) columns each); stratified=True demands
    labels, stratified=None falls back to global sampling with a logged
    warning when labels are missing, stratified=False always samples
    globally.  Only the selected columns change; the mask and kinds are
    recorded in the returned provenance under "corruption".
    """
    X = dataset.X
    n_feat, n_samp = X.shape
    if stratified is True and dataset.labels is None:
        raise MissingLabels("per-class corruption requested but dataset has no labels")
    use_classes = dataset.labels is not None and stratified is not False
    if stratified is None and dataset.labels is None:
        logger.warning("no labels: falling back to global corruption sampling")

    rng = np.random.default_rng(spec.seed)
    chosen: list[int] = []
    if spec.fraction > 0.0:
        if use_classes:
            for cls in np.unique(dataset.labels):
                members = np.flatnonzero(dataset.labels == cls)
                count = math.ceil(spec.fraction * members.size)
                chosen.extend(rng.choice(members, size=count, replace=False).tolist())
        else:
            count = math.ceil(spec.fraction * n_samp)
            chosen.extend(rng.choice(n_samp, size=count, replace=False).tolist())
    chosen.sort()

    out = X.copy()
    feature_range = X.max(axis=1) - X.min(axis=1)
    global_min, global_max = float(X.min()), float(X.max())
    kinds_used: dict[int, str] = {}
    for col in chosen:
        kind = spec.kinds[int(rng.integers(len(spec.kinds)))]
        kinds_used[col] = kind
        scale = feature_range * (spec.gaussian_sigma_rel if kind == "gaussian"
                                 else spec.laplace_scale_rel)
        out[:, col] = _corrupt_column(X[:, col], kind, rng, scale,
                                      global_min, global_max, spec.sp_fraction)

    provenance = dict(dataset.provenance)
    provenance["corruption"] = {
        "seed": spec.seed,
        "columns": [int(c) for c in chosen],
        "kinds": {int(c): k for c, k in kinds_used.items()},
    }
    labels = None if dataset.labels is None else dataset.labels.copy()
    return LabeledDataset(X=out, labels=labels, provenance=provenance)


def split_candidates(dataset: LabeledDataset, candidate_count: int,
                     seed: int | None = None):
    """Seeded uniform split into (candidates, test); disjoint and
    exhaustive, original column indices recorded in provenance."""
    n_samp = dataset.n_samples
    if not (1 <= candidate_count <= n_samp):
        raise InvalidCount(f"candidate_count must lie in 1..{n_samp}, got {candidate_count}")
    perm = np.random.default_rng(seed).permutation(n_samp)
    cand_idx = np.sort(perm[:candidate_count])
    test_idx = np.sort(perm[candidate_count:])

    def subset(idx, role):
        prov = dict(dataset.provenance)
        prov["split"] = {"role": role, "seed": seed,
                         "original_indices": [int(i) for i in idx]}
        labels = None if dataset.labels is None else dataset.labels[idx]
        return LabeledDataset(X=dataset.X[:, idx], labels=labels, provenance=prov)

    return subset(cand_idx, "candidates"), subset(test_idx, "test")
