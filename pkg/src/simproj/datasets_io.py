"""Dataset ingestion: labeled CSVs, the canonical matrix format, class
subsetting, and the name -> file registry. Bundled evaluation CSVs live
in ``simproj/data``."""

import csv
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (MissingLabelColumn, NonFiniteInput, NonNumericFeature,
                     ParseError, SampleTooLarge, ShapeHeaderMismatch,
                     UnknownClass, UnknownDataset)


@dataclass
class LabeledDataset:
    features: np.ndarray          # (N, n)
    labels: np.ndarray | None     # (N,) integer class ids
    name: str = ""
    feature_names: list | None = None

    def __len__(self) -> int:
        return self.features.shape[0]

    def without_labels(self) -> "LabeledDataset":
        return LabeledDataset(features=self.features.copy(), labels=None,
                              name=self.name, feature_names=self.feature_names)


def load_csv(path, label_column: str | None = None, name: str = "") -> LabeledDataset:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        label_idx = None
        if label_column is not None:
            if label_column not in header:
                raise MissingLabelColumn(f"{path}: no column named {label_column!r}")
            label_idx = header.index(label_column)

        rows, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}: line {lineno}: expected {len(header)} fields")
            values = []
            for col, token in enumerate(row):
                if col == label_idx:
                    continue
                try:
                    values.append(float(token))
                except ValueError:
                    raise NonNumericFeature(
                        f"{path}: line {lineno}, column {header[col]!r}: "
                        f"non-numeric value {token!r}") from None
            rows.append(values)
            if label_idx is not None:
                labels.append(int(float(row[label_idx])))

    if not rows:
        raise ParseError(f"{path}: no data rows")
    features = np.array(rows, dtype=float)
    if not np.isfinite(features).all():
        bad = np.argwhere(~np.isfinite(features))[0]
        raise NonFiniteInput(f"{path}: non-finite value at row {bad[0] + 2}, "
                             f"column {bad[1]}")
    feature_names = [h for i, h in enumerate(header) if i != label_idx]
    return LabeledDataset(
        features=features,
        labels=np.array(labels, dtype=int) if label_idx is not None else None,
        name=name or path.stem,
        feature_names=feature_names,
    )


def subset_by_class(ds: LabeledDataset, classes, per_total: int | None = None,
                    seed: int = 0) -> LabeledDataset:
    if ds.labels is None:
        raise UnknownClass("dataset has no labels")
    classes = list(classes)
    present = set(np.unique(ds.labels).tolist())
    for c in classes:
        if c not in present:
            raise UnknownClass(f"class {c!r} not in dataset")
    keep = np.where(np.isin(ds.labels, classes))[0]
    if per_total is not None:
        if per_total > len(keep):
            raise SampleTooLarge(f"requested {per_total} rows, only {len(keep)} available")
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(keep, size=per_total, replace=False))
    return LabeledDataset(features=ds.features[keep], labels=ds.labels[keep],
                          name=ds.name, feature_names=ds.feature_names)


def load_vectors(path, name: str = "") -> LabeledDataset:
    """Canonical matrix file: header ``rows cols [labels]``, then
    whitespace-separated doubles row-major; when the labels flag is
    present each row carries a trailing integer label."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) not in (2, 3) or (len(header) == 3 and header[2] != "labels"):
            raise ParseError(f"{path}: header must be 'rows cols [labels]'")
        try:
            rows, cols = int(header[0]), int(header[1])
        except ValueError:
            raise ParseError(f"{path}: non-integer header fields") from None
        has_labels = len(header) == 3
        try:
            body = np.loadtxt(fh, dtype=float, ndmin=2)
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from None
    expected_cols = cols + (1 if has_labels else 0)
    if body.shape != (rows, expected_cols):
        raise ShapeHeaderMismatch(
            f"{path}: header says {rows}x{expected_cols}, body is {body.shape}")
    features = body[:, :cols]
    if not np.isfinite(features).all():
        raise NonFiniteInput(f"{path}: non-finite feature value")
    labels = body[:, cols].astype(int) if has_labels else None
    return LabeledDataset(features=features, labels=labels, name=name or path.stem)


def save_vectors(path, ds: LabeledDataset) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if ds.labels is not None:
            fh.write(f"{len(ds)} {ds.features.shape[1]} labels\n")
            for row, label in zip(ds.features, ds.labels):
                fh.write(" ".join(repr(float(v)) for v in row) + f" {int(label)}\n")
        else:
            fh.write(f"{len(ds)} {ds.features.shape[1]}\n")
            for row in ds.features:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def bundled_data_dir() -> Path:
    return Path(resources.files("simproj") / "data")


def load_registry(path=None) -> dict:
    """Registry JSON: name -> {"path": ..., "label_column": ...}. Relative
    paths resolve against the registry file's directory."""
    if path is None:
        path = bundled_data_dir() / "registry.json"
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    registry = {}
    for dataset_name, entry in raw.items():
        entry = dict(entry)
        entry["path"] = str((path.parent / entry["path"]).resolve())
        registry[dataset_name] = entry
    return registry


def load_registered(name: str, registry: dict | None = None) -> LabeledDataset:
    registry = registry if registry is not None else load_registry()
    if name not in registry:
        raise UnknownDataset(f"dataset {name!r} is not registered")
    entry = registry[name]
    return load_csv(entry["path"], label_column=entry.get("label_column"), name=name)
