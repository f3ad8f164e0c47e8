"""Binary behavioral feature dataset: loading, labeling, splitting, synthesis.

A sample is a set of fired behavioral events. Each event is a feature name
of the form ``<CATEGORY>:<identifier>`` where the category is one of the
seven behavioral groups (API calls, dropped-file extensions, registry ops,
file ops, file extensions touched, directory ops, embedded strings).
Feature values are binary, so a row is stored as the sorted set of active
column ordinals rather than a dense vector.

Two on-disk formats are supported and produce identical in-memory results:
a dense CSV (header ``sample_id,family_id,<names...>``, cells "0"/"1") and
a sparse tab-separated format (canonical for wide matrices):

    #FEATURES <d>
    <feature name>          (d lines, column order)
    #SAMPLES <n>
    <sample_id>\t<family_id>\t<name name ...>

Family ID 0 is goodware; IDs 1..11 are ransomware families. The binary
label is simply ``family_id != 0``.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import DataFormatError, SplitError

CATEGORY_CODES = ("API", "DROP", "REG", "FILES", "FILES_EXT", "DIR", "STR")

MAX_FAMILY_ID = 11


@dataclass(frozen=True)
class FeatureDictionary:
    """Ordered feature names with name -> column ordinal lookup."""

    names: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for j, name in enumerate(self.names):
            prefix = name.split(":", 1)[0]
            if prefix not in CATEGORY_CODES or ":" not in name:
                raise DataFormatError(
                    f"feature name {name!r} lacks a valid category prefix"
                )
            if name in index:
                raise DataFormatError(f"duplicate feature name {name!r}")
            index[name] = j
        object.__setattr__(self, "_index", index)

    def __len__(self):
        return len(self.names)

    def ordinal(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def sha256(self) -> str:
        """Content hash used in model fingerprints."""
        h = hashlib.sha256()
        for name in self.names:
            h.update(name.encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()


@dataclass(frozen=True)
class SampleRecord:
    """One sample: identifier, family, and its set of active columns."""

    sample_id: str
    family_id: int
    active: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.family_id <= MAX_FAMILY_ID:
            raise DataFormatError(
                f"sample {self.sample_id!r}: family_id {self.family_id} "
                f"outside [0, {MAX_FAMILY_ID}]"
            )
        if any(b <= a for a, b in zip(self.active, self.active[1:])):
            raise DataFormatError(
                f"sample {self.sample_id!r}: active ordinals not strictly sorted"
            )


@dataclass(frozen=True)
class DataMatrix:
    """n x d sparse binary matrix; ordinal present in a row means value 1."""

    n_features: int
    rows: tuple[SampleRecord, ...]

    def __post_init__(self):
        for r in self.rows:
            if r.active and r.active[-1] >= self.n_features:
                raise DataFormatError(
                    f"sample {r.sample_id!r}: ordinal {r.active[-1]} "
                    f">= n_features {self.n_features}"
                )

    @property
    def n_samples(self) -> int:
        return len(self.rows)

    def to_dense(self) -> np.ndarray:
        """Materialize as a (n_samples, n_features) uint8 array."""
        out = np.zeros((self.n_samples, self.n_features), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            if r.active:
                out[i, list(r.active)] = 1
        return out


@dataclass(frozen=True)
class LabelVector:
    """Binary labels: 0 goodware, 1 ransomware."""

    labels: tuple[int, ...]

    def __len__(self):
        return len(self.labels)

    def to_array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int64)

    @classmethod
    def from_rows(cls, rows) -> "LabelVector":
        return cls(tuple(int(r.family_id != 0) for r in rows))


@dataclass(frozen=True)
class SplitSpec:
    """Seeded stratified train/test split parameters.

    The default fraction yields a 503-sample test partition on the
    1524-sample reference dataset shape.
    """

    seed: int = 0
    test_fraction: float = 503 / 1524
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise SplitError(f"test_fraction {self.test_fraction} not in (0,1)")


def _parse_cell(value: str, line_no: int, col_name: str) -> int:
    if value == "0":
        return 0
    if value == "1":
        return 1
    raise DataFormatError(
        f"line {line_no}: cell for feature {col_name!r} is {value!r}, expected 0 or 1"
    )


def load_dense_csv(path) -> tuple[DataMatrix, FeatureDictionary, LabelVector]:
    """Load the dense CSV format.

    Header row must be ``sample_id,family_id,<feature names...>``; body
    cells are strictly "0"/"1".
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        if len(header) < 2 or header[0] != "sample_id" or header[1] != "family_id":
            raise DataFormatError(
                f"{path}: header must start with 'sample_id,family_id', got {header[:2]}"
            )
        dictionary = FeatureDictionary(tuple(header[2:]))
        d = len(dictionary)
        rows = []
        for line_no, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != d + 2:
                raise DataFormatError(
                    f"{path}: line {line_no}: expected {d + 2} cells, got {len(cells)}"
                )
            try:
                family_id = int(cells[1])
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {line_no}: family_id {cells[1]!r} is not an integer"
                ) from None
            active = tuple(
                j
                for j, cell in enumerate(cells[2:])
                if _parse_cell(cell, line_no, dictionary.names[j])
            )
            rows.append(SampleRecord(cells[0], family_id, active))
    matrix = DataMatrix(d, tuple(rows))
    return matrix, dictionary, LabelVector.from_rows(matrix.rows)


def load_sparse(path) -> tuple[DataMatrix, FeatureDictionary, LabelVector]:
    """Load the sparse tab-separated format (see module docstring)."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    pos = 0

    def next_line():
        nonlocal pos
        while pos < len(lines):
            line = lines[pos]
            pos += 1
            if line != "":
                return line
        return None

    head = next_line()
    if head is None or not head.startswith("#FEATURES "):
        raise DataFormatError(f"{path}: missing '#FEATURES d' dictionary header")
    d = int(head.split()[1])
    names = []
    for _ in range(d):
        name = next_line()
        if name is None:
            raise DataFormatError(f"{path}: dictionary section truncated")
        names.append(name)
    dictionary = FeatureDictionary(tuple(names))

    head = next_line()
    if head is None or not head.startswith("#SAMPLES "):
        raise DataFormatError(f"{path}: missing '#SAMPLES n' section header")
    n = int(head.split()[1])
    rows = []
    for i in range(n):
        line = next_line()
        if line is None:
            raise DataFormatError(f"{path}: sample section truncated at row {i}")
        parts = line.split("\t")
        if len(parts) != 3:
            raise DataFormatError(
                f"{path}: sample line {i}: expected 3 tab-separated fields"
            )
        sample_id, family_str, feats = parts
        ordinals = set()
        for token in feats.split():
            if token not in dictionary:
                raise DataFormatError(
                    f"{path}: sample {sample_id!r}: unknown feature {token!r}"
                )
            ordinals.add(dictionary.ordinal(token))
        rows.append(SampleRecord(sample_id, int(family_str), tuple(sorted(ordinals))))
    matrix = DataMatrix(d, tuple(rows))
    return matrix, dictionary, LabelVector.from_rows(matrix.rows)


def write_dense_csv(path, matrix: DataMatrix, dictionary: FeatureDictionary) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample_id", "family_id", *dictionary.names])
        for r in matrix.rows:
            cells = ["0"] * matrix.n_features
            for j in r.active:
                cells[j] = "1"
            writer.writerow([r.sample_id, str(r.family_id), *cells])


def write_sparse(path, matrix: DataMatrix, dictionary: FeatureDictionary) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#FEATURES {matrix.n_features}\n")
        for name in dictionary.names:
            fh.write(name + "\n")
        fh.write(f"#SAMPLES {matrix.n_samples}\n")
        for r in matrix.rows:
            feats = " ".join(dictionary.names[j] for j in r.active)
            fh.write(f"{r.sample_id}\t{r.family_id}\t{feats}\n")


def stratified_split(
    matrix: DataMatrix, y: LabelVector, spec: SplitSpec
) -> tuple[list[int], list[int]]:
    """Partition row indices into (train, test), deterministic per seed.

    Stratified mode draws round(class_count * test_fraction) test samples
    per class.
    """
    n = matrix.n_samples
    if n < 2:
        raise SplitError("need at least 2 samples to split")
    if len(y) != n:
        raise SplitError(f"labels length {len(y)} != n_samples {n}")
    rng = np.random.default_rng(spec.seed)
    labels = y.to_array()

    if spec.stratified:
        classes = np.unique(labels)
        if len(classes) < 2:
            raise SplitError("stratified split requires both classes present")
        test_idx: list[int] = []
        for c in classes:
            members = np.flatnonzero(labels == c)
            k = round(len(members) * spec.test_fraction)
            if k == 0 or k == len(members):
                raise SplitError(
                    f"test_fraction {spec.test_fraction} empties a partition "
                    f"for class {c}"
                )
            perm = rng.permutation(members)
            test_idx.extend(int(i) for i in perm[:k])
    else:
        k = round(n * spec.test_fraction)
        if k == 0 or k == n:
            raise SplitError(
                f"test_fraction {spec.test_fraction} produces an empty partition"
            )
        perm = rng.permutation(n)
        test_idx = [int(i) for i in perm[:k]]

    test_set = set(test_idx)
    train_idx = [i for i in range(n) if i not in test_set]
    return train_idx, sorted(test_idx)


def take_rows(matrix: DataMatrix, indices) -> DataMatrix:
    """Row subset in the given index order."""
    return DataMatrix(matrix.n_features, tuple(matrix.rows[i] for i in indices))


def take_labels(y: LabelVector, indices) -> LabelVector:
    return LabelVector(tuple(y.labels[i] for i in indices))


def synthesize_dataset(
    n: int,
    d: int,
    sparsity: float,
    class_signal: list[tuple[int, float, float]],
    seed: int,
    positive_rate: float = 0.5,
) -> tuple[DataMatrix, LabelVector]:
    """Generate a reproducible synthetic binary dataset.

    ``class_signal`` entries are (ordinal, P(x=1 | y=0), P(x=1 | y=1));
    every other feature is class-independent Bernoulli(sparsity).
    Positive samples get family_id 1, negatives 0.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    signal = {}
    for ordinal, p0, p1 in class_signal:
        if not 0 <= ordinal < d:
            raise ValueError(f"signal ordinal {ordinal} out of range [0, {d})")
        if not (0.0 <= p0 <= 1.0 and 0.0 <= p1 <= 1.0):
            raise ValueError("class-conditional probabilities must be in [0,1]")
        signal[ordinal] = (p0, p1)

    rng = np.random.default_rng(seed)
    labels = (rng.random(n) < positive_rate).astype(np.int64)
    cells = rng.random((n, d))

    thresholds = np.full((n, d), sparsity)
    for ordinal, (p0, p1) in signal.items():
        thresholds[:, ordinal] = np.where(labels == 1, p1, p0)
    dense = cells < thresholds

    rows = tuple(
        SampleRecord(
            f"synth{i:05d}",
            int(labels[i]),
            tuple(int(j) for j in np.flatnonzero(dense[i])),
        )
        for i in range(n)
    )
    return DataMatrix(d, rows), LabelVector(tuple(int(v) for v in labels))


def generic_dictionary(d: int, category: str = "STR") -> FeatureDictionary:
    """Placeholder dictionary for synthetic matrices."""
    return FeatureDictionary(tuple(f"{category}:f{j:05d}" for j in range(d)))
