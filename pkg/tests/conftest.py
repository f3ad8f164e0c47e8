import numpy as np
import pytest

from rwdetect.dataset import (
    DataMatrix,
    FeatureDictionary,
    LabelVector,
    SampleRecord,
)


def matrix_from_dense(dense, labels=None, family_ids=None):
    """Build a DataMatrix straight from a 0/1 array (test convenience)."""
    dense = np.asarray(dense)
    n, d = dense.shape
    if family_ids is None:
        family_ids = labels if labels is not None else [0] * n
    rows = tuple(
        SampleRecord(
            f"s{i}",
            int(family_ids[i]),
            tuple(int(j) for j in np.flatnonzero(dense[i])),
        )
        for i in range(n)
    )
    m = DataMatrix(d, rows)
    y = LabelVector(tuple(int(v) for v in labels)) if labels is not None else None
    return (m, y) if labels is not None else m


def random_dense(rng, n, d, p=0.5):
    return (rng.random((n, d)) < p).astype(np.uint8)


@pytest.fixture
def small_dictionary():
    return FeatureDictionary(
        ("API:CreateFileW", "REG:SetValue", "FILES:write", "STR:bitcoin")
    )
