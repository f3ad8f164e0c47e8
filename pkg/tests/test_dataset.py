import numpy as np
import pytest

from rwdetect.dataset import (
    DataMatrix,
    FeatureDictionary,
    LabelVector,
    SampleRecord,
    SplitSpec,
    generic_dictionary,
    load_dense_csv,
    load_sparse,
    stratified_split,
    synthesize_dataset,
    write_dense_csv,
    write_sparse,
)
from rwdetect.errors import DataFormatError, SplitError

from conftest import matrix_from_dense


def write_lines(path, *lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


NAMES4 = "API:a,DROP:b,REG:c,STR:d"


class TestFeatureDictionary:
    def test_lookup_bijective(self):
        d = FeatureDictionary(("API:x", "STR:y"))
        assert d.ordinal("API:x") == 0
        assert d.ordinal("STR:y") == 1
        assert len(d) == 2

    def test_duplicate_name_rejected(self):
        with pytest.raises(DataFormatError, match="duplicate"):
            FeatureDictionary(("API:x", "API:x"))

    def test_bad_prefix_rejected(self):
        with pytest.raises(DataFormatError, match="category prefix"):
            FeatureDictionary(("NOPE:x",))

    def test_missing_colon_rejected(self):
        with pytest.raises(DataFormatError):
            FeatureDictionary(("API",))


class TestDenseLoader:
    def test_all_zero_matrix(self, tmp_path):
        p = tmp_path / "d.csv"
        write_lines(
            p,
            "sample_id,family_id," + NAMES4,
            "s1,0,0,0,0,0",
            "s2,3,0,0,0,0",
            "s3,0,0,0,0,0",
        )
        m, d, y = load_dense_csv(p)
        assert m.n_samples == 3 and m.n_features == 4
        assert all(r.active == () for r in m.rows)
        assert y.labels == (0, 1, 0)

    def test_direct_encoding(self, tmp_path):
        p = tmp_path / "d.csv"
        write_lines(p, "sample_id,family_id," + NAMES4, "s1,0,1,0,1,0")
        m, _, y = load_dense_csv(p)
        assert m.rows[0] == SampleRecord("s1", 0, (0, 2))
        assert y.labels == (0,)

    def test_non_binary_cell_reports_location(self, tmp_path):
        p = tmp_path / "d.csv"
        write_lines(p, "sample_id,family_id," + NAMES4, "s1,0,1,2,0,0")
        with pytest.raises(DataFormatError, match="line 2.*DROP:b"):
            load_dense_csv(p)

    def test_malformed_header(self, tmp_path):
        p = tmp_path / "d.csv"
        write_lines(p, "id,family," + NAMES4, "s1,0,0,0,0,0")
        with pytest.raises(DataFormatError, match="header"):
            load_dense_csv(p)

    def test_family_id_out_of_range(self, tmp_path):
        p = tmp_path / "d.csv"
        write_lines(p, "sample_id,family_id," + NAMES4, "s1,12,0,0,0,0")
        with pytest.raises(DataFormatError, match="family_id"):
            load_dense_csv(p)


class TestSparseLoader:
    def test_direct_encoding(self, tmp_path):
        p = tmp_path / "d.sparse"
        write_lines(
            p,
            "#FEATURES 3",
            "API:x",
            "STR:y",
            "REG:z",
            "#SAMPLES 1",
            "s1\t2\tAPI:x STR:y",
        )
        m, _, y = load_sparse(p)
        assert m.rows[0].active == (0, 1)
        assert y.labels == (1,)

    def test_empty_feature_list(self, tmp_path):
        p = tmp_path / "d.sparse"
        write_lines(p, "#FEATURES 1", "API:x", "#SAMPLES 1", "s1\t0\t")
        m, _, _ = load_sparse(p)
        assert m.rows[0].active == ()

    def test_unknown_feature_name(self, tmp_path):
        p = tmp_path / "d.sparse"
        write_lines(p, "#FEATURES 1", "API:x", "#SAMPLES 1", "s1\t0\tAPI:zzz")
        with pytest.raises(DataFormatError, match="unknown feature"):
            load_sparse(p)

    def test_missing_dictionary_section(self, tmp_path):
        p = tmp_path / "d.sparse"
        write_lines(p, "#SAMPLES 1", "s1\t0\t")
        with pytest.raises(DataFormatError, match="#FEATURES"):
            load_sparse(p)


class TestCrossFormat:
    def test_dense_and_sparse_agree_on_random_matrix(self, tmp_path):
        rng = np.random.default_rng(7)
        dense = (rng.random((10, 20)) < 0.3).astype(np.uint8)
        fam = rng.integers(0, 12, size=10)
        m = matrix_from_dense(dense, family_ids=fam)
        d = generic_dictionary(20)

        dense_path = tmp_path / "m.csv"
        sparse_path = tmp_path / "m.sparse"
        write_dense_csv(dense_path, m, d)
        write_sparse(sparse_path, m, d)

        m1, d1, y1 = load_dense_csv(dense_path)
        m2, d2, y2 = load_sparse(sparse_path)
        assert m1 == m2
        assert d1 == d2
        assert y1 == y2

    @pytest.mark.parametrize("fmt", ["dense", "sparse"])
    def test_round_trip_identity(self, tmp_path, fmt):
        rng = np.random.default_rng(3)
        m = matrix_from_dense((rng.random((6, 9)) < 0.4).astype(np.uint8))
        d = generic_dictionary(9, category="API")
        write = write_dense_csv if fmt == "dense" else write_sparse
        load = load_dense_csv if fmt == "dense" else load_sparse

        p1 = tmp_path / "a"
        p2 = tmp_path / "b"
        write(p1, m, d)
        loaded, d1, _ = load(p1)
        write(p2, loaded, d1)
        again, d2, _ = load(p2)
        assert loaded == again == m
        assert d1 == d2 == d


class TestStratifiedSplit:
    def test_reference_shape_gives_503_test(self):
        # 942 negatives + 582 positives, like the real dataset.
        labels = [0] * 942 + [1] * 582
        m = matrix_from_dense(np.zeros((1524, 1), dtype=np.uint8))
        train, test = stratified_split(m, LabelVector(tuple(labels)), SplitSpec(seed=11))
        assert len(test) == 503 and len(train) == 1021
        test_pos = sum(labels[i] for i in test)
        # class ratio preserved within one sample
        assert abs(test_pos - 582 * 503 / 1524) <= 1

    def test_tiny_symmetric_split(self):
        m, y = matrix_from_dense(np.zeros((4, 1), dtype=np.uint8), labels=[0, 0, 1, 1])
        train, test = stratified_split(m, y, SplitSpec(seed=0, test_fraction=0.5))
        assert sum(y.labels[i] for i in test) == 1
        assert sum(y.labels[i] for i in train) == 1

    def test_deterministic_per_seed(self):
        labels = [0] * 30 + [1] * 20
        m = matrix_from_dense(np.zeros((50, 1), dtype=np.uint8))
        y = LabelVector(tuple(labels))
        a = stratified_split(m, y, SplitSpec(seed=5, test_fraction=0.3))
        b = stratified_split(m, y, SplitSpec(seed=5, test_fraction=0.3))
        assert a == b
        c = stratified_split(m, y, SplitSpec(seed=6, test_fraction=0.3))
        assert a != c

    @pytest.mark.parametrize("seed", range(10))
    def test_partition_disjoint_exhaustive(self, seed):
        labels = [0] * 13 + [1] * 9
        m = matrix_from_dense(np.zeros((22, 1), dtype=np.uint8))
        train, test = stratified_split(
            m, LabelVector(tuple(labels)), SplitSpec(seed=seed, test_fraction=0.3)
        )
        assert sorted(train + test) == list(range(22))

    def test_single_class_stratified_fails(self):
        m, y = matrix_from_dense(np.zeros((4, 1), dtype=np.uint8), labels=[1, 1, 1, 1])
        with pytest.raises(SplitError, match="both classes"):
            stratified_split(m, y, SplitSpec(test_fraction=0.5))

    def test_degenerate_fraction_fails(self):
        m, y = matrix_from_dense(np.zeros((4, 1), dtype=np.uint8), labels=[0, 0, 1, 1])
        with pytest.raises(SplitError):
            stratified_split(m, y, SplitSpec(test_fraction=0.01))


class TestSynthesize:
    def test_perfect_signal_separates(self):
        m, y = synthesize_dataset(100, 5, 0.2, [(2, 0.0, 1.0)], seed=4)
        dense = m.to_dense()
        assert np.array_equal(dense[:, 2], y.to_array())

    def test_same_seed_identical(self):
        a = synthesize_dataset(50, 8, 0.3, [(0, 0.1, 0.9)], seed=9)
        b = synthesize_dataset(50, 8, 0.3, [(0, 0.1, 0.9)], seed=9)
        assert a == b

    def test_label_rule_total(self):
        m, y = synthesize_dataset(40, 3, 0.5, [], seed=2)
        for row, label in zip(m.rows, y.labels):
            assert label == (row.family_id != 0)

    def test_out_of_range_signal_ordinal(self):
        with pytest.raises(ValueError, match="out of range"):
            synthesize_dataset(10, 3, 0.1, [(3, 0.0, 1.0)], seed=0)
