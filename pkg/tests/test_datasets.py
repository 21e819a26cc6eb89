import logging

import numpy as np
import pytest

from src.datasets import parse_coat, parse_movielens, split_test
from src.errors import DatasetParseError, DatasetValidationError


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def movielens_files(tmp_path):
    train = _write(tmp_path / "u1.base", "196\t242\t3\t881250949\n186\t302\t3\t891717742\n22\t377\t1\t878887116\n")
    test = _write(tmp_path / "u1.test", "1\t1\t5\t874965758\n196\t1\t4\t875072484\n")
    return train, test


class TestMovieLens:
    def test_ids_become_zero_based(self, movielens_files):
        dataset = parse_movielens(*movielens_files)
        assert dataset.train.triples()[0] == (195, 241, 3.0)
        assert dataset.n_users == 196
        assert dataset.n_items == 377
        assert len(dataset.train) == 3 and len(dataset.test) == 2
        assert dataset.scale_max == 5.0

    def test_train_observations(self, movielens_files):
        obs = parse_movielens(*movielens_files).train_observations()
        assert obs.shape == (196, 377)
        assert obs.n == 3

    def test_malformed_line_reports_number(self, tmp_path):
        train = _write(tmp_path / "train", "1\t1\t5\t0\n1\tx\t4\t0\n")
        test = _write(tmp_path / "test", "1\t1\t5\t0\n")
        with pytest.raises(DatasetParseError) as excinfo:
            parse_movielens(train, test)
        assert excinfo.value.line_number == 2

    def test_missing_field(self, tmp_path):
        train = _write(tmp_path / "train", "1\t1\t5\t0\n2\t2\t3\n")
        test = _write(tmp_path / "test", "1\t1\t5\t0\n")
        with pytest.raises(DatasetParseError) as excinfo:
            parse_movielens(train, test)
        assert excinfo.value.line_number == 2

    def test_out_of_range_rating(self, tmp_path):
        train = _write(tmp_path / "train", "1\t1\t7\t0\n")
        test = _write(tmp_path / "test", "1\t1\t5\t0\n")
        with pytest.raises(DatasetValidationError):
            parse_movielens(train, test)

    def test_duplicates_are_counted(self, tmp_path, caplog):
        train = _write(tmp_path / "train", "1\t1\t5\t0\n1\t1\t4\t1\n2\t2\t3\t0\n")
        test = _write(tmp_path / "test", "1\t2\t5\t0\n")
        with caplog.at_level(logging.WARNING):
            dataset = parse_movielens(train, test)
        assert len(dataset.train) == 2
        assert dataset.stats[0].rejected == 1
        assert dataset.stats[0].accepted == 2
        assert "duplicate" in caplog.text

    def test_empty_file_warns(self, tmp_path, caplog):
        train = _write(tmp_path / "train", "")
        test = _write(tmp_path / "test", "")
        with caplog.at_level(logging.WARNING):
            dataset = parse_movielens(train, test)
        assert dataset.is_empty
        assert "empty" in caplog.text


class TestCoat:
    def test_toy_matrix(self, tmp_path):
        train = _write(tmp_path / "train.ascii", "0 3\n5 0\n")
        test = _write(tmp_path / "test.ascii", "1 0\n0 0\n")
        dataset = parse_coat(train, test)
        assert dataset.train.triples() == [(0, 1, 3.0), (1, 0, 5.0)]
        assert dataset.test.triples() == [(0, 0, 1.0)]
        assert (dataset.n_users, dataset.n_items) == (2, 2)

    def test_ragged_row(self, tmp_path):
        train = _write(tmp_path / "train.ascii", "0 3 1\n5 0\n")
        test = _write(tmp_path / "test.ascii", "0 0 0\n0 0 0\n")
        with pytest.raises(DatasetParseError, match="row 2"):
            parse_coat(train, test)

    def test_shape_mismatch(self, tmp_path):
        train = _write(tmp_path / "train.ascii", "0 3\n5 0\n")
        test = _write(tmp_path / "test.ascii", "0 1 0\n")
        with pytest.raises(DatasetValidationError):
            parse_coat(train, test)

    def test_all_zero_warns(self, tmp_path, caplog):
        train = _write(tmp_path / "train.ascii", "0 0\n0 0\n")
        test = _write(tmp_path / "test.ascii", "0 0\n0 0\n")
        with caplog.at_level(logging.WARNING):
            dataset = parse_coat(train, test)
        assert len(dataset.train) == 0
        assert "no ratings" in caplog.text


class TestSplitTest:
    @pytest.fixture
    def dataset(self, tmp_path):
        train = _write(tmp_path / "train.ascii", "1 0 0 0\n0 2 0 0\n")
        test = _write(tmp_path / "test.ascii", "1 2 0 0\n0 0 3 4\n")
        return parse_coat(train, test)

    def test_halves(self, dataset):
        validation, evaluation = split_test(dataset, 0.5, seed=1)
        assert len(validation) == 2 and len(evaluation) == 2

    def test_partition(self, dataset):
        validation, evaluation = split_test(dataset, 0.5, seed=1)
        union = sorted(validation.triples() + evaluation.triples())
        assert union == sorted(dataset.test.triples())

    def test_seeded(self, dataset):
        first = split_test(dataset, 0.5, seed=9)
        second = split_test(dataset, 0.5, seed=9)
        assert first[0].triples() == second[0].triples()

    def test_rejects_bad_fraction(self, dataset):
        with pytest.raises(ValueError):
            split_test(dataset, 1.0, seed=0)
