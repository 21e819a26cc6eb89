"""
Rating datasets: MovieLens 100K and Coat Shopping ingestion, test-set splitting
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple, Union

import numpy as np
import pandas as pd

from .errors import DatasetParseError, DatasetValidationError
from .models import Entries, ObservationSet

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MOVIELENS_COLUMNS = ["user", "item", "rating", "timestamp"]
RATING_SCALE = (1.0, 5.0)


@dataclass(frozen=True)
class ParseStats:
    """Line accounting for one parsed file"""
    path: str
    accepted: int = 0
    rejected: int = 0


@dataclass(frozen=True, eq=False)
class RatingDataset:
    """Users x items ratings with 0-based indices, split into train and test"""
    name: str
    n_users: int
    n_items: int
    train: Entries
    test: Entries
    scale_max: float = RATING_SCALE[1]
    scale_min: float = RATING_SCALE[0]
    stats: Tuple[ParseStats, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_users < 0 or self.n_items < 0:
            raise DatasetValidationError("Dimensions cannot be negative")
        for part_name in ("train", "test"):
            part = getattr(self, part_name)
            try:
                part.check_bounds(self.n_users, self.n_items)
            except ValueError as exc:
                raise DatasetValidationError(f"{self.name} {part_name}: {exc}") from exc
            if len(part) and part.has_duplicates(self.n_items):
                raise DatasetValidationError(f"{self.name} {part_name} has duplicate index pairs")
            if len(part) and (part.values.min() < 0 or part.values.max() > self.scale_max):
                raise DatasetValidationError(
                    f"{self.name} {part_name} ratings fall outside [0, {self.scale_max}]"
                )

    @property
    def is_empty(self) -> bool:
        return len(self.train) == 0 and len(self.test) == 0

    def train_observations(self) -> ObservationSet:
        """Training ratings as an observation set over the users x items matrix"""
        return ObservationSet(self.n_users, self.n_items, self.train)


def _check_rating_range(values: np.ndarray, path: PathLike) -> None:
    low, high = RATING_SCALE
    if values.size and (values.min() < low or values.max() > high):
        raise DatasetValidationError(f"{path}: ratings must lie in [{low:g}, {high:g}]")


def _read_movielens_file(path: PathLike) -> Tuple[pd.DataFrame, ParseStats]:
    """Tab-separated `user item rating timestamp` lines, 1-based ids"""
    try:
        raw = pd.read_csv(
            path, sep="\t", header=None, names=MOVIELENS_COLUMNS, dtype=str,
            skip_blank_lines=False,
        )
    except pd.errors.EmptyDataError:
        logger.warning("%s is empty, no ratings loaded", path)
        return pd.DataFrame(columns=["user", "item", "rating"]), ParseStats(str(path))
    except pd.errors.ParserError as exc:
        match = re.search(r"line (\d+)", str(exc))
        line_number = int(match.group(1)) if match else 0
        raise DatasetParseError(path, line_number, "wrong number of fields") from exc

    user = pd.to_numeric(raw["user"], errors="coerce")
    item = pd.to_numeric(raw["item"], errors="coerce")
    rating = pd.to_numeric(raw["rating"], errors="coerce")

    malformed = (
        user.isna() | item.isna() | rating.isna() | raw["timestamp"].isna()
        | (user % 1 != 0) | (item % 1 != 0) | (user < 1) | (item < 1)
    )
    if malformed.any():
        first = int(np.flatnonzero(malformed.to_numpy())[0])
        raise DatasetParseError(path, first + 1, "expected 'user<TAB>item<TAB>rating<TAB>timestamp'")

    frame = pd.DataFrame({
        "user": user.astype(np.int64) - 1,
        "item": item.astype(np.int64) - 1,
        "rating": rating.astype(np.float64),
    })
    _check_rating_range(frame["rating"].to_numpy(), path)

    duplicated = frame.duplicated(subset=["user", "item"], keep="first")
    rejected = int(duplicated.sum())
    if rejected:
        logger.warning("%s: rejected %d duplicate (user, item) lines", path, rejected)
    frame = frame[~duplicated]

    stats = ParseStats(str(path), accepted=len(frame), rejected=rejected)
    logger.info("%s: accepted %d lines, rejected %d", path, stats.accepted, stats.rejected)
    return frame, stats


def _frame_entries(frame: pd.DataFrame) -> Entries:
    return Entries(
        frame["user"].to_numpy(dtype=np.int64),
        frame["item"].to_numpy(dtype=np.int64),
        frame["rating"].to_numpy(dtype=np.float64),
    )


def parse_movielens(train_path: PathLike, test_path: PathLike) -> RatingDataset:
    """MovieLens 100K style train/test pair (e.g. u1.base / u1.test)"""
    train, train_stats = _read_movielens_file(train_path)
    test, test_stats = _read_movielens_file(test_path)

    both = pd.concat([train, test], ignore_index=True)
    n_users = int(both["user"].max()) + 1 if len(both) else 0
    n_items = int(both["item"].max()) + 1 if len(both) else 0

    dataset = RatingDataset(
        name="movielens",
        n_users=n_users,
        n_items=n_items,
        train=_frame_entries(train),
        test=_frame_entries(test),
        stats=(train_stats, test_stats),
    )
    if dataset.is_empty:
        logger.warning("MovieLens dataset is empty")
    return dataset


def _read_dense_ratings(path: PathLike) -> Tuple[np.ndarray, ParseStats]:
    """Whitespace-separated dense matrix, 0 = unobserved"""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            tokens = line.split()
            if not tokens:
                continue
            if width is None:
                width = len(tokens)
            elif len(tokens) != width:
                raise DatasetParseError(
                    path, line_number,
                    f"row {len(rows) + 1} has {len(tokens)} values, expected {width}",
                )
            try:
                rows.append([float(token) for token in tokens])
            except ValueError as exc:
                raise DatasetParseError(path, line_number, f"row {len(rows) + 1} is not numeric") from exc

    matrix = np.array(rows, dtype=np.float64) if rows else np.zeros((0, 0))
    if matrix.size and matrix.min() < 0:
        raise DatasetValidationError(f"{path}: negative ratings")
    observed = matrix[matrix != 0]
    _check_rating_range(observed, path)

    stats = ParseStats(str(path), accepted=len(rows), rejected=0)
    logger.info("%s: %d rows, %d ratings", path, len(rows), observed.size)
    return matrix, stats


def _dense_entries(matrix: np.ndarray) -> Entries:
    users, items = np.nonzero(matrix)
    return Entries(users, items, matrix[users, items])


def parse_coat(train_path: PathLike, test_path: PathLike) -> RatingDataset:
    """Coat Shopping dense train/test matrices (290 users x 300 items)"""
    train, train_stats = _read_dense_ratings(train_path)
    test, test_stats = _read_dense_ratings(test_path)

    if train.size and test.size and train.shape != test.shape:
        raise DatasetValidationError(
            f"Train shape {train.shape} and test shape {test.shape} differ"
        )
    shape = train.shape if train.size else test.shape

    dataset = RatingDataset(
        name="coat",
        n_users=shape[0],
        n_items=shape[1],
        train=_dense_entries(train),
        test=_dense_entries(test),
        stats=(train_stats, test_stats),
    )
    if len(dataset.train) == 0:
        logger.warning("%s holds no ratings", train_path)
    if len(dataset.test) == 0:
        logger.warning("%s holds no ratings", test_path)
    return dataset


def split_test(dataset: RatingDataset, fraction: float, seed: int) -> Tuple[Entries, Entries]:
    """Randomly partition the test ratings into validation and evaluation subsets"""
    if not 0 < fraction < 1:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    total = len(dataset.test)
    if total == 0:
        raise ValueError("Cannot split an empty test set")

    order = np.random.default_rng(seed).permutation(total)
    size = int(round(fraction * total))
    validation = np.sort(order[:size])
    evaluation = np.sort(order[size:])
    return dataset.test.subset(validation), dataset.test.subset(evaluation)
