"""
Bootstrapped nested cross-validation: user-stratified bootstrap splits, per-fold
train and evaluate of a pluggable learning algorithm, and per-metric aggregation.
"""

import hashlib
from collections import Counter
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from .domain import MetricVector, ModelRecord, MOEvalException
from .log import logger
from .rsmetrics import (
    ItemEmbeddings,
    RecommendationRun,
    UserPrediction,
    activity_partition,
    attribute_partition,
    being_less_wrong,
    hit_rate,
    intra_list_diversity,
    item_popularity_partition,
    mred,
    mrr,
    variance_agreement,
)


class BNCVException(MOEvalException):
    def __init__(self, msg: str, fold_index: int | None = None):
        super().__init__(msg)
        self.fold_index = fold_index

    def __str__(self) -> str:
        if self.fold_index is None:
            return self.msg
        return f"fold {self.fold_index}: {self.msg}"


@dataclass(frozen=True)
class Interaction:
    user_id: str
    item_id: str
    artist_id: str
    timestamp: int


@dataclass(frozen=True)
class InteractionDataset:
    """
    Listening events plus per-user attributes. Events are stored grouped by user and
    in chronological order, timestamp ties keeping their input order.
    """

    events: tuple[Interaction, ...]
    user_attributes: Mapping[str, Mapping[str, str]] = field(default_factory=dict)

    def __post_init__(self):
        # sorted() is stable, so equal (user, timestamp) keys keep input order
        ordered = tuple(sorted(self.events, key=lambda e: (e.user_id, e.timestamp)))
        object.__setattr__(self, "events", ordered)
        counts = Counter(e.user_id for e in ordered)
        short = sorted(user for user, n in counts.items() if n < 2)
        if short:
            raise BNCVException(f"Users with fewer than 2 events: {short}")

    @property
    def users(self) -> tuple[str, ...]:
        return tuple(sorted({e.user_id for e in self.events}))

    def events_by_user(self) -> dict[str, list[Interaction]]:
        grouped: dict[str, list[Interaction]] = {}
        for event in self.events:
            grouped.setdefault(event.user_id, []).append(event)
        return grouped

    @property
    def item_to_artist(self) -> dict[str, str]:
        return {e.item_id: e.artist_id for e in self.events}


@dataclass(frozen=True)
class BootstrapSplit:
    train_events: tuple[Interaction, ...]
    test_pairs: tuple[tuple[str, str], ...]
    multiplicity: Mapping[str, int]


@runtime_checkable
class RecommendationModel(Protocol):
    def predict(self, user_id: str, k_top: int) -> list[str]: ...


@runtime_checkable
class LearningAlgorithm(Protocol):
    """Trains a fresh, self-contained model per fold."""

    name: str

    def train(self, train_events: Sequence[Interaction]) -> RecommendationModel: ...


def _histories(events: Sequence[Interaction]) -> dict[str, list[str]]:
    histories: dict[str, list[str]] = {}
    for event in events:
        histories.setdefault(event.user_id, []).append(event.item_id)
    return histories


def _user_key(user_id: str) -> int:
    return int.from_bytes(hashlib.sha256(user_id.encode("utf-8")).digest()[:8], "big")


class PopularityModel:
    def __init__(self, ranking: list[str], histories: Mapping[str, Sequence[str]]):
        self.ranking = ranking
        self.histories = {user: set(items) for user, items in histories.items()}

    def predict(self, user_id: str, k_top: int) -> list[str]:
        seen = self.histories.get(user_id, set())
        picks = []
        for item in self.ranking:
            if item not in seen:
                picks.append(item)
                if len(picks) == k_top:
                    break
        if len(picks) < k_top:
            logger.warning(
                f"Only {len(picks)} unseen candidates for user '{user_id}', "
                f"fewer than k_top={k_top}"
            )
        return picks


class PopularityBaseline:
    """Most frequent training items the user has not interacted with yet."""

    name = "popularity"

    def train(self, train_events: Sequence[Interaction]) -> PopularityModel:
        counts = Counter(e.item_id for e in train_events)
        ranking = sorted(counts, key=lambda item: (-counts[item], item))
        return PopularityModel(ranking, _histories(train_events))


class RandomModel:
    def __init__(self, catalog: list[str], seed: int):
        self.catalog = catalog
        self.seed = seed

    def predict(self, user_id: str, k_top: int) -> list[str]:
        rng = np.random.default_rng([self.seed, _user_key(user_id)])
        size = min(k_top, len(self.catalog))
        picks = rng.choice(len(self.catalog), size=size, replace=False)
        return [self.catalog[int(i)] for i in picks]


class RandomBaseline:
    """Uniform draw without replacement from the training catalog."""

    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def train(self, train_events: Sequence[Interaction]) -> RandomModel:
        return RandomModel(sorted({e.item_id for e in train_events}), self.seed)


def popularity_baseline() -> LearningAlgorithm:
    return PopularityBaseline()


def random_baseline(seed: int = 0) -> LearningAlgorithm:
    return RandomBaseline(seed)


def bootstrap_split(
    dataset: InteractionDataset, seed: int, fold_index: int
) -> BootstrapSplit:
    """
    Draw |U| users with replacement, keyed by (seed, fold_index). Each distinct sampled
    user holds out their chronologically last event; earlier events train, once.
    """
    if seed < 0 or fold_index < 0:
        raise BNCVException(
            f"Seed and fold index must be nonnegative, got {seed} and {fold_index}"
        )
    users = dataset.users
    if not users:
        raise BNCVException("Cannot split an empty dataset")
    rng = np.random.default_rng([seed, fold_index])
    drawn = rng.integers(0, len(users), size=len(users))
    multiplicity = Counter(users[int(i)] for i in drawn)

    by_user = dataset.events_by_user()
    train: list[Interaction] = []
    test: list[tuple[str, str]] = []
    for user_id in sorted(multiplicity):
        history = by_user[user_id]
        if len(history) < 2:
            raise BNCVException(f"User '{user_id}' has fewer than 2 events", fold_index)
        train.extend(history[:-1])
        test.append((user_id, history[-1].item_id))

    logger.debug(
        f"Fold {fold_index}: {len(multiplicity)} distinct users sampled, "
        f"{len(train)} training events"
    )
    return BootstrapSplit(tuple(train), tuple(test), dict(sorted(multiplicity.items())))


@dataclass(frozen=True)
class FoldContext:
    dataset: InteractionDataset
    split: BootstrapSplit
    histories: Mapping[str, Sequence[str]]
    item_counts: Mapping[str, int]
    artist_counts: Mapping[str, int]
    embeddings: ItemEmbeddings | None = None
    n_buckets: int = 3


@dataclass(frozen=True)
class MetricComputation:
    name: str
    compute: Callable[[RecommendationRun, FoldContext], float]


def _mred_labeled(
    run: RecommendationRun, ctx: FoldContext, attribute: str
) -> float:
    """MRED over the users that carry the attribute; unlabeled users are left out."""
    partition = attribute_partition(ctx.dataset.user_attributes, attribute)
    unlabeled = [u for u in run.user_ids if u not in partition.assignment]
    if unlabeled:
        logger.warning(
            f"mred_{attribute}: {len(unlabeled)} users without '{attribute}' "
            f"left out of the slice: {unlabeled}"
        )
    labeled = run.restrict(partition.assignment)
    if len(labeled) == 0:
        logger.warning(f"mred_{attribute}: no labeled users in run, defaults to 0")
        return 0.0
    return mred(labeled, partition)


def _mred_attribute(attribute: str) -> MetricComputation:
    return MetricComputation(
        f"mred_{attribute}", lambda run, ctx: _mred_labeled(run, ctx, attribute)
    )


def _mred_artist_popularity(run: RecommendationRun, ctx: FoldContext) -> float:
    item_to_artist = ctx.dataset.item_to_artist
    truths = [e.truth for e in run.entries]
    item_counts = {
        item: ctx.artist_counts.get(item_to_artist[item], 0) for item in truths
    }
    return mred(
        run,
        item_popularity_partition(
            item_counts, truths, ctx.n_buckets, "artist_popularity"
        ),
    )


def default_metric_suite(
    dataset: InteractionDataset, embeddings: ItemEmbeddings | None = None
) -> list[MetricComputation]:
    """
    Accuracy, fairness slices and behavioral metrics. Every metric is oriented so
    that larger is better.
    """
    suite = [
        MetricComputation("hit_rate", lambda run, ctx: hit_rate(run)),
        MetricComputation("mrr", lambda run, ctx: mrr(run)),
    ]
    attributes = sorted(
        {name for attrs in dataset.user_attributes.values() for name in attrs}
    )
    suite.extend(_mred_attribute(attribute) for attribute in attributes)
    suite.extend(
        [
            MetricComputation(
                "mred_activity",
                lambda run, ctx: mred(
                    run, activity_partition(ctx.histories, ctx.n_buckets)
                ),
            ),
            MetricComputation(
                "mred_track_popularity",
                lambda run, ctx: mred(
                    run,
                    item_popularity_partition(
                        ctx.item_counts, (e.truth for e in run.entries), ctx.n_buckets
                    ),
                ),
            ),
            MetricComputation("mred_artist_popularity", _mred_artist_popularity),
        ]
    )
    if embeddings is not None:
        suite.extend(
            [
                MetricComputation(
                    "being_less_wrong",
                    lambda run, ctx: being_less_wrong(run, _embeddings(ctx)),
                ),
                MetricComputation(
                    "diversity",
                    lambda run, ctx: intra_list_diversity(run, _embeddings(ctx)),
                ),
            ]
        )
    suite.append(
        MetricComputation(
            "variance_agreement",
            lambda run, ctx: variance_agreement(
                run, ctx.dataset.item_to_artist, ctx.histories
            ),
        )
    )
    return suite


def _embeddings(ctx: FoldContext) -> ItemEmbeddings:
    if ctx.embeddings is None:
        raise BNCVException("Metric needs item embeddings but none were supplied")
    return ctx.embeddings


def evaluate_fold(
    algo: LearningAlgorithm,
    dataset: InteractionDataset,
    fold_index: int,
    seed: int,
    metric_suite: Sequence[MetricComputation],
    k_top: int,
    embeddings: ItemEmbeddings | None = None,
    n_buckets: int = 3,
) -> MetricVector:
    split = bootstrap_split(dataset, seed, fold_index)
    item_to_artist = dataset.item_to_artist
    try:
        model = algo.train(split.train_events)
        run = RecommendationRun(
            tuple(
                UserPrediction(user_id, tuple(model.predict(user_id, k_top)), truth)
                for user_id, truth in split.test_pairs
            ),
            k_top,
        )
    except MOEvalException as err:
        raise BNCVException(str(err), fold_index) from err
    except Exception as err:
        raise BNCVException(
            f"Algorithm '{algo.name}' failed: {err!r}", fold_index
        ) from err

    ctx = FoldContext(
        dataset=dataset,
        split=split,
        histories=_histories(split.train_events),
        item_counts=Counter(e.item_id for e in split.train_events),
        artist_counts=Counter(item_to_artist[e.item_id] for e in split.train_events),
        embeddings=embeddings,
        n_buckets=n_buckets,
    )
    values: dict[str, float] = {}
    for metric in metric_suite:
        try:
            values[metric.name] = metric.compute(run, ctx)
        except MOEvalException as err:
            raise BNCVException(
                f"metric '{metric.name}' failed: {err}", fold_index
            ) from err
    return MetricVector(values)


def run_bncv(
    algo: LearningAlgorithm,
    dataset: InteractionDataset,
    n_folds: int,
    seed: int,
    metric_suite: Sequence[MetricComputation],
    k_top: int,
    model_id: str | None = None,
    embeddings: ItemEmbeddings | None = None,
    n_buckets: int = 3,
) -> ModelRecord:
    """
    Evaluate an algorithm over n_folds bootstrap iterations. Fold i depends only on
    (seed, i), so adding folds never changes earlier ones.
    """
    if n_folds < 1:
        raise BNCVException(f"n_folds must be at least 1, got {n_folds}")
    if k_top < 1:
        raise BNCVException(f"k_top must be at least 1, got {k_top}")
    model_id = model_id if model_id is not None else algo.name

    fold_vectors = []
    for fold_index in range(n_folds):
        vector = evaluate_fold(
            algo,
            dataset,
            fold_index,
            seed,
            metric_suite,
            k_top,
            embeddings=embeddings,
            n_buckets=n_buckets,
        )
        logger.info(f"Evaluated '{model_id}' fold {fold_index + 1}/{n_folds}")
        fold_vectors.append(vector)
    return ModelRecord.from_folds(model_id, fold_vectors)
