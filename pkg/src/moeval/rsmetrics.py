"""
Accuracy, behavioral and fairness metrics computed from recommendation runs.
"""

import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .domain import MOEvalException
from .log import logger


class MetricException(MOEvalException):
    pass


@dataclass(frozen=True)
class UserPrediction:
    user_id: str
    predictions: tuple[str, ...]
    truth: str

    @property
    def is_hit(self) -> bool:
        return self.truth in self.predictions

    @property
    def rank(self) -> int | None:
        """1-indexed position of the truth item, None on a miss."""
        try:
            return self.predictions.index(self.truth) + 1
        except ValueError:
            return None


@dataclass(frozen=True)
class RecommendationRun:
    """
    Ranked predictions and one held-out truth item per user. Entries are kept in
    user-id order so every reduction sums in the same order.
    """

    entries: tuple[UserPrediction, ...]
    k_top: int

    def __post_init__(self):
        if self.k_top < 1:
            raise MetricException(f"k_top must be positive, got {self.k_top}")
        seen: set[str] = set()
        for entry in self.entries:
            if entry.user_id in seen:
                raise MetricException(f"User '{entry.user_id}' appears twice in run")
            seen.add(entry.user_id)
            if len(set(entry.predictions)) != len(entry.predictions):
                raise MetricException(
                    f"Duplicate item ids in predictions for user '{entry.user_id}'"
                )
            if len(entry.predictions) > self.k_top:
                raise MetricException(
                    f"User '{entry.user_id}' has {len(entry.predictions)} predictions, "
                    f"more than k_top={self.k_top}"
                )
        object.__setattr__(
            self, "entries", tuple(sorted(self.entries, key=lambda e: e.user_id))
        )

    @classmethod
    def from_predictions(
        cls,
        predictions: Mapping[str, Sequence[str]],
        truths: Mapping[str, str],
        k_top: int | None = None,
    ) -> "RecommendationRun":
        entries = []
        for user_id, items in predictions.items():
            if user_id not in truths:
                raise MetricException(f"No held-out truth for user '{user_id}'")
            entries.append(UserPrediction(user_id, tuple(items), truths[user_id]))
        if k_top is None:
            k_top = max((len(e.predictions) for e in entries), default=1)
        return cls(tuple(entries), k_top)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def user_ids(self) -> tuple[str, ...]:
        return tuple(e.user_id for e in self.entries)

    def restrict(self, user_ids: Iterable[str]) -> "RecommendationRun":
        keep = set(user_ids)
        return RecommendationRun(
            tuple(e for e in self.entries if e.user_id in keep), self.k_top
        )


@dataclass(frozen=True)
class GroupPartition:
    """
    Assignment of users (or, for item-sliced criteria, truth items) to group labels.
    """

    criterion: str
    assignment: Mapping[str, str]
    by_item: bool = False

    def label_of(self, entry: UserPrediction) -> str:
        key = entry.truth if self.by_item else entry.user_id
        try:
            return self.assignment[key]
        except KeyError:
            kind = "truth item" if self.by_item else "user"
            raise MetricException(
                f"No '{self.criterion}' group for {kind} '{key}'"
            ) from None


@dataclass(frozen=True)
class ItemEmbeddings:
    vectors: Mapping[str, np.ndarray]
    normalized_items: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        dims = {len(v) for v in self.vectors.values()}
        if len(dims) > 1:
            raise MetricException(f"Embeddings have mixed dimensions {sorted(dims)}")
        if dims and dims.pop() < 2:
            raise MetricException("Embeddings need at least 2 dimensions")
        for item_id, vector in self.vectors.items():
            if abs(float(np.linalg.norm(vector)) - 1.0) > 1e-6:
                raise MetricException(f"Embedding for '{item_id}' is not unit norm")

    def __getitem__(self, item_id: str) -> np.ndarray:
        try:
            return self.vectors[item_id]
        except KeyError:
            raise MetricException(f"No embedding for item '{item_id}'") from None

    def __contains__(self, item_id: object) -> bool:
        return item_id in self.vectors

    @property
    def dimension(self) -> int:
        return len(next(iter(self.vectors.values()))) if self.vectors else 0


def cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    return 1.0 - float(np.dot(a, b))


def _require_users(run: RecommendationRun) -> None:
    if len(run) == 0:
        raise MetricException("Cannot compute metrics on an empty run")


def _report_skipped(metric: str, skipped: Sequence[str], scored: int) -> None:
    """Users a per-user metric cannot score are left out; none scored is an error."""
    if skipped:
        logger.warning(f"{metric}: skipped {len(skipped)} users: {list(skipped)}")
    if scored == 0:
        raise MetricException(f"No user can be scored for {metric}")


def hit_rate(run: RecommendationRun) -> float:
    _require_users(run)
    return sum(e.is_hit for e in run.entries) / len(run)


def miss_rate(run: RecommendationRun) -> float:
    return 1.0 - hit_rate(run)


def mrr(run: RecommendationRun) -> float:
    _require_users(run)
    reciprocal = [0.0 if e.rank is None else 1.0 / e.rank for e in run.entries]
    return float(np.mean(reciprocal))


def mred(run: RecommendationRun, partition: GroupPartition) -> float:
    """
    Negated sum over groups of the distance between group miss-rate and the global
    miss-rate. Groups weigh the same whatever their size.
    """
    _require_users(run)
    groups: dict[str, list[str]] = {}
    for entry in run.entries:
        groups.setdefault(partition.label_of(entry), []).append(entry.user_id)

    global_mr = miss_rate(run)
    deviations = []
    for label in sorted(groups):
        group_mr = miss_rate(run.restrict(groups[label]))
        logger.debug(f"{partition.criterion}={label}: miss rate {group_mr:.6f}")
        deviations.append(abs(group_mr - global_mr))
    return -math.fsum(deviations)


def being_less_wrong(run: RecommendationRun, emb: ItemEmbeddings) -> float:
    """
    Negated mean cosine distance between the top-1 prediction and the truth over
    missed users; 0 when nothing is missed. Missed users with an empty list are
    skipped.
    """
    _require_users(run)
    distances = []
    skipped = []
    for entry in run.entries:
        if entry.is_hit:
            continue
        if not entry.predictions:
            skipped.append(entry.user_id)
            continue
        distances.append(cosine_distance(emb[entry.predictions[0]], emb[entry.truth]))
    if not distances and not skipped:
        logger.warning("No missed users in run, being-less-wrong defaults to 0")
        return 0.0
    _report_skipped("being_less_wrong", skipped, len(distances))
    return -float(np.mean(distances))


def intra_list_diversity(run: RecommendationRun, emb: ItemEmbeddings) -> float:
    _require_users(run)
    if run.k_top < 2:
        raise MetricException(f"Diversity needs k_top >= 2, got {run.k_top}")
    per_user = []
    skipped = []
    for entry in run.entries:
        if len(entry.predictions) < 2:
            skipped.append(entry.user_id)
            continue
        vectors = [emb[item] for item in entry.predictions]
        pairwise = [cosine_distance(a, b) for a, b in combinations(vectors, 2)]
        per_user.append(float(np.mean(pairwise)))
    _report_skipped("diversity", skipped, len(per_user))
    return float(np.mean(per_user))


def gini_impurity(counts: Sequence[int]) -> float:
    """
    >>> gini_impurity([5, 5])
    0.5
    """
    counts_arr = np.asarray(counts, dtype=float)
    if np.any(counts_arr < 0):
        raise MetricException("Class counts must be nonnegative")
    total = counts_arr.sum()
    if total <= 0:
        raise MetricException("Gini impurity needs a positive total count")
    p = counts_arr / total
    return 1.0 - math.fsum((p * p).tolist())


def _artist_counts(
    items: Iterable[str], item_to_artist: Mapping[str, str]
) -> list[int]:
    artists = []
    for item in items:
        try:
            artists.append(item_to_artist[item])
        except KeyError:
            raise MetricException(f"Item '{item}' has no artist") from None
    return [count for _, count in sorted(Counter(artists).items())]


def variance_agreement(
    run: RecommendationRun,
    item_to_artist: Mapping[str, str],
    user_histories: Mapping[str, Sequence[str]],
) -> float:
    """
    Negated mean absolute gap between the artist Gini impurity of each user's history
    and of their recommendations; 0 is perfect agreement. Users with an empty list
    are skipped.
    """
    _require_users(run)
    gaps = []
    skipped = []
    for entry in run.entries:
        history = user_histories.get(entry.user_id, ())
        if not history:
            raise MetricException(f"User '{entry.user_id}' has no history")
        if not entry.predictions:
            skipped.append(entry.user_id)
            continue
        g_hist = gini_impurity(_artist_counts(history, item_to_artist))
        g_rec = gini_impurity(_artist_counts(entry.predictions, item_to_artist))
        gaps.append(abs(g_rec - g_hist))
    _report_skipped("variance_agreement", skipped, len(gaps))
    return -float(np.mean(gaps))


def quantile_buckets(values: Mapping[str, float], n_buckets: int) -> dict[str, str]:
    """
    Label each key by the quantile bucket of its value, "q0" holding the smallest.
    """
    if n_buckets < 1:
        raise MetricException(f"Need at least one bucket, got {n_buckets}")
    if not values:
        return {}
    keys = sorted(values)
    arr = np.array([values[k] for k in keys], dtype=float)
    edges = np.quantile(arr, np.linspace(0, 1, n_buckets + 1)[1:-1])
    labels = np.searchsorted(edges, arr, side="right")
    return {k: f"q{int(label)}" for k, label in zip(keys, labels, strict=True)}


def attribute_partition(
    user_attributes: Mapping[str, Mapping[str, str]], attribute: str
) -> GroupPartition:
    return GroupPartition(
        criterion=attribute,
        assignment={
            user_id: attrs[attribute]
            for user_id, attrs in user_attributes.items()
            if attribute in attrs
        },
    )


def activity_partition(
    histories: Mapping[str, Sequence[str]], n_buckets: int = 3
) -> GroupPartition:
    lengths = {user_id: float(len(items)) for user_id, items in histories.items()}
    return GroupPartition("activity", quantile_buckets(lengths, n_buckets))


def item_popularity_partition(
    item_counts: Mapping[str, int],
    items: Iterable[str],
    n_buckets: int = 3,
    criterion: str = "track_popularity",
) -> GroupPartition:
    """
    Item-sliced partition: users are grouped by the popularity bucket of their truth
    item. Items never seen in training count as zero.
    """
    popularity = {item: float(item_counts.get(item, 0)) for item in set(items)}
    return GroupPartition(criterion, quantile_buckets(popularity, n_buckets), True)
