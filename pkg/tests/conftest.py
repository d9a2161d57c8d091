import logging
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest

from moeval import cli
from moeval.bncv import Interaction, InteractionDataset
from moeval.domain import MetricRegistry, MetricSpec
from moeval.log import set_log_level
from moeval.rsmetrics import ItemEmbeddings

GOLDEN_DIR = Path(__file__).parent / "golden"


def pytest_addoption(parser):
    parser.addoption(
        "--challenge-data",
        action="store",
        default=None,
        help="Metric table of released challenge submissions, enables the "
        "reproduction test.",
    )


@pytest.fixture(autouse=True)
def restore_log_level():
    yield
    set_log_level(logging.INFO)


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN_DIR


@pytest.fixture
def challenge_data(request) -> Path:
    path = request.config.getoption("--challenge-data")
    if path is None:
        pytest.skip("needs --challenge-data PATH")
    return Path(path)


@pytest.fixture
def hr_mred_registry() -> MetricRegistry:
    return MetricRegistry.from_specs(
        [MetricSpec("hit_rate", is_base=True), MetricSpec("mred_activity")]
    )


def make_dataset(
    n_users: int = 40,
    n_events: int = 6,
    n_items: int = 60,
    seed: int = 7,
    with_country: bool = True,
) -> InteractionDataset:
    """Listening histories drawn from a skewed catalog, ten artists."""
    rng = np.random.default_rng(seed)
    popularity = 1.0 / np.arange(1, n_items + 1)
    popularity /= popularity.sum()
    events = []
    attributes = {}
    for u in range(n_users):
        user_id = f"u{u:03d}"
        items = rng.choice(n_items, size=n_events, replace=False, p=popularity)
        for t, item in enumerate(items):
            item_id = f"i{int(item):03d}"
            artist_id = f"a{int(item) % 10}"
            events.append(Interaction(user_id, item_id, artist_id, 1000 + t))
        if with_country:
            attributes[user_id] = {"country": "IT" if u % 3 else "US"}
    return InteractionDataset(tuple(events), attributes)


def make_embeddings(n_items: int = 60, dim: int = 4, seed: int = 3) -> ItemEmbeddings:
    rng = np.random.default_rng(seed)
    vectors = {}
    for i in range(n_items):
        v = rng.normal(size=dim)
        vectors[f"i{i:03d}"] = v / np.linalg.norm(v)
    return ItemEmbeddings(vectors)


def dataset_csv(dataset: InteractionDataset) -> str:
    lines = ["user_id,item_id,artist_id,timestamp,attr_country"]
    for e in dataset.events:
        country = dataset.user_attributes.get(e.user_id, {}).get("country", "")
        lines.append(f"{e.user_id},{e.item_id},{e.artist_id},{e.timestamp},{country}")
    return "\n".join(lines) + "\n"


def embeddings_csv(embeddings: ItemEmbeddings) -> str:
    header = "item_id," + ",".join(f"d{i}" for i in range(embeddings.dimension))
    lines = [header]
    for item_id, vector in embeddings.vectors.items():
        lines.append(item_id + "," + ",".join(repr(float(x)) for x in vector))
    return "\n".join(lines) + "\n"


@pytest.fixture
def dataset() -> InteractionDataset:
    return make_dataset()


@pytest.fixture
def embeddings() -> ItemEmbeddings:
    return make_embeddings()


@pytest.fixture
def run_cli(capsys) -> Callable[..., tuple[int, str, str]]:
    """Run `moeval <args>` in process, returning (exit status, stdout, stderr)."""

    def _run(*argv: str) -> tuple[int, str, str]:
        try:
            status = cli.main(list(argv))
        except SystemExit as exc:
            status = exc.code if isinstance(exc.code, int) else 1
        out, err = capsys.readouterr()
        return status, out, err

    return _run


@pytest.fixture
def dataset_factory() -> Callable[..., InteractionDataset]:
    return make_dataset


@pytest.fixture
def write_inputs(tmp_path) -> Callable[..., tuple[Path, Path]]:
    """Write an interactions CSV and matching embeddings CSV under tmp_path."""

    def _write(**kwargs) -> tuple[Path, Path]:
        data = make_dataset(**kwargs)
        n_items = kwargs.get("n_items", 60)
        interactions_path = tmp_path / "interactions.csv"
        embeddings_path = tmp_path / "embeddings.csv"
        interactions_path.write_text(dataset_csv(data))
        embeddings_path.write_text(embeddings_csv(make_embeddings(n_items)))
        return interactions_path, embeddings_path

    return _write
