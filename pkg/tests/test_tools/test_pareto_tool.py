import json

import pytest

TABLE = """model_id,fold,hit_rate,latency
fast,,0.5,10
slow,,0.5,20
best,,0.6,30
"""


@pytest.fixture
def table(tmp_path):
    path = tmp_path / "runs.csv"
    path.write_text(TABLE, encoding="utf-8")
    return path


def test_front_with_minimized_latency(run_cli, table, caplog):
    status, out, _ = run_cli("pareto", "--input", str(table), "--minimize", "latency")
    assert status == 0
    document = json.loads(out)
    assert document["front"] == ["fast", "best"]
    assert document["dominated"] == [{"model_id": "slow", "dominated_by": "fast"}]
    assert document["registry"][1]["direction"] == "minimize"
    assert "2 of 3 models are non-dominated" in caplog.text


def test_front_all_maximized(run_cli, table):
    document = json.loads(run_cli("pareto", "--input", str(table))[1])
    assert document["front"] == ["best"]
    assert [d["dominated_by"] for d in document["dominated"]] == ["best", "best"]


def test_front_from_config_registry(run_cli, table, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(
        json.dumps(
            {
                "registry": [
                    {"id": "hit_rate", "is_base": True},
                    {"id": "latency", "direction": "minimize"},
                ]
            }
        ),
        encoding="utf-8",
    )
    status, out, _ = run_cli("pareto", "--input", str(table), "--config", str(config))
    assert status == 0
    assert json.loads(out)["front"] == ["fast", "best"]


def test_unknown_minimized_metric(run_cli, table, caplog):
    status, _, _ = run_cli("pareto", "--input", str(table), "--minimize", "memory")
    assert status == 2
    assert "Unknown metric id 'memory'" in caplog.text
