import json

import pytest

from src.batch_processor import process_fixtures
from src.pipeline import CommandPipeline, parse_generators
from src.utils import InputError


def test_generators_for_one_color():
    assert parse_generators("x, y", ["*"]) == {"*": ["x", "y"]}


def test_generators_for_two_colors():
    assert parse_generators("r:x,m:y,m:z", ["m", "r"]) == {"m": ["y", "z"], "r": ["x"]}
    with pytest.raises(InputError):
        parse_generators("x", ["m", "r"])
    with pytest.raises(InputError):
        parse_generators("q:x", ["m", "r"])


def test_stage_timings_are_recorded_but_not_reported(data_dir):
    pipeline = CommandPipeline()
    report = pipeline.check(f"{data_dir}/z2-monoid.def")
    assert report.verdict == "PASS"
    assert report.timing is None
    assert {"load", "validate", "total"} <= set(pipeline.timings)


def test_env_rejects_a_colored_operad(data_dir):
    with pytest.raises(InputError):
        CommandPipeline().env(f"{data_dir}/mod-ass.def", "r:x", 1)


def test_wrong_kind_is_an_input_error(data_dir):
    with pytest.raises(InputError):
        CommandPipeline().free(f"{data_dir}/z2-monoid.def", "x", 1)


def test_batch_over_the_bundled_fixtures(data_dir, tmp_path):
    out = tmp_path / "results.json"
    results = process_fixtures(data_dir, str(out), progress=False)
    verdicts = {r["fixture"]: r["verdict"] for r in results}
    assert verdicts["ass-mutated.def"] == "FAIL"
    assert all(v == "PASS" for name, v in verdicts.items() if name != "ass-mutated.def")
    saved = json.loads(out.read_text())
    assert saved["fixtures"] == len(results)
