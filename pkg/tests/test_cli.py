import json
import os

import pytest

from src.cli import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, EXIT_RESOURCE, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def fixture(data_dir, name):
    return os.path.join(data_dir, name)


def test_check_passes_on_ass(capsys, data_dir):
    code, out, _ = run(capsys, "check", fixture(data_dir, "ass.def"))
    assert code == EXIT_PASS
    assert "verdict: PASS" in out


def test_check_reports_the_mutation(capsys, data_dir):
    code, out, _ = run(capsys, "check", fixture(data_dir, "ass-mutated.def"), "--format", "json")
    assert code == EXIT_FAIL
    report = json.loads(out)
    assert report["verdict"] == "FAIL"
    laws = {issue["law"] for check in report["checks"] for issue in check["issues"]}
    assert "associativity" in laws


def test_malformed_definition_is_an_input_error(capsys, tmp_path):
    path = tmp_path / "broken.def"
    path.write_text('{"kind": "operad",')
    code, out, err = run(capsys, "check", str(path))
    assert code == EXIT_INPUT
    assert out == ""
    assert "input error" in err


def test_size_cap_exit_code(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("OPKIT_SIZE_CAP", "10")
    path = tmp_path / "end.def"
    path.write_text(json.dumps({
        "kind": "operad",
        "schema_version": 1,
        "construction": {"name": "end", "params": {"carriers": {"*": [0, 1]}, "arity_bound": 2}},
    }))
    code, _, err = run(capsys, "check", str(path))
    assert code == EXIT_RESOURCE
    assert "SizeCapExceeded" in err


@pytest.mark.parametrize("path", ["com.def", "mod-ass.def", "z2-monoid.def", "z2-com-algebra.def", "square.def"])
def test_bundled_fixtures_check(capsys, data_dir, path):
    code, _, _ = run(capsys, "check", fixture(data_dir, path))
    assert code == EXIT_PASS


def test_tree_count_and_orbits(capsys):
    code, out, _ = run(capsys, "trees", "--profile", "2,2->3", "--count")
    assert code == EXIT_PASS
    assert "count: 24" in out
    assert "orbits: 12" in out


def test_tree_listing(capsys):
    code, out, _ = run(capsys, "trees", "--profile", "2->2", "--list")
    assert code == EXIT_PASS
    assert "count: 2" in out
    assert "  v1(1,2)" in out and "  v1(2,1)" in out


def test_pairs_profile(capsys):
    code, out, _ = run(capsys, "trees", "--pairs-profile", "2,a,a->a")
    assert code == EXIT_PASS
    assert "count: 2" in out


def test_bad_profile(capsys):
    code, _, _ = run(capsys, "trees", "--profile", "2,2")
    assert code == EXIT_INPUT


def test_free_com(capsys, data_dir):
    code, out, _ = run(
        capsys, "free", "--operad", fixture(data_dir, "com.def"), "--generators", "x", "--max-degree", "3",
        "--format", "json",
    )
    assert code == EXIT_PASS
    assert [row["size"] for row in json.loads(out)["tables"]["degrees"]] == [1, 1, 1, 1]


def test_env_ass(capsys, data_dir):
    code, out, _ = run(
        capsys, "env", "--operad", fixture(data_dir, "ass.def"), "--generators", "x,y", "--max-degree", "2",
        "--format", "json",
    )
    assert code == EXIT_PASS
    report = json.loads(out)
    assert [row["size"] for row in report["tables"]["degrees"]] == [1, 4, 12]
    assert len(report["checks"]) == 3


def test_env_needs_room_for_the_hole(capsys, data_dir):
    code, _, _ = run(capsys, "env", "--operad", fixture(data_dir, "ass.def"), "--generators", "x", "--max-degree", "3")
    assert code == EXIT_INPUT


def test_diag_check_square(capsys, data_dir):
    code, out, _ = run(capsys, "diag-check", "--bisimplicial", fixture(data_dir, "square.def"), "--max-dim", "2")
    assert code == EXIT_PASS
    assert "[nondegenerate]" in out


def test_diag_check_beyond_the_caps(capsys, data_dir):
    code, _, err = run(capsys, "diag-check", "--bisimplicial", fixture(data_dir, "square.def"), "--max-dim", "3")
    assert code == EXIT_RESOURCE
    assert "TruncationInsufficient" in err


def test_bar(capsys, data_dir):
    code, out, _ = run(capsys, "bar", fixture(data_dir, "z2-com-algebra.def"), "--depth", "1", "--max-degree", "2")
    assert code == EXIT_PASS
    assert "[levels]" in out


def test_reports_are_byte_stable(capsys, data_dir):
    argv = ["env", "--operad", fixture(data_dir, "ass.def"), "--generators", "x,y", "--max-degree", "2", "--format", "json"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert "timing" not in json.loads(first)


def test_timing_is_opt_in(capsys, data_dir):
    _, out, _ = run(capsys, "check", fixture(data_dir, "z2-monoid.def"), "--format", "json", "--timing")
    assert "total" in json.loads(out)["timing"]


def test_empty_tree_profile(capsys):
    code, out, _ = run(capsys, "trees", "--profile", "2,2->4")
    assert code == EXIT_PASS
    assert "count: 0" in out


def test_env_ass_to_degree_four(capsys, tmp_path):
    path = tmp_path / "ass5.def"
    path.write_text(json.dumps({
        "kind": "operad", "schema_version": 1, "construction": {"name": "ass", "params": {"bound": 5}},
    }))
    code, out, _ = run(capsys, "env", "--operad", str(path), "--generators", "x", "--max-degree", "4", "--format", "json")
    assert code == EXIT_PASS
    report = json.loads(out)
    assert [row["size"] for row in report["tables"]["degrees"]] == [1, 2, 3, 4, 5]
    assert all(check["status"] == "PASS" for check in report["checks"])


def test_diag_check_square_counts(capsys, data_dir):
    code, out, _ = run(
        capsys, "diag-check", "--bisimplicial", fixture(data_dir, "square.def"), "--max-dim", "2", "--format", "json"
    )
    assert code == EXIT_PASS
    rows = json.loads(out)["tables"]["nondegenerate"]
    assert [row["left"] for row in rows] == [4, 5, 2]
    assert [row["right"] for row in rows] == [4, 5, 2]


def test_incomplete_table_fails_the_check(capsys, data_dir, tmp_path):
    with open(fixture(data_dir, "z2-operad.def")) as f:
        payload = json.load(f)
    payload["composition"] = payload["composition"][:1]
    path = tmp_path / "incomplete.def"
    path.write_text(json.dumps(payload))
    code, out, _ = run(capsys, "check", str(path), "--format", "json")
    assert code == EXIT_FAIL
    laws = {issue["law"] for check in json.loads(out)["checks"] for issue in check["issues"]}
    assert "composition_table" in laws
