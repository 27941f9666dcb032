import json

import pytest

from hrpn import fixture_path
from hrpn.cli import main

F = {n: str(fixture_path(n)) for n in
     ("tasks_steps", "single_subst", "nested", "gluing_net", "gluing_rules", "self_disabling", "producer_consumer")}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate(capsys):
    assert run(capsys, "validate", F["tasks_steps"])[:2] == (0, "ok\n")
    code, out, _ = run(capsys, "validate", F["tasks_steps"], "--format", "json")
    assert json.loads(out) == {"ok": True, "diagnostics": []}


def test_validate_rejects_bad_hierarchy(capsys, tmp_path):
    doc = json.loads(open(F["single_subst"], encoding="utf-8").read())
    doc["subst"]["st1"]["interface"] = {"p0": "p0", "p1": "ghost"}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 1 and "ghost" in out


def test_flatten_writes_and_is_idempotent(capsys, tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    code, out, _ = run(capsys, "flatten", F["tasks_steps"], "--out", str(first))
    assert code == 0 and out == "8 places, 8 transitions, 7 rules\n"
    assert run(capsys, "flatten", str(first), "--out", str(second))[0] == 0
    assert first.read_bytes() == second.read_bytes()
    doc = json.loads(first.read_text())
    assert set(doc) == {"hierarchical", "flat"}
    assert run(capsys, "validate", str(first), "--verify-cache")[0] == 0


def test_flatten_plain_net_is_idempotent(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "flatten", F["producer_consumer"], "--out", str(a))
    run(capsys, "flatten", str(a), "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_stale_cache_detected(capsys, tmp_path):
    path = tmp_path / "p.json"
    run(capsys, "flatten", F["single_subst"], "--out", str(path))
    doc = json.loads(path.read_text())
    doc["flat"]["net"]["places"].append({"id": "extra", "label": "p0"})
    path.write_text(json.dumps(doc))
    assert run(capsys, "simulate", str(path), "--steps", "1", "--seed", "0", "--verify-cache")[0] == 2


def test_match_counts(capsys):
    code, out, _ = run(capsys, "match", F["tasks_steps"], "--rule", "counter", "--format", "json")
    assert code == 0 and json.loads(out)["count"] == 4
    assert run(capsys, "match", F["tasks_steps"], "--rule", "task2/r4", "--format", "json")[1].count('"index"') == 0


def test_apply(capsys):
    code, out, _ = run(capsys, "apply", F["tasks_steps"], "--rule", "counter", "--index", "2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] and len(doc["net"]["places"]) == 9


def test_apply_gluing_failure(capsys):
    code, out, _ = run(capsys, "apply", F["gluing_net"], "--rule-file", F["gluing_rules"], "--rule", "drop")
    assert code == 1 and "dangling" in out


def test_independent(capsys):
    assert run(capsys, "independent", F["tasks_steps"], "counter@0", "counter@1")[0] == 0
    assert run(capsys, "independent", F["tasks_steps"], "counter@0", "task2/r1@0")[0] == 1


def test_isomorphic(capsys):
    assert run(capsys, "isomorphic", F["tasks_steps"], F["tasks_steps"])[0] == 0
    assert run(capsys, "isomorphic", F["tasks_steps"], F["nested"])[0] == 1


def test_simulate_deterministic(capsys):
    args = ("simulate", F["tasks_steps"], "--steps", "25", "--seed", "3", "--format", "json")
    a, b = run(capsys, *args)[1], run(capsys, *args)[1]
    assert a == b
    doc = json.loads(a)
    assert doc["seed"] == 3 and len(doc["trace"]) <= 25


def test_simulate_self_disabling(capsys):
    code, out, _ = run(capsys, "simulate", F["self_disabling"], "--steps", "9", "--seed", "0", "--format", "json")
    assert code == 0 and len(json.loads(out)["trace"]) == 2


@pytest.mark.parametrize("text", ["{", "[1, 2]", '{"places": 3}'])
def test_input_errors_exit_2(capsys, tmp_path, text):
    path = tmp_path / "x.json"
    path.write_text(text)
    code, _, err = run(capsys, "validate", str(path))
    assert code == 2 and "parse error" in err


def test_unknown_rule_is_input_error(capsys):
    assert run(capsys, "match", F["tasks_steps"], "--rule", "nope")[0] == 2


def test_bad_arguments_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["simulate", F["tasks_steps"], "--steps", "-1", "--seed", "0"])
    assert e.value.code == 2
