import json

import pytest

from acblocks.cli import EXIT_INVALID, EXIT_PARSE, int_list, main
from acblocks.experiments import read_csv, summary_path

FIG_A = "initial:\n4 1 2\n3 5\ngoal:\n4 5 3 1 2\n"


@pytest.fixture
def task(tmp_path):
    path = tmp_path / "task.txt"
    path.write_text(FIG_A)
    return path


def test_int_list():
    assert int_list("1-4") == [1, 2, 3, 4]
    assert int_list("3,5,7") == [3, 5, 7]
    assert int_list("1e4,1e5") == [10_000, 100_000]
    assert int_list("1-2,9") == [1, 2, 9]


def test_plan_symbolic(task, tmp_path, capsys):
    out = tmp_path / "plan.txt"
    assert main(["plan", str(task), "--out", str(out)]) == 0
    assert out.read_text() == "TABLE 4\nTABLE 3\nPUT 3 ON 1\nPUT 5 ON 3\nPUT 4 ON 5\n"
    report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert report["moves"] == 5 and report["misplaced"] == 3 and report["valid"]


def test_plan_naive_stdout(task, capsys):
    assert main(["plan", str(task), "--algo", "naive"]) == 0
    # (5 - 2 init stacks) + (5 - 1 goal stack)
    assert capsys.readouterr().out.count("\n") == 7


def test_plan_bad_task(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("initial:\n1 2\ngoal:\n1\n")
    assert main(["plan", str(bad)]) == EXIT_PARSE
    assert main(["plan", str(tmp_path / "missing.txt")]) == EXIT_PARSE


def test_plan_neural(task, tmp_path, capsys):
    out, trace = tmp_path / "plan.txt", tmp_path / "trace.jsonl"
    code = main(["plan", str(task), "--mode", "neural", "--n", "1e5", "--seed", "0",
                 "--out", str(out), "--trace", str(trace)])
    report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert code == 0 and report["valid"] and report["readouts_ok"]
    assert out.read_text().startswith("TABLE 4\n")
    events = [json.loads(line)["event"] for line in trace.read_text().splitlines()]
    assert "parse" in events


def test_validate(task, tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    main(["plan", str(task), "--out", str(plan)])
    assert main(["validate", str(task), str(plan)]) == 0
    truncated = tmp_path / "short.txt"
    truncated.write_text("".join(plan.read_text().splitlines(True)[:-1]))
    assert main(["validate", str(task), str(truncated)]) == EXIT_INVALID
    assert "move 4" in capsys.readouterr().out
    junk = tmp_path / "junk.txt"
    junk.write_text("JUMP 3\n")
    assert main(["validate", str(task), str(junk)]) == EXIT_PARSE


def test_validate_empty_plan_on_identity(tmp_path):
    same = tmp_path / "same.txt"
    same.write_text("initial:\n2 1\ngoal:\n2 1\n")
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    assert main(["validate", str(same), str(empty)]) == 0


def test_gen(tmp_path, capsys):
    out = tmp_path / "t.txt"
    assert main(["gen", "--s", "10", "--seed", "4", "--out", str(out)]) == 0
    assert main(["gen", "--s", "10", "--seed", "4"]) == 0
    assert capsys.readouterr().out == out.read_text()
    assert main(["plan", str(out)]) == 0
    assert main(["gen", "--s", "40", "--max-stacks", "2", "--max-height", "3"]) == EXIT_PARSE


def test_chain_exp(tmp_path, capsys):
    out = tmp_path / "chain.csv"
    code = main(["chain-exp", "--n", "2000", "--k", "20", "--lengths", "1,2",
                 "--trials", "2", "--out", str(out)])
    assert code == 0
    rows = read_csv(out)
    assert [(r.chain_len, r.trial) for r in rows] == [(1, 0), (1, 1), (2, 0), (2, 1)]
    assert all(r.strong == 0 for r in rows)
    assert summary_path(out).exists()
    assert "mean_correct_prefix" in capsys.readouterr().out


def test_strong_exp(tmp_path):
    out = tmp_path / "strong.csv"
    main(["strong-exp", "--n", "2000", "--k", "20", "--lengths", "2", "--trials", "1",
          "--out", str(out)])
    rows = read_csv(out)
    assert len(rows) == 1 and 0 <= rows[0].strong <= 2


def test_maxchain_exp(tmp_path):
    out = tmp_path / "max.csv"
    main(["maxchain-exp", "--n", "2000", "--k", "10,20", "--trials", "1", "--max-len", "2",
          "--out", str(out)])
    assert [r.k for r in read_csv(out)] == [10, 20]
