import json

import pytest

from distinguisher.deps import SEED_ENV, default_seed, resolve_seed
from distinguisher.main import run


def _json_lines(out):
    return [json.loads(line) for line in out.strip().splitlines()]


def test_lemma_good_sum(capsys):
    assert run(["lemma", "--name", "good-sum", "--w", "3", "--z", "1", "--k", "2"]) == 0
    assert "lhs=1/2 bound=1/2 holds" in capsys.readouterr().out


def test_json_lines_round_trip(capsys):
    assert run(["lemma", "--name", "good-sum-sweep", "--w-min", "3", "--w-max", "4", "--json"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert len(lines) == 2
    for line in lines:
        assert json.dumps(json.loads(line), separators=(",", ":")) == line
    assert [r["violations"] for r in _json_lines(out)] == [0, 0]


def test_usage_errors_exit_2(capsys):
    assert run(["lemma", "--name", "good-sum", "--bogus"]) == 2
    assert run(["no-such-command"]) == 2
    assert run(["lemma", "--name", "good-sum", "--w", "3"]) == 2
    assert "needs --z, --k" in capsys.readouterr().err


def test_help_exits_0(capsys):
    assert run(["--help"]) == 0
    assert "verify-exhaustive" in capsys.readouterr().out


def test_verify_exhaustive_builtin_corpus(capsys):
    assert run(["verify-exhaustive", "--scheme", "oddmul2w", "--w", "8"]) == 0
    out = capsys.readouterr().out
    assert "84/84 assignments within bound" in out


def test_verify_exhaustive_assignment_file(tmp_path, capsys):
    path = tmp_path / "v.txt"
    path.write_text("# three keys\n1 1\n2 1\n3 -1\n")
    assert run(["verify-exhaustive", "--scheme", "modprime", "--p", "17", "--assignment", str(path),
                "--monoid", "wrapint64", "--json"]) == 0
    (report,) = _json_lines(capsys.readouterr().out)
    assert report["scheme"] == "modprime" and report["n"] == 3
    assert report["label"] == "v.txt"


def test_verify_exhaustive_needs_size(capsys):
    assert run(["verify-exhaustive", "--scheme", "oddmul2w"]) == 2
    assert "--w is required" in capsys.readouterr().err


def test_fully_random_baseline(capsys):
    assert run(["verify-exhaustive", "--scheme", "fullyrandom", "--u", "4", "--reject-empty", "--json"]) == 0
    (report,) = _json_lines(capsys.readouterr().out)
    assert report["probability"] == "8/15"


def test_verify_mc_flags_mulshift(tmp_path, capsys):
    path = tmp_path / "pairs.txt"
    path.write_text("1 1\n2 1\n129 1\n130 1\n")
    assert run(["verify-mc", "--scheme", "mulshift", "--w", "8", "--assignment", str(path),
                "--trials", "1000", "--seed", "3"]) == 1
    assert "0/1 assignments within bound" in capsys.readouterr().out


def test_verify_mc_seed_from_environment(monkeypatch, tmp_path, capsys):
    path = tmp_path / "v.txt"
    path.write_text("0 1\n")
    monkeypatch.setenv(SEED_ENV, "17")
    assert run(["verify-mc", "--scheme", "oddmul2w", "--w", "16", "--assignment", str(path),
                "--trials", "200", "--json"]) == 0
    (report,) = _json_lines(capsys.readouterr().out)
    assert report["seed"] == 17
    assert report["probability"] == "1/1"


def test_default_seed(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)
    assert default_seed() == 0
    monkeypatch.setenv(SEED_ENV, "42")
    assert resolve_seed(None) == 42
    assert resolve_seed(7) == 7
    monkeypatch.setenv(SEED_ENV, "not-a-number")
    assert default_seed() == 0


def test_counterexamples_command(capsys):
    assert run(["counterexamples", "--tabulation-trials", "100", "--prop2-n", "2", "--json"]) == 0
    names = [r["name"] for r in _json_lines(capsys.readouterr().out)[0]["results"]]
    assert names == ["parity", "mulshift", "tabulation", "prop2-n2", "fixed-threshold"]


def test_ams_command(capsys):
    assert run(["ams", "--keys", "0,1", "--values", "1,-1", "--json"]) == 0
    (report,) = _json_lines(capsys.readouterr().out)
    assert report["e_x2"] == "1/2"
    assert report["fourth_moment_ok"] and report["nonzero_ok"]


def _write_matrix(path, rows):
    path.write_text("\n".join([str(len(rows))] + [" ".join(map(str, r)) for r in rows]) + "\n")
    return str(path)


def test_freivald_command(tmp_path, capsys):
    a = _write_matrix(tmp_path / "a.txt", [[1, 2], [3, 4]])
    b = _write_matrix(tmp_path / "b.txt", [[0, 1], [1, 0]])
    good = _write_matrix(tmp_path / "c.txt", [[2, 1], [4, 3]])
    bad = _write_matrix(tmp_path / "bad.txt", [[2, 1], [4, 4]])
    assert run(["freivald", "--a", a, "--b", b, "--c", good]) == 0
    assert "accept" in capsys.readouterr().out
    assert run(["freivald", "--a", a, "--b", b, "--c", bad, "--json"]) == 0
    (verdict,) = _json_lines(capsys.readouterr().out)
    assert verdict["verdict"] == "reject"


def test_freivald_missing_file(tmp_path, capsys):
    a = _write_matrix(tmp_path / "a.txt", [[1]])
    assert run(["freivald", "--a", a, "--b", a, "--c", str(tmp_path / "nope.txt")]) == 2
    assert "Freivald check failed" in capsys.readouterr().err


def test_stream_and_tree_commands(tmp_path, capsys):
    stream = tmp_path / "stream.txt"
    stream.write_text("5 1\n9 1\n5 1\n")
    claim = tmp_path / "claim.txt"
    claim.write_text("9 1\n")
    assert run(["stream-test", "--stream", str(stream), "--claim", str(claim), "--w", "8", "--d", "8"]) == 0
    assert "equal so far" in capsys.readouterr().out
    graph = tmp_path / "g.txt"
    graph.write_text("3 2\n0 1\n1 2\n0\n")
    assert run(["tree-test", "--graph", str(graph), "--json"]) == 0
    (result,) = _json_lines(capsys.readouterr().out)
    assert result["edge_leaving_detected"] is True


def test_smallbias_derives_d_from_epsilon(capsys):
    code = run(["smallbias", "--epsilon", "0.1181", "--draws", "200", "--json"])
    assert code in (0, 1)
    (report,) = _json_lines(capsys.readouterr().out)
    assert report["d"] == 16
    assert report["keys"] == [0, 1, 2]


def test_smallbias_needs_d(capsys):
    assert run(["smallbias"]) == 2


def test_bench_rejects_short_runs(capsys):
    assert run(["bench", "--iterations", "10"]) == 2
    assert "at least" in capsys.readouterr().err


@pytest.mark.slow
def test_bench_command(capsys):
    assert run(["bench", "--iterations", "1000000"]) == 0
    out = capsys.readouterr().out
    assert "7-indep poly mod 2^89-1" in out
    assert "sink:" in out
