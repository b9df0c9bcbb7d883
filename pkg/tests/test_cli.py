import json

import pytest

from tightcycles import cli
from tightcycles.hypercore import read_h3


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_and_oracle_roundtrip(tmp_path, capsys):
    out = tmp_path / "k10.h3"
    code, stdout, _ = run(
        capsys, "gen", "--family", "complete", "--n", "10", "-o", str(out)
    )
    assert code == 0
    H = read_h3(str(out))
    assert H.n == 10 and H.m == 120
    code, stdout, _ = run(capsys, "oracle", "hamilton", str(out))
    assert code == 0
    payload = json.loads(stdout)
    assert payload["result"]["hamiltonian"] is True


def test_oracle_extract_reverifies(tmp_path, capsys):
    out = tmp_path / "c12.h3"
    run(capsys, "gen", "--family", "tight_cycle", "--n", "12", "-o", str(out))
    code, stdout, _ = run(capsys, "oracle", "hamilton", "--extract", str(out))
    assert code == 0
    cyc = json.loads(stdout)["result"]["cycle"]
    assert sorted(cyc) == list(range(12))


def test_hamilton_find_absent_is_exit_1(tmp_path, capsys):
    out = tmp_path / "e1.h3"
    run(capsys, "gen", "--family", "example1", "--n", "16", "--seed", "3",
        "-o", str(out))
    code, stdout, _ = run(
        capsys, "hamilton", "find", "--seed", "1", "--retries", "2", str(out)
    )
    assert code == 1
    payload = json.loads(stdout)
    assert payload["result"]["cycle"] is None
    assert payload["result"]["trace"]["attempts"]


def test_hamilton_find_success(tmp_path, capsys):
    out = tmp_path / "k30.h3"
    run(capsys, "gen", "--family", "complete", "--n", "30", "-o", str(out))
    code, stdout, _ = run(capsys, "hamilton", "find", "--seed", "4", str(out))
    assert code == 0
    cyc = json.loads(stdout)["result"]["cycle"]
    assert sorted(cyc) == list(range(30))


def test_density_budget_error_is_exit_3(tmp_path, capsys):
    out = tmp_path / "k25.h3"
    run(capsys, "gen", "--family", "complete", "--n", "25", "-o", str(out))
    code, stdout, err = run(
        capsys, "density", "--notion", "ev", "--d", "0.25", "--mode", "exact",
        str(out)
    )
    assert code == 3
    diag = json.loads(err)
    assert diag["error"] == "BudgetError"


def test_density_exact_json(tmp_path, capsys):
    out = tmp_path / "k4.h3"
    run(capsys, "gen", "--family", "complete", "--n", "4", "-o", str(out))
    code, stdout, _ = run(
        capsys, "density", "--notion", "ev", "--d", "1", "--mode", "exact",
        str(out)
    )
    assert code == 0
    rep = json.loads(stdout)["result"]["report"]
    assert rep["raw"] == -24.0 and rep["exact"] is True


def test_density_fraction_input(tmp_path, capsys):
    out = tmp_path / "r.h3"
    run(capsys, "gen", "--family", "random", "--n", "8", "--p", "0.5",
        "--seed", "2", "-o", str(out))
    code, stdout, _ = run(
        capsys, "density", "--notion", "ev", "--d", "1/3", "--mode", "exact",
        str(out)
    )
    assert code == 0
    rep = json.loads(stdout)["result"]["report"]
    assert rep["raw_den"] % 3 == 0 or rep["raw_num"] == 0


def test_motifs_count_and_find(tmp_path, capsys):
    out = tmp_path / "k5.h3"
    run(capsys, "gen", "--family", "complete", "--n", "5", "-o", str(out))
    code, stdout, _ = run(capsys, "motifs", "--count", "cherries", str(out))
    assert code == 0
    assert json.loads(stdout)["result"]["report"]["count"] == 120
    code, stdout, _ = run(capsys, "motifs", "--count", "k4minus", str(out))
    assert json.loads(stdout)["result"]["report"]["count"] == 20
    out9 = tmp_path / "k9.h3"
    run(capsys, "gen", "--family", "complete", "--n", "9", "-o", str(out9))
    code, stdout, _ = run(
        capsys, "motifs", "--find", "k333", "--seed", "1", str(out9)
    )
    assert code == 0
    assert json.loads(stdout)["result"]["gadget"] is not None


def test_motifs_sampled_k4minus(tmp_path, capsys):
    out = tmp_path / "k8.h3"
    run(capsys, "gen", "--family", "complete", "--n", "8", "-o", str(out))
    code, stdout, _ = run(
        capsys, "motifs", "--count", "k4minus", "--sampled",
        "--samples", "20000", "--seed", "1", str(out)
    )
    assert code == 0
    rep = json.loads(stdout)["result"]["report"]
    assert not rep["exact"]
    # complete host: every sorted 4-tuple qualifies: density = C(8,4)*... / 8^4
    assert abs(rep["normalized"] - 8 * 7 * 6 * 5 / 6 / 8**4) < 0.02


def test_motifs_absence_is_exit_1(tmp_path, capsys):
    out = tmp_path / "empty.h3"
    run(capsys, "gen", "--family", "random", "--n", "10", "--p", "0",
        "--seed", "0", "-o", str(out))
    code, stdout, _ = run(capsys, "motifs", "--find", "c8", str(out))
    assert code == 1


def test_hamilton_connect_cli(tmp_path, capsys):
    out = tmp_path / "k12.h3"
    run(capsys, "gen", "--family", "complete", "--n", "12", "-o", str(out))
    code, stdout, _ = run(
        capsys, "hamilton", "connect", "--from", "0,1", "--to", "2,3",
        "--seed", "0", str(out)
    )
    assert code == 0
    path = json.loads(stdout)["result"]["path"]
    assert path[:2] == [0, 1] and path[-2:] == [2, 3]


def test_hamilton_cover_cli(tmp_path, capsys):
    out = tmp_path / "k14.h3"
    run(capsys, "gen", "--family", "complete", "--n", "14", "-o", str(out))
    code, stdout, _ = run(
        capsys, "hamilton", "cover", "--seed", "0", str(out)
    )
    assert code == 0
    res = json.loads(stdout)["result"]
    assert res["paths"] and not res["shortfall"]


def test_oracle_count_paths_cli(tmp_path, capsys):
    out = tmp_path / "k6.h3"
    run(capsys, "gen", "--family", "complete", "--n", "6", "-o", str(out))
    code, stdout, _ = run(
        capsys, "oracle", "count-paths", "--from", "0,1", "--to", "2,3",
        "--inner", "1", str(out)
    )
    assert code == 0
    assert json.loads(stdout)["result"]["count"] == 2


def test_strict_requires_seed(tmp_path, capsys):
    out = tmp_path / "x.h3"
    with pytest.raises(SystemExit) as exc:
        cli.main(["--strict", "gen", "--family", "complete", "--n", "5",
                  "-o", str(out)])
    assert exc.value.code == 2


def test_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["density", "--notion", "zzz", "--d", "1", "--mode", "exact", "f"])
    assert exc.value.code == 2


def test_gen_deterministic_bytes(tmp_path, capsys):
    a, b = tmp_path / "a.h3", tmp_path / "b.h3"
    run(capsys, "gen", "--family", "example1", "--n", "20", "--seed", "9",
        "-o", str(a))
    run(capsys, "gen", "--family", "example1", "--n", "20", "--seed", "9",
        "-o", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_gen_blowup_needs_host(tmp_path, capsys):
    out = tmp_path / "b.h3"
    code, _, err = run(capsys, "gen", "--family", "blowup", "-o", str(out))
    assert code == 3
    host = tmp_path / "c5.h3"
    run(capsys, "gen", "--family", "tight_cycle", "--n", "5", "-o", str(host))
    code, stdout, _ = run(
        capsys, "gen", "--family", "blowup", "--host", str(host), "--t", "2",
        "-o", str(out)
    )
    assert code == 0
    assert read_h3(str(out)).n == 10


def test_text_format(tmp_path, capsys):
    out = tmp_path / "k6.h3"
    run(capsys, "gen", "--family", "complete", "--n", "6", "-o", str(out))
    code, stdout, _ = run(
        capsys, "--format", "text", "oracle", "hamilton", str(out)
    )
    assert code == 0
    assert "hamiltonian: True" in stdout


def test_threads_validation(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--threads", "0", "bench"])
    assert exc.value.code == 2


def test_threads_env_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("TIGHTCYCLES_THREADS", "0")
    out = tmp_path / "k5.h3"
    with pytest.raises(SystemExit) as exc:
        cli.main(["gen", "--family", "complete", "--n", "5", "-o", str(out)])
    assert exc.value.code == 2
    monkeypatch.setenv("TIGHTCYCLES_THREADS", "2")
    code = cli.main(["gen", "--family", "complete", "--n", "5", "-o", str(out)])
    capsys.readouterr()
    assert code == 0
