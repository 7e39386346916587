import json

import pytest

from cicycert.cli import EXIT_FAIL, EXIT_HYPOTHESIS, EXIT_OK, EXIT_USAGE, OUT_ENV, main


def _read(p):
    return json.loads(p.read_text())


def test_certify_random_quintic(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["certify", "--type", "5", "--degree", "1", "--mode", "random", "--out", str(out)]) == EXIT_OK
    doc = _read(out)
    assert doc["passed"] and doc["normal_bundle"]["normal_splitting"] == [-1, -1]
    assert "N={-1,-1}" in capsys.readouterr().out


def test_certify_degenerate_paper_witness_exits_one(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["certify", "--type", "3,3", "--degree", "1", "--mode", "paper", "--seed", "7", "--out", str(out)]) == EXIT_FAIL
    assert _read(out)["kernel_profile"]["kernel_dims"] == [12, 8, 5]
    assert capsys.readouterr().out.startswith("FAIL")


def test_unavailable_paper_witness(tmp_path):
    out = tmp_path / "c.json"
    assert main(["certify", "--type", "5", "--degree", "12", "--mode", "paper", "--out", str(out)]) == EXIT_HYPOTHESIS
    doc = _read(out)
    assert doc["error"]["class"] == "WitnessUnavailable" and doc["error"]["exit_code"] == EXIT_HYPOTHESIS


def test_usage_errors(tmp_path, capsys):
    assert main(["certify", "--type", "4,4", "--degree", "1"]) == EXIT_USAGE
    assert main(["certify", "--type", "5", "--degree", "0"]) == EXIT_USAGE
    assert main(["nonsense"]) == EXIT_USAGE
    assert main(["certify", "--type", "5", "--degree", "1", "--out", "a", "--out-dir", "b"]) == EXIT_USAGE
    assert main(["lemmas"]) == EXIT_USAGE
    assert main(["deform", str(tmp_path / "missing.json")]) == EXIT_USAGE


def test_env_output_directory(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "reports"))
    assert main(["profile", "--type", "5", "--degree", "1", "--seed", "3"]) == EXIT_OK
    files = list((tmp_path / "reports").iterdir())
    assert [f.name for f in files] == ["profile_5_d1_paper_s3.json"]
    assert _read(files[0])["kernel_dims"] == [10, 4]


def test_out_dir_overrides_env(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    assert main(["profile", "--type", "5", "--degree", "1", "--out-dir", str(tmp_path / "flag")]) == EXIT_OK
    assert (tmp_path / "flag" / "profile_5_d1_paper_s0.json").exists()
    assert not (tmp_path / "env").exists()


def test_jobs_grid_matches_serial(tmp_path):
    argv = ["certify", "--type", "5", "3,3", "--degree", "1", "--mode", "random", "--seed", "0", "1"]
    assert main(argv + ["--out-dir", str(tmp_path / "a")]) == EXIT_OK
    assert main(argv + ["--out-dir", str(tmp_path / "b"), "--jobs", "2"]) == EXIT_OK
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(names) == 4
    for n in names:
        a, b = _read(tmp_path / "a" / n), _read(tmp_path / "b" / n)
        a.pop("timings"), b.pop("timings")
        assert a == b


def test_worst_exit_code_wins(tmp_path):
    argv = ["certify", "--type", "5", "--degree", "1", "12", "--mode", "paper", "--out-dir", str(tmp_path)]
    assert main(argv) == EXIT_HYPOTHESIS
    assert len(list(tmp_path.iterdir())) == 2


def test_splitting_command(tmp_path):
    out = tmp_path / "s.json"
    assert main(["splitting", "--type", "3,3", "--degree", "1", "--mode", "random", "--out", str(out)]) == EXIT_OK
    doc = _read(out)
    assert [lv["splitting"] for lv in doc["levels"]][-1] == [2, -1, -1]
    assert all(a >= 0 for a in doc["levels"][1]["splitting"])


def test_lemmas_trials(tmp_path):
    out = tmp_path / "l.json"
    assert main(["lemmas", "--lemma", "A2", "--trials", "100", "--degree", "2", "--out", str(out)]) == EXIT_OK
    doc = _read(out)
    assert doc["passes"] == 100 and doc["conclusion_failures"] == 0


def test_lemmas_injected_singular_is_hypothesis_tally(tmp_path):
    out = tmp_path / "l.json"
    assert main(["lemmas", "--lemma", "A6", "--trials", "20", "--inject-singular", "--out", str(out)]) == EXIT_OK
    doc = _read(out)
    assert doc["hypothesis_failures"] == 20 and doc["conclusion_failures"] == 0


def test_lemmas_on_322_witness_reports_hypothesis(tmp_path):
    out = tmp_path / "l.json"
    assert main(["lemmas", "--witness", "3,2,2", "--out", str(out)]) == EXIT_HYPOTHESIS
    assert not _read(out)["passed"]


def test_deform_updates_certificate(tmp_path):
    cert = tmp_path / "c.json"
    assert main(["certify", "--type", "5", "--degree", "1", "--mode", "paper", "--out", str(cert)]) == EXIT_OK
    out = tmp_path / "d.json"
    assert main(["deform", str(cert), "--epsilon", "0", "--out", str(out)]) == EXIT_OK
    doc = _read(out)
    assert doc["continuation"]["residual"] == "0" and doc["checks"]["continuation"]
    assert "continuation" not in _read(cert)
    assert main(["deform", str(cert), "--precision", "32"]) == EXIT_USAGE


def test_deform_refuses_uncertified(tmp_path):
    cert = tmp_path / "c.json"
    main(["certify", "--type", "2,2,2,2", "--degree", "1", "--mode", "paper", "--out", str(cert)])
    doc = _read(cert)
    if doc["rank"]["levels"][-1]["passed"]:
        pytest.skip("this witness happens to have a certified top level")
    assert main(["deform", str(cert)]) == EXIT_HYPOTHESIS
