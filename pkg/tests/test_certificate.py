import json
import os
from pathlib import Path

import pytest

from cicycert.certificate import (
    SCHEMA_VERSION,
    atomic_write,
    build_certificate,
    default_mode,
    dumps,
    load,
    strip_timings,
    write_json,
)
from cicycert.cli import main
from cicycert.witnesses import WitnessPackage

GOLDEN = Path(__file__).resolve().parents[1] / "docs" / "golden" / "certificate_5_d1_paper_s0.json"


def test_golden_regenerates(tmp_path):
    out = tmp_path / "g.json"
    assert main(["certify", "--type", "5", "--degree", "1", "--mode", "paper", "--seed", "0", "--out", str(out)]) == 0
    assert main(["deform", str(out), "--epsilon", "1e-3"]) == 0
    assert strip_timings(load(out)) == strip_timings(load(GOLDEN))


def test_golden_is_canonical():
    text = GOLDEN.read_text()
    assert text == dumps(json.loads(text))
    doc = load(GOLDEN)
    assert doc["schema_version"] == SCHEMA_VERSION and doc["passed"]
    assert WitnessPackage.from_json(doc["witness"]).is_incident()


def test_byte_determinism():
    a = strip_timings(build_certificate("3,3", 1, "random", seed=2))
    b = strip_timings(build_certificate("3,3", 1, "random", seed=2))
    assert dumps(a) == dumps(b)


def test_passed_is_and_of_checks():
    doc = build_certificate("5", 1, "random", seed=1)
    assert doc["passed"] == all(doc["checks"].values()) and doc["passed"]
    assert doc["normal_bundle"]["normal_splitting"] == [-1, -1]
    assert doc["consistency"]["agree"]
    assert set(doc["timings"]) >= {"witness", "rank", "splitting"}


def test_degenerate_paper_witness_fails_honestly():
    doc = build_certificate("3,3", 1, "paper", seed=7)
    assert not doc["passed"]
    assert doc["kernel_profile"]["kernel_dims"] == [12, 8, 5]
    assert doc["diagnostics"]["surface_containment"]["contained"]
    assert not doc["checks"]["kernel_profile"]


def test_rational_crosscheck_only_for_small_jacobians():
    small = build_certificate("5", 1, "random", seed=0)
    assert "rational_crosscheck" in small["rank"]
    big = build_certificate("5", 1, "random", seed=0, rational_check=False)
    assert "rational_crosscheck" not in big["rank"]


def test_default_mode():
    assert default_mode((5,), 3) == "paper"
    assert default_mode((5,), 12) == "random"
    assert default_mode((3, 3), 12) == "paper"


def test_atomic_write_replaces_and_leaves_no_temp(tmp_path):
    p = tmp_path / "sub" / "x.json"
    write_json(p, {"a": 1})
    write_json(p, {"a": 2})
    assert json.loads(p.read_text()) == {"a": 2}
    assert sorted(os.listdir(p.parent)) == ["x.json"]


def test_atomic_write_keeps_old_file_on_failure(tmp_path, monkeypatch):
    p = tmp_path / "x.json"
    atomic_write(p, "old\n")

    def boom(*a, **k):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        atomic_write(p, "new\n")
    assert p.read_text() == "old\n"
    assert os.listdir(tmp_path) == ["x.json"]


def test_load_rejects_other_schema(tmp_path):
    p = tmp_path / "x.json"
    p.write_text('{"schema_version": "0"}')
    with pytest.raises(ValueError):
        load(p)
