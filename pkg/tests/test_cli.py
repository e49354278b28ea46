from __future__ import annotations

import json

import pytest

from artifact.cli import run
from artifact.groups import LIMITS


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _report(text):
    return json.loads(text)


@pytest.fixture(autouse=True)
def _no_env_cache(monkeypatch):
    monkeypatch.delenv("ARTIFACT_CACHE_DIR", raising=False)


def test_subgroups(capsys):
    code, out, _ = _run(capsys, "--no-cache", "subgroups", "S4")
    rep = _report(out)
    assert code == 0 and rep["outputs"]["subgroup_count"] == 30
    assert set(rep) == {"command", "inputs", "inputs_digest", "outputs", "checks"}


def test_fusion_reports_saturation(capsys):
    code, out, _ = _run(capsys, "--no-cache", "fusion", "S4", "--p", "2")
    rep = _report(out)
    assert code == 0 and rep["checks"] == {"saturated": True}
    assert rep["outputs"]["out_aut_P"] == 1


def test_idempotent_checks(capsys):
    code, out, _ = _run(capsys, "--no-cache", "--compact", "idempotent", "S3", "--p", "3")
    assert code == 0 and "\n" not in out.strip()
    rep = _report(out)
    assert all(rep["checks"].values())
    assert [t["coeff"] for t in rep["outputs"]["omega"]] == ["1/2", "1/2"]


def test_essential_and_decompose(capsys):
    code, out, _ = _run(capsys, "--no-cache", "essential", "GL32", "--p", "2")
    assert code == 0 and len(_report(out)["outputs"]["essential"]) == 2
    code, out, _ = _run(capsys, "--no-cache", "decompose", "S4", "--p", "2", "--subgroup", "[0,3,4,7]",
                        "--phi", "[0,4,7,3]")
    assert code == 0 and _report(out)["checks"]["chain_verified"]


def test_stable_with_target(capsys):
    code, out, _ = _run(capsys, "--no-cache", "stable", "S4", "--p", "2", "--target", "[1,0,2,0,0,-1,3]")
    rep = _report(out)
    assert code == 0 and all(rep["checks"].values())


def test_hecke_basis_and_group_hecke(capsys):
    code, out, _ = _run(capsys, "--no-cache", "hecke-basis", "D8")
    assert code == 0 and len(_report(out)["outputs"]["fixed_points"]) == 8
    code, out, _ = _run(capsys, "--no-cache", "group-hecke", "S4", "--p", "2")
    rep = _report(out)
    assert code == 0 and rep["outputs"]["structure_constants"] == [[[1, 0], [0, 1]], [[0, 1], [2, 1]]]


def test_basic_check_exit_codes(capsys):
    assert _run(capsys, "--no-cache", "basic-check", "S3", "--p", "3", "--scale", "2")[0] == 0
    code, _, err = _run(capsys, "--no-cache", "basic-check", "S4", "--p", "2", "--scale", "2")
    assert code == 1 and "basic" in err


@pytest.mark.parametrize("argv", [
    ["fusion", "S4"],
    ["fusion", "NoSuchGroup"],
    ["stable", "S4", "--p", "2", "--target", "[1,2"],
    ["stable", "S4", "--p", "2", "--target", "[1,2]"],
    ["fusion", "S4", "--p", "4"],
    ["fusion", "S4", "--p", "5"],
    ["decompose", "S4", "--p", "2", "--subgroup", "[0,5]"],
    ["group-hecke", "S4", "--p", "2", "--sylow", "{\"a\": 1}"],
    ["verify", "no-such-suite"],
])
def test_input_errors_exit_2(capsys, argv):
    assert _run(capsys, "--no-cache", *argv)[0] == 2


def test_non_latin_table_exit_2(capsys, tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"name": "bad", "table": [[0, 1], [1, 1]]}))
    assert _run(capsys, "--no-cache", "subgroups", str(path))[0] == 2


def test_config_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nonsense": 1}))
    assert _run(capsys, "--config", str(bad), "subgroups", "S3")[0] == 2
    bad.write_text("[]")
    assert _run(capsys, "--config", str(bad), "subgroups", "S3")[0] == 2


def test_resource_guard_exit_3_and_limits_restored(capsys, tmp_path):
    before = (LIMITS.max_group_order, LIMITS.max_product_order)
    cfg = tmp_path / "small.json"
    cfg.write_text(json.dumps({"max_group_order": 10}))
    assert _run(capsys, "--no-cache", "subgroups", "S4")[0] == 0
    code, _, err = _run(capsys, "--no-cache", "--config", str(cfg), "subgroups", "S4")
    assert code == 3 and "resource guard" in err
    assert (LIMITS.max_group_order, LIMITS.max_product_order) == before


def test_output_is_deterministic_and_cache_transparent(capsys, tmp_path):
    argv = ["idempotent", "S4", "--p", "2"]
    plain = _run(capsys, "--no-cache", *argv)[1]
    assert _run(capsys, "--no-cache", *argv)[1] == plain
    cold = _run(capsys, "--cache-dir", str(tmp_path), *argv)[1]
    warm = _run(capsys, "--cache-dir", str(tmp_path), *argv)[1]
    assert plain == cold == warm
    assert list(tmp_path.glob("*.json"))


def test_env_cache_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("ARTIFACT_CACHE_DIR", str(tmp_path))
    assert _run(capsys, "subgroups", "A4")[0] == 0
    assert list(tmp_path.glob("*.json"))


def test_tampered_cache_warns_and_recomputes(capsys, tmp_path, caplog):
    argv = ["group-hecke", "S4", "--p", "2"]
    clean = _run(capsys, "--cache-dir", str(tmp_path), *argv)[1]
    for path in tmp_path.glob("*.json"):
        entry = json.loads(path.read_text())
        entry["value"] = "garbage"
        path.write_text(json.dumps(entry))
    code, out, _ = _run(capsys, "--cache-dir", str(tmp_path), *argv)
    assert code == 0 and out == clean
    assert "corrupt" in caplog.text


def test_verify_cache_detects_consistent_tampering(capsys, tmp_path):
    from artifact.cache import Cache, digest

    argv = ["group-hecke", "S3", "--p", "3"]
    assert _run(capsys, "--cache-dir", str(tmp_path), *argv)[0] == 0
    cache = Cache(tmp_path)
    for path in tmp_path.glob("*.json"):
        entry = json.loads(path.read_text())
        if entry["key"].startswith("group-hecke:"):
            entry["value"] = [[[1, 0], [0, 1]], [[0, 1], [0, 1]]]
            entry["digest"] = digest(entry["value"])
            path.write_text(json.dumps(entry))
    assert cache.enabled
    assert _run(capsys, "--cache-dir", str(tmp_path), "--verify-cache", *argv)[0] == 1


def test_timing_adds_seconds(capsys):
    rep = _report(_run(capsys, "--no-cache", "--timing", "subgroups", "S3")[1])
    assert "seconds" in rep


def test_verify_single_suite(capsys):
    code, out, _ = _run(capsys, "--no-cache", "verify", "s3-idempotent", "--seed", "7")
    lines = [json.loads(line) for line in out.strip().splitlines()]
    assert code == 0
    assert lines[-1] == {"suite": "s3-idempotent", "ok": True, "checks": len(lines) - 1, "seed": 7}
    assert all(line["ok"] for line in lines[:-1])
