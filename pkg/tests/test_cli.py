import json
import subprocess
import sys

import pytest

from deljoin.cli import main
from deljoin.verify import Cache, cmd_verify_all, cmd_verify_pmain


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(autouse=True)
def _no_env_cache(monkeypatch):
    monkeypatch.delenv("DELJOIN_CACHE_DIR", raising=False)


def test_poset_summary(capsys):
    code, out, _ = run(capsys, "poset", "bnk", "--n", "2", "--k", "2")
    assert code == 0
    assert "elements\t5" in out and "f-vector\t5 8 4" in out


def test_poset_json_file_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "poset", "djoin", "--n", "2", "--k", "2", "--json")
    assert code == 0
    path = tmp_path / "p.json"
    path.write_text(out)
    code, out2, _ = run(capsys, "homology", "--file", str(path), "--json")
    assert code == 0
    assert json.loads(out2) == {"ring": "Z", "betti": {"1": 1}, "torsion": {}}


def test_homology_formats(capsys):
    code, out, _ = run(capsys, "homology", "bool", "--n", "3", "--part", "proper")
    assert code == 0 and out.strip() == "H1=Z"
    code, out, _ = run(capsys, "homology", "bnk", "--n", "4", "--k", "2", "--ring", "fp", "--p", "2", "--tsv")
    assert code == 0
    assert out.splitlines()[0] == "degree\tbetti\ttorsion"
    assert "1\t1\t" in out.splitlines()


def test_bnk_table(capsys):
    code, out, _ = run(capsys, "bnk", "--p", "2", "--n", "4", "--k", "2", "--json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["computed"] for r in rows[:3]] == [r["predicted"] for r in rows[:3]] == [0, 1, 1]


def test_delta_commands(capsys):
    code, out, _ = run(capsys, "delta", "build", "--p", "2", "--n", "2", "--qmax", "3")
    assert code == 0 and "H_1\t1" in out and "H_3\t1" in out
    code, out, _ = run(capsys, "delta", "build", "--p", "2", "--n", "2", "--qmax", "2", "--json")
    dump = json.loads(out)
    assert dump["homology"]["betti"]["1"] == 1 and "boundaries" in dump
    code, out, _ = run(capsys, "delta", "shape", "--n", "2", "--t", "2", "--O", "[[1,2]]")
    assert code == 0 and out.strip().endswith("H1=Z")
    code, out, _ = run(capsys, "delta", "verify-dnt", "--nmax", "3", "--json")
    assert code == 0 and json.loads(out)["ok"]
    code, out, _ = run(capsys, "delta", "verify-main", "--p", "3", "--n", "3", "--qmax", "8")
    assert code == 0 and "0 fail" in out


def test_nakaoka_commands(capsys):
    code, out, _ = run(capsys, "nakaoka", "qp", "--p", "2", "--dmax", "3", "--json")
    assert code == 0 and json.loads(out) == [[1], [2], [3], [2, 1]]
    code, out, _ = run(capsys, "nakaoka", "table", "--p", "2", "--dmax", "3", "--rmax", "2", "--tsv")
    assert code == 0
    assert out.splitlines()[0] == "r\td\tU\tU_tilde"
    assert "2\t3\t1\t1" in out.splitlines()


def test_shelling_command(capsys):
    code, out, _ = run(capsys, "shelling", "verify", "--n", "3", "--k", "2", "--t", "2", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["ok"] and not data["violations"]


def test_usage_errors(capsys):
    assert run(capsys, "bnk", "--n", "3")[0] == 2
    assert run(capsys, "homology", "bnk", "--n", "3", "--k", "2", "--ring", "fp")[0] == 2
    assert run(capsys, "nakaoka", "qp", "--p", "4", "--dmax", "3")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "shelling", "verify", "--n", "2", "--k", "2", "--t", "0")[0] == 2


def test_resource_guard_skips(capsys):
    code, _, err = run(capsys, "homology", "bnk", "--n", "5", "--k", "3", "--max-faces", "10")
    assert code == 0 and "skipped" in err
    code, out, _ = run(capsys, "verify", "pmain", "--p", "2", "--k", "2", "--n", "4", "--max-faces", "10", "--json")
    data = json.loads(out)
    assert code == 0 and [c["status"] for c in data["checks"]] == ["skip"]


def test_verify_pmain_and_stability(capsys):
    code, out, _ = run(capsys, "verify", "pmain", "--p", "2", "--k", "2", "--n", "4", "--json")
    data = json.loads(out)
    assert code == 0 and data["ok"] and len(data["checks"]) >= 4
    code, out, _ = run(capsys, "verify", "stability", "--k", "2", "--n", "3", "--tsv")
    assert code == 0 and "\tfail\t" not in out


def test_cache_hits_and_audit(capsys, tmp_path):
    args = ["verify", "pmain", "--p", "3", "--k", "3", "--n", "4", "--json", "--cache-dir", str(tmp_path)]
    code, first, _ = run(capsys, *args)
    entries = Cache(tmp_path).entries()
    assert code == 0 and entries
    code, second, _ = run(capsys, *args)
    strip = lambda s: {k: v for k, v in json.loads(s).items() if k != "wall"}
    assert strip(first) == strip(second)
    assert len(Cache(tmp_path).entries()) == len(entries)
    audit = Cache(tmp_path).audit(fraction=1.0)
    assert audit and all(ok for _, ok in audit)


def test_cache_env_and_tamper(tmp_path, monkeypatch):
    monkeypatch.setenv("DELJOIN_CACHE_DIR", str(tmp_path))
    cache = Cache(Cache.default_dir())
    rep = cmd_verify_pmain(2, 2, 4, cache, parts="b")
    assert rep.ok
    path = next(tmp_path.glob("*.json"))
    entry = json.loads(path.read_text())
    entry["value"]["betti"] = {"1": 7}
    path.write_text(json.dumps(entry))
    assert not cmd_verify_pmain(2, 2, 4, cache, parts="b").ok
    assert [ok for _, ok in cache.audit(fraction=1.0)] == [False]


def test_cache_key_depends_on_params():
    a = Cache.key("poset_homology", {"n": 3, "k": 2})
    assert a == Cache.key("poset_homology", {"k": 2, "n": 3})
    assert a != Cache.key("poset_homology", {"n": 3, "k": 3})


def test_verify_all_budget_and_fault(capsys):
    code, out, _ = run(capsys, "verify", "all", "--budget-sec", "0", "--json")
    data = json.loads(out)
    assert code == 0 and data["checks"] and all(c["status"] == "skip" for c in data["checks"])
    code, out, _ = run(capsys, "verify", "all", "--budget-sec", "0", "--inject-fault", "--json")
    assert code == 1 and not json.loads(out)["ok"]


def test_verify_all_threads_agree():
    items = [("dnt", (3,)), ("main", (2, 3, 4)), ("el", (3, 2, 1)), ("dlim", (2, 2)), ("subdivision", (2, 2))]
    one = cmd_verify_all(threads=1, items=items)
    two = cmd_verify_all(threads=2, items=items)
    assert one.ok
    assert one.to_dict(timing=False) == two.to_dict(timing=False)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "deljoin", "nakaoka", "qp", "--p", "3", "--dmax", "4"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.split("\n")[:2] == ["3\t3", "4\t4"]
