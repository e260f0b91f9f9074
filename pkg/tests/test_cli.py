import json
import subprocess
import sys

from conftest import FIXTURES
from popmatch.cli import main


def fx(name):
    return str(FIXTURES / f"{name}.txt")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_verify_i1_popular(capsys):
    code, rep = run_json(capsys, "verify", fx("i1"), "--matching", fx("i1_popular"), "--method", "all")
    assert code == 0 and rep["exit_code"] == 0
    assert [v["method"] for v in rep["verdicts"]] == ["structural", "optimization", "bruteforce"]
    assert all(v["popular"] for v in rep["verdicts"])
    assert set(rep["timing_ms"]) == {"structural", "optimization", "bruteforce"}
    assert rep["command"] == "verify" and len(rep["digest"]) == 64


def test_verify_i2_not_popular(capsys):
    code, rep = run_json(capsys, "verify", fx("i2"), "--matching", fx("i2_matching"), "--method", "all")
    assert code == 1
    assert not any(v["popular"] for v in rep["verdicts"])


def test_verify_inline_matching_and_single_method(capsys):
    code, out, _ = run(capsys, "verify", fx("i3"), "--matching", "a1 h1; a2 h2", "--method", "structural")
    assert code == 1
    rows = [line.split("\t") for line in out.strip().splitlines()]
    assert rows[0] == ["method", "popular", "ms", "certificate"]
    assert rows[1][:2] == ["structural", "False"] and "BadPartner" in rows[1][3]


def test_verify_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("problem: nonsense\n")
    code, _, err = run(capsys, "verify", str(bad), "--matching", "a1 h1")
    assert code == 3 and err.startswith("error:")
    assert run(capsys, "verify", fx("i1"), "--matching", "a1 h9")[0] == 3
    assert run(capsys, "verify", str(tmp_path / "missing.txt"), "--matching", "a1 h1")[0] == 3
    assert run(capsys, "verify", fx("i1"))[0] == 3
    assert run(capsys, "bogus")[0] == 3


def test_verify_guard(capsys, tmp_path):
    code, _, err = run(capsys, "verify", fx("i2"), "--matching", fx("i2_matching"), "--method", "bruteforce",
                       "--guard-edges", "3")
    assert code == 3 and "guard" in err


def test_digest_is_stable(capsys):
    _, a = run_json(capsys, "verify", fx("i4"), "--matching", fx("i4_stable"))
    _, b = run_json(capsys, "verify", fx("i4"), "--matching", fx("i4_stable"))
    assert a["digest"] == b["digest"]
    _, c = run_json(capsys, "verify", fx("i1"), "--matching", fx("i1_popular"))
    assert a["digest"] != c["digest"]


def test_certify_i1(capsys):
    code, rep = run_json(capsys, "certify", fx("i1"), "--matching", fx("i1_popular"))
    cert = rep["certificate"]
    assert code == 0 and cert["type"] == "dual"
    assert {k: cert["y"][k] for k in ("a1", "a2", "h1", "h2")} == {"a1": 0, "a2": 1, "h1": 1, "h2": 0}
    assert cert["objective"] == 2 == cert["primal_value"]
    assert cert["feasible"] and cert["cs_ok"] and cert["regime"] == "a-perfect"


def test_certify_i4(capsys):
    code, rep = run_json(capsys, "certify", fx("i4"), "--matching", fx("i4_stable"))
    cert = rep["certificate"]
    assert code == 0 and set(cert["y"].values()) == {1} and cert["objective"] == 4
    assert cert["regime"] == "nonnegative"


def test_certify_i2_rival(capsys):
    code, rep = run_json(capsys, "certify", fx("i2"), "--matching", fx("i2_matching"))
    cert = rep["certificate"]
    assert code == 1 and cert["type"] == "rival" and cert["delta"] > 0
    assert cert["witness"]["type"] == "witness"


def test_certify_smi_improvement(capsys):
    code, rep = run_json(capsys, "certify", fx("i4"), "--matching", "")
    cert = rep["certificate"]
    assert code == 1 and cert["type"] == "improvement"
    assert cert["witness"]["kind"] == "PlusPlusPathFromUnmatched" and cert["gain"] >= 1


def test_certify_human(capsys):
    code, out, _ = run(capsys, "certify", fx("i1"), "--matching", fx("i1_popular"))
    assert code == 0 and "objective\t2" in out and "a2\t1" in out


def test_find(capsys, tmp_path):
    code, out, _ = run(capsys, "find", fx("i2"))
    assert code == 1 and "no popular matching" in out
    out_file = tmp_path / "m.txt"
    code, rep = run_json(capsys, "find", fx("i4"), "--out", str(out_file))
    assert code == 0 and rep["matching"] == "u1 v1; u2 v2"
    assert out_file.read_text().strip() == "u1 v1; u2 v2"
    assert run(capsys, "find", fx("i1"))[0] == 0
    code, rep = run_json(capsys, "find", fx("i3"))
    assert code == 0 and all(v["popular"] for v in rep["verdicts"])


def test_cross_check(capsys):
    code, rep = run_json(capsys, "cross-check", fx("i2"))
    assert code == 1 and rep["popular"] == 0 and rep["candidates"] == len(rep["results"]) > 0
    for r in rep["results"]:
        assert [v["popular"] for v in r["verdicts"]] == [False, False, False]
    code, rep = run_json(capsys, "cross-check", fx("i4"))
    assert code == 0 and rep["candidates"] == 7 and rep["popular"] == 2


def test_gen_deterministic(capsys, tmp_path):
    a = run(capsys, "gen", "--variant", "hat", "--seed", "4", "--sizes", "3x3", "--tie-prob", "0.5")
    b = run(capsys, "gen", "--variant", "hat", "--seed", "4", "--sizes", "3x3", "--tie-prob", "0.5")
    assert a == b and a[0] == 0 and a[1].startswith("problem: hat")
    path = tmp_path / "g.txt"
    assert run(capsys, "gen", "--variant", "hat", "--seed", "4", "--sizes", "3x3", "--tie-prob", "0.5",
               "--out", str(path))[0] == 0
    assert path.read_text() == a[1]
    assert run(capsys, "gen", "--variant", "smi", "--sizes", "1-3x2")[0] == 3


def test_fuzz_exit_and_determinism(capsys):
    args = ("fuzz", "--variant", "ha", "--seed", "1", "--count", "40", "--sizes", "4x4", "--json")
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first[0] == 0 and first[1] == second[1]
    data = json.loads(first[1])
    assert data["disagreements"] == 0 and data["instances"] == 40


def test_fuzz_bad_parameters(capsys):
    assert run(capsys, "fuzz", "--variant", "smi", "--sizes", "5x5")[0] == 3
    assert run(capsys, "fuzz", "--variant", "ha", "--tie-prob", "0.3")[0] == 3
    assert run(capsys, "fuzz", "--variant", "ha", "--sizes", "4by4")[0] == 3


def test_figures(capsys, tmp_path):
    fig = tmp_path / "verify.png"
    assert run(capsys, "verify", fx("i3"), "--matching", "a1 h1; a2 h2", "--figure", str(fig))[0] == 1
    cert_fig = tmp_path / "certify.png"
    assert run(capsys, "certify", fx("i1"), "--matching", fx("i1_popular"), "--figure", str(cert_fig))[0] == 0
    fuzz_dir = tmp_path / "figs"
    assert run(capsys, "fuzz", "--variant", "smi", "--count", "10", "--figures", str(fuzz_dir))[0] == 0
    for path in (fig, cert_fig, *fuzz_dir.iterdir()):
        assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(list(fuzz_dir.iterdir())) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "popmatch", "find", fx("i2")], capture_output=True, text=True)
    assert proc.returncode == 1 and "no popular matching" in proc.stdout


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == 0
