import json
import subprocess
import sys

from nilideal.cli import main
from nilideal.reducer import Certificate, verify_certificate


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err


def test_expand(capsys):
    assert run(capsys, "expand", "[x1,x2]")[:2] == (0, "x1*x2 - x2*x1")
    assert run(capsys, "expand", "[x1,x1,x2]")[:2] == (0, "0")
    code, out, _ = run(capsys, "expand", "[x1,x2,x3]")
    assert code == 0 and out == "x1*x2*x3 - x2*x1*x3 - x3*x1*x2 + x3*x2*x1"


def test_expand_parse_error(capsys):
    code, _, err = run(capsys, "expand", "[x1,")
    assert code == 2 and "parse error" in err


def test_member_torsion(capsys):
    assert run(capsys, "member", "[x1,x2]*[x3,x4,x5]", "T4", "--ring", "Z")[:2] == (3, "TORSION 3")


def test_member_other_rings(capsys):
    assert run(capsys, "member", "[x1,x2]*[x3,x4,x5]", "T4", "--ring", "Q")[:2] == (0, "MEMBER")
    assert run(capsys, "member", "[x1,x2]*[x3,x4,x5]", "T4", "--ring", "F3")[:2] == (1, "NOT_MEMBER")


def test_member_examples(capsys):
    assert run(capsys, "member", "[x1,x2,x3,x4,x5]", "T5", "--ring", "Z")[:2] == (0, "MEMBER")
    assert run(capsys, "member", "x1*x2", "T5", "--ring", "Q")[:2] == (1, "NOT_MEMBER")


def test_member_mixed_components(capsys):
    code, out, _ = run(capsys, "member", "[x1,x2,x3,x4,x5] + x1*x2", "T5")
    lines = out.splitlines()
    assert code == 1 and len(lines) == 3 and lines[-1] == "NOT_MEMBER"


def test_member_unknown_spec(capsys):
    code, _, err = run(capsys, "member", "x1", "T7")
    assert code == 2 and "unknown spec" in err


def test_reduce_base_case(capsys):
    code, out, _ = run(capsys, "reduce", "COMM5", "x1", "x2", "x3", "x4", "x5")
    assert code == 0
    data = json.loads(out)
    assert data["terms"] == [{"coeff": "1", "left": "", "family": "F1",
                              "vars": ["x1", "x2", "x3", "x4", "x5"], "right": ""}]


def test_reduce_split(capsys):
    code, out, _ = run(capsys, "reduce", "COMM5", "x1", "x2", "x3", "x4", "x5*x6")
    assert code == 0
    c = Certificate.from_json(out)
    assert len(c.terms) == 2 and verify_certificate(c)
    code, out, _ = run(capsys, "reduce", "P42", "x1", "x2", "x3", "x4", "x5", "x6")
    assert code == 0 and [t["family"] for t in json.loads(out)["terms"]] == ["F4"]


def test_reduce_deep_instance_to_file(capsys, tmp_path):
    path = tmp_path / "cert.json"
    code, out, _ = run(capsys, "reduce", "COMM5", "x1*x2", "x3", "x4", "x5", "x6", "--out", str(path))
    assert code == 0 and out == ""
    c = Certificate.from_json(path.read_text())
    assert verify_certificate(c)
    assert {"F2", "F4"} <= {t[2] for t in c.terms}


def test_reduce_arity_error(capsys):
    code, _, err = run(capsys, "reduce", "COMM5", "x1", "x2")
    assert code == 2 and "takes 5" in err


def test_certify(capsys):
    code, out, _ = run(capsys, "certify", "x1+x2", "x3", "x4", "x5", "x6")
    assert code == 0 and verify_certificate(Certificate.from_json(out))


def test_identities(capsys, tmp_path):
    path = tmp_path / "ids.json"
    code, _, _ = run(capsys, "identities", "--ring", "F2", "--json", str(path))
    rep = json.loads(path.read_text())
    assert code == 0 and rep and all(r["residual_term_count"] == 0 for r in rep)


def test_verify_theorem_degree_bound(capsys):
    code, _, err = run(capsys, "verify-theorem", "--max-degree", "4")
    assert code == 2


def test_verify_theorem_small_run_is_deterministic(tmp_path, capsys):
    # the second run reloads echelon forms written by the first
    args = ["verify-theorem", "--max-degree", "5", "--rings", "Z", "--primes", "",
            "--reducer-instances", "16", "--cache-dir", str(tmp_path / "cache")]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--json", str(a)]) == 0
    assert main(args + ["--threads", "2", "--json", str(b)]) == 0
    capsys.readouterr()
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    for r in ra["records"] + rb["records"]:
        r.pop("ms", None)
    ra["environment"].pop("threads", None)
    rb["environment"].pop("threads", None)
    assert ra == rb
    assert all(r["status"] == "PASS" for r in ra["records"])
    assert ra["environment"]["rings"] == ["Z"]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "nilideal", "expand", "[x1,x2]"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "x1*x2 - x2*x1"
