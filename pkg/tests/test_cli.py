import io
import subprocess
import sys

import pytest

from genusforge import classify, criteria, discform, genus
from genusforge.cli import OP_REGISTRY, run

INVOCATIONS = {
    "genus parse": ["genus", "parse", "4_5^-1 11^+1", "--signature", "0,21"],
    "genus print": ["genus", "print", "3^−1 7^-1"],
    "genus negate": ["genus", "negate", "3^-1 7^-1"],
    "genus canon": ["genus", "canon", "2_7^+1 4_3^+1"],
    "genus excess": ["genus", "excess", "3^-2", "--p", "3"],
    "genus exists": ["genus", "exists", "II_{0,2} 3^+1"],
    "genus from-gram": ["genus", "from-gram", "--", "-2,1,0,0;1,-2,1,1;0,1,-2,0;0,1,0,-2"],
    "disc glue": ["disc", "glue", "2_7^+1 3^+2 9^-1", "3^+2", "--p", "3", "--order", "9"],
    "disc witt": ["disc", "witt", "2_5^+3 7^-1", "2_II^-2"],
    "disc embed": ["disc", "embed", "2_II^-2", "2_II^-2"],
    "disc iso": ["disc", "iso", "2_II^-2", "2_II^+2"],
    "criteria length": ["criteria", "length", "163"],
    "criteria constituent": ["criteria", "constituent", "186", "--p", "3"],
    "criteria det": ["criteria", "det", "120", "--p", "5", "--at", "11"],
    "criteria tame": ["criteria", "tame", "102", "--p", "5"],
    "criteria legendre": ["criteria", "legendre", "--orbits", "1,1,1,21", "--p", "5"],
    "classify entry": ["classify", "entry", "165", "--p", "11"],
    "classify table": ["classify", "table", "1"],
    "classify all": ["classify", "all", "--bound", "8"],
    "mukai holds": ["mukai", "holds", "--p", "311"],
    "mukai residues": ["mukai", "residues", "--bound", "20000"],
    "data validate": ["data", "validate"],
}


def call(argv):
    buf = io.StringIO()
    code = run(argv, stream=buf)
    return code, buf.getvalue()


def test_documented_examples():
    assert call(["genus", "negate", "3^-1 7^-1"]) == (0, "3^+1 7^+1\n")
    assert call(["criteria", "legendre", "--orbits", "1,1,1,21", "--p", "5"]) == (0, "fail (21/5)=1\n")
    code, out = call(["mukai", "residues", "--bound", "20000"])
    assert code == 0 and out.split() == ["1", "121", "169", "289", "311", "361", "479", "529",
                                         "551", "671", "719", "839"]


def test_every_operation_is_reachable():
    for name in OP_REGISTRY:
        assert any(hasattr(m, name) for m in (genus, discform, criteria, classify)) or name == "discriminant_form"
    assert set(OP_REGISTRY.values()) <= set(INVOCATIONS) | {"data load"}


@pytest.mark.parametrize("cmd", sorted(INVOCATIONS))
def test_subcommands_succeed(cmd):
    code, out = call(INVOCATIONS[cmd])
    assert code == 0, out
    assert out.strip()
    assert out.isascii()


@pytest.mark.parametrize("cmd", ["classify entry", "classify all", "genus parse"])
def test_machine_output_is_stable(cmd):
    argv = ["--json"] + INVOCATIONS[cmd]
    assert call(argv) == call(argv)


def test_machine_verdict_line():
    code, out = call(["--json", "classify", "entry", "102", "--p", "5"])
    fields = out.rstrip("\n").split("\t")
    assert code == 0 and fields[:3] == ["102", "5", "no"] and "(21/5)=1" in fields[3]


def test_data_load(tmp_path):
    path = tmp_path / "rows.tsv"
    path.write_text("900\tTest\t60\t4\t3^+1 5^+1 7^+1\t1,1,7,15\t-\n", encoding="utf-8")
    code, out = call(["data", "load", str(path)])
    assert code == 0 and out.startswith("900 Test 60 4")
    path.write_text("900\tTest\t60\t2\t3^+1\t-\t-\n", encoding="utf-8")
    assert call(["data", "load", str(path)])[0] == 2


@pytest.mark.parametrize("argv", [
    ["bogus"],
    [],
    ["genus", "print", "2_3^+1"],
    ["genus", "print", "7^+x"],
    ["classify", "table", "3"],
    ["classify", "entry", "9999", "--p", "5"],
    ["criteria", "legendre", "--orbits", "1,1,21", "--p", "5"],
    ["mukai", "holds", "--p", "15"],
    ["data", "load", "/nonexistent/file.tsv"],
])
def test_usage_errors_exit_two(argv):
    assert call(argv)[0] == 2


def test_table_mismatch_exits_one(monkeypatch):
    monkeypatch.setitem(classify.TABLE6, 120, 13)
    assert call(["classify", "table", "6"])[0] == 1


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "genusforge.cli", "genus", "negate", "3^-1 7^-1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout == "3^+1 7^+1\n"
