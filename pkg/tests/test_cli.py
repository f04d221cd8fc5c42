import io
import math
import pathlib

import pytest

from rpr3 import designs as ref
from rpr3.cli import main, verify_design
from rpr3.formats import format_design

DESIGNS = pathlib.Path(__file__).resolve().parents[1] / "designs"


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def field(text, key):
    for line in text.splitlines():
        if line.startswith(key + ":"):
            return line.split(":", 1)[1].strip()
    raise KeyError(key)


def test_ik_then_dk_round_trip():
    design = DESIGNS / "dissimilar.txt"
    code, out = run("ik", design, "--pose", "-0.03,0.02,-25", "--mode", "+-+")
    assert code == 0
    theta = field(out, "theta_deg")
    code, out = run("dk", design, "--theta", theta)
    assert code == 0
    rows = [list(map(float, l.split(","))) for l in out.splitlines()[2:]]
    assert min(max(abs(r[0] + 0.03), abs(r[1] - 0.02), abs(r[2] + 25) * math.pi / 180) for r in rows) < 1e-8


def test_ik_unreachable_is_not_an_error():
    code, out = run("ik", DESIGNS / "cardanic.txt", "--pose", "-0.2, -0.125,0")
    assert code == 0 and out.startswith("UNREACHABLE")


def test_dk_markers():
    assert run("dk", DESIGNS / "cardanic.txt", "--theta", "-60,0,60")[1] == "SELF-MOTION (degenerate ellipse)\n"
    assert run("dk", DESIGNS / "dissimilar.txt", "--theta", "10,10,10")[1] == "NO ASSEMBLY\n"


def test_dk_parallel_legs(tmp_path):
    f = tmp_path / "congruent.txt"
    f.write_text("Rb = 0.2\nalphab = 30\nbetab = 120\nRp = 0.2\nalphap = 30\nbetap = 120\nL1 = 0\nL2 = 0\nL3 = 0\n")
    assert run("dk", f, "--theta", "90,90,90")[1] == "SELF-MOTION (parallel legs)\n"


def test_selfmotion_reports():
    code, out = run("selfmotion", DESIGNS / "equal_offsets.txt")
    assert code == 0 and "classification: NONE" in out
    assert "classification: INFINITE" in run("selfmotion", DESIGNS / "cardanic.txt")[1]
    out = run("selfmotion", DESIGNS / "dissimilar.txt")[1]
    assert "classification: FINITE" in out and field(out, "joint_sets") == "8"


def test_paminsa_line():
    code, out = run("paminsa", DESIGNS / "paminsa.txt", "--pose", "0,-0.25,0")
    assert code == 0
    assert "on_self_motion_circle: true" in out.splitlines()
    assert field(out, "verdict") == "type2 cardanic-self-motion"


def test_paminsa_wrong_design_is_domain_error():
    assert run("paminsa", DESIGNS / "cardanic.txt", "--pose", "0,0,0")[0] == 2


def test_classify_reports_w():
    code, out = run("classify", DESIGNS / "paminsa.txt", "--pose", "0,-0.25,0")
    assert code == 0 and field(out, "verdict") == "type2 cardanic-self-motion"
    assert len(field(out, "W").split(",")) == 2


def test_trace_and_figure(tmp_path):
    code, out = run("--outdir", tmp_path, "trace", DESIGNS / "cardanic.txt", "--theta2", "0", "--phi-steps", "12",
                    "--csv", "t.csv", "--figure", "t.png")
    assert code == 0
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "phi_deg,x,y,ox,oy,wx,wy" and len(lines) == 13
    assert (tmp_path / "t.png").stat().st_size > 1000


def test_trace_on_dissimilar_design_fails():
    assert run("trace", DESIGNS / "dissimilar.txt")[0] == 2


def test_locus_outputs(tmp_path):
    args = ("--outdir", tmp_path, "locus", DESIGNS / "paminsa.txt", "--phi", "0", "--grid", "40,30",
            "--csv", "l.csv", "--svg", "l.svg", "--figure", "l.png")
    assert run(*args)[0] == 0
    csv = (tmp_path / "l.csv").read_text().splitlines()
    assert csv[0] == "x,y,phi_deg,detA,reachable" and len(csv) == 1 + 1200
    first = (tmp_path / "l.svg").read_bytes()
    assert run(*args)[0] == 0
    assert (tmp_path / "l.svg").read_bytes() == first
    assert (tmp_path / "l.png").stat().st_size > 1000


def test_locus_stdout():
    code, out = run("locus", DESIGNS / "cardanic.txt", "--grid", "3,2", "--bbox", "-0.1,-0.1,0.1,0.1")
    assert code == 0 and len(out.splitlines()) == 7


def test_selfmotion_figure(tmp_path):
    code, _ = run("--outdir", tmp_path, "selfmotion", DESIGNS / "cardanic.txt", "--figure", "s.png")
    assert code == 0 and (tmp_path / "s.png").exists()


@pytest.mark.parametrize("argv", [
    ("ik", "missing.txt", "--pose", "0,0,0"),
    ("ik", DESIGNS / "cardanic.txt", "--pose", "0,0"),
    ("ik", DESIGNS / "cardanic.txt", "--pose", "0,0,0", "--mode", "+x+"),
    ("frobnicate",),
    ("locus", DESIGNS / "cardanic.txt", "--grid", "a,b"),
])
def test_parse_errors_exit_one(argv):
    assert run(*argv)[0] == 1


def test_bad_design_file_exit_one(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text(format_design(ref.cardanic_design()).replace("alphab = 30", "alphab = 95"))
    assert run("selfmotion", f)[0] == 1


def test_empty_region_is_domain_error():
    assert run("locus", DESIGNS / "cardanic.txt", "--grid", "3,3", "--bbox", "-0.2,-0.126,-0.19,-0.12")[0] == 2


def test_verify_passes():
    code, out = run("verify", DESIGNS / "dissimilar.txt")
    assert code == 0 and out.count("PASS") == 5


def test_verify_results_structure():
    results = verify_design(ref.equal_offset_design(0.05), count=5)
    assert [r[0] for r in results][-1] == "self-motion-none"
    assert all(ok for _, ok, _ in results)
