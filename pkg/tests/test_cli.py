import io
import json

import pytest

from gkzhorn.cli import run
from gkzhorn.golden import FIXTURE_ROOT
from gkzhorn.serialize import loads

EX55 = str(FIXTURE_ROOT / "paper" / "ex5_5.json")


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_context_on_example_file():
    code, text = call("context", "--A", EX55)
    assert code == 0
    ctx = loads(text)
    assert ctx.K == ((-1, 2), (0, -3))
    assert ctx.latticeIndex == 3


def test_context_from_toml(tmp_path):
    p = tmp_path / "cubic.toml"
    p.write_text('A = [[1, 1, 1, 1], [0, 1, 2, 3]]\nbeta = ["1/2", "1/3"]\n[bounds]\ntoricDegree = 2\n')
    code, text = call("--format", "pretty", "context", "--problem", str(p))
    assert code == 0 and "latticeIndex = 1" in text


def test_malformed_json_exits_2(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("[[1, 2")
    code, text = call("context", "--A", str(p))
    assert code == 2
    assert json.loads(text)["type"] == "InputError"


@pytest.mark.parametrize("argv", [
    ("context", "--A", "/no/such/file.json"),
    ("context", "--A", "[[1, 1], [1, 1]]"),
    ("context", "--A", '[["a"]]'),
    ("build", "--A", "[[1, 1, 1, 1], [0, 1, 2, 3]]", "--beta", "1/2"),
    ("build", "--A", "[[1, 1, 1, 1], [0, 1, 2, 3]]"),
])
def test_invalid_input_exits_2(argv):
    assert call(*argv)[0] == 2


def test_computation_error_exits_1():
    code, text = call("hk", "--B", "[[1], [-1]]", "--s", "0")
    assert code == 1
    err = json.loads(text)
    assert err["type"] == "HKError" and "vanishes" in err["error"]


def test_build_series_check_pipeline(tmp_path):
    code, text = call("build", "--A", "[[1, 1, 1, 1], [0, 1, 2, 3]]", "--beta", "1/2, 1/3")
    assert code == 0
    sys_file = tmp_path / "sys.json"
    sys_file.write_text(text)
    code, text = call("series", "--system", str(sys_file), "--order", "4")
    assert code == 0 and len(loads(text)) == 3
    ser_file = tmp_path / "series.json"
    ser_file.write_text(text)
    code, text = call("check", "--ops", str(sys_file), "--series", str(ser_file))
    assert code == 0
    assert all(r["passed"] for r in loads(text))


def test_horn_series_via_cli(tmp_path):
    code, text = call("build", "--A", "[[1, 1, 1, 1], [0, 1, 2, 3]]", "--kappa", "0, 0, 1/2, 1/3",
                      "--system", "horn")
    assert code == 0
    f = tmp_path / "horn.json"
    f.write_text(text)
    code, text = call("--format", "pretty", "series", "--system", str(f), "--order", "3")
    assert code == 0 and text.startswith("z-series")


def test_pi_and_shorn():
    code, text = call("--format", "pretty", "shorn", "--A", EX55, "--kappa", "0, 0, 1/2, 1/3")
    assert code == 0 and text.count("summand") == 3
    code, text = call("pi", "--A", EX55)
    assert code == 0 and loads(text)["summandCount"] == 3


def test_classify_and_hk():
    code, text = call("--format", "pretty", "classify", "--context",
                      str(FIXTURE_ROOT / "paper" / "ex6_8.json"), "--beta", "0")
    assert code == 0 and "toral: NOT_IN_PRIME_LEVEL" in text
    code, text = call("--format", "pretty", "hk", "--B", "[[1], [-2], [1]]",
                      "--disc", "[[[0, 2, 0], 1], [[1, 0, 1], -4]]")
    assert code == 0
    assert "seed = 20240" in text and "20/20" in text


def test_golden_passes():
    code, text = call("golden")
    assert code == 0
    assert all(r["passed"] for r in loads(text))
