import os

import pytest
from scipy.special import hyp2f1

from mbhf.config import ExitCode
from mbhf.main import main, parse_assignments
from mbhf.mb_model import integrals_equal
from mbhf.errors import CodecError
from mbhf.storage import codec, data_path, read_json


@pytest.fixture
def run(tmp_path, monkeypatch):
    """Runs the CLI with its output directory under tmp_path."""
    monkeypatch.delenv("MBHF_THREADS", raising=False)

    def invoke(*argv):
        return main(["--output-dir", str(tmp_path), "--threads", "1", *argv])
    return invoke


def value_line(text):
    line = next(l for l in text.splitlines() if l.startswith("value: "))
    return complex(line.removeprefix("value: "))


def test_parse_assignments():
    assert parse_assignments("a=0.31, b'=0.57,x=0.1+0.2j") == {'a': 0.31, "b'": 0.57, 'x': 0.1 + 0.2j}
    assert parse_assignments(None) == {}
    for bad in ("a", "=1", "a=one"):
        with pytest.raises(CodecError):
            parse_assignments(bad)


def test_eval_named_series(run, capsys):
    assert run("eval", "--fn", "2F1", "--params", "a=1,b=1,c=2", "--point", "z=0.5") == ExitCode.OK
    assert value_line(capsys.readouterr().out).real == pytest.approx(1.3862943611, rel=1e-10)


def test_eval_outside_convergence(run):
    code = run("eval", "--fn", "2F1", "--params", "a=0.3,b=0.4,c=2", "--point", "z=2", "--max-shells", "40")
    assert code == ExitCode.NON_CONVERGENT


@pytest.mark.parametrize("argv", [
    ["eval", "--fn", "H_B", "--params", "a=1", "--point", "x=0.1"],
    ["eval", "--params", "a=1"],
    ["eval", "--fn", "2F1", "--params", "a", "--point", "z=0.5"],
    ["transform", "--path", "G9-1aB"],
    ["transform", "--path", "F_1-2aK"],
    ["transform", "--seed", "F2", "--path", "F_1-2aE"],
    ["transform", "--path", "F1-2aE2cA"],
])
def test_usage_errors(run, argv):
    assert run(*argv) == ExitCode.USAGE


def test_argument_errors():
    assert main([]) == ExitCode.USAGE
    assert main(["--help"]) == ExitCode.OK


def test_transform_writes_integral_and_ledger(run, tmp_path, capsys):
    assert run("transform", "--path", "F_1-2aE1aE") == ExitCode.OK
    assert "2aE" in capsys.readouterr().out
    output = str(tmp_path / "F_1-2aE1aE.json")
    doc = read_json(output)
    assert doc['path'] == "F_1-2aE1aE"
    assert [e['applied'] for e in doc['ledger']] == ["2aE", "1aE"]
    fixture = codec.read_integral(str(data_path("fixtures/F1-2aE1aE.json")))
    assert integrals_equal(codec.read_integral(output), fixture)


def test_transform_with_seed_and_steps(run, tmp_path):
    assert run("transform", "--seed", "F1", "--path", "2aE") == ExitCode.OK
    assert os.path.exists(tmp_path / "F1-2aE.json")


def test_transform_from_input_file(run, tmp_path):
    source = str(data_path("fixtures/F1-2aE.json"))
    assert run("transform", "--input", source, "--path", "1aE", "--output", "chained.json") == ExitCode.OK
    chained = codec.read_integral(str(tmp_path / "chained.json"))
    assert integrals_equal(chained, codec.read_integral(str(data_path("fixtures/F1-2aE1aE.json"))))


def test_quad_matches_series(run, capsys):
    code = run("quad", "--seed", "2F1", "--params", "a=0.31,b=0.43,c=2.11", "--point", "z=-0.3")
    assert code == ExitCode.OK
    out = capsys.readouterr().out
    assert value_line(out).real == pytest.approx(hyp2f1(0.31, 0.43, 2.11, -0.3), rel=1e-6)
    assert "contour:" in out


def test_quad_infeasible_contour(run, tmp_path):
    # numerator poles of Γ(-z1) and Γ(-1/2+z1) cannot be separated by a straight line
    source = tmp_path / "pinched.json"
    codec.write_integral(str(source), codec.integral_from_document({
        'nvars': 1, 'kernels': ["1"], 'gammas': [{'arg': "-z1"}, {'arg': "-1/2+z1"}]}))
    assert run("quad", "--input", str(source)) == ExitCode.NON_CONVERGENT


def test_map_writes_json_and_dot(run, tmp_path, capsys):
    assert run("map", "--seed", "2F1", "--depth", "1", "--dot") == ExitCode.OK
    assert "4 nodes, 4 edges" in capsys.readouterr().out
    doc = read_json(str(tmp_path / "map_2F1_1.json"))
    assert doc['schema'] == "mb-map.v1"
    assert (tmp_path / "map_2F1_1.dot").read_text().startswith('digraph "2F1"')


def test_corpus_list(run, tmp_path, capsys):
    assert run("corpus-list", "--tier", "explicit", "--csv") == ExitCode.OK
    out = capsys.readouterr().out
    assert "F1-Euler-1" in out
    assert "HC-1aC" not in out
    assert os.path.exists(tmp_path / "corpus.csv")


def test_verify_selected_identity(run, tmp_path):
    assert run("verify", "--id", "F1-Euler-1", "--csv") == ExitCode.OK
    doc = read_json(str(tmp_path / "verify-report.json"))
    assert doc['schema'] == "verify-report.v1"
    assert doc['summary']['pass'] == 1
    assert os.path.exists(tmp_path / "verify-points.csv")


def test_verify_missing_definitions_fails(run, tmp_path):
    assert run("verify", "--id", "HC-1aC") == ExitCode.VERIFICATION_FAILED
    doc = read_json(str(tmp_path / "verify-report.json"))
    assert doc['identities'][0]['status'] == "error"
