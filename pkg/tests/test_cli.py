import json

import pytest

from rmmcopula.cli import build_parser, main
from rmmcopula.presets import CATALOG


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_mass_ex3b(capsys):
    code, out, _ = run(capsys, "mass", "--preset", "ex3b:delta=1/3")
    assert code == 0
    assert "singular_mass 0.462098120373" in out


def test_eval_efgm(capsys):
    assert run(capsys, "eval", "--preset", "efgm:a=0.5", "--u", "0.5", "--v", "0.5")[1] == "0.234375\n"


def test_eval_lists_and_maxmin(capsys):
    _, out, _ = run(capsys, "eval", "--preset", "w", "--u", "0.2,0.7", "--v", "0.6", "--maxmin")
    assert out.split() == ["0.2", "0.6"]


def test_diagonal_w_member(capsys):
    code, out, _ = run(capsys, "diagonal", "--preset", "w", "--check-dhat")
    assert code == 0 and out.splitlines()[0] == "member of D-hat"


def test_diagonal_counterexample(capsys):
    _, out, _ = run(capsys, "diagonal", "--preset", "diag:sharp-only", "--check-dhat")
    assert out.startswith("not a member of D-hat")
    assert "witness" in out


def test_diagonal_table_and_srmm(capsys):
    _, out, _ = run(capsys, "diagonal", "--preset", "w", "--grid", "3")
    assert out.splitlines() == ["t,delta,delta_sharp,delta_hat", "0,0,,0", "0.5,0,0,1", "1,1,1,1"]
    _, out, _ = run(capsys, "diagonal", "--preset", "w", "--srmm")
    assert len(json.loads(out)["pieces"]) == 2


def test_validate_square_file(tmp_path, capsys):
    p = tmp_path / "sq.json"
    p.write_text(json.dumps({"version": 1, "pieces": [{"from": 0, "to": 1, "coeffs": [0, 0, 1]}]}))
    code, out, err = run(capsys, "validate", "--file", str(p))
    assert code == 1
    assert "(G3) failed" in err
    assert json.loads(out)["f"]["conditions"]["G3"] is False


def test_validate_preset_w(capsys):
    code, out, _ = run(capsys, "validate", "--preset", "w")
    assert code == 0 and json.loads(out)["passed"]


@pytest.mark.parametrize("text", ["{", '{"pieces": [{"from": 0, "to": 0.5, "coeffs": [0]}]}', "[1, 2]"])
def test_validate_malformed(tmp_path, capsys, text):
    p = tmp_path / "bad.json"
    p.write_text(text)
    assert run(capsys, "validate", "--file", str(p))[0] == 2


def test_missing_file(capsys):
    assert run(capsys, "eval", "--file", "/nonexistent.json", "--u", "0.1", "--v", "0.1")[0] == 2


def test_math_domain_exit(capsys):
    code, _, err = run(capsys, "eval", "--preset", "w", "--u", "1.5", "--v", "0.5")
    assert code == 1 and err.startswith("error:")


def test_unknown_preset_exit(capsys):
    assert run(capsys, "eval", "--preset", "nope", "--u", "0.1", "--v", "0.1")[0] == 2


def test_nonconvergence_exit(capsys, monkeypatch):
    from rmmcopula import measure
    real = measure.adaptive_gl

    def sloppy(fun, a, b, tol):
        val, _ = real(fun, a, b, tol)
        return val, 1e-3

    monkeypatch.setattr(measure, "adaptive_gl", sloppy)
    code, _, err = run(capsys, "mass", "--preset", "ex3b:delta=1/3")
    assert code == 3 and "exceeds target" in err


def test_volume_density_levelset(capsys):
    assert run(capsys, "volume", "--preset", "pi", "--u1", "0.2", "--u2", "0.5",
               "--v1", "0.1", "--v2", "0.4")[1] == "0.09\n"
    _, out, _ = run(capsys, "density", "--preset", "efgm:a=0.5", "--u", "0", "--v", "0")
    assert out.splitlines()[1] == "0.75,1"
    _, out, _ = run(capsys, "levelset", "--preset", "ex3c:mu=1", "--grid", "5")
    assert out.splitlines()[:2] == ["u,v", "0,0.5"]


def test_recover(tmp_path, capsys):
    out = tmp_path / "f.csv"
    assert run(capsys, "recover", "--preset", "tent", "--grid", "5", "--out", str(out))[0] == 0
    assert out.read_text().splitlines() == ["u,f_u,valid", "0.25,0.25,1", "0.5,0.5,1",
                                            "0.75,0.25,1", "1,0,1"]
    assert json.loads((tmp_path / "f.csv.json").read_text())["u_min"] == 0.5
    assert run(capsys, "recover", "--preset", "efgm:a=0.5")[0] == 1


def test_recover_from_samples(tmp_path, capsys):
    s = tmp_path / "s.csv"
    assert run(capsys, "sample", "--preset", "tent", "--n", "20000", "--seed", "3",
               "--out", str(s))[0] == 0
    code, out, _ = run(capsys, "recover", "--samples", str(s), "--grid", "11")
    assert code == 0
    row = [r for r in out.splitlines() if r.startswith("0.7,")][0]
    assert abs(float(row.split(",")[1]) - 0.3) < 0.03


def test_sample_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "sample", "--preset", "ex3b:delta=1/3", "--n", "500", "--seed", "9", "--out", str(a))
    run(capsys, "sample", "--preset", "ex3b:delta=1/3", "--n", "500", "--seed", "9",
        "--threads", "3", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    meta = json.loads((tmp_path / "a.csv.json").read_text())
    assert meta["preset"] == "ex3b:delta=1/3" and meta["seed"] == 9


def test_sample_zero(capsys):
    assert run(capsys, "sample", "--preset", "w", "--n", "0")[1] == "u,v,singular\n"


def test_figures(tmp_path, capsys):
    code, out, _ = run(capsys, "figures", "--out", str(tmp_path), "--n", "10")
    assert code == 0
    assert len(out.splitlines()) == 24


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"preset": "efgm:a=0.5", "u": "0.5", "v": "0.5"}))
    assert run(capsys, "eval", "--config", str(cfg))[1] == "0.234375\n"
    assert run(capsys, "eval", "--config", str(cfg), "--preset", "pi")[1] == "0.25\n"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "eval", "--config", str(cfg))[0] == 2


def test_help_lists_presets():
    text = build_parser().format_help()
    for key in CATALOG:
        family = key.split(":")[0]
        assert family in text


def test_no_command(capsys):
    assert main([]) == 2
