import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from sqgci.cli import EXIT_BUDGET, EXIT_CHECK, EXIT_CONFIG, EXIT_IO, EXIT_OK, main, parse_config, radial_spectrum
from sqgci.scheme.params import ConfigError
from sqgci.spectral.fields import SpectralField
from sqgci.spectral.grid import GridSpec

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_parse_config_defaults_and_lists():
    cfg = parse_config("[scheme]\ngamma = 1.5\nlambda_policy = 256, 4096\n[run]\nq_max = 2\nstrict = yes\n")
    assert cfg.params.gamma == 1.5 and cfg.params.lambda_policy == (256, 4096)
    assert cfg.q_max == 2 and cfg.strict is True and cfg.weak_tests == 100
    cfg = parse_config("[tolerances]\nmean = 1e-13\n[scaling]\nlambdas = 64;256\nquantities = all\n")
    assert cfg.params.tolerances["mean"] == 1e-13 and cfg.scaling_lambdas == (64, 256)


@pytest.mark.parametrize("text", [
    "[scheme]\ngama = 1\n",
    "[other]\nx = 1\n",
    "[scheme]\ngamma = x\n",
    "[scheme]\ngamma = 3\n",
    "[scheme]\nlambda_policy = 256\n[run]\nq_max = 2\n",
    "[scheme]\nlambda_policy = 64\n",
    "[run]\nq_max = -1\n",
    "[run]\nweak_tests = 0\n",
    "[tolerances]\nfoo = 1\n",
    "[scheme]\ngamma = 1\ngamma = 2\n",
    "not an ini",
])
def test_parse_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_radial_spectrum():
    f = SpectralField.from_modes(GridSpec(16), {(3, 4): 0.5, (-3, -4): 0.5})
    e = radial_spectrum(f)
    assert e[5] == pytest.approx(0.5) and e.sum() == pytest.approx(0.5)


def test_exit_codes(tmp_path):
    assert main(["run", str(CONFIGS / "base.ini"), "--out", str(tmp_path / "b")]) == EXIT_OK
    assert main(["run", str(CONFIGS / "budget.ini"), "--out", str(tmp_path / "g")]) == EXIT_BUDGET
    bad = tmp_path / "bad.ini"
    bad.write_text("[scheme]\nbogus = 1\n")
    assert main(["run", str(bad), "--out", str(tmp_path / "x")]) == EXIT_CONFIG
    assert main(["run", str(tmp_path / "missing.ini")]) == EXIT_CONFIG
    assert main(["verify", str(tmp_path / "nothing")]) == EXIT_CONFIG
    with pytest.raises(SystemExit) as e:
        main(["run"])
    assert e.value.code == EXIT_CONFIG
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", str(CONFIGS / "base.ini"), "--out", str(blocker / "sub")]) == EXIT_IO


def test_run_verify_export(tmp_path):
    out = tmp_path / "b"
    assert main(["run", str(CONFIGS / "base.ini"), "--out", str(out)]) == EXIT_OK
    rep = json.loads((out / "report.json").read_text())
    assert rep["summary"]["pass"] and rep["environment"]["lambda_schedule"] == []
    assert main(["verify", str(out / "trace"), "--out", str(tmp_path / "r.json"), "--weak-tests", "10"]) == EXIT_OK
    assert main(["export", str(out / "trace"), "--out", str(tmp_path / "e")]) == EXIT_OK
    assert sorted(p.name for p in (tmp_path / "e" / "fields").iterdir()) == [
        "q0_R.sqgf", "q0_p.sqgf", "q0_u.sqgf", "q0_v.sqgf"]
    head = (tmp_path / "e" / "spectra.csv").read_text().splitlines()[0]
    assert head == "q,field,radius,energy"


def test_scale_study_check_failure(tmp_path):
    code = main(["scale-study", "--lambdas", "64,256", "--quantities", "riemann_rel_error",
                 "--out", str(tmp_path)])
    assert code == EXIT_CHECK
    assert (tmp_path / "scaling_fits.csv").exists()


def _run(cfg, out, threads):
    env = dict(os.environ, SQG_THREADS=str(threads))
    r = subprocess.run([sys.executable, "-m", "sqgci.cli", "run", str(cfg), "--out", str(out)],
                       env=env, capture_output=True, text=True)
    return r.returncode


def test_determinism_base(tmp_path):
    codes = [_run(CONFIGS / "base.ini", tmp_path / f"t{t}", t) for t in (1, 8)]
    assert codes == [EXIT_OK, EXIT_OK]
    a, b = (json.loads((tmp_path / f"t{t}" / "report.json").read_text()) for t in (1, 8))
    a.pop("timestamp"), b.pop("timestamp")
    assert a == b
    assert (tmp_path / "t1" / "trace.npz").read_bytes() == (tmp_path / "t8" / "trace.npz").read_bytes()
