import json
import math

import numpy as np
import pytest

from pairent import cli
from pairent.acceptance import CheckResult
from pairent.errors import InvalidModelError


class TestParseGrid:
    def test_linear(self):
        grid = cli.parse_grid("0:3:61")
        assert grid.size == 61
        assert grid[0] == 0.0 and grid[-1] == 3.0

    def test_log(self):
        grid = cli.parse_grid("0.02:3:120:log")
        assert grid.size == 120
        assert grid[0] == pytest.approx(0.02)
        ratios = grid[1:] / grid[:-1]
        assert np.allclose(ratios, ratios[0])

    @pytest.mark.parametrize("bad", ["1:2", "a:b:c", "1:2:3:cubic", "0:3:120:log",
                                     "3:1:10"])
    def test_malformed(self, bad):
        with pytest.raises(InvalidModelError):
            cli.parse_grid(bad)


class TestMeanfieldCommand:
    def test_stdout_csv(self, capsys):
        assert cli.main(["meanfield", "--grid", "0:1:3"]) == 0
        out = capsys.readouterr().out
        lines = [l for l in out.splitlines() if not l.startswith("#")]
        assert lines[0] == "lambda,gap,alc,cond_energy,order_param"
        zero_row = lines[1].split(",")
        assert all(float(x) == 0.0 for x in zero_row)
        unit_row = lines[3].split(",")
        assert float(unit_row[2]) == pytest.approx(0.8509181282393216, abs=1e-15)

    def test_non_uniform_profile_has_nan_cond(self, capsys):
        assert cli.main(["meanfield", "--grid", "1:1:1", "--profile", "tent"]) == 0
        out = capsys.readouterr().out
        row = [l for l in out.splitlines() if not l.startswith("#")][1]
        assert row.split(",")[3] == "nan"

    def test_sub_threshold_policy_a_rows_are_zero(self, capsys):
        # square profile stops pairing below lambda = 2/3 under policy A
        assert cli.main(["meanfield", "--grid", "0.2:0.2:1", "--profile", "square",
                         "--gap-policy", "A"]) == 0
        out = capsys.readouterr().out
        row = [l for l in out.splitlines() if not l.startswith("#")][1].split(",")
        assert float(row[1]) == 0.0 and float(row[2]) == 0.0

    def test_config_file(self, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text("profile=abs\nomega_d=1.0\n")
        assert cli.main(["meanfield", "--grid", "1:1:1", "--config", str(config),
                         "--gap-policy", "B"]) == 0
        out = capsys.readouterr().out
        assert "# profile = abs" in out

    def test_output_file(self, tmp_path):
        target = tmp_path / "mf.csv"
        assert cli.main(["meanfield", "--grid", "0:1:2", "--out", str(target)]) == 0
        assert target.read_text().startswith("#")


class TestSolveCommand:
    def test_both_backends_two_levels(self, capsys):
        assert cli.main(["solve", "--L", "2", "--lambda", "1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["deviation"]["energy_rel"] < 1e-12
        assert payload["deviation"]["occupations_max"] < 1e-12
        for backend in ("exactdiag", "bethe"):
            result = payload["results"][backend]
            assert result["alc"] == pytest.approx(1 / math.sqrt(2), abs=1e-12)
            assert result["energy"] == pytest.approx(-math.sqrt(2), abs=1e-12)

    def test_l12_backends_agree(self, capsys):
        assert cli.main(["solve", "--L", "12", "--lambda", "0.5"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["deviation"]["energy_rel"] < 1e-10
        assert payload["deviation"]["occupations_max"] < 1e-8

    def test_capacity_error_exit_code_and_message(self, capsys):
        code = cli.main(["solve", "--L", "68", "--lambda", "1", "--backend", "ed"])
        assert code == 1
        assert "28453041475240576740" in capsys.readouterr().err

    def test_invalid_choice_exits_2(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["solve", "--L", "4", "--backend", "qmc"])
        assert err.value.code == 2

    def test_missing_size_is_an_error(self, capsys):
        assert cli.main(["solve", "--lambda", "1"]) == 1
        assert "--L" in capsys.readouterr().err

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        config = tmp_path / "spec.cfg"
        config.write_text("L=4\nM=2\nlambda=0.5\n")
        assert cli.main(["solve", "--config", str(config), "--lambda", "1",
                         "--backend", "ed"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["params"]["L"] == 4
        assert payload["params"]["lambda"] == 1.0

    def test_json_written_to_file(self, tmp_path):
        target = tmp_path / "out.json"
        assert cli.main(["solve", "--L", "4", "--lambda", "0.3", "--backend",
                         "bethe", "--out", str(target)]) == 0
        payload = json.loads(target.read_text())
        assert "bethe" in payload["results"]
        assert "exactdiag" not in payload["results"]


@pytest.mark.slow
class TestFigureCommand:
    def test_fig1_five_profiles(self, tmp_path):
        assert cli.main(["figure", "fig1", "--out-dir", str(tmp_path),
                         "--grid", "0:2:9", "--gap-policy", "B"]) == 0
        text = (tmp_path / "fig1.csv").read_text()
        rows = [l.split(",") for l in text.splitlines() if not l.startswith("#")][1:]
        profiles = {r[0] for r in rows}
        assert profiles == {"uniform", "abs", "square", "parabolic", "tent"}
        assert len(rows) == 45

    def test_fig2_series_monotone_and_deterministic(self, tmp_path):
        grid = "0.02:3:40:log"
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert cli.main(["figure", "fig2", "--out-dir", str(out),
                             "--grid", grid]) == 0
        data1 = (out1 / "fig2.csv").read_bytes()
        assert data1 == (out2 / "fig2.csv").read_bytes()
        rows = [l.split(",") for l in data1.decode().splitlines()
                if not l.startswith("#")][1:]
        series = {}
        for name, lam, alc in rows:
            series.setdefault(name, []).append(float(alc))
        assert set(series) == {"thermo", "L2", "L24", "L40", "L68"}
        for name, values in series.items():
            assert all(a < b for a, b in zip(values, values[1:])), name

    def test_fig3_interior_maxima_for_finite_sizes_only(self, tmp_path):
        assert cli.main(["figure", "fig3", "--out-dir", str(tmp_path),
                         "--grid", "0.05:2:35:log"]) == 0
        text = (tmp_path / "fig3_thresholds.csv").read_text()
        rows = [l.split(",") for l in text.splitlines() if not l.startswith("#")][1:]
        flags = {name: boundary for name, _, _, boundary in rows}
        assert flags["thermo"] == "True" and flags["L2"] == "True"
        assert flags["L24"] == "False" and flags["L40"] == "False"
        assert flags["L68"] == "False"
        stars = {name: float(star) for name, star, _, _ in rows}
        assert stars["L24"] > stars["L40"] > stars["L68"]
        curves = (tmp_path / "fig3.csv").read_text()
        header = [l for l in curves.splitlines() if not l.startswith("#")][0]
        assert header == "series,lambda,ln_lambda,ratio"


class TestVerifyCommand:
    def test_exit_codes_from_check_results(self, capsys, monkeypatch):
        from pairent import acceptance

        def fake(newton_tol):
            return [CheckResult(1, "a", True, "ok", 0.01, 1.0)]

        monkeypatch.setattr(acceptance, "run_all", fake)
        assert cli.main(["verify"]) == 0
        assert "PASS" in capsys.readouterr().out

        def fake_fail(newton_tol):
            return [CheckResult(1, "a", True, "ok", 0.01, 1.0),
                    CheckResult(2, "b", False, "bad", 0.01, 1.0)]

        monkeypatch.setattr(acceptance, "run_all", fake_fail)
        assert cli.main(["verify"]) == 1
        out = capsys.readouterr().out
        assert "FAIL" in out and "1/2 checks passed" in out
