import json
import math
from pathlib import Path

import numpy as np
import pytest

from ouflow.cli import main
from ouflow.csvio import read_ou_path, read_wiener_path, write_ou_path, write_wiener_path
from ouflow import OuPath, TimeGrid, WienerPath


class TestCsvRoundtrip:
    def test_ou_path(self, tmp_path):
        g = TimeGrid(-1.0, 0.1, 21)
        w = OuPath(g, np.sin(g.times()))
        f = tmp_path / "p.csv"
        write_ou_path(w, f)
        assert f.read_text().splitlines()[0] == "t,value"
        back = read_ou_path(f)
        np.testing.assert_array_equal(back.values, w.values)
        assert back.grid.n == g.n
        assert back.grid.dt == pytest.approx(g.dt, rel=1e-15)

    def test_wiener_path(self, tmp_path):
        xs = np.exp(np.linspace(-1, 1, 11))
        th = WienerPath(xs, np.sqrt(xs))
        f = tmp_path / "w.csv"
        write_wiener_path(th, f)
        assert f.read_text().splitlines()[0] == "x,value"
        back = read_wiener_path(f)
        np.testing.assert_array_equal(back.values, th.values)

    def test_bad_header(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("time,val\n0,1\n1,2\n")
        with pytest.raises(ValueError):
            read_ou_path(f)


class TestCommands:
    def test_sample_ou_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["sample-ou", "--t-start", "0", "--dt", "0.1", "--n", "200",
                "--seed", "11"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
        assert meta["seed"] == 11
        assert meta["command"] == "sample-ou"

    def test_env_seed_echoed(self, tmp_path, monkeypatch):
        monkeypatch.setenv("OUFLOW_SEED", "4242")
        out = tmp_path / "p.csv"
        assert main(["sample-ou", "--n", "100", "--out", str(out)]) == 0
        meta = json.loads((tmp_path / "p.csv.meta.json").read_text())
        assert meta["seed"] == 4242

    def test_transform_both_methods(self, tmp_path):
        src = tmp_path / "in.csv"
        g = TimeGrid(-52.0, 0.02, 5201)
        t = g.times()
        write_ou_path(OuPath(g, np.exp(-t * t / 8.0)), src)
        for method in ("spectral", "kernel"):
            out = tmp_path / f"{method}.csv"
            rc = main(["transform", "--u", "0.5", "--method", method,
                       "--in", str(src), "--out", str(out)])
            assert rc == 0
        spec = read_ou_path(tmp_path / "spectral.csv")
        kern = read_ou_path(tmp_path / "kernel.csv")
        j = spec.grid.index_of(kern.grid.t_start)
        mask = np.abs(kern.grid.times()) <= 10
        dev = np.max(np.abs(spec.values[j:j + kern.grid.n] - kern.values)[mask])
        assert dev < 5e-4
        meta = json.loads((tmp_path / "kernel.csv.meta.json").read_text())
        assert "margin" in meta and "tail_bound" in meta

    def test_kernel_table(self, tmp_path):
        out = tmp_path / "k.csv"
        assert main(["kernel", "--u", "0.5", "--x-min", "-2", "--x-max", "2",
                     "--x-step", "0.5", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "x,atom_coeff,pv_coeff,phi"
        # atom column identically 0 at u = 0.5
        atoms = {float(l.split(",")[1]) for l in lines[1:]}
        assert atoms == {math.cos(math.pi * 0.5)}
        # rerun reproduces identical bytes
        out2 = tmp_path / "k2.csv"
        main(["kernel", "--u", "0.5", "--x-min", "-2", "--x-max", "2",
              "--x-step", "0.5", "--out", str(out2)])
        assert out.read_bytes() == out2.read_bytes()

    def test_cov_table(self, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["cov", "--dt-min", "0", "--dt-max", "0.2", "--dt-step", "0.1",
                     "--du-min", "0", "--du-max", "0.2", "--du-step", "0.1",
                     "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "dt,du,cov"
        first = lines[1].split(",")
        assert float(first[2]) == pytest.approx(1.0, abs=1e-8)

    def test_cov_bad_range(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["cov", "--dt-step", "-1", "--out", str(tmp_path / "x.csv")])

    def test_field(self, tmp_path):
        out = tmp_path / "f.csv"
        assert main(["field", "--u-grid", "0,1", "--n", "8", "--seed", "3",
                     "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "u,t,value"
        assert len(lines) == 1 + 2 * 8
        meta = json.loads((tmp_path / "f.csv.meta.json").read_text())
        assert meta["seed"] == 3

    def test_ergodic_flow_report(self, tmp_path):
        out = tmp_path / "e.json"
        assert main(["ergodic", "--u", "0.7", "--n", "256", "--seed", "5",
                     "--obs", "value_square_at_0", "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert set(rep) == {"params", "partial_averages", "final", "std_err_estimate"}
        assert rep["params"]["mode"] == "circular"
        assert "256" in rep["partial_averages"]

    def test_ergodic_translation_report(self, tmp_path):
        out = tmp_path / "e0.json"
        assert main(["ergodic", "--u", "0", "--n", "200", "--seed", "5",
                     "--obs", "value_square_at_0", "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["params"]["mode"] == "translation"

    def test_config_file_and_flag_precedence(self, tmp_path):
        cfgf = tmp_path / "run.cfg"
        cfgf.write_text("n=100\nseed=9\n")
        out = tmp_path / "p.csv"
        assert main(["sample-ou", "--config", str(cfgf), "--seed", "10",
                     "--out", str(out)]) == 0
        meta = json.loads((tmp_path / "p.csv.meta.json").read_text())
        assert meta["n"] == 100     # from config
        assert meta["seed"] == 10   # flag wins

    def test_unknown_config_key_rejected(self, tmp_path):
        cfgf = tmp_path / "run.cfg"
        cfgf.write_text("bogus=1\n")
        with pytest.raises(SystemExit):
            main(["sample-ou", "--config", str(cfgf), "--out", str(tmp_path / "p.csv")])

    def test_unknown_command(self):
        assert main(["frobnicate"]) == 2

    def test_help(self):
        assert main([]) == 2
