import json

import numpy as np
import pytest

import config_manager
import verify
from config_manager import ConfigManager
from main import main
from output_writer import read_csv

CHAIN = {"lattice": {"extent": [32]}, "sweep": {"range": [1, 16]}}


def run(*argv):
    return main([str(a) for a in argv])


class TestSpectrum:
    def test_local_hopping_is_cosine(self, write_config, tmp_path):
        out = tmp_path / "spectrum.csv"
        config = write_config({"lattice": {"extent": [8]}, "model": {"kind": "LocalHopping"}})
        assert run("spectrum", config, "--out", out) == 0
        table = read_csv(out)
        assert table["columns"] == ["n", "k", "E"]
        values = np.array(table["rows"], dtype=float)
        assert len(values) == 8
        np.testing.assert_allclose(values[:, 2], np.cos(values[:, 1]), atol=1e-10)
        assert any(c.startswith("fermi_points") for c in table["comments"])

    def test_local_pairing_is_flat(self, write_config, tmp_path):
        out = tmp_path / "spectrum.csv"
        config = write_config({"lattice": {"extent": [100]}, "model": {"kind": "LocalPairing"}})
        assert run("spectrum", config, "--out", out) == 0
        table = read_csv(out)
        assert table["columns"] == ["n", "k", "E_plus", "E_minus"]
        values = np.array(table["rows"], dtype=float)
        assert len(values) == 100
        np.testing.assert_allclose(values[:, 2], 1.0, atol=1e-10)
        np.testing.assert_allclose(values[:, 3], -1.0, atol=1e-10)

    def test_square_lattice_columns(self, write_config, tmp_path):
        out = tmp_path / "spectrum.csv"
        config = write_config({"lattice": {"extent": [4, 4]}, "model": {"kind": "CompactSin", "alpha": 2}})
        assert run("spectrum", config, "--out", out) == 0
        table = read_csv(out)
        assert table["columns"] == ["n1", "n2", "k1", "k2", "E"]
        assert len(table["rows"]) == 16


class TestSweep:
    def test_fits_crossover_and_plot(self, write_config, tmp_path, capsys):
        out, plot = tmp_path / "sweep.csv", tmp_path / "sweep.svg"
        config = write_config({**CHAIN, "models": [{"kind": "LocalHopping"}, {"kind": "CompactCos", "alpha": 4}],
                               "fits": [{"form": "log1d", "window": [2, 8]}], "crossover": True})
        assert run("sweep", config, "--out", out, "--plot", plot) == 0
        table = read_csv(out)
        assert table["columns"] == ["curve", "L", "S"]
        assert len(table["rows"]) == 32
        assert sum(c.startswith("fit ") for c in table["comments"]) == 2
        assert sum(c.startswith("crossover ") for c in table["comments"]) == 1
        assert "units: nats" in table["comments"]
        assert plot.exists()
        assert "crossover curve='CompactCos alpha=4'" in capsys.readouterr().out

    def test_bits(self, write_config, tmp_path):
        nats, bits = tmp_path / "nats.csv", tmp_path / "bits.csv"
        config = write_config({**CHAIN, "model": {"kind": "LocalHopping"}})
        assert run("sweep", config, "--out", nats, "--no-fit") == 0
        assert run("sweep", config, "--out", bits, "--bits") == 0
        S_nats = np.array(read_csv(nats)["rows"], dtype=float)[:, 1]
        S_bits = np.array(read_csv(bits)["rows"], dtype=float)[:, 1]
        np.testing.assert_allclose(S_bits, S_nats / np.log(2.0), rtol=1e-10)

    def test_overrides_from_command_line(self, write_config, tmp_path):
        out = tmp_path / "sweep.csv"
        config = write_config({**CHAIN, "model": {"kind": "CompactCos", "alpha": 4}})
        assert run("sweep", config, "--out", out, "--extent", "24", "--set", "sweep.range=[1,3]") == 0
        table = read_csv(out)
        assert [row[0] for row in table["rows"]] == ["1", "2", "3"]
        assert any('"extent": [' in c for c in table["comments"])

    def test_empty_sweep(self, write_config, tmp_path):
        config = write_config({"lattice": {"extent": [32]}, "model": {"kind": "LocalHopping"}})
        assert run("sweep", config, "--out", tmp_path / "x.csv") == 1

    def test_missing_lattice(self, write_config, tmp_path):
        config = write_config({"model": {"kind": "LocalHopping"}, "sweep": [1, 2]})
        assert run("sweep", config, "--out", tmp_path / "x.csv") == 1

    def test_incompatible_model(self, write_config, tmp_path, capsys):
        config = write_config({"lattice": {"extent": [8, 8]}, "model": {"kind": "CompactCos"}, "sweep": [1]})
        assert run("sweep", config, "--out", tmp_path / "x.csv") == 1
        assert capsys.readouterr().err.startswith("Error:")


class TestHolo:
    def test_configured_params(self, write_config, tmp_path):
        out = tmp_path / "holo.csv"
        config = write_config({**CHAIN, "model": {"kind": "CompactCos", "alpha": 4},
                               "holography": {"params": {"alpha_c": 4, "a": 0.5, "b": 0.5}, "fit": False}})
        plot = tmp_path / "holo"
        assert run("holo", config, "--out", out, "--plot", plot) == 0
        assert (tmp_path / "holo.svg").exists()
        table = read_csv(out)
        assert table["columns"] == ["L", "S_lattice", "S_holographic", "residual"]
        assert "alpha_c: 4" in table["comments"]
        assert "params_source: config" in table["comments"]
        values = np.array(table["rows"], dtype=float)
        np.testing.assert_allclose(values[:, 1] - values[:, 2], values[:, 3], atol=1e-10)

    def test_no_fit_needs_params(self, write_config, tmp_path):
        config = write_config({**CHAIN, "model": {"kind": "CompactCos", "alpha": 4}})
        assert run("holo", config, "--no-fit", "--out", tmp_path / "x.csv") == 1

    def test_empty_sweep(self, write_config, tmp_path):
        config = write_config({"lattice": {"extent": [32]}, "model": {"kind": "CompactCos", "alpha": 4}})
        assert run("holo", config, "--out", tmp_path / "x.csv") == 1


class TestVerify:
    def test_selected_checks_pass(self, capsys):
        assert run("verify", "--only", "operator_duality", "--only", "f0_reduction") == 0
        out = capsys.readouterr().out
        assert "2 of 2 checks passed" in out

    def test_injected_tolerance_fails(self, capsys):
        assert run("verify", "--only", "f0_reduction", "--inject-tolerance", "f0_reduction=-1") == 2
        captured = capsys.readouterr()
        assert "FAIL  f0_reduction" in captured.out
        assert "f0_reduction" in captured.err

    def test_raising_check_is_reported(self, monkeypatch, capsys):
        def broken(ctx):
            raise FloatingPointError("overflow in symbol")

        monkeypatch.setitem(verify.CHECKS, "operator_duality", broken)
        assert run("verify", "--only", "operator_duality", "--only", "f0_reduction") == 2
        out = capsys.readouterr().out
        assert "FAIL  operator_duality" in out
        assert "FloatingPointError: overflow in symbol" in out
        assert "PASS  f0_reduction" in out
        assert "1 of 2 checks passed" in out

    def test_config_sets_size(self, write_config, capsys):
        config = write_config({"lattice": {"extent": [64]}, "model": {"kind": "LocalHopping"}})
        assert run("verify", config, "--only", "complementarity") == 0

    @pytest.mark.parametrize("argv", [
        ["verify", "--only", "nonsense"],
        ["verify", "--inject-tolerance", "f0_reduction"],
        ["verify", "--inject-tolerance", "f0_reduction=tiny"],
    ])
    def test_usage_errors(self, argv):
        assert run(*argv) == 1


class TestParser:
    def test_unknown_flag(self):
        assert run("sweep", "pairing", "--frobnicate") == 1

    def test_missing_command(self):
        assert run() == 1

    def test_recipes(self, capsys):
        assert run("recipes") == 0
        out = capsys.readouterr().out
        assert "crossover" in out
        assert "holographic" in out


class TestSettings:
    @pytest.fixture
    def manager(self, tmp_path, monkeypatch):
        manager = ConfigManager(str(tmp_path / "settings.json"))
        monkeypatch.setattr(config_manager, "_config_manager", manager)
        return manager

    def test_show(self, manager, capsys):
        assert run("settings") == 0
        shown = json.loads(capsys.readouterr().out)
        assert shown["run"]["multiplet_policy"] == "whole"

    def test_store_and_reset(self, manager, tmp_path, capsys):
        assert run("settings", "--set", "run.workers=2", "--set", "output.bits=true") == 0
        stored = json.loads((tmp_path / "settings.json").read_text())
        assert stored["run"]["workers"] == 2
        assert stored["output"]["bits"] is True
        assert run("settings", "--reset") == 0
        assert manager.get("run", "workers") == 1

    def test_stored_settings_reach_sweeps(self, manager, write_config, tmp_path):
        manager.update(["output.bits=true"])
        out = tmp_path / "sweep.csv"
        config = write_config({**CHAIN, "model": {"kind": "LocalHopping"}})
        assert run("sweep", config, "--out", out) == 0
        assert "units: bits" in read_csv(out)["comments"]

    def test_bad_setting(self, manager):
        assert run("settings", "--set", "lattice.extent=[8]") == 1
