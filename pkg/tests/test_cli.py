import json

import numpy as np
import pytest

from cpchain.cli import PRESETS, load_config, main


def run_cli(args):
    return main(args)


class TestConfig:
    def test_presets_resolve(self, tmp_path):
        for name in PRESETS:
            cfg = load_config(name, None, [], str(tmp_path))
            assert cfg.geometry.n >= 1
            assert cfg.medium.plasma_frequency > 0

    def test_missing_surface_distance_names_field(self, tmp_path):
        overrides = ["medium.plasma_frequency=1e16", "medium.loss_rate=1e14",
                     "emitter.lambda0=700e-9", "emitter.lifetime=1e-9",
                     "geometry.n=2", "geometry.x0=1e-9"]
        with pytest.raises(Exception) as info:
            load_config(None, None, overrides, str(tmp_path))
        assert "geometry.z0" in str(info.value)

    def test_exclusive_emitter_fields(self, tmp_path):
        overrides = ["medium.plasma_frequency=1e16", "medium.loss_rate=1e14",
                     "emitter.lambda0=700e-9", "emitter.omega0=1e15",
                     "emitter.lifetime=1e-9",
                     "geometry.n=2", "geometry.x0=1e-9", "geometry.z0=1e-8"]
        with pytest.raises(Exception) as info:
            load_config(None, None, overrides, str(tmp_path))
        assert "exactly one" in str(info.value)

    def test_ini_file_roundtrip(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text(
            "[medium]\nplasma_frequency = 1.36e16\nloss_rate = 1.04e14\n"
            "[emitter]\nlambda0 = 700e-9\nlifetime = 1e-9\n"
            "[geometry]\nn = 2\nx0_k0 = 0.1\nz0_k0 = 0.05\n")
        cfg = load_config(None, str(ini), [], str(tmp_path))
        assert cfg.geometry.z0_k0 == pytest.approx(0.05)
        assert cfg.config_hash() == load_config(
            None, str(ini), [], str(tmp_path)).config_hash()

    def test_unknown_preset_is_config_error(self, tmp_path):
        code = run_cli(["coeffs", "--preset", "fig2-gold",
                        "--set", "bogus", "--out", str(tmp_path)])
        assert code == 2


class TestCoeffsCommand:
    def test_gold_report_values(self, tmp_path, capsys):
        code = run_cli(["coeffs", "--preset", "fig2-gold",
                        "--out", str(tmp_path)])
        assert code == 0
        blob = json.loads((tmp_path / "couplings.json").read_text())
        # surface-enhanced single-emitter rate ~ 1.3e3 at k0 z0 = 0.01
        assert 1.1e3 < blob["gamma_sc"][0][0] < 1.5e3
        assert blob["config_hash"]
        assert blob["units"]["rates_and_shifts"] == "Gamma0"

    def test_vacuum_medium_zeroes_scattering(self, tmp_path):
        code = run_cli(["coeffs", "--preset", "fig2-gold",
                        "--set", "medium.plasma_frequency=0",
                        "--set", "medium.loss_rate=0",
                        "--out", str(tmp_path)])
        assert code == 0
        blob = json.loads((tmp_path / "couplings.json").read_text())
        assert np.abs(np.array(blob["gamma_sc"])).max() == 0.0
        assert np.abs(np.array(blob["omega_minus"])).max() == 0.0

    def test_missing_field_exits_2(self, tmp_path):
        code = run_cli(["coeffs",
                        "--set", "medium.plasma_frequency=1e16",
                        "--out", str(tmp_path)])
        assert code == 2


class TestMapCommand:
    def test_small_map_reproducible(self, tmp_path):
        args = ["map", "--preset", "fig2-gold",
                "--set", "map.x0_k0_grid=1e-4,0.5",
                "--set", "map.z0_k0_grid=0.02,0.1"]
        assert run_cli(args + ["--out", str(tmp_path / "a")]) == 0
        assert run_cli(args + ["--out", str(tmp_path / "b")]) == 0
        a = (tmp_path / "a" / "force_map.csv").read_bytes()
        b = (tmp_path / "b" / "force_map.csv").read_bytes()
        assert a == b
        sidecar = json.loads(
            (tmp_path / "a" / "force_map.config.json").read_text())
        assert sidecar["config_hash"] in a.decode()

    def test_empty_grid_exits_2(self, tmp_path):
        code = run_cli(["map", "--preset", "fig2-gold",
                        "--set", "map.x0_k0_grid=", "--out", str(tmp_path)])
        assert code == 2


class TestDynamicsCommand:
    def test_two_emitter_run(self, tmp_path):
        code = run_cli(["dynamics", "--preset", "fig3-siv",
                        "--set", "geometry.n=2",
                        "--set", "evolution.t_end=0.2",
                        "--set", "evolution.dt=5e-4",
                        "--set", "evolution.n_outputs=21",
                        "--out", str(tmp_path)])
        assert code == 0
        lines = (tmp_path / "dynamics.csv").read_text().splitlines()
        assert lines[1].split(",") == ["t_s", "t_gamma0", "F_total_natural",
                                       "F_total_N", "boost_N", "excitation",
                                       "trace_err"]
        last = lines[-1].split(",")
        assert float(last[6]) < 1e-8  # trace drift column

    def test_single_emitter_zero_boost_column(self, tmp_path):
        code = run_cli(["dynamics", "--preset", "fig3-siv",
                        "--set", "geometry.n=1",
                        "--set", "evolution.t_end=0.2",
                        "--set", "evolution.dt=5e-4",
                        "--out", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "dynamics.csv").read_text().splitlines()[2:]
        boost = [float(r.split(",")[4]) for r in rows]
        assert max(abs(b) for b in boost) == 0.0

    def test_emitter_cap_exits_3(self, tmp_path):
        code = run_cli(["dynamics", "--preset", "fig3-siv",
                        "--set", "geometry.n=13", "--out", str(tmp_path)])
        assert code == 3


class TestSubradiantCommand:
    def test_odd_emitter_count_rejected(self, tmp_path):
        code = run_cli(["subradiant", "--preset", "fig2-gold",
                        "--set", "geometry.n=3", "--out", str(tmp_path)])
        assert code == 2

    def test_two_emitter_column_matches_special_state(self, tmp_path):
        code = run_cli(["subradiant", "--preset", "fig2-gold",
                        "--set", "subradiant.x0_k0_grid=0.3",
                        "--set", "geometry.z0_k0=0.05",
                        "--out", str(tmp_path)])
        assert code == 0
        lines = (tmp_path / "subradiant.csv").read_text().splitlines()
        header = lines[1].split(",")
        assert header == ["x0_k0", "F_state_1", "F_g", "F_e"]
        from cpchain import special_state_forces
        from cpchain.coeffs import EmitterParams, Geometry
        from cpchain.media import Medium
        em = EmitterParams.from_wavelength(700e-9, lifetime=1e-9)
        geo = Geometry.from_dimensionless(2, 0.3, 0.05, em.k0)
        sf = special_state_forces(geo, Medium.gold(), em)
        row = [float(v) for v in lines[2].split(",")]
        assert row[1] == pytest.approx(sf.f_sub, rel=1e-6)
        assert row[2] == pytest.approx(sf.f_ground, rel=1e-6)

    def test_six_emitter_five_columns(self, tmp_path):
        code = run_cli(["subradiant", "--preset", "fig2-gold",
                        "--set", "geometry.n=6",
                        "--set", "geometry.z0_k0=0.1",
                        "--set", "subradiant.x0_k0_grid=0.05",
                        "--out", str(tmp_path)])
        assert code == 0
        lines = (tmp_path / "subradiant.csv").read_text().splitlines()
        assert len(lines[1].split(",")) == 1 + 5 + 2
