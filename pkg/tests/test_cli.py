import json

from schwingersim.cli import main
from schwingersim.compiler import circuit_from_text, circuit_unitary, compile_step
from schwingersim.model import ModelParams, build_model
from schwingersim.pauli import spectral_norm
from schwingersim.trotter import Ordering


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def read_csv_body(path):
    return [line for line in path.read_text().splitlines() if not line.startswith("#")]


class TestEvolveCommand:
    def test_writes_all_variants_with_shots(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "model": {"n_sites": 2, "x": 0.6, "mu": 0.1},
                "plan": {"ordering": "oe1", "p": 1, "dt": 0.5, "steps": 6},
                "projections": "allowed",
            },
        )
        out = tmp_path / "run"
        assert main(["evolve", "--config", cfg, "--out", str(out), "--seed", "3", "--shots", "500"]) == 0
        for variant in ("exact", "trotter", "sampled", "postselected"):
            body = read_csv_body(out / f"observables_{variant}.csv")
            assert body[0] == "time,p_vac,nu,q_1,q_2,leakage"
            assert len(body) == 1 + 7  # header plus steps+1 rows
            assert (out / f"projections_{variant}.csv").exists()
        assert (out / "evolve.png").exists()
        assert (out / "model.json").exists()
        resolved = json.loads((out / "config_resolved.json").read_text())
        assert resolved["seed"] == 3 and resolved["shots"] == 500

    def test_time_instead_of_steps(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {"model": {"n_sites": 2}, "plan": {"dt": 0.5, "time": 2.0}},
        )
        out = tmp_path / "run"
        assert main(["evolve", "--config", cfg, "--out", str(out)]) == 0
        body = read_csv_body(out / "observables_trotter.csv")
        assert len(body) == 1 + 5

    def test_byte_deterministic(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "model": {"n_sites": 4},
                "plan": {"ordering": "xyz", "dt": 1.0, "steps": 4, "protection": {"random": 7}},
            },
        )
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert main(["evolve", "--config", cfg, "--out", str(out), "--seed", "9", "--shots", "200"]) == 0
        for name in (
            "observables_trotter.csv",
            "observables_sampled.csv",
            "observables_postselected.csv",
            "config_resolved.json",
            "model.json",
            "evolve.png",
        ):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_defaults_without_config(self, tmp_path):
        out = tmp_path / "run"
        assert main(["evolve", "--out", str(out)]) == 0
        resolved = json.loads((out / "config_resolved.json").read_text())
        assert resolved["model"] == {"n_sites": 4, "x": 0.6, "mu": 0.1}


class TestErrorExits:
    def test_missing_config_file(self, tmp_path):
        assert main(["evolve", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")]) == 2

    def test_invalid_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["evolve", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2

    def test_odd_sites(self, tmp_path):
        cfg = write_config(tmp_path, {"model": {"n_sites": 3}})
        assert main(["evolve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_non_integral_time(self, tmp_path):
        cfg = write_config(tmp_path, {"model": {"n_sites": 2}, "plan": {"dt": 0.4, "time": 1.0}})
        assert main(["evolve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_bad_dt_values(self, tmp_path):
        for dt in (0, -0.5, "soon"):
            cfg = write_config(tmp_path, {"model": {"n_sites": 2}, "plan": {"dt": dt}})
            assert main(["evolve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_bad_epsilon_and_grid(self, tmp_path):
        cfg = write_config(tmp_path, {"n_list": [4], "epsilon": "tiny"})
        assert main(["bounds", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        cfg = write_config(tmp_path, {"model": {"n_sites": 4}, "t_list": [1], "grid_points": 10})
        assert main(["alpha-sweep", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_dense_limit_exceeded(self, tmp_path):
        cfg = write_config(tmp_path, {"model": {"n_sites": 14}})
        assert main(["evolve", "--config", cfg, "--out", str(tmp_path / "o")]) == 3

    def test_odd_n_in_bounds_list(self, tmp_path):
        cfg = write_config(tmp_path, {"n_list": [4, 5]})
        assert main(["bounds", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_unsupported_compile_ordering(self, tmp_path):
        cfg = write_config(tmp_path, {"model": {"n_sites": 4}, "plan": {"ordering": "xyz"}})
        assert main(["compile", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


class TestBoundsCommand:
    def test_single_size_counts_only(self, tmp_path):
        cfg = write_config(tmp_path, {"n_list": [4], "epsilon": 0.01, "p": 2})
        out = tmp_path / "run"
        assert main(["bounds", "--config", cfg, "--out", str(out)]) == 0
        body = read_csv_body(out / "bounds.csv")
        assert body[0] == "N,t,epsilon,method,steps,two_qubit_gates"
        assert len(body) == 1 + 3  # three methods, one size, no fit
        assert json.loads((out / "bounds_fit.json").read_text()) == []
        assert (out / "bounds.png").exists()

    def test_huge_epsilon_gives_single_steps(self, tmp_path):
        cfg = write_config(tmp_path, {"n_list": [4, 6], "epsilon": 2.0})
        out = tmp_path / "run"
        assert main(["bounds", "--config", cfg, "--out", str(out)]) == 0
        for line in read_csv_body(out / "bounds.csv")[1:]:
            if "empirical" in line:
                assert line.split(",")[4] == "1"


class TestAlphaSweepCommand:
    def test_rows_and_curves(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "model": {"n_sites": 4},
                "plan": {"dt": 1.0},
                "t_list": [1, 2],
                "grid_points": 1024,
                "sweep_curves": True,
            },
        )
        out = tmp_path / "run"
        assert main(["alpha-sweep", "--config", cfg, "--out", str(out)]) == 0
        body = read_csv_body(out / "alpha_sweep.csv")
        assert body[0] == "t,alpha1,leakage"
        assert len(body) == 3
        assert (out / "alpha_curve_t1.csv").exists()
        assert (out / "alpha_curve_t2.csv").exists()
        # t = 1: flat in alpha, smallest angle wins
        t1 = body[1].split(",")
        assert float(t1[1]) == 0.0

    def test_empty_t_list_header_only(self, tmp_path):
        cfg = write_config(tmp_path, {"model": {"n_sites": 4}, "t_list": []})
        out = tmp_path / "run"
        assert main(["alpha-sweep", "--config", cfg, "--out", str(out)]) == 0
        assert read_csv_body(out / "alpha_sweep.csv") == ["t,alpha1,leakage"]


class TestCompileCommand:
    def test_counts_and_round_trip(self, tmp_path):
        cfg = write_config(
            tmp_path, {"model": {"n_sites": 6}, "plan": {"ordering": "oe1", "dt": 1.0}}
        )
        out = tmp_path / "run"
        assert main(["compile", "--config", cfg, "--out", str(out)]) == 0
        doc = json.loads((out / "gate_counts.json").read_text())
        assert doc["counts"] == {"xx": 20, "r": 12, "z": 26}
        assert doc["verification_deviation"] < 1e-9
        rebuilt = circuit_from_text((out / "circuit.txt").read_text())
        reference = compile_step(build_model(ModelParams(6, 0.6, 0.1)), Ordering.OE1, 1.0)
        assert spectral_norm(circuit_unitary(rebuilt) - circuit_unitary(reference)) < 1e-12
