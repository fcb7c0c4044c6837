import shutil
import tempfile
import unittest
from pathlib import Path

import numpy as np

from config_loader import PresetLoader, RunConfig, StateSection
from errors import ConfigError, SpinDomainError
from figures import initial_state, knowledge_row, phase_snapshots, reproduce, sweep
from manifest import RunManifest
from results_writer import ResultsWriter

PRESETS_FILE = Path(__file__).resolve().parents[1] / "presets.yaml"
SMALL_GRID = {"output": {"n_alpha": 5, "n_beta": 4}}


class TestInitialState(unittest.TestCase):

    def test_wigner_dicke(self):
        rho = initial_state(StateSection(kind="wigner-dicke", j="3/2", m="1/2"))
        np.testing.assert_allclose(np.diag(rho.entries).real, [0, 1, 0, 0], atol=1e-15)
        with self.assertRaises(SpinDomainError):
            initial_state(StateSection(kind="wigner-dicke", j=1))

    def test_coherent(self):
        rho = initial_state(StateSection(kind="coherent", theta="pi/2"))
        np.testing.assert_allclose(np.diag(rho.entries).real, [0.5, 0.5], atol=1e-14)

    def test_four_level(self):
        section = StateSection(
            kind="four-level", j="3/2", r_alpha=0.5, r_beta=0.5, r_gamma=0.5, r_delta=0.5, theta_beta="pi"
        )
        self.assertAlmostEqual(initial_state(section).purity(), 1.0, places=12)
        with self.assertRaises(SpinDomainError):
            initial_state(StateSection(kind="four-level", j="3/2", r_alpha=1.0))
        with self.assertRaises(SpinDomainError):
            initial_state(StateSection(kind="four-level", j="1/2", r_alpha=0.5, r_beta=0.5, r_gamma=0.5, r_delta=0.5))

    def test_mixed(self):
        rho = initial_state(StateSection(kind="mixed", j=1))
        np.testing.assert_allclose(rho.entries, np.eye(3) / 3, atol=1e-15)


class TestSweeps(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.presets = PresetLoader().load_presets(PRESETS_FILE)

    def test_deleter_drives_knowledge_to_one(self):
        run = self.presets["deleter"].run_config({"output": {"n_times": 41}})
        columns = sweep(run)
        r_s = np.asarray(columns["r_s"])
        self.assertAlmostEqual(r_s[0], 0.0, places=12)
        self.assertTrue(np.all(np.diff(r_s) >= -1e-12))
        self.assertGreater(r_s[-1], 0.95)
        np.testing.assert_allclose(columns["r_phi"], 0.0, atol=1e-12)

    def test_phase_damping_keeps_number_knowledge(self):
        run = self.presets["fig2"].run_config({"output": {"n_times": 11}})
        columns = sweep(run)
        self.assertEqual(list(columns), ["t", "r_m", "r_phi", "r_s", "p_up"])
        r_m = np.asarray(columns["r_m"])
        np.testing.assert_allclose(r_m, r_m[0], atol=1e-12)
        self.assertTrue(np.all(np.diff(columns["r_phi"]) <= 1e-12))

    def test_noiseless_row(self):
        run = RunConfig.from_layers({"search": {"mu": 4.085}})
        row = knowledge_row(run, np.pi / 2, 0.0, 0.0)
        self.assertAlmostEqual(row["r_phi"], 0.245, delta=0.005)
        self.assertAlmostEqual(row["mu_r_phi"], 4.085 * row["r_phi"], places=12)
        self.assertAlmostEqual(row["p_up"], 0.5, places=12)

    def test_squeezed_vacuum_erases_phase_knowledge(self):
        run = self.presets["fig4b"].run_config({"output": {"n_alpha": 7, "n_times": 11}})
        columns = sweep(run)
        r_phi = np.asarray(columns["r_phi"]).reshape(7, 11)
        for row in r_phi:
            self.assertTrue(np.all(np.diff(row) <= 1e-12))
            self.assertLess(row[-1], 1e-3)
        self.assertAlmostEqual(r_phi[:, 0].max(), 0.245, delta=0.005)

    def test_alpha_beta_surface_shape(self):
        run = self.presets["fig3a"].run_config(SMALL_GRID)
        columns = sweep(run)
        self.assertEqual(len(columns["alpha_p"]), 20)
        self.assertTrue(all(t == 0.1 for t in columns["t"]))

    def test_phase_snapshots(self):
        run = self.presets["fig2"].run_config({"output": {"n_times": 3, "snapshots": 16}})
        columns = phase_snapshots(run)
        self.assertEqual(len(columns["density"]), 48)
        density = np.asarray(columns["density"]).reshape(3, 16)
        np.testing.assert_allclose(density.sum(axis=1) * 2 * np.pi / 16, 1.0, atol=1e-12)


class TestReproduce(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.presets = PresetLoader().load_presets(PRESETS_FILE)

    def setUp(self):
        self.test_dir = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def test_fig1_curve(self):
        writer = ResultsWriter(self.test_dir)
        reproduce("fig1", self.presets, writer)
        frame = writer.read_table("fig1/fig1.csv", ["alpha_p", "r_phi", "r_m", "r_t", "r_s"])
        self.assertEqual(len(frame), 181)
        self.assertAlmostEqual(frame["r_phi"].max(), 0.245, delta=0.005)
        self.assertAlmostEqual(frame["alpha_p"][frame["r_phi"].idxmax()], np.pi / 2, delta=0.02)

    def test_squeezing_only_changes_bath_entries(self):
        writer = ResultsWriter(self.test_dir)
        reproduce("fig3a", self.presets, writer, SMALL_GRID)
        reproduce("fig3b", self.presets, writer, SMALL_GRID)

        def stripped(figure):
            entries = RunManifest.read(self.test_dir / figure / "manifest.txt")
            return {key.split(".", 1)[1]: value for key, value in entries.items() if "." in key}

        a, b = stripped("fig3a"), stripped("fig3b")
        self.assertEqual(set(a), set(b))
        self.assertEqual({key for key in a if a[key] != b[key]}, {"bath.r", "bath.phi"})

    def test_reruns_are_byte_identical(self):
        outputs = []
        for name in ("first", "second"):
            paths = reproduce("fig3b", self.presets, ResultsWriter(self.test_dir / name), SMALL_GRID)
            outputs.append([path.read_bytes() for path in paths])
        self.assertEqual(outputs[0], outputs[1])

    def test_unknown_figure(self):
        with self.assertRaises(ConfigError):
            reproduce("fig9", self.presets, ResultsWriter(self.test_dir))


if __name__ == '__main__':
    unittest.main()
