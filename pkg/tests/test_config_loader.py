import shutil
import tempfile
import unittest
from pathlib import Path

import numpy as np

from config import settings
from config_loader import (
    OBSERVABLES,
    PresetLoader,
    RunConfig,
    load_run_config,
)
from errors import ConfigError

PRESETS_FILE = Path(__file__).resolve().parents[1] / "presets.yaml"


class TestPresetLoader(unittest.TestCase):

    def setUp(self):
        self.test_dir = Path(tempfile.mkdtemp())
        self.loader = PresetLoader()

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def write(self, text):
        path = self.test_dir / "presets.yaml"
        path.write_text(text, encoding="utf-8")
        return path

    def test_shipped_presets_load(self):
        presets = self.loader.load_presets(PRESETS_FILE)
        self.assertIn("fig2", presets)
        self.assertEqual(presets["deleter"].figure, "fig4a")
        self.assertEqual(
            {p.figure for p in presets.values()},
            {"fig1", "fig2", "fig3a", "fig3b", "fig4a", "fig4b"},
        )
        fig2 = presets["fig2"].run_config()
        self.assertEqual(fig2.bath.channel, "pd")
        self.assertAlmostEqual(fig2.state.theta, np.pi / 2, places=14)
        self.assertEqual(fig2.output.observables, ["r_m", "r_phi", "r_s", "p_up"])
        fig3b = presets["fig3b"].run_config()
        self.assertAlmostEqual(fig3b.bath.phi, np.pi / 8, places=14)

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            self.loader.load_presets(self.test_dir / "absent.yaml")

    def test_malformed_yaml(self):
        path = self.write("- name: [unclosed\n")
        with self.assertRaises(ValueError):
            self.loader.load_presets(path)

    def test_not_a_list(self):
        with self.assertRaises(ValueError):
            self.loader.load_presets(self.write("name: fig1\n"))

    def test_unknown_preset_key(self):
        path = self.write("- name: x\n  figure: x\n  colour: red\n")
        with self.assertRaises(ValueError):
            self.loader.load_presets(path)

    def test_invalid_preset_values(self):
        path = self.write("- name: x\n  figure: x\n  bath:\n    channel: amplitude\n")
        with self.assertRaises(ConfigError):
            self.loader.load_presets(path)


class TestRunConfig(unittest.TestCase):

    def test_defaults(self):
        run = RunConfig.from_layers()
        self.assertEqual(run.state.kind, "coherent")
        self.assertIsNone(run.bath.channel)
        self.assertEqual(run.search.mu, settings.mu_qubit)
        self.assertEqual(tuple(run.output.observables), OBSERVABLES)

    def test_later_layers_win(self):
        preset = {"state": {"theta": "pi/4", "phi": 0.1}, "bath": {"channel": "sgad", "gamma0": 0.01}}
        file_layer = {"state": {"phi": "pi/2"}, "bath": {"gamma0": 0.05}}
        flags = {"bath": {"gamma0": 0.1, "r": None}}
        run = RunConfig.from_layers(preset, file_layer, flags)
        self.assertAlmostEqual(run.state.theta, np.pi / 4, places=14)
        self.assertAlmostEqual(run.state.phi, np.pi / 2, places=14)
        self.assertEqual(run.bath.gamma0, 0.1)
        self.assertEqual(run.bath.r, 0.0)

    def test_unknown_section(self):
        with self.assertRaises(ConfigError):
            RunConfig.from_layers({"plot": {"colour": "red"}})

    def test_invalid_values(self):
        with self.assertRaises(ConfigError):
            RunConfig.from_layers({"bath": {"temperature": -1}})
        with self.assertRaises(ConfigError):
            RunConfig.from_layers({"state": {"bogus": 1}})
        with self.assertRaises(ConfigError):
            RunConfig.from_layers({"output": {"observables": "r_m,entropy"}})

    def test_spin_values(self):
        run = RunConfig.from_layers({"state": {"kind": "wigner-dicke", "j": "3/2", "m": "-1/2"}})
        self.assertEqual(run.state.j, 1.5)
        self.assertEqual(run.state.m, -0.5)
        with self.assertRaises(ConfigError):
            RunConfig.from_layers({"state": {"j": "1/3"}})

    def test_search_config(self):
        run = RunConfig.from_layers({"search": {"system": "spin32", "grid_density": 24, "seed": 7}})
        cfg = run.search.search_config()
        self.assertEqual(cfg.grid_density, 24)
        self.assertEqual(cfg.seed, 7)
        self.assertEqual(cfg.n_quad, settings.n_quad)


class TestRunFile(unittest.TestCase):

    def setUp(self):
        self.test_dir = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def write(self, text):
        path = self.test_dir / "run.cfg"
        path.write_text(text, encoding="utf-8")
        return path

    def test_sections(self):
        path = self.write("[state]\nkind = coherent\ntheta = pi/2\n\n[bath]\nchannel = pd\ngamma0 = 0.025\n")
        sections = load_run_config(path)
        self.assertEqual(sections["state"]["theta"], "pi/2")
        run = RunConfig.from_layers(sections)
        self.assertEqual(run.bath.gamma0, 0.025)

    def test_unknown_key(self):
        with self.assertRaises(ConfigError):
            load_run_config(self.write("[bath]\ncolour = red\n"))

    def test_unknown_section(self):
        with self.assertRaises(ConfigError):
            load_run_config(self.write("[plot]\nwidth = 3\n"))

    def test_malformed(self):
        with self.assertRaises(ConfigError):
            load_run_config(self.write("theta = 1\n"))


if __name__ == '__main__':
    unittest.main()
