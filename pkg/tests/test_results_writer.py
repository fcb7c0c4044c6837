import json
import shutil
import tempfile
import unittest
from pathlib import Path

from manifest import RunManifest
from results_writer import ResultsWriter


class TestResultsWriter(unittest.TestCase):

    def setUp(self):
        self.test_dir = Path(tempfile.mkdtemp())
        self.writer = ResultsWriter(self.test_dir)

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def test_table_read_back(self):
        path = self.writer.write_table("sub/table.csv", {"t": [0.0, 0.5], "r_m": [1.0, 0.123456789123]})
        self.assertTrue(path.exists())
        self.assertEqual(path.read_text().splitlines()[0], "t,r_m")
        frame = self.writer.read_table("sub/table.csv", ["t", "r_m"])
        self.assertEqual(len(frame), 2)
        self.assertAlmostEqual(frame["r_m"][1], 0.123456789, places=9)

    def test_missing_column(self):
        self.writer.write_table("table.csv", {"t": [0.0]})
        with self.assertRaises(ValueError):
            self.writer.read_table("table.csv", ["t", "r_phi"])

    def test_non_numeric_column(self):
        self.writer.write_table("records.csv", {"kind": ["qubit_mu"], "value": [4.08]})
        with self.assertRaises(ValueError):
            self.writer.read_table("records.csv", ["kind"])

    def test_json(self):
        path = self.writer.write_json("bound.json", {"value": 4.085, "kind": "qubit_mu"})
        self.assertEqual(json.loads(path.read_text())["kind"], "qubit_mu")


class TestRunManifest(unittest.TestCase):

    def setUp(self):
        self.test_dir = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def test_sorted_and_repeatable(self):
        contents = []
        for _ in range(2):
            manifest = RunManifest(self.test_dir / "manifest.txt")
            manifest.record_section("bath", {"r": 0.5, "channel": "sgad", "omega_c": None})
            manifest.record("command", "evolve  --preset\nfig2")
            contents.append(manifest.write().read_text())
        self.assertEqual(contents[0], contents[1])
        self.assertEqual(
            contents[0].splitlines(), ["bath.channel=sgad", "bath.r=0.5", "command=evolve --preset fig2"]
        )
        self.assertEqual(RunManifest.read(self.test_dir / "manifest.txt")["bath.r"], "0.5")

    def test_stamp_is_opt_in(self):
        manifest = RunManifest(self.test_dir / "manifest.txt")
        manifest.write(stamp=True)
        self.assertIn("created_utc", RunManifest.read(self.test_dir / "manifest.txt"))

    def test_bad_key(self):
        manifest = RunManifest(self.test_dir / "manifest.txt")
        with self.assertRaises(ValueError):
            manifest.record("a=b", 1)

    def test_malformed_file(self):
        path = self.test_dir / "manifest.txt"
        path.write_text("no separator\n")
        with self.assertRaises(ValueError):
            RunManifest.read(path)


if __name__ == '__main__':
    unittest.main()
