"""
Tests for the command line entry point
"""

import contextlib
import io
import logging
import os
import shutil
import tempfile
import unittest
from pathlib import Path
import sys

import pandas as pd

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))
sys.path.insert(0, str(Path(__file__).parent))

from core.data_models import FeatureSchema
from fixtures import write_text
from main import build_parser, main


class TestCommandLine(unittest.TestCase):
    """Test cases for main()."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.previous_dir = os.getcwd()
        os.chdir(self.temp_dir)

    def tearDown(self):
        for handler in logging.root.handlers[:]:
            handler.close()
            logging.root.removeHandler(handler)
        os.chdir(self.previous_dir)
        shutil.rmtree(self.temp_dir)

    def invoke(self, *argv):
        output = io.StringIO()
        with contextlib.redirect_stdout(output):
            status = main(list(argv))
        return status, output.getvalue()

    def test_parser_requires_a_command(self):
        with self.assertRaises(SystemExit):
            with contextlib.redirect_stderr(io.StringIO()):
                build_parser().parse_args([])

    def test_synth_writes_both_variants(self):
        out = Path(self.temp_dir) / "data"
        status, printed = self.invoke("synth", "--out", str(out), "--log-level", "WARNING")
        self.assertEqual(status, 0)
        for variant, size in (("synthetic-1", 2), ("synthetic-2", 10)):
            self.assertIn(variant, printed)
            self.assertEqual(len(pd.read_csv(out / f"{variant}-train.csv")), 250)
            self.assertEqual(len(pd.read_csv(out / f"{variant}-test.csv")), 1000)
            schema = FeatureSchema.from_file(out / f"{variant}.schema")
            self.assertEqual(len(schema.categorical_domains["c1"]), size)
        self.assertTrue((Path(self.temp_dir) / "gfmm_toolkit.log").exists())

    def test_unknown_synthetic_variant(self):
        status, printed = self.invoke("synth", "--variant", "synthetic-3", "--out", self.temp_dir)
        self.assertEqual(status, 1)
        self.assertIn("Error:", printed)

    def test_encode_inspect(self):
        status, printed = self.invoke("encode-inspect", "--encoders", "label,target", "--out", self.temp_dir)
        self.assertEqual(status, 0)
        table = pd.read_csv(Path(self.temp_dir) / "encoding_synthetic-1.csv")
        self.assertEqual(set(table["encoder"]), {"label", "target"})
        self.assertIn("written", printed)

    def test_run_needs_a_configuration(self):
        status, printed = self.invoke("run")
        self.assertEqual(status, 1)
        self.assertIn("--config", printed)

    def test_run_with_configuration(self):
        rows = ["x,c,class"] + [f"{i / 9:.3f},{'pq'[i % 2]},{'a' if i < 5 else 'b'}" for i in range(10)]
        write_text(self.temp_dir, "tiny.csv", "\n".join(rows) + "\n")
        write_text(self.temp_dir, "tiny.schema", "class_column = class\ncolumn.x = numeric\ncolumn.c = categorical\n")
        config = write_text(self.temp_dir, "tiny.cfg", (
            f"datasets = tiny\ndata_dir = {self.temp_dir}\nschema_dir = {self.temp_dir}\n"
            "algorithms = onln, m1\nencoders = label\neta = 0.5\ntheta = 0.4\ncv.k = 2\ncv.repeats = 1\n"
        ))
        out = Path(self.temp_dir) / "results"
        status, printed = self.invoke("run", "--config", str(config), "--out", str(out), "--seed", "5", "--xlsx")
        self.assertEqual(status, 0)
        self.assertIn("2 grid cell(s), 4 fold result(s)", printed)
        summary = pd.read_csv(out / "summary.csv")
        self.assertEqual(list(summary["method"]), ["onln+label", "m1(eta=0.5)"])
        self.assertTrue((out / "results.xlsx").exists())

    def test_invalid_configuration(self):
        config = write_text(self.temp_dir, "bad.cfg", "datasets = tiny\ntheta = 2\n")
        status, printed = self.invoke("run", "--config", str(config))
        self.assertEqual(status, 1)
        self.assertIn("theta", printed)


if __name__ == '__main__':
    unittest.main()
