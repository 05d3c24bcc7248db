"""
Unit tests for the encoding inspector
"""

import shutil
import tempfile
import unittest
from pathlib import Path
import sys

import pandas as pd

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))
sys.path.insert(0, str(Path(__file__).parent))

from core.exceptions import EncoderError
from fixtures import make_dataset
from utils.encoding_inspector import INSPECTION_COLUMNS, EncodingInspector, inspect_encoders


class TestEncodingInspector(unittest.TestCase):
    """Test cases for EncodingInspector."""

    def setUp(self):
        self.train = make_dataset(categorical=[["u"], ["u"], ["v"], ["v"]], labels=["a", "b", "a", "a"])
        self.test = make_dataset(categorical=[["u"], ["w"]], labels=["a", "b"], class_set=["a", "b"])
        self.inspector = EncodingInspector(self.train, self.test)

    def row(self, table, value, phase):
        return table[(table["value"] == value) & (table["phase"] == phase)].iloc[0]

    def test_label_codes_and_unseen_value(self):
        table = self.inspector.inspect("label")
        self.assertEqual(list(table.columns), INSPECTION_COLUMNS)
        self.assertEqual(len(table), 4)
        self.assertEqual(self.row(table, "u", "train")["encoded"], "(0)")
        self.assertEqual(self.row(table, "v", "train")["encoded"], "(1)")
        self.assertEqual(self.row(table, "w", "test")["encoded"], "(2)")
        self.assertEqual(self.row(table, "v", "train")["samples"], 2)

    def test_leave_one_out_differs_between_phases(self):
        with self.assertLogs("utils.encoding_inspector", level="INFO"):
            table = self.inspector.inspect("leave-one-out")
        self.assertEqual(set(table["encoder"]), {"loo"})
        spread = self.row(table, "u", "train")
        self.assertEqual(spread["distinct"], 2)
        self.assertEqual(spread["encoded"], "(0) (1)")
        self.assertEqual(self.row(table, "u", "test")["encoded"], "(0.5)")
        self.assertEqual(self.row(table, "w", "test")["encoded"], "(0.25)")

    def test_onehot_vectors(self):
        table = self.inspector.inspect("onehot")
        self.assertEqual(self.row(table, "u", "train")["encoded"], "(1, 0)")
        self.assertEqual(self.row(table, "w", "test")["encoded"], "(0, 0)")

    def test_run_concatenates_encoders(self):
        table = self.inspector.run(["label", "target"])
        self.assertEqual(list(dict.fromkeys(table["encoder"])), ["label", "target"])
        self.assertTrue(self.inspector.run([]).empty)

    def test_unknown_encoder(self):
        with self.assertRaises(EncoderError):
            self.inspector.inspect("binary")


class TestInspectEncoders(unittest.TestCase):
    """Test cases for inspect_encoders on the synthetic data."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_writes_csv(self):
        result = inspect_encoders("synthetic-1", ["onehot", "catboost"], output_dir=self.temp_dir)
        self.assertTrue(result["success"])
        path = Path(self.temp_dir) / "encoding_synthetic-1.csv"
        self.assertEqual(result["files"], [str(path)])
        written = pd.read_csv(path)
        self.assertEqual(len(written), len(result["table"]))
        self.assertEqual(set(written["value"]), {"One", "Two"})
        catboost_train = written[(written["encoder"] == "catboost") & (written["phase"] == "train")]
        self.assertTrue((catboost_train["distinct"] > 1).all())
        onehot = written[written["encoder"] == "onehot"]
        self.assertTrue((onehot["distinct"] == 1).all())


if __name__ == '__main__':
    unittest.main()
