"""
Unit tests for CSV ingestion
"""

import shutil
import tempfile
import unittest
from pathlib import Path
import sys

import numpy as np

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))
sys.path.insert(0, str(Path(__file__).parent))

from core.data_loader import dataset_paths, load_csv, load_named_dataset, save_csv
from core.data_models import CATEGORICAL, NUMERIC, ColumnSpec, FeatureSchema
from core.exceptions import (ArityMismatch, MissingCell, MissingColumn, MissingDataset, NumericParseError,
                             SchemaError, UnknownCategoryError)
from fixtures import write_text


class TestLoadCsv(unittest.TestCase):
    """Test cases for load_csv."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.schema = FeatureSchema(
            columns=(ColumnSpec("x", NUMERIC), ColumnSpec("colour", CATEGORICAL)),
            class_column="class"
        )

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def write(self, text: str, name: str = "data.csv") -> Path:
        return write_text(self.temp_dir, name, text)

    def test_load_infers_domains_and_classes(self):
        path = self.write("x,colour,class\n1.5,red,a\n2.5,green,b\n0.5,red,a\n")
        data = load_csv(path, self.schema)
        self.assertEqual(len(data), 3)
        self.assertEqual(data.class_set, ("a", "b"))
        self.assertEqual(data.schema.categorical_domains["colour"], ("red", "green"))
        np.testing.assert_allclose(data.lower[:, 0], [1.5, 2.5, 0.5])
        np.testing.assert_array_equal(data.lower, data.upper)
        self.assertEqual(data.name, "data")

    def test_column_order_in_file_does_not_matter(self):
        path = self.write("class,colour,extra,x\na,red,ignored,1\n")
        data = load_csv(path, self.schema)
        self.assertEqual(float(data.lower[0, 0]), 1.0)
        self.assertEqual(data.categorical[0, 0], "red")

    def test_missing_column(self):
        path = self.write("x,class\n1,a\n")
        with self.assertRaises(MissingColumn) as context:
            load_csv(path, self.schema)
        self.assertEqual(context.exception.column, "colour")

    def test_missing_class_column_on_train(self):
        path = self.write("x,colour\n1,red\n")
        with self.assertRaises(MissingColumn):
            load_csv(path, self.schema)
        data = load_csv(path, self.schema, role="test")
        self.assertFalse(data.has_labels)

    def test_numeric_parse_error_names_row_and_column(self):
        path = self.write("x,colour,class\n1,red,a\nabc,red,a\n")
        with self.assertRaises(NumericParseError) as context:
            load_csv(path, self.schema)
        self.assertEqual(context.exception.column, "x")
        self.assertEqual(context.exception.row, 2)
        self.assertIn("row 2", str(context.exception))

    def test_empty_cell(self):
        path = self.write("x,colour,class\n1,,a\n")
        with self.assertRaises(MissingCell) as context:
            load_csv(path, self.schema)
        self.assertEqual(context.exception.column, "colour")

    def test_short_row(self):
        path = self.write("x,colour,class\n1,red\n")
        with self.assertRaises(ArityMismatch) as ctx:
            load_csv(path, self.schema)
        self.assertEqual(ctx.exception.row, 1)

    def test_short_row_reports_its_position(self):
        path = self.write("x,colour,class\n1,red,a\n\n2,blue\n")
        with self.assertRaises(ArityMismatch) as ctx:
            load_csv(path, self.schema)
        self.assertEqual(ctx.exception.row, 2)

    def test_long_row(self):
        path = self.write("x,colour,class\n1,red,a,extra\n")
        with self.assertRaises(ArityMismatch):
            load_csv(path, self.schema)

    def test_quoted_comma_is_one_field(self):
        data = load_csv(self.write('x,colour,class\n1,"dark, red",a\n'), self.schema)
        self.assertEqual(data.categorical[0, 0], "dark, red")

    def test_declared_domain_on_train_and_test(self):
        schema = self.schema.with_domains({"colour": ("red", "green")})
        path = self.write("x,colour,class\n1,blue,a\n")
        with self.assertRaises(UnknownCategoryError):
            load_csv(path, schema, role="train")
        data = load_csv(path, schema, role="test", class_set=("a",))
        self.assertTrue(data.unseen[0, 0])
        self.assertEqual(data.categorical[0, 0], "blue")

    def test_unknown_class_with_given_class_set(self):
        path = self.write("x,colour,class\n1,red,z\n")
        with self.assertRaises(UnknownCategoryError):
            load_csv(path, self.schema, class_set=("a", "b"))

    def test_interval_columns(self):
        schema = FeatureSchema((ColumnSpec("x", NUMERIC),), "class", interval_columns={"x"})
        path = self.write("x.lo,x.hi,class\n0.1,0.4,a\n0.2,0.2,b\n")
        data = load_csv(path, schema)
        np.testing.assert_allclose(data.lower[:, 0], [0.1, 0.2])
        np.testing.assert_allclose(data.upper[:, 0], [0.4, 0.2])
        inverted = self.write("x.lo,x.hi,class\n0.5,0.4,a\n", name="inverted.csv")
        with self.assertRaises(SchemaError):
            load_csv(inverted, schema)

    def test_invalid_role(self):
        path = self.write("x,colour,class\n1,red,a\n")
        with self.assertRaises(ValueError):
            load_csv(path, self.schema, role="validation")

    def test_save_and_reload(self):
        schema = FeatureSchema((ColumnSpec("w", NUMERIC), ColumnSpec("x", NUMERIC), ColumnSpec("c", CATEGORICAL)),
                               "class", interval_columns={"w"})
        path = self.write("w.lo,w.hi,x,c,class\n0.1,0.3,1.25,p,u\n0.2,0.2,-3,q,v\n")
        data = load_csv(path, schema)
        copy = save_csv(data, Path(self.temp_dir) / "out" / "copy.csv")
        again = load_csv(copy, data.schema)
        np.testing.assert_array_equal(again.lower, data.lower)
        np.testing.assert_array_equal(again.upper, data.upper)
        self.assertEqual(again.label_names(), data.label_names())
        self.assertEqual(list(again.categorical[:, 0]), ["p", "q"])

    def test_save_and_reload_is_bit_exact(self):
        schema = FeatureSchema((ColumnSpec("x", NUMERIC),), "class")
        values = [0.1 + 0.2, 1 / 3, -3 * 0.1, 2.0 ** -40, 1e300 / 7]
        rows = "".join(f"{v!r},{label}\n" for v, label in zip(values, "ababa"))
        data = load_csv(self.write("x,class\n" + rows), schema)
        np.testing.assert_array_equal(data.lower[:, 0], np.array(values))
        again = load_csv(save_csv(data, Path(self.temp_dir) / "copy.csv"), data.schema)
        np.testing.assert_array_equal(again.lower, data.lower)


class TestNamedDatasets(unittest.TestCase):
    """Test cases for locating benchmark files."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_missing_dataset(self):
        with self.assertRaises(MissingDataset):
            load_named_dataset("zoo", self.temp_dir, self.temp_dir)

    def test_missing_schema(self):
        write_text(self.temp_dir, "tiny.csv", "x,class\n1,a\n")
        with self.assertRaises(MissingDataset):
            dataset_paths("tiny", self.temp_dir, Path(self.temp_dir) / "schemas")

    def test_schema_next_to_csv(self):
        write_text(self.temp_dir, "tiny.csv", "x,class\n1,a\n2,b\n")
        write_text(self.temp_dir, "tiny.schema", "class_column = class\ncolumn.x = numeric\n")
        data = load_named_dataset("tiny", self.temp_dir, Path(self.temp_dir) / "schemas")
        self.assertEqual(data.name, "tiny")
        self.assertEqual(len(data), 2)


if __name__ == '__main__':
    unittest.main()
