"""
Unit tests for saving and loading trained models
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

from core.evaluation import predict_gfmm
from core.exceptions import ModelFormatError
from core.mixed_learners import M1Config, M2Config, train_m1, train_m2
from core.model_io import FORMAT_HEADER, dump_model, load_model, parse_model, save_model
from core.numeric_learners import NumericLearnerConfig, train_numeric
from fixtures import make_dataset


class TestModelIO(unittest.TestCase):
    """Test cases for the model text format."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.data = make_dataset(
            numeric=[[0.1, 0.3], [0.2, 0.35], [0.7, 0.9], [0.75, 0.8], [0.4, 0.5], [0.15, 0.3]],
            categorical=[["u", "p"], ["v", "p"], ["u", "q"], ["w", "q"], ["v", "p"], ["u", "q"]],
            labels=["a", "a", "b", "b", "a", "b"]
        )

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def models(self):
        numeric = self.data.drop_categorical()
        yield train_numeric(numeric, NumericLearnerConfig(algorithm="onln", theta=0.3))
        yield train_numeric(numeric, NumericLearnerConfig(algorithm="iol", theta=0.7, gamma=(2.0, 0.5)))
        yield train_numeric(numeric, NumericLearnerConfig(algorithm="agglo-2", theta=0.5))
        yield train_m1(self.data, M1Config(theta=0.3, eta=0.5))
        yield train_m2(self.data, M2Config(theta=0.3, beta=1))

    def assertSameModel(self, model, loaded, data):
        self.assertEqual(loaded.algorithm, model.algorithm)
        self.assertEqual(loaded.config, model.config)
        self.assertEqual(loaded.class_set, model.class_set)
        self.assertEqual(list(loaded.boxes), list(model.boxes))
        np.testing.assert_array_equal(loaded.contracted, model.contracted)
        self.assertEqual(loaded.creation_overlaps, model.creation_overlaps)
        self.assertEqual([p.class_id for p in predict_gfmm(loaded, data)],
                         [p.class_id for p in predict_gfmm(model, data)])

    def test_save_and_load_every_learner(self):
        for model in self.models():
            data = self.data if model.algorithm in ("m1", "m2") else self.data.drop_categorical()
            path = save_model(model, Path(self.temp_dir) / "models" / f"{model.algorithm}.gfmm")
            self.assertSameModel(model, load_model(path), data)

    def test_text_is_stable(self):
        for model in self.models():
            text = dump_model(model)
            self.assertTrue(text.startswith(FORMAT_HEADER + "\n"))
            self.assertEqual(dump_model(parse_model(text)), text)

    def test_m1_distance_table_survives(self):
        model = train_m1(self.data, M1Config(theta=0.3, eta=0.5))
        loaded = parse_model(dump_model(model))
        for original, restored in zip(model.distance_table.features, loaded.distance_table.features):
            self.assertEqual(restored.domain, original.domain)
            np.testing.assert_array_equal(restored.normalized, original.normalized)

    def test_wrong_header(self):
        with self.assertRaises(ModelFormatError):
            parse_model("gfmm-model 2\nalgorithm onln\n")
        with self.assertRaises(ModelFormatError):
            parse_model("")

    def test_truncated_file(self):
        text = dump_model(next(self.models()))
        with self.assertRaises(ModelFormatError):
            parse_model("\n".join(text.splitlines()[:8]))

    def test_malformed_values(self):
        lines = dump_model(next(self.models())).splitlines()
        position = next(i for i, line in enumerate(lines) if line.startswith("V "))
        lines[position] = "V not-a-number 0x0p+0"
        with self.assertRaises(ModelFormatError):
            parse_model("\n".join(lines))

    def test_trailing_garbage(self):
        with self.assertRaises(ModelFormatError):
            parse_model(dump_model(next(self.models())) + "extra record\n")

    def test_missing_file(self):
        with self.assertRaises(ModelFormatError):
            load_model(Path(self.temp_dir) / "absent.gfmm")


if __name__ == '__main__':
    unittest.main()
