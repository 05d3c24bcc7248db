"""
Encoding inspection: what each encoder turns every categorical value into,
in the training phase and in the testing phase
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import pandas as pd

from config.settings import CV_CONFIG, ENCODER_CONFIG, PATHS, REPORT_CONFIG, SYNTHETIC_DATASETS
from core.data_loader import load_named_dataset
from core.data_models import Dataset
from core.encoders import PHASES, canonical_kind, fit_encoder, transform
from core.preprocessing import kfold_splits
from core.synthetic import generate_synthetic

INSPECTION_COLUMNS = ["encoder", "feature", "value", "phase", "samples", "distinct", "encoded"]

# distinct encoded vectors listed per row
MAX_LISTED = 5


def inspection_split(name: str, data_dir: Union[str, Path] = PATHS["data_dir"],
                     schema_dir: Union[str, Path] = PATHS["schema_dir"],
                     seed: int = CV_CONFIG["seed"]) -> Tuple[Dataset, Dataset]:
    """Synthetic sets use their own split; benchmark sets the first cross-validation fold."""
    if name in SYNTHETIC_DATASETS:
        return generate_synthetic(name, seed=seed)
    data = load_named_dataset(name, data_dir, schema_dir)
    train_index, test_index = kfold_splits(data, CV_CONFIG["k"], 1, seed)[0]
    return data.subset(train_index), data.subset(test_index)


class EncodingInspector:
    """Tabulates encoded values per (encoder, feature, categorical value, phase)."""

    def __init__(self, train: Dataset, test: Dataset, hyperparams: Optional[Dict[str, Dict[str, Any]]] = None,
                 rescale: bool = False, decimals: int = 6):
        self.train = train
        self.test = test
        self.hyperparams = hyperparams or {}
        self.rescale = rescale
        self.decimals = decimals
        self.logger = logging.getLogger(__name__)

    def _rows_for(self, kind: str, phase: str, data: Dataset, values: np.ndarray,
                  provenance: Sequence[Tuple[str, int]]) -> List[Dict[str, Any]]:
        rows = []
        for j, feature in enumerate(data.schema.categorical_names):
            columns = [index for index, (name, _) in enumerate(provenance) if name == feature]
            block = np.round(values[:, columns], self.decimals)
            column = data.categorical[:, j]
            for value in dict.fromkeys(column):
                selected = block[column == value]
                distinct = np.unique(selected, axis=0) if columns else np.empty((1, 0))
                listed = ["(" + ", ".join(f"{x:g}" for x in vector) + ")" for vector in distinct[:MAX_LISTED]]
                if len(distinct) > MAX_LISTED:
                    listed.append("...")
                rows.append({"encoder": kind, "feature": feature, "value": value, "phase": phase,
                             "samples": len(selected), "distinct": len(distinct), "encoded": " ".join(listed)})
        return rows

    def inspect(self, kind: str) -> pd.DataFrame:
        kind = canonical_kind(kind)
        encoder = fit_encoder(kind, self.train, **self.hyperparams.get(kind, {}))
        rows: List[Dict[str, Any]] = []
        for phase, data in zip(PHASES, (self.train, self.test)):
            encoded = transform(encoder, data, phase, rescale=self.rescale)
            rows.extend(self._rows_for(kind, phase, data, encoded.values, encoded.provenance))
        frame = pd.DataFrame(rows, columns=INSPECTION_COLUMNS)
        spread = frame[(frame["phase"] == "train") & (frame["distinct"] > 1)]
        if len(spread):
            self.logger.info(f"{kind}: {len(spread)} categorical value(s) map to several training encodings")
        return frame

    def run(self, kinds: Sequence[str]) -> pd.DataFrame:
        frames = [self.inspect(kind) for kind in kinds]
        return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=INSPECTION_COLUMNS)


def inspect_encoders(name: str = "synthetic-1", kinds: Optional[Sequence[str]] = None,
                     output_dir: Union[str, Path, None] = None, seed: int = CV_CONFIG["seed"],
                     data_dir: Union[str, Path] = PATHS["data_dir"],
                     schema_dir: Union[str, Path] = PATHS["schema_dir"],
                     rescale: bool = False,
                     hyperparams: Optional[Dict[str, Dict[str, Any]]] = None) -> Dict[str, Any]:
    """
    Inspect encoders on one dataset and optionally write ``encoding_<name>.csv``.

    Returns:
        Dictionary with 'success', 'table', 'files' and 'errors' entries
    """
    train, test = inspection_split(name, data_dir, schema_dir, seed)
    inspector = EncodingInspector(train, test, hyperparams, rescale=rescale)
    table = inspector.run(kinds or ENCODER_CONFIG["kinds"])
    result: Dict[str, Any] = {"success": True, "table": table, "files": [], "errors": []}
    if output_dir is not None:
        path = Path(output_dir) / f"encoding_{name}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        table.to_csv(path, index=False, float_format=REPORT_CONFIG["float_format"])
        result["files"].append(str(path))
    return result
