#!/usr/bin/env python3
"""
Fetch script for the benchmark datasets
Downloads the UCI originals and writes header-bearing CSVs matching data/schemas
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List

import pandas as pd

sys.path.insert(0, str(Path(__file__).parent / "src"))

from config.settings import DATASET_CATALOG, LOGGING_CONFIG, PATHS  # noqa: E402
from core.data_models import FeatureSchema  # noqa: E402

logger = logging.getLogger("fetch_datasets")

MISSING_MARKER = "?"

# Raw file layouts that differ from "schema columns, then the class column, comma separated"
RAW_LAYOUTS: Dict[str, Dict[str, Any]] = {
    "australian": {"sep": r"\s+"},
    "german": {"sep": r"\s+"},
    "heart": {"sep": r"\s+"},
    "flag": {"columns": ["name", "landmass", "zone", "area", "population", "language", "religion", "bars",
                         "stripes", "colours", "red", "green", "blue", "gold", "white", "black", "orange",
                         "mainhue", "circles", "crosses", "saltires", "quarters", "sunstars", "crescent",
                         "triangle", "icon", "animate", "text", "topleft", "botright"]},
    "zoo": {"leading": ["animal_name"]},
    "molecular-biology": {"columns": ["class", "instance", "sequence"], "sequence": "sequence"},
}


def raw_columns(name: str, schema: FeatureSchema) -> List[str]:
    """Column names of the raw UCI file, in file order."""
    layout = RAW_LAYOUTS.get(name, {})
    if "columns" in layout:
        return list(layout["columns"])
    return list(layout.get("leading", [])) + [column.name for column in schema.columns] + [schema.class_column]


def read_raw(name: str, schema: FeatureSchema) -> pd.DataFrame:
    """Download one dataset and name its columns the way the schema does."""
    layout = RAW_LAYOUTS.get(name, {})
    source = DATASET_CATALOG[name]["source"]
    logger.info(f"Downloading {name} from {source}")
    frame = pd.read_csv(source, header=None, names=raw_columns(name, schema), sep=layout.get("sep", ","),
                        dtype=str, skipinitialspace=True, engine="python")
    frame = frame.apply(lambda column: column.str.strip())

    if "sequence" in layout:
        # one categorical column per sequence position
        sequences = frame[layout["sequence"]].str.upper()
        positions = [column.name for column in schema.columns]
        expanded = pd.DataFrame(sequences.map(list).tolist(), columns=positions, index=frame.index)
        frame = pd.concat([frame.drop(columns=[layout["sequence"]]), expanded], axis=1)
    return frame


def convert(name: str, schema_dir: Path, out_dir: Path, force: bool = False) -> Path:
    """
    Fetch ``name`` and write ``<out_dir>/<name>.csv``.

    Rows with a '?' cell are dropped; the row count is checked against the
    catalog and a mismatch is logged, not raised.
    """
    target = out_dir / f"{name}.csv"
    if target.exists() and not force:
        logger.info(f"{target} exists, skipping (use --force to download again)")
        return target

    schema = FeatureSchema.from_file(schema_dir / f"{name}.schema")
    frame = read_raw(name, schema)
    keep = [column.name for column in schema.columns] + [schema.class_column]
    frame = frame[keep]
    missing = frame.isna().any(axis=1) | (frame == MISSING_MARKER).any(axis=1)
    if missing.any():
        logger.info(f"{name}: dropping {int(missing.sum())} row(s) with missing values")
    frame = frame[~missing]

    expected = DATASET_CATALOG[name]["samples"]
    if len(frame) != expected:
        logger.warning(f"{name}: {len(frame)} rows after cleaning, the catalog lists {expected}")
    classes = frame[schema.class_column].nunique()
    if classes != DATASET_CATALOG[name]["classes"]:
        logger.warning(f"{name}: {classes} classes, the catalog lists {DATASET_CATALOG[name]['classes']}")

    out_dir.mkdir(parents=True, exist_ok=True)
    frame.to_csv(target, index=False)
    logger.info(f"Wrote {len(frame)} rows of {name} to {target}")
    return target


def main():
    """Main fetch function."""
    parser = argparse.ArgumentParser(description="Fetch the UCI benchmark datasets")
    parser.add_argument("--datasets", default=",".join(DATASET_CATALOG),
                        help="comma separated dataset names (default: all)")
    parser.add_argument("--out", default=PATHS["data_dir"], help="output directory for the CSV files")
    parser.add_argument("--schemas", default=PATHS["schema_dir"], help="directory of the schema files")
    parser.add_argument("--force", action="store_true", help="download even if the CSV already exists")
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO, format=LOGGING_CONFIG["format"])

    names = [name.strip() for name in args.datasets.split(",") if name.strip()]
    unknown = [name for name in names if name not in DATASET_CATALOG]
    if unknown:
        print(f"Unknown dataset(s): {', '.join(unknown)}")
        print(f"Available: {', '.join(DATASET_CATALOG)}")
        return 1

    failed = []
    for name in names:
        try:
            convert(name, Path(args.schemas), Path(args.out), args.force)
        except Exception as e:
            logger.error(f"Could not fetch {name}: {e}")
            failed.append(name)

    print(f"\n{len(names) - len(failed)}/{len(names)} dataset(s) available in {args.out}")
    if failed:
        print(f"Failed: {', '.join(failed)}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
