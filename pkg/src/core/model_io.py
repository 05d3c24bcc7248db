"""
Versioned flat-text serialization of trained hyperbox models

Layout (one record per line, fields separated by single spaces):

    gfmm-model 1
    algorithm <name>
    config <json>
    classes <json list>
    dimensions <n> <r>
    boxes <m>
    box <creation> <class> <cardinality> <contracted>
    V <hex> ...
    W <hex> ...
    E <json list>            (M1 only, null = unset bound)
    F <json list>            (M1 only)
    S <bits> <bits> ...      (M2 only, one 0/1 string per categorical feature)
    feature <json name> <json domain>   (M1 distance table / M2 domains)
    P <hex> ...              (M1 only, one row of P(c | value) per domain value)
    overlap <i> <k>          (IOL only)

Floats are written with float.hex so a saved model loads bit-identical.
"""

from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union
import json
import logging

import numpy as np

from core.exceptions import ModelFormatError
from core.hyperbox import BitStrings, BoundPair, BoxSet
from core.mixed_learners import (CategoricalDistanceTable, M1Config, M2Config, feature_distances)
from core.numeric_learners import GfmmModel, NumericLearnerConfig

logger = logging.getLogger(__name__)

FORMAT_HEADER = "gfmm-model 1"


def _hex_row(values) -> str:
    return " ".join(float(value).hex() for value in values)


def _config_record(config: Any) -> Dict[str, Any]:
    record = asdict(config)
    if isinstance(record.get("gamma"), tuple):
        record["gamma"] = list(record["gamma"])
    return record


def _config_from_record(algorithm: str, record: Dict[str, Any]):
    if isinstance(record.get("gamma"), list):
        record["gamma"] = tuple(record["gamma"])
    if algorithm == "m1":
        return M1Config(**record)
    if algorithm == "m2":
        return M2Config(**record)
    return NumericLearnerConfig(**record)


def dump_model(model: GfmmModel) -> str:
    """Serialize a model to text."""
    boxes = model.boxes
    lines = [
        FORMAT_HEADER,
        f"algorithm {model.algorithm}",
        f"config {json.dumps(_config_record(model.config), sort_keys=True)}",
        f"classes {json.dumps(list(model.class_set))}",
    ]
    r = 0
    if model.algorithm == "m1":
        r = model.distance_table.r
    elif model.algorithm == "m2":
        r = len(model.categorical_domains)
    lines.append(f"dimensions {boxes.n} {r}")
    lines.append(f"boxes {len(boxes)}")
    contracted = model.contracted if len(model.contracted) == len(boxes) else np.zeros(len(boxes), dtype=bool)
    for index, box in enumerate(boxes):
        lines.append(f"box {box.creation_index} {box.class_id} {box.cardinality} {int(contracted[index])}")
        lines.append(f"V {_hex_row(box.min_point)}".rstrip())
        lines.append(f"W {_hex_row(box.max_point)}".rstrip())
        if isinstance(box.categorical, BoundPair):
            lines.append(f"E {json.dumps(list(box.categorical.lower))}")
            lines.append(f"F {json.dumps(list(box.categorical.upper))}")
        elif isinstance(box.categorical, BitStrings):
            bits = " ".join("".join("1" if bit else "0" for bit in vector) for vector in box.categorical.bits)
            lines.append(f"S {bits}".rstrip())
    if model.algorithm == "m1":
        for feature in model.distance_table.features:
            lines.append(f"feature {json.dumps(feature.name)} {json.dumps(list(feature.domain))}")
            for row in feature.conditionals:
                lines.append(f"P {_hex_row(row)}")
    elif model.algorithm == "m2":
        for j, domain in enumerate(model.categorical_domains):
            lines.append(f"feature {json.dumps(f'c{j}')} {json.dumps(list(domain))}")
    for i, k in model.creation_overlaps:
        lines.append(f"overlap {i} {k}")
    return "\n".join(lines) + "\n"


class _Reader:
    """Line cursor that reports the offending line on malformed input."""

    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.position = 0

    def peek(self) -> str:
        return self.lines[self.position] if self.position < len(self.lines) else ""

    def expect(self, key: str) -> str:
        if self.position >= len(self.lines):
            raise ModelFormatError(f"unexpected end of model file, expected '{key}'")
        line = self.lines[self.position]
        tag, _, rest = line.partition(" ")
        if tag != key:
            raise ModelFormatError(f"line {self.position + 1}: expected '{key}', found '{tag}'")
        self.position += 1
        return rest

    def floats(self, key: str, count: int) -> np.ndarray:
        rest = self.expect(key)
        tokens = rest.split()
        if len(tokens) != count:
            raise ModelFormatError(f"line {self.position}: expected {count} values after '{key}', found {len(tokens)}")
        try:
            return np.array([float.fromhex(token) for token in tokens], dtype=float)
        except ValueError as e:
            raise ModelFormatError(f"line {self.position}: {e}") from e


def parse_model(text: str) -> GfmmModel:
    """
    Rebuild a model from its text form.

    Raises:
        ModelFormatError: Wrong header, unknown version or malformed records
    """
    reader = _Reader(text)
    if reader.peek().strip() != FORMAT_HEADER:
        raise ModelFormatError(f"not a '{FORMAT_HEADER}' file (header '{reader.peek()[:40]}')")
    reader.position += 1
    try:
        algorithm = reader.expect("algorithm").strip()
        config = _config_from_record(algorithm, json.loads(reader.expect("config")))
        class_set = tuple(json.loads(reader.expect("classes")))
        n, r = (int(token) for token in reader.expect("dimensions").split())
        count = int(reader.expect("boxes"))
    except (ValueError, TypeError) as e:
        raise ModelFormatError(f"malformed model preamble: {e}") from e

    V = np.empty((count, n))
    W = np.empty((count, n))
    header_fields: List[Tuple[int, int, int, bool]] = []
    payloads: List[Any] = []
    for index in range(count):
        try:
            creation, class_id, cardinality, contracted = (int(token) for token in reader.expect("box").split())
        except ValueError as e:
            raise ModelFormatError(f"line {reader.position}: malformed box record") from e
        header_fields.append((creation, class_id, cardinality, bool(contracted)))
        V[index] = reader.floats("V", n)
        W[index] = reader.floats("W", n)
        if algorithm == "m1":
            payloads.append(BoundPair(tuple(json.loads(reader.expect("E"))), tuple(json.loads(reader.expect("F")))))
        elif algorithm == "m2":
            strings = reader.expect("S").split()
            payloads.append(BitStrings(tuple(np.array([ch == "1" for ch in bits], dtype=bool) for bits in strings)))

    features = []
    domains = []
    while reader.peek().startswith("feature "):
        name_and_domain = reader.expect("feature")
        decoder = json.JSONDecoder()
        name, end = decoder.raw_decode(name_and_domain)
        domain = tuple(json.loads(name_and_domain[end:].strip()))
        domains.append(domain)
        if algorithm == "m1":
            rows = [reader.floats("P", len(class_set)) for _ in domain]
            conditionals = np.array(rows).reshape(len(domain), len(class_set))
            features.append(feature_distances(name, domain, conditionals))
    overlaps = []
    while reader.peek().startswith("overlap "):
        i, k = (int(token) for token in reader.expect("overlap").split())
        overlaps.append((i, k))
    if reader.peek().strip():
        raise ModelFormatError(f"line {reader.position + 1}: unexpected record '{reader.peek()[:40]}'")

    fields = np.array(header_fields, dtype=int).reshape(count, 4)
    boxes = BoxSet(V, W, fields[:, 1], fields[:, 2], fields[:, 0], tuple(payloads))
    table = CategoricalDistanceTable(tuple(features)) if algorithm == "m1" else None
    if table is not None and table.r != r:
        raise ModelFormatError(f"model declares {r} categorical features but stores {table.r} distance tables")
    return GfmmModel(boxes, config, algorithm, class_set, contracted=fields[:, 3].astype(bool),
                     creation_overlaps=tuple(overlaps), distance_table=table,
                     categorical_domains=tuple(domains) if algorithm == "m2" else ())


def save_model(model: GfmmModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_model(model), encoding="utf-8")
    logger.info(f"Saved {model.algorithm} model with {model.box_count} boxes to {path}")
    return path


def load_model(path: Union[str, Path]) -> GfmmModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ModelFormatError(f"cannot read model file {path}: {e}") from e
    model = parse_model(text)
    logger.info(f"Loaded {model.algorithm} model with {model.box_count} boxes from {path}")
    return model
