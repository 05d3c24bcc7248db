"""
Reproduction of the published benchmark results

Runs the encoding, hybrid, mixed-learner and synthetic experiments on a
subset of the benchmark datasets, joins the outcome against the published
result corpus and checks the headline claims.
"""

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Union
import json
import logging
import math

import numpy as np
import pandas as pd

from config.experiment import NO_ENCODER, ExperimentConfig, build_config
from config.settings import (CV_CONFIG, DATASET_CATALOG, GFMM_CONFIG, HYBRID_CONFIG, PATHS, REPORT_CONFIG,
                             REPRODUCE_CONFIG, SYNTHETIC_DATASETS)
from core.data_loader import dataset_paths
from core.encoders import ENCODER_KINDS
from core.exceptions import ConfigError, MissingDataset, StatisticsError
from core.experiment_runner import EvaluationReport, ExperimentRunner
from core.report_writer import ReportWriter
from core.statistics import rank_methods

logger = logging.getLogger(__name__)

SOURCES = ("encoding", "hybrid", "mixed", "synthetic")
MEASURES = ("cba", "boxes", "accuracy", "secondary", "secondary_correct")
KEY_COLUMNS = ["source", "dataset", "theta", "algorithm", "variant", "measure"]
COMPARISON_COLUMNS = KEY_COLUMNS + ["published", "reproduced", "delta", "within_tolerance"]
ANY_THETA = "any"
OVERLAP_FREE = ("iol", "agglo-sm", "agglo-2")


@dataclass
class ClaimCheck:
    """Outcome of one reproduced claim. ``passed`` is None when the subset cannot decide it."""

    name: str
    passed: Optional[bool]
    detail: str
    asserted: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ReproductionResult:
    comparison: pd.DataFrame
    checks: List[ClaimCheck] = field(default_factory=list)
    reports: Dict[str, EvaluationReport] = field(default_factory=dict)
    files: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return not self.errors and all(check.passed is not False for check in self.checks if check.asserted)


def theta_label(theta: float) -> str:
    return f"{theta:g}"


def load_published(path: Union[str, Path, None] = None) -> pd.DataFrame:
    """
    Read the published result corpus.

    Raises:
        MissingDataset: The corpus file does not exist
    """
    path = Path(path or REPRODUCE_CONFIG["reference_file"])
    if not path.exists():
        raise MissingDataset(f"published result corpus not found at {path}")
    frame = pd.read_csv(path, dtype={"theta": str, "variant": str})
    frame["variant"] = frame["variant"].fillna("")
    return frame


def _is_categorical_only(name: str) -> bool:
    return DATASET_CATALOG.get(name, {}).get("numeric", 1) == 0


def _is_mixed(name: str) -> bool:
    entry = DATASET_CATALOG.get(name, {})
    return entry.get("numeric", 0) > 0 and entry.get("categorical", 0) > 0


def check_subset(subset: Iterable[str], data_dir: Union[str, Path], schema_dir: Union[str, Path]) -> List[str]:
    """
    Validate dataset names and make sure every benchmark file is present locally.

    Raises:
        MissingDataset: Unknown name or missing CSV/schema file
    """
    names = list(dict.fromkeys(subset))
    if not names:
        raise MissingDataset("no datasets selected for reproduction")
    for name in names:
        if name in SYNTHETIC_DATASETS:
            continue
        if name not in DATASET_CATALOG:
            raise MissingDataset(f"unknown benchmark dataset '{name}', expected one of "
                                 f"{sorted(DATASET_CATALOG) + SYNTHETIC_DATASETS}")
        dataset_paths(name, data_dir, schema_dir)
    return names


def plan_experiments(subset: Sequence[str], base: Dict[str, Any],
                     sources: Sequence[str] = SOURCES) -> Dict[str, ExperimentConfig]:
    """
    One ExperimentConfig per experiment family. Mixed learners on datasets
    without numeric features run once, at the first theta.
    """
    thetas = list(GFMM_CONFIG["theta_grid"])
    learners = list(HYBRID_CONFIG["bases"])
    benchmark = [name for name in subset if name not in SYNTHETIC_DATASETS]
    synthetic = [name for name in subset if name in SYNTHETIC_DATASETS]
    plans: Dict[str, Dict[str, Any]] = {}
    if "encoding" in sources and benchmark:
        plans["encoding"] = {"datasets": benchmark, "algorithms": learners,
                             "encoders": [NO_ENCODER] + list(ENCODER_KINDS), "theta": thetas}
    hybrid = [name for name in benchmark if _is_mixed(name)]
    if "hybrid" in sources and hybrid:
        plans["hybrid"] = {"datasets": hybrid, "algorithms": ["hybrid-a", "hybrid-b"], "hybrid_base": learners,
                           "theta": thetas}
    if "mixed" in sources:
        with_numeric = [name for name in benchmark if not _is_categorical_only(name)]
        categorical = [name for name in benchmark if _is_categorical_only(name)]
        if with_numeric:
            plans["mixed"] = {"datasets": with_numeric, "algorithms": ["m1", "m2"], "theta": thetas}
        if categorical:
            plans["mixed-categorical"] = {"datasets": categorical, "algorithms": ["m1", "m2"],
                                          "theta": thetas[:1]}
    if "synthetic" in sources and synthetic:
        plans["synthetic"] = {"datasets": synthetic, "algorithms": learners, "encoders": list(ENCODER_KINDS),
                              "theta": thetas}
    return {key: build_config({**base, **values}) for key, values in plans.items()}


def _published_rows(key: str, summary: pd.DataFrame) -> pd.DataFrame:
    """Summary rows re-keyed the way the published corpus names them, one row per measure."""
    frame = summary[summary["status"] == "ok"].copy()
    if frame.empty:
        return pd.DataFrame(columns=KEY_COLUMNS + ["reproduced"])
    source = "mixed" if key.startswith("mixed") else key
    frame["source"] = source
    frame["theta"] = frame["theta"].map(lambda theta: ANY_THETA if key == "mixed-categorical"
                                        else theta_label(theta))
    if source == "hybrid":
        frame["variant"], frame["algorithm"] = ("hybrid-" + frame["algorithm"].str[-1].str.upper(),
                                                frame["variant"])
    elif source in ("encoding", "synthetic"):
        frame["variant"] = frame["encoder"].replace({NO_ENCODER: "numeric-only"})
    long = frame.melt(id_vars=["source", "dataset", "theta", "algorithm", "variant"],
                      value_vars=list(MEASURES), var_name="measure", value_name="reproduced")
    return long[KEY_COLUMNS + ["reproduced"]]


def _tolerance(row: pd.Series) -> float:
    if row["measure"] in ("cba", "accuracy"):
        return REPRODUCE_CONFIG["cba_tolerance"]
    if row["measure"] == "boxes":
        bands = REPRODUCE_CONFIG["box_tolerance"]
        return bands.get(row["algorithm"], bands["default"]) * abs(row["published"])
    return REPRODUCE_CONFIG["secondary_tolerance"] * abs(row["published"])


def compare_with_published(reports: Dict[str, EvaluationReport], published: pd.DataFrame) -> pd.DataFrame:
    """Side-by-side published value, reproduced value and absolute difference."""
    reproduced = [_published_rows(key, report.summary) for key, report in reports.items()]
    reproduced = [frame for frame in reproduced if not frame.empty]
    if not reproduced:
        return pd.DataFrame(columns=COMPARISON_COLUMNS)
    ours = pd.concat(reproduced, ignore_index=True)
    theirs = published.rename(columns={"value": "published"})
    joined = ours.merge(theirs, on=KEY_COLUMNS, how="inner")
    joined["reproduced"] = joined["reproduced"].astype(float)
    joined["delta"] = (joined["reproduced"] - joined["published"]).abs()
    joined["within_tolerance"] = joined["delta"] <= joined.apply(_tolerance, axis=1) + 1e-12
    return joined[COMPARISON_COLUMNS].sort_values(KEY_COLUMNS, kind="stable").reset_index(drop=True)


def _all_folds(reports: Dict[str, EvaluationReport]) -> pd.DataFrame:
    frames = [report.folds for report in reports.values() if len(report.folds)]
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()


def check_class_boxes(reports: Dict[str, EvaluationReport]) -> ClaimCheck:
    name = "onln_theta1_one_box_per_class"
    folds = _all_folds(reports)
    if folds.empty:
        return ClaimCheck(name, None, "no fold results")
    selected = folds[(folds["algorithm"] == "onln") & np.isclose(folds["theta"].astype(float), 1.0)]
    if selected.empty:
        return ClaimCheck(name, None, "no Onln folds at theta=1")
    wrong = selected[selected["boxes"] != selected["train_classes"]]
    detail = f"{len(selected) - len(wrong)}/{len(selected)} folds hold exactly one box per training class"
    if len(wrong):
        detail += f"; first mismatch on {wrong.iloc[0]['dataset']} ({wrong.iloc[0]['method']})"
    return ClaimCheck(name, wrong.empty, detail)


def check_overlap_free(reports: Dict[str, EvaluationReport]) -> ClaimCheck:
    name = "overlap_free_models"
    folds = _all_folds(reports)
    if folds.empty:
        return ClaimCheck(name, None, "no fold results")
    selected = folds[folds["algorithm"].isin(OVERLAP_FREE) | folds["variant"].isin(OVERLAP_FREE)]
    if selected.empty:
        return ClaimCheck(name, None, "no IOL or agglomerative folds")
    offending = selected[selected["overlaps"] > 0]
    detail = f"{len(offending)} of {len(selected)} folds contain inter-class overlaps"
    if len(offending):
        row = offending.iloc[0]
        detail += f"; first on {row['dataset']} {row['method']} theta={theta_label(row['theta'])}"
    return ClaimCheck(name, offending.empty, detail)


def check_cba_band(comparison: pd.DataFrame) -> ClaimCheck:
    name = "cba_band_small_datasets"
    selected = comparison[(comparison["source"] == "encoding") & (comparison["measure"] == "cba")
                          & comparison["dataset"].isin(REPRODUCE_CONFIG["small_datasets"])
                          & comparison["algorithm"].isin(REPRODUCE_CONFIG["band_algorithms"])
                          & comparison["variant"].isin(REPRODUCE_CONFIG["band_encoders"])]
    if selected.empty:
        return ClaimCheck(name, None, "no small-dataset CBA cells in this subset")
    share = float(selected["within_tolerance"].mean())
    tolerance = REPRODUCE_CONFIG["cba_tolerance"]
    detail = f"{share:.1%} of {len(selected)} cells within +/-{tolerance:g} of the published CBA"
    return ClaimCheck(name, share >= REPRODUCE_CONFIG["cba_pass_share"], detail)


def _mean_ranks(frame: pd.DataFrame, column: str) -> Optional[pd.Series]:
    pivot = frame.pivot_table(index="dataset", columns=column, values="cba", sort=False).dropna(axis=0)
    if pivot.empty or pivot.shape[1] < 2:
        return None
    try:
        table = rank_methods(pivot.to_numpy(), tuple(pivot.columns), tuple(pivot.index))
    except StatisticsError:
        return None
    return pd.Series(table.mean_ranks, index=list(table.methods)).sort_index(kind="stable").sort_values(
        kind="stable")


def check_encoder_ranking(reports: Dict[str, EvaluationReport]) -> ClaimCheck:
    name = "agglo2_theta0.1_target_jamesstein_top3"
    if "encoding" not in reports:
        return ClaimCheck(name, None, "encoding experiment not run")
    summary = reports["encoding"].summary
    selected = summary[(summary["status"] == "ok") & (summary["algorithm"] == "agglo-2")
                       & (summary["encoder"] != NO_ENCODER) & np.isclose(summary["theta"].astype(float), 0.1)]
    ranks = _mean_ranks(selected, "encoder")
    if ranks is None:
        return ClaimCheck(name, None, "not enough complete AGGLO-2 results at theta=0.1")
    top = list(ranks.index[:3])
    passed = {"target", "jamesstein"} <= set(top)
    return ClaimCheck(name, passed, f"top encoders by mean rank: {', '.join(f'{m} ({ranks[m]:.3f})' for m in top)}")


def check_hybrid_schemes(reports: Dict[str, EvaluationReport], theta: float = 0.7) -> ClaimCheck:
    name = "hybrid_scheme_a_not_worse"
    if "hybrid" not in reports:
        return ClaimCheck(name, None, "hybrid experiment not run")
    summary = reports["hybrid"].summary
    selected = summary[(summary["status"] == "ok") & np.isclose(summary["theta"].astype(float), theta)]
    per_scheme = selected.pivot_table(index="dataset", columns="algorithm", values="cba", aggfunc="mean").dropna()
    if per_scheme.empty or not {"hybrid-a", "hybrid-b"} <= set(per_scheme.columns):
        return ClaimCheck(name, None, f"no complete scheme A/B pairs at theta={theta:g}")
    wins = int((per_scheme["hybrid-a"] >= per_scheme["hybrid-b"]).sum())
    needed = math.ceil(8 / 11 * len(per_scheme))
    return ClaimCheck(name, wins >= needed,
                      f"scheme A >= scheme B on {wins}/{len(per_scheme)} datasets at theta={theta:g} "
                      f"(need {needed})")


def check_mixed_ranking(reports: Dict[str, EvaluationReport], theta: float = 0.7) -> ClaimCheck:
    name = "m1_eta0.1_best_mixed_setting"
    frames = []
    if "mixed" in reports:
        summary = reports["mixed"].summary
        frames.append(summary[np.isclose(summary["theta"].astype(float), theta)])
    if "mixed-categorical" in reports:
        frames.append(reports["mixed-categorical"].summary)
    if not frames:
        return ClaimCheck(name, None, "mixed-learner experiment not run")
    combined = pd.concat(frames, ignore_index=True)
    ranks = _mean_ranks(combined[combined["status"] == "ok"], "method")
    if ranks is None:
        return ClaimCheck(name, None, "not enough complete mixed-learner results")
    best = ranks.index[0]
    return ClaimCheck(name, best == "m1(eta=0.1)",
                      f"best mean rank at theta={theta:g}: {best} ({ranks.iloc[0]:.4f}); "
                      f"m1(eta=0.1) at {ranks.get('m1(eta=0.1)', float('nan')):.4f}")


def check_synthetic_secondary(comparison: pd.DataFrame) -> ClaimCheck:
    name = "synthetic1_iol_onehot_secondary"
    selected = comparison[(comparison["source"] == "synthetic") & (comparison["dataset"] == "synthetic-1")
                          & (comparison["theta"] == "0.7") & (comparison["algorithm"] == "iol")
                          & (comparison["variant"] == "onehot") & (comparison["measure"] == "secondary")]
    if selected.empty:
        return ClaimCheck(name, None, "synthetic-1 not run")
    row = selected.iloc[0]
    return ClaimCheck(name, bool(row["within_tolerance"]) and row["reproduced"] > 0,
                      f"{row['reproduced']:g} secondary decisions against {row['published']:g} published "
                      f"(+/-{REPRODUCE_CONFIG['secondary_tolerance']:.0%})")


def box_monotonicity(reports: Dict[str, EvaluationReport]) -> ClaimCheck:
    """IOL box counts should not grow with theta; reported only."""
    name = "iol_box_count_monotone_in_theta"
    if "encoding" not in reports:
        return ClaimCheck(name, None, "encoding experiment not run", asserted=False)
    summary = reports["encoding"].summary
    selected = summary[(summary["status"] == "ok") & (summary["algorithm"] == "iol")]
    pivot = selected.pivot_table(index=["dataset", "encoder"], columns="theta", values="boxes").dropna()
    if pivot.shape[1] < 2:
        return ClaimCheck(name, None, "fewer than two theta values", asserted=False)
    ordered = pivot[sorted(pivot.columns, reverse=True)].to_numpy()
    monotone = np.all(np.diff(ordered, axis=1) >= 0, axis=1)
    violations = [f"{dataset}/{encoder}" for (dataset, encoder), ok in zip(pivot.index, monotone) if not ok]
    detail = f"{int(monotone.sum())}/{len(monotone)} dataset/encoder pairs monotone"
    if violations:
        detail += f"; not monotone: {', '.join(violations[:10])}"
    return ClaimCheck(name, bool(monotone.all()), detail, asserted=False)


def run_checks(reports: Dict[str, EvaluationReport], comparison: pd.DataFrame) -> List[ClaimCheck]:
    return [
        check_class_boxes(reports),
        check_overlap_free(reports),
        check_cba_band(comparison),
        check_encoder_ranking(reports),
        check_hybrid_schemes(reports),
        check_mixed_ranking(reports),
        check_synthetic_secondary(comparison),
        box_monotonicity(reports),
    ]


def write_reproduction(result: ReproductionResult, output_dir: Union[str, Path]) -> List[str]:
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    comparison_path = output_dir / REPORT_CONFIG["comparison_file"]
    result.comparison.to_csv(comparison_path, index=False, float_format=REPORT_CONFIG["float_format"])
    checks_path = output_dir / REPORT_CONFIG["checks_file"]
    checks_path.write_text(json.dumps([check.to_dict() for check in result.checks], indent=2), encoding="utf-8")
    return [str(comparison_path), str(checks_path)]


def reproduce_paper_suite(subset: Sequence[str],
                          data_dir: Union[str, Path] = PATHS["data_dir"],
                          schema_dir: Union[str, Path] = PATHS["schema_dir"],
                          output_dir: Union[str, Path, None] = None,
                          seed: int = CV_CONFIG["seed"],
                          jobs: int = 1,
                          cv_k: int = CV_CONFIG["k"],
                          cv_repeats: int = CV_CONFIG["repeats"],
                          sources: Sequence[str] = SOURCES,
                          reference_file: Union[str, Path, None] = None,
                          progress_callback: Optional[Callable[[int, int], None]] = None) -> ReproductionResult:
    """
    Re-run the published experiments on ``subset`` and compare.

    Args:
        subset: Benchmark and/or synthetic dataset names
        data_dir: Directory of fetched benchmark CSVs
        schema_dir: Directory of schema files
        output_dir: Where to write per-experiment reports, comparison.csv and
            checks.json; nothing is written when None
        seed: Cross-validation and learner seed
        jobs: Worker processes for fold evaluation
        cv_k: Folds per repeat
        cv_repeats: Cross-validation repeats
        sources: Experiment families to run
        reference_file: Published result corpus (defaults to the bundled one)
        progress_callback: Called with (done, total) fold counts

    Returns:
        ReproductionResult with the comparison table and claim checks

    Raises:
        MissingDataset: A dataset or the published corpus is not available locally
        ConfigError: Unknown experiment source
    """
    unknown = [source for source in sources if source not in SOURCES]
    if unknown:
        raise ConfigError(f"unknown experiment source(s) {unknown}, expected some of {SOURCES}")
    names = check_subset(subset, data_dir, schema_dir)
    published = load_published(reference_file)
    base = {"data_dir": str(data_dir), "schema_dir": str(schema_dir), "seed": seed, "jobs": jobs, "cv_k": cv_k,
            "cv_repeats": cv_repeats}
    configs = plan_experiments(names, base, sources)
    logger.info(f"Reproducing {', '.join(configs)} experiment(s) on {len(names)} dataset(s)")

    reports: Dict[str, EvaluationReport] = {}
    errors: List[str] = []
    files: List[str] = []
    for key, config in configs.items():
        if output_dir is not None:
            config = config.with_overrides(output_dir=str(Path(output_dir) / key))
        report = ExperimentRunner(config, progress_callback).run()
        reports[key] = report
        errors.extend(f"{key}: {error}" for error in report.errors)
        if output_dir is not None:
            written = ReportWriter(config.output_dir).write(report)
            files.extend(written["files"])
            errors.extend(f"{key}: {error}" for error in written["errors"] if error not in report.errors)

    comparison = compare_with_published(reports, published)
    result = ReproductionResult(comparison, run_checks(reports, comparison), reports, files, errors)
    if output_dir is not None:
        result.files.extend(write_reproduction(result, output_dir))
    for check in result.checks:
        state = "n/a" if check.passed is None else ("pass" if check.passed else "FAIL")
        log = logger.warning if check.passed is False and check.asserted else logger.info
        log(f"Check {check.name}: {state} - {check.detail}")
    return result
