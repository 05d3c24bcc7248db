"""
Experiment runner: expands the configured grid, evaluates every cell with
repeated k-fold cross-validation (or the synthetic hold-out protocol) and
aggregates the fold results
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple
import logging
import time

import numpy as np
import pandas as pd

from config.experiment import HYBRID_ALGORITHMS, MIXED_ALGORITHMS, NO_ENCODER, ExperimentConfig
from config.settings import REPORT_CONFIG, SYNTHETIC_DATASETS
from core.data_loader import load_named_dataset
from core.data_models import Dataset
from core.encoders import encoded_dataset, fit_encoder, transform
from core.evaluation import evaluate_model
from core.exceptions import (DegenerateRanks, ExperimentCellError, GfmmToolkitError, NoCategoricalFeatures,
                             NoNumericFeatures, StatisticsError)
from core.mixed_learners import M1Config, M2Config, beta_from_fraction, train_m1, train_m2
from core.numeric_learners import GfmmModel, NumericLearnerConfig, train_numeric
from core.preprocessing import fit_normalizer, kfold_splits
from core.stacking import train_stacked
from core.statistics import RankTable, TestResult, friedman, rank_methods
from core.synthetic import generate_synthetic

logger = logging.getLogger(__name__)

NATIVE = "native"

FOLD_COLUMNS = ["dataset", "method", "algorithm", "encoder", "variant", "theta", "repeat", "fold",
                "train_size", "test_size", "train_classes", "cba", "accuracy", "boxes", "secondary",
                "secondary_correct", "overlaps"]
SUMMARY_COLUMNS = ["dataset", "method", "algorithm", "encoder", "variant", "theta", "folds", "cba", "cba_std",
                   "accuracy", "boxes", "secondary", "secondary_correct", "overlaps", "status"]


class CellSkipped(GfmmToolkitError):
    """A grid cell does not apply to a dataset (reported with the skip marker)."""


@dataclass(frozen=True)
class GridCell:
    dataset: str
    algorithm: str
    encoder: str
    theta: float
    eta: Optional[float] = None
    beta_fraction: Optional[float] = None
    base: Optional[str] = None

    @property
    def variant(self) -> str:
        if self.eta is not None:
            return f"eta={self.eta:g}"
        if self.beta_fraction is not None:
            return f"beta={self.beta_fraction:g}"
        return self.base or ""

    @property
    def method(self) -> str:
        """Column label of the cell in rank tables."""
        if self.algorithm in MIXED_ALGORITHMS:
            return f"{self.algorithm}({self.variant})"
        if self.algorithm in HYBRID_ALGORITHMS:
            return f"{self.algorithm}({self.base})"
        return f"{self.algorithm}+{self.encoder}"

    @property
    def key(self) -> str:
        """File-name friendly identifier."""
        parts = [self.dataset, self.method, f"theta={self.theta:g}"]
        return "_".join(part.replace("+", "-").replace("(", "-").replace(")", "").replace("=", "")
                        for part in parts)


def expand_grid(config: ExperimentConfig) -> List[GridCell]:
    """Every grid cell exactly once, ordered dataset, theta, algorithm, then encoder or variant."""
    cells = []
    for dataset in config.datasets:
        for theta in config.theta:
            for algorithm in config.algorithms:
                if algorithm == "m1":
                    cells.extend(GridCell(dataset, algorithm, NATIVE, theta, eta=eta) for eta in config.eta)
                elif algorithm == "m2":
                    cells.extend(GridCell(dataset, algorithm, NATIVE, theta, beta_fraction=fraction)
                                 for fraction in config.beta_fraction)
                elif algorithm in HYBRID_ALGORITHMS:
                    cells.extend(GridCell(dataset, algorithm, NATIVE, theta, base=base) for base in config.hybrid_base)
                else:
                    cells.extend(GridCell(dataset, algorithm, encoder, theta) for encoder in config.encoders)
    return cells


def _numeric_config(config: ExperimentConfig, algorithm: str, theta: float) -> NumericLearnerConfig:
    return NumericLearnerConfig(algorithm=algorithm, theta=theta, gamma=config.gamma, sigma=config.sigma,
                                similarity=config.similarity, tie_break=config.tie_break, seed=config.seed)


def train_cell_model(config: ExperimentConfig, cell: GridCell, train: Dataset, test: Dataset):
    """
    Fit preprocessing on ``train`` only, train the cell's model and return it
    with the test data transformed the same way.

    Raises:
        CellSkipped: The cell does not apply to this dataset
    """
    normalizer = fit_normalizer(train)
    train, test = normalizer.transform(train), normalizer.transform(test)

    if cell.algorithm == "m1":
        cfg = M1Config(theta=cell.theta, eta=cell.eta, gamma=config.gamma, tie_break=config.tie_break,
                       seed=config.seed)
        return train_m1(train, cfg), test
    if cell.algorithm == "m2":
        beta = beta_from_fraction(cell.beta_fraction, train.r)
        cfg = M2Config(theta=cell.theta, beta=beta, gamma=config.gamma, tie_break=config.tie_break,
                       seed=config.seed)
        return train_m2(train, cfg), test
    if cell.algorithm in HYBRID_ALGORITHMS:
        scheme = cell.algorithm[-1].upper()
        try:
            model = train_stacked(train, scheme, _numeric_config(config, cell.base, cell.theta),
                                  seed=config.hybrid_seed, max_depth=config.tree_max_depth)
        except (NoNumericFeatures, NoCategoricalFeatures) as e:
            raise CellSkipped(str(e)) from e
        return model, test

    if cell.encoder == NO_ENCODER:
        if train.n == 0:
            raise CellSkipped(f"'{cell.dataset}' has no numeric features")
        train, test = train.drop_categorical(), test.drop_categorical()
    else:
        encoder = fit_encoder(cell.encoder, train, **config.encoder_hyperparams(cell.encoder))
        train = encoded_dataset(train, transform(encoder, train, "train"))
        test = encoded_dataset(test, transform(encoder, test, "test"))
    return train_numeric(train, _numeric_config(config, cell.algorithm, cell.theta)), test


@dataclass(frozen=True)
class FoldTask:
    index: int
    cell: GridCell
    repeat: int
    fold: int
    train: Dataset
    test: Dataset
    keep_model: bool = False


@dataclass
class FoldOutcome:
    index: int
    row: Optional[Dict[str, Any]] = None
    skipped: Optional[str] = None
    model: Any = None
    seconds: float = 0.0


def run_fold(config: ExperimentConfig, task: FoldTask) -> FoldOutcome:
    """Train and evaluate one (cell, repeat, fold); errors carry the cell context."""
    started = time.perf_counter()
    cell = task.cell
    try:
        model, test = train_cell_model(config, cell, task.train, task.test)
        evaluation = evaluate_model(model, test)
    except CellSkipped as e:
        return FoldOutcome(task.index, skipped=str(e))
    except Exception as e:
        raise ExperimentCellError(cell, task.repeat * config.cv_k + task.fold, e) from e
    row = {
        "dataset": cell.dataset, "method": cell.method, "algorithm": cell.algorithm, "encoder": cell.encoder,
        "variant": cell.variant, "theta": cell.theta, "repeat": task.repeat, "fold": task.fold,
        "train_size": len(task.train), "test_size": len(task.test),
        "train_classes": int(np.count_nonzero(task.train.class_counts())), "cba": evaluation.cba,
        "accuracy": evaluation.accuracy, "boxes": evaluation.boxes,
        "secondary": evaluation.secondary.secondary, "secondary_correct": evaluation.secondary.secondary_correct,
        "overlaps": evaluation.overlaps
    }
    kept = model if task.keep_model and isinstance(model, GfmmModel) else None
    return FoldOutcome(task.index, row, model=kept, seconds=time.perf_counter() - started)


def _run_task(payload: Tuple[ExperimentConfig, FoldTask]) -> FoldOutcome:
    return run_fold(*payload)


@dataclass
class RankAnalysis:
    """Rank table and Friedman/Nemenyi result for one group of compared methods."""

    label: str
    theta: float
    table: RankTable
    result: Optional[TestResult] = None


@dataclass
class EvaluationReport:
    config: ExperimentConfig
    folds: pd.DataFrame
    summary: pd.DataFrame
    analyses: List[RankAnalysis] = field(default_factory=list)
    models: Dict[str, GfmmModel] = field(default_factory=dict)
    skipped: List[Dict[str, str]] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return not self.errors


class ExperimentRunner:
    """Runs an ExperimentConfig."""

    def __init__(self, config: ExperimentConfig, progress_callback: Optional[Callable[[int, int], None]] = None):
        self.config = config
        self.progress_callback = progress_callback
        self.logger = logging.getLogger(__name__)
        self._datasets: Dict[str, Any] = {}

    def partitions(self, name: str) -> List[Tuple[int, int, Dataset, Dataset]]:
        """(repeat, fold, train, test) parts of a dataset; the synthetic sets use their own split."""
        if name not in self._datasets:
            if name in SYNTHETIC_DATASETS:
                train, test = generate_synthetic(name, seed=self.config.seed)
                parts = [(0, 0, train, test)]
            else:
                data = load_named_dataset(name, self.config.data_dir, self.config.schema_dir)
                splits = kfold_splits(data, self.config.cv_k, self.config.cv_repeats, self.config.seed)
                parts = [(i // self.config.cv_k, i % self.config.cv_k, data.subset(tr), data.subset(te))
                         for i, (tr, te) in enumerate(splits)]
            self._datasets[name] = parts
        return self._datasets[name]

    def tasks(self, cells: List[GridCell], start: int = 0) -> List[FoldTask]:
        tasks: List[FoldTask] = []
        for cell in cells:
            for repeat, fold, train, test in self.partitions(cell.dataset):
                keep = self.config.report_save_models and repeat == 0 and fold == 0
                tasks.append(FoldTask(start + len(tasks), cell, repeat, fold, train, test, keep))
        return tasks

    def execute(self, tasks: List[FoldTask]) -> List[FoldOutcome]:
        outcomes: List[FoldOutcome] = []
        if self.config.jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=self.config.jobs) as pool:
                for outcome in pool.map(_run_task, [(self.config, task) for task in tasks], chunksize=4):
                    outcomes.append(outcome)
                    self._progress(len(outcomes), len(tasks))
        else:
            for task in tasks:
                outcomes.append(run_fold(self.config, task))
                self._progress(len(outcomes), len(tasks))
        return sorted(outcomes, key=lambda outcome: outcome.index)

    def _progress(self, done: int, total: int):
        if self.progress_callback:
            self.progress_callback(done, total)
        if done == total or done % max(1, total // 10) == 0:
            self.logger.info(f"Finished {done}/{total} fold evaluations")

    def run(self) -> EvaluationReport:
        cells = expand_grid(self.config)
        self.logger.info(f"Running {len(cells)} grid cell(s) with {self.config.jobs} worker(s)")
        report_errors: List[str] = []
        tasks: List[FoldTask] = []
        for dataset in self.config.datasets:
            dataset_cells = [cell for cell in cells if cell.dataset == dataset]
            try:
                tasks.extend(self.tasks(dataset_cells, start=len(tasks)))
            except GfmmToolkitError as e:
                self.logger.error(f"Cannot prepare dataset '{dataset}': {e}")
                report_errors.append(f"{dataset}: {e}")
        outcomes = self.execute(tasks)
        self.logger.info(f"Fold evaluations took {sum(outcome.seconds for outcome in outcomes):.1f} s in total")

        rows = [outcome.row for outcome in outcomes if outcome.row is not None]
        folds = pd.DataFrame(rows, columns=FOLD_COLUMNS)
        skipped: Dict[GridCell, str] = {}
        models: Dict[str, GfmmModel] = {}
        for task, outcome in zip(tasks, outcomes):
            if outcome.skipped is not None and task.cell not in skipped:
                skipped[task.cell] = outcome.skipped
                self.logger.warning(f"Skipped {task.cell.method} on {task.cell.dataset}: {outcome.skipped}")
            if outcome.model is not None:
                models[task.cell.key] = outcome.model
        prepared = {task.cell for task in tasks}
        summary = summarize(folds, [cell for cell in cells if cell in prepared], skipped)
        analyses = rank_analyses(summary, self.config.alpha)
        return EvaluationReport(
            config=self.config,
            folds=folds,
            summary=summary,
            analyses=analyses,
            models=models,
            skipped=[{"dataset": cell.dataset, "method": cell.method, "theta": f"{cell.theta:g}", "reason": reason}
                     for cell, reason in skipped.items()],
            errors=report_errors
        )


def summarize(folds: pd.DataFrame, cells: List[GridCell], skipped: Dict[GridCell, str]) -> pd.DataFrame:
    """One row per grid cell with fold means; skipped cells carry the skip marker."""
    marker = REPORT_CONFIG["skip_marker"]
    rows = []
    for cell in cells:
        selected = folds[(folds["dataset"] == cell.dataset) & (folds["method"] == cell.method)
                         & np.isclose(folds["theta"].astype(float), cell.theta)] if len(folds) else folds
        base = {"dataset": cell.dataset, "method": cell.method, "algorithm": cell.algorithm,
                "encoder": cell.encoder, "variant": cell.variant, "theta": cell.theta}
        if cell in skipped or len(selected) == 0:
            rows.append({**base, "folds": 0, "cba": np.nan, "cba_std": np.nan, "accuracy": np.nan,
                         "boxes": np.nan, "secondary": np.nan, "secondary_correct": np.nan, "overlaps": np.nan,
                         "status": marker})
            continue
        rows.append({
            **base,
            "folds": len(selected),
            "cba": selected["cba"].mean(),
            "cba_std": selected["cba"].std(ddof=0),
            "accuracy": selected["accuracy"].mean(),
            "boxes": selected["boxes"].mean(),
            "secondary": selected["secondary"].mean(),
            "secondary_correct": selected["secondary_correct"].mean(),
            "overlaps": selected["overlaps"].mean(),
            "status": "ok"
        })
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def _analyse(label: str, theta: float, frame: pd.DataFrame, alpha: float) -> Optional[RankAnalysis]:
    pivot = frame.pivot_table(index="dataset", columns="method", values="cba", sort=False).dropna(axis=0)
    if pivot.shape[0] < 2 or pivot.shape[1] < 2:
        return None
    table = rank_methods(pivot.to_numpy(), tuple(pivot.columns), tuple(pivot.index))
    try:
        result = friedman(table, alpha)
    except (DegenerateRanks, StatisticsError) as e:
        logger.warning(f"No Friedman test for {label}: {e}")
        result = None
    return RankAnalysis(label, theta, table, result)


def rank_analyses(summary: pd.DataFrame, alpha: float) -> List[RankAnalysis]:
    """
    Per theta, rank all methods on every dataset with a complete row and,
    where a learner was run with several encoders, also rank its encoders.
    """
    analyses = []
    complete = summary[summary["status"] == "ok"]
    for theta in sorted(complete["theta"].unique()):
        at_theta = complete[np.isclose(complete["theta"].astype(float), theta)]
        analysis = _analyse(f"theta={theta:g}", theta, at_theta, alpha)
        if analysis is not None:
            analyses.append(analysis)
        for algorithm in dict.fromkeys(at_theta["algorithm"]):
            subset = at_theta[(at_theta["algorithm"] == algorithm) & (at_theta["encoder"] != NATIVE)]
            if subset["method"].nunique() < 2 or subset["method"].nunique() == at_theta["method"].nunique():
                continue
            analysis = _analyse(f"theta={theta:g}_{algorithm}", theta, subset, alpha)
            if analysis is not None:
                analyses.append(analysis)
    return analyses


def run(config: ExperimentConfig, progress_callback: Optional[Callable[[int, int], None]] = None) -> EvaluationReport:
    return ExperimentRunner(config, progress_callback).run()
