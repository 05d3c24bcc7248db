"""
Report writer for experiment results (CSV, JSON, CD diagrams and an optional Excel workbook)
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Union
import json
import logging
import math

import openpyxl
import pandas as pd
from openpyxl.styles import Alignment, Font, PatternFill

from config.settings import REPORT_CONFIG
from core.cd_diagram import emit_cd_diagram
from core.exceptions import DiagramWriteError
from core.experiment_runner import EvaluationReport, RankAnalysis
from core.model_io import save_model


def _plain(value: Any) -> Any:
    """JSON-safe scalar (NaN becomes null)."""
    if isinstance(value, float) and math.isnan(value):
        return None
    if hasattr(value, "item"):
        return _plain(value.item())
    return value


class ReportWriter:
    """Writes an EvaluationReport under an output directory."""

    def __init__(self, output_dir: Union[str, Path], settings: Optional[Dict[str, Any]] = None):
        self.output_dir = Path(output_dir)
        self.settings = dict(REPORT_CONFIG)
        if settings:
            self.settings.update(settings)
        self.logger = logging.getLogger(__name__)

    def path(self, key: str) -> Path:
        return self.output_dir / self.settings[key]

    def _summary_for_csv(self, summary: pd.DataFrame) -> pd.DataFrame:
        frame = summary.copy()
        measures = ["cba", "cba_std", "accuracy", "boxes", "secondary", "secondary_correct", "overlaps"]
        skipped = frame["status"] != "ok"
        frame[measures] = frame[measures].astype(object)
        frame.loc[skipped, measures] = self.settings["skip_marker"]
        return frame

    def ranks_frame(self, analyses: List[RankAnalysis]) -> pd.DataFrame:
        rows = []
        for analysis in analyses:
            table = analysis.table
            for i, dataset in enumerate(table.datasets):
                for j, method in enumerate(table.methods):
                    rows.append({"analysis": analysis.label, "dataset": dataset, "method": method,
                                 "rank": table.ranks[i, j]})
            for j, method in enumerate(table.methods):
                rows.append({"analysis": analysis.label, "dataset": "mean", "method": method,
                             "rank": table.mean_ranks[j]})
        return pd.DataFrame(rows, columns=["analysis", "dataset", "method", "rank"])

    def summary_document(self, report: EvaluationReport) -> Dict[str, Any]:
        cells = [{key: _plain(value) for key, value in row.items()}
                 for row in report.summary.to_dict(orient="records")]
        tests = []
        for analysis in report.analyses:
            entry: Dict[str, Any] = {
                "analysis": analysis.label,
                "theta": analysis.theta,
                "datasets": list(analysis.table.datasets),
                "methods": list(analysis.table.methods),
                "mean_ranks": [float(rank) for rank in analysis.table.mean_ranks],
            }
            result = analysis.result
            if result is not None:
                entry.update({
                    "chi2_f": result.chi2_f, "f_f": result.f_f, "df": [result.df1, result.df2],
                    "critical_value": result.critical_value, "reject": result.reject, "alpha": result.alpha,
                    "cd": result.cd, "groups": [[result.methods[j] for j in group] for group in result.groups]
                })
            tests.append(entry)
        return {
            "config": report.config.model_dump(),
            "cells": cells,
            "rank_tests": tests,
            "skipped": report.skipped,
            "errors": report.errors
        }

    def write_workbook(self, report: EvaluationReport, ranks: pd.DataFrame) -> Path:
        workbook = openpyxl.Workbook()
        workbook.remove(workbook.active)
        header_font = Font(bold=True, color="FFFFFF")
        header_fill = PatternFill(start_color="366092", end_color="366092", fill_type="solid")
        for title, frame in (("Summary", report.summary), ("Folds", report.folds), ("Ranks", ranks)):
            sheet = workbook.create_sheet(title)
            sheet.append(list(frame.columns))
            for cell in sheet[1]:
                cell.font = header_font
                cell.fill = header_fill
                cell.alignment = Alignment(horizontal="center")
            for row in frame.itertuples(index=False):
                sheet.append([_plain(value) for value in row])
            for row in sheet.iter_rows(min_row=2):
                for cell in row:
                    if isinstance(cell.value, float):
                        cell.number_format = "0.00000"
        path = self.path("workbook_file")
        workbook.save(path)
        return path

    def write(self, report: EvaluationReport) -> Dict[str, Any]:
        """
        Write every report file.

        Returns:
            Dictionary with 'success', 'files' and 'errors' entries
        """
        result: Dict[str, Any] = {"success": False, "files": [], "errors": list(report.errors)}
        self.output_dir.mkdir(parents=True, exist_ok=True)
        float_format = self.settings["float_format"]

        report.folds.to_csv(self.path("folds_file"), index=False, float_format=float_format)
        self._summary_for_csv(report.summary).to_csv(self.path("summary_file"), index=False,
                                                     float_format=float_format)
        ranks = self.ranks_frame(report.analyses)
        ranks.to_csv(self.path("ranks_file"), index=False, float_format=float_format)
        document = self.summary_document(report)
        self.path("summary_json").write_text(json.dumps(document, indent=2, sort_keys=True), encoding="utf-8")
        result["files"].extend(str(self.path(key)) for key in ("folds_file", "summary_file", "ranks_file",
                                                                 "summary_json"))

        for analysis in report.analyses:
            if analysis.result is None:
                continue
            target = self.output_dir / f"{self.settings['diagram_prefix']}_{analysis.label}"
            try:
                svg, text = emit_cd_diagram(analysis.result, target)
                result["files"].extend([str(svg), str(text)])
            except DiagramWriteError as e:
                result["errors"].append(str(e))

        if self.settings.get("xlsx") or report.config.report_xlsx:
            result["files"].append(str(self.write_workbook(report, ranks)))

        if report.models:
            models_dir = self.path("models_dir")
            for key, model in sorted(report.models.items()):
                result["files"].append(str(save_model(model, models_dir / f"{key}.gfmm")))

        result["success"] = not result["errors"]
        self.logger.info(f"Report written to {self.output_dir}: {len(result['files'])} file(s)")
        return result
