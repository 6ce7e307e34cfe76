"""
Report export and import.

JSON output is the pydantic dump of the report. CSV output is one row
per trial (columns in CSV_COLUMNS) preceded by '#' header lines echoing
the code version, the configuration, the summary and any excluded
trials, so both formats carry the same content.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Union
import io
import json
import logging
import os
import tempfile

import pandas as pd
from pydantic import BaseModel, ValidationError as PydanticValidationError

from src import __version__
from src.models.experiment import ExperimentConfig, ExperimentReport, SummaryReport, TrialRecord
from src.models.reports import SuiteReport
from src.utils.exceptions import ReportError, ValidationError

CSV_COLUMNS = ["trial", "seed", "Z", "V", "W", "event_E", "t2_ratio", "runtime_ms"]
SUITE_CSV_COLUMNS = ["inequality", "checked", "violations", "max_lhs_over_bound", "passed"]
FORMATS = ("json", "csv")

PathLike = Union[str, Path]


class ReportWriterService:
    """
    Writes and reads experiment and verification reports.
    """

    def __init__(self, logger: Optional[logging.Logger] = None) -> None:
        self.logger = logger or logging.getLogger(__name__)

    # ------------------------------------------------------------------
    # rendering

    def render(self, report: ExperimentReport, fmt: str) -> str:
        if fmt not in FORMATS:
            raise ValidationError(f"Unknown report format '{fmt}'", "format", fmt)
        if not report.records:
            raise ReportError("Refusing to export a report without trial records")
        return self._render_json(report) if fmt == "json" else self._render_csv(report)

    @staticmethod
    def _render_json(report: BaseModel) -> str:
        return report.model_dump_json(indent=2) + "\n"

    @staticmethod
    def _render_csv(report: ExperimentReport) -> str:
        included = report.included_records()
        excluded = [r.model_dump() for r in report.records if r.excluded]
        header = [
            f"# concentra {report.version}",
            "# config: " + json.dumps(report.config.fingerprint(), sort_keys=True),
            "# summary: " + report.summary.model_dump_json(),
            "# excluded: " + json.dumps(excluded, sort_keys=True),
        ]
        frame = pd.DataFrame(
            [{column: getattr(r, column) for column in CSV_COLUMNS} for r in included],
            columns=CSV_COLUMNS,
        )
        frame["seed"] = frame["seed"].map(str)
        frame["W"] = frame["W"].map(lambda w: "" if w is None or pd.isna(w) else str(int(w)))
        frame["event_E"] = frame["event_E"].map(lambda e: "" if e is None or pd.isna(e) else str(bool(e)).lower())
        frame["runtime_ms"] = frame["runtime_ms"].map(lambda t: "" if t is None or pd.isna(t) else repr(float(t)))
        frame["t2_ratio"] = frame["t2_ratio"].map(lambda r: repr(float(r)))
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, lineterminator="\n")
        return "\n".join(header) + "\n" + buffer.getvalue()

    # ------------------------------------------------------------------
    # writing

    def _atomic_write(self, path: PathLike, text: str) -> Path:
        """Write via a temporary sibling file and rename, so no partial file is left."""
        target = Path(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            handle, temporary = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
            try:
                with os.fdopen(handle, "w", encoding="utf-8", newline="") as stream:
                    stream.write(text)
                os.replace(temporary, target)
            except BaseException:
                if os.path.exists(temporary):
                    os.unlink(temporary)
                raise
        except OSError as e:
            raise ReportError(f"Cannot write report: {e}", str(target))
        return target

    def export_report(self, report: ExperimentReport, fmt: str, path: PathLike) -> Path:
        """
        Write an experiment report as JSON or CSV.

        Raises:
            ReportError: On empty reports or I/O failure
        """
        target = self._atomic_write(path, self.render(report, fmt))
        self.logger.info("Report written", extra={"path": str(target), "format": fmt, "records": len(report.records)})
        return target

    @staticmethod
    def _render_suite_csv(report: SuiteReport) -> str:
        """One row per inequality; the violation list stays in the JSON form."""
        frame = pd.DataFrame(
            [
                {
                    "inequality": r.inequality,
                    "checked": r.checked,
                    "violations": len(r.violations),
                    "max_lhs_over_bound": repr(float(r.max_lhs_over_bound)),
                    "passed": str(r.passed).lower(),
                }
                for r in report.reports
            ],
            columns=SUITE_CSV_COLUMNS,
        )
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, lineterminator="\n")
        header = [f"# concentra {report.version}", "# config: " + json.dumps(report.config, sort_keys=True)]
        return "\n".join(header) + "\n" + buffer.getvalue()

    def write_verification_report(self, report: SuiteReport, path: PathLike, fmt: str = "json") -> Path:
        if fmt not in FORMATS:
            raise ValidationError(f"Unknown report format '{fmt}'", "format", fmt)
        text = self._render_json(report) if fmt == "json" else self._render_suite_csv(report)
        target = self._atomic_write(path, text)
        self.logger.info("Verification report written", extra={"path": str(target), "passed": report.passed})
        return target

    def write_json(self, payload: Dict[str, Any], path: PathLike) -> Path:
        return self._atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")

    def write_table(self, rows: List[Dict[str, Any]], columns: List[str], path: PathLike) -> Path:
        """Plain CSV of `rows` restricted to `columns`."""
        buffer = io.StringIO()
        pd.DataFrame(rows, columns=columns).to_csv(buffer, index=False, lineterminator="\n")
        return self._atomic_write(path, f"# concentra {__version__}\n" + buffer.getvalue())

    # ------------------------------------------------------------------
    # reading

    def load_report(self, path: PathLike) -> ExperimentReport:
        """Parse a report written by export_report (format from the suffix or content)."""
        source = Path(path)
        try:
            text = source.read_text(encoding="utf-8")
        except OSError as e:
            raise ReportError(f"Cannot read report: {e}", str(source))
        if text.lstrip().startswith("{"):
            try:
                return ExperimentReport.model_validate_json(text)
            except PydanticValidationError as e:
                raise ReportError(f"Malformed JSON report: {e}", str(source))
        return self._parse_csv(text, str(source))

    def _parse_csv(self, text: str, source: str) -> ExperimentReport:
        meta: Dict[str, str] = {}
        body: List[str] = []
        for line in text.splitlines():
            if line.startswith("# "):
                key, _, value = line[2:].partition(": ")
                meta[key] = value
            else:
                body.append(line)
        version_line = next((key for key in meta if key.startswith("concentra ")), None)
        if version_line is None or not {"config", "summary", "excluded"} <= meta.keys():
            raise ReportError("CSV report is missing its header block", source)

        try:
            frame = pd.read_csv(
                io.StringIO("\n".join(body)),
                dtype={"seed": str, "W": str, "event_E": str, "runtime_ms": str},
                keep_default_na=False,
                float_precision="round_trip",
            )
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise ReportError(f"Failed to parse CSV report: {e}", source)
        missing = [c for c in CSV_COLUMNS if c not in frame.columns]
        if missing:
            raise ReportError(f"CSV report lacks columns {missing}", source)

        records = [
            TrialRecord(
                trial=int(row["trial"]),
                seed=int(row["seed"]),
                Z=int(row["Z"]),
                V=int(row["V"]),
                W=int(row["W"]) if row["W"] != "" else None,
                event_E=None if row["event_E"] == "" else row["event_E"] == "true",
                t2_ratio=float(row["t2_ratio"]),
                runtime_ms=float(row["runtime_ms"]) if row["runtime_ms"] != "" else None,
            )
            for row in frame.to_dict("records")
        ]
        records.extend(TrialRecord(**item) for item in json.loads(meta["excluded"]))
        records.sort(key=lambda r: r.trial)
        try:
            return ExperimentReport(
                version=version_line.split(" ", 1)[1],
                config=ExperimentConfig(**json.loads(meta["config"])),
                summary=SummaryReport.model_validate_json(meta["summary"]),
                records=records,
            )
        except PydanticValidationError as e:
            raise ReportError(f"Malformed CSV report header: {e}", source)
