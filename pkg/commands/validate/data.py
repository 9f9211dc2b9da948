from pathlib import Path
from typing import Any, Dict

from hypercircle.validator import PolytopeReport
from utils.artifacts import write_json

REPORT_FILE = 'validation.json'


def save_report(out: Path, report: PolytopeReport, digest: str, complex_info: Dict[str, Any]) -> Path:
    doc = report.to_dict()
    doc['input_hash'] = digest
    doc['complex'] = complex_info
    return write_json(Path(out) / REPORT_FILE, doc)
