import logging
from typing import Any, Dict, Optional

from hypercircle.energy import AngleData, hyperbolic_excess
from hypercircle.validator import (
    EQ_TOL,
    PolytopeReport,
    check_bao_bonahon,
    check_rivin,
    check_schlenker,
)
from commands.ingest import ingest, resolve_output_dir, resolve_threads, run_hash
from commands.validate.data import save_report
from utils.env_config import EnvConfig
from utils.run_config import load_run_config

logger = logging.getLogger(__name__)


def run_checks(
    data: AngleData,
    cap: Optional[int] = None,
    threads: int = 1,
    require_exhaustive: bool = False,
) -> PolytopeReport:
    """Pick the theorem that applies to the surface and test the data against it."""
    c = data.complex
    if c.genus == 0:
        if not c.v1:
            return check_rivin(c, data.theta)
        return check_bao_bonahon(c, data.theta)
    excess = hyperbolic_excess(data.Theta, c.euler_characteristic)
    geometry = 'euclidean' if abs(excess) <= EQ_TOL else 'hyperbolic'
    return check_schlenker(
        c, data.theta, data.Theta,
        cap=cap if cap is not None else EnvConfig.get_validator_cap(),
        geometry=geometry,
        threads=threads,
        require_exhaustive=require_exhaustive,
    )


def cmd_validate(
    config: str,
    output_dir: Optional[str] = None,
    cap: Optional[int] = None,
    threads: Optional[int] = None,
    exhaustive: bool = False,
) -> Dict[str, Any]:
    cfg = load_run_config(config)
    out = resolve_output_dir(cfg, output_dir)
    ingested = ingest(cfg)
    report = run_checks(ingested.data, cap, resolve_threads(cfg, threads), exhaustive)
    path = save_report(out, report, run_hash(cfg), ingested.to_dict())

    if not report.passed:
        failed = ', '.join(str(k) for k in report.failed())
        return {
            'success': False,
            'exit_code': 1,
            'error': f"{report.theorem} conditions {failed} fail",
            'report': report.to_dict(),
            'artifacts': [str(path)],
        }
    message = f"{report.theorem}: all conditions hold"
    if report.sampled:
        message += " (sampled sweep)"
    return {
        'success': True,
        'exit_code': 0,
        'message': message,
        'report': report.to_dict(),
        'artifacts': [str(path)],
    }
