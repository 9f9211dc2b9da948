from pathlib import Path
from typing import Any, Dict, List

from hypercircle.svg import RenderOptions, render_svg, save_svg
from utils.artifacts import read_json, write_json

SOLUTION_FILE = 'solution.json'
GENERATORS_FILE = 'generators.json'
SUMMARY_FILE = 'summary.json'
TRACE_FILE = 'trace.json'
DOMAIN_SVG = 'domain.svg'
COVER_SVG = 'cover.svg'


def solution_document(cfg, run) -> Dict[str, Any]:
    tri = run.tri
    x = run.result.x_star
    return {
        'run': cfg.model_dump(mode='json', exclude_none=True),
        'seed_vertex': run.layout.seed_vertex,
        'edges': [list(e) for e in tri.edges],
        'triangles': [list(t) for t in tri.triangles],
        'redundant': list(tri.redundant),
        'v1': sorted(tri.v1),
        'a': x.a,
        'b': x.b,
        'l': run.metric.l,
        'r': run.metric.r,
    }


def generators_document(run) -> Dict[str, Any]:
    gens = []
    for g in run.generators:
        doc = g.to_dict()
        doc['trace'] = g.trace
        gens.append(doc)
    return {
        'genus': run.data.complex.genus,
        'nontrivial': sum(1 for g in run.generators if not g.trivial),
        'generators': gens,
    }


def save_figures(out: Path, pattern, layout, copies, opts: RenderOptions) -> List[Path]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    domain_path, cover_path = out / DOMAIN_SVG, out / COVER_SVG
    save_svg(render_svg(pattern, layout, [], opts), domain_path)
    save_svg(render_svg(pattern, layout, copies, opts), cover_path)
    return [domain_path, cover_path]


def save_run(out: Path, cfg, ingested, run, summary: Dict[str, Any], opts: RenderOptions,
             keep_trace: bool) -> List[Path]:
    out = Path(out)
    summary = dict(summary, complex=ingested.to_dict())
    paths = [
        write_json(out / SOLUTION_FILE, solution_document(cfg, run)),
        write_json(out / GENERATORS_FILE, generators_document(run)),
        write_json(out / SUMMARY_FILE, summary),
    ]
    if keep_trace:
        paths.append(write_json(out / TRACE_FILE, run.result.trace))
    paths += save_figures(out, run.pattern, run.layout, run.copies, opts)
    return paths


def load_solution(run_dir: Path) -> Dict[str, Any]:
    return read_json(Path(run_dir) / SOLUTION_FILE)
