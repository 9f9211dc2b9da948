from pathlib import Path
from typing import List

from hypercircle.spherepipeline import SphereRealization
from hypercircle.svg import RenderOptions, render_svg, save_svg
from utils.artifacts import write_json

REPORT_FILE = 'sphere.json'
HALF_SVG = 'half_pattern.svg'


def save_sphere(out: Path, realization: SphereRealization, digest: str, fold: bool,
                opts: RenderOptions) -> List[Path]:
    out = Path(out)
    r = realization.result
    doc = {
        'input_hash': digest,
        'doubled': realization.doubled.to_dict(),
        'pattern': realization.sphere.to_dict(),
        'residuals': realization.residuals,
        'solver': dict(r.to_dict(), fold_symmetry=fold),
        'a': r.x_star.a,
        'b': r.x_star.b,
    }
    report_path = write_json(out / REPORT_FILE, doc)
    svg_path = out / HALF_SVG
    save_svg(render_svg(realization.pattern2d, realization.layout, [], opts), svg_path)
    return [report_path, svg_path]
