from typing import Any, Dict

from commands.validate.ui import show_report


def show_summary(summary: Dict[str, Any]) -> None:
    print(f"Input: {summary['input_kind']} (genus {summary['genus']}, {summary['input_hash']})")
    print(f"Solver: {summary['iterations']} iterations, |g| = {summary['grad_norm']:.3e}, "
          f"{summary['threads']} thread(s)")
    print(f"Residuals: angle {summary['max_angle_residual']:.3e}, cone {summary['max_cone_residual']:.3e}")
    layout = summary.get('layout_residuals', {})
    if layout:
        print("Layout: " + ", ".join(f"{k} {v:.3e}" for k, v in sorted(layout.items())))
    print(f"Generators: {summary['generators']} nontrivial, {summary['tiles']} tiles drawn")


def show_uniformize(result: Dict[str, Any]) -> None:
    if result.get('success'):
        show_summary(result['summary'])
        print(result['message'])
    else:
        print(f"Error: {result['error']}")
        if 'report' in result:
            show_report(result['report'])
    for path in result.get('artifacts', []):
        print(f"  wrote {path}")
