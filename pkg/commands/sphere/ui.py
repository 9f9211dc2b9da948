from typing import Any, Dict


def show_sphere(result: Dict[str, Any]) -> None:
    if result.get('success'):
        print(result['message'])
    else:
        print(f"Error: {result['error']}")
    for name, value in sorted(result.get('residuals', {}).items()):
        print(f"  {name} residual: {value:.3e}")
    for path in result.get('artifacts', []):
        print(f"  wrote {path}")
