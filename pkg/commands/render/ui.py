from typing import Any, Dict


def show_render(result: Dict[str, Any]) -> None:
    print(result['message'] if result.get('success') else f"Error: {result['error']}")
    for path in result.get('artifacts', []):
        print(f"  wrote {path}")
