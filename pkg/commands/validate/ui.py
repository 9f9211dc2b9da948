from typing import Any, Dict

MAX_CERTIFICATES = 10


def show_report(report: Dict[str, Any]) -> None:
    print(f"Theorem: {report['theorem']} ({report['geometry']})")
    for k, ok in report['conditions'].items():
        print(f"  condition {k}: {'ok' if ok else 'FAILED'}")
    if report['sampled']:
        print("  warning: the sweep was sampled, not exhaustive")
    certificates = report.get('certificates', [])
    for cert in certificates[:MAX_CERTIFICATES]:
        print(f"  certificate: {cert}")
    if len(certificates) > MAX_CERTIFICATES:
        print(f"  ... {len(certificates) - MAX_CERTIFICATES} more in the report file")


def show_validate(result: Dict[str, Any]) -> None:
    if 'report' in result:
        show_report(result['report'])
    if result.get('success'):
        print(result['message'])
    else:
        print(f"Error: {result['error']}")
    for path in result.get('artifacts', []):
        print(f"  wrote {path}")
