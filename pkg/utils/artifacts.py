"""
Artifact I/O: JSON documents with fixed-digit numbers and input hashing.
"""

import hashlib
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from hypercircle.errors import InputError

logger = logging.getLogger(__name__)


def fmt17(x: float) -> Union[float, str]:
    """Float written with 17 significant digits; non-finite values as strings."""
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    return float(f"{x:.17g}")


def to_plain(obj: Any) -> Any:
    """JSON-ready copy: numpy values unwrapped, complex as [re, im], floats at 17 digits."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [fmt17(obj.real), fmt17(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return fmt17(obj)
    if isinstance(obj, (frozenset, set)):
        return sorted(to_plain(v) for v in obj)
    return obj


def canonical_json(doc: Any) -> str:
    return json.dumps(to_plain(doc), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def input_hash(doc: Any) -> str:
    return "sha256:" + hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()


def write_json(path: Union[str, Path], doc: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_plain(doc), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.debug("wrote %s", path)
    return path


def read_json(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"file not found: {path}", {'path': str(path)})
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}", {'path': str(path)}) from e
