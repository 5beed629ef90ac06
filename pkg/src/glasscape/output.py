"""Deterministic CSV and structured-text writers.

Every file starts with comment lines recording the tool version, a hash of
the resolved run configuration and the seed, so identical configurations
produce byte-identical outputs.  Floats are written with 17 significant
digits (repr round-trip), locale-independent.
"""

from __future__ import annotations

import hashlib
import math
from pathlib import Path

__all__ = [
    "config_hash",
    "format_float",
    "write_csv",
    "write_structured",
]


def config_hash(config: dict) -> str:
    canonical = "\n".join(f"{k}={config[k]}" for k in sorted(config))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def format_float(x: float) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return repr(float(x))


def _header(version: str, cfg_hash: str, seed: int | None) -> list[str]:
    lines = [f"# glasscape {version}", f"# config {cfg_hash}"]
    if seed is not None:
        lines.append(f"# seed {seed}")
    return lines


def write_csv(
    path: Path,
    columns: list[str],
    rows: list[tuple],
    version: str,
    cfg_hash: str,
    seed: int | None = None,
) -> None:
    lines = _header(version, cfg_hash, seed)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(
            ",".join(
                format_float(v) if isinstance(v, float) else str(v) for v in row
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_structured(
    path: Path,
    pairs: list[tuple[str, object]],
    version: str,
    cfg_hash: str,
    seed: int | None = None,
) -> None:
    lines = _header(version, cfg_hash, seed)
    for key, value in pairs:
        if isinstance(value, float):
            lines.append(f"{key} {format_float(value)}")
        else:
            lines.append(f"{key} {value}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
