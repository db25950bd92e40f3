"""CSV and key=value emission with reproducible formatting.

Every output file starts with '#' metadata lines (full configuration echo,
package version, timestamp); floats print with 17 significant digits so
equal doubles produce byte-equal text.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__


def fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def metadata_lines(config_echo: dict[str, str], timestamp: bool = True) -> list[str]:
    lines = [f"# npbelab_version = {__version__}"]
    if timestamp:
        lines.append(f"# timestamp = {time.strftime('%Y-%m-%dT%H:%M:%S%z')}")
    for key, value in config_echo.items():
        lines.append(f"# {key} = {value}")
    return lines


def write_csv(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence],
    config_echo: dict[str, str] | None = None,
    timestamp: bool = True,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = metadata_lines(config_echo or {}, timestamp=timestamp)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_kv(
    path: str | Path,
    pairs: Iterable[tuple[str, object]],
    config_echo: dict[str, str] | None = None,
    timestamp: bool = True,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = metadata_lines(config_echo or {}, timestamp=timestamp)
    for key, value in pairs:
        lines.append(f"{key} = {fmt(value)}")
    path.write_text("\n".join(lines) + "\n")
    return path
