"""Reader for the CLI's CSV format: ``# key=value`` header lines, one
column-name line, then numeric rows."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class MissingColumnError(ValueError):
    """A recipe's required column is absent from the input CSV."""


class EmptyInputError(ValueError):
    """The input CSV holds no data rows."""


@dataclass
class Table:
    path: Path
    header: dict[str, str]
    columns: list[str]
    data: dict[str, np.ndarray]

    def __len__(self) -> int:
        return 0 if not self.columns else len(self.data[self.columns[0]])

    def require(self, *names: str) -> None:
        for name in names:
            if name not in self.data:
                raise MissingColumnError(
                    f"{self.path}: missing column {name!r} "
                    f"(found: {', '.join(self.columns) or 'none'})")

    def __getitem__(self, name: str) -> np.ndarray:
        self.require(name)
        return self.data[name]

    def label(self) -> str:
        """Short curve label from the pulse parameters in the header."""
        parts = [self.header.get("config.mechanism")
                 or self.header.get("mechanism"),
                 self.header.get("config.geometry")
                 or self.header.get("geometry")]
        parts = [p for p in parts if p]
        return " ".join(parts) if parts else self.path.stem


def read_table(path) -> Table:
    path = Path(path)
    header: dict[str, str] = {}
    columns: list[str] = []
    rows: list[list[float]] = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                key, _, value = line.lstrip("# ").partition("=")
                header[key.strip()] = value.strip()
            elif not columns:
                columns = [c.strip() for c in line.split(",")]
            else:
                rows.append([float(v) for v in line.split(",")])
    if not columns or not rows:
        raise EmptyInputError(f"{path}: no data rows")
    array = np.array(rows, dtype=float)
    if array.shape[1] != len(columns):
        raise ValueError(f"{path}: row width does not match column count")
    data = {name: array[:, j] for j, name in enumerate(columns)}
    return Table(path=path, header=header, columns=columns, data=data)
