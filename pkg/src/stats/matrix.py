"""
Named-column observation matrices fed to the analyses.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from src.utils.errors import AllColumnsConstant, InvariantViolation


@dataclass(frozen=True)
class DataMatrix:
    """Rows are observations (trials or frames); columns are named variables."""
    columns: Tuple[str, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        columns = tuple(str(name) for name in self.columns)
        if len(set(columns)) != len(columns):
            raise InvariantViolation(f"column names must be unique: {columns}")
        values = np.array(self.values, dtype=np.float64)
        if values.ndim == 1 and len(columns) == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2 or values.shape[1] != len(columns):
            raise InvariantViolation(
                f"values of shape {values.shape} do not match {len(columns)} columns"
            )
        values.setflags(write=False)
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "values", values)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]

    def select(self, names: Sequence[str]) -> "DataMatrix":
        positions = [self.columns.index(name) for name in names]
        return DataMatrix(columns=tuple(names), values=self.values[:, positions])


def drop_constant_columns(matrix: DataMatrix) -> Tuple[DataMatrix, List[str]]:
    """
    Remove zero-variance columns.

    Returns:
        The reduced matrix and the dropped column names, in column order

    Raises:
        AllColumnsConstant: nothing would survive
    """
    if matrix.n_rows == 0:
        raise AllColumnsConstant("matrix has no rows")
    spread = np.ptp(matrix.values, axis=0)
    constant = spread == 0
    dropped = [name for name, flag in zip(matrix.columns, constant) if flag]
    if constant.all():
        raise AllColumnsConstant(f"every column is constant: {', '.join(matrix.columns)}")
    if not dropped:
        return matrix, []
    kept = [name for name, flag in zip(matrix.columns, constant) if not flag]
    return matrix.select(kept), dropped
