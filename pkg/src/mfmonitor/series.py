"""Container for matrix-valued time series."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ArgumentError, DomainError

Window = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class MatrixSeries:
    """Ordered sequence of ``p1 x p2`` real matrices.

    Observations are stored time-major in a read-only C-contiguous float64
    array of shape ``(T, p1, p2)``. Time indices are 0-based; windows are
    half-open ``(start, stop)`` pairs.

    Parameters
    ----------
    data : array_like
        Array of shape ``(T, p1, p2)``. A 2-D array is read as a single
        observation.
    time_labels : sequence, optional
        One label per observation (e.g. dates).
    """

    data: np.ndarray
    time_labels: Optional[Tuple] = field(default=None)

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, order="C", copy=True)
        if arr.ndim == 2:
            arr = arr[np.newaxis]
        if arr.ndim != 3:
            raise ArgumentError(f"expected a (T, p1, p2) array, got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ArgumentError(f"empty dimension in shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise DomainError(f"non-finite entry at (t={bad[0]}, i={bad[1]}, j={bad[2]})")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        if self.time_labels is not None:
            labels = tuple(self.time_labels)
            if len(labels) != arr.shape[0]:
                raise ArgumentError(
                    f"{len(labels)} time labels for {arr.shape[0]} observations"
                )
            object.__setattr__(self, "time_labels", labels)

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def p1(self) -> int:
        return self.data.shape[1]

    @property
    def p2(self) -> int:
        return self.data.shape[2]

    @property
    def dims(self) -> Tuple[int, int]:
        return self.data.shape[1], self.data.shape[2]

    def __len__(self) -> int:
        return self.T

    def __getitem__(self, t):
        return self.data[t]

    def check_window(self, window: Window | Sequence[int] | range) -> Window:
        """Validate a half-open window and return it as ``(start, stop)``."""
        if isinstance(window, range):
            if window.step != 1:
                raise ArgumentError("windows must be contiguous")
            start, stop = window.start, window.stop
        else:
            start, stop = (int(v) for v in window)
        if stop <= start:
            raise ArgumentError(f"empty window [{start}, {stop})")
        if start < 0 or stop > self.T:
            raise ArgumentError(f"window [{start}, {stop}) outside series of length {self.T}")
        return start, stop

    def slice(self, start: int, stop: Optional[int] = None) -> "MatrixSeries":
        stop = self.T if stop is None else stop
        start, stop = self.check_window((start, stop))
        labels = None if self.time_labels is None else self.time_labels[start:stop]
        return MatrixSeries(self.data[start:stop], labels)

    def transpose(self) -> "MatrixSeries":
        """Swap rows and columns, so column-factor changes can be monitored."""
        return MatrixSeries(self.data.transpose(0, 2, 1), self.time_labels)
