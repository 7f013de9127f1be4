"""Upper record values and their extraction from raw sequences."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidDataError
from .rng import exp_record_matrix


@dataclass(frozen=True)
class RecordSeries:
    """A strictly increasing sequence of positive upper record values.

    ``n`` follows the indexing convention in which the series holds
    records ``r_0, ..., r_n``, i.e. ``n = len(values) - 1``.
    """

    values: NDArray[np.float64] = field(repr=False)
    label: str = ""

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidDataError("record series must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise InvalidDataError("record values must be finite")
        if arr[0] <= 0.0:
            raise InvalidDataError("record values must be strictly positive")
        if np.any(np.diff(arr) <= 0.0):
            raise InvalidDataError("record values must be strictly increasing")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        """Index of the last record (series length minus one)."""
        return self.values.size - 1

    def __len__(self) -> int:
        return self.values.size


def extract_upper_records(data: ArrayLike, label: str = "") -> RecordSeries:
    """Extract the upper record values from a raw observation sequence.

    The first observation is always a record; afterwards an observation
    is a record only if it strictly exceeds every earlier one.  Ties do
    not set new records.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidDataError("raw data must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise InvalidDataError("raw data must be finite")
    if arr[0] <= 0.0:
        raise InvalidDataError("observations must be strictly positive")
    running = np.maximum.accumulate(arr)
    keep = np.empty(arr.size, dtype=bool)
    keep[0] = True
    keep[1:] = arr[1:] > running[:-1]
    return RecordSeries(arr[keep], label=label)


def exponential_records(n: int, seed: int, stream_id: int = 0) -> RecordSeries:
    """Records ``r_0..r_n`` of a unit-rate exponential distribution.

    Exploits the memoryless property: successive record increments are
    independent standard exponentials, so the records are partial sums.
    """
    if n < 0:
        raise InvalidDataError("n must be non-negative")
    return RecordSeries(exp_record_matrix(seed, [stream_id], n + 1)[0])


def weibull_records(n: int, alpha: float, beta: float, seed: int,
                    stream_id: int = 0) -> RecordSeries:
    """Simulate records ``r_0..r_n`` from a Weibull distribution.

    If ``S`` is an exponential record value then ``alpha * S**(1/beta)``
    is the corresponding Weibull record value, because the monotone map
    preserves the record structure.
    """
    if alpha <= 0.0 or beta <= 0.0:
        raise InvalidDataError("alpha and beta must be positive")
    s = exp_record_matrix(seed, [stream_id], n + 1)[0]
    return RecordSeries(alpha * s ** (1.0 / beta))
