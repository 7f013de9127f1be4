"""Bundled example data.

Times to breakdown (minutes) of an insulating fluid between electrodes,
recorded at two test voltages (Nelson, 1972).  A classic Weibull data
set; the two sequences are in observation order, which matters because
record extraction depends on it.
"""

from __future__ import annotations

INSULATING_FLUID = {
    "kv34": (
        0.96, 4.15, 0.19, 0.78, 8.01, 31.75, 7.35, 6.50, 8.27, 33.91,
        32.52, 3.16, 4.85, 2.78, 4.67, 1.31, 12.06, 36.71, 72.89,
    ),
    "kv36": (
        1.97, 0.59, 2.58, 1.69, 2.71, 25.50, 0.35, 0.99, 3.99, 3.67,
        2.07, 0.96, 5.35, 2.90, 13.77,
    ),
}
