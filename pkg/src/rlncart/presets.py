"""Hand-set optimal weight tables for the 1SV and 2SV networks.

Each table row lists, for one segment, the active input lines that carry
weight ``w_max``; every other synapse is 0.  Angle lines are 0-5 (intervals
1-6), velocity lines 6-8 (intervals 1-3).
"""

from __future__ import annotations

from fractions import Fraction

from .encoding import StateMode

# [neuron][segment] -> lines at full weight; neuron 0 is -F, neuron 1 is +F.
OPTIMAL_1SV: tuple[tuple[tuple[int, ...], ...], ...] = (
    ((0,), (1,), (2,)),
    ((5,), (4,), (3,)),
)

# The two-variable table is not mirror-symmetric, and patterns
# (angle 3, velocity 1) and (angle 2, velocity 2) appear under both neurons;
# those inputs tie at the network level and resolve to -F.
OPTIMAL_2SV: tuple[tuple[tuple[int, ...], ...], ...] = (
    ((0, 7), (0, 8), (1, 7), (1, 8), (2, 6), (2, 7), (3, 7), (4, 8)),
    ((5, 7), (5, 6), (4, 7), (4, 6), (3, 8), (2, 6), (1, 7), (0, 6)),
)


def optimal_table(mode: StateMode, w_max: Fraction | int = 8) -> list[list[list[Fraction]]]:
    """Expand the preset for ``mode`` into a full ``[neuron][segment][synapse]`` table."""
    if mode is StateMode.ONE_SV:
        rows, n_inputs = OPTIMAL_1SV, 6
    else:
        rows, n_inputs = OPTIMAL_2SV, 9
    w = Fraction(w_max)
    return [
        [[w if i in lines else Fraction(0) for i in range(n_inputs)] for lines in neuron]
        for neuron in rows
    ]
