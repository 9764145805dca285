"""Pure-Python annealing sweep kernel.

Mirrors ``_sa_core.pyx`` operation for operation (same PRNG, same sweep
order, same float arithmetic) so both kernels emit bit-identical samples
for a given seed. Keep the two in lockstep when editing either.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0


def _next_u64(state: int) -> tuple[int, int]:
    # splitmix64: one 64-bit output per call
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z = z ^ (z >> 31)
    return state, z


def run_reads(
    num_vars: int,
    row_ptr: np.ndarray,
    col_idx: np.ndarray,
    values: np.ndarray,
    linear: np.ndarray,
    beta_schedule: np.ndarray,
    seeds: np.ndarray,
) -> np.ndarray:
    """Independent single-flip Metropolis runs over a geometric beta schedule.

    Returns a (num_reads, num_vars) uint8 array of final assignments.
    """
    row_ptr_l = [int(v) for v in row_ptr]
    col_idx_l = [int(v) for v in col_idx]
    values_l = [float(v) for v in values]
    linear_l = [float(v) for v in linear]
    betas = [float(b) for b in beta_schedule]
    out = np.zeros((len(seeds), num_vars), dtype=np.uint8)

    for r, seed in enumerate(seeds):
        state = int(seed) & _MASK
        x = [0] * num_vars
        for i in range(num_vars):
            state, u = _next_u64(state)
            x[i] = u >> 63
        field = linear_l.copy()
        for i in range(num_vars):
            if x[i]:
                for k in range(row_ptr_l[i], row_ptr_l[i + 1]):
                    field[col_idx_l[k]] += values_l[k]
        for beta in betas:
            for i in range(num_vars):
                delta = (1 - 2 * x[i]) * field[i]
                if delta <= 0.0:
                    accept = True
                else:
                    state, u = _next_u64(state)
                    accept = (u >> 11) * _INV_2_53 < math.exp(-beta * delta)
                if accept:
                    sign = -1.0 if x[i] else 1.0
                    x[i] ^= 1
                    for k in range(row_ptr_l[i], row_ptr_l[i + 1]):
                        field[col_idx_l[k]] += sign * values_l[k]
        out[r, :] = x
    return out
