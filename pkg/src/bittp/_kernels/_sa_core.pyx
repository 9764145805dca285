# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled annealing sweep kernel.

Must stay in operation-for-operation lockstep with ``pure.py`` (same PRNG,
same sweep order, same float arithmetic) so both kernels emit bit-identical
samples for a given seed.
"""

from libc.math cimport exp
from libc.stdlib cimport free, malloc

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from *:
    """
    static inline unsigned long long bittp_next_u64(unsigned long long *state) {
        unsigned long long z = (*state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    """
    unsigned long long bittp_next_u64(unsigned long long *state) nogil


DEF INV_2_53 = 1.0 / 9007199254740992.0


def run_reads(
    int num_vars,
    cnp.ndarray[cnp.int64_t, ndim=1] row_ptr,
    cnp.ndarray[cnp.int64_t, ndim=1] col_idx,
    cnp.ndarray[cnp.float64_t, ndim=1] values,
    cnp.ndarray[cnp.float64_t, ndim=1] linear,
    cnp.ndarray[cnp.float64_t, ndim=1] beta_schedule,
    cnp.ndarray[cnp.uint64_t, ndim=1] seeds,
):
    """Independent single-flip Metropolis runs over a geometric beta schedule.

    Returns a (num_reads, num_vars) uint8 array of final assignments.
    """
    cdef int num_reads = seeds.shape[0]
    cdef int num_sweeps = beta_schedule.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros(
        (num_reads, num_vars), dtype=np.uint8
    )
    cdef cnp.int64_t* rp = <cnp.int64_t*> row_ptr.data
    cdef cnp.int64_t* ci = <cnp.int64_t*> col_idx.data
    cdef double* vals = <double*> values.data
    cdef double* lin = <double*> linear.data
    cdef double* betas = <double*> beta_schedule.data
    cdef cnp.uint64_t* seed_arr = <cnp.uint64_t*> seeds.data
    cdef cnp.uint8_t* out_ptr = <cnp.uint8_t*> out.data

    cdef unsigned long long state, u
    cdef double* field
    cdef cnp.uint8_t* x
    cdef double beta, delta, sign
    cdef int r, i, t
    cdef cnp.int64_t k
    cdef bint accept

    with nogil:
        field = <double*> malloc(num_vars * sizeof(double))
        x = <cnp.uint8_t*> malloc(num_vars * sizeof(cnp.uint8_t))
        if field == NULL or x == NULL:
            free(field)
            free(x)
            with gil:
                raise MemoryError()
        for r in range(num_reads):
            state = seed_arr[r]
            for i in range(num_vars):
                u = bittp_next_u64(&state)
                x[i] = <cnp.uint8_t> (u >> 63)
            for i in range(num_vars):
                field[i] = lin[i]
            for i in range(num_vars):
                if x[i]:
                    for k in range(rp[i], rp[i + 1]):
                        field[ci[k]] += vals[k]
            for t in range(num_sweeps):
                beta = betas[t]
                for i in range(num_vars):
                    delta = (1 - 2 * <int> x[i]) * field[i]
                    if delta <= 0.0:
                        accept = True
                    else:
                        u = bittp_next_u64(&state)
                        accept = (u >> 11) * INV_2_53 < exp(-beta * delta)
                    if accept:
                        sign = -1.0 if x[i] else 1.0
                        x[i] ^= 1
                        for k in range(rp[i], rp[i + 1]):
                            field[ci[k]] += sign * vals[k]
            for i in range(num_vars):
                out_ptr[r * num_vars + i] = x[i]
        free(field)
        free(x)
    return out
