# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; expression-for-expression twin of pure.py.

Both backends must stay bit-identical: same libm calls, same operation
order, and the extension is built with -ffp-contract=off.
"""

from libc.math cimport exp


cpdef double bpr_travel_time(double freeflow_min, double volume_vph, double capacity_vph, double alpha=0.15):
    cdef double vc = volume_vph / capacity_vph
    cdef double vc2
    if vc <= 0.0:
        return freeflow_min
    vc2 = vc * vc
    return freeflow_min * (1.0 + alpha * (vc2 * vc2))


cpdef list bpr_travel_times(list freeflow_min, list volume_vph, list capacity_vph, double alpha=0.15):
    cdef Py_ssize_t i, n = len(freeflow_min)
    cdef list out = [0.0] * n
    for i in range(n):
        out[i] = bpr_travel_time(<double>freeflow_min[i], <double>volume_vph[i], <double>capacity_vph[i], alpha)
    return out


cpdef list logit_probabilities(list utilities, double scale):
    cdef Py_ssize_t i, n = len(utilities)
    cdef double best = <double>utilities[0]
    cdef double u, w, total = 0.0
    cdef list weights = [0.0] * n
    for i in range(1, n):
        u = <double>utilities[i]
        if u > best:
            best = u
    for i in range(n):
        w = exp((<double>utilities[i] - best) / scale)
        weights[i] = w
        total += w
    for i in range(n):
        weights[i] = <double>weights[i] / total
    return weights


cpdef int logit_choice(list utilities, double scale, double draw):
    cdef list probs = logit_probabilities(utilities, scale)
    cdef double cum = 0.0
    cdef Py_ssize_t i, n = len(probs)
    for i in range(n):
        cum += <double>probs[i]
        if draw < cum:
            return <int>i
    return <int>(n - 1)
