# cython: boundscheck=False, wraparound=False
"""Compiled fixpoint sweep for the greatest strategy family.

Mirrors ``_pebble_py.sweep_fixpoint`` line for line.
"""


def sweep_fixpoint(unsigned char[:] alive, int[:] parent_ptr, int[:] parent_idx,
                   int[:] grp_ptr, int[:] ext_ptr, int[:] ext_idx, int[:] order):
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t t, i, p, g, e
    cdef bint changed = True, dead, found
    cdef int sweeps = 0
    while changed:
        changed = False
        sweeps += 1
        for t in range(n):
            i = order[t]
            if not alive[i]:
                continue
            dead = False
            for p in range(parent_ptr[i], parent_ptr[i + 1]):
                if not alive[parent_idx[p]]:
                    dead = True
                    break
            if not dead:
                for g in range(grp_ptr[i], grp_ptr[i + 1]):
                    found = False
                    for e in range(ext_ptr[g], ext_ptr[g + 1]):
                        if alive[ext_idx[e]]:
                            found = True
                            break
                    if not found:
                        dead = True
                        break
            if dead:
                alive[i] = 0
                changed = True
    return sweeps
