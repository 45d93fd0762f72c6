"""Pure-Python fixpoint sweep, used when the compiled kernel is unavailable.

Same contract as the Cython ``sweep_fixpoint``: all arrays are flat integer
sequences in CSR layout, ``alive`` is mutated in place, and the return value
is the number of full sweeps performed.
"""


def sweep_fixpoint(alive, parent_ptr, parent_idx, grp_ptr, ext_ptr, ext_idx, order):
    sweeps = 0
    changed = True
    while changed:
        changed = False
        sweeps += 1
        for i in order:
            if not alive[i]:
                continue
            dead = False
            for p in range(parent_ptr[i], parent_ptr[i + 1]):
                if not alive[parent_idx[p]]:
                    dead = True
                    break
            if not dead:
                for g in range(grp_ptr[i], grp_ptr[i + 1]):
                    for e in range(ext_ptr[g], ext_ptr[g + 1]):
                        if alive[ext_idx[e]]:
                            break
                    else:
                        dead = True
                        break
            if dead:
                alive[i] = 0
                changed = True
    return sweeps
