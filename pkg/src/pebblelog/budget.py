"""Default size budgets.

Every exhaustive routine takes an explicit ``budget`` argument; when it is
``None`` the default for that routine is used.  ``PEBBLELOG_BUDGET`` in the
environment replaces all defaults with one integer.
"""

import os

DEFAULTS = {
    "enumerate": 10**6,  # structures produced by enumerate_structures
    "pebble": 10**7,  # candidate partial maps
    "canonical": 10**7,
    "synthesis": 2 * 10**6,  # candidate rule bodies
    "so_branches": 2**20,  # second-order branches / SAT decisions
    "ground": 5 * 10**6,  # nodes in a grounded formula
    "equiv": 10**6,  # type computations in equiv_q
}


def resolve(kind, budget=None):
    if budget is not None:
        return int(budget)
    env = os.environ.get("PEBBLELOG_BUDGET")
    if env:
        return int(env)
    return DEFAULTS[kind]
