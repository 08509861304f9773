"""Helpers recomputing per-level structural quantities from peeling traces.

Used by the unit tests and the acceptance suite to check the split lower
bound, the pair-set and point-set upper bounds, the layer-weight bound, the
ladder payoff floor and the telescoping accounting on realized runs.
"""

import numpy as np

from peelembed.metric import subset_stats


def sub_positions(order, ids):
    """Slots 1..len(ids) of ids induced by a global left-right order."""
    members = set(ids)
    return {p: slot for slot, p in enumerate((q for q in order if q in members), 1)}


def set_weight(m, ids):
    if len(ids) < 2:
        return 0.0
    return subset_stats(m, ids).weight_sum


def set_diameter(m, ids):
    return subset_stats(m, ids).diameter


def cross_weight(m, a_ids, c_ids):
    return float(m.dist[np.ix_(list(a_ids), list(c_ids))].sum())


def la_cross_value(m, pos, a_ids, c_ids):
    """Sum of w_ac * |y_a - y_c| over the A x C pairs."""
    a = list(a_ids)
    c = list(c_ids)
    pa = np.array([pos[p] for p in a], dtype=float)[:, None]
    pc = np.array([pos[p] for p in c], dtype=float)[None, :]
    return float((m.dist[np.ix_(a, c)] * np.abs(pa - pc)).sum())


def split_lower_bound(m, a_ids, c_ids):
    """(n_C / 2) * (W_AC - n_A * n_C * D_C), the realized-split floor."""
    n_c = len(c_ids)
    return (n_c / 2.0) * (
        cross_weight(m, a_ids, c_ids) - len(a_ids) * n_c * set_diameter(m, c_ids)
    )


def pair_set_upper_bound(m, n, a_ids, c_ids):
    """(n - n_C / 2) * (W_AC + n_A * n_C * D_C), valid for any arrangement."""
    n_c = len(c_ids)
    return (n - n_c / 2.0) * (
        cross_weight(m, a_ids, c_ids) + len(a_ids) * n_c * set_diameter(m, c_ids)
    )


def point_set_upper_bound(m, n, p, c_ids):
    """(W_pC + n_C * D_C) * (n - n_C / 2) for a single point p outside C."""
    n_c = len(c_ids)
    w_pc = float(m.dist[p, list(c_ids)].sum())
    return (w_pc + n_c * set_diameter(m, c_ids)) * (n - n_c / 2.0)


def hc_ladder_payoff(m, tree, a_ids):
    """Tree value restricted to pairs with at least one endpoint in A."""
    members = set(a_ids)
    total = 0.0
    stack = [(tree.root, False)]
    done = []
    while stack:
        node, expanded = stack.pop()
        if not isinstance(node, tuple):
            done.append([node])
            continue
        if expanded:
            right = done.pop()
            left = done.pop()
            size = len(left) + len(right)
            for i in left:
                for j in right:
                    if i in members or j in members:
                        total += size * m.dist[i, j]
            done.append(left + right)
        else:
            stack.extend(((node, True), (node[1], False), (node[0], False)))
    return total
