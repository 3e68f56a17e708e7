"""Incremental counters must equal from-scratch recomputation at every step.

The recounts below are written straight off the definitions, sharing no code
with the solver kernels; the snapshot slabs record counter state after each
variable selection.
"""

import numpy as np

import fixsat
from fixsat import GeneratorConfig
from fixsat.solver import run_phase1, run_phase2


def _recount_selection(lits, in_z, n):
    pos = lits > 0
    v = np.abs(lits)
    inz = in_z[v]
    pos_out = (pos & ~inz).sum(1)
    neg_in = (~pos & inz).sum(1)
    unique = (pos_out == 1) & (neg_in == 0)
    u = np.zeros(n + 1, np.int64)
    if unique.any():
        the_var = np.where(pos & ~inz, v, 0)[unique].sum(1)
        np.add.at(u, the_var, 1)
    return pos_out, neg_in, u, int(unique.sum())


def _recount_repair(lits, in_z, in_zp, n):
    pos = lits > 0
    v = np.abs(lits)
    inz = in_z[v]
    inzp = in_zp[v]
    true_under = np.where(pos, ~inz, inz)
    support = (true_under & ~inzp).sum(1)
    # a literal is dead when flipping repair variables can never make it
    # true: positive on a selected-or-repair variable, negative elsewhere
    non_dead = np.where(pos, ~inz & ~inzp, inz)
    live = non_dead.sum(1)
    live_sum = np.where(non_dead, lits, 0).sum(1)
    sv = np.sort(v, axis=1)
    first = np.ones_like(sv, bool)
    first[:, 1:] = sv[:, 1:] != sv[:, :-1]
    distinct = (first & in_zp[sv]).sum(1)
    up = np.zeros(n + 1, np.int64)
    witness = (live == 1) & (live_sum > 0)
    if witness.any():
        np.add.at(up, live_sum[witness], 1)
    return support, live, live_sum, distinct, up


def _check_instance(f):
    lits = np.asarray(f.lits)
    steps = 0

    z, _, st1 = run_phase1(f, snapshot=True)
    in_z = np.zeros(f.n + 1, bool)
    for t, x in enumerate(z):
        in_z[x] = True
        po, ni, u, uc = _recount_selection(lits, in_z, f.n)
        s = st1.snapshots
        assert np.array_equal(s["pos_out_z"][t], po)
        assert np.array_equal(s["neg_in_z"][t], ni)
        assert np.array_equal(s["u"][t], u)
        assert s["z_unique_count"][t] == uc
        steps += 1
    po, ni, u, uc = _recount_selection(lits, in_z, f.n)
    assert np.array_equal(st1.pos_out_z, po)
    assert np.array_equal(st1.neg_in_z, ni)
    assert np.array_equal(st1.u, u)
    assert st1.z_unique_count == uc

    zp, st2 = run_phase2(f, z, snapshot=True)
    in_zp = np.zeros(f.n + 1, bool)
    sup0 = _recount_repair(lits, in_z, in_zp, f.n)[0]
    assert st2.q_init == tuple(int(i) + 1 for i in np.flatnonzero(sup0 == 0))
    for t, x in enumerate(zp):
        in_zp[x] = True
        sup, lv, ls, dist, up = _recount_repair(lits, in_z, in_zp, f.n)
        s = st2.snapshots
        assert np.array_equal(s["support_out_zp"][t], sup)
        assert np.array_equal(s["non_dead"][t], lv)
        assert np.array_equal(s["non_dead_sum"][t], ls)
        assert np.array_equal(s["distinct_zp_vars"][t], dist)
        assert np.array_equal(s["u_prime"][t], up)
        steps += 1
    sup, lv, ls, dist, up = _recount_repair(lits, in_z, in_zp, f.n)
    assert np.array_equal(st2.support_out_zp, sup)
    assert np.array_equal(st2.non_dead, lv)
    assert np.array_equal(st2.non_dead_sum, ls)
    assert np.array_equal(st2.distinct_zp_vars, dist)
    assert np.array_equal(st2.u_prime, up)
    if st2.anomaly_clause is None:
        assert st2.endangered_count == int((sup == 0).sum())
    return steps


def _corpus():
    # 200 instances across the three widths, n capped at 50, densities
    # spanning sub- and supercritical repair cascades
    cases = []
    idx = 0
    for k in (3, 6, 8):
        for j in range(67 if k > 3 else 66):
            n = 10 + (17 * j) % 41
            m = 20 + (29 * j) % 131
            cases.append((k, n, m, 1000 + idx))
            idx += 1
    assert len(cases) == 200
    return cases


def test_counters_match_recomputation_on_200_instances():
    total_steps = 0
    for k, n, m, seed in _corpus():
        f = fixsat.sample_formula(GeneratorConfig(n=n, k=k, seed=seed, m=m))
        total_steps += _check_instance(f)
    # the corpus must actually exercise the incremental paths
    assert total_steps > 500


def test_counters_handle_duplicate_occurrences():
    # duplicated variables inside one clause stress the transient updates
    f = fixsat.from_clauses(4, [(-1, -1, -2), (1, 1, -3), (2, -1, -4),
                                (-2, -2, -2), (3, -2, -1)])
    _check_instance(f)
