from collections import Counter, defaultdict

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from expforge.base import (CayleySpec, StructuredBipartite, cayley_incidence, complete_partite_spec,
                           cyclic_group, window_spec)
from expforge.gadget import sample_biregular
from expforge.graph import (LEFT, RIGHT, BipartiteMultigraph, CliqueComplex, VertexSet,
                            unique_neighbors, validate_biregular)
from expforge.base import incidence_graph
from expforge.product import BatchOracle, analyze_collisions, edges_into_low_diagnostic, line_product

BASES = {
    "complete32": cayley_incidence(complete_partite_spec(3, 2)),
    "complete42": cayley_incidence(complete_partite_spec(4, 2)),
    "window34": cayley_incidence(window_spec(3, 4)),
    "c8": cayley_incidence(CayleySpec(cyclic_group(8), ((1, 7),))),
}


def _instance(name, d, seed, simple=True):
    sb = BASES[name]
    h = sample_biregular(sb.D, sb.D, d, d, seed, simple=simple)
    return line_product(sb, sb, h)


def _tag_oracle(inst, S):
    """Blue/red sets per middle vertex read off Z's provenance tags."""
    Sset = set(S)
    c = defaultdict(Counter)
    for (l, r), tag in zip(inst.z.edges, inst.z.tags):
        u = int(tag.split(":")[0])
        if l in Sset:
            c[u][r] += 1
    blue = {u: sorted(r for r, n in cnt.items() if n == 1) for u, cnt in c.items()}
    red = {u: sorted(r for r, n in cnt.items() if n >= 2) for u, cnt in c.items()}
    return blue, red


# assembly ---------------------------------------------------------------------

def test_single_edge_product():
    c = CliqueComplex(1, (0,), ((0,),))
    sb = incidence_graph(c)
    h = BipartiteMultigraph(1, 1, ((0, 0),))
    inst = line_product(sb, sb, h)
    assert inst.z.edges == ((0, 0),)


def test_matching_gadget_unfolds():
    g = BipartiteMultigraph(2, 1, ((0, 0), (1, 0)))
    sb = StructuredBipartite(g, 1, 2, (0,), ((0, 1),))
    h = BipartiteMultigraph(2, 2, ((0, 0), (1, 1)))
    inst = line_product(sb, sb, h)
    assert inst.z.edges == ((0, 0), (1, 1))
    assert inst.z.tags == ("0:0:0", "0:1:1")


@pytest.mark.parametrize("name", sorted(BASES))
def test_edge_count_degrees_and_provenance(name):
    sb = BASES[name]
    for seed in range(3):
        for d in {1, 2, sb.D // 2 or 1}:
            inst = _instance(name, d, seed)
            assert inst.z.m == sb.n_middle * inst.gadget.m
            assert validate_biregular(inst.z, sb.k * d, sb.k * d).ok
            assert inst.biregularity.ok
            H = set(inst.gadget.edges)
            for (l, r), tag in zip(inst.z.edges, inst.z.tags):
                u, i, j = map(int, tag.split(":"))
                assert sb.nbr_order[u][i] == l and sb.nbr_order[u][j] == r and (i, j) in H


def test_dimension_checks():
    sb = BASES["complete32"]
    with pytest.raises(ValueError, match="gadget left size"):
        line_product(sb, sb, sample_biregular(3, 3, 1, 1, 0))
    with pytest.raises(ValueError, match="middle"):
        line_product(sb, BASES["c8"], sample_biregular(4, 4, 1, 1, 0))


# collision reports -----------------------------------------------------------------

def test_single_seed_has_no_red():
    inst = _instance("complete32", 2, 1)
    rep = analyze_collisions(inst, VertexSet.of(LEFT, [3]), tau=1, delta=0.1, lam=1)
    assert all(not r for r in rep.red.values())
    assert rep.total_blue_edges == 3 * 2
    assert rep.blue_unique_count == rep.un_z_count
    assert rep.obs_un_blue_holds


def test_two_middle_vertices_collide():
    sb = BASES["c8"]
    h = BipartiteMultigraph(2, 2, ((0, 0), (0, 1), (1, 0), (1, 1)))
    inst = line_product(sb, sb, h)
    rep = analyze_collisions(inst, VertexSet.of(LEFT, [0]), tau=10, delta=0.5, lam=1)
    assert len(rep.U) == 2
    u, v = rep.U
    assert any(a == u and b == v and m >= 1 for a, b, m in rep.collisions)
    assert rep.blue_unique_count < rep.total_blue_edges
    assert rep.obs_un_blue_holds and rep.multiplicity_bound_holds and rep.skeleton_ok


def test_matching_gadget_complete_base():
    sb = BASES["complete32"]
    h = BipartiteMultigraph(4, 4, tuple((i, i) for i in range(4)))
    inst = line_product(sb, sb, h)
    S = VertexSet.of(LEFT, [0, 1, 2, 3])
    rep = analyze_collisions(inst, S, tau=1, delta=0.25, lam=1)
    assert rep.blue_unique_count == len(unique_neighbors(inst.z, S))


@given(st.sampled_from(sorted(BASES)), st.integers(0, 50), st.sampled_from([LEFT, RIGHT]), st.data())
def test_report_invariants(name, seed, side, data):
    sb = BASES[name]
    d = data.draw(st.integers(1, max(1, sb.D // 2)))
    inst = _instance(name, d, seed, simple=data.draw(st.booleans()))
    view = inst if side == LEFT else inst.transposed()
    n = view.z.n_left
    S = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=min(5, n), unique=True))
    tau = data.draw(st.sampled_from([0.5, 1.0, 3.0]))
    rep = analyze_collisions(inst, VertexSet.of(side, S), tau=tau, delta=0.25, lam=1.0)
    assert rep.obs_un_blue_holds
    assert rep.multiplicity_bound_holds
    assert rep.skeleton_ok
    assert all(c["in_family"] for c in rep.multiplicity_checks)
    blue, red = _tag_oracle(view, sorted(S))
    assert {u: b for u, b in rep.blue.items() if b} == {u: b for u, b in blue.items() if b}
    assert {u: r for u, r in rep.red.items() if r} == {u: r for u, r in red.items() if r}
    for u in rep.U:
        assert not set(rep.blue[u]) & set(rep.red[u])
    diag = edges_into_low_diagnostic(rep, inst.k, 0.25)
    assert diag["identity_holds"]
    # C from the definition: u low, r blue at u, v touches r
    touch = defaultdict(set)
    for u in rep.U:
        for r in rep.blue[u] + rep.red[u]:
            touch[r].add(u)
    mult = Counter()
    for u in rep.u_low:
        for r in rep.blue[u]:
            for v in touch[r] - {u}:
                mult[(u, v)] += 1
    assert sorted((u, v, m) for (u, v), m in mult.items()) == rep.collisions
    assert rep.e_C_total == rep.e_C_low + rep.e_C_low_high == sum(mult.values())


def test_saturation_definition():
    inst = _instance("complete42", 2, 3, simple=False)
    rep = analyze_collisions(inst, VertexSet.of(LEFT, list(range(6))), tau=0.5, delta=0.5, lam=0.1)
    high = set(rep.u_high)
    part = inst.g_right.part_of
    partners = defaultdict(set)
    for u, v, _ in rep.collisions:
        if v in high:
            partners[(u, part[v])].add(v)
    expect = sorted({u for (u, b), vs in partners.items() if len(vs) > 0.1 / 0.5})
    assert rep.u_sat == expect


def test_edges_into_low_without_high():
    inst = _instance("complete32", 2, 0)
    rep = analyze_collisions(inst, VertexSet.of(LEFT, [0, 5]), tau=100, delta=0.1, lam=1)
    assert rep.u_high == []
    diag = edges_into_low_diagnostic(rep, 3, 0.1)
    assert diag["e_S_low"] == 6 and diag["ratio"] >= 1


def test_side_mismatch_and_bad_params():
    inst = _instance("complete32", 2, 0)
    with pytest.raises(ValueError):
        analyze_collisions(inst, VertexSet.of(LEFT, [0]), 1, 0.1, 1, side=RIGHT)
    with pytest.raises(ValueError):
        analyze_collisions(inst, VertexSet.of(LEFT, [0]), 1, 0.0, 1)


def test_report_serializes():
    import json
    inst = _instance("window34", 1, 2)
    rep = analyze_collisions(inst, VertexSet.of(RIGHT, [0, 1, 2]), 1, 0.2, 1)
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["blue_unique_equals_un"] and all(len(c) == 3 for c in d["C"])


# batch oracle ----------------------------------------------------------------------

@pytest.mark.parametrize("name", ["complete32", "window34", "complete42"])
@pytest.mark.parametrize("side", [LEFT, RIGHT])
def test_batch_oracle_agrees_with_reports(name, side):
    inst = _instance(name, 2, 11, simple=False)
    oracle = BatchOracle(inst, side)
    n = oracle.view.z.n_left
    rng = np.random.default_rng(0)
    rows = np.array([sorted(rng.choice(n, 3, replace=False)) for _ in range(40)])
    res = oracle.run(rows, tau=1.0, delta=0.5)
    for t, row in enumerate(rows):
        rep = analyze_collisions(inst, VertexSet.of(side, row.tolist()), 1.0, 0.5, 1.0)
        assert res["blue_unique"][t] == rep.blue_unique_count
        assert res["un_z"][t] == rep.un_z_count
        excess = max((c["multiplicity"] - c["mass"] for c in rep.multiplicity_checks), default=None)
        if excess is None:
            assert res["worst_excess"][t] < -10**6
        else:
            assert res["worst_excess"][t] == excess
    assert all(oracle.in_family)
