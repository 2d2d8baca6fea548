import dataclasses
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from expforge.base import (CayleyError, CayleySpec, DegreeNotRealizable, FaceGenerator,
                           build_cayley_complex, cayley_incidence, check_group_axioms,
                           complete_partite_spec, cyclic_group, direct_product, equivalence_classes,
                           face_generators, incidence_graph, parse_generators, parse_group,
                           symmetric_group, tau_lambda_formulas, truncate_to_degree,
                           verify_structured, window_spec, write_generators, write_group)
from expforge.base.bounds import triangle_bound_exponent
from expforge.certify import skeletonize
from expforge.graph import CliqueComplex, FormatError, validate_biregular
from expforge.grassmann import building_complex

SPECS = [complete_partite_spec(3, 2), complete_partite_spec(3, 3), complete_partite_spec(4, 2),
         complete_partite_spec(5, 2), window_spec(3, 4), window_spec(3, 5), window_spec(4, 5)]


# groups ----------------------------------------------------------------------

@pytest.mark.parametrize("g", [cyclic_group(7), symmetric_group(3), symmetric_group(4),
                               direct_product(cyclic_group(3), cyclic_group(4))])
def test_group_axioms_hold(g):
    assert check_group_axioms(g) == []
    assert parse_group(write_group(g)) == g


def test_group_axiom_violation_detected():
    g = cyclic_group(4)
    mul = g.mul.copy()
    mul[1, 1] = 3
    bad = dataclasses.replace(g, mul=mul)
    assert check_group_axioms(bad)


def test_gtf_errors_and_gens_round_trip():
    with pytest.raises(FormatError):
        parse_group("gtf1 2\n0 1\n1 0\n0 1\n")
    with pytest.raises(FormatError, match="line 1"):
        parse_group("gtf 2\n")
    parts = [[1, 2], [], [5]]
    assert parse_generators(write_generators(parts)) == parts


# Cayley complexes ---------------------------------------------------------------

def test_spec_validation():
    z6 = cyclic_group(6)
    with pytest.raises(CayleyError, match="symmetric"):
        CayleySpec(z6, ((1,),))
    with pytest.raises(CayleyError, match="identity"):
        CayleySpec(z6, ((0, 1, 5),))
    with pytest.raises(CayleyError):
        CayleySpec(z6, ((1, 5), (2, 4)))   # inverse of 1 sits in S_1, k=3 wants it in S_2


def test_z6_cycle():
    spec = CayleySpec(cyclic_group(6), ((1, 5),))
    c = build_cayley_complex(spec)
    assert c.k == 2 and len(c.faces) == 6
    assert [spec.part_labels[x] for x in range(6)] == [0, 1, 0, 1, 0, 1]
    skel = skeletonize(incidence_graph(c))
    assert sorted(np.bincount(np.array(skel.edges).ravel()).tolist()) == [2] * 6


def _brute_cliques(spec):
    """Transversal k-cliques of the Cayley graph u ~ u*s, listed by brute force."""
    g, S = spec.group, spec.generators
    lab = spec.part_labels
    n, k = g.order, spec.k
    adj = lambda u, v: int(g.mul[g.inv[u], v]) in S
    parts = [[x for x in range(n) if lab[x] == a] for a in range(k)]
    out = set()
    for f in itertools.product(*parts):
        if all(adj(u, v) for u, v in itertools.combinations(f, 2)):
            out.add(f)
    return out


@pytest.mark.parametrize("spec", SPECS[:5])
def test_cayley_faces_match_brute_force_cliques(spec):
    c = build_cayley_complex(spec)
    assert set(c.faces) == _brute_cliques(spec)
    gens = face_generators(spec)
    assert len(c.faces) == spec.group.order * len(gens) // spec.k


def test_z3xz3_face_count():
    spec = complete_partite_spec(3, 3)
    assert len(face_generators(spec)) == 9
    assert len(build_cayley_complex(spec).faces) == 27


def test_nonabelian_example():
    s3 = symmetric_group(3)
    transpositions = [i for i in range(6) if s3.mul[i, i] == s3.identity and i != s3.identity]
    spec = CayleySpec(s3, (tuple(transpositions),))
    c = build_cayley_complex(spec)
    assert len(c.faces) == 9          # K_{3,3}
    sb = incidence_graph(c, face_generators(spec), spec)
    assert verify_structured(sb).property1["pass"]


def test_empty_generators():
    spec = CayleySpec(cyclic_group(4), ((), ()))
    assert face_generators(spec) == []
    assert build_cayley_complex(spec).faces == ()


def test_face_generators_k2_and_incident_faces():
    spec = CayleySpec(cyclic_group(8), ((1, 3, 5, 7),))
    assert len(face_generators(spec)) == 4
    c = build_cayley_complex(spec)
    # face generators correspond to faces through a fixed vertex
    for spec in SPECS:
        c = build_cayley_complex(spec)
        assert set(c.vertex_degrees().tolist()) == {len(face_generators(spec))}


def test_equivalence_z5():
    spec = CayleySpec(cyclic_group(5), ((1, 4),))
    classes = equivalence_classes(face_generators(spec), spec)
    assert [[s.elements for s in c] for c in classes] == [[(0, 1), (0, 4)]]
    assert truncate_to_degree(classes, 2) == classes[0]
    with pytest.raises(DegreeNotRealizable, match="j=2"):
        truncate_to_degree(classes, 1)
    one = [face_generators(spec)[0]]
    assert equivalence_classes(one, spec) == [one]


@pytest.mark.parametrize("spec", SPECS)
def test_class_sizes_at_most_k(spec):
    gens = face_generators(spec)
    classes = equivalence_classes(gens, spec)
    assert sum(len(c) for c in classes) == len(gens)
    assert all(1 <= len(c) <= spec.k for c in classes)


def test_truncate_size_one_classes():
    fg = [FaceGenerator((0, i)) for i in (1, 2, 3, 4)]
    classes = [[g] for g in fg]
    assert truncate_to_degree(classes, 3) == fg[:3]


@pytest.mark.parametrize("spec", SPECS)
def test_truncated_vertex_degrees(spec):
    gens = face_generators(spec)
    classes = equivalence_classes(gens, spec)
    hit = 0
    for D in range(1, len(gens) // spec.k + 1):
        try:
            sel = truncate_to_degree(classes, D, len(gens), spec.k)
        except DegreeNotRealizable:
            continue
        hit += 1
        assert len(sel) == D
        c = build_cayley_complex(spec, sel)
        assert set(c.vertex_degrees().tolist()) == {D}
        sb = cayley_incidence(spec, sel)
        assert validate_biregular(sb.graph, spec.k, D).ok
    assert hit


def test_truncate_bound_enforced():
    spec = window_spec(3, 4)
    gens = face_generators(spec)
    with pytest.raises(DegreeNotRealizable):
        truncate_to_degree(equivalence_classes(gens, spec), 3, len(gens), spec.k)


# structured incidence -------------------------------------------------------------

def test_complete_three_partite_incidence():
    sb = cayley_incidence(complete_partite_spec(3, 2))
    assert (sb.k, sb.D) == (3, 4)
    assert validate_biregular(sb.graph, 3, 4).ok
    for a in range(3):
        for b in range(3):
            if a != b:
                fam = sb.special_family(a, b)
                assert len(fam) == 2 and all(len(x) == 2 for x in fam)
    rep = verify_structured(sb)
    assert rep.ok
    assert all(p["s"] == 2 for p in rep.property4["pairs"])
    # every cross-part pair shares exactly two faces
    faces = sb.graph.right_adjacency
    for u in range(6):
        for v in range(6):
            if sb.part_of[u] != sb.part_of[v]:
                assert len(set(faces[u]) & set(faces[v])) == 2


def test_single_face_incidence():
    c = CliqueComplex(4, (0, 1, 2, 3), ((0, 1, 2, 3),))
    sb = incidence_graph(c)
    assert validate_biregular(sb.graph, 4, 1).ok
    assert verify_structured(sb).ok


def test_flag_complex_incidence():
    sb = incidence_graph(building_complex(3, 2))
    assert sb.graph.n_left == 21
    assert validate_biregular(sb.graph, 2, 3).ok
    rep = verify_structured(sb)
    assert rep.property1["pass"] and rep.property3["pass"]


@pytest.mark.parametrize("spec", SPECS)
def test_cayley_incidence_is_structured(spec):
    sb = cayley_incidence(spec)
    assert sb.D == len(face_generators(spec))
    assert verify_structured(sb).property4["matches_family"]
    assert verify_structured(sb).ok


def test_property3_violation_listed():
    sb = cayley_incidence(complete_partite_spec(3, 2))
    part = list(sb.part_of)
    part[0] = part[2]   # vertex 0 now sits in the same part as vertex 2
    bad = dataclasses.replace(sb, part_of=tuple(part))
    rep = verify_structured(bad)
    assert not rep.property3["pass"] and rep.property3["violations"]


def test_property4_violation_names_pair():
    sb = cayley_incidence(complete_partite_spec(3, 2))
    special = {key: fam[:1] for key, fam in sb.special_sets.items()}
    rep = verify_structured(dataclasses.replace(sb, special_sets=special))
    assert not rep.property4["pass"]
    assert rep.property4["mismatches"] and len(rep.property4["mismatches"][0]) == 2


# exponent formulas --------------------------------------------------------------

@pytest.mark.parametrize("k,tau,lam", [(3, "3/2", "1"), (5, "13/2", "3"), (6, None, "9/2")])
def test_tau_lambda_exponents(k, tau, lam):
    f = tau_lambda_formulas(k)
    if tau is not None:
        assert str(f["tau_exponent"]) == tau
    assert str(f["lambda_exponent"]) == lam
    assert f["D_exponent"] == k * (k - 1) // 2


def test_triangle_bound_exponent_k5():
    assert str(triangle_bound_exponent(5)) == "13/2"


@given(st.integers(3, 12))
def test_exponent_ranges(k):
    f = tau_lambda_formulas(k)
    lo, hi = f["s_exponent_range"]
    assert lo <= hi and 0 < f["lambda_exponent"] < f["D_exponent"]
