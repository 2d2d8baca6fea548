import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from expforge.finite_field import CONWAY, GF, factor_prime_power, field
from expforge.grassmann import (ResourceCapError, building_bipartite, building_complex,
                                chain_extension_count, contains, enumerate_subspaces, gauss_binom,
                                link_lambda2_formula, span)
from expforge.graph import LEFT, RIGHT, validate_biregular

from factories import brute_chain_count

PRIME_POWERS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64]


# finite fields -------------------------------------------------------------

@pytest.mark.parametrize("q", PRIME_POWERS)
def test_field_axioms(q):
    F = field(q)
    r = range(q)
    assert all(F.add[0, a] == a and F.mul[1, a] == a for a in r)
    for a in r:
        assert F.add[a, F.neg[a]] == 0
        if a:
            assert F.mul[a, F.inv[a]] == 1
    # multiplicative group is cyclic of order q-1: some element has that order
    orders = []
    for g in range(1, q):
        x, n = g, 1
        while x != 1:
            x, n = int(F.mul[x, g]), n + 1
        orders.append(n)
    assert max(orders) == q - 1


@given(st.sampled_from([4, 8, 9, 16, 27]), st.data())
def test_field_distributive(q, data):
    F = field(q)
    a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    assert F.mul[a, F.add[b, c]] == F.add[F.mul[a, b], F.mul[a, c]]
    assert F.mul[F.mul[a, b], c] == F.mul[a, F.mul[b, c]]


def test_field_rejects_bad_sizes():
    for q in (1, 6, 12, 128):
        with pytest.raises(ValueError):
            GF(q)
    assert factor_prime_power(27) == (3, 3)
    assert (2, 6) in CONWAY


# Gaussian binomials --------------------------------------------------------

def _count_by_bases(k, i, q):
    """Independent count: ordered independent i-tuples over GF(p) divided by |GL_i(q)|."""
    vecs = list(itertools.product(range(q), repeat=k))

    def rank(rows):
        m = [list(r) for r in rows]
        rk = 0
        for c in range(k):
            piv = next((r for r in range(rk, len(m)) if m[r][c] % q), None)
            if piv is None:
                continue
            m[rk], m[piv] = m[piv], m[rk]
            inv = pow(m[rk][c], q - 2, q)
            m[rk] = [x * inv % q for x in m[rk]]
            for r in range(len(m)):
                if r != rk and m[r][c]:
                    f = m[r][c]
                    m[r] = [(x - f * y) % q for x, y in zip(m[r], m[rk])]
            rk += 1
        return rk

    ordered = sum(1 for t in itertools.product(vecs, repeat=i) if rank(t) == i)
    gl = math.prod(q ** i - q ** t for t in range(i))
    return ordered // gl


@pytest.mark.parametrize("k,i,q", [(2, 1, 2), (3, 1, 2), (3, 2, 2), (4, 2, 2), (3, 1, 3), (3, 2, 3)])
def test_gauss_binom_matches_basis_count(k, i, q):
    assert gauss_binom(k, i, q) == _count_by_bases(k, i, q)


def test_gauss_binom_examples():
    assert gauss_binom(3, 1, 2) == 7
    assert gauss_binom(4, 2, 2) == 35
    assert gauss_binom(4, 2, 3) == 130
    assert gauss_binom(5, 0, 7) == gauss_binom(5, 5, 7) == 1


@given(st.integers(1, 7), st.data(), st.sampled_from([2, 3, 4, 5]))
def test_gauss_binom_symmetry_and_pascal(k, data, q):
    i = data.draw(st.integers(0, k))
    assert gauss_binom(k, i, q) == gauss_binom(k, k - i, q)
    if 0 < i < k:
        # q-Pascal rule
        assert gauss_binom(k, i, q) == gauss_binom(k - 1, i - 1, q) + q ** i * gauss_binom(k - 1, i, q)


@pytest.mark.parametrize("k,i,q", [(4, 2, 3), (3, 1, 4), (4, 1, 4)])
def test_enumerate_subspaces_count_and_canonical(k, i, q):
    subs = enumerate_subspaces(k, i, q)
    assert len(subs) == gauss_binom(k, i, q)
    assert len(set(subs)) == len(subs)
    F = field(q)
    for s in subs[:20]:
        assert span(s.basis, k, q) == s
        assert s.dim == i


def test_enumerate_subspaces_cap_and_domain():
    with pytest.raises(ResourceCapError):
        enumerate_subspaces(6, 3, 3, cap=100)
    with pytest.raises(ValueError):
        enumerate_subspaces(3, 0, 2)


# building incidence ---------------------------------------------------------

def test_building_bipartite_examples():
    g = building_bipartite(3, 2, 1, 2)
    assert (g.n_left, g.n_right) == (7, 7)
    assert validate_biregular(g, 3, 3).ok
    g = building_bipartite(4, 2, 1, 3)
    assert validate_biregular(g, 7, 7).ok
    assert g.is_simple()


@pytest.mark.parametrize("k,q", [(3, 2), (3, 3), (4, 2), (5, 2)])
def test_building_degrees_per_vertex(k, q):
    for i in range(1, k - 1):
        for j in range(i + 1, k):
            g = building_bipartite(k, q, i, j)
            assert g.n_left == gauss_binom(k, i, q) and g.n_right == gauss_binom(k, j, q)
            assert set(g.degrees(LEFT).tolist()) == {gauss_binom(k - i, j - i, q)}
            assert set(g.degrees(RIGHT).tolist()) == {gauss_binom(j, i, q)}


def test_building_bipartite_index_order():
    with pytest.raises(ValueError):
        building_bipartite(3, 2, 2, 1)
    with pytest.raises(ValueError):
        building_bipartite(3, 2, 1, 3)


def test_building_complex_flag_count():
    c = building_complex(3, 2)
    assert c.k == 2 and len(c.faces) == 21 and c.n == 14
    c = building_complex(4, 2)
    # complete flags of F_2^4: [4]_2! = 1 * 3 * 7 * 15
    assert len(c.faces) == 315


def test_link_lambda2_formula_examples():
    assert link_lambda2_formula(3, 2, 1, 2) == pytest.approx(math.sqrt(2))
    for q in (2, 3, 4, 5):
        assert link_lambda2_formula(3, q, 1, 2) == pytest.approx(math.sqrt(q))
    assert link_lambda2_formula(4, 2, 1, 2) == pytest.approx(math.sqrt(6))


def test_link_lambda2_matches_dense_singular_values():
    g = building_bipartite(4, 3, 1, 2)
    sv = np.linalg.svd(g.biadjacency().astype(float), compute_uv=False)
    assert sv[1] == pytest.approx(link_lambda2_formula(4, 3, 1, 2), abs=1e-6)


# chain extension -----------------------------------------------------------

@pytest.mark.parametrize("k", [3, 4])
def test_chain_extension_count_brute_force(k):
    for i0, i1, i2 in itertools.combinations(range(k), 3):
        assert chain_extension_count(k, 2, i0, i1, i2) == brute_chain_count(k, 2, i0, i1, i2)


def test_chain_extension_count_examples():
    for q in (2, 3, 4):
        assert chain_extension_count(3, q, 0, 1, 2) == 1
    assert chain_extension_count(4, 2, 0, 1, 2) == 3
    assert chain_extension_count(4, 2, 0, 1, 3) == 3
    with pytest.raises(ValueError):
        chain_extension_count(4, 2, 0, 2, 2)


def test_contains_and_span():
    k, q = 3, 2
    line = span([(1, 0, 0)], k, q)
    plane = span([(1, 0, 0), (0, 1, 0)], k, q)
    other = span([(0, 0, 1), (0, 1, 0)], k, q)
    assert contains(plane, line, q)
    assert not contains(other, line, q)
