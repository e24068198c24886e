from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_unimodular
from quadvol.errors import InvalidArgument
from quadvol.exactnum import factorize, hilbert_symbol
from quadvol.lattice import (
    GramMatrix,
    U,
    V,
    compact,
    determinant,
    direct_sum,
    format_gram,
    gram_to_json,
    hasse_invariant,
    hermite_basis,
    identity,
    invariants,
    inverse_unimodular,
    is_indefinite,
    matmul,
    parse_gram,
    rational_inverse,
    rational_diagonal,
    signature,
    smith_form,
    smith_invariant_factors,
)

D = GramMatrix.diag


def test_construction_validates():
    with pytest.raises(InvalidArgument):
        GramMatrix([[1, 2], [3, 4]])
    with pytest.raises(InvalidArgument):
        GramMatrix([[1, 1], [1, 1]])
    with pytest.raises(InvalidArgument):
        GramMatrix([[1, 0]])
    with pytest.raises(InvalidArgument):
        GramMatrix([])


def test_invariants_examples():
    inv = invariants(D(11, -1, -1))
    assert (inv.det, inv.signature, inv.is_even, inv.hasse[2]) == (11, (1, 2), False, -1)
    inv = invariants(direct_sum(D(2), U))
    assert (inv.det, inv.signature, inv.is_even) == (-2, (2, 1), True)
    inv = invariants(identity_gram(3))
    assert (inv.det, inv.signature, inv.is_even) == (1, (3, 0), False)
    assert set(inv.hasse) == {2}


def identity_gram(n: int) -> GramMatrix:
    return GramMatrix(identity(n))


def test_smith_invariant_factors():
    assert smith_invariant_factors(D(6, -1, -1)) == [1, 1, 6]
    assert smith_invariant_factors(direct_sum(D(4), U)) == [1, 1, 4]
    assert smith_invariant_factors(identity_gram(3)) == [1, 1, 1]
    assert smith_invariant_factors(D(2, 4, 6)) == [2, 2, 12]


@settings(max_examples=100)
@given(st.lists(st.integers(-9, 9), min_size=9, max_size=9))
def test_smith_form_certificate(flat):
    M = [flat[0:3], flat[3:6], flat[6:9]]
    if determinant(M) == 0:
        return
    d, L, R = smith_form(M)
    assert matmul(matmul(L, M), R) == [[d[i] if i == j else 0 for j in range(3)] for i in range(3)]
    assert abs(determinant(L)) == 1 and abs(determinant(R)) == 1
    assert all(x > 0 for x in d) and d[1] % d[0] == 0 and d[2] % d[1] == 0
    assert d[0] * d[1] * d[2] == abs(determinant(M))


def test_hermite_basis_spans_same_lattice():
    rng = random.Random(3)
    for _ in range(50):
        C = [[rng.randint(-6, 6) for _ in range(3)] for _ in range(3)]
        if determinant(C) == 0:
            continue
        H = hermite_basis(C)
        assert all(H[i][j] == 0 for i in range(3) for j in range(i + 1, 3))
        assert all(H[i][i] > 0 and all(0 <= H[i][j] < H[i][i] for j in range(i)) for i in range(3))
        # same lattice iff C^-1 H is unimodular
        T = matmul(rational_inverse(C), H)
        assert all(x.denominator == 1 for row in T for x in row)
        assert abs(determinant([[int(x) for x in row] for row in T])) == 1


def test_is_indefinite():
    assert is_indefinite(D(3, -5, -1))
    assert not is_indefinite(identity_gram(3))
    assert is_indefinite(U)
    assert signature(V) == (2, 0)


def test_zero_diagonal_diagonalization():
    S = GramMatrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    diag = rational_diagonal(S)
    prod = Fraction(1)
    for a in diag:
        prod *= a
    assert prod == S.det
    assert signature(S) == (1, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_basis_change_invariance(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    vals = [rng.choice([-3, -2, -1, 1, 2, 3, 5, 6, 7]) for _ in range(n)]
    S = D(*vals)
    if n > 2 and rng.random() < 0.4:
        S = direct_sum(rng.choice([U, V]), D(*vals[2:]))
    T = S.transform(random_unimodular(S.n, rng))
    assert T.det == S.det
    assert invariants(T) == invariants(S)


def test_hasse_independent_of_pivot_order():
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(2, 4)
        S = D(*[rng.choice([-6, -3, -1, 1, 2, 5, 7]) for _ in range(n)]).transform(random_unimodular(n, rng))
        for p in (2, 3, 5, 7):
            ref = hasse_invariant(S, p)
            order = list(range(n))
            rng.shuffle(order)
            assert hasse_invariant(S, p, order) == ref


def test_hasse_product_formula():
    rng = random.Random(12)
    for _ in range(40):
        n = rng.randint(2, 4)
        S = D(*[rng.choice([-10, -3, -1, 1, 2, 5, 7, 15]) for _ in range(n)]).transform(random_unimodular(n, rng))
        diag = rational_diagonal(S)
        primes = set()
        for a in diag:
            primes |= set(factorize(a.numerator).primes) | set(factorize(a.denominator).primes)
        prod = 1
        for p in primes | {2}:
            prod *= hasse_invariant(S, p)
        real = 1
        for i in range(n):
            for j in range(i + 1, n):
                real *= hilbert_symbol(diag[i], diag[j], -1)
        assert prod * real == 1


def test_text_and_json_roundtrip():
    S = GramMatrix([[2, -2, 0], [-2, 2, -1], [0, -1, 2]])
    assert parse_gram(format_gram(S)) == S
    assert parse_gram(gram_to_json(S)) == S
    assert json.loads(gram_to_json(S)) == {"gram": [[2, -2, 0], [-2, 2, -1], [0, -1, 2]]}
    assert compact(S) == "[[2,-2,0],[-2,2,-1],[0,-1,2]]"
    assert parse_gram("2\n0 1\n1 0\n") == U


@pytest.mark.parametrize("text", ["", "2\n1 0\n", "x", "2\n1 2\n3 4\n", '{"gram": 3}', "{bad json"])
def test_parse_errors(text):
    with pytest.raises(InvalidArgument):
        parse_gram(text)


def test_inverse_unimodular():
    P = [[1, 2], [0, 1]]
    assert matmul(P, inverse_unimodular(P)) == identity(2)
    with pytest.raises(InvalidArgument):
        inverse_unimodular([[2, 0], [0, 1]])
