from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from conftest import random_unimodular
from quadvol.errors import PreconditionError, Unsupported
from quadvol.exactnum import factorize
from quadvol.lattice import GramMatrix, U, direct_sum
from quadvol.volume import closed_form_ternary, crosscheck, siegel_volume

D = GramMatrix.diag
F = Fraction


@pytest.mark.parametrize(
    "S,expected",
    [(direct_sum(D(2), U), F(1, 24)), (D(11, -1, -1), F(5, 48)), (direct_sum(D(1), U), F(1, 16))],
)
def test_siegel_examples(S, expected):
    res = siegel_volume(S)
    assert res.volume == expected
    assert res.method == "siegel" and res.g_sp == 1 and not res.warnings


def test_closed_form_examples():
    res = closed_form_ternary(direct_sum(D(6), U))
    assert res.volume == F(1, 12) and res.sign(3) == 1
    res = closed_form_ternary(D(6, -1, -1))
    assert res.volume == F(1, 16) and res.sign(3) == -1
    res = closed_form_ternary(D(3, -5, -1))
    assert res.volume == F(1, 12)
    assert (res.sign(2), res.sign(3), res.sign(5)) == (-1, 1, -1)
    assert closed_form_ternary(GramMatrix([[2, -2, 0], [-2, 2, -1], [0, -1, 2]])).volume == F(1, 24)
    res = closed_form_ternary(D(11, -1, -1))
    assert (res.sign(2), res.sign(11)) == (-1, -1)


def test_preconditions():
    with pytest.raises(PreconditionError, match="reduce_to_square_free"):
        closed_form_ternary(direct_sum(D(4), U))
    with pytest.raises(Unsupported):
        siegel_volume(D(1, 1, 1))
    with pytest.raises(Unsupported):
        siegel_volume(D(1, -1))
    with pytest.raises(PreconditionError):
        siegel_volume(D(1, 1, -1), g_sp=0)


def test_non_square_free_siegel_warns():
    res = siegel_volume(direct_sum(D(4), U))
    assert res.warnings and "g_sp" in res.warnings[0]
    assert siegel_volume(direct_sum(D(4), U), g_sp=2, gsp_given=True).warnings == ()
    assert siegel_volume(direct_sum(D(4), U), g_sp=2).volume == res.volume / 2


def test_crosscheck_examples():
    rep = crosscheck(direct_sum(D(2), U), budget=2**36)
    assert rep.agree and rep.siegel == F(1, 24) and rep.oracle == F(1, 24)
    assert rep.oracle_primes == [2]
    rep = crosscheck(D(3, -5, -1), budget=2**36)
    assert rep.agree and rep.closed_form == F(1, 12)
    rng = random.Random(1)
    S = D(11, -1, -1).transform(random_unimodular(3, rng))
    rep = crosscheck(S)
    assert rep.agree and rep.siegel == F(5, 48)
    assert 11 in rep.skipped_primes


def _forms(bound):
    vals = [v for v in range(-bound, bound + 1) if v]
    for a, b, c in itertools.combinations_with_replacement(vals, 3):
        if min(a, b, c) < 0 < max(a, b, c) and factorize(a * b * c).is_square_free():
            yield D(a, b, c)


def test_closed_form_equals_siegel_up_to_50():
    count = 0
    for S in _forms(50):
        if abs(S.det) <= 50:
            count += 1
            assert closed_form_ternary(S).volume == siegel_volume(S).volume, S.entries
    assert count > 50


def test_volume_denominators():
    for S in _forms(12):
        v = closed_form_ternary(S).volume
        assert v > 0
        d = v.denominator
        while d % 2 == 0:
            d //= 2
        assert d in (1, 3)


def test_basis_change_invariance():
    rng = random.Random(2)
    for S in [D(3, -5, -1), direct_sum(D(6), U), D(2, 3, -5), D(1, 1, -7)]:
        ref = siegel_volume(S).volume
        for _ in range(25):
            T = S.transform(random_unimodular(3, rng))
            assert siegel_volume(T).volume == ref
            assert closed_form_ternary(T).volume == ref
