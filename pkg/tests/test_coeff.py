from fractions import Fraction

import pytest

from ncperiod.coeff import (
    ArtinLocalRing,
    NotArtinLocal,
    build_truncated_poly,
    dual_numbers,
    fiber_product,
    reduction_to_q,
    truncation_map,
)


def test_dual_numbers():
    r = build_truncated_poly(1, 2)
    assert r.basis_labels == ["1", "eps"]
    eps = r.gen("eps")
    assert not eps * eps
    assert r.nilpotency_order == 2


def test_eps_cubed():
    r = build_truncated_poly(1, 3)
    assert r.basis_labels == ["1", "eps", "eps^2"]
    eps = r.gen("eps")
    assert eps * eps == r.gen("eps^2")
    assert not eps * eps * eps
    assert r.nilpotency_order == 3


def test_two_vars_square_zero():
    r = build_truncated_poly(2, 2)
    assert r.basis_labels == ["1", "eps1", "eps2"]
    for a in ("eps1", "eps2"):
        for b in ("eps1", "eps2"):
            assert not r.gen(a) * r.gen(b)


def test_filtration_dual():
    r = dual_numbers()
    assert r.m_adic_filtration() == [frozenset({1}), frozenset()]


def test_filtration_eps3():
    r = build_truncated_poly(1, 3)
    assert r.m_adic_filtration() == [frozenset({1, 2}), frozenset({2}), frozenset()]


def test_filtration_two_vars():
    r = build_truncated_poly(2, 2)
    assert r.m_adic_filtration() == [frozenset({1, 2}), frozenset()]


def test_nilpotency_boundary():
    # m^(order) = 0 and m^(order-1) != 0 for every built ring
    for nv, order in [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3)]:
        r = build_truncated_poly(nv, order)
        assert r.nilpotency_order == order
        chain = r.m_adic_filtration()
        assert len(chain) == order  # m, m^2, ..., m^{order-1}, empty
        assert chain[-1] == frozenset()
        assert chain[-2] != frozenset()


def test_reduction_is_ring_hom():
    r = build_truncated_poly(1, 3)
    red = reduction_to_q(r)
    a = r.element([Fraction(2), Fraction(1), Fraction(5)])
    b = r.element([Fraction(-1), Fraction(3), Fraction(0)])
    assert red(a * b) == red(a) * red(b)
    assert red(a + b) == red(a) + red(b)
    assert red(r.one()) == 1


def test_invalid_tables_rejected():
    # non-commutative table
    with pytest.raises(NotArtinLocal):
        ArtinLocalRing(
            ["1", "a", "b"],
            {
                (0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1},
                (0, 2): {2: 1}, (2, 0): {2: 1},
                (1, 2): {2: 1},  # a*b = b but b*a = 0: not commutative
            },
        )
    # non-nilpotent "maximal ideal" (a is idempotent)
    with pytest.raises(NotArtinLocal):
        ArtinLocalRing(
            ["1", "a"],
            {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (1, 1): {1: 1}},
        )


def test_fiber_product_dual_dual():
    d = dual_numbers()
    r = fiber_product(d, d)
    assert r.dim == 3
    assert r.nilpotency_order == 2
    a = r.gen(1)
    b = r.gen(2)
    assert not a * b and not a * a and not b * b


def test_truncation_map():
    r = build_truncated_poly(1, 4)
    quo, apply = truncation_map(r, 3)
    assert quo.basis_labels == ["1", "eps", "eps^2"]
    x = r.element([0, 1, 0, 5])
    y = apply(x)
    assert y.coeffs == (0, 1, 0)
    assert apply(x * x) == y * y
