import random
from fractions import Fraction

import pytest

from ncperiod.algebra import (
    a2_quiver_algebra,
    build_field,
    build_matrix_algebra,
    build_truncated_polynomial_algebra,
)
from ncperiod.coeff import build_truncated_poly, dual_numbers
from ncperiod.deform import GaugeElement, MCElement, cochain_over_ring, gauge_act
from ncperiod.period import (
    BlockOp,
    PeriodClass,
    block_d,
    contraction_blocks,
    first_order_period_matrix,
    gauge_residual,
    griffiths_transversality_check,
    period_map_artin,
    ptd_isomorphic,
    torelli_rank,
    trivialize_periodic,
    vdb_duality_check,
)
from ncperiod.cyclic import reduce_mixed_complex
from ncperiod.hochschild import contraction, hochschild_boundary, cochain_differential

Q = build_field()
D = build_truncated_polynomial_algebra(2)
A2 = a2_quiver_algebra()
M2 = build_matrix_algebra(2)
R2 = dual_numbers()
EPS = R2.gen("eps")
WINDOW = (-6, 6)


def hh2_generator(scale=1):
    return MCElement(
        R2, cochain_over_ring(D, R2, {2: {(1, 1): {0: EPS * scale}}}, 1, 6)
    )


def test_contraction_is_chain_map_for_cocycles():
    """[d, I_P] = I_{dP}: for cocycle P the contraction is a chain map, so
    the homology-level blocks are honest."""
    from ncperiod.hochschild import Cochain, chain_add

    for p_comps, sdeg in [({2: {(1, 1): {0: 1}}}, 1), ({1: {(1,): {1: 1}}}, 0)]:
        p = Cochain(D, p_comps, sdeg, 6)
        assert cochain_differential(D, p, 6).is_zero()
        sgn = -1 if (sdeg + 1) % 2 else 1
        for key in [(0, (1,)), (1, (1, 1)), (0, (1, 1, 1)), (1, (1, 1, 1, 1))]:
            c = {key: 1}
            out = hochschild_boundary(D, contraction(D, p, c))
            for k, v in contraction(D, p, hochschild_boundary(D, c)).items():
                chain_add(out, k, -sgn * v)
            assert out == {}, (p_comps, key)


def test_period_matrix_empty_domains():
    assert first_order_period_matrix(A2, range(0, 4)) == []
    assert first_order_period_matrix(M2, range(0, 4)) == []


def test_period_matrix_dual_numbers():
    pcs = first_order_period_matrix(D, range(0, 5))
    assert len(pcs) == 1
    pc = pcs[0]
    assert pc.t_exponents() == [-1]
    # I_P: HH_2 -> HH_0 sends the class of x[x|x] to the class of x
    assert (2, 0) in pc.blocks and pc.blocks[2, 0]
    # all blocks drop the weight by exactly 2
    assert all(j == i - 2 for (i, j) in pc.blocks)


def test_torelli_ranks():
    assert torelli_rank(D, range(0, 5)) == (1, 1, True)
    assert torelli_rank(A2, range(0, 3)) == (0, 0, True)
    assert torelli_rank(M2, range(0, 3)) == (0, 0, True)


def test_vdb_field_and_matrix():
    for alg in (Q, M2):
        rep = vdb_duality_check(alg, 0, {(0, ()): 1}, range(0, 3))
        assert all(r["iso"] for r in rep.values()), alg.name
    # and degree 0 is the 1x1 identity pairing
    rep = vdb_duality_check(Q, 0, {(0, ()): 1}, [0])
    assert rep[0]["rank"] == 1


def test_vdb_dual_numbers_not_cy0():
    rep = vdb_duality_check(D, 0, {(0, ()): 1}, range(0, 3))
    assert rep[0]["iso"] is False or rep[1]["iso"] is False
    # duality-implies-injectivity contrapositive exercised: D has duality
    # failing for d=0 while torelli injectivity comes from HH^2 directly
    assert not all(r["iso"] for r in rep.values())


def test_vdb_iso_implies_torelli_injective():
    for alg in (Q, M2):
        rep = vdb_duality_check(alg, 0, {(0, ()): 1}, range(0, 3))
        if all(r["iso"] for r in rep.values()):
            assert torelli_rank(alg, range(0, 3))[2]


def test_griffiths_shape():
    assert griffiths_transversality_check(D, range(0, 5))["ok"]
    assert griffiths_transversality_check(A2, range(0, 3))["ok"]
    # synthetic mutation: a block at t-exponent -2 is flagged
    fake = PeriodClass(blocks={(4, 0): {(0, 0): Fraction(1)}})
    rep = griffiths_transversality_check(D, range(0, 5), period_classes=[fake])
    assert not rep["ok"] and rep["violations"] == [(0, -2)]


def test_trivialize_zero_deformation():
    z = MCElement(R2, cochain_over_ring(D, R2, {}, 1, 6))
    triv = trivialize_periodic(D, z, WINDOW)
    assert triv.ok and triv.gauge.is_zero() and triv.deformation.is_zero()


@pytest.mark.parametrize("alg", [Q, D, build_truncated_polynomial_algebra(3),
                                 A2, M2], ids=lambda a: a.name)
def test_trivialize_first_order_all_algebras(alg):
    """Every first-order deformation trivializes in the window, with the
    first-order part of the gauge element equal to -(1/t) I_x up to an exact
    correction (here: exactly, the seeded first-order correction vanishes)."""
    from conftest import random_first_order_mc
    from ncperiod.period import _solve_block_equation, _x_level_slice

    rng = random.Random(hash(alg.name) % 100000)
    for _ in range(2):
        x = random_first_order_mc(alg, R2, rng)
        triv = trivialize_periodic(alg, x, WINDOW)
        assert triv.ok
        g, red, D0, mu = triv.gauge, triv.reduced, triv.base, triv.deformation
        assert gauge_residual(mu, g, D0, red, WINDOW, R2).is_zero()
        xs = _x_level_slice(x, R2, 1)
        seed = (contraction_blocks(red, xs, t_shift=-1).scaled(-1)
                if xs is not None else BlockOp(0))
        lvl1 = g.level_slices(R2, 1).get(1, BlockOp(0))
        diff = lvl1.add(seed, scale=-1)
        # away from the bar-truncation edge the seed is taken on the nose;
        # edge blocks (source weight at the cut) may pick up the cut's
        # correction and are excluded from the comparison.
        interior = BlockOp(0, {
            key: mat for key, mat in diff.blocks.items()
            if key[1] <= red.bar_bound - 2 and key[2] <= red.bar_bound - 2
        })
        if not interior.is_zero():
            from ncperiod.exactlin import solve as lin_solve
            from ncperiod.period import _d_matrix

            dmat, src_keys, dst_index = _d_matrix(red, D0, -1, WINDOW)
            vec = {}
            for (sig, m, m2), mat in interior.blocks.items():
                for (r, c), v in mat.items():
                    vec[dst_index[sig, m, m2, r, c]] = v
            assert lin_solve(dmat, vec) is not None


def test_deformed_transfer_squares_to_zero():
    from conftest import random_first_order_mc

    for alg in (D, A2, M2):
        rng = random.Random(11)
        x = random_first_order_mc(alg, R2, rng)
        triv = trivialize_periodic(alg, x, WINDOW)
        Dx = triv.base.add(triv.deformation)
        sq = Dx.compose(Dx, triv.reduced.bar_bound, WINDOW)
        assert sq.is_zero(), alg.name


def test_trivialize_second_order_deformation():
    """The multistep solver: D's generator lifted to Q[e]/(e^3) still
    trivializes, with zero residual after the order-2 correction."""
    from ncperiod.coeff import build_truncated_poly
    from ncperiod.deform import lift_order_by_order

    R3 = build_truncated_poly(1, 3)
    status, x3 = lift_order_by_order(D, hh2_generator(), R3)
    assert status == "lift"
    triv = trivialize_periodic(D, x3, WINDOW)
    assert triv.ok
    assert gauge_residual(triv.deformation, triv.gauge, triv.base,
                          triv.reduced, WINDOW, R3).is_zero()


def test_ptd_of_gauge_equivalent_deformations_isomorphic():
    x = hh2_generator()
    alpha = GaugeElement(R2, cochain_over_ring(D, R2, {1: {(1,): {1: EPS}}}, 0, 6))
    y = gauge_act(alpha, x)
    p1 = period_map_artin(D, x, WINDOW)
    p2 = period_map_artin(D, y, WINDOW)
    ok, witness = ptd_isomorphic(p1, p2)
    assert ok


def test_ptd_distinct_directions_not_isomorphic():
    p1 = period_map_artin(D, hh2_generator(1), WINDOW)
    p2 = period_map_artin(D, hh2_generator(2), WINDOW)
    ok, _ = ptd_isomorphic(p1, p2)
    assert not ok


def test_ptd_reflexive():
    p = period_map_artin(D, hh2_generator(), WINDOW)
    ok, (c, a) = ptd_isomorphic(p, p)
    assert ok


def test_ptd_negative_block_matches_period_matrix():
    """The 1/t-part of the trivialization of the first-order deformation
    equals minus the period block of its class on the nose."""
    x = hh2_generator()
    triv = trivialize_periodic(D, x, WINDOW)
    g, red = triv.gauge, triv.reduced
    neg = g.negative_part()
    xs_blocks = contraction_blocks(
        red, x.value.map_coefficients(lambda c: c.coeffs[1]), t_shift=-1
    ).scaled(-1)
    lvl1 = g.level_slices(R2, 1).get(1, BlockOp(0))
    diff = lvl1.negative_part().add(xs_blocks.negative_part(), scale=-1)
    assert diff.is_zero()
