"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

All tolerances are exact (rational arithmetic end to end).  Two sub-assertions
are implemented faithfully to their stated constants but are mathematically
unattainable (see README: the stated HH and HP of the two-vertex path algebra
conflict with the oracle-derived values); they live in
the two tests marked `stated_value_defect` and are expected to stay red,
with the oracle-verified twins asserting the honest values.
"""

import itertools
import json
import random
import subprocess
import sys
from fractions import Fraction

import pytest

from conftest import random_first_order_mc
from ncperiod.algebra import (
    a2_quiver_algebra,
    build_field,
    build_matrix_algebra,
    build_truncated_polynomial_algebra,
)
from ncperiod.calculus import calculus_defect, verify_lie_dagger
from ncperiod.coeff import build_truncated_poly, dual_numbers
from ncperiod.cyclic import (
    hodge_spectral_sequence,
    periodic_cyclic_homology,
    sbi_consistent,
    sbi_exactness,
)
from ncperiod.deform import (
    GaugeElement,
    MCElement,
    cochain_over_ring,
    conjugated_structure_component,
    deform_algebra,
    gauge_act,
    lift_order_by_order,
    mc_residual,
)
from ncperiod.hochschild import (
    DgStructure,
    chain_add,
    connes_B,
    hochschild_boundary,
    hochschild_cohomology,
    hochschild_homology,
)
from ncperiod.period import (
    BlockOp,
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

Q = build_field()
D = build_truncated_polynomial_algebra(2)
T3 = build_truncated_polynomial_algebra(3)
A2 = a2_quiver_algebra()
M2 = build_matrix_algebra(2)
FIVE = [Q, D, T3, A2, M2]
R2 = dual_numbers()
R3 = build_truncated_poly(1, 3)
R4 = build_truncated_poly(1, 4)
WINDOW = (-6, 6)


def report(num, ok, text):
    print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {text}")
    assert ok, text


def test_criterion_1_mixed_complex_axioms():
    ok = True
    for alg in FIVE:
        red = list(alg.reduced_indices)
        for n in range(6):
            for a0 in range(alg.dim):
                for word in itertools.product(red, repeat=n):
                    c = {(a0, word): 1}
                    if hochschild_boundary(alg, hochschild_boundary(alg, c)):
                        ok = False
                    if n <= 4:
                        if connes_B(alg, connes_B(alg, c)):
                            ok = False
                        acc = hochschild_boundary(alg, connes_B(alg, c))
                        for k, v in connes_B(alg, hochschild_boundary(alg, c)).items():
                            chain_add(acc, k, v)
                        if acc:
                            ok = False
    report(1, ok, "d^2 = B^2 = dB + Bd = 0 exactly, weight <= 5, five algebras")


def test_criterion_2_lie_dagger_suite():
    ok = True
    for alg in FIVE:
        reports = verify_lie_dagger(alg, 3, 4)
        if not all(r.status == "holds exactly" for r in reports):
            ok = False
    report(2, ok, "Lie-dagger identities + L_b = boundary, exact, "
                  "arity <= 3 vs weight <= 4, five algebras")


def test_criterion_3_homology_oracles():
    ok = hochschild_homology(D, range(0, 7)).as_tuple(range(7)) == (2, 1, 1, 1, 1, 1, 1)
    ok = ok and hochschild_homology(M2, range(0, 5)).as_tuple(range(5)) == (1, 0, 0, 0, 0)
    morita = hochschild_homology(M2, range(0, 4)).as_tuple(range(4)) == \
        hochschild_homology(Q, range(0, 4)).as_tuple(range(4))
    ok = ok and morita
    report(3, ok, "HH oracles: D = (2,1,1,1,1,1,1), M2 = (1,0,0,0,0), "
                  "Morita HH(M2) = HH(Q)  [path-algebra constant: see "
                  "criterion 3b, known defect]")


def test_criterion_3b_path_algebra_stated_value_defect():
    """Stated: HH(.->.) = (1,0,0,0,0).  Oracle-derived truth: (2,0,0,0,0)."""
    got = hochschild_homology(A2, range(0, 5)).as_tuple(range(5))
    ok = got == (1, 0, 0, 0, 0)
    report("3b", ok, f"stated HH(.->.) = (1,0,0,0,0); computed {got} "
                     "(two independent routes agree; see README)")


def test_criterion_3b_path_algebra_oracle_value():
    got = hochschild_homology(A2, range(0, 5)).as_tuple(range(5))
    report("3b'", got == (2, 0, 0, 0, 0),
           "oracle-verified HH(.->.) = (2,0,0,0,0)")


def test_criterion_4_cyclic_suite():
    ok = periodic_cyclic_homology(M2, WINDOW) == (1, 0)
    for alg in FIVE:
        consistent, dims = sbi_consistent(alg, range(0, 3), WINDOW)
        ok = ok and consistent
        exact = sbi_exactness(alg, range(0, 3), WINDOW)
        ok = ok and all(exact.values())
    report(4, ok, "HP(M2) = (1,0) stabilized at [-6,6]; SBI consistency, "
                  "five algebras  [path-algebra constant: see criterion 4b]")


def test_criterion_4b_path_algebra_stated_value_defect():
    """Stated: HP(.->.) = (1, 0).  Degeneration + HH_0 = k^2 force (2, 0)."""
    got = periodic_cyclic_homology(A2, WINDOW)
    ok = got == (1, 0)
    report("4b", ok, f"stated HP(.->.) = (1,0); computed {got} "
                     "(see README)")


def test_criterion_4b_path_algebra_oracle_value():
    got = periodic_cyclic_homology(A2, WINDOW)
    report("4b'", got == (2, 0), "oracle-consistent HP(.->.) = (2,0)")


def test_criterion_5_degeneration():
    ok = hodge_spectral_sequence(A2, WINDOW, (0, 1)).degenerate_at_E1
    ok = ok and hodge_spectral_sequence(M2, WINDOW, (0, 1)).degenerate_at_E1
    rep = hodge_spectral_sequence(D, WINDOW, (0, 1))
    ok = ok and not rep.degenerate_at_E1 and rep.d1_ranks.get((0, 0)) == 1
    report(5, ok, "E1-degeneration for the two smooth-proper examples; "
                  "nonzero d1 (B: HH_0 -> HH_1) for Q[x]/(x^2)")


def test_criterion_6_deformation_dictionary():
    rng = random.Random(20260809)
    ok = True
    alpha = GaugeElement(
        R2, cochain_over_ring(D, R2, {1: {(1,): {1: R2.gen("eps")}}}, 0, 6)
    )
    st = DgStructure(D)
    for trial in range(20):
        x = random_first_order_mc(D, R2, rng)
        alg = deform_algebra(D, x)
        if alg.validate():
            ok = False
        y = gauge_act(alpha, x)
        if not mc_residual(D, y).is_zero():
            ok = False
        # Claim-style conjugation compatibility: structure constants of the
        # gauge-acted deformation equal the bar-level conjugation, exactly.
        for n in (1, 2, 3):
            for w in itertools.product([1], repeat=n):
                got = {t: R2.coerce(c) for t, c in
                       conjugated_structure_component(D, x, alpha, w).items() if c}
                want = {}
                for t, c in st.eval(n, w).items():
                    want[t] = want.get(t, R2.zero()) + c
                for t, c in y.value.eval(n, w).items():
                    want[t] = want.get(t, R2.zero()) + c
                want = {t: c for t, c in want.items() if c}
                if got != want:
                    ok = False
    report(6, ok, "20 random first-order deformations of Q[x]/(x^2): "
                  "validator, gauge-MC preservation, conjugation dictionary")


def test_criterion_7_unobstructedness():
    ok = True
    for alg in (A2, M2):
        if hochschild_cohomology(alg, [3]).dims[3] != 0:
            ok = False
        rng = random.Random(alg.dim)
        # basis directions of the cocycle space, plus random combinations
        from ncperiod.exactlin import rref
        from ncperiod.hochschild import CochainBasis, Cochain, _cochain_diff_matrix

        _, kernel, _ = rref(_cochain_diff_matrix(alg, 2))
        cb = CochainBasis(alg, 2)
        eps = R2.gen("eps")
        samples = []
        for z in kernel:
            comps = {}
            for k, q in z.items():
                w, t = cb.keys[k]
                comps.setdefault(2, {}).setdefault(w, {})[t] = eps * q
            samples.append(MCElement(R2, Cochain(alg, comps, 1, 6)))
        samples += [random_first_order_mc(alg, R2, rng) for _ in range(3)]
        for x in samples:
            status, lifted = lift_order_by_order(alg, x, R3)
            if status != "lift":
                ok = False
                continue
            status, lifted = lift_order_by_order(alg, lifted, R4)
            if status != "lift" or not mc_residual(alg, lifted).is_zero():
                ok = False
    # the HH^2 generator of D lifts to eps^3 with the hand-solved (zero)
    # second-order correction: x * x = eps exactly
    x = MCElement(R2, cochain_over_ring(D, R2,
                                        {2: {(1, 1): {0: R2.gen("eps")}}}, 1, 6))
    status, lifted = lift_order_by_order(D, x, R3)
    ok = ok and status == "lift"
    mc = deform_algebra(D, lifted).multiplication_constants()
    ok = ok and mc[1, 1] == {0: R3.gen("eps")}
    report(7, ok, "first-order deformations of .->. and M2 lift to eps^4 "
                  "(HH^3 = 0); D's generator lifts to eps^3 as hand-solved")


def test_criterion_8_period_mapping():
    pcs = first_order_period_matrix(D, range(0, 5))
    ok = all(pc.t_exponents() == [-1] for pc in pcs if not pc.is_zero())
    ok = ok and griffiths_transversality_check(D, range(0, 5), pcs)["ok"]
    for alg in (Q, M2):
        rep = vdb_duality_check(alg, 0, {(0, ()): Fraction(1)}, range(0, 3))
        if not all(r["iso"] for r in rep.values()):
            ok = False
        dim2, rank, inj = torelli_rank(alg, range(0, 3))
        if not inj:
            ok = False
    x = MCElement(R2, cochain_over_ring(D, R2,
                                        {2: {(1, 1): {0: R2.gen("eps")}}}, 1, 6))
    alpha = GaugeElement(
        R2, cochain_over_ring(D, R2, {1: {(1,): {1: R2.gen("eps")}}}, 0, 6)
    )
    y = gauge_act(alpha, x)
    p_x = period_map_artin(D, x, WINDOW)
    p_y = period_map_artin(D, y, WINDOW)
    iso, _ = ptd_isomorphic(p_x, p_y)
    ok = ok and iso
    x2 = MCElement(R2, x.value.scaled(2))
    p_2 = period_map_artin(D, x2, WINDOW)
    not_iso, _ = ptd_isomorphic(p_x, p_2)
    ok = ok and not not_iso
    report(8, ok, "period blocks at t^-1; VdB duality for Q and M2 with "
                  "Torelli injectivity; PTD iso/non-iso pair checks")


def test_criterion_9_trivialization():
    ok = True
    for alg in FIVE:
        rng = random.Random(alg.dim * 7 + 1)
        samples = [random_first_order_mc(alg, R2, rng) for _ in range(2)]
        if alg is D:
            samples.append(MCElement(R2, cochain_over_ring(
                alg, R2, {2: {(1, 1): {0: R2.gen("eps")}}}, 1, 6)))
        for x in samples:
            triv = trivialize_periodic(alg, x, WINDOW)
            if not triv.ok:
                ok = False
                continue
            g, red, D0, mu = (triv.gauge, triv.reduced, triv.base,
                              triv.deformation)
            if not gauge_residual(mu, g, D0, red, WINDOW, R2).is_zero():
                ok = False
            # first-order part vs -(1/t) I_x, away from the bar cut
            from ncperiod.period import _x_level_slice

            xs = _x_level_slice(x, R2, 1)
            seed = (contraction_blocks(red, xs, t_shift=-1).scaled(-1)
                    if xs is not None else BlockOp(0))
            lvl1 = g.level_slices(R2, 1).get(1, BlockOp(0))
            diff = lvl1.add(seed, scale=-1)
            interior = {key: mat for key, mat in diff.blocks.items()
                        if key[1] <= red.bar_bound - 2 and key[2] <= red.bar_bound - 2}
            if interior:
                ok = False
    report(9, ok, "trivialization succeeds for first-order deformations of "
                  "all five algebras in [-6,6]; gauge element's first-order "
                  "part is -(1/t) I_x (zero correction in the interior)")


def test_criterion_10_cli_determinism():
    cmds = [
        [sys.executable, "-m", "ncperiod.cli", "cyclic",
         "--algebra", "trunc_poly:2", "--degree-range", "0..4"],
        [sys.executable, "-m", "ncperiod.cli", "ss",
         "--algebra", "path:a2", "--format", "structured"],
        [sys.executable, "-m", "ncperiod.cli", "hh",
         "--algebra", "matrix:2", "--degree-range", "0..3"],
    ]
    ok = True
    for cmd in cmds:
        outs = set()
        for _ in range(2):
            proc = subprocess.run(cmd, capture_output=True)
            outs.add(proc.stdout)
            if proc.returncode != 0:
                ok = False
        if len(outs) != 1:
            ok = False
    report(10, ok, "repeated CLI runs are byte-identical")
