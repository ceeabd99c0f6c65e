"""Maurer-Cartan theory over artin local rings.

An MC element is a shifted-degree-1 normalized cochain with coefficients in
the maximal ideal; it deforms the algebra structure (b + x), the chain
differential (d + L_x) and, downstream, the cyclic complexes.  All solving
is done order by order along the m-adic filtration, where each step is an
affine-linear problem over Q in the cochain complex.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coeff import ArtinLocalRing, RingElement
from .exactlin import solve
from .hochschild import (
    ChainBasis,
    Cochain,
    CochainBasis,
    DeformedStructure,
    _cochain_diff_matrix,
    chain_add,
    cochain_differential,
    gerstenhaber_bracket,
    hochschild_boundary,
    structure_as_cochain,
)


class NotMaurerCartan(Exception):
    pass


@dataclass
class MCElement:
    ring: ArtinLocalRing
    value: Cochain  # coefficients are RingElements supported in m_R

    def __post_init__(self):
        for l, comp in self.value.components.items():
            for w, out in comp.items():
                for t, c in out.items():
                    if not isinstance(c, RingElement) or not c.in_maximal_ideal():
                        raise ValueError("MC coefficients must lie in m_R")
        if not self.value.is_zero() and self.value.sdeg != 1:
            raise ValueError("MC elements have shifted degree 1")

    @property
    def algebra(self):
        return self.value.algebra


@dataclass
class GaugeElement:
    ring: ArtinLocalRing
    value: Cochain  # shifted degree 0, coefficients in m_R

    def __post_init__(self):
        for l, comp in self.value.components.items():
            for w, out in comp.items():
                for t, c in out.items():
                    if not isinstance(c, RingElement) or not c.in_maximal_ideal():
                        raise ValueError("gauge coefficients must lie in m_R")
        if not self.value.is_zero() and self.value.sdeg != 0:
            raise ValueError("gauge elements have shifted degree 0")


def zero_mc(algebra, ring, arity_bound=4):
    return MCElement(ring, Cochain(algebra, {}, 1, arity_bound))


def cochain_over_ring(algebra, ring, components, sdeg, arity_bound=None):
    """Build a cochain whose coefficients are coerced into the ring."""
    comps = {}
    for l, comp in components.items():
        comps[l] = {
            tuple(w): {t: ring.coerce(c) for t, c in out.items()}
            for w, out in comp.items()
        }
    return Cochain(algebra, comps, sdeg, arity_bound)


def mc_residual(algebra, x: MCElement) -> Cochain:
    """dx + (1/2)[x, x]; zero exactly when b + x squares to zero."""
    dx = cochain_differential(algebra, x.value)
    bracket = gerstenhaber_bracket(x.value, x.value)
    return dx.add(bracket.scaled(Fraction(1, 2)))


def gauge_act(alpha: GaugeElement, x: MCElement) -> MCElement:
    """e^alpha . x = e^{ad alpha}(x) - Phi(ad alpha)(d alpha), Phi(z) = (e^z-1)/z."""
    if alpha.ring is not x.ring:
        raise ValueError("gauge and MC element live over different rings")
    algebra = x.algebra
    out = x.value
    term = x.value
    k = 1
    while not term.is_zero():
        term = gerstenhaber_bracket(alpha.value, term).scaled(Fraction(1, k))
        out = out.add(term)
        k += 1
        if k > alpha.ring.nilpotency_order + 2:
            raise RuntimeError("gauge exponential did not terminate")
    term = cochain_differential(algebra, alpha.value)
    k = 0
    while not term.is_zero():
        out = out.add(term, scale=-1)
        term = gerstenhaber_bracket(alpha.value, term).scaled(Fraction(1, k + 2))
        k += 1
        if k > alpha.ring.nilpotency_order + 2:
            raise RuntimeError("gauge exponential did not terminate")
    y = MCElement(x.ring, out)
    return y


# -- deformed algebras ---------------------------------------------------------------


@dataclass
class AlgebraOverArtin:
    """(A tensor R, b + x) for an MC element x; reduction mod m_R is A."""

    base: ArtinLocalRing
    algebra: object
    x: MCElement

    def structure(self):
        return DeformedStructure(self.algebra, self.x.value)

    def multiplication_constants(self):
        """Deformed m_2 as {(i, j): {k: RingElement}} (degree-0 algebras)."""
        alg = self.algebra
        ring = self.base
        out = {}
        for i in range(alg.dim):
            for j in range(alg.dim):
                col = {}
                for k, v in alg.product(i, j).items():
                    col[k] = ring.coerce(v)
                sgn = -1 if alg.degrees[i] % 2 else 1
                for k, v in self.x.value.eval(2, (i, j)).items():
                    cur = col.get(k, ring.zero())
                    col[k] = cur + sgn * v
                col = {k: v for k, v in col.items() if v}
                if col:
                    out[i, j] = col
        return out

    def validate(self):
        """Curved-structure validator: square-zero + unit condition."""
        res = mc_residual(self.algebra, self.x)
        if not res.is_zero():
            return ["square-zero fails: nonzero Maurer-Cartan residual"]
        # unit condition: x is normalized by construction, so 1 stays a unit;
        # re-check multiplicatively on the deformed constants for degree 0.
        problems = []
        if self.algebra.is_degree_zero():
            mult = self.multiplication_constants()
            ring = self.base
            for i in range(self.algebra.dim):
                got = mult.get((0, i), {})
                want = {i: ring.one()}
                if got != want:
                    problems.append(f"left unit fails at {i}")
                got = mult.get((i, 0), {})
                if got != want:
                    problems.append(f"right unit fails at {i}")
        return problems


def deform_algebra(algebra, x: MCElement) -> AlgebraOverArtin:
    res = mc_residual(algebra, x)
    if not res.is_zero():
        raise NotMaurerCartan("residual dx + [x,x]/2 is nonzero")
    return AlgebraOverArtin(base=x.ring, algebra=algebra, x=x)


# -- bar-level conjugation (independent route for the gauge dictionary) ---------------


def _coderivation_terms(algebra, cochain, word):
    """Coderivation extension of a cochain on a full bar word (entries may
    include the unit; unit outputs are kept, so this runs on BA, not B(A/k))."""
    out = {}
    n = len(word)
    for l in cochain.arities():
        for j in range(n - l + 1):
            val = cochain.eval(l, word[j : j + l])
            if not val:
                continue
            eps_j = sum(algebra.degrees[a] - 1 for a in word[:j])
            sgn = -1 if (cochain.sdeg * eps_j) % 2 else 1
            for t, c in val.items():
                key = word[:j] + (t,) + word[j + l :]
                s = out.get(key, 0) + sgn * c
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
    return out


def _apply_coderivation(algebra, cochain, words):
    out = {}
    for word, c in words.items():
        for key, v in _coderivation_terms(algebra, cochain, word).items():
            s = out.get(key, 0) + c * v
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


def _bar_exp(algebra, cochain, word, order_cap, sign=1):
    """e^{sign . D_cochain} applied to a bar word (nilpotent coefficients)."""
    acc = {word: 1}
    term = {word: 1}
    k = 1
    while term:
        term = _apply_coderivation(algebra, cochain, term)
        if sign < 0 and k % 2:
            scaled = {w: -Fraction(1, _fact(k)) * c for w, c in term.items()}
        else:
            scaled = {w: Fraction(1, _fact(k)) * c for w, c in term.items()}
        for w, c in scaled.items():
            s = acc.get(w, 0) + c
            if s:
                acc[w] = s
            else:
                acc.pop(w, None)
        k += 1
        if k > order_cap + 2:
            break
    return acc


def _fact(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def conjugated_structure_component(algebra, x: MCElement, alpha: GaugeElement,
                                   word):
    """Top component of e^{D_alpha} (b + x) e^{-D_alpha} on a bar word.

    Independent of the gauge-action formula: the conjugation is computed on
    the bar construction itself, then projected to the cochain component.
    """
    ring = x.ring
    cap = ring.nilpotency_order
    inner = _bar_exp(algebra, alpha.value, word, cap, sign=-1)
    # apply b + x as a coderivation
    full = structure_as_cochain(algebra, None).add(x.value)
    mid = {}
    for w, c in inner.items():
        for key, v in _coderivation_terms(algebra, full, w).items():
            s = mid.get(key, 0) + c * v
            if s:
                mid[key] = s
            else:
                mid.pop(key, None)
    outer = {}
    for w, c in mid.items():
        for key, v in _bar_exp(algebra, alpha.value, w, cap, sign=1).items():
            s = outer.get(key, 0) + c * v
            if s:
                outer[key] = s
            else:
                outer.pop(key, None)
    # top component: words of length 1 (projection to A[1])
    return {w[0]: c for w, c in outer.items() if len(w) == 1}


# -- m-adic affine solving -------------------------------------------------------------


def _level_of(ring, idx):
    return ring.filtration_level(idx)


def _cochain_level_part(ring, c: Cochain, level):
    """Q-valued slices of the coefficients at one m-adic level: {ring_idx: Cochain}."""
    parts = {}
    for l, comp in c.components.items():
        for w, out in comp.items():
            for t, v in out.items():
                for ridx, q in enumerate(v.coeffs):
                    if q and _level_of(ring, ridx) == level:
                        parts.setdefault(ridx, {}).setdefault(l, {}).setdefault(
                            w, {}
                        )[t] = q
    return {
        ridx: Cochain(c.algebra, comps, c.sdeg)
        for ridx, comps in parts.items()
    }


def _min_level(ring, c: Cochain):
    lv = None
    for l, comp in c.components.items():
        for w, out in comp.items():
            for t, v in out.items():
                for ridx, q in enumerate(v.coeffs):
                    if q:
                        s = _level_of(ring, ridx)
                        lv = s if lv is None else min(lv, s)
    return lv


def _solve_dalpha(algebra, arity, rhs_vec):
    """Particular alpha with d(alpha) = rhs (rhs an arity+1 cochain vector)."""
    dmat = _cochain_diff_matrix(algebra, arity)
    return solve(dmat, rhs_vec)


def _single_slot_cochain(algebra, ring, ridx, w, t, value, sdeg, bound):
    coeffs = [Fraction(0)] * ring.dim
    coeffs[ridx] = value
    return Cochain(algebra, {len(w): {w: {t: RingElement(ring, coeffs)}}},
                   sdeg, bound)


def gauge_equivalent(x: MCElement, y: MCElement, max_arity=2):
    """Find alpha with e^alpha . x = y, or None if obstructed.

    Both must be Maurer-Cartan over the same ring.  The solve walks the
    m-adic filtration; each level is an affine-linear solve whose unknowns
    are the new slice of alpha TOGETHER WITH the cocycle ambiguities left
    free by the earlier levels (their effect is probed exactly by applying
    the gauge action, and stays linear through nilpotency order 3; for
    deeper rings a returned witness is still verified exactly, while None
    means the linearized search was exhausted).  Degree-0 algebras only,
    so the unknown sits in arity 1 and obstructions in degree 2.
    """
    if x.ring is not y.ring:
        raise ValueError("different base rings")
    algebra = x.algebra
    ring = x.ring
    for z in (x, y):
        if not mc_residual(algebra, z).is_zero():
            raise NotMaurerCartan("input is not Maurer-Cartan")
    bound = x.value.arity_bound
    alpha = GaugeElement(ring, Cochain(algebra, {}, 0, bound))
    cb2 = CochainBasis(algebra, 2)
    cb1 = CochainBasis(algebra, 1)
    dmat = _cochain_diff_matrix(algebra, 1)
    from .exactlin import rref

    _, ker1, _ = rref(dmat)  # cocycle directions of the degree-0 unknowns
    pending = []  # ambiguity generators from solved levels, as Cochains

    def residual(gauge_cochain):
        cur = gauge_act(GaugeElement(ring, gauge_cochain), x)
        return y.value.add(cur.value, scale=-1)

    def ambiguities_at(level):
        out = []
        for ridx in range(ring.dim):
            if ring.filtration_level(ridx) != level:
                continue
            for zvec in ker1:
                z = Cochain(algebra, {}, 0, bound)
                for k, q in zvec.items():
                    w, t = cb1.keys[k]
                    z = z.add(_single_slot_cochain(algebra, ring, ridx, w, t,
                                                   q, 0, bound))
                if not z.is_zero():
                    out.append(z)
        return out

    registered = set()
    for _ in range(ring.nilpotency_order + 1):
        diff = residual(alpha.value)
        if diff.is_zero():
            return alpha
        level = _min_level(ring, diff)
        # ambiguity directions of every lower level stay in play (a skipped
        # level still contributes free cocycle directions)
        for below in range(1, level):
            if below not in registered:
                registered.add(below)
                pending.extend(ambiguities_at(below))
        level_slots = [i for i in range(ring.dim)
                       if ring.filtration_level(i) == level]
        # columns: new-slice unit unknowns, then pending ambiguity probes
        n_u = len(cb1.keys) * len(level_slots)
        cols = []
        for ridx in level_slots:
            for (w, t) in cb1.keys:
                e = _single_slot_cochain(algebra, ring, ridx, w, t,
                                         Fraction(1), 0, bound)
                de = cochain_differential(algebra, e)
                cols.append(("u", de.scaled(-1)))
        for z in pending:
            probe = residual(alpha.value.add(z)).add(diff, scale=-1)
            cols.append(("z", probe.scaled(-1)))
        # rows: the level slice of the arity-2 residual must be matched
        rows = {}
        mat_cols = []
        for kind, effect in cols:
            col = {}
            for ridx2, part in _cochain_level_part(ring, effect, level).items():
                for w, out in part.components.get(2, {}).items():
                    for t, v in out.items():
                        col[rows.setdefault((ridx2, cb2.index[w, t]),
                                            len(rows))] = v
            mat_cols.append(col)
        rhs = {}
        for ridx2, part in _cochain_level_part(ring, diff, level).items():
            for w, out in part.components.get(2, {}).items():
                for t, v in out.items():
                    rhs[rows.setdefault((ridx2, cb2.index[w, t]), len(rows))] = v
        from .exactlin import from_columns, solve as lin_solve

        sol = lin_solve(from_columns(len(rows), mat_cols), rhs)
        if sol is None:
            return None  # obstructed at this filtration level
        upd = Cochain(algebra, {}, 0, bound)
        for j, q in sol.items():
            if not q:
                continue
            if j < n_u:
                ridx = level_slots[j // len(cb1.keys)]
                w, t = cb1.keys[j % len(cb1.keys)]
                upd = upd.add(_single_slot_cochain(algebra, ring, ridx, w, t,
                                                   q, 0, bound))
            else:
                upd = upd.add(pending[j - n_u].map_coefficients(lambda c: q * c))
        alpha = GaugeElement(ring, alpha.value.add(upd))
        # record the new level's cocycle ambiguities for later levels
        if level not in registered:
            registered.add(level)
            pending.extend(ambiguities_at(level))
    if residual(alpha.value).is_zero():
        return alpha
    return None


def lift_order_by_order(algebra, x_low: MCElement, ring: ArtinLocalRing):
    """Lift an MC element along R -> R/m^n, or return the obstruction class.

    ring must extend x_low.ring by one m-adic level with matching basis
    labels (the truncated polynomial rings are built that way).  Returns
    ("lift", MCElement) or ("obstruction", {ring_index: class coordinates in
    the chosen degree-3 cohomology basis}) -- the quadratic obstruction per
    new-level ring slot, with the deterministic representative choice coming
    from the cohomology engine's homology basis.
    """
    small = x_low.ring
    if ring.basis_labels[: small.dim] != small.basis_labels:
        raise ValueError("ring does not extend the base of x_low")
    if not mc_residual(algebra, x_low).is_zero():
        raise NotMaurerCartan("x_low is not Maurer-Cartan")
    new_level = small.nilpotency_order
    # re-coefficient x_low into the bigger ring
    comps = {}
    for l, comp in x_low.value.components.items():
        comps[l] = {
            w: {
                t: RingElement(
                    ring,
                    list(c.coeffs) + [Fraction(0)] * (ring.dim - small.dim),
                )
                for t, c in out.items()
            }
            for w, out in comp.items()
        }
    x = MCElement(ring, Cochain(algebra, comps, 1, x_low.value.arity_bound))
    res = mc_residual(algebra, x)
    if res.is_zero():
        return "lift", x
    parts = _cochain_level_part(ring, res, new_level)
    cb3 = CochainBasis(algebra, 3)
    cb2 = CochainBasis(algebra, 2)
    upd = {}
    for ridx, part in parts.items():
        comp3 = part.components.get(3, {})
        vec = {}
        for w, out in comp3.items():
            for t, v in out.items():
                vec[cb3.index[w, t]] = -v
        sol = _solve_dalpha(algebra, 2, vec)
        if sol is None:
            return "obstruction", obstruction_class(algebra, parts)
        for k, q in sol.items():
            w, t = cb2.keys[k]
            coeffs = [Fraction(0)] * ring.dim
            coeffs[ridx] = q
            cur = upd.setdefault((w, t), ring.zero())
            upd[w, t] = cur + RingElement(ring, coeffs)
    comps = {}
    for (w, t), c in upd.items():
        comps.setdefault(2, {}).setdefault(w, {})[t] = c
    delta = Cochain(algebra, comps, 1, x_low.value.arity_bound)
    lifted = MCElement(ring, x.value.add(delta))
    if not mc_residual(algebra, lifted).is_zero():
        raise RuntimeError("order-by-order lift left a deeper residual (bug)")
    return "lift", lifted


def obstruction_class(algebra, parts):
    """Express an obstruction slice in the degree-3 cohomology basis."""
    from .hochschild import hochschild_cohomology

    hh = hochschild_cohomology(algebra, [3])
    out = {}
    cb3 = CochainBasis(algebra, 3)
    for ridx, part in parts.items():
        vec = {}
        for w, outv in part.components.get(3, {}).items():
            for t, v in outv.items():
                vec[cb3.index[w, t]] = v
        from .exactlin import express_in_homology

        coords = express_in_homology(hh.spots[3], vec)
        out[ridx] = coords
    return out


# -- deformed mixed complex -------------------------------------------------------------


@dataclass
class DeformedMixedComplex:
    ring: ArtinLocalRing
    algebra: object
    x: MCElement

    def boundary(self, chain):
        """d + L_x via the deformed structure maps."""
        struct = DeformedStructure(self.algebra, self.x.value)
        return hochschild_boundary(struct, chain, self.algebra)

    def connes(self, chain):
        from .hochschild import connes_B

        return connes_B(self.algebra, chain)

    def undeformed_plus_lie(self, chain):
        """d tensor R + L_x, assembled from the two summands separately."""
        from .hochschild import connes_B, lie_action

        out = hochschild_boundary(self.algebra, chain)
        for k, v in lie_action(self.algebra, self.x.value, chain).items():
            chain_add(out, k, v)
        return out

    def verify(self, bar_bound=4):
        """Square-zero, the two-summand identity, and [B, L_x] = 0."""
        basis = ChainBasis(self.algebra, bar_bound + 1)
        from .hochschild import connes_B, lie_action

        for a0, word in basis.keys:
            if len(word) > bar_bound:
                continue
            c = {(a0, word): 1}
            if self.boundary(c) != self.undeformed_plus_lie(c):
                return False
            if self.boundary(self.boundary(c)):
                return False
            if len(word) <= bar_bound - 1:
                acc = connes_B(self.algebra, lie_action(self.algebra, self.x.value, c))
                sgn = -1 if self.x.value.sdeg % 2 else 1
                for k, v in lie_action(
                    self.algebra, self.x.value, connes_B(self.algebra, c)
                ).items():
                    chain_add(acc, k, -sgn * v)
                if acc:
                    return False
        return True


def deformed_mixed_complex(algebra, x: MCElement) -> DeformedMixedComplex:
    if not mc_residual(algebra, x).is_zero():
        raise NotMaurerCartan("residual is nonzero")
    return DeformedMixedComplex(ring=x.ring, algebra=algebra, x=x)


def push_mc(x: MCElement, target: ArtinLocalRing, apply_map) -> MCElement:
    """Functoriality: apply a ring map coefficientwise."""
    comps = {}
    for l, comp in x.value.components.items():
        comps[l] = {
            w: {t: apply_map(c) for t, c in out.items()} for w, out in comp.items()
        }
    return MCElement(target, Cochain(x.algebra, comps, 1, x.value.arity_bound))
