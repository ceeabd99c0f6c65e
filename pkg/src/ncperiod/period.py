"""The period mapping and its diagnostics.

Operators on the cyclic complexes are represented t-equivariantly as block
maps  H_m -> H_{m'} . t^sigma  over the weightwise-reduced mixed complex (the
quotient End((t))/End[[t]] is then literally the sigma < 0 part, matching
the homology-level description of the period target).  The deformed
differential is transferred through the weightwise retract by homological
perturbation with delta = tB + L_x; trivializations and PTD isomorphisms
are found by m-adic-step linear solves in the block algebra.

Conventions:
  * trivialize_periodic returns g with  e^g . 0 = (deformed - undeformed)
    part, i.e. the e^{-g}-conjugation carries the deformed windowed periodic
    differential to the undeformed one; its first-order part is the seeded
    -(1/t) I_x up to an exact correction;
  * a PTD stores that g; its trivialization isomorphism is phi = e^{-g}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .coeff import RingElement
from .cyclic import NotStabilized, default_bar_bound, reduce_mixed_complex


class DegreeOutOfComputedRange(Exception):
    pass
from .deform import MCElement, NotMaurerCartan, mc_residual
from .exactlin import IncrementalSpan, SparseMatrix, from_columns, solve
from .hochschild import (
    Cochain,
    chain_add,
    cocycle_representatives,
    contraction_terms,
    hochschild_cohomology,
    hochschild_homology,
    lie_terms,
)


# -- block operators --------------------------------------------------------------


class BlockOp:
    """t-equivariant operator: blocks[(sigma, m, m')] : H_m -> H_{m'} t^sigma.

    deg is the cohomological degree, deg = 2 sigma - (m' - m) for every
    stored block.  Entries are Q numbers or RingElements.
    """

    __slots__ = ("deg", "blocks")

    def __init__(self, deg, blocks=None):
        self.deg = deg
        self.blocks = {}
        if blocks:
            for key, mat in blocks.items():
                if mat:
                    self.blocks[key] = dict(mat)

    def copy(self):
        return BlockOp(self.deg, {k: dict(v) for k, v in self.blocks.items()})

    def add(self, other, scale=1):
        out = self.copy()
        for key, mat in other.blocks.items():
            tgt = out.blocks.setdefault(key, {})
            for e, v in mat.items():
                s = tgt.get(e, 0) + scale * v
                if s:
                    tgt[e] = s
                else:
                    tgt.pop(e, None)
            if not tgt:
                out.blocks.pop(key, None)
        return out

    def scaled(self, c):
        return BlockOp(
            self.deg,
            {k: {e: c * v for e, v in mat.items()} for k, mat in self.blocks.items()},
        )

    def is_zero(self):
        return not self.blocks

    def compose(self, other, bar_bound, window):
        """self . other with weight and t-shift truncation."""
        lo, hi = window
        out = BlockOp(self.deg + other.deg)
        for (s2, m2, mm2), mat2 in other.blocks.items():
            for (s1, m1, mm1), mat1 in self.blocks.items():
                if m1 != mm2:
                    continue
                s = s1 + s2
                if not (lo <= s <= hi) or mm1 > bar_bound:
                    continue
                key = (s, m2, mm1)
                tgt = out.blocks.setdefault(key, {})
                for (i1, j1), v1 in mat1.items():
                    for (i2, j2), v2 in mat2.items():
                        if j1 != i2:
                            continue
                        e = (i1, j2)
                        sacc = tgt.get(e, 0) + v1 * v2
                        if sacc:
                            tgt[e] = sacc
                        else:
                            tgt.pop(e, None)
                if not tgt:
                    out.blocks.pop(key, None)
        return out

    def commutator(self, other, bar_bound, window):
        sgn = -1 if (self.deg * other.deg) % 2 else 1
        return self.compose(other, bar_bound, window).add(
            other.compose(self, bar_bound, window), scale=-sgn
        )

    def min_level(self, ring):
        lv = None
        for mat in self.blocks.values():
            for v in mat.values():
                if isinstance(v, RingElement):
                    for ridx, q in enumerate(v.coeffs):
                        if q:
                            s = ring.filtration_level(ridx)
                            lv = s if lv is None else min(lv, s)
                elif v:
                    lv = 0 if lv is None else min(lv, 0)
        return lv

    def level_slices(self, ring, level):
        """{ring_idx: BlockOp over Q} of the coefficients at one m-adic level."""
        out = {}
        for key, mat in self.blocks.items():
            for e, v in mat.items():
                if not isinstance(v, RingElement):
                    continue
                for ridx, q in enumerate(v.coeffs):
                    if q and ring.filtration_level(ridx) == level:
                        out.setdefault(ridx, BlockOp(self.deg)).blocks.setdefault(
                            key, {}
                        )[e] = q
        return out

    def map_coefficients(self, fn):
        return BlockOp(
            self.deg,
            {k: {e: fn(v) for e, v in mat.items()} for k, mat in self.blocks.items()},
        )

    def restrict_nonneg(self):
        return BlockOp(
            self.deg, {k: mat for k, mat in self.blocks.items() if k[0] >= 0}
        )

    def negative_part(self):
        return BlockOp(
            self.deg, {k: mat for k, mat in self.blocks.items() if k[0] < 0}
        )

    def __repr__(self):
        keys = sorted(self.blocks)
        return f"BlockOp(deg={self.deg}, blocks={keys})"


def identity_block(h_dims):
    op = BlockOp(0)
    for m, d in enumerate(h_dims):
        if d:
            op.blocks[0, m, m] = {(k, k): Fraction(1) for k in range(d)}
    return op


def block_exp(g: BlockOp, ring, red, window):
    """e^g for a degree-0 g with coefficients in m_R (nilpotent)."""
    bar = red.bar_bound
    out = identity_block(red.h_dims)
    term = identity_block(red.h_dims)
    k = 1
    while True:
        term = g.compose(term, bar, window).scaled(Fraction(1, k))
        if term.is_zero():
            break
        out = out.add(term)
        k += 1
        if k > ring.nilpotency_order + 1:
            break
    return out


# -- transfers ---------------------------------------------------------------------


def base_differential(red) -> BlockOp:
    """The transferred undeformed differential sum t^{n+1} d'_n as blocks."""
    op = BlockOp(1)
    for n, blocks in red.transfer.items():
        for m, mat in blocks.items():
            entries = {
                (i, j): v for (i, j), v in mat.entries.items()
            }
            if entries:
                op.blocks[n + 1, m, m + 2 * n + 1] = entries
    return op


def deformed_differential(red, x: MCElement, window) -> BlockOp:
    """Transfer of d + tB + L_x through the weightwise retract, as blocks."""
    algebra = red.algebra
    ring = x.ring
    bar = red.bar_bound
    lo, hi = window
    op = BlockOp(1)
    for m in range(bar + 1):
        sdr = red.sdr[m]
        if not sdr.reps:
            continue
        keymaps = red.spaces
        # frontier: {(weight, sigma): [chain vector per generator k of H_m]}
        vecs = []
        inv = _inverse_index(keymaps[m])
        for rep in sdr.reps:
            vecs.append({inv[j]: Fraction(c) for j, c in rep.items()})
        frontier = {(m, 0): vecs}
        guard = 0
        while frontier:
            guard += 1
            if guard > 4 * (bar + ring.nilpotency_order + 4):
                raise RuntimeError("transfer iteration did not terminate (bug)")
            nxt = {}
            for (w, sig), vlist in frontier.items():
                # delta = tB + L_x
                branches = []
                if w + 1 <= bar and sig + 1 <= hi:
                    branches.append(
                        ((w + 1, sig + 1), [_connes_apply(algebra, v) for v in vlist])
                    )
                for l in x.value.arities():
                    w2 = w - l + 1
                    if 0 <= w2 <= bar:
                        branches.append(
                            ((w2, sig), [_lie_apply(algebra, x.value, v, l) for v in vlist])
                        )
                for (w2, sig2), vl2 in branches:
                    if all(not v for v in vl2):
                        continue
                    # record the p-part into the block (sigma, m -> w2)
                    tgt = red.sdr[w2] if w2 <= bar else None
                    if tgt and tgt.reps and lo <= sig2 <= hi:
                        idx2 = keymaps[w2]
                        block = {}
                        for kgen, v in enumerate(vl2):
                            coords = {idx2[key]: c for key, c in v.items()}
                            for krow, prow in enumerate(tgt.proj_rows):
                                val = 0
                                for j, pv in prow.items():
                                    c = coords.get(j)
                                    if c:
                                        val = val + pv * c
                                if val:
                                    block[krow, kgen] = val
                        if block:
                            key = (sig2, m, w2)
                            cur = op.blocks.setdefault(key, {})
                            for e, v in block.items():
                                s = cur.get(e, 0) + v
                                if s:
                                    cur[e] = s
                                else:
                                    cur.pop(e, None)
                            if not cur:
                                op.blocks.pop(key, None)
                    # continue through the homotopy
                    if w2 + 1 <= bar + 1 and w2 <= bar:
                        hcols = red.sdr[w2].hmty_cols
                        idx2 = keymaps[w2]
                        inv_up = _inverse_index(keymaps[w2 + 1])
                        moved = []
                        for v in vl2:
                            out = {}
                            for key, c in v.items():
                                for j2, hv in hcols[idx2[key]].items():
                                    k2 = inv_up[j2]
                                    s = out.get(k2, 0) + hv * c
                                    if s:
                                        out[k2] = s
                                    else:
                                        out.pop(k2, None)
                            moved.append(out)
                        if any(moved):
                            cur = nxt.setdefault((w2 + 1, sig2), None)
                            if cur is None:
                                nxt[w2 + 1, sig2] = moved
                            else:
                                nxt[w2 + 1, sig2] = [
                                    _vec_add(a, b) for a, b in zip(cur, moved)
                                ]
            frontier = nxt
    return op


def _vec_add(a, b):
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, 0) + v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def _inverse_index(index):
    inv = [None] * len(index)
    for key, j in index.items():
        inv[j] = key
    return inv


def _connes_apply(algebra, vec):
    from .hochschild import connes_terms

    out = {}
    for (a0, word), c in vec.items():
        connes_terms(algebra, a0, word, lambda key, v, c=c: chain_add(out, key, c * v))
    return out


def _lie_apply(algebra, cochain, vec, arity):
    """Only the arity-`arity` part of L_cochain (used to split by weight)."""
    single = Cochain(
        algebra,
        {arity: cochain.components.get(arity, {})},
        cochain.sdeg,
        cochain.arity_bound,
        normalized=cochain.normalized,
    )
    out = {}
    for (a0, word), c in vec.items():
        lie_terms(algebra, single, a0, word, lambda key, v, c=c: chain_add(out, key, c * v))
    return out


def contraction_blocks(red, p: Cochain, t_shift=0) -> BlockOp:
    """p . I_P . iota as blocks at the given t-shift (degree |P| + 2 t_shift)."""
    algebra = red.algebra
    arities = p.arities()
    deg = (p.sdeg + 1) + 2 * t_shift
    op = BlockOp(deg)
    if not arities:
        return op
    (l,) = arities
    for m in range(l, red.bar_bound + 1):
        src = red.sdr[m]
        tgt_w = m - l
        tgt = red.sdr[tgt_w]
        if not src.reps or not tgt.reps:
            continue
        inv = _inverse_index(red.spaces[m])
        idx2 = red.spaces[tgt_w]
        block = {}
        for kgen, rep in enumerate(src.reps):
            vec = {inv[j]: c for j, c in rep.items()}
            out = {}
            for (a0, word), c in vec.items():
                contraction_terms(
                    algebra, p, a0, word, lambda key, v, c=c: chain_add(out, key, c * v)
                )
            coords = {idx2[key]: c for key, c in out.items()}
            for krow, prow in enumerate(tgt.proj_rows):
                val = 0
                for j, pv in prow.items():
                    cc = coords.get(j)
                    if cc:
                        val = val + pv * cc
                if val:
                    block[krow, kgen] = val
        if block:
            op.blocks[t_shift, m, tgt_w] = block
    return op


# -- first-order period data ---------------------------------------------------------


@dataclass
class PeriodClass:
    """Blocks HH_i -> HH_j t^{(j-i)/2} with (j-i)/2 < 0, per one HH^2 class."""

    blocks: dict = field(default_factory=dict)  # (i, j) -> {(row, col): Fraction}

    def t_exponents(self):
        return sorted({(j - i) // 2 for (i, j) in self.blocks})

    def is_zero(self):
        return not self.blocks


def first_order_period_matrix(algebra, degree_range, arity_bound=None,
                              bar_bound=None):
    """For each HH^2 basis class P, the blocks of I_P: HH_i -> HH_{i-2}."""
    degrees = sorted(degree_range)
    top = max(degrees)
    bar = bar_bound if bar_bound is not None else top + 2
    red = reduce_mixed_complex(algebra, bar)
    classes = cocycle_representatives(algebra, 2, arity_bound or 4)
    out = []
    for p in classes:
        op = contraction_blocks(red, p, t_shift=-1)
        pc = PeriodClass()
        for (sig, m, m2), mat in op.blocks.items():
            if m in degrees:
                pc.blocks[m, m2] = dict(mat)
        out.append(pc)
    return out


def torelli_rank(algebra, degree_range, bar_bound=None):
    """(dim HH^2, rank of P -> (I_P blocks), injective?)."""
    pcs = first_order_period_matrix(algebra, degree_range, bar_bound=bar_bound)
    dim_hh2 = len(pcs)
    keys = sorted({
        (i, j, r, c)
        for pc in pcs
        for (i, j), mat in pc.blocks.items()
        for (r, c) in mat
    })
    pos = {k: i for i, k in enumerate(keys)}
    span = IncrementalSpan()
    rank = 0
    for pc in pcs:
        vec = {}
        for (i, j), mat in pc.blocks.items():
            for (r, c), v in mat.items():
                vec[pos[i, j, r, c]] = v
        if vec and span.add(vec):
            rank += 1
    return dim_hh2, rank, rank == dim_hh2


def vdb_duality_check(algebra, d, pi_chain, degree_range, arity_bound=None):
    """Per degree s: the matrix of P -> class of I_P(pi), with an iso verdict.

    pi_chain: a cycle in the chain complex representing a class in HH_d.
    """
    degrees = sorted(degree_range)
    top = max(degrees)
    hh = hochschild_homology(algebra, range(0, max(d, top - 0) + 1 + 1))
    hhc = hochschild_cohomology(algebra, range(0, top + 1), arity_bound)
    out = {}
    for s in degrees:
        if s < 0 or d - s < 0:
            out[s] = {"matrix": [], "iso": hhc.dims.get(s, 0) == 0
                      and hh.dims.get(d - s, 0) == 0}
            continue
        if d - s not in hh.spots:
            raise DegreeOutOfComputedRange(f"degree {d - s} not computed")
        classes = cocycle_representatives(algebra, s, arity_bound or (top + 2))
        tgt = hh.spots[d - s]
        keys = hh.basis_keys[d - s]
        pos = {k: i for i, k in enumerate(keys)}
        cols = []
        ok = True
        for p in classes:
            img = {}
            for (a0, word), c in pi_chain.items():
                contraction_terms(
                    algebra, p, a0, word,
                    lambda key, v, c=c: chain_add(img, key, c * v),
                )
            vec = {pos[k]: v for k, v in img.items()}
            from .exactlin import express_in_homology

            coords = express_in_homology(tgt, vec)
            if coords is None:
                ok = False
                coords = {}
            cols.append(coords)
        rank = 0
        span = IncrementalSpan()
        for cvec in cols:
            if cvec and span.add(cvec):
                rank += 1
        iso = ok and rank == len(classes) == tgt.dim
        out[s] = {
            "matrix": cols,
            "dim_hhc": len(classes),
            "dim_hh": tgt.dim,
            "rank": rank,
            "iso": iso,
        }
    return out


def griffiths_transversality_check(algebra, degree_range, period_classes=None):
    """Every nonzero period block must shift the t-filtration down by one."""
    pcs = (
        period_classes
        if period_classes is not None
        else first_order_period_matrix(algebra, degree_range)
    )
    report = {"classes": len(pcs), "violations": []}
    for idx, pc in enumerate(pcs):
        for expo in pc.t_exponents():
            if expo != -1:
                report["violations"].append((idx, expo))
    report["ok"] = not report["violations"]
    return report


# -- trivialization and PTDs ----------------------------------------------------------


def _block_basis(h_dims, deg, window, bar_bound):
    """Index the degree-homogeneous block coordinates (sigma, m, m', r, c)."""
    lo, hi = window
    out = []
    for m in range(bar_bound + 1):
        if not h_dims[m]:
            continue
        for sig in range(lo, hi + 1):
            m2 = m + 2 * sig - deg
            if 0 <= m2 <= bar_bound and h_dims[m2]:
                for r in range(h_dims[m2]):
                    for c in range(h_dims[m]):
                        out.append((sig, m, m2, r, c))
    return {key: i for i, key in enumerate(out)}, out


def _op_to_vec(op, basis_index):
    vec = {}
    for (sig, m, m2), mat in op.blocks.items():
        for (r, c), v in mat.items():
            vec[basis_index[sig, m, m2, r, c]] = v
    return vec


def _vec_to_op(vec, basis_keys, deg):
    op = BlockOp(deg)
    for i, v in vec.items():
        sig, m, m2, r, c = basis_keys[i]
        if v:
            op.blocks.setdefault((sig, m, m2), {})[r, c] = v
    return op


def block_d(D0, f, bar_bound, window):
    """[D0, f] = D0 f - (-1)^{deg f} f D0."""
    sgn = -1 if f.deg % 2 else 1
    return D0.compose(f, bar_bound, window).add(
        f.compose(D0, bar_bound, window), scale=-sgn
    )


def _d_matrix(red, D0, deg, window):
    """Matrix of f -> [D0, f] on degree-deg block operators."""
    src_index, src_keys = _block_basis(red.h_dims, deg, window, red.bar_bound)
    dst_index, _ = _block_basis(red.h_dims, deg + 1, window, red.bar_bound)
    mat = SparseMatrix(len(dst_index), len(src_index))
    for key, j in src_index.items():
        sig, m, m2, r, c = key
        e = BlockOp(deg)
        e.blocks[sig, m, m2] = {(r, c): Fraction(1)}
        de = block_d(D0, e, red.bar_bound, window)
        for key2, mat2 in de.blocks.items():
            for (r2, c2), v in mat2.items():
                i = dst_index.get((key2[0], key2[1], key2[2], r2, c2))
                if i is not None:
                    mat.add_to(i, j, v)
    return mat, src_keys, dst_index


def gauge_residual(mu: BlockOp, g: BlockOp, D0: BlockOp, red, window, ring):
    """e^g . mu, computed as the e^g-conjugation of D0 + mu minus D0."""
    bar = red.bar_bound
    eg = block_exp(g, ring, red, window)
    eg_inv = block_exp(g.scaled(-1), ring, red, window)
    total = D0.add(mu)
    conj = eg.compose(total, bar, window).compose(eg_inv, bar, window)
    return conj.add(D0, scale=-1)


@dataclass
class Trivialization:
    """Result of the order-by-order periodic trivialization.

    gauge is None exactly when some filtration step was obstructed, in which
    case obstruction holds the blocking residual (its class in the block
    endomorphisms of the reduced window is the obstructing class).
    """

    gauge: object          # BlockOp or None
    reduced: object        # the weightwise-reduced mixed complex
    base: BlockOp          # transferred undeformed differential
    deformation: BlockOp   # transferred deformation part
    obstruction: object = None

    @property
    def ok(self):
        return self.gauge is not None


def trivialize_periodic(algebra, x: MCElement, t_window=(-6, 6), bar_bound=None):
    """Gauge element g (blocks) with e^g-conjugation of the deformed windowed
    periodic differential equal to the undeformed one, as a Trivialization;
    on an obstructed filtration step, gauge is None and the blocking residual
    is reported.  Raises NotMaurerCartan for a non-Maurer-Cartan input.
    """
    if not mc_residual(algebra, x).is_zero():
        raise NotMaurerCartan("x is not Maurer-Cartan")
    ring = x.ring
    lo, hi = t_window
    if bar_bound is None:
        bar_bound = default_bar_bound(algebra, 2, hi)
    red = reduce_mixed_complex(algebra, bar_bound)
    D0 = base_differential(red)
    Dx = deformed_differential(red, x, t_window)
    mu = Dx.add(D0, scale=-1)
    # seed blocks: -(1/t) I at each level, from the level slices of x
    g = BlockOp(0)
    for _ in range(ring.nilpotency_order + 1):
        res = gauge_residual(mu, g, D0, red, t_window, ring)
        lvl = res.min_level(ring)
        if lvl is None:
            return Trivialization(g, red, D0, mu)
        slices = res.level_slices(ring, lvl)
        upd = BlockOp(0)
        for ridx, rop in slices.items():
            # seeded particular solution: start from -(1/t) I_{x-slice}
            xs = _x_level_slice(x, ring, ridx)
            seed = contraction_blocks(red, xs, t_shift=-1).scaled(-1) \
                if xs is not None else BlockOp(0)
            dseed = block_d(D0, seed, red.bar_bound, t_window)
            rem = rop.add(dseed, scale=-1)
            corr = _solve_block_equation(red, D0, rem, t_window)
            if corr is None:
                return Trivialization(None, red, D0, mu, obstruction=rem)
            part = seed.add(corr)
            upd = upd.add(part.map_coefficients(
                lambda q, ridx=ridx: _ring_unit(ring, ridx, q)))
        g = g.add(upd)
    res = gauge_residual(mu, g, D0, red, t_window, ring)
    if res.is_zero():
        return Trivialization(g, red, D0, mu)
    return Trivialization(None, red, D0, mu, obstruction=res)


def _ring_unit(ring, ridx, q):
    coeffs = [Fraction(0)] * ring.dim
    coeffs[ridx] = q
    return RingElement(ring, coeffs)


def _x_level_slice(x: MCElement, ring, ridx):
    comps = {}
    for l, comp in x.value.components.items():
        for w, out in comp.items():
            for t, v in out.items():
                q = v.coeffs[ridx]
                if q:
                    comps.setdefault(l, {}).setdefault(w, {})[t] = q
    if not comps:
        return None
    return Cochain(x.algebra, comps, 1, x.value.arity_bound)


def _solve_block_equation(red, D0, rhs: BlockOp, window):
    """One degree-0 block g with [D0, g] = rhs (rhs degree 1), else None."""
    dmat, src_keys, dst_index = _d_matrix(red, D0, 0, window)
    vec = {}
    for (sig, m, m2), mat in rhs.blocks.items():
        for (r, c), v in mat.items():
            i = dst_index.get((sig, m, m2, r, c))
            if i is None:
                raise NotStabilized(f"residual block {(sig, m, m2)} left the window")
            vec[i] = v
    sol = solve(dmat, vec)
    if sol is None:
        return None
    return _vec_to_op(sol, src_keys, 0)


@dataclass
class PTD:
    """Deformed negative complex (sigma >= 0 blocks) plus a trivialization."""

    ring: object
    algebra: object
    x: MCElement
    window: tuple
    bar_bound: int
    negative_differential: BlockOp  # deformed, restricted to sigma >= 0
    trivialization: BlockOp         # g with e^{-g}-conjugation trivializing
    base: BlockOp                   # undeformed transferred differential

    def reduction_is_trivial(self):
        diff = self.negative_differential.add(
            self.base.restrict_nonneg(), scale=-1
        )
        return diff.min_level(self.ring) not in (0, None) or diff.is_zero()


def period_map_artin(algebra, x: MCElement, t_window=(-6, 6), bar_bound=None):
    triv = trivialize_periodic(algebra, x, t_window, bar_bound)
    if not triv.ok:
        raise NotStabilized("trivialization failed; obstruction recorded")
    Dx = triv.base.add(triv.deformation)
    ptd = PTD(
        ring=x.ring,
        algebra=algebra,
        x=x,
        window=t_window,
        bar_bound=triv.reduced.bar_bound,
        negative_differential=Dx.restrict_nonneg(),
        trivialization=triv.gauge,
        base=triv.base,
    )
    if not ptd.reduction_is_trivial():
        raise RuntimeError("PTD reduction mod m_R is not the base complex (bug)")
    return ptd


def _ptd_residuals(p, q, c, a, red, ring):
    """(chain-map residual on the negative part, square residual)."""
    bar, window = p.bar_bound, p.window
    D0 = p.base
    ec = block_exp(c, ring, red, window)
    S = ec.compose(p.negative_differential, bar, window).add(
        q.negative_differential.compose(ec, bar, window), scale=-1
    ).restrict_nonneg()
    da = block_d(D0, a, bar, window)
    eda = block_exp(da, ring, red, window)
    lhs = block_exp(q.trivialization.scaled(-1), ring, red, window).compose(
        eda, bar, window
    )
    rhs = ec.compose(
        block_exp(p.trivialization.scaled(-1), ring, red, window), bar, window
    )
    return S, lhs.add(rhs, scale=-1)


def ptd_isomorphic(p: PTD, q: PTD, max_steps=None):
    """Search h = e^c (iso of the negative deformations) and a with
    phi_2 e^{da} = h((t)) phi_1; returns (True, (c, a)) or (False, step).

    Levels of the maximal ideal are solved in turn; each solve carries the
    kernel directions left free by the lower levels as extra unknowns (their
    effect is probed by evaluating the residuals, exact through nilpotency
    order 3).  A returned witness always verifies on the nose.
    """
    if p.ring is not q.ring or p.window != q.window:
        raise ValueError("PTDs over different rings or windows")
    ring = p.ring
    red = reduce_mixed_complex(p.algebra, p.bar_bound)
    window = p.window
    bar = p.bar_bound
    D0 = p.base
    c = BlockOp(0)
    a = BlockOp(-1)
    steps = max_steps or (ring.nilpotency_order + 1)
    # linear system data, shared across levels:
    # unknowns (c_s with sigma >= 0, a_s); rows are
    #   (1) [D0, c_s] = -S_s   on degree-1 block coordinates,
    #   (2) d a_s - c_s = -R_s on degree-0 block coordinates.
    idx_c, keys_c = _block_basis(red.h_dims, 0, window, bar)
    keys_c_nonneg = [k for k in keys_c if k[0] >= 0]
    pos_c = {k: i for i, k in enumerate(keys_c_nonneg)}
    idx_a, keys_a = _block_basis(red.h_dims, -1, window, bar)
    n_c, n_a = len(keys_c_nonneg), len(keys_a)
    _, _, dst_index_c1 = _d_matrix(red, D0, 0, window)
    off = len(dst_index_c1)
    mat = SparseMatrix(off + len(idx_c), n_c + n_a)
    for k, j in pos_c.items():
        sig, m, m2, r, cc = k
        e = BlockOp(0)
        e.blocks[sig, m, m2] = {(r, cc): Fraction(1)}
        for key2, mat2 in block_d(D0, e, bar, window).blocks.items():
            for (r2, c2), v in mat2.items():
                i = dst_index_c1.get((key2[0], key2[1], key2[2], r2, c2))
                if i is not None:
                    mat.add_to(i, j, v)
        i = idx_c.get(k)
        if i is not None:
            mat.add_to(off + i, j, Fraction(-1))
    for k, j in idx_a.items():
        sig, m, m2, r, cc = k
        e = BlockOp(-1)
        e.blocks[sig, m, m2] = {(r, cc): Fraction(1)}
        for key2, mat2 in block_d(D0, e, bar, window).blocks.items():
            for (r2, c2), v in mat2.items():
                i = idx_c.get((key2[0], key2[1], key2[2], r2, c2))
                if i is not None:
                    mat.add_to(off + i, n_c + j, v)

    def pair_from_vec(vec, ridx=None):
        """(c-part, a-part) BlockOps from a solution/kernel vector."""
        out_c = BlockOp(0)
        out_a = BlockOp(-1)
        for i, v in vec.items():
            if not v:
                continue
            if i < n_c:
                key, tgt = keys_c_nonneg[i], out_c
            else:
                key, tgt = keys_a[i - n_c], out_a
            sig, m, m2, r, cc = key
            blk = tgt.blocks.setdefault((sig, m, m2), {})
            val = _ring_unit(ring, ridx, v) if ridx is not None else v
            blk[r, cc] = blk.get((r, cc), 0) + val
        return out_c, out_a

    from .exactlin import rref

    _, sys_kernel, _ = rref(mat)
    registered = set()
    pending = []  # (c-part, a-part) ambiguity pairs from lower levels

    def register(level):
        if level in registered:
            return
        registered.add(level)
        for ridx in range(ring.dim):
            if ring.filtration_level(ridx) != level:
                continue
            for zvec in sys_kernel:
                pending.append(pair_from_vec(zvec, ridx))

    def residual_vec(cc_op, aa_op, lvl):
        S, Rsq = _ptd_residuals(p, q, cc_op, aa_op, red, ring)
        out = {}
        for ridx, sop in S.level_slices(ring, lvl).items():
            for (sig, m, m2), mat2 in sop.blocks.items():
                for (r, cc2), v in mat2.items():
                    i = dst_index_c1.get((sig, m, m2, r, cc2))
                    if i is None:
                        raise NotStabilized("chain-map residual left the window")
                    out[ridx, i] = v
        for ridx, rop in Rsq.level_slices(ring, lvl).items():
            for (sig, m, m2), mat2 in rop.blocks.items():
                for (r, cc2), v in mat2.items():
                    i = idx_c.get((sig, m, m2, r, cc2))
                    if i is None:
                        raise NotStabilized("square residual left the window")
                    out[ridx, off + i] = v
        return out

    for _ in range(steps):
        S, Rsq = _ptd_residuals(p, q, c, a, red, ring)
        levels = [v for v in (S.min_level(ring), Rsq.min_level(ring))
                  if v is not None]
        if not levels:
            return True, (c, a)
        lvl = min(levels)
        for below in range(1, lvl):
            register(below)
        base_res = residual_vec(c, a, lvl)
        level_slots = [i for i in range(ring.dim)
                       if ring.filtration_level(i) == lvl]
        # augmented system: per-slot copies of the linear unknowns, plus the
        # pending ambiguity pairs probed through the residuals
        rows = {}
        col_meta = []
        mat_cols = mat.columns()
        aug_cols = []
        for ridx in level_slots:
            for j in range(n_c + n_a):
                col = {}
                for i, v in mat_cols[j].items():
                    col[rows.setdefault((ridx, i), len(rows))] = v
                aug_cols.append(col)
                col_meta.append(("lin", ridx, j))
        for z_idx, (zc, za) in enumerate(pending):
            probe = residual_vec(c.add(zc), a.add(za), lvl)
            col = {}
            for key, v in probe.items():
                delta = v - base_res.get(key, 0)
                if delta:
                    col[rows.setdefault(key, len(rows))] = delta
            aug_cols.append(col)
            col_meta.append(("amb", z_idx, None))
        rhs = {}
        for key, v in base_res.items():
            rhs[rows.setdefault(key, len(rows))] = -v
        sol = solve(from_columns(len(rows), aug_cols), rhs)
        if sol is None:
            return False, lvl
        upd_c = BlockOp(0)
        upd_a = BlockOp(-1)
        for col_i, v in sol.items():
            if not v:
                continue
            kind, xx, j = col_meta[col_i]
            if kind == "lin":
                cpart, apart = pair_from_vec({j: v}, xx)
            else:
                zc, za = pending[xx]
                cpart = zc.map_coefficients(lambda q2: v * q2)
                apart = za.map_coefficients(lambda q2: v * q2)
            upd_c = upd_c.add(cpart)
            upd_a = upd_a.add(apart)
        c = c.add(upd_c)
        a = a.add(upd_a)
        register(lvl)
    S, Rsq = _ptd_residuals(p, q, c, a, red, ring)
    if S.is_zero() and Rsq.is_zero():
        return True, (c, a)
    return False, None
