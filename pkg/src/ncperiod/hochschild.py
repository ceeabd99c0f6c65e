"""Normalized Hochschild chains/cochains and their operators.

Representation
  * a chain is a dict {(a0, word): coeff} where a0 is an A-basis index and
    word is a tuple of indices from the unit complement (basis[1:]); the
    unit never occupies a bar slot (normalization);
  * a cochain of arity l is stored at the shifted level: a map sending an
    l-tuple of complement indices to a coefficient vector over the full
    basis.  The structure maps of the algebra itself (the product and the
    differential) are evaluated from the structure constants with the
    shift sign  b_n[a_1|..|a_n] = (-1)^{sum (n-i)|a_i|} m_n(a_1,..,a_n).

Signs use shifted degrees sd(a) = |a| - 1, eps_i = sd(a_1)+..+sd(a_i) and
mu_i = sd(a_0) + eps_i:
  * boundary, interior part:   (-1)^{mu_j}             (this is L at b)
  * boundary, wrap part:       (-1)^{mu_i (mu_n - mu_i)}
  * Lie action of P, interior: (-1)^{sd(P) mu_j}
  * Lie action of P, wrap:     (-1)^{mu_i (mu_n - mu_i)}
  * Connes operator, i-th rotation: (-1)^{(eps_i + sd(a_0))(eps_n - eps_i)}
  * contraction by arity-p P:  (-1)^{(sd(P)+1)|a_0|} a_0 P[a_1|..|a_p] x rest

The wrap windows are the contiguous cyclic runs containing a_0 exactly
once: for arity l they are i in 0..n with n-i+1 <= l <= n+1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .exactlin import SparseMatrix, homology_at


class BarBoundExceeded(Exception):
    pass


class ArityBoundExceeded(Exception):
    pass


# -- cochains ------------------------------------------------------------------


class Cochain:
    """Element of the shifted normalized cochain complex, arity-bounded.

    components[l][word][out] = coeff; word entries are complement indices
    (>= 1), out ranges over the full basis.  sdeg is the degree as a map of
    shifted spaces; for an algebra in degree 0 an arity-l component has
    sdeg l - 1.
    """

    __slots__ = ("algebra", "components", "sdeg", "arity_bound", "normalized")

    def __init__(self, algebra, components, sdeg, arity_bound=None, normalized=True):
        self.algebra = algebra
        self.normalized = normalized
        self.components = {}
        for l, comp in components.items():
            clean = {}
            for word, out in comp.items():
                vec = {k: v for k, v in out.items() if v}
                if vec:
                    if normalized and any(i == 0 for i in word):
                        raise ValueError("normalized cochains vanish on the unit")
                    clean[tuple(word)] = vec
            if clean:
                self.components[l] = clean
        self.sdeg = sdeg
        self.arity_bound = arity_bound

    def arities(self):
        return sorted(self.components)

    def eval(self, l, word):
        """Value on a word of full-basis indices (zero if any slot is the unit)."""
        comp = self.components.get(l)
        if not comp:
            return {}
        return comp.get(tuple(word), {})

    def is_zero(self):
        return not self.components

    def map_coefficients(self, fn):
        comps = {}
        for l, comp in self.components.items():
            comps[l] = {
                w: {k: fn(v) for k, v in out.items()} for w, out in comp.items()
            }
        return Cochain(self.algebra, comps, self.sdeg, self.arity_bound,
                       normalized=self.normalized)

    def add(self, other, scale=1):
        if other.sdeg != self.sdeg and not (self.is_zero() or other.is_zero()):
            raise ValueError("cochain degrees differ")
        comps = {l: {w: dict(out) for w, out in c.items()}
                 for l, c in self.components.items()}
        for l, comp in other.components.items():
            tgt = comps.setdefault(l, {})
            for w, out in comp.items():
                vec = tgt.setdefault(w, {})
                for k, v in out.items():
                    s = vec.get(k, 0) + scale * v
                    if s:
                        vec[k] = s
                    else:
                        vec.pop(k, None)
        sdeg = self.sdeg if not self.is_zero() else other.sdeg
        return Cochain(self.algebra, comps, sdeg,
                       self.arity_bound or other.arity_bound,
                       normalized=self.normalized and other.normalized)

    def scaled(self, c):
        return self.map_coefficients(lambda v: c * v)

    def __repr__(self):
        parts = [f"arity {l}: {len(c)} words" for l, c in sorted(self.components.items())]
        return f"Cochain(sdeg={self.sdeg}; " + ", ".join(parts) + ")"


def basis_cochains(algebra, arity_bound, sdeg=None):
    """All (word, out) basis cochains with arity <= arity_bound.

    For a degree-0 algebra each arity-l basis cochain has sdeg l - 1; for
    graded algebras the sdeg is computed per (word, out) pair and cochains
    are grouped accordingly unless sdeg is given.
    """
    out = []
    red = list(algebra.reduced_indices)
    for l in range(arity_bound + 1):
        for word in itertools.product(red, repeat=l):
            eps = sum(algebra.degrees[i] - 1 for i in word)
            for t in range(algebra.dim):
                s = algebra.degrees[t] - 1 - eps
                if sdeg is not None and s != sdeg:
                    continue
                out.append(Cochain(algebra, {l: {word: {t: 1}}}, s, arity_bound))
    return out


def unit_cochain(algebra, arity_bound=None):
    """1 in Hom(k, A): the arity-0 cochain with value the unit."""
    return Cochain(algebra, {0: {(): {0: 1}}}, algebra.degrees[0] - 1, arity_bound)


# -- structure maps -------------------------------------------------------------


class DgStructure:
    """b of the algebra itself: b_1 from diff, b_2 from mult, sdeg 1."""

    __slots__ = ("algebra",)
    sdeg = 1

    def __init__(self, algebra):
        self.algebra = algebra

    def arities(self):
        out = []
        if self.algebra.diff:
            out.append(1)
        out.append(2)
        return out

    def eval(self, l, word):
        a = self.algebra
        if l == 1:
            return a.d_of(word[0])
        if l == 2:
            i, j = word
            sgn = -1 if a.degrees[i] % 2 else 1
            col = a.product(i, j)
            return {k: sgn * v for k, v in col.items()} if sgn < 0 else col
        return {}


class DeformedStructure:
    """b + x for a degree-1 cochain x with coefficients in a nilpotent ideal."""

    __slots__ = ("algebra", "x", "base")
    sdeg = 1

    def __init__(self, algebra, x):
        self.algebra = algebra
        self.x = x
        self.base = DgStructure(algebra)

    def arities(self):
        return sorted(set(self.base.arities()) | set(self.x.arities()))

    def eval(self, l, word):
        out = dict(self.base.eval(l, word))
        if any(i == 0 for i in word):
            return out  # x is normalized
        for k, v in self.x.eval(l, word).items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return out


# -- term generation -------------------------------------------------------------


def _prefix_eps(algebra, word):
    eps = [0]
    acc = 0
    for i in word:
        acc += algebra.degrees[i] - 1
        eps.append(acc)
    return eps


def lie_terms(algebra, op, a0, word, out_terms):
    """Accumulate the terms of L_op on the basis chain (a0, word).

    op provides arities(), eval(l, word), sdeg.  out_terms is a callable
    (key, coeff) -> None receiving normalized chain keys.
    """
    n = len(word)
    eps = _prefix_eps(algebra, word)
    sd0 = algebra.degrees[a0] - 1
    sdP = op.sdeg
    for l in op.arities():
        # interior insertions
        for j in range(n - l + 1):
            seg = word[j:j + l]
            val = op.eval(l, seg)
            if not val:
                continue
            mu_j = sd0 + eps[j]
            sgn = -1 if (sdP * mu_j) % 2 else 1
            head, tail = word[:j], word[j + l:]
            for out, c in val.items():
                if out == 0:
                    continue  # unit dies in a bar slot
                out_terms((a0, head + (out,) + tail), sgn * c)
        # wrap-around terms: window covers a_0
        for i in range(n + 1):
            lo = n - i + 1
            if l < lo or l > n + 1:
                continue
            m = l - (n - i) - 1
            if m > i:
                continue
            window = word[i:] + (a0,) + word[:m]
            val = op.eval(l, window)
            if not val:
                continue
            mu_i = sd0 + eps[i]
            exp = mu_i * (sd0 + eps[n] - mu_i)
            sgn = -1 if exp % 2 else 1
            rest = word[m:i]
            for out, c in val.items():
                out_terms((out, rest), sgn * c)


def boundary_terms(algebra, struct, a0, word, out_terms):
    lie_terms(algebra, struct, a0, word, out_terms)


def connes_terms(algebra, a0, word, out_terms):
    """B(a0 x word): all cyclic rotations with the unit in front."""
    if a0 == 0:
        return  # class of a0 in the complement is zero
    n = len(word)
    eps = _prefix_eps(algebra, word)
    sd0 = algebra.degrees[a0] - 1
    for i in range(n + 1):
        exp = (eps[i] + sd0) * (eps[n] - eps[i])
        sgn = -1 if exp % 2 else 1
        out_terms((0, word[i:] + (a0,) + word[:i]), sgn)


def contraction_terms(algebra, cochain, a0, word, out_terms):
    """I_P for P concentrated in one arity p: cap off the first p slots."""
    arities = cochain.arities()
    if not arities:
        return
    if len(arities) != 1:
        raise ValueError("contraction needs a single-arity cochain")
    p = arities[0]
    n = len(word)
    if p > n:
        return
    val = cochain.eval(p, word[:p])
    if not val:
        return
    deg0 = algebra.degrees[a0]
    sgn = -1 if ((cochain.sdeg + 1) * deg0) % 2 else 1
    rest = word[p:]
    for out, c in val.items():
        for k, m in algebra.product(a0, out).items():
            out_terms((k, rest), sgn * c * m)


# -- chains as dicts --------------------------------------------------------------


def chain_add(acc, key, coeff):
    s = acc.get(key, 0) + coeff
    if s:
        acc[key] = s
    else:
        acc.pop(key, None)


def apply_terms(algebra, term_fn, chain):
    """Apply a term generator linearly to a chain dict."""
    out = {}
    for (a0, word), c in chain.items():
        term_fn(a0, word, lambda key, v, c=c: chain_add(out, key, c * v))
    return out


def hochschild_boundary(algebra_or_struct, chain, algebra=None):
    """The chain differential; accepts a DgAlgebra, a deformed algebra, or a
    structure object."""
    if hasattr(algebra_or_struct, "structure"):  # AlgebraOverArtin
        struct = algebra_or_struct.structure()
        alg = algebra_or_struct.algebra
    elif hasattr(algebra_or_struct, "eval"):
        struct, alg = algebra_or_struct, algebra or algebra_or_struct.algebra
    else:
        alg = algebra_or_struct
        struct = DgStructure(alg)
    return apply_terms(alg, lambda a0, w, f: lie_terms(alg, struct, a0, w, f), chain)


def connes_B(algebra, chain):
    return apply_terms(algebra, lambda a0, w, f: connes_terms(algebra, a0, w, f), chain)


def lie_action(algebra, cochain, chain):
    return apply_terms(algebra, lambda a0, w, f: lie_terms(algebra, cochain, a0, w, f), chain)


def contraction(algebra, cochain, chain):
    return apply_terms(
        algebra, lambda a0, w, f: contraction_terms(algebra, cochain, a0, w, f), chain
    )


# -- cochain-level operations ------------------------------------------------------


def brace_compose(p, q, arity_bound=None):
    """The insertion composition p o q (sum over one slot of p fed by q).

    (p o q)[a_1|..] = sum_i (-1)^{sd(q) eps_i} p[a_1|..|q[window]|..]; the
    value of q is projected to the unit complement before insertion when p
    is normalized, and for the structure maps the unit component is kept by
    evaluating the product table directly (handled by callers that need it;
    here both are normalized cochains or the structure viewed as a cochain
    acting on complement words, so the unit component of q's value never
    contributes except through eval on full words).
    """
    algebra = p.algebra
    bound = arity_bound or p.arity_bound or q.arity_bound
    comps = {}
    sdq = q.sdeg
    items_p = [(l, w, out) for l, comp in p.components.items()
               for w, out in comp.items()]
    for v, compq in q.components.items():
        for l, w, outp in items_p:
            if l == 0:
                continue
            n = l + v - 1
            if bound is not None and n > bound:
                raise ArityBoundExceeded(f"arity {n} exceeds bound {bound}")
            # choose the slot i of p and a word for q matching w at slot i
            for i in range(l):
                # resulting word: w[:i] + u + w[i+1:], u of length v, with
                # q[u] having a component at w[i]; result words containing
                # the unit belong to unit inputs and are dropped (they only
                # arise when a factor is stored on full words, i.e. is b).
                for u, outq in compq.items():
                    c_ins = outq.get(w[i])
                    if not c_ins:
                        continue
                    word = w[:i] + u + w[i + 1:]
                    if 0 in word:
                        continue
                    eps_i = sum(algebra.degrees[a] - 1 for a in w[:i])
                    sgn = -1 if (sdq * eps_i) % 2 else 1
                    key = comps.setdefault(n, {}).setdefault(word, {})
                    for t, cp in outp.items():
                        chain_add(key, t, sgn * c_ins * cp)
    return Cochain(algebra, comps, p.sdeg + q.sdeg, bound)


def gerstenhaber_bracket(p, q, arity_bound=None):
    """[p, q] = p o q - (-1)^{sd(p) sd(q)} q o p."""
    pq = brace_compose(p, q, arity_bound)
    qp = brace_compose(q, p, arity_bound)
    sgn = -1 if (p.sdeg * q.sdeg) % 2 else 1
    return pq.add(qp, scale=-sgn)


def structure_as_cochain(algebra, arity_bound, struct=None):
    """b written out on all basis words (units included, so that insertions
    of unit-valued outputs are seen when b is the outer factor of a brace)."""
    struct = struct or DgStructure(algebra)
    comps = {}
    for l in struct.arities():
        comp = {}
        for word in itertools.product(range(algebra.dim), repeat=l):
            val = struct.eval(l, word)
            if val:
                comp[word] = dict(val)
        if comp:
            comps[l] = comp
    return Cochain(algebra, comps, 1, arity_bound, normalized=False)


def cochain_differential(algebra, p, arity_bound=None):
    """d p = [b, p] = b o p - (-1)^{sd p} p o b on normalized cochains."""
    bound = arity_bound or p.arity_bound
    if bound is None:
        bound = max(p.arities(), default=0) + 1
    b = structure_as_cochain(algebra, bound + 1)
    bp = brace_compose(b, p, bound)
    pb = brace_compose(p, b, bound)
    sgn = -1 if p.sdeg % 2 else 1
    return bp.add(pb, scale=-sgn)


# -- finite bases and matrices ------------------------------------------------------


class ChainBasis:
    """Indexed basis of chains with bar weight <= max_weight."""

    def __init__(self, algebra, max_weight):
        self.algebra = algebra
        self.max_weight = max_weight
        self.keys = []
        red = list(algebra.reduced_indices)
        for n in range(max_weight + 1):
            for a0 in range(algebra.dim):
                for word in itertools.product(red, repeat=n):
                    self.keys.append((a0, word))
        self.index = {k: i for i, k in enumerate(self.keys)}

    def __len__(self):
        return len(self.keys)

    def weight_slice(self, n):
        return [i for i, (a0, w) in enumerate(self.keys) if len(w) == n]

    def vector_of(self, chain):
        out = {}
        for key, c in chain.items():
            i = self.index.get(key)
            if i is None:
                raise BarBoundExceeded(f"term of weight {len(key[1])} not stored")
            out[i] = c
        return out

    def matrix_of(self, term_fn):
        """Columns of the operator sending basis key -> term_fn terms."""
        cols = []
        for a0, word in self.keys:
            acc = {}
            term_fn(a0, word, lambda key, v: chain_add(acc, key, v))
            col = []
            for key, c in acc.items():
                i = self.index.get(key)
                if i is None:
                    raise BarBoundExceeded(
                        f"term of weight {len(key[1])} not stored (max {self.max_weight})"
                    )
                col.append((i, c))
            cols.append(col)
        return cols


# -- homology -----------------------------------------------------------------------


@dataclass
class GradedDims:
    """Dimensions per degree with homology representatives."""

    dims: dict = field(default_factory=dict)
    spots: dict = field(default_factory=dict)  # degree -> SubquotientBasis
    basis_keys: dict = field(default_factory=dict)  # degree -> list of keys

    def __getitem__(self, n):
        return self.dims[n]

    def as_tuple(self, degrees):
        return tuple(self.dims.get(n, 0) for n in degrees)


def _weight_graded_boundary(algebra, struct, max_weight):
    """Boundary matrices per weight: d[n]: C_n -> C_{n-1} (degree-0 algebras)."""
    red = list(algebra.reduced_indices)
    spaces = []
    for n in range(max_weight + 1):
        keys = [
            (a0, w)
            for a0 in range(algebra.dim)
            for w in itertools.product(red, repeat=n)
        ]
        spaces.append({k: i for i, k in enumerate(keys)})
    mats = [None]
    for n in range(1, max_weight + 1):
        src, dst = spaces[n], spaces[n - 1]
        m = SparseMatrix(len(dst), len(src))
        for (a0, word), j in src.items():
            acc = {}
            lie_terms(algebra, struct, a0, word, lambda k, v: chain_add(acc, k, v))
            for key, c in acc.items():
                m.add_to(dst[key], j, c)
        mats.append(m)
    return spaces, mats


def hochschild_homology(algebra, degree_range):
    """Exact HH dims with representatives; algebra must sit in degree 0."""
    if not algebra.is_degree_zero():
        raise ValueError("homology requires a degree-0 algebra")
    degrees = sorted(degree_range)
    top = max(degrees)
    struct = DgStructure(algebra)
    spaces, mats = _weight_graded_boundary(algebra, struct, top + 1)
    out = GradedDims()
    for n in degrees:
        if n < 0:
            out.dims[n] = 0
            continue
        d_in = mats[n + 1]
        if n == 0:
            d_out = SparseMatrix(0, len(spaces[0]))
        else:
            d_out = mats[n]
        sub = homology_at(d_in, d_out)
        out.dims[n] = sub.dim
        out.spots[n] = sub
        keys = [None] * len(spaces[n])
        for k, i in spaces[n].items():
            keys[i] = k
        out.basis_keys[n] = keys
    return out


class CochainBasis:
    """Indexed basis of normalized cochains of one arity."""

    def __init__(self, algebra, arity):
        self.algebra = algebra
        self.arity = arity
        red = list(algebra.reduced_indices)
        self.keys = [
            (w, t)
            for w in itertools.product(red, repeat=arity)
            for t in range(algebra.dim)
        ]
        self.index = {k: i for i, k in enumerate(self.keys)}

    def __len__(self):
        return len(self.keys)

    def cochain_of(self, vec, arity_bound=None):
        comps = {}
        for i, c in (vec.items() if isinstance(vec, dict) else enumerate(vec)):
            if not c:
                continue
            w, t = self.keys[i]
            comps.setdefault(self.arity, {}).setdefault(w, {})[t] = c
        sdeg = self.arity - 1  # degree-0 algebras
        return Cochain(self.algebra, comps, sdeg, arity_bound)


def _cochain_diff_matrix(algebra, arity):
    """Matrix of [b, -] from arity l to arity l+1 (degree-0 algebras)."""
    src = CochainBasis(algebra, arity)
    dst = CochainBasis(algebra, arity + 1)
    m = SparseMatrix(len(dst), len(src))
    for j, (w, t) in enumerate(src.keys):
        p = Cochain(algebra, {arity: {w: {t: 1}}}, arity - 1, arity + 2)
        dp = cochain_differential(algebra, p, arity + 1)
        comp = dp.components.get(arity + 1, {})
        for w2, out in comp.items():
            for t2, c in out.items():
                m.add_to(dst.index[w2, t2], j, c)
    return m


def hochschild_cohomology(algebra, degree_range, arity_bound=None):
    """Exact HH^n dims (normalized complex); algebra must sit in degree 0."""
    if not algebra.is_degree_zero():
        raise ValueError("cohomology requires a degree-0 algebra")
    degrees = sorted(degree_range)
    top = max(degrees)
    if arity_bound is not None and arity_bound < top + 1:
        raise ArityBoundExceeded("arity_bound must be at least max degree + 1")
    mats = {l: _cochain_diff_matrix(algebra, l) for l in range(top + 1)}
    out = GradedDims()
    for n in degrees:
        if n < 0:
            out.dims[n] = 0
            continue
        d_out = mats[n]
        if n == 0:
            d_in = SparseMatrix(len(CochainBasis(algebra, 0)), 0)
        else:
            d_in = mats[n - 1]
        sub = homology_at(d_in, d_out)
        out.dims[n] = sub.dim
        out.spots[n] = sub
        out.basis_keys[n] = CochainBasis(algebra, n).keys
    return out


def cocycle_representatives(algebra, n, arity_bound=None):
    """HH^n classes as Cochain objects (one per homology generator)."""
    hh = hochschild_cohomology(algebra, [n], arity_bound)
    cb = CochainBasis(algebra, n)
    return [cb.cochain_of(rep, arity_bound) for rep in hh.spots[n].homology_reps]
