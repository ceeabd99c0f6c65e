"""Exact rational sparse linear algebra: rref, kernels, homology of a spot.

Everything is over Q via fractions.Fraction (plain ints mix freely).
Determinism: pivots are chosen at the first nonzero column, rows in index
order, so every basis produced here is reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


class CompositionNonzero(Exception):
    """d_out . d_in != 0 where a complex was expected."""


DENSE_CUTOFF = 64  # below this, rref densifies rows (cheaper than dict churn)


class SparseMatrix:
    """Sparse rational matrix; entries stored as {(row, col): nonzero value}."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for (i, j), v in items:
                self[i, j] = v

    def __setitem__(self, key, value):
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry {key} out of range for {self.rows}x{self.cols}")
        if value:
            self.entries[i, j] = value
        else:
            self.entries.pop(key, None)

    def __getitem__(self, key):
        return self.entries.get(key, Fraction(0))

    def add_to(self, i, j, value):
        s = self.entries.get((i, j), 0) + value
        if s:
            self.entries[i, j] = s
        else:
            self.entries.pop((i, j), None)

    def columns(self):
        """All columns as {row: value} dicts, dense in the column index."""
        cols = [dict() for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            cols[j][i] = v
        return cols

    def row_lists(self):
        rows = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def transpose(self):
        out = SparseMatrix(self.cols, self.rows)
        for (i, j), v in self.entries.items():
            out.entries[j, i] = v
        return out

    def matvec(self, vec):
        """Apply to a sparse vector {col: value}; returns {row: value}."""
        out = {}
        cols = None
        for j, c in vec.items():
            if not c:
                continue
            if cols is None:
                cols = self.columns()
            for i, v in cols[j].items():
                s = out.get(i, 0) + v * c
                if s:
                    out[i] = s
                else:
                    out.pop(i, None)
        return out

    def compose(self, other):
        """self . other (matrix product), both sparse."""
        if other.rows != self.cols:
            raise ValueError("shape mismatch in compose")
        self_cols = self.columns()
        out = SparseMatrix(self.rows, other.cols)
        by_col = [dict() for _ in range(other.cols)]
        for (i, j), v in other.entries.items():
            by_col[j][i] = v
        for j, col in enumerate(by_col):
            acc = {}
            for k, c in col.items():
                for i, v in self_cols[k].items():
                    s = acc.get(i, 0) + v * c
                    if s:
                        acc[i] = s
                    else:
                        acc.pop(i, None)
            for i, v in acc.items():
                out.entries[i, j] = v
        return out

    def is_zero(self):
        return not self.entries

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def from_columns(rows, columns):
    """Build a SparseMatrix whose j-th column is columns[j] = {row: value}."""
    m = SparseMatrix(rows, len(columns))
    for j, col in enumerate(columns):
        for i, v in col.items():
            if v:
                m.entries[i, j] = v
    return m


class IncrementalSpan:
    """Echelonized span of sparse vectors with incremental insertion.

    Vectors are dicts {index: value}; each stored row is normalized to have
    leading (= smallest-index) coefficient one.  `reduce` returns the residual
    of a vector modulo the span, `add` inserts and reports whether the rank
    grew.  Insertion order determines the echelon, hence determinism.
    """

    def __init__(self):
        self.lead = {}  # leading index -> normalized row (dict)

    def reduce(self, vec):
        v = dict(vec)
        lead = self.lead
        while v:
            j = min(v)
            row = lead.get(j)
            if row is None:
                return v, j
            c = v[j]
            for k, w in row.items():
                s = v.get(k, 0) - c * w
                if s:
                    v[k] = s
                else:
                    v.pop(k, None)
        return v, None

    def add(self, vec):
        v, j = self.reduce(vec)
        if j is None:
            return False
        c = Fraction(1) / Fraction(v[j])
        self.lead[j] = {k: w * c for k, w in v.items()}
        return True

    def contains(self, vec):
        v, _ = self.reduce(vec)
        return not v

    @property
    def dim(self):
        return len(self.lead)


def _rref_rows_dense(rowlist, cols):
    """Dense variant of _rref_rows for small shapes; same pivot rule."""
    rows = [[Fraction(r.get(j, 0)) for j in range(cols)] for r in rowlist]
    pivots = []
    pivot_idx = []
    used = [False] * len(rows)
    for j in range(cols):
        sel = -1
        for i, r in enumerate(rows):
            if not used[i] and r[j]:
                sel = i
                break
        if sel < 0:
            continue
        used[sel] = True
        piv = rows[sel]
        inv = Fraction(1) / piv[j]
        for c in range(cols):
            piv[c] *= inv
        for i, r in enumerate(rows):
            if i != sel and r[j]:
                f = r[j]
                for c in range(cols):
                    r[c] -= f * piv[c]
        pivots.append(j)
        pivot_idx.append(sel)
    pivot_rows = [
        {c: rows[i][c] for c in range(cols) if rows[i][c]} for i in pivot_idx
    ]
    return pivots, pivot_rows


def _rref_rows(rowlist, cols):
    """Row reduce sparse rows ({col: val}); returns (pivot_cols, pivot_rows).

    Columns are scanned left to right; the pivot row for a column is the
    unused row of least index with a nonzero entry there.  Output rows are
    fully reduced (RREF).
    """
    if len(rowlist) <= DENSE_CUTOFF and cols <= DENSE_CUTOFF:
        return _rref_rows_dense(rowlist, cols)
    rows = [dict(r) for r in rowlist]
    pivots = []
    pivot_rows = []
    used = [False] * len(rows)
    for j in range(cols):
        sel = -1
        for i, r in enumerate(rows):
            if not used[i] and r.get(j):
                sel = i
                break
        if sel < 0:
            continue
        used[sel] = True
        piv = rows[sel]
        inv = Fraction(1) / Fraction(piv[j])
        for c in list(piv):
            piv[c] *= inv
        for i, r in enumerate(rows):
            if i != sel and r.get(j):
                f = r[j]
                for c, v in piv.items():
                    s = r.get(c, 0) - f * v
                    if s:
                        r[c] = s
                    else:
                        r.pop(c, None)
        pivots.append(j)
        pivot_rows.append(piv)
    return pivots, pivot_rows


def rref(m: SparseMatrix):
    """Reduced row echelon data: (rank, kernel_basis, pivot_columns).

    kernel_basis is a list of sparse vectors {col: Fraction} spanning
    {v : m v = 0}; rank + len(kernel_basis) == m.cols.  Kernel vectors are
    produced per free column in increasing column order.
    """
    pivots, pivot_rows = _rref_rows(m.row_lists(), m.cols)
    pivset = set(pivots)
    kernel = []
    for f in range(m.cols):
        if f in pivset:
            continue
        vec = {f: Fraction(1)}
        for pj, prow in zip(pivots, pivot_rows):
            c = prow.get(f)
            if c:
                vec[pj] = -Fraction(c)
        kernel.append(vec)
    return len(pivots), kernel, pivots


def rank(m: SparseMatrix):
    span = IncrementalSpan()
    for col in m.columns():
        if col:
            span.add(col)
    return span.dim


def solve(m: SparseMatrix, rhs):
    """One solution x (sparse dict) of m x = rhs, or None if inconsistent."""
    rowlist = m.row_lists()
    aug = m.cols  # rhs goes in an extra column
    items = rhs.items() if isinstance(rhs, dict) else enumerate(rhs)
    for i, v in items:
        if v:
            rowlist[i][aug] = v
    pivots, pivot_rows = _rref_rows(rowlist, m.cols + 1)
    x = {}
    for pj, prow in zip(pivots, pivot_rows):
        if pj == aug:
            return None
        c = prow.get(aug)
        if c:
            x[pj] = Fraction(c)
    return x


def member(span_vectors, vec):
    """Is vec (sparse dict) in the span of span_vectors (sparse dicts)?"""
    span = IncrementalSpan()
    for v in span_vectors:
        span.add(v)
    return span.contains(vec)


@dataclass
class SubquotientBasis:
    """Cycles, boundaries and chosen homology representatives at one spot."""

    ambient_dim: int
    cycle_basis: list = field(default_factory=list)
    boundary_basis: list = field(default_factory=list)
    homology_reps: list = field(default_factory=list)

    @property
    def dim(self):
        return len(self.homology_reps)


def homology_at(d_in: SparseMatrix, d_out: SparseMatrix) -> SubquotientBasis:
    """Homology at the middle of  X --d_in--> Y --d_out--> Z.

    Checks d_out . d_in = 0 exactly.  Boundary basis: image columns of d_in
    filtered greedily in column order; homology representatives: kernel
    vectors of d_out extending that basis, again greedily (deterministic).
    """
    if d_in.rows != d_out.cols:
        raise ValueError("homology_at: d_in.rows must equal d_out.cols")
    if not d_out.compose(d_in).is_zero():
        raise CompositionNonzero("d_out . d_in != 0")
    _, cycles, _ = rref(d_out)
    boundaries = []
    span = IncrementalSpan()
    for col in d_in.columns():
        if col and span.add(col):
            boundaries.append(col)
    reps = []
    for z in cycles:
        if span.add(z):
            reps.append(z)
    return SubquotientBasis(
        ambient_dim=d_out.cols,
        cycle_basis=cycles,
        boundary_basis=boundaries,
        homology_reps=reps,
    )


@dataclass
class SpotSDR:
    """Strong-deformation-retract data at one homological spot n.

    reps: columns of iota_n (H_n -> C_n); proj_rows: rows of p_n (C_n -> H_n);
    hmty_cols: columns of h_n (C_n -> C_{n+1}).  Satisfies d h + h d = 1 -
    iota p together with the side conditions p iota = 1, h h = 0, p h = 0,
    h iota = 0.
    """

    dim: int
    reps: list
    proj_rows: list
    hmty_cols: list


def complex_sdr(dims, diffs):
    """SDR of a nonnegatively graded complex onto its homology, per spot.

    dims: list of chain-space dimensions, spots 0..W (len W+1).
    diffs: diffs[n] is the matrix C_n -> C_{n-1} for n = 1..W+1 (index 0
    unused / None); diffs[W+1] supplies the boundaries of the top spot.

    Returns a list of SpotSDR for spots 0..W.  Decomposition per spot:
    C_n = B_n + H_n + N_n with B_n spanned by the greedily selected image
    columns of d_{n+1}, N_n by the unit vectors of the selected columns
    (so d: N_n ~ B_{n-1} bijectively), and H_n by homology representatives.
    h is (d|_N)^{-1} on B and zero on H + N.
    """
    W = len(dims) - 1
    if len(diffs) < W + 2:
        raise ValueError("need differentials up to spot W+1")
    sel = [[] for _ in range(W + 2)]   # selected column indices of d_n
    bnd = [[] for _ in range(W + 1)]   # boundary basis of C_{n}: from d_{n+1}
    for n in range(1, W + 2):
        d = diffs[n]
        if d is None:
            continue
        span = IncrementalSpan()
        cols = d.columns()
        for j, col in enumerate(cols):
            if col and span.add(col):
                sel[n].append(j)
                if n - 1 <= W:
                    bnd[n - 1].append(col)
    out = []
    for n in range(W + 1):
        if n == 0:
            cycles = [{j: Fraction(1)} for j in range(dims[0])]
        else:
            _, cycles, _ = rref(diffs[n])
        span = IncrementalSpan()
        for b in bnd[n]:
            span.add(b)
        reps = [z for z in cycles if span.add(z)]
        # Full basis [B | H | N] of C_n; one inversion gives p rows and the
        # B-coordinates that define h.  N_n is spanned by the unit vectors of
        # the columns of d_n selected while building bnd[n-1].
        nb, nh = len(bnd[n]), len(reps)
        nsel = [{j: Fraction(1)} for j in sel[n]]
        if nb + nh + len(nsel) != dims[n]:
            raise RuntimeError(f"spot {n}: B+H+N does not span (bug)")
        rowlist = [dict() for _ in range(dims[n])]
        for j, col in enumerate(bnd[n] + reps + nsel):
            for i, v in col.items():
                rowlist[i][j] = v
        for i in range(dims[n]):
            rowlist[i][dims[n] + i] = Fraction(1)
        pivots, pivot_rows = _rref_rows(rowlist, 2 * dims[n])
        inv_rows = [None] * dims[n]
        for pj, prow in zip(pivots, pivot_rows):
            if pj >= dims[n]:
                raise RuntimeError(f"spot {n}: basis inversion failed (bug)")
            inv_rows[pj] = {c - dims[n]: v for c, v in prow.items() if c >= dims[n]}
        proj_rows = [inv_rows[nb + k] for k in range(nh)]
        hcols = [dict() for _ in range(dims[n])]
        for k in range(nb):
            jup = sel[n + 1][k]
            for i, v in inv_rows[k].items():
                s = hcols[i].get(jup, 0) + v
                if s:
                    hcols[i][jup] = s
                else:
                    hcols[i].pop(jup, None)
        out.append(SpotSDR(dim=dims[n], reps=reps, proj_rows=proj_rows, hmty_cols=hcols))
    return out


def express_in_homology(sub: SubquotientBasis, vec):
    """Coordinates of a cycle's class in sub.homology_reps, or None.

    None means vec is not in the span of boundaries + representatives
    (i.e. not a cycle of this spot).
    """
    cols = list(sub.boundary_basis) + list(sub.homology_reps)
    y = solve(from_columns(sub.ambient_dim, cols), vec)
    if y is None:
        return None
    nb = len(sub.boundary_basis)
    return {k - nb: v for k, v in y.items() if k >= nb}
