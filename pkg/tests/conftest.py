from fractions import Fraction

from ncperiod.deform import MCElement
from ncperiod.exactlin import rref
from ncperiod.hochschild import Cochain, CochainBasis, _cochain_diff_matrix


def random_first_order_mc(alg, ring, rng, arity_bound=6):
    """Random arity-2 cocycle with coefficients in the level-1 slice of the
    ring: over a square-zero ring any such element is Maurer-Cartan."""
    dmat = _cochain_diff_matrix(alg, 2)
    _, kernel, _ = rref(dmat)
    cb = CochainBasis(alg, 2)
    eps = ring.gen(1)
    comps = {}
    for z in kernel:
        c = rng.randint(-3, 3)
        if not c:
            continue
        for k, q in z.items():
            w, t = cb.keys[k]
            vec = comps.setdefault(2, {}).setdefault(w, {})
            cur = vec.get(t, ring.zero())
            vec[t] = cur + eps * (q * c)
    value = Cochain(alg, comps, 1, arity_bound)
    return MCElement(ring, value)
