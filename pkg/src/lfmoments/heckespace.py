"""Weight-2 modular symbols for Gamma_0(q), q prime, and Hecke eigendata.

The construction is the classical one.  Manin symbols are indexed by
P^1(Z/q) (q+1 points for prime q).  The plus-quotient is cut out by the
exact relations

    x + xS = 0,    x + xT + xT^2 = 0,    x - x eta = 0,

with S = [[0,-1],[1,0]], T = [[0,-1],[1,-1]], eta = [[-1,0],[0,1]] acting
on the right on row vectors (c,d).  The S/eta relations are collapsed by a
sign-tracking union-find; the 3-term relations are then reduced by sparse
fraction-exact Gaussian elimination.  At prime level the boundary map to
the cusps {0, infinity} is a single rational functional, whose kernel is
the cuspidal plus-quotient; its dimension equals the genus of X_0(q).

Hecke operators act two ways, and the routes cross-check each other:

  * exact dim x dim rational matrices from the Merel determinant-n set
    (hecke_matrix), used for small primes, the eigen-split combination,
    and every exact-arithmetic invariant (commutativity, star = +1);
  * a linear-time path route for eigenvalues at large primes: a dual
    eigenvector is evaluated on T_l applied to a fixed base path, with the
    image paths expanded into Manin symbols by continued fractions
    (Manin's trick).  This is the same Heilbronn-matrix action, unrolled.

Eigenvalues are stored in the normalization lambda_f(n) = a_n / sqrt(n),
so lambda_f(1) = 1 and the multiplicative relation of the Fourier
coefficients holds verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import exp1, gammaincc

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is an optional accelerator
    _njit = None

from .special import is_prime, primes_up_to

__all__ = [
    "HeckeError",
    "UnsupportedLevelError",
    "SplitFailureError",
    "MissingEigenvalueError",
    "IndeterminateSignError",
    "HeckeSpace",
    "EigenformTable",
    "genus_oracle",
    "build_space",
    "merel_matrices",
    "hecke_matrix",
    "eigen_split",
    "extend_prime_eigenvalues",
    "lambda_extend",
    "trace",
    "sign_of_functional_equation",
    "fe_sign_with_fallback",
    "eigendata",
]

_F0 = Fraction(0)
_F1 = Fraction(1)


class HeckeError(RuntimeError):
    pass


class UnsupportedLevelError(HeckeError):
    pass


class SplitFailureError(HeckeError):
    pass


class MissingEigenvalueError(HeckeError):
    pass


class IndeterminateSignError(HeckeError):
    pass


def genus_oracle(q: int) -> int:
    """Genus of X_0(q) for prime q >= 5, by the closed formula."""
    if not is_prime(q) or q < 5:
        raise UnsupportedLevelError(f"genus_oracle needs a prime q >= 5, got {q}")
    nu2 = 2 if q % 4 == 1 else 0
    nu3 = 2 if q % 3 == 1 else 0
    num = (q + 1) - 3 * nu2 - 4 * nu3
    if num % 12 != 0:
        raise HeckeError(f"genus formula not integral at q={q}")
    return num // 12


# ---------------------------------------------------------------------------
# P^1(Z/q) and the relation quotient


class _SignedUnionFind:
    """Union-find over symbol indices with a sign on each edge.

    class(i) = sign(i) * class(root(i)); a root may be marked dead, which
    means its whole class is 0 in the quotient.
    """

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.sign = [1] * n
        self.dead = [False] * n

    def resolve(self, i: int) -> tuple[int, int]:
        """Return (root, sign) with class(i) = sign*class(root)."""
        s = 1
        while self.parent[i] != i:
            s *= self.sign[i]
            i = self.parent[i]
        return i, s

    def union(self, i: int, j: int, rel_sign: int) -> None:
        """Impose class(i) = rel_sign * class(j)."""
        ri, si = self.resolve(i)
        rj, sj = self.resolve(j)
        if ri == rj:
            if si != rel_sign * sj:
                self.dead[ri] = True
            return
        # class(ri) = si^{-1} rel_sign sj class(rj); signs are +-1
        self.parent[ri] = rj
        self.sign[ri] = si * rel_sign * sj
        if self.dead[ri]:
            self.dead[rj] = True

    def is_dead(self, i: int) -> bool:
        r, _ = self.resolve(i)
        return self.dead[r]


def _rref(rows: list[dict[int, Fraction]]) -> dict[int, dict[int, Fraction]]:
    """Sparse RREF; returns pivot column -> normalized row (pivot coeff 1)."""
    pivots: dict[int, dict[int, Fraction]] = {}
    for row in rows:
        r = {c: v for c, v in row.items() if v != 0}
        while r:
            c = min(r)
            if c not in pivots:
                break
            f = r.pop(c)
            for cc, vv in pivots[c].items():
                if cc == c:
                    continue
                nv = r.get(cc, _F0) - f * vv
                if nv:
                    r[cc] = nv
                else:
                    r.pop(cc, None)
        if r:
            c = min(r)
            f = r.pop(c)
            newrow = {c: _F1}
            for cc, vv in r.items():
                newrow[cc] = vv / f
            pivots[c] = newrow
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        for c2 in [cc for cc in row if cc != c and cc in pivots]:
            f = row.pop(c2)
            for cc, vv in pivots[c2].items():
                if cc == c2:
                    continue
                nv = row.get(cc, _F0) - f * vv
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
    return pivots


@dataclass
class HeckeSpace:
    """The cuspidal plus-quotient of weight-2 Manin symbols for Gamma_0(q).

    dim equals the genus of X_0(q).  hecke_cache maps prime n to the exact
    rational matrix of the classical T_n on the cuspidal basis (eigenvalues
    are the integral a_n; the paper normalization a_n/sqrt(n) is applied at
    eigenvalue extraction).
    """

    q: int
    dim: int
    # internal quotient data
    n_free: int                               # dim of the full plus-quotient (genus+1)
    sym_vec: list[list[tuple[int, Fraction]]]  # symbol -> exact coords on free gens
    free_symbols: list[int]                   # free generator -> symbol index
    boundary: list[Fraction]                  # boundary functional on free gens
    boundary_pivot: int                       # index j* used to cut the cuspidal kernel
    cusp_cols: list[int]                      # free-gen index of each cuspidal basis vector
    R: np.ndarray                             # float (n_free, q+1) symbol coordinate matrix
    inv_table: np.ndarray                     # modular inverses, inv_table[a] = a^{-1} mod q
    hecke_cache: dict[int, list[list[Fraction]]] = field(default_factory=dict)
    _quot_float_cache: dict[int, np.ndarray] = field(default_factory=dict)

    def p1_index(self, c: int, d: int) -> int:
        """Index of (c:d) in P^1(Z/q): (1:v) -> v, (0:1) -> q."""
        q = self.q
        c %= q
        d %= q
        if c:
            return (int(self.inv_table[c]) * d) % q
        if d % q == 0:
            raise HeckeError("(0,0) is not a point of P^1")
        return q

    def symbol_of_index(self, i: int) -> tuple[int, int]:
        return (1, i) if i < self.q else (0, 1)


def build_space(q: int) -> HeckeSpace:
    """Construct the cuspidal plus-quotient for prime q, 11 <= q <= 5000.

    Genus-zero primes (q in {2,3,5,7,13}) are rejected by the lower bound
    except q=13, which builds an empty space (dim 0).
    """
    if not is_prime(q) or q < 11 or q > 5000:
        raise UnsupportedLevelError(f"level must be a prime in [11, 5000], got {q}")
    n_sym = q + 1
    inv_table = np.zeros(q, dtype=np.int64)
    inv_table[1:] = np.array([pow(a, q - 2, q) for a in range(1, q)], dtype=np.int64)

    def idx(c: int, d: int) -> int:
        c %= q
        d %= q
        if c:
            return (int(inv_table[c]) * d) % q
        return q

    def sym(i: int) -> tuple[int, int]:
        return (1, i) if i < q else (0, 1)

    uf = _SignedUnionFind(n_sym)
    for i in range(n_sym):
        c, d = sym(i)
        uf.union(i, idx(d, -c), -1)       # x = -xS
        uf.union(i, idx(-c, d), 1)        # x = x eta  (plus-quotient)

    # 3-term relations on union-find classes
    rows: list[dict[int, Fraction]] = []
    seen = [False] * n_sym
    for i in range(n_sym):
        if seen[i]:
            continue
        c, d = sym(i)
        j = idx(d, -c - d)                # xT
        k = idx(-c - d, c)                # xT^2
        seen[i] = seen[j] = seen[k] = True
        row: dict[int, Fraction] = {}
        for s_idx in (i, j, k):
            root, sgn = uf.resolve(s_idx)
            if uf.dead[root]:
                continue
            row[root] = row.get(root, _F0) + sgn
        row = {cc: vv for cc, vv in row.items() if vv != 0}
        if row:
            rows.append(row)

    pivots = _rref(rows)
    roots = sorted({uf.resolve(i)[0] for i in range(n_sym) if not uf.is_dead(i)})
    free_symbols = [r for r in roots if r not in pivots]
    free_pos = {r: p for p, r in enumerate(free_symbols)}
    n_free = len(free_symbols)

    # exact symbol -> quotient coordinates
    sym_vec: list[list[tuple[int, Fraction]]] = []
    for i in range(n_sym):
        root, sgn = uf.resolve(i)
        if uf.dead[root]:
            sym_vec.append([])
        elif root in free_pos:
            sym_vec.append([(free_pos[root], Fraction(sgn))])
        else:
            expr = pivots[root]
            sym_vec.append(
                [(free_pos[c2], -sgn * v) for c2, v in expr.items() if c2 != root]
            )

    R = np.zeros((n_free, n_sym), dtype=np.float64)
    for i, vec in enumerate(sym_vec):
        for pos, val in vec:
            R[pos, i] = float(val)

    # boundary functional: +1 on (0:1) [index q], -1 on (1:0) [index 0]
    def beta(i: int) -> Fraction:
        if i == q:
            return _F1
        if i == 0:
            return -_F1
        return _F0

    boundary = [beta(r) for r in free_symbols]
    if all(v == 0 for v in boundary):
        raise HeckeError(f"boundary functional vanished at q={q}")
    # exact consistency of the descended functional on every symbol
    for i in range(n_sym):
        val = sum(boundary[pos] * v for pos, v in sym_vec[i])
        if val != beta(i):
            raise HeckeError(f"boundary map is not well-defined at symbol {i} (q={q})")

    jstar = next(p for p, v in enumerate(boundary) if v != 0)
    cusp_cols = [p for p in range(n_free) if p != jstar]
    dim = len(cusp_cols)
    g = genus_oracle(q)
    if dim != g:
        raise HeckeError(f"cuspidal dimension {dim} != genus {g} at q={q}")

    return HeckeSpace(
        q=q,
        dim=dim,
        n_free=n_free,
        sym_vec=sym_vec,
        free_symbols=free_symbols,
        boundary=boundary,
        boundary_pivot=jstar,
        cusp_cols=cusp_cols,
        R=R,
        inv_table=inv_table,
    )


# ---------------------------------------------------------------------------
# Exact Hecke matrices (Merel's determinant-n set)


def merel_matrices(n: int) -> list[tuple[int, int, int, int]]:
    """Merel's set X_n: integer (a,b;c,d), ad-bc=n, a>b>=0, d>c>=0."""
    mats = []
    for a in range(1, n + 1):
        for d in range((n + a - 1) // a, n + 2 - a):
            bc = a * d - n
            if bc == 0:
                for b in range(a):
                    mats.append((a, b, 0, d))
                for c in range(1, d):
                    mats.append((a, 0, c, d))
            else:
                for b in range((bc - 1) // (d - 1) + 1, a):
                    if bc % b == 0:
                        mats.append((a, b, bc // b, d))
    return mats


def _hecke_on_quotient(space: HeckeSpace, n: int) -> list[dict[int, Fraction]]:
    """Exact columns of classical T_n on the full plus-quotient (n_free gens)."""
    q = space.q
    cols = []
    mats = merel_matrices(n)
    for j, root in enumerate(space.free_symbols):
        c0, d0 = space.symbol_of_index(root)
        acc: dict[int, Fraction] = {}
        for (a, b, c1, d1) in mats:
            u = (c0 * a + d0 * c1) % q
            v = (c0 * b + d0 * d1) % q
            if u == 0 and v == 0:
                continue  # only possible when q | n
            for pos, val in space.sym_vec[space.p1_index(u, v)]:
                nv = acc.get(pos, _F0) + val
                if nv:
                    acc[pos] = nv
                else:
                    acc.pop(pos, None)
        cols.append(acc)
    return cols


def _quotient_matrix_float(space: HeckeSpace, n: int) -> np.ndarray:
    if n in space._quot_float_cache:
        return space._quot_float_cache[n]
    cols = _hecke_on_quotient(space, n)
    m = space.n_free
    mat = np.zeros((m, m), dtype=np.float64)
    for j, col in enumerate(cols):
        for pos, val in col.items():
            mat[pos, j] = float(val)
    space._quot_float_cache[n] = mat
    return mat


def hecke_matrix(space: HeckeSpace, n: int) -> list[list[Fraction]]:
    """Exact rational matrix of classical T_n on the cuspidal basis.

    n must be prime (composite eigenvalues come from lambda_extend, not from
    matrices).  Cached on the space.
    """
    if not is_prime(n):
        raise HeckeError(f"hecke_matrix expects prime n, got {n}")
    if n in space.hecke_cache:
        return space.hecke_cache[n]
    if space.dim == 0:
        space.hecke_cache[n] = []
        return []
    cols = _hecke_on_quotient(space, n)
    jstar = space.boundary_pivot
    b = space.boundary
    g = space.dim
    # cuspidal basis vectors: K_col = e_j - (b_j/b_j*) e_j*  for j != j*
    mat: list[list[Fraction]] = [[_F0] * g for _ in range(g)]
    for col_i, j in enumerate(space.cusp_cols):
        # image of K_col on free gens
        img: dict[int, Fraction] = dict(cols[j])
        f = b[j] / b[jstar]
        if f:
            for pos, val in cols[jstar].items():
                nv = img.get(pos, _F0) - f * val
                if nv:
                    img[pos] = nv
                else:
                    img.pop(pos, None)
        # solve K x = img: rows j != j* give x directly; row j* must be consistent
        x = {pos: val for pos, val in img.items() if pos != jstar}
        resid = img.get(jstar, _F0)
        for pos, val in x.items():
            resid += val * b[pos] / b[jstar]
        if resid != 0:
            raise HeckeError(f"T_{n} does not preserve the cuspidal subspace at q={space.q}")
        for row_i, jrow in enumerate(space.cusp_cols):
            mat[row_i][col_i] = x.get(jrow, _F0)
    space.hecke_cache[n] = mat
    return mat


def star_is_identity(space: HeckeSpace) -> bool:
    """Exact check that the star involution acts as +1 on the quotient basis."""
    q = space.q
    for j, root in enumerate(space.free_symbols):
        c0, d0 = space.symbol_of_index(root)
        vec = space.sym_vec[space.p1_index(-c0, d0)]
        expect = [(j, _F1)]
        if sorted(vec) != expect:
            return False
    return True


# ---------------------------------------------------------------------------
# Eigenform tables


@dataclass
class EigenformTable:
    """One primitive eigenform: normalized eigenvalues and FE sign.

    prime_lambda[i] = lambda_f(primes[i]) = a_{primes[i]} / sqrt(primes[i]).
    full() extends to all n <= n_max through the Hecke recursions.
    """

    q: int
    index: int
    n_max: int
    primes: np.ndarray
    prime_lambda: np.ndarray
    sign: int
    residual: float
    dual_vector: np.ndarray | None = None   # normalized functional on P^1 symbols
    base_symbol: int = -1
    _full: np.ndarray | None = None

    def lam(self, n: int) -> float:
        if n < 1 or n > self.n_max:
            raise MissingEigenvalueError(f"lambda_f({n}) outside table range (n_max={self.n_max})")
        return float(self.full()[n])

    def full(self, n: int | None = None) -> np.ndarray:
        if n is None:
            n = self.n_max
        if n > self.n_max:
            raise MissingEigenvalueError(
                f"table only extends to n_max={self.n_max}, requested {n}"
            )
        if self._full is None or len(self._full) <= n:
            self._full = _extend_multiplicative(
                self.q, self.primes, self.prime_lambda, self.n_max
            )
        return self._full

    def with_sign(self, sign: int) -> "EigenformTable":
        return EigenformTable(
            q=self.q, index=self.index, n_max=self.n_max, primes=self.primes,
            prime_lambda=self.prime_lambda, sign=sign, residual=self.residual,
            dual_vector=self.dual_vector, base_symbol=self.base_symbol,
            _full=self._full,
        )


def _extend_multiplicative(q: int, primes: np.ndarray, plam: np.ndarray, n_max: int) -> np.ndarray:
    """lambda_f(n) for all n <= n_max from prime values, via Eq.-(2.1) recursions."""
    lam = np.zeros(n_max + 1, dtype=np.float64)
    lam[1] = 1.0
    pl = {int(p): float(v) for p, v in zip(primes, plam)}
    missing = [p for p in primes_up_to(n_max) if int(p) not in pl]
    if missing:
        raise MissingEigenvalueError(f"missing prime eigenvalues below {n_max}: {missing[:5]}...")
    for p, v in pl.items():
        if p <= n_max:
            lam[p] = v
    # prime powers: lambda(p^{e}) = lambda(p)lambda(p^{e-1}) - lambda(p^{e-2}), p != q;
    # lambda(q^e) = lambda(q)^e  (the (d,q)=1 condition removes the second term)
    for p in pl:
        if p * p > n_max:
            continue
        pe_prev2, pe_prev = 1, p
        pe = p * p
        while pe <= n_max:
            if p == q:
                lam[pe] = lam[pe_prev] * lam[p]
            else:
                lam[pe] = lam[p] * lam[pe_prev] - lam[pe_prev2]
            pe_prev2, pe_prev = pe_prev, pe
            pe *= p
    # composites with >= 2 distinct primes: lambda(p^e m) = lambda(p^e) lambda(m)
    spf = np.zeros(n_max + 1, dtype=np.int64)
    spf[1] = 1
    for p in range(2, n_max + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    ns = np.arange(n_max + 1)
    ppart = np.ones(n_max + 1, dtype=np.int64)
    rest = ns.copy()
    # peel the smallest-prime power off each n (vectorized fixed-point)
    active = ns >= 2
    base = np.where(active, spf, 1)
    while True:
        divisible = active & (rest % np.maximum(base, 1) == 0) & (base > 1)
        if not divisible.any():
            break
        ppart[divisible] *= base[divisible]
        rest[divisible] //= base[divisible]
    comp = (ns >= 2) & (rest > 1)
    order = np.argsort(ns[comp])
    idx = ns[comp][order]
    lam_idx_p = ppart[comp][order]
    lam_idx_r = rest[comp][order]
    # dependencies are strictly smaller; process in dyadic blocks
    lo = 2
    while lo <= n_max:
        hi = min(n_max, 2 * lo - 1)
        mask = (idx >= lo) & (idx <= hi)
        if mask.any():
            lam[idx[mask]] = lam[lam_idx_p[mask]] * lam[lam_idx_r[mask]]
        lo = hi + 1
    return lam


def lambda_extend(table: EigenformTable, n: int) -> EigenformTable:
    """Materialize lambda_f on all n <= N via multiplicativity (spec op)."""
    table.full(n)
    return table


def trace(space: HeckeSpace, tables: list[EigenformTable], n: int) -> float:
    """Tr(T_n) = sum_f lambda_f(n), paper-normalized."""
    return float(sum(t.lam(n) for t in tables))


# ---------------------------------------------------------------------------
# Eigen split and the continued-fraction path engine


def _cf_accumulate_py(num, den, wt, q, inv, acc):
    """Pure-numpy continued-fraction expansion of the paths {oo, num/den}."""
    acc[0] += wt.sum()
    qprev = np.zeros(num.shape, dtype=np.int64)
    qcur = np.ones(num.shape, dtype=np.int64)
    a = num // den
    num, den = den, num - a * den
    sgn = 1
    while den.size:
        keep = den != 0
        if not keep.all():
            num, den, qprev, qcur, wt = (arr[keep] for arr in (num, den, qprev, qcur, wt))
            if not den.size:
                break
        a = num // den
        num, den = den, num - a * den
        qnew = a * qcur + qprev
        u = qnew % q
        v = (sgn * qcur) % q
        idx = np.where(u == 0, q, (inv[u] * v) % q)
        acc += np.bincount(idx, weights=wt, minlength=q + 1)
        qprev, qcur = qcur, qnew
        sgn = -sgn


def _cf_accumulate_scalar(num, den, wt, q, inv, acc):  # compiled by numba when present
    for i in range(num.shape[0]):
        n = num[i]
        d = den[i]
        w = wt[i]
        acc[0] += w
        qprev = 0
        qcur = 1
        a = n // d
        n, d = d, n - a * d
        sgn = 1
        while d != 0:
            a = n // d
            n, d = d, n - a * d
            qnew = a * qcur + qprev
            u = qnew % q
            v = (sgn * qcur) % q
            if v < 0:
                v += q
            if u == 0:
                acc[q] += w
            else:
                acc[(inv[u] * v) % q] += w
            qprev = qcur
            qcur = qnew
            sgn = -sgn


if _njit is not None:
    _cf_accumulate_fast = _njit(cache=True, nogil=True)(_cf_accumulate_scalar)
else:  # pragma: no cover
    _cf_accumulate_fast = None


def _path_hecke_accumulator(space: HeckeSpace, base_index: int, ell: int, use_fast: bool = True) -> np.ndarray:
    """Weights w on P^1 symbols with  a_ell * v[base] = sum_i w_i v[i]
    for every cuspidal dual eigenvector v.

    Expands T_ell applied to the base symbol's path into Manin symbols via
    continued fractions (Manin's trick), over the 2*ell (+2) image paths.
    """
    q = space.q
    # base path {alpha, beta} for the symbol's standard lift
    if base_index == q:        # (0:1), path {0, oo}
        alpha, beta = (0, 1), None
    elif base_index == 0:      # (1:0), path {oo, 0}
        alpha, beta = None, (0, 1)
    else:                      # (1:v), lift [[0,-1],[1,v]], path {-1/v, 0}
        alpha, beta = (-1, base_index), (0, 1)

    nums, dens, wts = [], [], []

    def add_endpoint(pt, w):
        if pt is None:
            return
        an, ad = pt
        ks = np.arange(ell, dtype=np.int64)
        nums.append(an + ks * ad)
        dens.append(np.full(ell, ad * ell, dtype=np.int64))
        wts.append(np.full(ell, w, dtype=np.float64))
        if ell != q:  # the [[l,0],[0,1]] coset is absent for U_q
            nums.append(np.array([ell * an], dtype=np.int64))
            dens.append(np.array([ad], dtype=np.int64))
            wts.append(np.array([float(w)], dtype=np.float64))

    add_endpoint(beta, +1.0)
    add_endpoint(alpha, -1.0)
    num = np.concatenate(nums)
    den = np.concatenate(dens)
    wt = np.concatenate(wts)

    acc = np.zeros(q + 1, dtype=np.float64)
    if use_fast and _cf_accumulate_fast is not None:
        _cf_accumulate_fast(num, den, wt, q, space.inv_table, acc)
    else:
        _cf_accumulate_py(num, den, wt, q, space.inv_table, acc)
    return acc


def _choose_base_symbols(space: HeckeSpace, duals: np.ndarray, threshold: float = 0.1) -> tuple[list[int], np.ndarray]:
    """Small set of base symbols covering every form's dual vector.

    duals is (n_forms, q+1), each row sup-normalized.  Returns the chosen
    symbol indices and, per form, the position of its assigned base.
    """
    q = space.q
    candidates = [q, 1]  # (0:1) then (1:1); short continued fractions
    chosen: list[int] = []
    assign = np.full(duals.shape[0], -1, dtype=np.int64)
    for cand in candidates:
        need = assign < 0
        if not need.any():
            break
        good = need & (np.abs(duals[:, cand]) >= threshold)
        if good.any():
            if cand not in chosen:
                chosen.append(cand)
            assign[good] = chosen.index(cand)
    while (assign < 0).any():
        f = int(np.nonzero(assign < 0)[0][0])
        cand = int(np.argmax(np.abs(duals[f])))
        if cand not in chosen:
            chosen.append(cand)
        pos = chosen.index(cand)
        covered = (assign < 0) & (np.abs(duals[:, cand]) >= threshold)
        assign[covered] = pos
        if assign[f] < 0:
            assign[f] = pos  # argmax row: |dual| = 1 there by normalization
    return chosen, assign


def eigen_split(space: HeckeSpace, seed: int = 0) -> list[EigenformTable]:
    """Split the cuspidal plus-quotient into eigenforms.

    Diagonalizes a seeded random positive combination c2 T2 + c3 T3 + c5 T5
    numerically; the Eisenstein line (strictly largest eigenvalue, Deligne)
    is dropped.  Eigenvalue collisions below 1e-6 trigger a redraw, up to
    ten times.  Tables carry lambda at p in {2,3,5} only; use
    extend_prime_eigenvalues for the rest.
    """
    if space.dim == 0:
        return []
    t_float = {n: _quotient_matrix_float(space, n) for n in (2, 3, 5)}
    rng = np.random.default_rng(seed)
    last_err = ""
    for _ in range(10):
        c = rng.integers(1, 101, size=3)
        amat = c[0] * t_float[2] + c[1] * t_float[3] + c[2] * t_float[5]
        evals, wvecs = np.linalg.eig(amat)
        evalsl, uvecs = np.linalg.eig(amat.T)
        scale = float(np.max(np.abs(evals)))
        if float(np.max(np.abs(evals.imag))) > 1e-8 * scale:
            last_err = "complex eigenvalues"
            continue
        ev = evals.real
        evl = evalsl.real
        eis = int(np.argmax(ev))
        cusp_idx = [i for i in range(len(ev)) if i != eis]
        gaps = np.diff(np.sort(np.concatenate([ev[cusp_idx], [ev[eis]]])))
        if len(gaps) and float(np.min(gaps)) < 1e-6:
            last_err = f"eigenvalue gap {float(np.min(gaps)):.2e}"
            continue
        order_l = np.argsort(evl)
        order_r = np.argsort(ev)
        if float(np.max(np.abs(np.sort(ev) - np.sort(evl)))) > 1e-6 * max(scale, 1.0):
            last_err = "left/right eigenvalue mismatch"
            continue
        pair_of = dict(zip(order_r, order_l))
        forms = []
        for i in cusp_idx:
            w = wvecs[:, i].real
            u = uvecs[:, pair_of[i]].real
            dual = u @ space.R
            jmax = int(np.argmax(np.abs(dual)))
            dual = dual / dual[jmax]
            # classical a_n by two-sided Rayleigh quotient against exact T_n
            denom = float(u @ w)
            if abs(denom) < 1e-10 * float(np.linalg.norm(u) * np.linalg.norm(w)):
                last_err = "degenerate left/right pairing"
                forms = None
                break
            lam = {}
            residual = 0.0
            for n in (2, 3, 5):
                a_n = float(u @ t_float[n] @ w) / denom
                lam[n] = a_n / math.sqrt(n)
                residual = max(
                    residual,
                    float(np.max(np.abs(t_float[n] @ w - a_n * w)) / np.max(np.abs(w))),
                )
            forms.append((lam, residual, dual, jmax))
        if forms is None:
            continue
        # deterministic order: by normalized eigenvalues at 2, 3, 5
        forms.sort(key=lambda t: (round(t[0][2], 9), round(t[0][3], 9), round(t[0][5], 9)))
        primes_seed = np.array([2, 3, 5], dtype=np.int64)
        tables = []
        for pos, (lam, residual, dual, jmax) in enumerate(forms):
            tables.append(
                EigenformTable(
                    q=space.q,
                    index=pos,
                    n_max=5,
                    primes=primes_seed,
                    prime_lambda=np.array([lam[2], lam[3], lam[5]]),
                    sign=0,
                    residual=residual,
                    dual_vector=dual,
                    base_symbol=jmax,
                )
            )
        return tables
    raise SplitFailureError(f"eigen split failed after 10 draws at q={space.q}: {last_err}")


def extend_prime_eigenvalues(
    space: HeckeSpace, tables: list[EigenformTable], n_max: int
) -> list[EigenformTable]:
    """Fill lambda_f at every prime <= n_max through the path engine.

    The continued-fraction accumulators are shared across forms assigned to
    the same base symbol, so the cost is ~ sum of ell log(ell) over primes,
    independent of the number of forms.
    """
    if not tables:
        return []
    primes = primes_up_to(n_max)
    duals = np.vstack([t.dual_vector for t in tables])
    bases, assign = _choose_base_symbols(space, duals)
    denom = np.array([duals[f, bases[assign[f]]] for f in range(len(tables))])
    lam_out = np.zeros((len(tables), len(primes)), dtype=np.float64)
    ell_checks = {2: 0, 3: 1, 5: 2}
    for i, ell in enumerate(primes.tolist()):
        sq = math.sqrt(ell)
        for bpos, bsym in enumerate(bases):
            rows = np.nonzero(assign == bpos)[0]
            if rows.size == 0:
                continue
            acc = _path_hecke_accumulator(space, bsym, ell)
            lam_out[rows, i] = (duals[rows] @ acc) / denom[rows] / sq
    # cross-check the engine against the exact-matrix Rayleigh values
    for f, t in enumerate(tables):
        for ell, ip in ell_checks.items():
            if abs(lam_out[f, ip] - t.prime_lambda[ell_checks[ell]]) > 1e-7:
                raise HeckeError(
                    f"path engine disagrees with exact T_{ell} at q={space.q}: "
                    f"{lam_out[f, ip]} vs {t.prime_lambda[ell_checks[ell]]}"
                )
    out = []
    for f, t in enumerate(tables):
        out.append(
            EigenformTable(
                q=t.q, index=t.index, n_max=int(n_max), primes=primes,
                prime_lambda=lam_out[f], sign=t.sign, residual=t.residual,
                dual_vector=t.dual_vector, base_symbol=t.base_symbol,
            )
        )
    return out


# ---------------------------------------------------------------------------
# Functional-equation sign


def _upper_gamma(a: float, x: np.ndarray) -> np.ndarray:
    """Upper incomplete Gamma(a, x) for real a (a > 0 direct, else recurrence)."""
    x = np.asarray(x, dtype=np.float64)
    if a > 0:
        return gammaincc(a, x) * math.gamma(a)
    if a == 0.0:
        return exp1(x)
    # Gamma(a,x) = (Gamma(a+1,x) - x^a e^{-x}) / a
    return (_upper_gamma(a + 1.0, x) - x ** a * np.exp(-x)) / a


def _lambda_completed_pair(table: EigenformTable, s: float, eps: int, n_terms: int) -> float:
    """Completed Lambda(s,f) from the two-sided incomplete-gamma sum."""
    q = table.q
    lam = table.full(n_terms)
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    c = 2.0 * math.pi * n / math.sqrt(q)
    coeff = lam[1:n_terms + 1] * np.sqrt(n)
    g1 = np.sum(coeff * c ** (-(s + 0.5)) * _upper_gamma(s + 0.5, c))
    g2 = np.sum(coeff * c ** (s - 1.5) * _upper_gamma(1.5 - s, c))
    return float((2.0 * math.pi / math.sqrt(q)) ** 0.5 * (g1 + eps * g2))


def sign_of_functional_equation(table: EigenformTable, tol: float = 1e-9) -> int:
    """epsilon_f, determined numerically from the completed L-function.

    The two-sided smoothed sum for Lambda(s,f) is matched against the
    absolutely convergent Dirichlet series at s=2.5 for both candidate
    signs; the winner must fit 10x better and reproduce the reflection
    Lambda(0.6) = eps Lambda(0.4) to 1e-4.
    """
    q = table.q
    n_terms = min(table.n_max, max(64, int(math.sqrt(q) * (math.log(1.0 / tol) + 8.0) / (2.0 * math.pi))))
    if n_terms < 16:
        raise MissingEigenvalueError("table too short to determine the FE sign")
    s0 = 2.5
    lam = table.full(table.n_max)
    n = np.arange(1, table.n_max + 1, dtype=np.float64)
    l_direct = float(np.sum(lam[1:] * n ** (-s0)))
    lam_direct = (math.sqrt(q) / (2.0 * math.pi)) ** s0 * math.gamma(s0 + 0.5) * l_direct
    pair = {e: _lambda_completed_pair(table, s0, e, n_terms) for e in (+1, -1)}
    fits = {e: abs(pair[e] - lam_direct) for e in (+1, -1)}
    disc = abs(pair[+1] - pair[-1])
    eps = +1 if fits[+1] < fits[-1] else -1
    if fits[-eps] < 4.0 * fits[eps] or fits[eps] > 0.2 * disc:
        raise IndeterminateSignError(
            f"FE sign not separated at q={q}, form {table.index}: fits={fits}, gap={disc:.3e}"
        )
    lam_a = _lambda_completed_pair(table, 0.6, eps, n_terms)
    lam_b = _lambda_completed_pair(table, 0.4, eps, n_terms)
    denom = max(abs(lam_a), abs(lam_b))
    if denom > 1e-9:
        ratio = lam_a / lam_b if abs(lam_b) > 1e-300 else math.inf
        if abs(ratio - eps) > 1e-4:
            raise IndeterminateSignError(
                f"reflected-point ratio {ratio} not within 1e-4 of {eps} at q={q}"
            )
    return eps


def fe_sign_with_fallback(table: EigenformTable) -> int:
    """FE sign via the completed-L consistency, falling back to the
    prime-level identity eps_f = sqrt(q) lambda_f(q) when the numerical
    separation degrades (large q)."""
    try:
        return sign_of_functional_equation(table)
    except IndeterminateSignError:
        val = math.sqrt(table.q) * table.lam(table.q)
        sign = 1 if val > 0 else -1
        if abs(abs(val) - 1.0) > 1e-3:
            raise
        return sign


def eigendata(q: int, n_max: int, seed: int = 0) -> tuple[HeckeSpace, list[EigenformTable]]:
    """Build the space, split it, extend primes to n_max, determine signs."""
    space = build_space(q)
    tables = eigen_split(space, seed=seed)
    tables = extend_prime_eigenvalues(space, tables, n_max)
    out = []
    for t in tables:
        out.append(t.with_sign(fe_sign_with_fallback(t)))
    return space, out
