"""Squared central L-values through the smoothed approximate functional equation.

The primary route is the two-term AFE for L(1/2+it, f)^2:

    L(1/2+it,f)^2 = Gamma(1+it)^{-2} [ S(t) + (q/4pi^2)^{-2it} conj(S(t)) ],
    S(t) = sum_{(d,q)=1} d^{-1-2it} sum_n tau(n) lambda_f(n) n^{-1/2-it}
           W_t(4 pi^2 n d^2 / q),

with the lattice n d^2 truncated by the kernel-decay cutoff.  The
independent cross-route at t=0 is the classical exponentially smoothed
series for the completed L-function (no contour quadrature involved):

    L(1/2, f) = (1 + eps_f) sum_n lambda_f(n) n^{-1/2} e^{-2 pi n / sqrt(q)}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .heckespace import EigenformTable, MissingEigenvalueError, sign_of_functional_equation
from .smoothing import KernelParams, truncation_cutoff, wt_grid
from .special import divisor_sieve, gamma

__all__ = [
    "AfeResult",
    "afe_cutoff",
    "l_squared_afe",
    "l_squared_many",
    "l_central_oracle",
    "wt_lattice",
]


def afe_cutoff(q: int, t: float, tol: float) -> int:
    """Lattice cutoff l_squared_afe will use at (q, t, tol).

    The 1/|Gamma(1+it)|^2 prefactor amplifies the lattice sums, so the
    cutoff is solved at the correspondingly tightened tolerance; tables
    must extend at least this far.
    """
    amp = abs(gamma(1.0 + 1j * t)) ** 2
    return truncation_cutoff(q, 1, min(tol * amp, 1e-4))

_WT_CACHE: dict[tuple[float, float, int, float], np.ndarray] = {}
_TAU_CACHE: dict[int, np.ndarray] = {}


def _tau(n: int) -> np.ndarray:
    if n not in _TAU_CACHE:
        _TAU_CACHE.clear()
        _TAU_CACHE[n] = divisor_sieve(n)
    return _TAU_CACHE[n]


def wt_lattice(denom: float, t: float, n: int, tol: float) -> np.ndarray:
    """W_t(4 pi^2 k / denom), k = 1..n, cached per (denom, t, n, tol)."""
    key = (round(float(denom), 9), float(t), int(n), float(tol))
    if key not in _WT_CACHE:
        if len(_WT_CACHE) > 8:
            _WT_CACHE.clear()
        ys = 4.0 * math.pi ** 2 * np.arange(1, n + 1, dtype=np.float64) / denom
        vals = wt_grid(t, ys, KernelParams(t=t, tol=min(tol, 1e-8)))
        if t == 0.0:
            vals = vals.real
        _WT_CACHE[key] = vals
    return _WT_CACHE[key]


def _tail_model(q: int, scale: int, n: int) -> float:
    """Calibrated truncation-tail estimate for the AFE lattice sums."""
    y = 4.0 * math.pi ** 2 * (n + 1) / (q * scale)
    ln_y = math.log(y)
    return math.sqrt(q * scale) * math.exp(-ln_y * ln_y / 4.0 + 1.65 * ln_y - 15.3)


@dataclass(frozen=True)
class AfeResult:
    """L(1/2+it,f)^2 with its truncation bookkeeping."""

    value: complex
    n_cutoff: int
    d_cutoff: int
    tail_bound: float


def _lattice_sum(lam: np.ndarray, t: float, q: int, n_cutoff: int, w: np.ndarray) -> complex:
    """S(t): the d,n lattice sum with nd^2 <= n_cutoff, (d,q)=1."""
    tau = _tau(n_cutoff)
    n = np.arange(1, n_cutoff + 1, dtype=np.float64)
    if t == 0.0:
        coeff = tau[1:n_cutoff + 1] * lam[1:n_cutoff + 1] / np.sqrt(n)
    else:
        coeff = tau[1:n_cutoff + 1] * lam[1:n_cutoff + 1] * np.exp((-0.5 - 1j * t) * np.log(n))
    acc = 0.0 + 0.0j if t != 0.0 else 0.0
    d = 1
    while d * d <= n_cutoff:
        if d % q != 0:
            m = n_cutoff // (d * d)
            idx = d * d * np.arange(1, m + 1) - 1
            inner = np.dot(coeff[:m], w[idx])
            if t == 0.0:
                acc += inner / d
            else:
                acc += inner * cmath.exp((-1.0 - 2j * t) * math.log(d))
        d += 1
    return acc


def l_squared_afe(table: EigenformTable, t: float, tol: float = 1e-8) -> AfeResult:
    """L(1/2+it, f)^2 by the smoothed approximate functional equation.

    The lattice nd^2 is truncated at truncation_cutoff(q, 1, tol); the
    table must extend at least that far.  The functional-equation sign is
    never read: the squared-L equation does not contain it.
    """
    return l_squared_many([table], t, tol)[0]


def l_squared_many(tables: list[EigenformTable], t: float, tol: float = 1e-8) -> list[AfeResult]:
    """AFE values for several forms of one level, sharing the kernel grid."""
    if not tables:
        return []
    q = tables[0].q
    amp = abs(gamma(1.0 + 1j * t)) ** 2
    n_cutoff = afe_cutoff(q, t, tol)
    for table in tables:
        if table.n_max < n_cutoff:
            raise MissingEigenvalueError(
                f"table n_max={table.n_max} below AFE cutoff {n_cutoff} (q={q}, tol={tol})"
            )
    w = wt_lattice(float(q), t, n_cutoff, tol)
    d_cutoff = int(math.isqrt(n_cutoff))
    tail = _tail_model(q, 1, n_cutoff) / amp
    g2inv = 1.0 / gamma(1.0 + 1j * t) ** 2
    rot = cmath.exp(-2j * t * math.log(q / (4.0 * math.pi ** 2)))
    out = []
    for table in tables:
        lam = table.full(n_cutoff)
        s = _lattice_sum(lam, t, q, n_cutoff, w)
        if t == 0.0:
            value = complex(2.0 * s)
        else:
            value = g2inv * (s + rot * s.conjugate())
        out.append(AfeResult(value=value, n_cutoff=n_cutoff, d_cutoff=d_cutoff, tail_bound=tail))
    return out


def l_central_oracle(table: EigenformTable, tol: float = 1e-8) -> float:
    """L(1/2, f) by the exponentially smoothed central-value series.

    Independent of the W_t quadrature route; uses the functional-equation
    sign (computed on demand if the table does not carry one).
    """
    q = table.q
    sign = table.sign
    if sign == 0:
        sign = sign_of_functional_equation(table)
    m = max(32, math.ceil(math.sqrt(q) * (math.log(1.0 / tol) + 8.0) / (2.0 * math.pi)))
    if table.n_max < m:
        raise MissingEigenvalueError(f"table too short for the central-value series: need {m}")
    lam = table.full(m)
    n = np.arange(1, m + 1, dtype=np.float64)
    series = float(np.sum(lam[1:m + 1] / np.sqrt(n) * np.exp(-2.0 * math.pi * n / math.sqrt(q))))
    return (1 + sign) * series
