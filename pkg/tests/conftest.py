import numpy as np
import pytest

from lfmoments import heckespace as hs

# Session-wide eigendata, sized for the most demanding consumer of each level:
# q=11: eta-product comparisons to 2048 and tol=5e-7 AFE work
# q=37: reconstruction at (3, 37, 0.5) needs 3 * afe_cutoff(37, 0.5, 1e-6)
# q=101: cross-route at tol=5e-7 and trace route at (2, 101, 0)
_N_MAX = {11: 8192, 37: 16384, 101: 16384}


@pytest.fixture(scope="session")
def eigen_cache():
    built = {}

    def get(q: int, n_max: int | None = None):
        target = max(n_max or 0, _N_MAX.get(q, 1024))
        if q in built:
            space, tables = built[q]
            if not tables or tables[0].n_max >= target:
                return space, tables
        space = hs.build_space(q)
        tables = hs.eigen_split(space, seed=0)
        tables = hs.extend_prime_eigenvalues(space, tables, target)
        tables = [t.with_sign(hs.sign_of_functional_equation(t)) for t in tables]
        built[q] = (space, tables)
        return space, tables

    return get


@pytest.fixture(scope="session")
def eigen11(eigen_cache):
    return eigen_cache(11)


@pytest.fixture(scope="session")
def eigen37(eigen_cache):
    return eigen_cache(37)


@pytest.fixture(scope="session")
def eigen101(eigen_cache):
    return eigen_cache(101)


def eta_level11_coefficients(n_max: int) -> np.ndarray:
    """Classical a_n of the level-11 weight-2 newform from its eta product.

    q prod (1-q^n)^2 (1-q^{11n})^2, exact integer power-series arithmetic;
    independent of every modular-symbols computation in the package.
    """
    c = np.zeros(n_max, dtype=np.int64)
    c[0] = 1
    for n in range(1, n_max):
        for _ in range(2):
            c[n:] -= c[:-n].copy()
        m = 11 * n
        if m < n_max:
            for _ in range(2):
                c[m:] -= c[:-m].copy()
    a = np.zeros(n_max + 1, dtype=np.int64)
    a[1:] = c[:n_max]
    return a


def count_affine_points(a1, a2, a3, a4, a6, p) -> int:
    """Brute-force #E(F_p) for a Weierstrass curve, including infinity."""
    cnt = 1
    for x in range(p):
        rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - rhs) % p == 0:
                cnt += 1
    return cnt
