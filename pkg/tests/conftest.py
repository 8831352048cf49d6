import numpy as np
import pytest

from formgroups import fpspace as fp
from formgroups.fpspace import BilinearMap


def symplectic(p: int, k: int) -> BilinearMap:
    """Standard alternating form on F_p^{2k} with one-dimensional codomain."""
    t = np.zeros((2 * k, 2 * k, 1), dtype=np.int64)
    for i in range(k):
        t[2 * i, 2 * i + 1, 0] = 1
        t[2 * i + 1, 2 * i, 0] = p - 1
    return BilinearMap(p, 2 * k, 1, t)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def brute_isotropic_maximal(beta: BilinearMap):
    """All maximal commuting-isotropic subspaces by filtering every subspace."""
    iso = [S for S in fp.all_subspaces(beta.p, beta.dom_dim) if fp.is_commuting_isotropic(beta, S)]
    return sorted((S for S in iso if not any(S.dim < T.dim and S <= T for T in iso)), key=fp.Subspace.key)
