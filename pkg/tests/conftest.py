import numpy as np
import pytest

from hardykit import Kind, WeightFamily


@pytest.fixture(scope="session")
def exppow3():
    return WeightFamily(Kind.EXP_POWER, 3, b=1.0, m=2.0)


@pytest.fixture(scope="session")
def pexp4():
    return WeightFamily(Kind.POWER_EXP_POWER, 4, b=1.0, m=2.0, beta=1.0)


@pytest.fixture(scope="session")
def leb3():
    return WeightFamily(Kind.LEBESGUE, 3)


@pytest.fixture(scope="session")
def leb4():
    return WeightFamily(Kind.LEBESGUE, 4)


@pytest.fixture(scope="session")
def logw_pos():
    return WeightFamily(Kind.LOG_WEIGHT, 3, alpha=1.0)


@pytest.fixture(scope="session")
def logw_neg():
    return WeightFamily(Kind.LOG_WEIGHT, 3, alpha=-1.0)


@pytest.fixture(scope="session")
def oscillating():
    return WeightFamily(Kind.OSCILLATING, 3)


def fd_log_derivatives(family, r, h_rel=1e-4):
    """Finite-difference oracle for (mu'/mu, Delta mu/mu).

    d1 comes from a five-point stencil on g = log mu.  The Laplacian ratio
    uses mu''/mu = d1' + d1^2 with d1' from a five-point stencil on the
    analytic d1 (differencing g twice hits the roundoff floor when
    |log mu| is tiny); the algebra being audited is exactly that
    composition, while d1 itself is checked independently.
    """
    from hardykit import eval_mu, log_derivatives

    r = float(r)
    h = h_rel * r
    x = r + h * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    g = np.log(eval_mu(family, x))
    d1_fd = (g[0] - 8 * g[1] + 8 * g[3] - g[4]) / (12 * h)
    d1_x = np.array([log_derivatives(family, xi)[0] for xi in x])
    d1p = (d1_x[0] - 8 * d1_x[1] + 8 * d1_x[3] - d1_x[4]) / (12 * h)
    mu2 = d1p + d1_x[2] ** 2
    lap = mu2 + (family.dimension - 1) / r * d1_x[2]
    return d1_fd, lap
