import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

# Frozen oracle values. The Bloch triple of the Omega state comes from hand
# trace arithmetic; the entropic numbers come from tests/oracles.py (explicit
# projectors and a 721 x 1440 direction grid).
OMEGA_A = (0.4, 0.0, -0.4)
OMEGA_B = (0.4, 0.0, 0.0)
OMEGA_T = ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.2))
OMEGA_MUTUAL_INFO = 0.1507583199461524
OMEGA_COND_ENTROPY_Z_A = 0.8125753776465711
OMEGA_D_AB_GRID = 0.026218996442333498
OMEGA_D_BA_GRID = 0.024364066456269873


@pytest.fixture
def omega_dm():
    from discord_forge.states import omega

    return omega()


@pytest.fixture
def singlet_dm():
    from discord_forge.states import singlet

    return singlet()


def ginibre(rng):
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_rotation(rng):
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q
