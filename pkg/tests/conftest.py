import math

import numpy as np
import pytest

R2 = math.sqrt(2)

Z_PLUS = np.array([[1, 0], [0, 0]], dtype=complex)
Z_MINUS = np.array([[0, 0], [0, 1]], dtype=complex)
X_PLUS = np.array([[1, 1], [1, 1]], dtype=complex) / 2
ALPHA_PLUS = np.array([[2 + R2, R2], [R2, 2 - R2]], dtype=complex) / 4
ALPHA_MINUS = np.array([[2 - R2, -R2], [-R2, 2 + R2]], dtype=complex) / 4
MIXTURE = np.array([[3, 1], [1, 1]], dtype=complex) / 4

ALPHA_PLUS_KET = np.array([math.cos(math.pi / 8), math.sin(math.pi / 8)])
ALPHA_MINUS_KET = np.array([-math.sin(math.pi / 8), math.cos(math.pi / 8)])

# exact closed forms for the best-effort separation of the z+/x+ mixture
P_HI = (2 + R2) / 4
P_LO = (2 - R2) / 4
SEPARATION_HEAT = -(P_HI * math.log(P_HI) + P_LO * math.log(P_LO))
LN2 = math.log(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
