import pytest

from nttmul import build_params

FIXED_M = 1_049_089


@pytest.fixture(scope="session")
def p17_4():
    return build_params(17, 4)


@pytest.fixture(scope="session")
def p17_8():
    return build_params(17, 8)


@pytest.fixture(scope="session")
def fixed_params():
    # one derivation per size at the production modulus, shared session-wide
    return {n: build_params(FIXED_M, n) for n in (4, 8, 16, 32, 64, 128, 256)}
