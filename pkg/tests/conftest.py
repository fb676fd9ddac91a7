import numpy as np
import pytest

from qcollide import kfm_hash, rsa_hash, xor_matrix_hash


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def xor24():
    """2x4 bit matrix with rows (1,0,1,0) and (0,1,0,1); |kernel| = 4."""
    return xor_matrix_hash((0b0101, 0b1010), 4)


@pytest.fixture
def kfm_small():
    """p=23, q=11, generators 4 = 2^2 and 9 = 3^2 mod 23."""
    return kfm_hash(23, 11, (4, 9))


@pytest.fixture
def rsa_small():
    """N = 13*11 = 143, e = 3; gcd(3, lcm(12, 10)) = 3 so the kernel is nontrivial."""
    return rsa_hash(13, 11, 3)


@pytest.fixture
def injective_xor():
    """Identity matrix on 4 bits: a bijective test map with trivial kernel."""
    return xor_matrix_hash(tuple(1 << j for j in range(4)), 4)
