import numpy as np
import pytest

from wceop.rng import XorShiftRng, instance_seed, splitmix64

M64 = np.uint64


def reference_stream(seed, count):
    """xorshift64* with wrapping uint64 arithmetic, independent of rng.py."""
    with np.errstate(over="ignore"):
        x = M64(seed) + M64(0x9E3779B97F4A7C15)
        z = (x ^ (x >> M64(30))) * M64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> M64(27))) * M64(0x94D049BB133111EB)
        s = z ^ (z >> M64(31))
        out = []
        for _ in range(count):
            s ^= s >> M64(12)
            s ^= s << M64(25)
            s ^= s >> M64(27)
            out.append(int(s * M64(0x2545F4914F6CDD1D)))
    return out


def test_splitmix_reference_value():
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_frozen_stream():
    rng = XorShiftRng(0)
    assert [rng.next_u64() for _ in range(3)] == [
        0x7BBCB40D550682D0, 0xDE7FE413D00CC9FD, 0xB3C638353C668C91]


@pytest.mark.parametrize("seed", [0, 1, 42, 2 ** 63 + 5, 2 ** 64 - 1])
def test_matches_uint64_reimplementation(seed):
    rng = XorShiftRng(seed)
    assert [rng.next_u64() for _ in range(50)] == reference_stream(seed, 50)


def test_instance_seeds():
    assert instance_seed(7, 0) == 309689372594955804
    assert instance_seed(7, 1) == 16616101746815609346
    assert len({instance_seed(3, k) for k in range(1000)}) == 1000


def test_floats_and_integers():
    rng = XorShiftRng(9)
    xs = [rng.random() for _ in range(2000)]
    assert min(xs) >= 0 and max(xs) < 1
    assert abs(np.mean(xs) - 0.5) < 0.03
    ks = [rng.integers(2, 5) for _ in range(4000)]
    assert set(ks) == {2, 3, 4, 5}
    counts = np.bincount(ks)[2:]
    assert np.all(np.abs(counts / 4000 - 0.25) < 0.03)
    with pytest.raises(ValueError):
        rng.integers(3, 2)


def test_shuffle_is_a_deterministic_permutation():
    a, b = list(range(20)), list(range(20))
    XorShiftRng(5).shuffle(a)
    XorShiftRng(5).shuffle(b)
    assert a == b and sorted(a) == list(range(20)) and a != list(range(20))


def test_complex_vector_modulus():
    z = XorShiftRng(1).complex_vector(100, 2.0)
    assert np.all(np.abs(z) <= 2.0)
