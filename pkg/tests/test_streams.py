import numpy as np
import pytest

from semsim.streams import derive_stream, stream_entropy


def test_same_labels_same_stream():
    a = derive_stream(42, ["x", 1]).integers(0, 1 << 30, size=10)
    b = derive_stream(42, ["x", 1]).integers(0, 1 << 30, size=10)
    assert np.array_equal(a, b)


def test_distinct_labels_distinct_streams():
    a = derive_stream(42, ["x", 1]).integers(0, 1 << 30, size=10)
    b = derive_stream(42, ["x", 2]).integers(0, 1 << 30, size=10)
    c = derive_stream(43, ["x", 1]).integers(0, 1 << 30, size=10)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_length_prefix_blocks_concatenation_collisions():
    # "ab"+"c" must not collide with "a"+"bc"
    assert stream_entropy(0, ["ab", "c"]) != stream_entropy(0, ["a", "bc"])
    assert stream_entropy(0, [1, 23]) != stream_entropy(0, [12, 3])


def test_entropy_is_256_bit_int():
    e = stream_entropy(7, ["population", "agent", 3])
    assert isinstance(e, int)
    assert 0 <= e < 1 << 256


def test_empty_labels_rejected():
    with pytest.raises(ValueError):
        derive_stream(42, [])
