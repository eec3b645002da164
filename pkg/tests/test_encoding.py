import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import constant_material
from qgafilm.encoding import (MaterialCodec, code_to_int, code_to_string,
                              int_to_code, string_to_code)
from qgafilm.optics import Layer, LayerStack


@pytest.fixture(scope="module")
def codec():
    materials = {
        "sio2": constant_material("sio2", 1.46),
        "si3n4": constant_material("si3n4", 2.05),
        "tio2": constant_material("tio2", 2.5),
        "al2o3": constant_material("al2o3", 1.77),
    }
    return MaterialCodec(materials)


def test_decode_single_pair(codec):
    stack = codec.decode([0, 0], [120.0])
    assert len(stack.layers) == 1
    assert stack.layers[0].material.name == "sio2"
    assert stack.layers[0].thickness_nm == 120.0


def test_decode_multimaterial_example(codec):
    stack = codec.decode([1, 0, 1, 0, 0, 0, 1, 0, 0, 1, 1, 1], [100.0] * 6)
    names = [layer.material.name for layer in stack.layers]
    assert names == ["tio2", "tio2", "sio2", "tio2", "si3n4", "al2o3"]


def test_encode_single_al2o3(codec):
    stack = LayerStack((Layer(constant_material("al2o3", 1.77), 80.0),))
    assert codec.encode(stack).tolist() == [1, 1]


def test_encode_unlabeled_material_raises(codec):
    stack = LayerStack((Layer(constant_material("unknown", 1.9), 80.0),))
    with pytest.raises(ValueError, match="unknown"):
        codec.encode(stack)


def test_odd_length_code_raises(codec):
    with pytest.raises(ValueError):
        codec.decode([1, 0, 1], [100.0, 100.0])


def test_empty_stack_raises():
    with pytest.raises(ValueError):
        LayerStack(())


@given(st.integers(min_value=1, max_value=8), st.integers(min_value=0))
@settings(max_examples=300, deadline=None)
def test_round_trip_random_codes(codec, n_layers, value):
    value %= 4**n_layers
    code = int_to_code(value, 2 * n_layers)
    stack = codec.decode(code, [100.0] * n_layers)
    assert np.array_equal(codec.encode(stack), code)


def test_search_space_enumeration_unique(codec):
    seen = set()
    for value in range(4**6):
        code = int_to_code(value, 12)
        stack = codec.decode(code, [100.0] * 6)
        seen.add(tuple(codec.encode(stack)))
    assert len(seen) == 4096


def test_bit_string_serialization():
    code = string_to_code("101000100111")
    assert code_to_string(code) == "101000100111"
    assert code_to_int(code) == 0b101000100111
    assert np.array_equal(int_to_code(0b101000100111, 12), code)
    with pytest.raises(ValueError):
        string_to_code("10a1")


def test_int_code_bounds():
    with pytest.raises(ValueError):
        int_to_code(16, 4)
    assert int_to_code(15, 4).tolist() == [1, 1, 1, 1]
