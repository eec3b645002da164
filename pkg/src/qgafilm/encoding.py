"""Bit-vector codec for material stacks: two bits select one of four materials.

Bit pairs are read most-significant bit first, pairs ordered from the
incidence side, so ``[1,0,1,0,0,0,1,0,0,1,1,1]`` is a six-layer stack
TiO2/TiO2/SiO2/TiO2/Si3N4/Al2O3 top to bottom. The label table is
configurable so the codec can serve other four-letter alphabets.
"""

from __future__ import annotations

import numpy as np

from .optics import Layer, LayerStack, MaterialTable

# default label -> material name, (msb, lsb) keys
DEFAULT_MATERIAL_LABELS: dict[tuple[int, int], str] = {
    (0, 0): "sio2",
    (0, 1): "si3n4",
    (1, 0): "tio2",
    (1, 1): "al2o3",
}


def code_to_string(code) -> str:
    return "".join("1" if b else "0" for b in code)


def string_to_code(s: str) -> np.ndarray:
    if not set(s) <= {"0", "1"}:
        raise ValueError(f"not a bit string: {s!r}")
    return np.asarray([int(ch) for ch in s], dtype=np.uint8)


class MaterialCodec:
    """Bijection between length-2N bit vectors and N-layer stacks."""

    def __init__(self, materials: dict[str, MaterialTable],
                 labels: dict[tuple[int, int], str] | None = None,
                 ambient_n: float = 1.0, substrate_n: float = 1.0):
        self.labels = dict(labels) if labels is not None else dict(DEFAULT_MATERIAL_LABELS)
        missing = [name for name in self.labels.values() if name not in materials]
        if missing:
            raise ValueError(f"no material table for label target(s) {missing}")
        self.materials = materials
        self.inverse = {name: bits for bits, name in self.labels.items()}
        if len(self.inverse) != len(self.labels):
            raise ValueError("material labels must be distinct")
        self.ambient_n = ambient_n
        self.substrate_n = substrate_n

    def decode(self, code, thicknesses_nm) -> LayerStack:
        code = np.asarray(code, dtype=np.uint8)
        if code.ndim != 1 or code.size % 2 != 0:
            raise ValueError(f"structure code must be a flat even-length bit vector, "
                             f"got shape {code.shape}")
        n_layers = code.size // 2
        thicknesses = np.broadcast_to(np.asarray(thicknesses_nm, dtype=float), (n_layers,))
        layers = []
        for j in range(n_layers):
            pair = (int(code[2 * j]), int(code[2 * j + 1]))
            layers.append(Layer(self.materials[self.labels[pair]], float(thicknesses[j])))
        return LayerStack(tuple(layers), self.ambient_n, self.substrate_n)

    def encode(self, stack: LayerStack) -> np.ndarray:
        bits = []
        for layer in stack.layers:
            name = layer.material.name
            if name not in self.inverse:
                raise ValueError(f"material {name!r} has no bit label")
            bits.extend(self.inverse[name])
        return np.asarray(bits, dtype=np.uint8)

    def material_name(self, pair: tuple[int, int]) -> str:
        return self.labels[pair]


def int_to_code(value: int, code_length: int) -> np.ndarray:
    """Integer to bit vector, most significant bit first."""
    if value < 0 or value >= (1 << code_length):
        raise ValueError(f"{value} out of range for {code_length} bits")
    return np.asarray([(value >> (code_length - 1 - i)) & 1 for i in range(code_length)],
                      dtype=np.uint8)


def code_to_int(code) -> int:
    out = 0
    for b in code:
        out = (out << 1) | int(b)
    return out
