"""Shared fixtures and independent oracles used across the test suite."""

import numpy as np
import pytest

from qgafilm.optics import Layer, LayerStack, MaterialTable


def airy_transmittance(n0, n1, k1, n2, d_nm, wavelength_nm):
    """Closed-form single-film transmittance (Airy summation).

    Independent of the characteristic-matrix code path: interface Fresnel
    coefficients plus the geometric series of internal reflections.
    Ambient and substrate indices are real.
    """
    nc = n1 - 1j * k1
    r01 = (n0 - nc) / (n0 + nc)
    r12 = (nc - n2) / (nc + n2)
    t01 = 2 * n0 / (n0 + nc)
    t12 = 2 * nc / (nc + n2)
    delta = 2 * np.pi * nc * d_nm / wavelength_nm
    t = t01 * t12 * np.exp(-1j * delta) / (1 + r01 * r12 * np.exp(-2j * delta))
    return (n2 / n0) * abs(t) ** 2


def constant_material(name, n, k=0.0, wl=(200.0, 3000.0)):
    grid = np.asarray([wl[0], wl[1]])
    return MaterialTable(name, grid, np.full(2, float(n)), np.full(2, float(k)))


def single_film_stack(n1, k1, d_nm, n0=1.0, n2=1.0):
    return LayerStack((Layer(constant_material("film", n1, k1), d_nm),),
                      ambient_n=n0, substrate_n=n2)


def random_lossless_stack(rng, max_layers=6):
    layers = tuple(
        Layer(constant_material(f"m{i}", rng.uniform(1.2, 3.2)), rng.uniform(20.0, 800.0))
        for i in range(rng.integers(1, max_layers + 1))
    )
    return LayerStack(layers, ambient_n=1.0, substrate_n=rng.uniform(1.0, 2.2))


def random_lossy_stack(rng, max_layers=6):
    layers = tuple(
        Layer(constant_material(f"m{i}", rng.uniform(1.2, 3.2), rng.uniform(0.0, 0.8)),
              rng.uniform(20.0, 800.0))
        for i in range(rng.integers(1, max_layers + 1))
    )
    return LayerStack(layers, ambient_n=1.0, substrate_n=rng.uniform(1.0, 2.2))


def onemax(code):
    return float(np.sum(code))


@pytest.fixture(scope="session")
def small_problem():
    """Cheap 4-layer problem on a coarse grid for loop-level tests."""
    from qgafilm.problem import default_problem

    return default_problem(4, step_nm=20.0)


@pytest.fixture(scope="session")
def n6_problem():
    """The default 6-layer acceptance problem."""
    from qgafilm.problem import default_problem

    return default_problem(6)
