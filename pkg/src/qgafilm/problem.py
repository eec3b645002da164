"""The thin-film design problem: codes in, figures of merit out.

Wraps a codec, per-layer thicknesses, and a spectral grid into a single
object that memoizes true evaluations and precomputes each layer's
candidate phase factors on the grid, so enumerating thousands of codes
stays cheap. Fitness consumers maximize f = -100 * FOM.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from . import optics
from .encoding import DEFAULT_MATERIAL_LABELS, MaterialCodec
from .optics import MaterialTable, SpectralGrid

BUNDLED_MATERIALS = ("sio2", "si3n4", "tio2", "al2o3")
BUNDLED_SOLAR = "am15g_synthetic.csv"

FITNESS_SCALE = -100.0  # fitness = -100 * FOM

# Default layer-thickness ladder endpoints (incidence side first). Graded
# thicknesses give the layers distinguishable spectral roles, which keeps
# the code-to-FOM landscape surrogate-learnable and its optimum unique;
# uniform stacks of these materials are near-palindromic under air/air
# boundaries and their optima come in mirror-image near-ties.
DEFAULT_THICKNESS_TOP_NM = 1200.0
DEFAULT_THICKNESS_BOTTOM_NM = 75.0


def default_thicknesses(n_layers: int) -> np.ndarray:
    """Log-spaced ladder from the top (incidence) to bottom thickness."""
    if n_layers < 1:
        raise ValueError("n_layers must be >= 1")
    if n_layers == 1:
        return np.array([DEFAULT_THICKNESS_TOP_NM])
    return np.round(np.exp(np.linspace(np.log(DEFAULT_THICKNESS_TOP_NM),
                                       np.log(DEFAULT_THICKNESS_BOTTOM_NM),
                                       n_layers)), 0)


def _data_path(name: str):
    return resources.files("qgafilm").joinpath("data", name)


def load_bundled_materials() -> dict[str, MaterialTable]:
    out = {}
    for name in BUNDLED_MATERIALS:
        with resources.as_file(_data_path(f"{name}.csv")) as path:
            out[name] = optics.load_material_csv(path, name)
    return out


def load_bundled_solar():
    with resources.as_file(_data_path(BUNDLED_SOLAR)) as path:
        return optics.load_solar_csv(path)


class TrcProblem:
    """N-layer transparent-coating design over a fixed material alphabet."""

    def __init__(self, codec: MaterialCodec, thicknesses_nm, grid: SpectralGrid):
        thicknesses = np.asarray(thicknesses_nm, dtype=float)
        if thicknesses.ndim == 0:
            raise ValueError("thicknesses_nm must be a per-layer sequence")
        if np.any(~np.isfinite(thicknesses)) or np.any(thicknesses <= 0):
            raise ValueError("thicknesses must be finite and positive")
        self.codec = codec
        self.thicknesses_nm = thicknesses
        self.grid = grid
        self.n_layers = len(thicknesses)
        self.code_length = 2 * self.n_layers
        self._fom_cache: dict[bytes, float] = {}

        # per material label: complex index on the grid; per layer: phase factor
        wl = grid.wavelengths_nm
        self._etas = {}
        self._deltas = {}
        for pair, name in codec.labels.items():
            nc = codec.materials[name].complex_index(wl)
            self._etas[pair] = nc
            for j, d in enumerate(thicknesses):
                self._deltas[(j, pair)] = 2.0 * np.pi * nc * d / wl

    def _pairs(self, code) -> list[tuple[int, int]]:
        code = np.asarray(code, dtype=np.uint8)
        if code.shape != (self.code_length,):
            raise ValueError(f"code shape {code.shape} != ({self.code_length},)")
        return [(int(code[2 * j]), int(code[2 * j + 1])) for j in range(self.n_layers)]

    def spectral_response(self, code):
        """(T, R) arrays of the decoded stack over the problem grid."""
        pairs = self._pairs(code)
        deltas = [self._deltas[(j, pair)] for j, pair in enumerate(pairs)]
        etas = [self._etas[pair] for pair in pairs]
        return optics.characteristic_product(deltas, etas,
                                             self.codec.ambient_n,
                                             self.codec.substrate_n)

    def fom(self, code) -> float:
        code = np.asarray(code, dtype=np.uint8)
        key = code.tobytes()
        cached = self._fom_cache.get(key)
        if cached is not None:
            return cached
        t, _ = self.spectral_response(code)
        value = optics.fom_from_transmission(t, self.grid)
        self._fom_cache[key] = value
        return value

    def fitness(self, code) -> float:
        return FITNESS_SCALE * self.fom(code)

    def stack(self, code) -> optics.LayerStack:
        return self.codec.decode(code, self.thicknesses_nm)


def default_problem(n_layers: int, thickness_nm=None,
                    lambda_min_nm: float = 300.0, lambda_max_nm: float = 2500.0,
                    step_nm: float = 5.0,
                    materials: dict[str, MaterialTable] | None = None,
                    solar=None, ambient_n: float = 1.0,
                    substrate_n: float = 1.0) -> TrcProblem:
    """Problem with bundled materials/solar data unless overridden.

    `thickness_nm` may be a scalar, a per-layer sequence, or None for the
    default log-spaced ladder.
    """
    if materials is None:
        materials = load_bundled_materials()
    if solar is None:
        solar = load_bundled_solar()
    grid = optics.make_grid(solar[0], solar[1], lambda_min_nm, lambda_max_nm, step_nm)
    codec = MaterialCodec(materials, DEFAULT_MATERIAL_LABELS, ambient_n, substrate_n)
    if thickness_nm is None:
        thicknesses = default_thicknesses(n_layers)
    else:
        thicknesses = np.broadcast_to(np.asarray(thickness_nm, dtype=float),
                                      (n_layers,)).copy()
    return TrcProblem(codec, thicknesses, grid)


class CountingFitness:
    """Counts logical evaluations of the wrapped fitness callable."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, code) -> float:
        self.calls += 1
        return self.fn(code)


class SurrogateFitness:
    """fitness = -100 * surrogate-predicted FOM, with a batched path."""

    def __init__(self, model):
        self.model = model
        self.calls = 0

    def __call__(self, code) -> float:
        self.calls += 1
        return FITNESS_SCALE * float(self.model.predict(code))

    def evaluate_many(self, codes) -> np.ndarray:
        self.calls += len(codes)
        return FITNESS_SCALE * np.asarray(self.model.predict_many(codes), dtype=float)
