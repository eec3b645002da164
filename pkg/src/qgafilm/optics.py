"""Transfer-matrix optics for planar multilayer stacks.

Computes normal-incidence transmittance/reflectance of a stack of
homogeneous films via the 2x2 characteristic-matrix method and reduces
a transmission spectrum to the scalar figure of merit used by the
optimizers (lower is better, 0 for the ideal filter).

Sign convention: complex index n~ = n - i*k with e^{+i w t} time
dependence, so k >= 0 absorbs. The phase thickness of a layer is
delta = 2 pi n~ d / lambda and the layer matrix is

    [[cos d,         i sin d / n~],
     [i n~ sin d,    cos d       ]]

(normal incidence; s and p polarizations are degenerate). The
energy-conservation test (R + T = 1 for lossless stacks) pins this
convention.

All functions here are pure; callers may evaluate stacks concurrently.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


class OpticsRangeError(ValueError):
    """Wavelength outside the span of a material table or grid."""


class EvaluationError(ArithmeticError):
    """Non-finite result in the matrix product (absurd thickness/extinction)."""


@dataclass(frozen=True)
class MaterialTable:
    """Tabulated optical constants of one material, linearly interpolated."""

    name: str
    wavelengths_nm: np.ndarray
    n: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        wl = np.asarray(self.wavelengths_nm, dtype=float)
        n = np.asarray(self.n, dtype=float)
        k = np.asarray(self.k, dtype=float)
        if wl.size < 2:
            raise ValueError(f"material {self.name!r}: need at least 2 samples")
        if not np.all(np.diff(wl) > 0):
            raise ValueError(f"material {self.name!r}: wavelengths must be strictly increasing")
        if not np.all(n > 0):
            raise ValueError(f"material {self.name!r}: refractive index must be positive")
        if not np.all(k >= 0):
            raise ValueError(f"material {self.name!r}: extinction must be non-negative")
        object.__setattr__(self, "wavelengths_nm", wl)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.wavelengths_nm[0]), float(self.wavelengths_nm[-1])

    def _check_span(self, wavelength_nm) -> None:
        lo, hi = self.span
        wmin = np.min(wavelength_nm)
        wmax = np.max(wavelength_nm)
        if wmin < lo or wmax > hi:
            bad = wmin if wmin < lo else wmax
            raise OpticsRangeError(
                f"wavelength {bad:g} nm outside table span [{lo:g}, {hi:g}] nm "
                f"of material {self.name!r}"
            )

    def nk(self, wavelength_nm):
        """(n, k) at the given wavelength(s); linear between samples."""
        self._check_span(wavelength_nm)
        n = np.interp(wavelength_nm, self.wavelengths_nm, self.n)
        k = np.interp(wavelength_nm, self.wavelengths_nm, self.k)
        return n, k

    def complex_index(self, wavelengths_nm) -> np.ndarray:
        """n - i*k on the given wavelengths (see module convention)."""
        n, k = self.nk(wavelengths_nm)
        return n - 1j * k


def interpolate_nk(material: MaterialTable, wavelength_nm: float) -> tuple[float, float]:
    n, k = material.nk(wavelength_nm)
    return float(n), float(k)


@dataclass(frozen=True)
class Layer:
    material: MaterialTable
    thickness_nm: float

    def __post_init__(self):
        t = float(self.thickness_nm)
        if not np.isfinite(t) or t <= 0:
            raise ValueError(f"layer thickness must be finite and positive, got {t}")


@dataclass(frozen=True)
class LayerStack:
    """Ordered films, first layer on the incidence side."""

    layers: tuple[Layer, ...]
    ambient_n: float = 1.0
    substrate_n: float = 1.0

    def __post_init__(self):
        layers = tuple(self.layers)
        if len(layers) < 1:
            raise ValueError("stack needs at least one layer")
        object.__setattr__(self, "layers", layers)

    def reversed(self) -> "LayerStack":
        """Mirror image: light enters from the former substrate side."""
        return LayerStack(tuple(reversed(self.layers)),
                          ambient_n=self.substrate_n, substrate_n=self.ambient_n)


def characteristic_product(deltas, etas, ambient_n: float, substrate_n: float):
    """(T, R) from per-layer phase thicknesses and admittances.

    `deltas` and `etas` are sequences of complex arrays (one per layer,
    incidence side first), each broadcastable over the wavelength axis.
    Shared core for both the general path and precomputed-problem path.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        m11 = m22 = 1.0 + 0j
        m12 = m21 = 0.0 + 0j
        for delta, eta in zip(deltas, etas):
            c = np.cos(delta)
            s = np.sin(delta)
            l11 = c
            l12 = 1j * s / eta
            l21 = 1j * s * eta
            l22 = c
            m11, m12, m21, m22 = (
                m11 * l11 + m12 * l21,
                m11 * l12 + m12 * l22,
                m21 * l11 + m22 * l21,
                m21 * l12 + m22 * l22,
            )
        b = m11 + m12 * substrate_n
        c = m21 + m22 * substrate_n
        denom = ambient_n * b + c
        r = (ambient_n * b - c) / denom
        tt = 4.0 * ambient_n * np.real(substrate_n) / np.abs(denom) ** 2
        rr = np.abs(r) ** 2
    if not (np.all(np.isfinite(tt)) and np.all(np.isfinite(rr))):
        raise EvaluationError("non-finite transfer-matrix product; "
                              "check layer thickness and extinction inputs")
    return tt, rr


def spectral_response(stack: LayerStack, wavelengths_nm):
    """Transmittance and reflectance arrays over the given wavelengths."""
    wl = np.asarray(wavelengths_nm, dtype=float)
    deltas = []
    etas = []
    for layer in stack.layers:
        nc = layer.material.complex_index(wl)
        deltas.append(2.0 * np.pi * nc * layer.thickness_nm / wl)
        etas.append(nc)
    return characteristic_product(deltas, etas, stack.ambient_n, stack.substrate_n)


def transmittance(stack: LayerStack, wavelength_nm: float) -> float:
    t, _ = spectral_response(stack, np.asarray([float(wavelength_nm)]))
    return float(t[0])


def reflectance(stack: LayerStack, wavelength_nm: float) -> float:
    _, r = spectral_response(stack, np.asarray([float(wavelength_nm)]))
    return float(r[0])


VISIBLE_BAND_NM = (400.0, 750.0)


@dataclass(frozen=True)
class SpectralGrid:
    """Integration grid: wavelengths, solar irradiance, target transmission."""

    wavelengths_nm: np.ndarray
    solar: np.ndarray
    ideal_t: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        wl = np.asarray(self.wavelengths_nm, dtype=float)
        s = np.asarray(self.solar, dtype=float)
        if not np.all(np.diff(wl) > 0):
            raise ValueError("grid wavelengths must be strictly increasing")
        if np.any(s < 0):
            raise ValueError("solar irradiance must be non-negative")
        ideal = self.ideal_t
        if ideal is None:
            lo, hi = VISIBLE_BAND_NM
            ideal = ((wl >= lo) & (wl <= hi)).astype(float)
        else:
            ideal = np.asarray(ideal, dtype=float)
        object.__setattr__(self, "wavelengths_nm", wl)
        object.__setattr__(self, "solar", s)
        object.__setattr__(self, "ideal_t", ideal)


def fom(stack: LayerStack, grid: SpectralGrid) -> float:
    """Squared distance between transmitted and ideal irradiance.

    10 * integral (S*T - S*T_ideal)^2 / integral S^2, trapezoid rule on
    the grid. 0 iff T matches the target at every grid point.
    """
    t, _ = spectral_response(stack, grid.wavelengths_nm)
    return fom_from_transmission(t, grid)


def fom_from_transmission(t: np.ndarray, grid: SpectralGrid) -> float:
    wl = grid.wavelengths_nm
    resid = grid.solar * t - grid.solar * grid.ideal_t
    num = np.trapezoid(resid**2, wl)
    den = np.trapezoid(grid.solar**2, wl)
    return float(10.0 * num / den)


def load_material_csv(path, name: str | None = None) -> MaterialTable:
    """Material file: header ``wavelength_nm,n,k``, one material per file."""
    wl, n, k = [], [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            wl.append(float(row["wavelength_nm"]))
            n.append(float(row["n"]))
            k.append(float(row["k"]))
    import os
    label = name if name is not None else os.path.splitext(os.path.basename(path))[0]
    return MaterialTable(label, np.asarray(wl), np.asarray(n), np.asarray(k))


def load_solar_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Solar file: header ``wavelength_nm,irradiance`` (AM1.5G-style)."""
    wl, s = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            wl.append(float(row["wavelength_nm"]))
            s.append(float(row["irradiance"]))
    return np.asarray(wl), np.asarray(s)


def make_grid(solar_wl: np.ndarray, solar_val: np.ndarray,
              lambda_min_nm: float = 300.0, lambda_max_nm: float = 2500.0,
              step_nm: float = 5.0) -> SpectralGrid:
    """Uniform grid over [lambda_min, lambda_max] with solar resampled onto it."""
    if solar_wl[0] > lambda_min_nm or solar_wl[-1] < lambda_max_nm:
        raise OpticsRangeError(
            f"solar table [{solar_wl[0]:g}, {solar_wl[-1]:g}] nm does not cover "
            f"[{lambda_min_nm:g}, {lambda_max_nm:g}] nm")
    count = int(round((lambda_max_nm - lambda_min_nm) / step_nm)) + 1
    wl = lambda_min_nm + step_nm * np.arange(count)
    s = np.interp(wl, solar_wl, solar_val)
    return SpectralGrid(wl, s)
