#!/usr/bin/env python3
"""Regenerate the dispersion and solar CSVs bundled in src/qgafilm/data/.

Refractive indices come from published Sellmeier fits (all public domain):

  SiO2   Malitson, JOSA 55, 1205 (1965), fused silica
  Si3N4  Luke et al., Opt. Lett. 40, 4823 (2015), LPCVD film
  TiO2   single-term Sellmeier fit for an amorphous film
         (n ~ 2.5 in the visible, normal dispersion)
  Al2O3  Malitson, JOSA 52, 1377 (1962), sapphire ordinary ray

TiO2 additionally carries a UV extinction tail below its ~3.2 eV band
edge; the other three are treated as lossless over 290-2510 nm.

The solar curve is a smooth AM1.5G-like synthetic: a 5778 K blackbody
scaled to ~963 W/m^2 over 300-2500 nm with Gaussian dips at the major
O2/H2O absorption bands. It is NOT the ASTM G173 table; substitute the
real data via the config if absolute irradiance matters.
"""

import csv
import math
import os

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "qgafilm", "data")

WL_START = 290.0
WL_STOP = 2510.0
WL_STEP = 5.0


def sellmeier(wl_um, terms):
    s = sum(b * wl_um**2 / (wl_um**2 - c**2) for b, c in terms)
    return math.sqrt(1.0 + s)


def n_sio2(wl_um):
    return sellmeier(wl_um, [(0.6961663, 0.0684043),
                             (0.4079426, 0.1162414),
                             (0.8974794, 9.896161)])


def n_si3n4(wl_um):
    return sellmeier(wl_um, [(3.0249, 0.1353406),
                             (40314.0, 1239.842)])


def n_tio2(wl_um):
    return sellmeier(wl_um, [(4.6796, 0.2002148)])


def n_al2o3(wl_um):
    return sellmeier(wl_um, [(1.4313493, 0.0726631),
                             (0.65054713, 0.1193242),
                             (5.3414021, 18.028251)])


def k_tio2(wl_nm):
    # Band edge near 387 nm; exponential Urbach-like tail into the UV.
    if wl_nm >= 387.0:
        return 0.0
    return 0.6 * (1.0 - math.exp(-(387.0 - wl_nm) / 40.0))


def write_material(name, n_of_um, k_of_nm=None):
    path = os.path.join(OUT_DIR, f"{name}.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["wavelength_nm", "n", "k"])
        wl = WL_START
        while wl <= WL_STOP + 1e-9:
            n = n_of_um(wl / 1000.0)
            k = k_of_nm(wl) if k_of_nm else 0.0
            w.writerow([f"{wl:.1f}", f"{n:.6f}", f"{k:.6f}"])
            wl += WL_STEP
    print("wrote", path)


def planck_radiance(wl_nm, temp_k=5778.0):
    h = 6.62607015e-34
    c = 2.99792458e8
    kb = 1.380649e-23
    lam = wl_nm * 1e-9
    return (2.0 * h * c**2 / lam**5) / (math.exp(h * c / (lam * kb * temp_k)) - 1.0)


ABSORPTION_DIPS = [  # (center nm, width nm, depth fraction)
    (687.0, 6.0, 0.25),    # O2 B band
    (760.0, 8.0, 0.55),    # O2 A band
    (940.0, 35.0, 0.65),   # H2O
    (1130.0, 35.0, 0.70),  # H2O
    (1400.0, 60.0, 0.97),  # H2O (near-opaque)
    (1900.0, 70.0, 0.97),  # H2O (near-opaque)
    (2500.0, 120.0, 0.80), # H2O/CO2 edge
]


def solar_shape(wl_nm):
    s = planck_radiance(wl_nm)
    # crude Rayleigh + ozone attenuation toward the UV
    s *= 1.0 - 0.85 * math.exp(-(wl_nm - 250.0) / 120.0)
    for center, width, depth in ABSORPTION_DIPS:
        s *= 1.0 - depth * math.exp(-0.5 * ((wl_nm - center) / width) ** 2)
    return max(s, 0.0)


def write_solar():
    wls = []
    wl = WL_START
    while wl <= WL_STOP + 1e-9:
        wls.append(wl)
        wl += WL_STEP
    raw = [solar_shape(w) for w in wls]
    # trapezoid integral over 300-2500 nm, scaled to 963 W/m^2
    total = 0.0
    for i in range(len(wls) - 1):
        if wls[i] >= 300.0 and wls[i + 1] <= 2500.0:
            total += 0.5 * (raw[i] + raw[i + 1]) * (wls[i + 1] - wls[i])
    scale = 963.0 / total
    path = os.path.join(OUT_DIR, "am15g_synthetic.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["wavelength_nm", "irradiance"])
        for wl, s in zip(wls, raw):
            w.writerow([f"{wl:.1f}", f"{s * scale:.6f}"])
    print("wrote", path)


if __name__ == "__main__":
    os.makedirs(OUT_DIR, exist_ok=True)
    write_material("sio2", n_sio2)
    write_material("si3n4", n_si3n4)
    write_material("tio2", n_tio2, k_tio2)
    write_material("al2o3", n_al2o3)
    write_solar()
