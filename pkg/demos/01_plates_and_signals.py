"""Plates and signals
==================

A plate is a rectangle in R^d carrying a uniform cell-centered sample grid.
Signals live on plates; norms are Riemann sums, translations come in two
flavors, and convolution is circular so Fourier identities hold exactly.
"""
import tempfile
from pathlib import Path

import numpy as np

from scatmaxp import (
    Plate, SignalGrid, convolve, l2_norm, linf_norm, read_sgrid,
    translate_in_plate, translate_with_plate, unit_plate, write_sgrid,
)

# A centered unit plate with 64x64 samples: spacing 1/64, cell volume 1/4096.
plate = unit_plate((64, 64), centered=True)
print("plate:", plate)
print("spacing:", plate.spacing, " cell volume:", plate.cell_volume)
print("contains the origin:", plate.contains_zero())

rng = np.random.default_rng(0)
f = SignalGrid(plate, rng.random((64, 64)))
print("\n||f||_2 =", l2_norm(f), "  ||f||_inf =", linf_norm(f))

# Constant signals make the Riemann sum exact: a constant 1 on [0,1]^2 has norm 1.
ones = SignalGrid(unit_plate((4, 4)), np.ones((4, 4)))
print("||1||_2 on the unit plate:", l2_norm(ones))

# Two kinds of translation.  L_c shifts samples circularly inside the plate;
# T_c moves the function together with its plate (values untouched).
shifted_inside = translate_in_plate(f, (8, 0))
print("\nL_c is an isometry:", l2_norm(shifted_inside) == l2_norm(f))

moved = translate_with_plate(f, (0.25, 0.0))
print("T_c moved the origin from", f.plate.origin, "to", moved.plate.origin)
print("values are bit-identical:", np.array_equal(moved.values, f.values))

# Circular convolution via the FFT.  A linear-phase all-pass kernel is exactly
# a circular shift, which is why the cascade's shift identities are testable.
k = (3, 5)
w0, w1 = np.meshgrid(*[2 * np.pi * np.fft.fftfreq(64)] * 2, indexing="ij")
shift_kernel = np.exp(-1j * (w0 * k[0] + w1 * k[1]))
conv = convolve(f, shift_kernel)
print("\nshift-kernel convolution equals np.roll:",
      np.allclose(conv.values, np.roll(f.values, k, (0, 1)), atol=1e-12))

# Signals round-trip losslessly through the portable SGRID format.
with tempfile.TemporaryDirectory() as tmp:
    target = Path(tmp) / "signal.sgrid"
    write_sgrid(f, target)
    back = read_sgrid(target)
    print("\nSGRID round-trip bit-exact:",
          back.plate == f.plate and np.array_equal(back.values, f.values))
