"""Sampled signals on rectangular plates: norms, translations, spectral convolution.

A plate is an axis-aligned rectangle in R^d (d = 1 or 2) carrying a uniform
cell-centered sample grid; sample index n sits at ``origin + (n + 0.5) * spacing``.
All convolutions are circular (periodic on the plate) so Fourier-shift
identities hold exactly on the grid.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np


@dataclass(frozen=True)
class Plate:
    """Axis-aligned rectangular domain with a uniform sample grid."""

    origin: tuple[float, ...]
    side_lengths: tuple[float, ...]
    samples_per_axis: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(float(x) for x in self.origin))
        object.__setattr__(self, "side_lengths", tuple(float(x) for x in self.side_lengths))
        object.__setattr__(self, "samples_per_axis", tuple(int(n) for n in self.samples_per_axis))
        d = len(self.origin)
        if d not in (1, 2):
            raise ValueError(f"plate dimension must be 1 or 2, got {d}")
        if len(self.side_lengths) != d or len(self.samples_per_axis) != d:
            raise ValueError("origin, side_lengths and samples_per_axis must share one dimension")
        if any(s <= 0 for s in self.side_lengths):
            raise ValueError(f"side_lengths must be positive, got {self.side_lengths}")
        if any(n < 1 for n in self.samples_per_axis):
            raise ValueError(f"samples_per_axis must be >= 1, got {self.samples_per_axis}")

    @property
    def dim(self) -> int:
        return len(self.origin)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(s / n for s, n in zip(self.side_lengths, self.samples_per_axis))

    @property
    def cell_volume(self) -> float:
        return prod(self.spacing)

    @property
    def volume(self) -> float:
        return prod(self.side_lengths)

    def contains_zero(self) -> bool:
        return all(o <= 0.0 <= o + s for o, s in zip(self.origin, self.side_lengths))

    def axis_coordinates(self, axis: int) -> np.ndarray:
        """Physical coordinates of the cell centers along one axis."""
        h = self.spacing[axis]
        return self.origin[axis] + (np.arange(self.samples_per_axis[axis]) + 0.5) * h

    def scaled(self, factor: float) -> "Plate":
        """The plate D/factor (origin and sides divided; sample counts kept)."""
        return Plate(
            tuple(o / factor for o in self.origin),
            tuple(s / factor for s in self.side_lengths),
            self.samples_per_axis,
        )


def unit_plate(samples_per_axis: tuple[int, ...] | int, centered: bool = False) -> Plate:
    """Unit-volume plate [0,1]^d (or [-1/2,1/2]^d when centered) with the given grid."""
    if isinstance(samples_per_axis, int):
        samples_per_axis = (samples_per_axis,)
    d = len(samples_per_axis)
    origin = (-0.5,) * d if centered else (0.0,) * d
    return Plate(origin, (1.0,) * d, tuple(samples_per_axis))


@dataclass(frozen=True)
class SignalGrid:
    """Complex-valued samples of a compactly supported function on a plate."""

    plate: Plate
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128, copy=True)
        if v.shape != self.plate.samples_per_axis:
            raise ValueError(
                f"values shape {v.shape} does not match plate samples "
                f"{self.plate.samples_per_axis}"
            )
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def with_values(self, values: np.ndarray) -> "SignalGrid":
        return SignalGrid(self.plate, values)


def l2_norm(f: SignalGrid) -> float:
    """Riemann approximation of the continuous L2 norm: sqrt(sum |f|^2 * cell_volume)."""
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2) * f.plate.cell_volume))


def linf_norm(f: SignalGrid) -> float:
    """Largest sample magnitude (discretization of the essential sup)."""
    return float(np.max(np.abs(f.values)))


def translate_in_plate(f: SignalGrid, offsets: tuple[int, ...]) -> SignalGrid:
    """Circular shift of the sample array by whole samples; the plate stays put."""
    offsets = tuple(int(c) for c in offsets)
    if len(offsets) != f.plate.dim:
        raise ValueError(f"expected {f.plate.dim} offsets, got {len(offsets)}")
    for c, n in zip(offsets, f.plate.samples_per_axis):
        if abs(c) >= n:
            raise ValueError(f"offset {c} out of range for axis with {n} samples")
    return f.with_values(np.roll(f.values, offsets, axis=tuple(range(f.plate.dim))))


def translate_with_plate(f: SignalGrid, c: tuple[float, ...]) -> SignalGrid:
    """Move the function together with its plate: T_c keeps values, shifts origin by c.

    c must be a whole number of sample spacings per axis and the moved plate
    must still contain the origin of R^d.
    """
    c = tuple(float(x) for x in c)
    if len(c) != f.plate.dim:
        raise ValueError(f"expected {f.plate.dim} shift components, got {len(c)}")
    for x, h in zip(c, f.plate.spacing):
        k = x / h
        if abs(k - round(k)) > 1e-9 * max(1.0, abs(k)):
            raise ValueError(f"shift component {x} is not a multiple of the spacing {h}")
    moved = Plate(
        tuple(o + x for o, x in zip(f.plate.origin, c)),
        f.plate.side_lengths,
        f.plate.samples_per_axis,
    )
    if not moved.contains_zero():
        raise ValueError(f"translated plate {moved.origin} does not contain 0")
    return SignalGrid(moved, f.values)


def convolve(f: SignalGrid, kernel_hat: np.ndarray, method: str = "fft") -> SignalGrid:
    """Circular convolution with a frequency-domain kernel.

    Parameters
    ----------
    f : SignalGrid
        Input signal.
    kernel_hat : ndarray
        DFT of the kernel, same shape as ``f.values``.
    method : str
        "fft" evaluates inverse-FFT(FFT(f) * kernel_hat). "direct" evaluates
        the same circular convolution by explicit spatial summation with a
        shift-covariant term order, so it commutes with circular shifts down
        to the last bit (useful for equivariance certification).
    """
    kernel_hat = np.asarray(kernel_hat)
    if kernel_hat.shape != f.shape:
        raise ValueError(f"kernel shape {kernel_hat.shape} does not match signal {f.shape}")
    if method == "fft":
        out = np.fft.ifftn(np.fft.fftn(f.values) * kernel_hat)
    elif method == "direct":
        out = _direct_circular_convolve(f.values, np.fft.ifftn(kernel_hat))
    else:
        raise ValueError(f"unknown convolution method {method!r}")
    return f.with_values(out)


def _direct_circular_convolve(values: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """out[x] = sum_j kernel[j] * values[(x - j) % n], summed in fixed j order.

    The circulant gather view makes the summand sequence for output x + c of a
    shifted input identical to the sequence for output x of the original, so
    circular-shift equivariance holds exactly in floating point.
    """
    d = values.ndim
    shape = values.shape
    tiled = np.roll(np.tile(values, (2,) * d), tuple(n - 1 for n in shape), tuple(range(d)))
    anchor = tiled[tuple(slice(n - 1, None) for n in shape)]
    view = np.lib.stride_tricks.as_strided(
        anchor, shape + shape, anchor.strides + tuple(-s for s in anchor.strides)
    )
    subscripts = {1: "xi,i->x", 2: "xyij,ij->xy"}[d]
    return np.einsum(subscripts, view, kernel)


def fourier_frequencies(plate: Plate) -> list[np.ndarray]:
    """Per-axis physical angular frequencies of the plate's DFT lattice."""
    return [
        2.0 * np.pi * np.fft.fftfreq(n) / h
        for n, h in zip(plate.samples_per_axis, plate.spacing)
    ]


def l2_diff_on_common_torus(a: SignalGrid, b: SignalGrid) -> float:
    """L2 norm of a - b for signals on congruent plates that differ by a grid shift.

    Both plates are treated periodically; b is re-aligned to a's coordinates by
    a circular shift of a whole number of cells.
    """
    if a.plate.side_lengths != b.plate.side_lengths or a.shape != b.shape:
        raise ValueError("signals must live on congruent plates")
    shifts = []
    for oa, ob, h in zip(a.plate.origin, b.plate.origin, a.plate.spacing):
        k = (ob - oa) / h
        if abs(k - round(k)) > 1e-9 * max(1.0, abs(k)):
            raise ValueError(f"plate offset {ob - oa} is not a whole number of cells")
        shifts.append(int(round(k)))
    aligned = np.roll(b.values, tuple(shifts), axis=tuple(range(a.plate.dim)))
    return float(np.sqrt(np.sum(np.abs(a.values - aligned) ** 2) * a.plate.cell_volume))


# ---------------------------------------------------------------------------
# Portable file formats
# ---------------------------------------------------------------------------

def write_sgrid(f: SignalGrid, path) -> None:
    """Write the portable SGRID format: ASCII header, then little-endian (re, im) pairs."""
    p = f.plate
    header = " ".join(
        ["SGRID", str(p.dim)]
        + [repr(x) for x in p.origin]
        + [repr(x) for x in p.side_lengths]
        + [str(n) for n in p.samples_per_axis]
    )
    flat = np.ascontiguousarray(f.values).ravel()
    buf = np.empty(2 * flat.size, dtype="<f8")
    buf[0::2] = flat.real
    buf[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii") + b"\n")
        fh.write(buf.tobytes())


def read_sgrid(path) -> SignalGrid:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if not header or header[0] != "SGRID":
            raise ValueError(f"{path}: not an SGRID file")
        try:
            d = int(header[1])
            fields = header[2:]
            origin = tuple(float(x) for x in fields[:d])
            sides = tuple(float(x) for x in fields[d:2 * d])
            samples = tuple(int(x) for x in fields[2 * d:3 * d])
        except (IndexError, ValueError) as exc:
            raise ValueError(f"{path}: malformed SGRID header") from exc
        plate = Plate(origin, sides, samples)
        count = 2 * prod(samples)
        buf = np.frombuffer(fh.read(8 * count), dtype="<f8")
        if buf.size != count:
            raise ValueError(f"{path}: truncated SGRID payload")
    values = (buf[0::2] + 1j * buf[1::2]).reshape(samples)
    return SignalGrid(plate, values)


def read_pgm(path) -> SignalGrid:
    """Read a binary grayscale PGM (P5, maxval 255) as a signal on the unit plate."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    i = 0
    while len(tokens) < 4 and i < len(data):
        if data[i:i + 1].isspace():
            i += 1
        elif data[i:i + 1] == b"#":
            while i < len(data) and data[i] not in b"\r\n":
                i += 1
        else:
            j = i
            while j < len(data) and not data[j:j + 1].isspace():
                j += 1
            tokens.append(data[i:j])
            i = j
    if len(tokens) < 4 or tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValueError(f"{path}: expected maxval 255, got {maxval}")
    i += 1  # single whitespace after maxval
    pixels = np.frombuffer(data[i:i + width * height], dtype=np.uint8)
    if pixels.size != width * height:
        raise ValueError(f"{path}: truncated PGM payload")
    values = pixels.reshape(height, width).astype(np.float64) / 255.0
    return SignalGrid(Plate((0.0, 0.0), (1.0, 1.0), (height, width)), values)
