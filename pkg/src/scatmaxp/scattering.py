"""Path enumeration and the three cascades: plain, maxp, and naivep.

A cascade propagates a signal through wavelet-modulus steps along paths of
filter indices and low-pass filters every propagated node.  The maxp variant
inserts continuous max-pooling after every modulus, shrinking the plate by S
per layer; the naivep variant instead block-max-pools the finished outputs
once (stride 3), without per-layer theory.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, prod

import numpy as np

from .filterbank import FilterBank, FilterIndex
from .grid import Plate, SignalGrid, convolve
from .pooling import max_pool, partition_plate

Path = tuple[FilterIndex, ...]

EMPTY_PATH: Path = ()


@dataclass(frozen=True)
class PoolConfig:
    """Per-layer pooling set-up for the maxp cascade."""

    block_samples: tuple[int, ...] | int = 2
    factor: float = 2.0
    admissibility: str = "warn"

    def blocks_for(self, shape: tuple[int, ...]) -> tuple[int, ...]:
        bs = self.block_samples
        if isinstance(bs, int):
            bs = (bs,) * len(shape)
        if len(bs) != len(shape):
            raise ValueError("block_samples dimension does not match the grid")
        for n, b in zip(shape, bs):
            if b < 1 or n % b != 0:
                raise ValueError(f"{n} samples do not split into blocks of {b}")
        return tuple(n // b for n, b in zip(shape, bs))


def enumerate_paths(bank: FilterBank, m: int, policy: str = "full") -> list[Path]:
    """All length-m paths over the bank's index set admitted by the policy.

    "full" yields every combination, (J*L)^m paths.  "frequency_decreasing"
    keeps only strictly increasing scale indices along the path (scales only
    coarsen), the standard cost reduction.
    """
    if m < 0:
        raise ValueError(f"path length must be >= 0, got {m}")
    indices = bank.indices
    if policy == "full":
        return [tuple(p) for p in itertools.product(indices, repeat=m)]
    if policy == "frequency_decreasing":
        by_scale: dict[int, list[FilterIndex]] = {}
        for lam in indices:
            by_scale.setdefault(lam.j, []).append(lam)
        scales = sorted(by_scale)
        paths = []
        for combo in itertools.combinations(scales, m):
            pools = [by_scale[j] for j in combo]
            paths.extend(tuple(p) for p in itertools.product(*pools))
        return paths
    raise ValueError(f"unknown path policy {policy!r}")


def count_paths(J: int, L: int, m: int, policy: str = "full") -> int:
    """Closed-form path count matching :func:`enumerate_paths`."""
    if policy == "full":
        return (J * L) ** m
    if policy == "frequency_decreasing":
        return comb(J, m) * L ** m
    raise ValueError(f"unknown path policy {policy!r}")


def propagate_one(
    f: SignalGrid,
    index: FilterIndex,
    bank: FilterBank,
    spacing_ratio: float = 1.0,
    method: str = "fft",
) -> SignalGrid:
    """One wavelet-modulus step |psi_lambda * f| (real values, stored complex)."""
    psi, _ = bank.realize(f.shape, spacing_ratio)
    if index not in psi:
        raise ValueError(f"filter index {index} is not in the bank")
    out = convolve(f, psi[index], method=method)
    return out.with_values(np.abs(out.values).astype(np.complex128))


def propagate_pooled(
    f: SignalGrid,
    index: FilterIndex,
    bank: FilterBank,
    pool_cfg: PoolConfig,
    spacing_ratio: float = 1.0,
    method: str = "fft",
) -> SignalGrid:
    """Pooled propagator step: max-pooling applied to the wavelet-modulus output."""
    u = propagate_one(f, index, bank, spacing_ratio, method)
    partition = partition_plate(u.plate, pool_cfg.blocks_for(u.shape))
    return max_pool(u, partition, pool_cfg.factor, pool_cfg.admissibility)


def window(
    f: SignalGrid,
    bank: FilterBank,
    spacing_ratio: float = 1.0,
    method: str = "fft",
) -> SignalGrid:
    """Low-pass filtering with phi realized on f's grid at matching physical scale."""
    _, phi = bank.realize(f.shape, spacing_ratio)
    return convolve(f, phi, method=method)


@dataclass(frozen=True)
class ScatteringTree:
    """All propagated nodes and windowed outputs of one cascade evaluation."""

    mode: str
    bank: FilterBank
    max_depth: int
    policy: str
    pool_config: PoolConfig | None
    output_subsample: bool
    conv_method: str
    nodes: dict[Path, SignalGrid]
    outputs: dict[Path, SignalGrid]

    def paths_at(self, depth: int) -> list[Path]:
        return sorted(p for p in self.nodes if len(p) == depth)

    def layer_energy(self, depth: int) -> float:
        from .grid import l2_norm

        return sum(l2_norm(self.nodes[p]) ** 2 for p in self.paths_at(depth))

    def total_output_coefficients(self) -> int:
        return sum(prod(g.shape) for g in self.outputs.values())

    def total_node_samples(self) -> int:
        return sum(prod(g.shape) for g in self.nodes.values())


def compute_tree(
    f: SignalGrid,
    bank: FilterBank,
    mode: str = "plain",
    max_depth: int = 2,
    policy: str = "full",
    pool_cfg: PoolConfig | None = None,
    output_subsample: bool = False,
    conv_method: str = "fft",
) -> ScatteringTree:
    """Breadth-first evaluation of one cascade.

    Modes: "plain" (wavelet-modulus only), "maxp" (pooling after every
    modulus; nodes at depth m live on the plate D/S^m), "naivep" (plain
    cascade, then one truncating 3x3/stride-3 block max on every output).
    """
    if mode not in ("plain", "maxp", "naivep"):
        raise ValueError(f"unknown mode {mode!r}")
    if max_depth < 0:
        raise ValueError(f"max_depth must be >= 0, got {max_depth}")
    if f.shape != bank.grid_shape:
        raise ValueError(f"input shape {f.shape} does not match bank grid {bank.grid_shape}")
    if mode == "maxp" and pool_cfg is None:
        pool_cfg = PoolConfig()

    root_spacing = f.plate.spacing[0]
    nodes: dict[Path, SignalGrid] = {EMPTY_PATH: f}
    frontier: list[Path] = [EMPTY_PATH]
    for depth in range(1, max_depth + 1):
        next_frontier: list[Path] = []
        for parent in frontier:
            g = nodes[parent]
            ratio = g.plate.spacing[0] / root_spacing
            last_scale = parent[-1].j if parent else None
            for lam in bank.indices:
                if policy == "frequency_decreasing" and last_scale is not None:
                    if lam.j <= last_scale:
                        continue
                path = parent + (lam,)
                if mode == "maxp":
                    try:
                        child = propagate_pooled(g, lam, bank, pool_cfg, ratio, conv_method)
                    except ValueError as exc:
                        raise ValueError(f"pooling failed at depth {depth}: {exc}") from exc
                else:
                    child = propagate_one(g, lam, bank, ratio, conv_method)
                nodes[path] = child
                next_frontier.append(path)
        frontier = next_frontier

    outputs: dict[Path, SignalGrid] = {}
    for path, g in nodes.items():
        ratio = g.plate.spacing[0] / root_spacing
        out = window(g, bank, ratio, conv_method)
        if output_subsample and mode in ("plain", "naivep"):
            out = subsample_signal(out, 2 ** bank.J)
        if mode == "naivep":
            out = strided_block_max(out, 3)
        outputs[path] = out
    return ScatteringTree(
        mode, bank, max_depth, policy,
        pool_cfg if mode in ("maxp", "naivep") else None,
        output_subsample, conv_method, nodes, outputs,
    )


def subsample_signal(f: SignalGrid, factor: int) -> SignalGrid:
    """Keep every factor-th sample per axis (plate extent unchanged)."""
    for n in f.plate.samples_per_axis:
        if n % factor != 0:
            raise ValueError(f"{n} samples are not divisible by subsampling factor {factor}")
    sel = tuple(slice(None, None, factor) for _ in range(f.plate.dim))
    plate = Plate(
        f.plate.origin,
        f.plate.side_lengths,
        tuple(n // factor for n in f.plate.samples_per_axis),
    )
    return SignalGrid(plate, f.values[sel])


def strided_block_max(f: SignalGrid, block: int) -> SignalGrid:
    """Block maximum of |f| with stride = block size, truncating remainder samples.

    The surviving extent is scaled by 1/block, mirroring the plate shrinkage of
    the principled pooling operator.
    """
    n_out = tuple(n // block for n in f.plate.samples_per_axis)
    if any(n == 0 for n in n_out):
        raise ValueError(f"grid {f.shape} is smaller than the pooling block {block}")
    crop = tuple(slice(0, n * block) for n in n_out)
    mags = np.abs(f.values[crop])
    shape = []
    for n in n_out:
        shape.extend((n, block))
    maxima = mags.reshape(shape).max(axis=tuple(range(1, 2 * len(n_out), 2)))
    kept = tuple(
        s * (n * block) / total
        for s, n, total in zip(f.plate.side_lengths, n_out, f.plate.samples_per_axis)
    )
    plate = Plate(
        tuple(o / block for o in f.plate.origin),
        tuple(s / block for s in kept),
        n_out,
    )
    return SignalGrid(plate, maxima.astype(np.complex128))


# ---------------------------------------------------------------------------
# Architecture arithmetic
# ---------------------------------------------------------------------------

def dense_head_parameters(
    n_features: int, fc_widths: tuple[int, ...], n_classes: int
) -> int:
    """Weights + biases of the fully-connected head fed by n_features inputs."""
    total = 0
    width_in = n_features
    for width in fc_widths:
        total += width_in * width + width
        width_in = width
    total += width_in * n_classes + n_classes
    return total


def feature_summary(
    tree: ScatteringTree,
    fc_widths: tuple[int, ...] = (512, 512, 256, 256),
    n_classes: int = 102,
) -> dict:
    """Per-layer coefficient counts and the dense-head parameter arithmetic."""
    layers = []
    total = 0
    for m in range(tree.max_depth + 1):
        paths = tree.paths_at(m)
        shape = tree.outputs[paths[0]].shape if paths else ()
        coeffs = sum(prod(tree.outputs[p].shape) for p in paths)
        total += coeffs
        layers.append(
            {"depth": m, "paths": len(paths), "resolution": shape, "coefficients": coeffs}
        )
    return {
        "mode": tree.mode,
        "policy": tree.policy,
        "layers": layers,
        "total_features": total,
        "fc_widths": tuple(fc_widths),
        "n_classes": n_classes,
        "dense_head_parameters": dense_head_parameters(total, tuple(fc_widths), n_classes),
    }


def table_reproduction_report(
    targets: dict[str, int] | None = None,
    input_size: int = 224,
    n_classes: int = 102,
    fc_widths: tuple[int, ...] = (512, 512, 256, 256),
    max_depth: int = 2,
) -> list[dict]:
    """Parameter counts for candidate front-end configurations vs. reported targets.

    The reference experiments leave J and the path policy unstated, so this
    enumerates plausible configurations (J, policy, output handling) for each
    front-end variant and reports which, if any, reproduce the published
    parameter counts exactly.
    """
    if targets is None:
        targets = {"plain": 87_592_038, "maxp": 9_944_166, "naivep": 11_596_902}
    report = []
    for J in (2, 3, 4, 5):
        if input_size % (2 ** J) != 0:
            continue
        base = input_size // 2 ** J
        for policy in ("frequency_decreasing", "full"):
            counts = [count_paths(J, 8, m, policy) for m in range(max_depth + 1)]
            variants = {
                ("plain", "subsampled 2^J"): [base] * (max_depth + 1),
                ("maxp", "pooled then subsampled 2^J"): [
                    input_size // 2 ** m // 2 ** J for m in range(max_depth + 1)
                ],
                ("naivep", "3x3 floor"): [base // 3] * (max_depth + 1),
                ("naivep", "3x3 ceil"): [-(-base // 3)] * (max_depth + 1),
            }
            for (mode, variant), resolutions in variants.items():
                if any(r < 1 for r in resolutions):
                    continue
                features = sum(c * r * r for c, r in zip(counts, resolutions))
                params = dense_head_parameters(features, fc_widths, n_classes)
                report.append(
                    {
                        "mode": mode,
                        "variant": variant,
                        "J": J,
                        "L": 8,
                        "policy": policy,
                        "layer_resolutions": tuple(resolutions),
                        "total_features": features,
                        "parameters": params,
                        "target": targets.get(mode),
                        "matches_target": params == targets.get(mode),
                    }
                )
    return report
