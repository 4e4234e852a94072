"""Command-line entry point: filterbank export, feature extraction, verification, benchmarks.

Every command is deterministic given (config, seed, input files); the
effective configuration is echoed into every manifest so a result set is
reproducible from its own outputs.  Exit codes: 0 pass, 1 failure, 2 usage
error, 3 inconclusive.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path as FsPath

import numpy as np

from .filterbank import MorletParams, build_morlet_bank, build_partition_bank, frame_defect, theorem_constant_B
from .grid import SignalGrid, read_pgm, read_sgrid, unit_plate, write_sgrid
from .pooling import AdmissibilityWarning
from .scattering import PoolConfig, compute_tree, feature_summary, table_reproduction_report
from .verify import VerifyConfig, default_suites

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


@dataclass
class RunConfig:
    """Flat configuration shared by all subcommands; every field has a default."""

    j: int = 2
    l: int = 2
    grid: tuple[int, ...] = (64, 64)
    sigma0: float = 0.8
    xi0: float = 3.0 * math.pi / 4.0
    slant: float | None = None
    equalize: bool = True
    bank_kind: str = "morlet"
    mode: str = "plain"
    depth: int = 2
    policy: str = "full"
    pool_blocks: int = 2
    pool_factor: float = 2.0
    strict_pooling: bool = False
    subsample_outputs: bool = False
    format: str = "sgrid-manifest"
    out: str = "scatmaxp-out"
    seed: int = 0
    suites: str = "contraction,commutation,energy,decay,equivariance"
    verify_depth: int = 3
    trials_contraction: int = 1000
    trials_commutation: int = 200
    trials_equivariance: int = 50
    energy_inputs: int = 10
    decay_inputs: int = 5
    bench_batch: int = 4
    bench_modes: str = "plain,maxp,naivep"
    n_classes: int = 102

    def effective(self) -> dict:
        d = asdict(self)
        d["grid"] = list(self.grid)
        return d

    def make_bank(self, shape: tuple[int, ...]):
        if self.bank_kind == "partition":
            return build_partition_bank(self.j, self.l, shape)
        params = MorletParams(self.sigma0, self.xi0, self.slant)
        return build_morlet_bank(self.j, self.l, shape, params, equalize=self.equalize)

    def pool_config(self) -> PoolConfig:
        return PoolConfig(self.pool_blocks, self.pool_factor,
                          "strict" if self.strict_pooling else "warn")


def _coerce(name: str, kind: str, raw: str):
    raw = raw.strip()
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "optfloat":
        return None if raw.lower() in ("none", "") else float(raw)
    if kind == "bool":
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"config key {name}: expected a boolean, got {raw!r}")
    if kind == "grid":
        parts = raw.lower().split("x")
        return tuple(int(p) for p in parts) if len(parts) > 1 else (int(raw), int(raw))
    return raw


_FIELD_KINDS = {
    "j": "int", "l": "int", "grid": "grid", "sigma0": "float", "xi0": "float",
    "slant": "optfloat", "equalize": "bool", "bank_kind": "str", "mode": "str",
    "depth": "int", "policy": "str", "pool_blocks": "int", "pool_factor": "float",
    "strict_pooling": "bool", "subsample_outputs": "bool", "format": "str",
    "out": "str", "seed": "int", "suites": "str", "verify_depth": "int",
    "trials_contraction": "int",
    "trials_commutation": "int", "trials_equivariance": "int", "energy_inputs": "int",
    "decay_inputs": "int", "bench_batch": "int", "bench_modes": "str", "n_classes": "int",
}


def load_config(path: str | None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    known = {f.name for f in fields(RunConfig)}
    updates = {}
    try:
        text = FsPath(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        updates[key] = _coerce(key, _FIELD_KINDS[key], value)
    return replace(cfg, **updates)


def apply_flags(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    mapping = {
        "j": "j", "l": "l", "grid": "grid", "sigma0": "sigma0", "xi0": "xi0",
        "slant": "slant", "bank_kind": "bank_kind", "mode": "mode", "depth": "depth",
        "policy": "policy", "pool_blocks": "pool_blocks", "pool_factor": "pool_factor",
        "format": "format", "out": "out", "seed": "seed", "suites": "suites",
        "trials_contraction": "trials_contraction", "trials_commutation": "trials_commutation",
        "trials_equivariance": "trials_equivariance", "energy_inputs": "energy_inputs",
        "decay_inputs": "decay_inputs", "verify_depth": "verify_depth",
        "batch": "bench_batch", "modes": "bench_modes",
        "n_classes": "n_classes",
    }
    updates = {}
    for arg_name, field_name in mapping.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            if field_name == "grid":
                value = _coerce("grid", "grid", value)
            updates[field_name] = value
    if getattr(args, "strict_pooling", False):
        updates["strict_pooling"] = True
    if getattr(args, "subsample_outputs", False):
        updates["subsample_outputs"] = True
    if getattr(args, "raw_bank", False):
        updates["equalize"] = False
    return replace(cfg, **updates)


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("SCATMAXP_THREADS", "1")))
    except ValueError:
        return 1


def _write_json(path: FsPath, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_filterbank(cfg: RunConfig) -> int:
    out = FsPath(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    bank = cfg.make_bank(cfg.grid)
    plate = unit_plate(cfg.grid)
    files = {}
    for index in bank.indices:
        name = f"psi_j{index.j}_r{index.r}.sgrid"
        write_sgrid(SignalGrid(plate, bank.psi_hat[index].astype(np.complex128)), out / name)
        files[f"psi_j{index.j}_r{index.r}"] = name
    write_sgrid(SignalGrid(plate, bank.phi_hat.astype(np.complex128)), out / "phi.sgrid")
    files["phi"] = "phi.sgrid"
    manifest = {
        "kind": bank.kind,
        "J": bank.J,
        "L": bank.L,
        "grid": list(cfg.grid),
        "morlet_params": {
            "sigma0": bank.morlet_params.sigma0,
            "xi0": bank.morlet_params.xi0,
            "slant": bank.morlet_params.slant,
        },
        "equalized": bank.equalized,
        "frame_defect": frame_defect(bank),
        "theorem_constant_B": theorem_constant_B(bank),
        "files": files,
        "config": cfg.effective(),
    }
    _write_json(out / "manifest.json", manifest)
    print(f"wrote {len(files)} filters + manifest to {out}")
    print(f"frame defect eps_LP = {manifest['frame_defect']:.6g}, B = {manifest['theorem_constant_B']:.6g}")
    return EXIT_PASS


def _read_input(path: str) -> SignalGrid:
    suffix = FsPath(path).suffix.lower()
    try:
        if suffix == ".pgm":
            return read_pgm(path)
        if suffix == ".sgrid":
            return read_sgrid(path)
    except OSError as exc:
        raise ValueError(f"cannot read input {path}: {exc}") from exc
    raise ValueError(f"unsupported input format {path!r} (expected .pgm or .sgrid)")


def _scatter_one(cfg: RunConfig, input_path: str) -> str:
    f = _read_input(input_path)
    bank = cfg.make_bank(f.shape)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AdmissibilityWarning)
        tree = compute_tree(
            f, bank, mode=cfg.mode, max_depth=cfg.depth, policy=cfg.policy,
            pool_cfg=cfg.pool_config(), output_subsample=cfg.subsample_outputs,
        )
    admissibility_flags = sum(
        issubclass(w.category, AdmissibilityWarning) for w in caught
    )
    summary = feature_summary(tree, n_classes=cfg.n_classes)
    out = FsPath(cfg.out) / FsPath(input_path).stem
    out.mkdir(parents=True, exist_ok=True)
    paths = sorted(tree.outputs)
    path_meta = []
    if cfg.format == "sgrid-manifest":
        for i, p in enumerate(paths):
            name = f"coef_{i:04d}.sgrid"
            write_sgrid(tree.outputs[p], out / name)
            g = tree.outputs[p].plate
            path_meta.append({
                "id": i, "path": [[lam.j, lam.r] for lam in p], "file": name,
                "plate": {"origin": list(g.origin), "side_lengths": list(g.side_lengths),
                          "samples": list(g.samples_per_axis)},
            })
    elif cfg.format == "csv":
        lines = ["path_id,sample_index,re,im"]
        for i, p in enumerate(paths):
            flat = tree.outputs[p].values.ravel()
            lines.extend(
                f"{i},{k},{v.real:.17g},{v.imag:.17g}" for k, v in enumerate(flat)
            )
            path_meta.append({"id": i, "path": [[lam.j, lam.r] for lam in p],
                              "samples": list(tree.outputs[p].plate.samples_per_axis)})
        (out / "coefficients.csv").write_text("\n".join(lines) + "\n")
    else:
        raise ValueError(f"unknown output format {cfg.format!r}")
    _write_json(out / "manifest.json", {
        "input": str(input_path),
        "mode": cfg.mode,
        "policy": cfg.policy,
        "max_depth": cfg.depth,
        "output_subsample": cfg.subsample_outputs,
        "admissibility_flags": admissibility_flags,
        "paths": path_meta,
        "feature_summary": summary,
        "config": cfg.effective(),
    })
    return f"{input_path}: {len(paths)} coefficient maps, {summary['total_features']} features -> {out}"


def cmd_scatter(cfg: RunConfig, inputs: list[str]) -> int:
    workers = min(_max_workers(), len(inputs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            messages = list(pool.map(lambda p: _scatter_one(cfg, p), inputs))
    else:
        messages = [_scatter_one(cfg, p) for p in inputs]
    for message in messages:
        print(message)
    return EXIT_PASS


def cmd_verify(cfg: RunConfig) -> int:
    vconfig = VerifyConfig(
        seed=cfg.seed, grid=cfg.grid, J=cfg.j, L=cfg.l, bank_kind=cfg.bank_kind,
        equalize=cfg.equalize, block_samples=cfg.pool_blocks, pool_factor=cfg.pool_factor,
        allowed_factors=(cfg.pool_factor,), max_depth=cfg.verify_depth,
        strict_pooling=cfg.strict_pooling,
    )
    trials = {
        "contraction": cfg.trials_contraction,
        "commutation": cfg.trials_commutation,
        "equivariance": cfg.trials_equivariance,
        "energy": cfg.energy_inputs,
        "decay": cfg.decay_inputs,
    }
    available = default_suites(vconfig, trials)
    selected = [s.strip() for s in cfg.suites.split(",") if s.strip()]
    unknown = [s for s in selected if s not in available]
    if unknown:
        raise ValueError(f"unknown suites {unknown}; available: {sorted(available)}")
    out = FsPath(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    verdicts = []
    for name in selected:
        try:
            report = available[name]()
        except ValueError as exc:
            lines.append(f"[FAIL        ] {name}: precondition violated: {exc}")
            verdicts.append("fail")
            continue
        (out / f"{name}.csv").write_text(report.to_csv())
        lines.append(report.summary_line())
        verdicts.append(report.verdict)
    text = "\n".join(lines)
    echo = "\n".join(f"# config {k}={v}" for k, v in sorted(cfg.effective().items()))
    (out / "summary.txt").write_text(text + "\n" + echo + "\n")
    print(text)
    if any(v == "fail" for v in verdicts):
        return EXIT_FAIL
    if verdicts and all(v == "inconclusive" for v in verdicts):
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def cmd_bench(cfg: RunConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    plate = unit_plate(cfg.grid, centered=True)
    batch = [SignalGrid(plate, rng.random(cfg.grid)) for _ in range(cfg.bench_batch)]
    bank = cfg.make_bank(cfg.grid)
    modes = [m.strip() for m in cfg.bench_modes.split(",") if m.strip()]
    results = {}
    workers = min(_max_workers(), len(batch))
    for mode in modes:
        run = lambda f: compute_tree(  # noqa: E731
            f, bank, mode=mode, max_depth=cfg.depth, policy=cfg.policy,
            pool_cfg=cfg.pool_config(),
        )
        start = time.perf_counter()
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                trees = list(pool.map(run, batch))
        else:
            trees = [run(f) for f in batch]
        elapsed = time.perf_counter() - start
        tree = trees[0]
        per_layer = {
            m: sum(int(np.prod(tree.nodes[p].shape)) for p in tree.paths_at(m))
            for m in range(cfg.depth + 1)
        }
        results[mode] = {
            "signals_per_second": len(batch) / elapsed if elapsed > 0 else float("inf"),
            "seconds_total": elapsed,
            "propagated_samples_per_signal": tree.total_node_samples(),
            "per_layer_samples": per_layer,
            "output_coefficients": tree.total_output_coefficients(),
        }
        print(
            f"{mode:7s} {results[mode]['signals_per_second']:8.2f} signals/s, "
            f"{results[mode]['propagated_samples_per_signal']} propagated samples/signal"
        )
    status = EXIT_PASS
    if "plain" in results and "maxp" in results:
        plain_n = results["plain"]["propagated_samples_per_signal"]
        maxp_n = results["maxp"]["propagated_samples_per_signal"]
        ok = maxp_n < plain_n or cfg.depth == 0
        print(f"maxp propagates {maxp_n} < plain {plain_n}: {'ok' if ok else 'VIOLATED'}")
        if not ok:
            status = EXIT_FAIL
    table = table_reproduction_report(n_classes=cfg.n_classes)
    matches = [row for row in table if row["matches_target"]]
    print(f"dense-head parameter search: {len(matches)} exact match(es) of reported counts")
    for row in matches:
        print(
            f"  {row['mode']} ({row['variant']}, J={row['J']}, {row['policy']}): "
            f"{row['parameters']:,} parameters"
        )
    out = FsPath(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "bench.json", {
        "results": results,
        "parameter_search": table,
        "config": cfg.effective(),
    })
    return status


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scatmaxp",
        description="Windowed scattering transform with continuous max-pooling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_bank: bool = True):
        p.add_argument("--config", help="plain-text key=value config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="random seed")
        if with_bank:
            p.add_argument("-J", dest="j", type=int, help="scaling level")
            p.add_argument("-L", dest="l", type=int, help="rotation count")
            p.add_argument("--grid", help="grid samples, N or N0xN1")
            p.add_argument("--bank-kind", dest="bank_kind", choices=["morlet", "partition"])
            p.add_argument("--raw-bank", action="store_true",
                           help="skip the Littlewood-Paley equalization step")

    p = sub.add_parser("filterbank", help="export filters and frame diagnostics")
    common(p)
    p.add_argument("--sigma0", type=float)
    p.add_argument("--xi0", type=float)
    p.add_argument("--slant", type=float)

    p = sub.add_parser("scatter", help="extract scattering coefficients from images")
    common(p)
    p.add_argument("inputs", nargs="+", metavar="INPUT", help=".pgm or .sgrid files")
    p.add_argument("--mode", choices=["plain", "maxp", "naivep"])
    p.add_argument("--depth", type=int)
    p.add_argument("--policy", choices=["full", "frequency_decreasing"])
    p.add_argument("--pool-blocks", dest="pool_blocks", type=int,
                   help="samples per pooling sub-plate per axis (default 2)")
    p.add_argument("--pool-factor", dest="pool_factor", type=float,
                   help="plate shrink factor S (default 2)")
    p.add_argument("--strict-pooling", dest="strict_pooling", action="store_true")
    p.add_argument("--subsample-outputs", dest="subsample_outputs", action="store_true")
    p.add_argument("--format", choices=["sgrid-manifest", "csv"])
    p.add_argument("--n-classes", dest="n_classes", type=int)

    p = sub.add_parser("verify", help="run the numerical certification suites")
    common(p)
    p.add_argument("--suites", help="comma list: contraction,commutation,energy,decay,equivariance")
    p.add_argument("--depth", dest="verify_depth", type=int)
    p.add_argument("--pool-factor", dest="pool_factor", type=float)
    p.add_argument("--strict-pooling", dest="strict_pooling", action="store_true")
    p.add_argument("--trials-contraction", dest="trials_contraction", type=int)
    p.add_argument("--trials-commutation", dest="trials_commutation", type=int)
    p.add_argument("--trials-equivariance", dest="trials_equivariance", type=int)
    p.add_argument("--energy-inputs", dest="energy_inputs", type=int)
    p.add_argument("--decay-inputs", dest="decay_inputs", type=int)

    p = sub.add_parser("bench", help="feature-extraction throughput and size accounting")
    common(p)
    p.add_argument("--modes", help="comma list of cascade modes")
    p.add_argument("--batch", type=int, help="synthetic batch size")
    p.add_argument("--depth", type=int)
    p.add_argument("--policy", choices=["full", "frequency_decreasing"])
    p.add_argument("--n-classes", dest="n_classes", type=int)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = apply_flags(load_config(args.config), args)
        if args.command == "filterbank":
            return cmd_filterbank(cfg)
        if args.command == "scatter":
            return cmd_scatter(cfg, args.inputs)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "bench":
            return cmd_bench(cfg)
        parser.error(f"unknown command {args.command!r}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
