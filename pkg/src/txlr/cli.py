"""Command-line entry points.

Subcommands: ``generate`` (synthetic dataset), ``mask`` (sampling pattern),
``recon`` (single reconstruction), ``sweep`` (full experiment from a config
file), ``spectrum`` (singular spectra CSV), ``maps`` (relative transmit
maps).  Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

import argparse
import csv
import os
import sys

import numpy as np

from . import metrics, sampling
from .experiment import ExperimentConfig, run_experiment
from .kten import read_kten, write_kten
from .phantom import crop_kspace, generate_phantom, generate_sensitivities, simulate_kspace
from .sampling import NoiseModel, SamplingMask
from .solver import SolverConfig, admm_reconstruct


def _parse_pair(text, sep="x"):
    try:
        a, b = text.lower().split(sep)
        return int(a), int(b)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected AxB, got {text!r}") from err


def _parse_ranks(text):
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected R1[,R2], got {text!r}") from err
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError("expected one or two rank values")
    return parts[0] if len(parts) == 1 else parts


def _parse_floats(text):
    return tuple(float(p) for p in text.split(","))


def _mask_from_file(path):
    tensor, meta = read_kten(path)
    bits = np.abs(tensor) > 0.5
    bits = bits[:, :, 0, :]  # stored as (kx, ky, 1, ntx)
    if bits.shape[2] == 1:
        bits = bits[:, :, 0]
    return SamplingMask(
        bits=bits,
        R_target=float(meta.get("R_target", 0) or bits.size / bits.sum()),
        R_achieved=float(meta.get("R_achieved", bits.size / bits.sum())),
        seed=int(meta.get("seed", 0)),
        radius=float(meta.get("radius", 0.0)),
    )


def _cmd_generate(args):
    os.makedirs(args.out, exist_ok=True)
    nx, ny = args.dims
    for s in range(args.slices):
        phantom = generate_phantom(args.dims, args.kind, seed=args.seed + 1000 * s)
        sens = generate_sensitivities(
            args.dims, args.rx, args.tx, args.order, seed=args.seed + 1000 * s + 1
        )
        d = simulate_kspace(phantom, sens)
        if args.crop is not None:
            d = crop_kspace(d, args.crop)
        path = os.path.join(args.out, f"slice{s:03d}.kten")
        write_kten(
            d,
            path,
            meta={
                "slice": s,
                "dims": [nx, ny],
                "crop": list(args.crop) if args.crop else None,
                "rx": args.rx,
                "tx": args.tx,
                "order": args.order,
                "kind": args.kind,
                "seed": args.seed,
            },
        )
        print(path)
    return 0


def _cmd_mask(args):
    mask = sampling.mask_variants_per_tx(
        args.dims,
        args.R,
        args.tx,
        seed=args.seed,
        include_dc=not args.no_dc,
        shared=args.shared,
    )
    bits = mask.bits if mask.bits.ndim == 3 else mask.bits[:, :, None]
    tensor = bits[:, :, None, :].astype(np.complex64)
    write_kten(
        tensor,
        args.out,
        dtype="c64",
        meta={
            "R_target": mask.R_target,
            "R_achieved": mask.R_achieved,
            "seed": mask.seed,
            "radius": mask.radius,
            "shared": args.shared,
            "include_dc": not args.no_dc,
        },
    )
    print(f"{args.out}: R_achieved={mask.R_achieved:.4g}")
    return 0


def _cmd_recon(args):
    data, data_meta = read_kten(args.infile)
    mask = _mask_from_file(args.mask)
    noise = NoiseModel(sigma=np.asarray(args.sigma)) if args.sigma else None
    cfg = SolverConfig(
        method=args.method,
        kernel=args.kernel,
        ranks=args.rank,
        max_iters=args.iters or 0,
        stopping={"fixed": "fixed", "chisq": "chisq"}[args.stop],
        rho0=args.rho0,
        tau=args.tau,
        alpha=args.alpha,
    )
    truth = read_kten(args.truth)[0] if args.truth else None
    report = admm_reconstruct(data, mask, cfg, noise=noise, truth=truth)
    meta = {
        "method": cfg.method,
        "kernel": list(cfg.kernel),
        "ranks": list(cfg.ranks),
        "iters": cfg.max_iters,
        "stop": args.stop,
        "iterations_used": report.iterations_used,
        "stop_reason": report.stop_reason,
        "source": os.path.basename(args.infile),
        "mask": os.path.basename(args.mask),
        "input_meta": data_meta,
    }
    if truth is not None:
        meta["rmse"] = metrics.rmse(report.z_final, truth)
    write_kten(report.z_final, args.out, meta=meta)
    if args.trace_out:
        with open(args.trace_out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "chi", "rmse", "resid"])
            for i, resid in enumerate(report.resid_trace):
                writer.writerow(
                    [
                        i + 1,
                        report.chi_trace[i] if report.chi_trace else "",
                        report.rmse_trace[i] if report.rmse_trace else "",
                        resid,
                    ]
                )
    msg = f"{args.out}: {report.iterations_used} iterations ({report.stop_reason})"
    if truth is not None:
        msg += f", rmse={meta['rmse']:.4g}"
    print(msg)
    return 0


def _cmd_sweep(args):
    overrides = {
        "out_dir": args.out_dir,
        "workers": args.workers,
        "seed": args.seed,
    }
    cfg = ExperimentConfig.from_file(args.config, **overrides)
    path = run_experiment(cfg)
    print(path)
    return 0


def _cmd_spectrum(args):
    rows = []
    dims = channels = None
    for path in args.infiles:
        tensor, _ = read_kten(path)
        dims, channels = tensor.shape[:2], tensor.shape[2:]
        for label in args.unfolding:
            spec = metrics.singular_spectrum(tensor, args.kernel, label)
            rows += [
                (os.path.basename(path), label, "data", i, v)
                for i, v in enumerate(spec.values)
            ]
    for k in range(args.random_baseline):
        for label in args.unfolding:
            spec = metrics.random_spectrum(dims, channels, args.kernel, label, seed=k)
            rows += [
                (f"random{k:02d}", label, "random", i, v)
                for i, v in enumerate(spec.values)
            ]
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "unfolding", "family", "index", "value"])
        for row in rows:
            writer.writerow([row[0], row[1], row[2], row[3], f"{row[4]:.10g}"])
    print(args.out)
    return 0


def _cmd_maps(args):
    tensor, _ = read_kten(args.infile)
    maps = metrics.relative_tx_maps(tensor, threshold=args.threshold)
    out = maps.maps[:, :, None, :].astype(np.complex128)
    write_kten(
        out,
        args.out,
        meta={
            "threshold": args.threshold,
            "support_pixels": int(maps.support.sum()),
            "source": os.path.basename(args.infile),
        },
    )
    print(f"{args.out}: {int(maps.support.sum())} support pixels")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="txlr",
        description="Joint transmit/receive low-rank completion of undersampled k-space",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic multi-slice dataset")
    p.add_argument("--dims", type=_parse_pair, default=(48, 48))
    p.add_argument("--crop", type=_parse_pair, default=None)
    p.add_argument("--slices", type=int, default=1)
    p.add_argument("--rx", type=int, default=8)
    p.add_argument("--tx", type=int, default=8)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--kind", choices=["disc", "shepp_like", "body_ellipses"],
                   default="body_ellipses")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("mask", help="emit a Poisson-disc sampling mask")
    p.add_argument("--dims", type=_parse_pair, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--tx", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shared", action="store_true",
                   help="one pattern shared across transmit modes")
    p.add_argument("--no-dc", action="store_true",
                   help="do not force the k-space center into the mask")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mask)

    p = sub.add_parser("recon", help="reconstruct one undersampled tensor")
    p.add_argument("--method", choices=["vc", "primo", "txlr"], required=True)
    p.add_argument("--kernel", type=_parse_pair, default=(5, 5))
    p.add_argument("--rank", type=_parse_ranks, default=50,
                   help="R1 or R1,R2 rank thresholds")
    p.add_argument("--iters", type=int, default=None,
                   help="iteration cap (default: 50 for txlr, 100 otherwise)")
    p.add_argument("--stop", choices=["fixed", "chisq"], default="fixed")
    p.add_argument("--rho0", type=float, default=1e-6)
    p.add_argument("--tau", type=float, default=1.1)
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--sigma", type=_parse_floats, default=None,
                   help="per-channel noise std for the chi-square statistic")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--truth", default=None)
    p.add_argument("--trace-out", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_recon)

    p = sub.add_parser("sweep", help="run an experiment sweep from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("spectrum", help="emit singular spectra as CSV")
    p.add_argument("--in", dest="infiles", nargs="+", required=True)
    p.add_argument("--kernel", type=_parse_pair, default=(5, 5))
    p.add_argument("--unfolding", type=lambda s: s.lower().split(","),
                   default=["tc", "rc"])
    p.add_argument("--random-baseline", type=int, default=0,
                   help="number of random-tensor baseline spectra to add")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("maps", help="relative transmit maps from a completed tensor")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_maps)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as err:  # noqa: BLE001 - single CLI error boundary
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
