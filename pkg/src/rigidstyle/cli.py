"""Command-line interface.

Images are padded by reflection to a multiple of 16 before encoding and
cropped back after decoding. The default codec seed can be overridden by
the RIGIDSTYLE_SEED environment variable or the --seed flag.

Exit codes: 0 success, 1 malformed arguments, 2 I/O or format errors,
3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import align, metrics, pipeline
from .align import DegenerateAlignmentError, Mask, ScaleVariant
from .codec import DEFAULT_SEED, get_codec
from .features import AxisConfig, DimensionError, FeatureMap
from .formats import FormatError, read_ft1, read_ft1_header, read_image, write_ft1, write_png

PAD_MULTIPLE = 16


class _CliArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliArgError(message)


def pad_to_multiple(image: np.ndarray, multiple: int = PAD_MULTIPLE):
    """Reflect-pad an (H, W, 3) image to the next multiple; returns (padded, (H, W))."""
    h, w = image.shape[:2]
    ph = (-h) % multiple
    pw = (-w) % multiple
    if ph or pw:
        mode = "reflect" if min(h, w) > 1 else "symmetric"
        image = np.pad(image, ((0, ph), (0, pw), (0, 0)), mode=mode)
    return image, (h, w)


def _is_ft1(path):
    return str(path).lower().endswith(".ft1")


def _load_feature(path) -> FeatureMap:
    arr = read_ft1(path)
    if arr.ndim != 3:
        raise FormatError(f"{path}: expected a 3-d (C,H,W) feature tensor, got ndim={arr.ndim}")
    return FeatureMap(arr.astype(np.float64))


def _load_mask(path) -> Mask:
    img = read_image(path)
    return Mask((img[:, :, 0] >= 0.5).astype(np.float64))


def _config_from_args(args) -> pipeline.PipelineConfig:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("RIGIDSTYLE_SEED", DEFAULT_SEED))
    levels = tuple(int(x) for x in args.levels.split(","))
    ra_levels = frozenset(int(x) for x in args.ra_levels.split(",")) if args.ra_levels else frozenset()
    return pipeline.PipelineConfig(
        levels=levels,
        ra_levels=ra_levels,
        alpha=args.alpha,
        scale_variant=ScaleVariant(args.scale_variant),
        axis_config=AxisConfig.PIXELS_AS_POINTS if args.axis == "hwc" else AxisConfig.CHANNELS_AS_POINTS,
        eps=args.eps,
        tau=args.tau,
        seed=seed,
    )


def _stylize_image(content_path, styles_builder, out_path, cfg):
    content = read_image(content_path)
    padded, (h, w) = pad_to_multiple(content)
    result = pipeline.stylize(padded, styles_builder(padded.shape), cfg)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    write_png(out_path, result.image.data[:h, :w])


def _single_style(path):
    style = read_image(path)

    def build(_shape):
        return pipeline.StyleSpec.single(style)

    return build


def _cmd_stylize(args):
    cfg = _config_from_args(args)
    if _is_ft1(args.content) or _is_ft1(args.style):
        if not (_is_ft1(args.content) and _is_ft1(args.style)):
            raise _CliArgError("content and style must both be FT1 files or both be images")
        z_c = _load_feature(args.content)
        z_s = _load_feature(args.style)
        out = pipeline.transform_features(z_c, z_s, cfg)
        write_ft1(args.output, out.data)
        return 0
    _stylize_image(args.content, _single_style(args.style), args.output, cfg)
    return 0


def _cmd_video(args):
    cfg = _config_from_args(args)
    style = read_image(args.style)
    os.makedirs(args.outdir, exist_ok=True)
    frames = [read_image(p) for p in args.frames]
    padded_frames = []
    orig = None
    for frame in frames:
        p, orig = pad_to_multiple(frame)
        padded_frames.append(p)
    results = pipeline.stylize_video(padded_frames, pipeline.StyleSpec.single(style), cfg)
    h, w = orig
    for i, res in enumerate(results):
        for warning in res.warnings:
            print(f"warning: frame {i}: {warning}", file=sys.stderr)
        write_png(os.path.join(args.outdir, f"frame_{i:04d}.png"), res.image.data[:h, :w])
    return 0


def _cmd_sweep_alpha(args):
    os.makedirs(args.outdir, exist_ok=True)
    for i in range(11):
        alpha = round(0.1 * i, 1)
        sub = argparse.Namespace(**{**vars(args), "alpha": alpha})
        cfg = _config_from_args(sub)
        _stylize_image(args.content, _single_style(args.style),
                       os.path.join(args.outdir, f"alpha_{i:02d}.png"), cfg)
    return 0


def _cmd_interpolate(args):
    cfg = _config_from_args(args)
    style_1 = read_image(args.style1)
    style_2 = read_image(args.style2)

    def build_styles(beta):
        def build(_shape):
            return pipeline.StyleSpec((
                pipeline.StyleEntry(style_1, beta),
                pipeline.StyleEntry(style_2, 1.0 - beta),
            ))
        return build

    if args.beta is not None:
        if args.output is None:
            raise _CliArgError("--beta requires -o/--output")
        _stylize_image(args.content, build_styles(args.beta), args.output, cfg)
        return 0
    if args.outdir is None:
        raise _CliArgError("provide --outdir for a beta sweep, or --beta with -o")
    os.makedirs(args.outdir, exist_ok=True)
    for i in range(11):
        beta = round(0.1 * i, 1)
        _stylize_image(args.content, build_styles(beta),
                       os.path.join(args.outdir, f"beta_{i:02d}.png"), cfg)
    return 0


def _cmd_mask(args):
    cfg = _config_from_args(args)
    regions = [( _load_mask(mask_path), read_image(style_path))
               for mask_path, style_path in args.region]
    fallback = read_image(args.fallback) if args.fallback else None

    def build(shape):
        h, w = shape[:2]
        entries = [
            pipeline.StyleEntry(style, 1.0, Mask(mask.resampled(h, w)))
            for mask, style in regions
        ]
        if fallback is not None:
            entries.append(pipeline.StyleEntry(fallback, 1.0))
        return pipeline.StyleSpec(tuple(entries))

    _stylize_image(args.content, build, args.output, cfg)
    return 0


def _feature_for_metrics(path, cfg):
    if _is_ft1(path):
        return _load_feature(path)
    img, _ = pad_to_multiple(read_image(path))
    return get_codec(cfg.seed).encode(img, cfg.levels[0])


def _cmd_metrics(args):
    cfg = _config_from_args(args)
    z_c = _feature_for_metrics(args.content, cfg)
    z_s = _feature_for_metrics(args.style, cfg)
    z = _feature_for_metrics(args.styled, cfg)
    print(f"content_loss={metrics.content_loss(z_c, z):.9g}")
    print(f"style_loss={metrics.style_loss(z_s, z):.9g}")
    return 0


def _cmd_bench(args):
    cfg = _config_from_args(args)
    rng = np.random.default_rng(cfg.seed)
    if args.op == "transform":
        z_c = FeatureMap(rng.standard_normal((args.channels, args.height, args.width)))
        z_s = FeatureMap(rng.standard_normal((args.channels, args.height, args.width)))
        report = metrics.bench(
            "transform_features",
            lambda: pipeline.transform_features(z_c, z_s, cfg),
            {"C": args.channels, "H": args.height, "W": args.width},
            repetitions=args.reps,
        )
    else:
        m = 2 ** cfg.levels[0]
        h = args.height - args.height % -m if args.height % m else args.height
        w = args.width - args.width % -m if args.width % m else args.width
        content = rng.random((h, w, 3))
        style = rng.random((h, w, 3))
        spec = pipeline.StyleSpec.single(style)
        report = metrics.bench(
            "stylize",
            lambda: pipeline.stylize(content, spec, cfg),
            {"H": h, "W": w},
            repetitions=args.reps,
        )
    print(report.to_text())
    print(report.to_kv_lines())
    return 0


def _cmd_ft_dump(args):
    with open(args.file, "rb") as fh:
        blob = fh.read()
    dims, offset = read_ft1_header(blob)
    count = int(np.prod(dims, dtype=np.int64)) if dims else 1
    if len(blob) - offset != 4 * count:
        raise FormatError(f"payload length {len(blob) - offset} != expected {4 * count}")
    print(f"file={args.file}")
    print(f"dtype=float32")
    print(f"ndim={len(dims)}")
    print(f"dims={'x'.join(str(d) for d in dims)}")
    print(f"count={count}")
    return 0


def _add_common(p):
    p.add_argument("--alpha", type=float, default=0.0, help="content/style trade-off in [0,1]")
    p.add_argument("--levels", default="4,3,2,1", help="descending codec levels, e.g. 4,3,2,1")
    p.add_argument("--ra-levels", default="4", help="levels where rigid alignment runs")
    p.add_argument("--scale-variant", choices=["centered", "literal"], default="centered",
                   help="Frobenius norm used for cloud normalization")
    p.add_argument("--axis", choices=["chw", "hwc"], default="chw",
                   help="point-cloud configuration (hwc = pixels-as-points ablation)")
    p.add_argument("--eps", type=float, default=align.DEFAULT_EPS,
                   help="channel std floor for moment matching")
    p.add_argument("--tau", type=float, default=align.DEFAULT_TAU,
                   help="relative rank tolerance for the alignment SVD")
    p.add_argument("--seed", type=int, default=None,
                   help="codec seed (default: RIGIDSTYLE_SEED env var or built-in)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rigidstyle", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stylize", help="stylize one image (or FT1 feature pair)")
    p.add_argument("content")
    p.add_argument("style")
    p.add_argument("-o", "--output", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_stylize)

    p = sub.add_parser("video", help="per-frame stylization of an image sequence")
    p.add_argument("frames", nargs="+")
    p.add_argument("--style", required=True)
    p.add_argument("--outdir", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_video)

    p = sub.add_parser("sweep-alpha", help="emit a strip over alpha = 0, 0.1, ..., 1")
    p.add_argument("content")
    p.add_argument("style")
    p.add_argument("--outdir", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep_alpha)

    p = sub.add_parser("interpolate", help="interpolate between two styles over beta")
    p.add_argument("content")
    p.add_argument("style1")
    p.add_argument("style2")
    p.add_argument("--outdir")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("-o", "--output")
    _add_common(p)
    p.set_defaults(func=_cmd_interpolate)

    p = sub.add_parser("mask", help="apply different styles to masked regions")
    p.add_argument("content")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--region", nargs=2, metavar=("MASK", "STYLE"), action="append",
                   required=True, help="binary mask image and its style image")
    p.add_argument("--fallback", help="style image for uncovered regions (default: keep content)")
    _add_common(p)
    p.set_defaults(func=_cmd_mask)

    p = sub.add_parser("metrics", help="print content and style loss")
    p.add_argument("--content", required=True, help="content features (.ft1) or image")
    p.add_argument("--style", required=True, help="style features (.ft1) or image")
    p.add_argument("--styled", required=True, help="styled features (.ft1) or image")
    _add_common(p)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("bench", help="time the feature transform or the full pipeline")
    p.add_argument("--op", choices=["transform", "stylize"], default="transform")
    p.add_argument("--channels", type=int, default=512)
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--reps", type=int, default=5)
    _add_common(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("ft-dump", help="print the header of an FT1 tensor file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_ft_dump)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _CliArgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _CliArgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DegenerateAlignmentError as exc:
        print(f"error: numerical degeneracy: {exc}", file=sys.stderr)
        return 3
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DimensionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
