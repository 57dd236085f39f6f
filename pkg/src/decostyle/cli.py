"""Command-line frontend: transfer, optics, LUT application, batch, serve.

Exit codes: 0 success, 1 processing error (message names the failing stage
and channel), 2 usage error.
"""

from __future__ import annotations

import argparse
import glob as globmod
import json
import sys
from pathlib import Path

from . import lut as lut_mod
from . import pipeline
from .errors import DecostyleError
from .imgio import CropRect, format_for_path, load_image, save_image
from .spectral import write_kernel_text


def _crop(text):
    try:
        return CropRect.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decostyle",
        description="Photorealistic style transfer via decoupled statistics")
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("transfer", help="match a target's style onto a source")
    tr.add_argument("--src", required=True)
    tr.add_argument("--tgt", required=True)
    tr.add_argument("--out")
    tr.add_argument("--src-crop", type=_crop, metavar="x,y,w,h")
    tr.add_argument("--tgt-crop", type=_crop, metavar="x,y,w,h")
    tr.add_argument("--orders-i", type=int, default=4, choices=range(0, 5),
                    help="moment orders on the intensity channel (default 4)")
    tr.add_argument("--orders-chroma", type=int, default=2, choices=range(0, 5),
                    help="moment orders on the chroma channels (default 2)")
    tr.add_argument("--spectral", action="store_true",
                    help="also match the power-spectrum descriptor")
    clamp = tr.add_mutually_exclusive_group()
    clamp.add_argument("--clamp", dest="clamp", action="store_true")
    clamp.add_argument("--no-clamp", dest="clamp", action="store_false")
    tr.set_defaults(clamp=False)
    tr.add_argument("--emit-lut", metavar="OUT.CUBE",
                    help="bake the frozen transfer into a .cube LUT")
    tr.add_argument("--lut-size", type=int, default=33)
    tr.add_argument("--emit-recipe", metavar="OUT.JSON",
                    help="write the frozen transfer recipe as JSON")

    op = sub.add_parser("optics", help="transfer a diffusion difference")
    op.add_argument("--src", required=True)
    op.add_argument("--t", required=True, help="reference image of the pair")
    op.add_argument("--tprime", required=True, help="diffused image of the pair")
    op.add_argument("--diff-crop", type=_crop, metavar="x,y,w,h")
    op.add_argument("--out")
    op.add_argument("--emit-kernel", metavar="OUT.TXT",
                    help="write the spatial kernel as a plain-text array")

    ap = sub.add_parser("apply-lut", help="apply a .cube LUT to an image")
    ap.add_argument("--lut", required=True)
    ap.add_argument("--in", dest="input", required=True)
    ap.add_argument("--out", required=True)

    ba = sub.add_parser("batch", help="replay a recipe over many frames")
    ba.add_argument("--recipe", required=True)
    ba.add_argument("--glob", required=True)
    ba.add_argument("--out-dir", default="out")

    sv = sub.add_parser("serve", help="run the local HTTP service")
    sv.add_argument("--port", type=int, default=None)
    sv.add_argument("--bind", default="127.0.0.1")
    sv.add_argument("--static", default=None,
                    help="directory with the built browser UI to serve at /")
    return parser


def _write_image(img, path):
    Path(path).write_bytes(save_image(img, format_for_path(path)))


def _cmd_transfer(args) -> int:
    cfg = pipeline.TransferConfig(
        orders_i=args.orders_i, orders_p=args.orders_chroma,
        orders_t=args.orders_chroma, src_crop=args.src_crop,
        tgt_crop=args.tgt_crop, spectral=args.spectral, clamp=args.clamp)
    src = load_image(args.src)
    tgt = load_image(args.tgt)
    out, recipe = pipeline.transfer_style(src, tgt, cfg)
    if args.out:
        _write_image(out, args.out)
    if args.emit_recipe:
        Path(args.emit_recipe).write_text(recipe.to_json())
    if args.emit_lut:
        baked = lut_mod.bake_lut(recipe, size=args.lut_size)
        Path(args.emit_lut).write_bytes(
            lut_mod.write_cube(baked, title=Path(args.emit_lut).stem))
    return 0


def _cmd_optics(args) -> int:
    src = load_image(args.src)
    t_ref = load_image(args.t)
    t_diff = load_image(args.tprime)
    out, kernel = pipeline.transfer_optics(src, t_ref, t_diff,
                                           diff_crop=args.diff_crop)
    if args.out:
        _write_image(out, args.out)
    if args.emit_kernel:
        Path(args.emit_kernel).write_text(
            write_kernel_text(kernel.spatial_kernel()))
    return 0


def _cmd_apply_lut(args) -> int:
    lut = lut_mod.read_cube(Path(args.lut).read_bytes())
    img = load_image(args.input)
    _write_image(lut_mod.apply_lut(img, lut), args.out)
    return 0


def _cmd_batch(args) -> int:
    recipe = pipeline.TransferRecipe.from_json(Path(args.recipe).read_text())
    paths = sorted(globmod.glob(args.glob))
    if not paths:
        print(f"no inputs match {args.glob!r}", file=sys.stderr)
        return 1
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for p in paths:
        img = load_image(p)
        _write_image(recipe.apply(img), out_dir / Path(p).name)
        print(f"processed {p}")
    return 0


def resolve_port(cli_port=None) -> int:
    """CLI flag wins, then the DST_PORT env var, then the default."""
    import os

    if cli_port is not None:
        return int(cli_port)
    return int(os.environ.get("DST_PORT", 8350))


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(static_dir=args.static), host=args.bind,
                port=resolve_port(args.port))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "transfer": _cmd_transfer,
        "optics": _cmd_optics,
        "apply-lut": _cmd_apply_lut,
        "batch": _cmd_batch,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except DecostyleError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
