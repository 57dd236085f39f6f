"""Local HTTP service exposing the pipeline to the browser UI.

Endpoints (all stateless; handlers are isolated and may run concurrently,
with a bounded semaphore capping pixel-heavy work at the core count):

  GET  /api/health          -> {"status": "ok"}
  POST /api/transfer        -> multipart: src, tgt image files + optional
                               `config` JSON field; returns JSON with the
                               base64 16-bit PNG result and the recipe
  POST /api/optics          -> multipart: src, t, tprime files + optional
                               `diff_crop` "x,y,w,h"; returns base64 PNG
  POST /api/lut             -> recipe JSON body (optional ?size=33);
                               returns .cube text

Malformed input yields 400, processing failures 422 (the detail names the
failing stage and channel), oversized uploads 413.  The service binds to
localhost by default and carries no auth: it is a local artist tool.
"""

from __future__ import annotations

import base64
import json
import os
import threading
from typing import Optional

from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import lut as lut_mod
from . import pipeline
from .errors import CorruptFile, DecostyleError, RecipeIncomplete, UnsupportedFormat
from .imgio import CropRect, load_image, save_image

DEFAULT_SIZE_CAP = 64 * 1024 * 1024


def create_app(max_bytes: int = DEFAULT_SIZE_CAP,
               workers: Optional[int] = None,
               static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="decostyle service")
    heavy = threading.Semaphore(workers or os.cpu_count() or 2)

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.middleware("http")
    async def size_cap(request: Request, call_next):
        length = request.headers.get("content-length")
        if length and int(length) > max_bytes:
            return JSONResponse(status_code=413,
                                content={"detail": f"payload over {max_bytes} bytes"})
        return await call_next(request)

    def _decode_upload(upload: UploadFile, name: str):
        data = upload.file.read()
        try:
            return load_image(data)
        except (CorruptFile, UnsupportedFormat) as e:
            raise _BadInput(f"{name}: {e}") from e

    def _png_b64(img) -> str:
        return base64.b64encode(save_image(img, "png")).decode("ascii")

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.post("/api/transfer")
    def transfer(src: UploadFile = File(...), tgt: UploadFile = File(...),
                 config: Optional[str] = Form(None)):
        try:
            cfg = pipeline.TransferConfig.from_dict(json.loads(config)) \
                if config else pipeline.TransferConfig()
        except (ValueError, TypeError) as e:
            raise _BadInput(f"config: {e}") from e
        src_img = _decode_upload(src, "src")
        tgt_img = _decode_upload(tgt, "tgt")
        with heavy:
            out, recipe = pipeline.transfer_style(src_img, tgt_img, cfg)
        return {"image": _png_b64(out), "recipe": json.loads(recipe.to_json())}

    @app.post("/api/optics")
    def optics(src: UploadFile = File(...), t: UploadFile = File(...),
               tprime: UploadFile = File(...),
               diff_crop: Optional[str] = Form(None)):
        try:
            rect = CropRect.parse(diff_crop) if diff_crop else None
        except ValueError as e:
            raise _BadInput(f"diff_crop: {e}") from e
        src_img = _decode_upload(src, "src")
        t_img = _decode_upload(t, "t")
        tp_img = _decode_upload(tprime, "tprime")
        with heavy:
            out, kernel = pipeline.transfer_optics(src_img, t_img, tp_img,
                                                   diff_crop=rect)
        return {"image": _png_b64(out), "kernel": kernel.to_dict()}

    @app.post("/api/lut")
    async def lut_endpoint(request: Request, size: int = lut_mod.DEFAULT_SIZE,
                           title: Optional[str] = None):
        body = await request.body()
        try:
            recipe = pipeline.TransferRecipe.from_json(body.decode("utf-8"))
        except (ValueError, UnicodeDecodeError, RecipeIncomplete) as e:
            raise _BadInput(f"recipe: {e}") from e
        with heavy:
            baked = lut_mod.bake_lut(recipe, size=size)
            cube = lut_mod.write_cube(baked, title=title)
        return Response(content=cube, media_type="text/plain",
                        headers={"Content-Disposition":
                                 'attachment; filename="look.cube"'})

    @app.exception_handler(_BadInput)
    async def bad_input(request: Request, exc: "_BadInput"):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(DecostyleError)
    async def processing_error(request: Request, exc: DecostyleError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


class _BadInput(Exception):
    """Client-side input problem (maps to HTTP 400)."""
