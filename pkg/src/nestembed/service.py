"""HTTP JSON API over trained encoder models.

Endpoints:

  GET  /v1/models      list loaded models with their dimension ladders
  POST /v1/embed       {model_id, dim, texts} -> {vectors}
  POST /v1/similarity  {model_id, dim, mode, sentence_a, sentences_b} -> scores
  GET  /v1/health      {status, models_loaded, uptime_seconds}

Models are loaded once at startup from a directory of .mxem files (the file
stem becomes the model id) and never mutated, so identical requests always
produce identical responses. Error bodies are uniformly
{"error": {"code": <http status>, "message": ...}}. Floats are serialized
with 9 significant digits, which round-trips 32-bit values exactly.
"""

from __future__ import annotations

import logging
import time
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .encoder import DEFAULT_MAX_CHARS, EncoderModel, encode_batch, load_model
from .errors import ConfigError

DEFAULT_LISTEN = "127.0.0.1:8080"
DEFAULT_BODY_LIMIT = 64 * 1024
MODEL_SUFFIX = ".mxem"

log = logging.getLogger("nestembed.service")


class _ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


def _error_response(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": {"code": status, "message": message}})


def _wire_float(x) -> float:
    """9 significant digits: enough to round-trip any float32 exactly."""
    return float(f"{float(x):.9g}")


def load_models_dir(path) -> dict[str, EncoderModel]:
    """Load every .mxem file in the directory, keyed by file stem."""
    directory = Path(path)
    models = {}
    for file in sorted(directory.glob(f"*{MODEL_SUFFIX}")):
        models[file.stem] = load_model(file)
    return models


def _require(condition: bool, status: int, message: str) -> None:
    if not condition:
        raise _ApiError(status, message)


def _get_model(models: dict, body: dict) -> tuple[str, EncoderModel]:
    model_id = body.get("model_id")
    _require(isinstance(model_id, str) and model_id != "", 400,
             "model_id must be a non-empty string")
    model = models.get(model_id)
    _require(model is not None, 404, f"unknown model {model_id!r}")
    return model_id, model


def _get_dim(model: EncoderModel, body: dict) -> int:
    dim = body.get("dim")
    _require(isinstance(dim, int) and not isinstance(dim, bool), 400,
             "dim must be an integer")
    _require(dim in model.ladder, 400,
             f"dim {dim} not in ladder {list(model.ladder)}")
    return dim


def create_app(models: dict[str, EncoderModel],
               body_limit: int = DEFAULT_BODY_LIMIT,
               max_chars: int = DEFAULT_MAX_CHARS) -> FastAPI:
    app = FastAPI(title="nestembed", docs_url=None, redoc_url=None)
    app.state.models = models
    app.state.started_at = time.monotonic()
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["GET", "POST"], allow_headers=["*"])

    @app.exception_handler(_ApiError)
    async def _api_error(request: Request, exc: _ApiError):
        return _error_response(exc.status, exc.message)

    @app.exception_handler(Exception)
    async def _unhandled(request: Request, exc: Exception):
        log.exception("unhandled error on %s", request.url.path)
        return _error_response(500, "internal error")

    @app.middleware("http")
    async def _limit_and_log(request: Request, call_next):
        started = time.perf_counter()
        declared = request.headers.get("content-length")
        if declared is not None and declared.isdigit() and int(declared) > body_limit:
            response = _error_response(413, f"body exceeds {body_limit} bytes")
        else:
            body = await request.body()
            if len(body) > body_limit:
                response = _error_response(413, f"body exceeds {body_limit} bytes")
            else:
                response = await call_next(request)
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        log.info("%s %s -> %d (%.1f ms)", request.method, request.url.path,
                 response.status_code, elapsed_ms)
        return response

    async def _json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise _ApiError(400, "body must be valid JSON") from None
        _require(isinstance(body, dict), 400, "body must be a JSON object")
        return body

    @app.get("/v1/models")
    async def list_models():
        return [{"model_id": model_id, "full_dim": model.dim,
                 "ladder": list(model.ladder)}
                for model_id, model in sorted(models.items())]

    @app.post("/v1/embed")
    async def embed(request: Request):
        body = await _json_body(request)
        _, model = _get_model(models, body)
        dim = _get_dim(model, body)
        texts = body.get("texts")
        _require(isinstance(texts, list) and len(texts) > 0, 400,
                 "texts must be a non-empty list")
        _require(all(isinstance(t, str) for t in texts), 400,
                 "texts entries must be strings")
        vectors = encode_batch(model, texts, dim, max_chars)
        return {"vectors": [[_wire_float(x) for x in row] for row in vectors]}

    @app.post("/v1/similarity")
    async def similarity_endpoint(request: Request):
        body = await _json_body(request)
        model_id, model = _get_model(models, body)
        dim = _get_dim(model, body)
        mode = body.get("mode")
        _require(mode in ("pair", "one_vs_three"), 400,
                 "mode must be 'pair' or 'one_vs_three'")
        sentence_a = body.get("sentence_a")
        _require(isinstance(sentence_a, str), 400, "sentence_a must be a string")
        sentences_b = body.get("sentences_b")
        _require(isinstance(sentences_b, list)
                 and all(isinstance(s, str) for s in sentences_b), 400,
                 "sentences_b must be a list of strings")
        expected = 1 if mode == "pair" else 3
        _require(len(sentences_b) == expected, 400,
                 f"mode {mode!r} requires exactly {expected} sentences_b "
                 f"entries, got {len(sentences_b)}")

        vectors = encode_batch(model, [sentence_a] + sentences_b, dim,
                               max_chars).astype(np.float64)
        norms = np.sqrt((vectors * vectors).sum(axis=1))
        if norms[0] < 1e-12:
            raise _ApiError(422, "sentence_a produces a zero-norm embedding")
        for i in range(1, len(norms)):
            if norms[i] < 1e-12:
                raise _ApiError(422, f"sentences_b[{i - 1}] produces a "
                                     f"zero-norm embedding")
        unit = vectors / norms[:, None]
        scores = [_wire_float(max(-1.0, min(1.0, float(unit[0] @ unit[i]))))
                  for i in range(1, len(unit))]
        return {"model_id": model_id, "dim": dim, "scores": scores}

    @app.get("/v1/health")
    async def health():
        return {"status": "ok", "models_loaded": len(models),
                "uptime_seconds": time.monotonic() - app.state.started_at}

    return app


def parse_listen(listen: str) -> tuple[str, int]:
    """Split host:port, validating the port."""
    host, sep, port_text = listen.rpartition(":")
    if not sep or not host:
        raise ConfigError(f"listen address must be host:port, got {listen!r}")
    try:
        port = int(port_text)
    except ValueError:
        raise ConfigError(f"invalid port {port_text!r}") from None
    if not 1 <= port <= 65535:
        raise ConfigError(f"port {port} outside [1, 65535]")
    return host, port


def serve(models_dir, listen: str = DEFAULT_LISTEN,
          body_limit: int = DEFAULT_BODY_LIMIT) -> None:
    """Blocking entry point: load models, then run uvicorn until signaled."""
    import uvicorn

    host, port = parse_listen(listen)
    models = load_models_dir(models_dir)
    app = create_app(models, body_limit)
    log.info("serving %d model(s) from %s on %s:%d", len(models),
             models_dir, host, port)
    uvicorn.run(app, host=host, port=port, log_level="warning")
