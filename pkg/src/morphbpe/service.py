"""JSON tokenization service over a directory of trained models.

Models are loaded once at startup and never mutated, so concurrent requests
need no locking. Error responses are always {"error": message} with a 4xx or
5xx status.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict
from starlette.exceptions import HTTPException as StarletteHTTPException

from .core import TokenizerModel, load_model
from .encoder import encode_text, normalized_text, token_strings
from .metrics import boundary_violations, morph_edit_distance


@dataclass(frozen=True)
class LoadedModel:
    id: str
    model: TokenizerModel
    language: str


class ServiceError(ValueError):
    """Raised when the model directory cannot be served."""


def load_model_dir(path: str | Path) -> dict[str, LoadedModel]:
    """Load every *.json model in a directory; the file stem is the model id.

    An optional top-level "language" key in the model file labels the model;
    it is metadata the core format tolerates but never writes.
    """
    path = Path(path)
    if not path.is_dir():
        raise ServiceError(f"model directory {path} does not exist")
    models: dict[str, LoadedModel] = {}
    for file in sorted(path.glob("*.json")):
        model = load_model(file)
        raw = json.loads(file.read_text(encoding="utf-8"))
        language = raw.get("language")
        if not isinstance(language, str) or not language:
            language = "unknown"
        models[file.stem] = LoadedModel(id=file.stem, model=model, language=language)
    if not models:
        raise ServiceError(f"no *.json models found in {path}")
    return models


class TokenizeRequest(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model_id: str
    text: str
    gold_segmentation: list[list[str]] | None = None


class CompareRequest(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model_ids: list[str]
    text: str
    gold_segmentation: list[list[str]] | None = None


class RequestError(Exception):
    def __init__(self, status_code: int, message: str):
        super().__init__(message)
        self.status_code = status_code
        self.message = message


def tokenize_payload(
    entry: LoadedModel, text: str, gold: list[list[str]] | None
) -> dict:
    model = entry.model
    encoded = encode_text(model, text)
    if gold is not None and len(gold) != len(encoded):
        raise RequestError(
            400,
            f"gold_segmentation has {len(gold)} entries but the text has "
            f"{len(encoded)} words",
        )
    words = []
    for i, ew in enumerate(encoded):
        item: dict = {
            "word": ew.word,
            "tokens": token_strings(model, ew.ids),
            "ids": list(ew.ids),
            "offsets": [[start, end] for start, end in ew.offsets],
        }
        if gold is not None:
            morphemes = [unicodedata.normalize("NFC", m) for m in gold[i]]
            if not morphemes or any(not m for m in morphemes):
                item["gold_error"] = "empty morpheme in gold segmentation"
            elif "".join(morphemes) != ew.word:
                item["gold_error"] = (
                    f"gold morphemes {morphemes!r} do not concatenate to "
                    f"{ew.word!r}"
                )
            else:
                item["mu_e"] = morph_edit_distance(item["tokens"], morphemes)
                word_start = ew.offsets[0][0] if ew.offsets else 0
                relative = [(s - word_start, e - word_start) for s, e in ew.offsets]
                item["violations"] = boundary_violations(relative, morphemes)
        words.append(item)
    return {
        "model_id": entry.id,
        "mode": model.mode,
        "normalized_text": normalized_text(model, text),
        "words": words,
    }


def create_app(
    models: dict[str, LoadedModel], static_dir: str | Path | None = None
) -> FastAPI:
    app = FastAPI(title="morphbpe tokenization service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def get_entry(model_id: str) -> LoadedModel:
        entry = models.get(model_id)
        if entry is None:
            raise RequestError(404, f"unknown model_id {model_id!r}")
        return entry

    @app.exception_handler(RequestError)
    async def request_error_handler(_: Request, exc: RequestError) -> JSONResponse:
        return JSONResponse(status_code=exc.status_code, content={"error": exc.message})

    @app.exception_handler(RequestValidationError)
    async def validation_handler(
        _: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": f"invalid request: {exc}"})

    @app.exception_handler(StarletteHTTPException)
    async def http_handler(_: Request, exc: StarletteHTTPException) -> JSONResponse:
        return JSONResponse(status_code=exc.status_code, content={"error": str(exc.detail)})

    @app.get("/models")
    async def list_models() -> list[dict]:
        return [
            {
                "id": entry.id,
                "mode": entry.model.mode,
                "vocab_size": entry.model.vocab_size,
                "language": entry.language,
            }
            for entry in models.values()
        ]

    @app.post("/tokenize")
    async def tokenize(req: TokenizeRequest) -> dict:
        return tokenize_payload(get_entry(req.model_id), req.text, req.gold_segmentation)

    @app.post("/compare")
    async def compare(req: CompareRequest) -> dict:
        if not req.model_ids:
            raise RequestError(400, "model_ids must not be empty")
        entries = [get_entry(mid) for mid in req.model_ids]
        return {
            "results": [
                tokenize_payload(entry, req.text, req.gold_segmentation)
                for entry in entries
            ]
        }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=Path(static_dir), html=True), name="static")
    return app
