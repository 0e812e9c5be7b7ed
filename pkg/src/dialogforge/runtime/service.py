"""HTTP chat service wrapping a BotRuntime.

Protocol (JSON bodies):
  POST   /v1/sessions                  {hint?}  -> {session_id}
  POST   /v1/sessions/{id}/messages    {text}   -> {messages: [...], closed: bool}
  DELETE /v1/sessions/{id}
  GET    /v1/stats                              -> injection counters

The in-process client and this transport produce identical transcripts for
identical seeds; tests pin that equivalence.
"""

from __future__ import annotations

import os
import socket
import threading
import time

import uvicorn
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from ..errors import DialogForgeError
from ..schema import BotDefinition
from .intent_model import IntentModel
from .session import BotRuntime, ErrorInjectionConfig, SessionClosed

DEFAULT_PORT = 8700
PORT_ENV = "DIALOGFORGE_BOT_PORT"


class BindError(DialogForgeError):
    code = "bind_error"


class StartSessionBody(BaseModel):
    hint: str | None = None


class MessageBody(BaseModel):
    text: str


def create_app(runtime: BotRuntime) -> FastAPI:
    app = FastAPI(title="dialogforge-bot-runtime", docs_url=None, redoc_url=None)

    @app.post("/v1/sessions", status_code=201)
    def start_session(body: StartSessionBody | None = None):
        session = runtime.start_session(hint=body.hint if body else None)
        return {"session_id": session.session_id}

    @app.post("/v1/sessions/{session_id}/messages")
    def send_message(session_id: str, body: MessageBody):
        try:
            messages, closed = runtime.step_session(session_id, body.text)
        except SessionClosed as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {"messages": messages, "closed": closed}

    @app.delete("/v1/sessions/{session_id}", status_code=204)
    def end_session(session_id: str):
        runtime.end_session(session_id)

    @app.get("/v1/stats")
    def stats():
        return {
            "injections": {
                "total": len(runtime.injection_log),
                "by_entity": runtime.injection_counts(),
            },
            "sessions_started": runtime._counter,
        }

    return app


def resolve_port(port: int | None = None) -> int:
    if port is not None:
        return port
    return int(os.environ.get(PORT_ENV, DEFAULT_PORT))


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class EmbeddedServer:
    """Uvicorn in a daemon thread; used by tests and the CLI's HTTP mode."""

    def __init__(self, runtime: BotRuntime, host: str = "127.0.0.1", port: int | None = None):
        self.runtime = runtime
        self.host = host
        self.port = port if port is not None else free_port()
        config = uvicorn.Config(
            create_app(runtime), host=host, port=self.port, log_level="warning"
        )
        self._server = uvicorn.Server(config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    @property
    def base_url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def start(self, timeout: float = 10.0) -> "EmbeddedServer":
        self._thread.start()
        deadline = time.monotonic() + timeout
        while not self._server.started:
            if time.monotonic() > deadline or not self._thread.is_alive():
                raise BindError(f"chat service failed to start on {self.base_url}")
            time.sleep(0.02)
        return self

    def stop(self) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=5)

    def __enter__(self) -> "EmbeddedServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def serve(
    definition: BotDefinition,
    model: IntentModel,
    injection: ErrorInjectionConfig | None = None,
    host: str = "0.0.0.0",
    port: int | None = None,
) -> None:
    """Run the chat service in the foreground (blocking)."""
    runtime = BotRuntime(definition, model, injection)
    try:
        uvicorn.run(create_app(runtime), host=host, port=resolve_port(port), log_level="info")
    except OSError as exc:
        raise BindError(f"cannot bind chat service: {exc}") from exc
