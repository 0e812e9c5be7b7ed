"""Chat client contract plus the HTTP reference client.

A client exchanges conversations with a bot runtime: open a session (with
an optional hint the runtime may use to seed per-session behavior), send
user text and receive the bot's messages with a closed flag, end the
session. Implementations must be safe for concurrent use across distinct
sessions; a single session is only ever driven by one episode.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import httpx

from ..errors import DialogForgeError


class TransportError(DialogForgeError):
    code = "transport_error"


class ChatClientInterface(ABC):
    @abstractmethod
    def start_session(self, hint: str | None = None) -> str:
        """Open a session and return its id."""

    @abstractmethod
    def send(self, session_id: str, text: str) -> tuple[list[str], bool]:
        """Deliver user text; returns (bot messages, session-closed flag)."""

    @abstractmethod
    def end(self, session_id: str) -> None:
        """Tear the session down (idempotent)."""


class HttpChatClient(ChatClientInterface):
    """Client for the JSON chat protocol under ``/v1``."""

    def __init__(self, base_url: str, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self._http = httpx.Client(base_url=self.base_url, timeout=timeout)

    def start_session(self, hint: str | None = None) -> str:
        try:
            response = self._http.post("/v1/sessions", json={"hint": hint})
            response.raise_for_status()
            return response.json()["session_id"]
        except httpx.HTTPError as exc:
            raise TransportError(f"start_session failed: {exc}") from exc

    def send(self, session_id: str, text: str) -> tuple[list[str], bool]:
        try:
            response = self._http.post(
                f"/v1/sessions/{session_id}/messages", json={"text": text}
            )
            response.raise_for_status()
            body = response.json()
            return list(body["messages"]), bool(body.get("closed", False))
        except httpx.HTTPError as exc:
            raise TransportError(f"send failed: {exc}") from exc

    def end(self, session_id: str) -> None:
        try:
            self._http.delete(f"/v1/sessions/{session_id}")
        except httpx.HTTPError:
            pass  # best effort; the session dies with the runtime anyway

    def close(self) -> None:
        self._http.close()
