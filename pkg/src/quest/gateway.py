"""Chat-completion gateway with three interchangeable backends.

* ``http``   — POSTs to an OpenAI-compatible ``/v1/chat/completions`` endpoint.
* ``record`` — same as ``http`` but appends every exchange to a JSONL
  transcript as it happens.
* ``replay`` — answers purely from a previously recorded transcript; a
  request whose digest is absent is a hard error, never a silent live call.

Requests are identified by a canonical digest over everything that shapes
the completion: system text, user text, model name, temperature, seed and
attempt nonce.  The nonce exists so that retries of a rejected reply at
temperature 0 are not byte-identical requests (which would deterministically
fail the same way): it perturbs the wire-level seed without touching the
prompt.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import requests

from .errors import QuestError

API_KEY_ENV = "QUEST_API_KEY"
DEFAULT_BASE_URL = "https://api.openai.com"
COMPLETIONS_PATH = "/v1/chat/completions"


class GatewayError(QuestError):
    """Base class for completion-backend failures."""


class TransportError(GatewayError):
    """The endpoint could not be reached after bounded retries."""


class EndpointError(GatewayError):
    """The endpoint answered with a non-2xx status or an unusable body."""


class TranscriptGap(GatewayError):
    """Replay was asked for a request the transcript does not contain."""

    def __init__(self, digest: str):
        self.digest = digest
        super().__init__(
            f"transcript gap: no recorded response for request digest {digest}"
        )


class MissingApiKey(GatewayError):
    """The live backend needs a credential that is not in the environment."""


@dataclass(frozen=True, slots=True)
class ModelParams:
    """Sampling identity shared by every request of a run."""

    name: str = "gpt-4o"
    temperature: float = 0.0
    seed: int | None = None


@dataclass(frozen=True, slots=True)
class ChatRequest:
    """One completion request, fully determining its digest."""

    system: str
    user: str
    model_name: str
    temperature: float = 0.0
    seed: int | None = None
    attempt_nonce: int = 0

    def __post_init__(self) -> None:
        # Digest stability: 0 and 0.0 must hash identically.
        object.__setattr__(self, "temperature", float(self.temperature))

    @classmethod
    def build(cls, system: str, user: str, model: ModelParams, attempt_nonce: int = 0) -> "ChatRequest":
        return cls(
            system=system,
            user=user,
            model_name=model.name,
            temperature=model.temperature,
            seed=model.seed,
            attempt_nonce=attempt_nonce,
        )

    @property
    def wire_seed(self) -> int | None:
        """Seed actually sent to the endpoint; varies with the nonce."""
        if self.seed is None and self.attempt_nonce == 0:
            return None
        return (self.seed or 0) + self.attempt_nonce

    def digest(self) -> str:
        return canonical_digest(self)


def canonical_digest(request: ChatRequest) -> str:
    """SHA-256 over the canonical JSON form of the digest-relevant fields."""
    canonical = json.dumps(
        {
            "system": request.system,
            "user": request.user,
            "model_name": request.model_name,
            "temperature": request.temperature,
            "seed": request.seed,
            "attempt_nonce": request.attempt_nonce,
        },
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=True,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(slots=True)
class ChatExchange:
    """A request paired with the response text it produced."""

    request: ChatRequest
    response_text: str
    timestamp: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "request_digest": self.request.digest(),
            "system": self.request.system,
            "user": self.request.user,
            "model_name": self.request.model_name,
            "temperature": self.request.temperature,
            "seed": self.request.seed,
            "attempt_nonce": self.request.attempt_nonce,
            "response_text": self.response_text,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ChatExchange":
        return cls(
            request=ChatRequest(
                system=data["system"],
                user=data["user"],
                model_name=data["model_name"],
                temperature=data["temperature"],
                seed=data.get("seed"),
                attempt_nonce=data.get("attempt_nonce", 0),
            ),
            response_text=data["response_text"],
            timestamp=data.get("timestamp", ""),
        )


class Transcript:
    """Append-only JSONL record of exchanges, indexed by request digest.

    The first occurrence of a digest wins on load; re-recording an identical
    run merely appends identical lines.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, exchange: ChatExchange) -> None:
        line = json.dumps(exchange.to_dict(), sort_keys=True, ensure_ascii=True)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def load_index(self) -> dict[str, str]:
        """Map request digest -> response text for every recorded exchange."""
        index: dict[str, str] = {}
        if not self.path.exists():
            return index
        with self.path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    data = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise GatewayError(
                        f"transcript {self.path}: line {lineno} is not valid JSON ({exc})"
                    ) from exc
                digest = data.get("request_digest")
                if not digest:
                    raise GatewayError(f"transcript {self.path}: line {lineno} lacks a request_digest")
                index.setdefault(digest, data.get("response_text", ""))
        return index

    def load_exchanges(self) -> list[ChatExchange]:
        exchanges = []
        if not self.path.exists():
            return exchanges
        with self.path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    exchanges.append(ChatExchange.from_dict(json.loads(line)))
        return exchanges


@dataclass(slots=True)
class HttpSettings:
    """Transport knobs for the live backends."""

    base_url: str = DEFAULT_BASE_URL
    timeout: float = 60.0
    retries: int = 3
    backoff: float = 0.5


class LlmGateway:
    """Dispatches completion requests to the configured backend.

    ``complete`` is safe to call from multiple threads: the replay index is
    read-only after construction and transcript appends are lock-protected.
    """

    MODES = ("http", "record", "replay")

    def __init__(
        self,
        mode: str = "http",
        transcript: str | Path | None = None,
        http: HttpSettings | None = None,
    ):
        if mode not in self.MODES:
            raise GatewayError(f"unknown backend mode {mode!r}; expected one of {self.MODES}")
        if mode in ("record", "replay") and transcript is None:
            raise GatewayError(f"backend mode {mode!r} requires a transcript path")
        self.mode = mode
        self.http = http or HttpSettings()
        self.transcript = Transcript(transcript) if transcript is not None else None
        self._replay_index: dict[str, str] | None = None
        if mode == "replay":
            assert self.transcript is not None
            self._replay_index = self.transcript.load_index()

    def complete(self, request: ChatRequest) -> str:
        """Return the assistant text for ``request`` through the active backend."""
        if self.mode == "replay":
            assert self._replay_index is not None
            digest = request.digest()
            try:
                return self._replay_index[digest]
            except KeyError:
                raise TranscriptGap(digest) from None
        text = self._complete_http(request)
        if self.mode == "record":
            assert self.transcript is not None
            self.transcript.append(
                ChatExchange(
                    request=request,
                    response_text=text,
                    timestamp=datetime.now(timezone.utc).isoformat(),
                )
            )
        return text

    # -- live transport -------------------------------------------------

    def _complete_http(self, request: ChatRequest) -> str:
        api_key = os.environ.get(API_KEY_ENV)
        if not api_key:
            raise MissingApiKey(
                f"set {API_KEY_ENV} in the environment to use the {self.mode!r} backend"
            )
        payload: dict[str, Any] = {
            "model": request.model_name,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
            "temperature": request.temperature,
        }
        if request.wire_seed is not None:
            payload["seed"] = request.wire_seed
        url = self.http.base_url.rstrip("/") + COMPLETIONS_PATH
        headers = {"Authorization": f"Bearer {api_key}", "Content-Type": "application/json"}

        last_exc: Exception | None = None
        for attempt in range(self.http.retries):
            if attempt:
                time.sleep(self.http.backoff * (2 ** (attempt - 1)))
            try:
                response = requests.post(url, json=payload, headers=headers, timeout=self.http.timeout)
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_exc = exc
                continue
            return _extract_text(response)
        raise TransportError(
            f"endpoint unreachable after {self.http.retries} attempts: {last_exc}"
        ) from last_exc


def _extract_text(response: requests.Response) -> str:
    if not 200 <= response.status_code < 300:
        excerpt = response.text[:500]
        raise EndpointError(f"endpoint returned HTTP {response.status_code}: {excerpt}")
    try:
        body = response.json()
        return body["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise EndpointError(
            f"endpoint response not in chat-completion shape: {response.text[:500]}"
        ) from exc
