"""Model clients: OpenAI-compatible HTTP, scripted fixtures and a gt oracle.

Every client exposes ``complete(request) -> ModelResponse`` and a
``max_in_flight`` attribute bounding concurrent calls.
"""

from __future__ import annotations

import base64
import json
import logging
import os
import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence, Union

import httpx

from .metrics import TokenUsage
from .pddl import GroundAtom, Problem, TypedName, render_problem
from .planner import SearchConfig, solve
from .task import TaskInstance

log = logging.getLogger(__name__)

API_KEY_ENV = "FORMABENCH_API_KEY"
DEFAULT_TEMPERATURE = 0.7
DEFAULT_MAX_TOKENS = 1024


class ClientError(Exception):
    pass


class NetworkError(ClientError):
    pass


class ApiError(ClientError):
    def __init__(self, status: int, body: str):
        self.status = status
        self.body = body
        super().__init__(f"API returned {status}: {body[:300]}")


class ClientTimeout(ClientError, TimeoutError):
    pass


class FixtureMissing(ClientError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "fixture missing"


# ── request/response values ──────────────────────────────────────────────────


@dataclass(frozen=True)
class TextPart:
    text: str


@dataclass(frozen=True)
class ImagePart:
    path: Optional[Path] = None
    data: Optional[bytes] = None
    mime: str = "image/png"

    def data_url(self) -> str:
        raw = self.data if self.data is not None else Path(self.path).read_bytes()
        mime = self.mime
        if self.path is not None and self.data is None:
            mime = _mime_for(Path(self.path))
        return f"data:{mime};base64,{base64.b64encode(raw).decode('ascii')}"


Part = Union[TextPart, ImagePart]


def _mime_for(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix in (".jpg", ".jpeg"):
        return "image/jpeg"
    if suffix == ".png":
        return "image/png"
    raise ClientError(f"unsupported image format: {path}")


@dataclass(frozen=True)
class Message:
    role: str
    parts: tuple[Part, ...]

    @property
    def text(self) -> str:
        return "".join(p.text for p in self.parts if isinstance(p, TextPart))


@dataclass(frozen=True)
class CallKey:
    task_id: str
    pipeline: str
    step: str

    def __str__(self) -> str:
        return f"{self.task_id}/{self.pipeline}/{self.step}"


@dataclass(frozen=True)
class ModelRequest:
    messages: tuple[Message, ...]
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    key: Optional[CallKey] = None
    # Structured context for test doubles; never sent over the wire.
    annotations: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("a request needs at least one message")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")

    @property
    def text(self) -> str:
        return "\n".join(m.text for m in self.messages)


@dataclass(frozen=True)
class ModelResponse:
    text: str
    usage: TokenUsage
    model_id: str


def estimate_tokens(text: str) -> int:
    return len(text) // 4


def estimated_usage(request: ModelRequest, text: str) -> TokenUsage:
    return TokenUsage(estimate_tokens(request.text), estimate_tokens(text), 1, estimated=True)


# ── live client ──────────────────────────────────────────────────────────────


def request_body(request: ModelRequest, model: str) -> bytes:
    """Serialize a request as a chat-completions JSON body."""
    messages = []
    for m in request.messages:
        content = []
        for part in m.parts:
            if isinstance(part, TextPart):
                content.append({"type": "text", "text": part.text})
            else:
                content.append({"type": "image_url", "image_url": {"url": part.data_url()}})
        messages.append({"role": m.role, "content": content})
    body = {
        "model": model,
        "messages": messages,
        "temperature": request.temperature,
        "max_tokens": request.max_tokens,
    }
    return json.dumps(body, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


class HttpClient:
    """Client for any ``/chat/completions`` endpoint.

    Transport failures are retried with exponential backoff (3 attempts in
    total); HTTP errors and timeouts are raised immediately.
    """

    def __init__(self, base_url: str, model: str, *, api_key: Optional[str] = None,
                 timeout: float = 120.0, max_in_flight: int = 4, max_attempts: int = 3,
                 backoff: float = 1.0, transport: Optional[httpx.BaseTransport] = None,
                 sleep: Callable[[float], None] = time.sleep):
        self.url = base_url.rstrip("/") + "/chat/completions"
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.max_in_flight = max_in_flight
        self.max_attempts = max_attempts
        self.backoff = backoff
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._http = httpx.Client(timeout=timeout, transport=transport)

    def headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def complete(self, request: ModelRequest) -> ModelResponse:
        body = request_body(request, self.model)
        with self._slots:
            response = self._post(body)
        if response.status_code >= 400:
            raise ApiError(response.status_code, response.text[:1000])
        try:
            payload = response.json()
            text = payload["choices"][0]["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ApiError(response.status_code, f"malformed response: {response.text[:500]}") from exc
        usage = payload.get("usage") or {}
        if "prompt_tokens" in usage and "completion_tokens" in usage:
            tokens = TokenUsage(int(usage["prompt_tokens"]), int(usage["completion_tokens"]), 1)
        else:
            tokens = estimated_usage(request, text)
        return ModelResponse(text, tokens, payload.get("model", self.model))

    def _post(self, body: bytes) -> httpx.Response:
        for attempt in range(1, self.max_attempts + 1):
            try:
                return self._http.post(self.url, content=body, headers=self.headers())
            except httpx.TimeoutException as exc:
                raise ClientTimeout(str(exc)) from exc
            except httpx.TransportError as exc:
                if attempt == self.max_attempts:
                    raise NetworkError(f"{exc} after {attempt} attempts") from exc
                delay = self.backoff * 2 ** (attempt - 1)
                log.warning("request failed (%s), retrying in %.1fs", exc, delay)
                self._sleep(delay)
        raise AssertionError("unreachable")

    def close(self) -> None:
        self._http.close()


# ── scripted client ──────────────────────────────────────────────────────────


class ScriptedClient:
    """Replays fixture texts keyed on (task_id, pipeline, step).

    A directory source is laid out as ``<task_id>/<pipeline>/<step>.txt``.
    """

    max_in_flight = 1

    def __init__(self, source: Union[Path, str, Mapping[CallKey, str]],
                 model_id: str = "scripted"):
        self.root = None if isinstance(source, Mapping) else Path(source)
        self.fixtures = dict(source) if isinstance(source, Mapping) else {}
        self.model_id = model_id

    def lookup(self, key: CallKey) -> str:
        if key in self.fixtures:
            return self.fixtures[key]
        if self.root is not None:
            path = self.root / key.task_id / key.pipeline / f"{key.step}.txt"
            if path.is_file():
                return path.read_text(encoding="utf-8")
        raise FixtureMissing(f"no scripted response for {key}")

    def complete(self, request: ModelRequest) -> ModelResponse:
        if request.key is None:
            raise FixtureMissing("request has no call key")
        text = self.lookup(request.key)
        return ModelResponse(text, estimated_usage(request, text), self.model_id)


# ── oracle client ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class OracleConfig:
    drop_init_rate: float = 0.0
    rename_rate: float = 0.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        for name in ("drop_init_rate", "rename_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


def corrupt_problem(problem: Problem, task_id: str, config: OracleConfig) -> Problem:
    """Drop init atoms and rename objects with a generator seeded per task."""
    rng = random.Random(f"{config.rng_seed}:{task_id}")
    kept = [a for a in sorted(problem.init) if rng.random() >= config.drop_init_rate]
    renames = {}
    for obj in sorted(problem.objects):
        if rng.random() < config.rename_rate:
            renames[obj.name] = f"{obj.name}_obj"

    def ren(atom: GroundAtom) -> GroundAtom:
        return GroundAtom(atom.predicate, tuple(renames.get(a, a) for a in atom.args))

    return Problem(
        name=problem.name,
        domain_name=problem.domain_name,
        objects=frozenset(TypedName(renames.get(o.name, o.name), o.type)
                          for o in problem.objects),
        init=frozenset(map(ren, kept)),
        goal=frozenset(map(ren, problem.goal)),
    )


def _fenced(text: str, lang: str = "pddl") -> str:
    return f"```{lang}\n{text}```\n"


def oracle_respond(task: TaskInstance, pipeline_step: str, config: OracleConfig,
                   annotations: Optional[Mapping[str, object]] = None,
                   planner_config: SearchConfig = SearchConfig()) -> str:
    """Text a perfect (or deliberately corrupted) model would return."""
    problem = corrupt_problem(task.gt_problem, task.task_id, config)
    objects = sorted(problem.objects)
    init = sorted(problem.init)
    step = pipeline_step.split("-")[0] if pipeline_step.startswith("verify") else pipeline_step

    if step == "caption":
        lines = ["Objects:"]
        lines += [f"- {o.name} ({o.type})" for o in objects]
        lines.append(f"Quantities: {len(objects)} objects in total.")
        lines.append("Relations:")
        lines += [f"- {a}" for a in init]
        return "\n".join(lines) + "\n"
    if step == "scene-graph":
        return "".join([f"obj {o}\n" for o in objects] + [f"atom {a}\n" for a in init])
    if step == "objects":
        return "".join(f"obj {o}\n" for o in objects)
    if step == "verify":
        candidates = (annotations or {}).get("candidates", ())
        truth = set(map(str, init))
        return "".join(f"{c}: {'True' if str(c) in truth else 'False'}\n" for c in candidates)
    if step in ("problem", "goal"):
        return "Here is the problem file.\n" + _fenced(render_problem(problem))
    if step == "plan":
        result = solve(task.domain, problem, planner_config)
        if not result.found:
            return "I could not find a plan.\n"
        return "Plan:\n" + result.plan.to_text()
    raise ValueError(f"oracle has no response for step {pipeline_step!r}")


class OracleClient:
    """Answers every pipeline step from the ground-truth problem."""

    max_in_flight = 4

    def __init__(self, tasks: Sequence[TaskInstance], config: OracleConfig = OracleConfig(),
                 planner_config: SearchConfig = SearchConfig()):
        self.tasks = {t.task_id: t for t in tasks}
        self.config = config
        self.planner_config = planner_config

    def complete(self, request: ModelRequest) -> ModelResponse:
        if request.key is None or request.key.task_id not in self.tasks:
            raise FixtureMissing(f"oracle has no task for {request.key}")
        task = self.tasks[request.key.task_id]
        text = oracle_respond(task, request.key.step, self.config,
                              request.annotations, self.planner_config)
        return ModelResponse(text, estimated_usage(request, text), "oracle")
