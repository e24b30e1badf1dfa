"""YAML application config: model profiles, backend choice, index location.

Validation happens at load time so a bad config fails before any session
is opened, with the offending key named in the error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import ConfigError, MissingTemplate
from .llm import ChatBackend, HttpBackend, MockBackend, ModelConfig

__all__ = [
    "BackendConfig",
    "ServiceConfig",
    "AppConfig",
    "load_config",
    "make_backend",
]

_MODEL_KEYS = {
    "endpoint",
    "model",
    "temperature",
    "max_tokens",
    "timeout",
    "max_retries",
    "backoff_base",
}

# Tag extraction wants determinism; composition wants variety.
_DEFAULT_TEMPERATURE = {"retrieval_model": 0.0, "composer_model": 0.7}

_TEMPLATE_ROLES = ("composer_system", "turn", "retrieval_system")


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "http"
    replies: tuple[str, ...] = ()
    cycle: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ("http", "mock"):
            raise ConfigError(f"backend.kind must be 'http' or 'mock', got {self.kind!r}")
        if self.kind == "mock" and not self.replies:
            raise ConfigError("backend.kind 'mock' requires backend.replies")


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    max_sessions: int = 64

    def __post_init__(self) -> None:
        if not 1 <= self.port <= 65535:
            raise ConfigError(f"service.port out of range: {self.port}")
        if self.max_sessions < 1:
            raise ConfigError("service.max_sessions must be >= 1")


@dataclass(frozen=True)
class AppConfig:
    retrieval_model: ModelConfig
    composer_model: ModelConfig
    index_path: Path
    backend: BackendConfig = field(default_factory=BackendConfig)
    service: ServiceConfig = field(default_factory=ServiceConfig)
    k: int = 3
    max_turns: int = 50
    # Optional per-role prompt template files; roles not listed use the
    # templates shipped with the package.
    template_paths: Mapping[str, Path] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.max_turns < 1:
            raise ConfigError("max_turns must be >= 1")

    def load_templates(self) -> dict[str, str]:
        return {
            role: path.read_text(encoding="utf-8")
            for role, path in self.template_paths.items()
        }


def _require_mapping(value: Any, where: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise ConfigError(f"{where} must be a mapping, got {type(value).__name__}")
    return value


def _model_config(raw: Any, where: str) -> ModelConfig:
    data = dict(_require_mapping(raw, where))
    unknown = set(data) - _MODEL_KEYS
    if unknown:
        raise ConfigError(f"{where} has unknown keys: {', '.join(sorted(unknown))}")
    for key in ("endpoint", "model"):
        if not data.get(key):
            raise ConfigError(f"{where}.{key} is required")
    data.setdefault("temperature", _DEFAULT_TEMPERATURE[where])
    try:
        return ModelConfig(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def load_config(path: str | Path) -> AppConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
    data = dict(_require_mapping(raw if raw is not None else {}, "config"))

    if "index_path" not in data:
        raise ConfigError("index_path is required")
    # Relative paths resolve against the config file, not the process cwd.
    index_path = Path(data["index_path"])
    if not index_path.is_absolute():
        index_path = (path.parent / index_path).resolve()
    if not index_path.exists():
        raise ConfigError(f"index_path does not exist: {index_path}")

    backend_raw = dict(_require_mapping(data.get("backend", {}), "backend"))
    replies = backend_raw.get("replies", [])
    if not isinstance(replies, (list, tuple)) or not all(
        isinstance(r, str) for r in replies
    ):
        raise ConfigError("backend.replies must be a list of strings")
    backend = BackendConfig(
        kind=backend_raw.get("kind", "http"),
        replies=tuple(replies),
        cycle=bool(backend_raw.get("cycle", False)),
    )

    service_raw = dict(_require_mapping(data.get("service", {}), "service"))
    try:
        service = ServiceConfig(**service_raw)
    except TypeError as exc:
        raise ConfigError(f"service: {exc}") from exc

    template_paths: dict[str, Path] = {}
    for role, value in _require_mapping(data.get("templates", {}), "templates").items():
        if role not in _TEMPLATE_ROLES:
            raise ConfigError(
                f"templates.{role}: unknown role (expected one of {', '.join(_TEMPLATE_ROLES)})"
            )
        template_path = Path(str(value))
        if not template_path.is_absolute():
            template_path = (path.parent / template_path).resolve()
        if not template_path.exists():
            raise MissingTemplate(f"templates.{role}: no such file: {template_path}")
        template_paths[role] = template_path

    try:
        return AppConfig(
            retrieval_model=_model_config(data.get("retrieval_model"), "retrieval_model"),
            composer_model=_model_config(data.get("composer_model"), "composer_model"),
            index_path=index_path,
            backend=backend,
            service=service,
            k=int(data.get("k", 3)),
            max_turns=int(data.get("max_turns", 50)),
            template_paths=template_paths,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def make_backend(cfg: BackendConfig) -> ChatBackend:
    if cfg.kind == "mock":
        return MockBackend(replies=list(cfg.replies), cycle=cfg.cycle)
    return HttpBackend()
