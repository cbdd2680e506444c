"""Layered configuration: defaults, then an INI file, then CLI flags.

The file uses sections ``[model]``, ``[evaluator]``, ``[optimizer]``,
``[validation]`` and ``[proxy]``.  Unknown sections or keys are rejected
outright — a silently ignored typo in a config file is worse than an error.
Credentials never live here: the API key is read from the environment
(see :data:`quest.gateway.API_KEY_ENV`) and nowhere else.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import QuestError
from .gateway import HttpSettings, ModelParams
from .models import OptimizerConfig
from .proxies import ProxySettings
from .validation import ValidationSettings


class ConfigError(QuestError):
    """The configuration file could not be used."""


@dataclass(slots=True)
class QuestConfig:
    """Everything configurable, with working defaults."""

    model: ModelParams = field(default_factory=ModelParams)
    http: HttpSettings = field(default_factory=HttpSettings)
    self_consistency: int = 1
    parallelism: int = 1
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    validation: ValidationSettings = field(default_factory=ValidationSettings)
    proxy: ProxySettings = field(default_factory=ProxySettings)


_SECTIONS = ("model", "evaluator", "optimizer", "validation", "proxy")


def _get(parser: configparser.ConfigParser, section: str, key: str, convert, default):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        return convert(raw)
    except (ValueError, AttributeError) as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from exc


def _to_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def _to_opt_int(raw: str) -> int | None:
    raw = raw.strip()
    return int(raw) if raw else None


def _to_tuple(raw: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in raw.split(",") if part.strip())


_KNOWN_KEYS = {
    "model": {"name", "temperature", "seed", "base_url", "timeout", "retries", "backoff"},
    "evaluator": {"self_consistency", "parallelism"},
    "optimizer": {"max_iterations", "target_score", "run_tests"},
    "validation": {
        "python_command",
        "node_command",
        "syntax_timeout",
        "test_timeout",
        "env_passthrough",
    },
    "proxy": {"pylint_command", "radon_command", "bandit_command", "timeout"},
}


def load_config(path: str | Path | None = None) -> QuestConfig:
    """Defaults, overlaid with the INI file at ``path`` when given."""
    config = QuestConfig()
    if path is None:
        return config

    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"config file {path}: {exc}") from exc

    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"config file {path}: unknown section [{section}]")
        unknown = set(parser.options(section)) - _KNOWN_KEYS[section]
        if unknown:
            raise ConfigError(
                f"config file {path}: unknown key(s) in [{section}]: {sorted(unknown)}"
            )

    config.model = ModelParams(
        name=_get(parser, "model", "name", str, config.model.name),
        temperature=_get(parser, "model", "temperature", float, config.model.temperature),
        seed=_get(parser, "model", "seed", _to_opt_int, config.model.seed),
    )
    config.http = HttpSettings(
        base_url=_get(parser, "model", "base_url", str, config.http.base_url),
        timeout=_get(parser, "model", "timeout", float, config.http.timeout),
        retries=_get(parser, "model", "retries", int, config.http.retries),
        backoff=_get(parser, "model", "backoff", float, config.http.backoff),
    )
    config.self_consistency = _get(
        parser, "evaluator", "self_consistency", int, config.self_consistency
    )
    config.parallelism = _get(parser, "evaluator", "parallelism", int, config.parallelism)
    config.optimizer = OptimizerConfig(
        max_iterations=_get(
            parser, "optimizer", "max_iterations", int, config.optimizer.max_iterations
        ),
        target_score=_get(
            parser, "optimizer", "target_score", float, config.optimizer.target_score
        ),
        self_consistency=config.self_consistency,
        run_tests=_get(parser, "optimizer", "run_tests", _to_bool, config.optimizer.run_tests),
    )
    config.validation = ValidationSettings(
        python_command=_get(
            parser, "validation", "python_command", str, config.validation.python_command
        ),
        node_command=_get(parser, "validation", "node_command", str, config.validation.node_command),
        syntax_timeout=_get(
            parser, "validation", "syntax_timeout", float, config.validation.syntax_timeout
        ),
        test_timeout=_get(
            parser, "validation", "test_timeout", float, config.validation.test_timeout
        ),
        env_passthrough=_get(
            parser, "validation", "env_passthrough", _to_tuple, config.validation.env_passthrough
        ),
    )
    config.proxy = ProxySettings(
        pylint_command=_get(parser, "proxy", "pylint_command", str, config.proxy.pylint_command),
        radon_command=_get(parser, "proxy", "radon_command", str, config.proxy.radon_command),
        bandit_command=_get(parser, "proxy", "bandit_command", str, config.proxy.bandit_command),
        timeout=_get(parser, "proxy", "timeout", float, config.proxy.timeout),
    )
    return config


def apply_overrides(
    config: QuestConfig,
    self_consistency: int | None = None,
    parallelism: int | None = None,
) -> QuestConfig:
    """CLI flags beat file values; None means "flag not given"."""
    if self_consistency is not None:
        config.self_consistency = self_consistency
        config.optimizer = replace(config.optimizer, self_consistency=self_consistency)
    if parallelism is not None:
        config.parallelism = parallelism
    return config
