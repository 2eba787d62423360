"""Read the line-oriented ``key = value`` configuration file."""

import io
import logging
from pathlib import Path
from typing import Any, Optional

from dotenv.parser import Binding, parse_stream
from pydantic import ValidationError

from src.config.settings import PipelineConfig
from src.errors import ConfigError

logger = logging.getLogger(__name__)


def _key_line(binding: Binding) -> int:
    """1-based line of the binding's first non-blank character.

    A binding's mark starts before any blank lines that precede the key.
    """
    text = binding.original.string
    leading = text[: len(text) - len(text.lstrip())]
    return binding.original.line + leading.count("\n")


def _nest(flat: dict[str, str], lines: dict[str, int]) -> dict[str, Any]:
    """Turn dotted keys into nested dicts (``svm.C`` -> ``{"svm": {"C": ...}}``)."""
    nested: dict[str, Any] = {}
    for key, value in flat.items():
        node = nested
        *sections, leaf = key.split(".")
        for i, section in enumerate(sections):
            child = node.setdefault(section, {})
            if not isinstance(child, dict):
                prefix = ".".join(sections[: i + 1])
                raise ConfigError(
                    f"key {key} (line {lines[key]}) conflicts with value {prefix} "
                    f"(line {lines[prefix]})"
                )
            node = child
        if isinstance(node.get(leaf), dict):
            raise ConfigError(f"key {key} (line {lines[key]}) is a section, not a value")
        node[leaf] = value
    return nested


def _line_for(loc: tuple, lines: dict[str, int]) -> Optional[int]:
    """Line of the config key closest to a validation error location."""
    dotted = ".".join(str(part) for part in loc)
    if dotted in lines:
        return lines[dotted]
    candidates = [line for key, line in lines.items() if key.startswith(dotted + ".") or not loc]
    return min(candidates) if candidates else None


def _describe(err: ValidationError, lines: dict[str, int]) -> str:
    unknown, problems = [], []
    for item in err.errors():
        loc = tuple(part for part in item["loc"] if not isinstance(part, int))
        key = ".".join(str(part) for part in loc) or "<config>"
        line = _line_for(loc, lines)
        where = f" (line {line})" if line is not None else ""
        if item["type"] == "extra_forbidden":
            unknown.append(f"{key}{where}")
        else:
            problems.append(f"{key}{where}: {item['msg']}")
    parts = []
    if unknown:
        parts.append(f"unknown keys: {', '.join(unknown)}")
    parts.extend(problems)
    return "; ".join(parts)


def read_config_text(text: str, base_dir: Optional[Path] = None) -> PipelineConfig:
    """Validate configuration text.

    Blank lines and ``#`` comments are ignored; list values are comma separated.
    A relative ``data.path`` resolves against ``base_dir``.

    Raises:
        ConfigError: malformed lines, duplicate keys, unknown keys or invalid values,
            each reported with its line number
    """
    flat: dict[str, str] = {}
    lines: dict[str, int] = {}
    for binding in parse_stream(io.StringIO(text)):
        line = _key_line(binding)
        if binding.error:
            raise ConfigError(f"line {line}: cannot parse {binding.original.string.strip()!r}")
        if binding.key is None:
            continue
        if binding.value is None:
            raise ConfigError(f"line {line}: key {binding.key} has no value")
        if binding.key in flat:
            raise ConfigError(
                f"duplicate key {binding.key} (lines {lines[binding.key]} and {line})"
            )
        flat[binding.key] = binding.value
        lines[binding.key] = line

    if base_dir is not None and "data.path" in flat and not Path(flat["data.path"]).is_absolute():
        flat["data.path"] = str(base_dir / flat["data.path"])

    try:
        return PipelineConfig(**_nest(flat, lines))
    except ValidationError as err:
        raise ConfigError(_describe(err, lines)) from err


def load_config(path: Optional[Path] = None) -> PipelineConfig:
    """Load a config file; ``None`` yields the all-defaults pipeline."""
    if path is None:
        return PipelineConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    config = read_config_text(text, base_dir=path.parent)
    logger.info(f"Loaded config {path} (hash {config.config_hash()[:12]})")
    return config
