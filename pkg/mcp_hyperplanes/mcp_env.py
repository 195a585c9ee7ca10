"""Environment configuration for mcp-hyperplanes.

This module handles all environment variable configuration with sensible defaults
and type conversion.
"""

from dataclasses import dataclass
import os
import json
from pathlib import Path
from typing import Optional
from enum import Enum
import logging

logger = logging.getLogger(__name__)


class TransportType(str, Enum):
    """Supported MCP server transport types."""

    STDIO = "stdio"
    HTTP = "http"
    SSE = "sse"

    @classmethod
    def values(cls) -> list[str]:
        """Get all valid transport values."""
        return [transport.value for transport in cls]


@dataclass
class HyperplanesConfig:
    """Guards, sampling sizes and server settings.

    Values come from config/settings.json (key "hyperplanes") when present, otherwise from
    the environment, otherwise from the defaults below.

    Optional environment variables (with defaults):
        HYPERPLANES_FACE_GUARD: Maximum faces the homology engine enumerates (default: 200000)
        HYPERPLANES_ISOMORPHISM_GUARD: Maximum vertex count for isomorphism search (default: 12)
        HYPERPLANES_COSET_GUARD: Maximum cosets in an intersection fragment (default: 5000)
        HYPERPLANES_BALL_GUARD: Maximum number of elements in a Cayley ball (default: 20000)
        HYPERPLANES_WORKERS: Worker threads for corpus and fragment work (default: 4)
        HYPERPLANES_TOOL_TIMEOUT: Timeout of MCP tool calls in seconds (default: 300)
        HYPERPLANES_HELLY_SAMPLES: Sampled triples in the Helly check (default: 200)
        HYPERPLANES_PAIR_SAMPLES: Sampled vertex pairs in distance checks (default: 200)
        HYPERPLANES_MCP_SERVER_TRANSPORT: "stdio", "http", or "sse" (default: stdio)
        HYPERPLANES_MCP_BIND_HOST: Host to bind for HTTP or SSE transport (default: 127.0.0.1)
        HYPERPLANES_MCP_BIND_PORT: Port to bind for HTTP or SSE transport (default: 8000)
    """

    def __init__(self, settings_path: Optional[Path] = None):
        """Initialize the configuration from JSON settings or environment variables."""
        self._overrides: dict = {}
        self._load_from_json(settings_path)
        self._validate()

    def _load_from_json(self, settings_path: Optional[Path]):
        """Try to load configuration from config/settings.json if it exists."""
        module_dir = Path(__file__).parent.parent
        config_path = settings_path or module_dir / "config" / "settings.json"

        if config_path.exists():
            try:
                with open(config_path, "r") as f:
                    config = json.load(f)
                    if "hyperplanes" in config:
                        self._json_config = config["hyperplanes"]
                        logger.info(f"Loaded hyperplanes settings from {config_path}")
                        return
            except Exception as e:
                logger.warning(f"Failed to load {config_path}: {e}, falling back to env vars")

        self._json_config = None

    def _int_setting(self, key: str, env_var: str, default: int) -> int:
        if key in self._overrides:
            return self._overrides[key]
        if self._json_config and key in self._json_config:
            return int(self._json_config[key])
        raw = os.getenv(env_var, str(default))
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"Invalid integer '{raw}' for {env_var}") from None

    def override(self, **values: int) -> None:
        """Pin settings for this process (used by CLI flags such as --face-guard)."""
        self._overrides.update({k: int(v) for k, v in values.items() if v is not None})
        self._validate()

    @property
    def face_guard(self) -> int:
        """Get the total-face guard of the homology engine.

        Default: 200000
        """
        return self._int_setting("face_guard", "HYPERPLANES_FACE_GUARD", 200_000)

    @property
    def isomorphism_guard(self) -> int:
        """Get the vertex bound for exact isomorphism search.

        Default: 12
        """
        return self._int_setting("isomorphism_guard", "HYPERPLANES_ISOMORPHISM_GUARD", 12)

    @property
    def coset_guard(self) -> int:
        """Default: 5000"""
        return self._int_setting("coset_guard", "HYPERPLANES_COSET_GUARD", 5000)

    @property
    def ball_guard(self) -> int:
        """Default: 20000"""
        return self._int_setting("ball_guard", "HYPERPLANES_BALL_GUARD", 20_000)

    @property
    def workers(self) -> int:
        """Get the number of worker threads.

        Default: 4
        """
        return self._int_setting("workers", "HYPERPLANES_WORKERS", 4)

    @property
    def tool_timeout(self) -> int:
        """Get the MCP tool timeout in seconds.

        Default: 300
        """
        return self._int_setting("tool_timeout", "HYPERPLANES_TOOL_TIMEOUT", 300)

    @property
    def helly_samples(self) -> int:
        return self._int_setting("helly_samples", "HYPERPLANES_HELLY_SAMPLES", 200)

    @property
    def pair_samples(self) -> int:
        return self._int_setting("pair_samples", "HYPERPLANES_PAIR_SAMPLES", 200)

    @property
    def mcp_server_transport(self) -> str:
        """Get the MCP server transport method.

        Valid options: "stdio", "http", "sse"
        Default: "stdio"
        """
        transport = os.getenv(
            "HYPERPLANES_MCP_SERVER_TRANSPORT", TransportType.STDIO.value
        ).lower()

        if transport not in TransportType.values():
            valid_options = ", ".join(f'"{t}"' for t in TransportType.values())
            raise ValueError(f"Invalid transport '{transport}'. Valid options: {valid_options}")
        return transport

    @property
    def mcp_bind_host(self) -> str:
        """Get the host to bind the MCP server to.

        Only used when transport is "http" or "sse".
        Default: "127.0.0.1"
        """
        return os.getenv("HYPERPLANES_MCP_BIND_HOST", "127.0.0.1")

    @property
    def mcp_bind_port(self) -> int:
        """Get the port to bind the MCP server to.

        Only used when transport is "http" or "sse".
        Default: 8000
        """
        return int(os.getenv("HYPERPLANES_MCP_BIND_PORT", "8000"))

    def _validate(self) -> None:
        """Validate that every guard and pool size is positive.

        Raises:
            ValueError: If any setting is not a positive integer.
        """
        invalid = []
        for name in (
            "face_guard",
            "isomorphism_guard",
            "coset_guard",
            "ball_guard",
            "workers",
            "tool_timeout",
            "helly_samples",
            "pair_samples",
        ):
            if getattr(self, name) < 1:
                invalid.append(name)
        if invalid:
            raise ValueError(f"Settings must be positive integers: {', '.join(invalid)}")


# Global instance placeholder for the singleton pattern
_CONFIG_INSTANCE = None


def get_config() -> HyperplanesConfig:
    """
    Gets the singleton instance of HyperplanesConfig.
    Instantiates it on the first call.
    """
    global _CONFIG_INSTANCE
    if _CONFIG_INSTANCE is None:
        _CONFIG_INSTANCE = HyperplanesConfig()
    return _CONFIG_INSTANCE


def reset_config() -> None:
    """Drop the cached configuration so the next get_config() re-reads the environment."""
    global _CONFIG_INSTANCE
    _CONFIG_INSTANCE = None
