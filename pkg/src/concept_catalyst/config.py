"""Service configuration, loadable from CC_* environment variables."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .errors import DataDirUnwritableError
from .llm import ProviderConfig

DEFAULT_BIND = "127.0.0.1:8080"
DEFAULT_DATA_DIR = "./data"
DEFAULT_MAX_UPLOAD_BYTES = 10_485_760


def _flag(value: str) -> bool:
    return value.strip().lower() in ("1", "true", "yes", "on")


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    data_dir: Path = field(default_factory=lambda: Path(DEFAULT_DATA_DIR))
    summary_target_words: int = 200
    questions_per_group: int = 5
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD_BYTES
    export_include_summary: bool = True
    page_size: str = "letter"
    static_dir: Optional[Path] = None

    def validate(self) -> None:
        for name in ("summary_target_words", "questions_per_group", "max_upload_bytes", "port"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.page_size.lower() not in ("letter", "a4"):
            raise ValueError(f"page_size must be letter or a4, got {self.page_size!r}")
        self.provider.validate()

    def ensure_data_dir(self) -> None:
        """Create the data directory and prove it is writable."""
        try:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            probe = self.data_dir / ".write-probe"
            probe.write_text("", encoding="utf-8")
            probe.unlink()
        except OSError as exc:
            raise DataDirUnwritableError(f"data_dir {self.data_dir} not writable: {exc}") from exc

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> "ServiceConfig":
        env = os.environ if env is None else env
        bind = env.get("CC_BIND", DEFAULT_BIND)
        host, _, port = bind.rpartition(":")
        provider = ProviderConfig(
            kind=env.get("CC_LLM_KIND", "mock"),
            endpoint=env.get("CC_LLM_ENDPOINT") or None,
            model_name=env.get("CC_LLM_MODEL") or None,
            api_key_ref="CC_LLM_API_KEY",
            timeout_s=int(env.get("CC_LLM_TIMEOUT_MS", "30000")) / 1000.0,
            max_retries=int(env.get("CC_LLM_MAX_RETRIES", "2")),
            seed=int(env.get("CC_MOCK_SEED", "0")),
        )
        static = env.get("CC_STATIC_DIR", "")
        cfg = cls(
            host=host or "127.0.0.1",
            port=int(port or "8080"),
            data_dir=Path(env.get("CC_DATA_DIR", DEFAULT_DATA_DIR)),
            summary_target_words=int(env.get("CC_SUMMARY_WORDS", "200")),
            questions_per_group=int(env.get("CC_QUESTIONS_PER_GROUP", "5")),
            provider=provider,
            max_upload_bytes=int(env.get("CC_MAX_UPLOAD_BYTES", str(DEFAULT_MAX_UPLOAD_BYTES))),
            export_include_summary=_flag(env.get("CC_EXPORT_INCLUDE_SUMMARY", "true")),
            page_size=env.get("CC_PAGE_SIZE", "letter"),
            static_dir=Path(static) if static else None,
        )
        cfg.validate()
        return cfg
