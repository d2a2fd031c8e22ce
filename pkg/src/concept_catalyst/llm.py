"""Provider-agnostic LLM boundary.

Builds the two prompts the application sends (summarization, question
generation), executes completions with retry/backoff, and parses completions
into exactly-N question lists. A deterministic mock provider keeps the whole
test suite offline; the http provider speaks a minimal chat-completion wire
format.
"""

from __future__ import annotations

import hashlib
import os
import re
import time
from dataclasses import dataclass, replace
from importlib import resources
from typing import Optional, Protocol

import httpx

from .errors import (
    AuthFailureError,
    EmptyConceptsError,
    ProviderError,
    ProviderTimeoutError,
    TooFewQuestionsError,
)

TEMPLATE_VERSION = "v1"

MATERIAL_BEGIN = "<<<BEGIN MATERIAL>>>"
MATERIAL_END = "<<<END MATERIAL>>>"
SUMMARY_BEGIN = "<<<BEGIN SUMMARY>>>"
SUMMARY_END = "<<<END SUMMARY>>>"
CONCEPTS_HEADING = "Concepts the questions must address:"
RELATIONS_HEADING = "Connections between concepts:"

# Head-truncation budget for summarization input, in characters.
DEFAULT_MAX_INPUT_CHARS = 24_000


@dataclass(frozen=True)
class PromptRequest:
    template_id: str  # "summarize" | "generate_questions"
    rendered_text: str
    temperature: float = 0.2
    max_output_tokens: int = 1024
    truncated: bool = False  # input was head-truncated to fit the prompt budget


@dataclass(frozen=True)
class CompletionText:
    text: str
    provider_id: str
    latency_ms: float


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "mock"  # "mock" | "http"
    endpoint: Optional[str] = None
    model_name: Optional[str] = None
    api_key_ref: str = "CC_LLM_API_KEY"  # name of the env var holding the key
    timeout_s: float = 30.0
    max_retries: int = 2
    seed: int = 0
    backoff_base_s: float = 0.25

    def validate(self) -> None:
        if self.kind not in ("mock", "http"):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if self.kind == "http" and not (self.endpoint and self.model_name):
            raise ValueError("http provider requires endpoint and model_name")


def _load_template(template_id: str) -> str:
    name = f"{template_id}_{TEMPLATE_VERSION}.txt"
    return resources.files("concept_catalyst.templates").joinpath(name).read_text("utf-8")


def _render(template: str, mapping: dict[str, str]) -> str:
    # Plain replacement, not str.format: payload text may contain braces.
    out = template
    for key, value in mapping.items():
        out = out.replace("{" + key + "}", value)
    leftover = re.search(r"\{[a-z_]+\}", out)
    if leftover and leftover.group(0)[1:-1] in mapping:
        raise ValueError(f"unsubstituted placeholder {leftover.group(0)}")
    return out


def _escape_label(label: str) -> str:
    """Keep labels single-line inside line-oriented prompt sections."""
    return label.replace("\\", "\\\\").replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")


def build_summary_prompt(
    raw_text: str,
    target_words: int,
    max_input_chars: int = DEFAULT_MAX_INPUT_CHARS,
) -> PromptRequest:
    if not raw_text.strip():
        raise ValueError("raw_text must be non-empty")
    if target_words <= 0:
        raise ValueError("target_words must be positive")

    truncated = False
    if len(raw_text) > max_input_chars:
        head = raw_text[:max_input_chars]
        cut = head.rsplit(None, 1)  # drop the word the cut landed inside
        raw_text = cut[0] if cut else head
        truncated = True

    rendered = _render(
        _load_template("summarize"),
        {"target_words": str(target_words), "raw_text": raw_text},
    )
    return PromptRequest(
        template_id="summarize",
        rendered_text=rendered,
        max_output_tokens=max(256, target_words * 4),
        truncated=truncated,
    )


def build_question_prompt(
    summary: str,
    concepts: list[str],
    relations: list[tuple[str, str]],
    n: int,
) -> PromptRequest:
    if not concepts:
        raise EmptyConceptsError("a question group needs at least one concept")
    if n <= 0:
        raise ValueError("n must be positive")

    concept_lines = "\n".join(f"- {_escape_label(c)}" for c in concepts)
    if relations:
        relation_lines = "\n".join(
            f"- {_escape_label(a)} \u2014 {_escape_label(b)}" for a, b in relations
        )
        relations_block = f"\n{RELATIONS_HEADING}\n{relation_lines}\n\n"
    else:
        relations_block = "\n"

    rendered = _render(
        _load_template("generate_questions"),
        {
            "summary": summary,
            "concept_lines": concept_lines,
            "relations_block": relations_block,
            "n": str(n),
        },
    )
    return PromptRequest(
        template_id="generate_questions",
        rendered_text=rendered,
        temperature=0.7,
        max_output_tokens=max(256, n * 80),
    )


# -- providers ----------------------------------------------------------------


class Provider(Protocol):
    provider_id: str

    def complete(self, req: PromptRequest) -> CompletionText: ...


class MockProvider:
    """Offline provider: output is a pure function of (template_id, prompt, seed).

    Summarize returns exactly the requested number of whitespace tokens, taken
    from the head of the input material and repeated if the material is
    shorter. Question generation returns clean numbered lines cycling over the
    concept labels, each tagged with a short prompt hash so any prompt drift
    shows up in golden tests.
    """

    provider_id = "mock"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def complete(self, req: PromptRequest) -> CompletionText:
        if req.template_id == "summarize":
            text = self._summarize(req.rendered_text)
        elif req.template_id == "generate_questions":
            text = self._questions(req.rendered_text)
        else:
            raise ProviderError(f"mock provider has no template {req.template_id!r}")
        return CompletionText(text=text, provider_id=self.provider_id, latency_ms=0.0)

    def _summarize(self, prompt: str) -> str:
        m = re.search(r"approximately (\d+) words", prompt)
        target = int(m.group(1)) if m else 200
        begin = prompt.find(MATERIAL_BEGIN)
        end = prompt.find(MATERIAL_END)
        material = prompt[begin + len(MATERIAL_BEGIN):end] if 0 <= begin < end else prompt
        tokens = material.split()
        if not tokens:
            tokens = ["challenge"]
        return " ".join(tokens[i % len(tokens)] for i in range(target))

    def _questions(self, prompt: str) -> str:
        m = re.search(r"exactly (\d+) numbered", prompt)
        n = int(m.group(1)) if m else 5
        labels = self._concept_labels(prompt)
        tag = hashlib.sha256(f"{self.seed}:{prompt}".encode("utf-8")).hexdigest()[:8]
        lines = []
        for i in range(n):
            label = labels[i % len(labels)]
            lines.append(f"{i + 1}. What should students consider about {label}? [{tag}]")
        return "\n".join(lines)

    @staticmethod
    def _concept_labels(prompt: str) -> list[str]:
        labels: list[str] = []
        section = prompt.split(CONCEPTS_HEADING, 1)
        if len(section) == 2:
            for line in section[1].splitlines():
                line = line.strip()
                if line.startswith("- "):
                    labels.append(line[2:])
                elif line and labels:
                    break
        return labels or ["the challenge"]


class HttpProvider:
    """Minimal chat-completion client.

    Request body: {model, messages:[{role:"user", content}], max_tokens,
    temperature}; the completion is read at choices[0].message.content.
    """

    provider_id = "http"

    def __init__(self, cfg: ProviderConfig):
        cfg.validate()
        self.cfg = cfg

    def complete(self, req: PromptRequest) -> CompletionText:
        headers = {"content-type": "application/json"}
        api_key = os.environ.get(self.cfg.api_key_ref, "")
        if api_key:
            headers["authorization"] = f"Bearer {api_key}"
        body = {
            "model": self.cfg.model_name,
            "messages": [{"role": "user", "content": req.rendered_text}],
            "max_tokens": req.max_output_tokens,
            "temperature": req.temperature,
        }
        started = time.monotonic()
        try:
            response = httpx.post(
                self.cfg.endpoint, json=body, headers=headers, timeout=self.cfg.timeout_s
            )
        except httpx.TimeoutException as exc:
            raise ProviderTimeoutError(f"provider timed out after {self.cfg.timeout_s}s") from exc
        except httpx.HTTPError as exc:
            raise ProviderError(f"provider request failed: {exc}") from exc
        latency_ms = (time.monotonic() - started) * 1000.0

        if response.status_code in (401, 403):
            raise AuthFailureError(f"provider rejected credentials ({response.status_code})")
        if response.status_code >= 400:
            raise ProviderError(f"provider returned HTTP {response.status_code}")
        try:
            text = response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed provider response: {exc}") from exc
        return CompletionText(text=text, provider_id=self.provider_id, latency_ms=latency_ms)


def provider_for(cfg: ProviderConfig) -> Provider:
    cfg.validate()
    if cfg.kind == "mock":
        return MockProvider(seed=cfg.seed)
    return HttpProvider(cfg)


def complete(
    req: PromptRequest,
    cfg: ProviderConfig,
    provider: Optional[Provider] = None,
) -> CompletionText:
    """Run one completion with up to cfg.max_retries retries on transient failure.

    Auth failures are terminal (retrying the same key cannot help); timeouts
    and other provider errors retry with exponential backoff.
    """
    provider = provider or provider_for(cfg)
    last: Optional[ProviderError] = None
    for attempt in range(cfg.max_retries + 1):
        try:
            return provider.complete(req)
        except AuthFailureError:
            raise
        except ProviderError as exc:
            last = exc
            if attempt < cfg.max_retries and cfg.backoff_base_s > 0:
                time.sleep(cfg.backoff_base_s * (2**attempt))
    assert last is not None
    raise last


# -- completion parsing ----------------------------------------------------------

_LIST_MARKER = re.compile(r"^\s*(?:\d{1,4}[.)]|[-*])\s+")


def _strip_markers(text: str) -> str:
    while True:
        m = _LIST_MARKER.match(text)
        if not m:
            return text.strip()
        text = text[m.end():]


def parse_question_list(completion: str, n: int) -> list[str]:
    """Extract exactly n questions from a completion.

    Numbered/bulleted lines first; if that yields too few, fall back to
    splitting the text into sentences ending in "?". More than n candidates
    keeps the first n. Still too few raises TooFewQuestionsError (the caller
    owns the one re-request rung of the repair ladder).
    """
    if n <= 0:
        raise ValueError("n must be positive")

    candidates: list[str] = []
    for line in completion.splitlines():
        if _LIST_MARKER.match(line):
            item = _strip_markers(line)
            if item:
                candidates.append(item)
    if len(candidates) >= n:
        return candidates[:n]

    interrogatives = [
        _strip_markers(chunk)
        for chunk in re.findall(r"[^?]+\?", completion.replace("\n", " "))
    ]
    interrogatives = [q for q in interrogatives if q]
    if len(interrogatives) >= n:
        return interrogatives[:n]

    best = max(len(candidates), len(interrogatives))
    raise TooFewQuestionsError(f"completion contained {best} question(s), needed {n}")


def request_questions(
    summary: str,
    concepts: list[str],
    relations: list[tuple[str, str]],
    n: int,
    cfg: ProviderConfig,
    provider: Optional[Provider] = None,
) -> list[str]:
    """Build the question prompt, complete it, and parse exactly n questions.

    On a malformed completion, one automatic re-request is made with an
    appended "Return exactly {n} numbered questions." instruction before
    giving up.
    """
    req = build_question_prompt(summary, concepts, relations, n)
    completion = complete(req, cfg, provider)
    try:
        return parse_question_list(completion.text, n)
    except TooFewQuestionsError:
        retry_req = replace(
            req,
            rendered_text=req.rendered_text + f"\n\nReturn exactly {n} numbered questions.",
        )
        completion = complete(retry_req, cfg, provider)
        return parse_question_list(completion.text, n)
