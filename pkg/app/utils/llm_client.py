"""Chat-completion mutation client with bounded retries."""
import logging
import os
from typing import Any, Dict, List, Optional, Protocol, Sequence

import anyio
import backoff
import httpx
from pydantic import BaseModel, Field

from app.config import settings
from app.exceptions import ConfigError, MutationClientError
from app.models.evolution import Candidate

logger = logging.getLogger(__name__)

RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})

SYSTEM_MESSAGE = (
    "You are an expert in uncertainty quantification for language models. You write short "
    "scoring programs in a small expression language."
)


class MutationClient(Protocol):
    """Anything that turns a prompt into proposal texts."""

    name: str

    async def propose(
        self,
        prompt: str,
        k: int,
        *,
        parents: Sequence[Candidate] = (),
        round_index: int = 0,
    ) -> List[str]:
        ...


class HttpClientConfig(BaseModel):
    """Connection and retry settings for a chat-completion endpoint."""

    endpoint: str = settings.llm_endpoint
    model: str = settings.llm_model
    temperature: float = Field(1.0, ge=0.0)
    max_tokens: int = Field(settings.llm_max_tokens, ge=1)
    retry_budget: int = Field(settings.llm_retry_budget, ge=0)
    timeout: float = Field(settings.llm_timeout, gt=0.0)
    backoff_factor: float = Field(settings.llm_backoff_factor, ge=0.0)
    api_key_env: str = settings.llm_api_key_env
    max_in_flight: int = Field(settings.llm_max_in_flight, ge=1)


class _RetryableError(Exception):
    def __init__(self, message: str, status_code: Optional[int] = None):
        super().__init__(message)
        self.status_code = status_code


class HttpMutationClient:
    """
    Sends one chat-completion request per wanted proposal.

    HTTP 429/5xx, timeouts and transport errors are retried with exponential backoff up
    to ``retry_budget`` times; any other failure is raised immediately.
    """

    def __init__(
        self, config: HttpClientConfig, transport: Optional[httpx.AsyncBaseTransport] = None
    ):
        api_key = os.environ.get(config.api_key_env)
        if not api_key:
            raise ConfigError(
                f"environment variable {config.api_key_env} is not set "
                f"(API key for {config.endpoint})"
            )
        self.config = config
        self.name = config.model
        self._api_key = api_key
        self._transport = transport

    def _payload(self, prompt: str) -> Dict[str, Any]:
        return {
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": SYSTEM_MESSAGE},
                {"role": "user", "content": prompt},
            ],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }

    async def _send_once(
        self, client: httpx.AsyncClient, payload: Dict, attempts: List[int]
    ) -> str:
        attempts[0] += 1
        try:
            response = await client.post(self.config.endpoint, json=payload)
        except httpx.TimeoutException as e:
            raise _RetryableError(f"request timed out after {self.config.timeout}s") from e
        except httpx.TransportError as e:
            raise _RetryableError(f"transport error: {e}") from e
        if response.status_code in RETRYABLE_STATUS:
            raise _RetryableError(f"HTTP {response.status_code}", response.status_code)
        if response.status_code >= 400:
            raise MutationClientError(
                f"HTTP {response.status_code} from {self.config.endpoint}: {response.text[:200]}",
                attempts=attempts[0],
                status_code=response.status_code,
            )
        try:
            return response.json()["choices"][0]["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise MutationClientError(
                "malformed chat-completion response", attempts=attempts[0]
            ) from e

    def _log_backoff(self, details: Dict) -> None:
        logger.warning(
            f"Chat request attempt {details['tries']} failed, retrying in {details['wait']:.1f}s"
        )

    async def complete(self, client: httpx.AsyncClient, prompt: str) -> str:
        """One proposal text, retried within the budget."""
        attempts = [0]
        send = backoff.on_exception(
            backoff.expo,
            _RetryableError,
            max_tries=self.config.retry_budget + 1,
            factor=self.config.backoff_factor,
            jitter=None,
            on_backoff=self._log_backoff,
        )(self._send_once)
        try:
            return await send(client, self._payload(prompt), attempts)
        except _RetryableError as e:
            raise MutationClientError(
                f"{e} (gave up after {attempts[0]} attempts)",
                attempts=attempts[0],
                status_code=e.status_code,
            ) from e

    async def propose(
        self,
        prompt: str,
        k: int,
        *,
        parents: Sequence[Candidate] = (),
        round_index: int = 0,
    ) -> List[str]:
        """
        Request ``k`` completions of ``prompt`` concurrently.

        Raises:
            MutationClientError: every request failed (the first error is raised)
        """
        limiter = anyio.CapacityLimiter(self.config.max_in_flight)
        texts: List[Optional[str]] = [None] * k
        errors: List[MutationClientError] = []
        headers = {"Authorization": f"Bearer {self._api_key}"}

        async with httpx.AsyncClient(
            transport=self._transport, timeout=self.config.timeout, headers=headers
        ) as client:

            async def request(slot: int) -> None:
                async with limiter:
                    try:
                        texts[slot] = await self.complete(client, prompt)
                    except MutationClientError as e:
                        errors.append(e)

            async with anyio.create_task_group() as tg:
                for slot in range(k):
                    tg.start_soon(request, slot)

        received = [text for text in texts if text is not None]
        if errors and not received:
            raise errors[0]
        if errors:
            logger.warning(
                f"Round {round_index}: {len(errors)} of {k} proposal requests failed"
            )
        return received
