"""Planner clients: where plan documents come from, with validated retries."""

from __future__ import annotations

import json
import logging
import os
import urllib.error
import urllib.request
from pathlib import Path
from typing import Any, Callable, Optional, Protocol

from roomstack.errors import PlanError
from roomstack.pipeline.plans import (
    GROUPING_FILE,
    HIERARCHY_PREFIX,
    PLACEMENT_FILE,
    REQUIREMENT_FILE,
    parse_plan,
)

log = logging.getLogger(__name__)

RETRIES = 3
REQUEST_KINDS = ("decompose", "group", "hierarchy", "place", "augment", "validate")
TOKEN_ENV = "ROOMSTACK_PLANNER_TOKEN"

# request kind -> plan kind its response must parse as
RESPONSE_KIND = {
    "decompose": "requirement",
    "group": "grouping",
    "hierarchy": "hierarchy",
    "place": "placement",
    "augment": "augment",
}


class PlannerClient(Protocol):
    def request(self, kind: str, payload: dict, feedback: list[str]) -> Any:
        """Return the raw response document for ``kind``; ``feedback`` lists earlier failure reasons."""
        ...


class FilePlanner:
    """Answers requests from pre-authored plan files in a directory.

    ``augment`` reads augment.json; ``validate`` always accepts.
    """

    FILES = {"decompose": REQUIREMENT_FILE, "group": GROUPING_FILE, "place": PLACEMENT_FILE, "augment": "augment.json"}

    def __init__(self, directory: Path | str) -> None:
        self.directory = Path(directory)

    def request(self, kind: str, payload: dict, feedback: list[str]) -> Any:
        if kind not in REQUEST_KINDS:
            raise PlanError(f"unknown planner request {kind!r}")
        if kind == "validate":
            return {"is_valid": True, "checks": [], "fixes": []}
        name = f"{HIERARCHY_PREFIX}{payload['arrangement']}.json" if kind == "hierarchy" else self.FILES[kind]
        path = self.directory / name
        if not path.exists():
            raise PlanError(f"file planner has no {name} in {self.directory}")
        return json.loads(path.read_text())


class HttpPlanner:
    """POSTs ``{"kind", "payload", "feedback"}`` to a planner service and returns its JSON body."""

    def __init__(self, url: str, token_env: str = TOKEN_ENV, timeout: float = 120.0) -> None:
        self.url = url
        self.token_env = token_env
        self.timeout = timeout

    def request(self, kind: str, payload: dict, feedback: list[str]) -> Any:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        body = json.dumps({"kind": kind, "payload": payload, "feedback": feedback}).encode()
        req = urllib.request.Request(self.url, body, headers, method="POST")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.loads(resp.read().decode())
        except (urllib.error.URLError, json.JSONDecodeError) as exc:
            raise PlanError(f"planner request {kind!r} failed: {exc}") from exc


def request_plan(
    planner: PlannerClient,
    kind: str,
    payload: dict,
    check: Optional[Callable[[Any], list[str]]] = None,
    retries: int = RETRIES,
) -> tuple[Any, Any]:
    """Ask until the response parses and passes ``check``; returns (typed plan, raw document).

    Each failed attempt's reasons are fed back on the next request. After
    ``retries`` failures the last reasons are raised as a PlanError.
    """
    if kind not in RESPONSE_KIND:
        raise PlanError(f"request kind {kind!r} does not produce a plan")
    feedback: list[str] = []
    reasons: list[str] = []
    for attempt in range(retries):
        raw = planner.request(kind, payload, list(feedback))
        try:
            plan = parse_plan(RESPONSE_KIND[kind], raw)
            reasons = check(plan) if check is not None else []
        except PlanError as exc:
            reasons = exc.violations
        if not reasons:
            return plan, raw
        log.info("planner %s attempt %d rejected: %s", kind, attempt + 1, reasons[0])
        feedback.extend(reasons)
    raise PlanError(f"planner gave no valid {kind} plan after {retries} attempts", reasons)
