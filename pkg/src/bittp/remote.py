"""HTTP adapter for submitting constrained quadratic models to a remote
sampler service.

Wire format (canonical JSON, sorted keys, no whitespace):

request::

    {"constraints": [{"bound": b, "label": "...", "linear": [[i, c], ...],
                      "quadratic": [[i, j, c], ...], "sense": "<="}, ...],
     "objective": {"linear": [[i, c], ...], "offset": o,
                   "quadratic": [[i, j, c], ...]},
     "vars": n}

response::

    {"samples": [{"assignment": [0, 1, ...], "info": {...}}, ...]}

Index pairs are canonical (i < j) and entries are sorted by index, so a
given model always serializes to identical bytes. Returned assignments are
re-evaluated locally: energies come from the model objective and feasible
flags from the exact constraints, never from anything the service claims.

Credentials are read from the ``BITTP_REMOTE_TOKEN`` environment variable
and sent as a bearer token.
"""

from __future__ import annotations

import json
import os

import numpy as np
import requests

from .cqm import CqmModel, Sample, SampleSet

__all__ = [
    "RemoteError",
    "TransportError",
    "RemoteTimeout",
    "ProtocolError",
    "serialize_model",
    "wire_bytes",
    "parse_response",
    "RemoteBackend",
    "TOKEN_ENV_VAR",
]

TOKEN_ENV_VAR = "BITTP_REMOTE_TOKEN"


class RemoteError(RuntimeError):
    """Base class for remote sampling failures. All subclasses indicate the
    request may be retried; no partial state is held between attempts."""


class TransportError(RemoteError):
    """Connection-level failure or non-success HTTP status."""


class RemoteTimeout(RemoteError):
    """The service did not answer within the configured timeout."""


class ProtocolError(RemoteError):
    """The service answered with something other than the wire format."""


def serialize_model(model: CqmModel) -> dict:
    """Model as a wire-format document with deterministic entry order."""
    doc = {
        "vars": model.num_vars,
        "objective": {
            "linear": [[i, float(c)] for i, c in sorted(model.objective_linear.items())],
            "quadratic": [
                [i, j, float(c)]
                for (i, j), c in sorted(model.objective_quadratic.items())
            ],
            "offset": float(model.offset),
        },
        "constraints": [
            {
                "linear": [[i, float(c)] for i, c in sorted(con.linear.items())],
                "quadratic": [
                    [i, j, float(c)] for (i, j), c in sorted(con.quadratic.items())
                ],
                "sense": con.sense,
                "bound": con.bound,
                "label": con.label,
            }
            for con in model.constraints
        ],
    }
    return doc


def wire_bytes(model: CqmModel) -> bytes:
    """Canonical request bytes; identical models yield identical bytes."""
    return json.dumps(serialize_model(model), sort_keys=True,
                      separators=(",", ":")).encode("utf-8")


def parse_response(model: CqmModel, payload) -> SampleSet:
    """Validate a response document and rebuild samples with locally
    recomputed energy and feasibility."""
    if not isinstance(payload, dict) or "samples" not in payload:
        raise ProtocolError("response missing 'samples'")
    raw = payload["samples"]
    if not isinstance(raw, list):
        raise ProtocolError("'samples' is not a list")
    samples = []
    for k, entry in enumerate(raw):
        if not isinstance(entry, dict) or "assignment" not in entry:
            raise ProtocolError(f"sample {k} missing 'assignment'")
        assignment = entry["assignment"]
        if not isinstance(assignment, list) or len(assignment) != model.num_vars:
            raise ProtocolError(
                f"sample {k}: assignment length "
                f"{len(assignment) if isinstance(assignment, list) else '?'}"
                f" != {model.num_vars} variables"
            )
        if any(v not in (0, 1) for v in assignment):
            raise ProtocolError(f"sample {k}: assignment values must be 0 or 1")
        x = np.asarray(assignment, dtype=np.uint8)
        samples.append(
            Sample(
                assignment=x,
                energy=model.objective_value(x),
                feasible=model.check_feasible(x),
            )
        )
    return SampleSet(samples, info={"backend": "remote",
                                    "raw_info": payload.get("info", {})})


class RemoteBackend:
    """Submit models over HTTP and re-verify everything locally.

    The ``seed`` argument of :meth:`sample_cqm` is accepted for interface
    parity with the local backend but not transmitted; remote draws are not
    reproducible from here.
    """

    kind = "remote"

    def __init__(self, endpoint: str, token: str | None = None,
                 timeout: float = 60.0, session=None):
        if not endpoint:
            raise ValueError("remote backend needs an endpoint URL")
        self.endpoint = endpoint
        self.token = token if token is not None else os.environ.get(TOKEN_ENV_VAR)
        self.timeout = timeout
        self._session = session or requests.Session()

    def sample_cqm(self, model: CqmModel, seed: int | None = None) -> SampleSet:
        headers = {"Content-Type": "application/json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        try:
            resp = self._session.post(
                self.endpoint, data=wire_bytes(model),
                headers=headers, timeout=self.timeout,
            )
        except requests.Timeout as exc:
            raise RemoteTimeout(f"no response within {self.timeout}s") from exc
        except requests.RequestException as exc:
            raise TransportError(f"request failed: {exc}") from exc
        if resp.status_code != 200:
            raise TransportError(f"service returned HTTP {resp.status_code}")
        try:
            payload = resp.json()
        except ValueError as exc:
            raise ProtocolError("response body is not JSON") from exc
        return parse_response(model, payload)
