"""Newline-delimited JSON scorer protocol over TCP or stdio.

Requests and responses, one JSON object per line:

    {"op":"loss_batch","items":[{"tokens":[...],"slots":[...],"intent":"..."}]}
        -> {"losses":[...]}
    {"op":"predict_batch","items":[{"tokens":[...]}]}
        -> {"predictions":[{"intent":"...","slots":[...]}]}

Failures produce ``{"error":"..."}`` and keep the connection open. The
reference server wraps any local Scorer (normally a JointLinearModel);
:class:`ExternalScorerClient` is the matching Scorer implementation that
talks to any conforming server, remote errors are propagated without retry.
"""

from __future__ import annotations

import json
import socket
import socketserver
import threading
from typing import IO, Sequence

from .corpus import Utterance
from .errors import CodeswitchError, TransportError
from .model import Scorer

REMOTE_LANG = "und"  # wire items carry no language tag


def handle_request(scorer: Scorer, request: dict) -> dict:
    """Dispatch one parsed request object against a local scorer."""
    try:
        op = request.get("op")
        if op == "loss_batch":
            us = [
                Utterance(
                    str(k), REMOTE_LANG, tuple(item["tokens"]), tuple(item["slots"]),
                    item["intent"],
                )
                for k, item in enumerate(request["items"])
            ]
            return {"losses": scorer.loss_batch(us)}
        if op == "predict_batch":
            preds = scorer.predict_batch([tuple(item["tokens"]) for item in request["items"]])
            return {
                "predictions": [{"intent": intent, "slots": list(slots)} for intent, slots in preds]
            }
        return {"error": f"unknown op {op!r}"}
    except (CodeswitchError, KeyError, TypeError, ValueError) as e:
        return {"error": f"{type(e).__name__}: {e}"}


def _serve_stream(scorer: Scorer, rfile: IO[bytes], wfile: IO[bytes]) -> None:
    for raw in rfile:
        line = raw.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as e:
            response = {"error": f"bad JSON: {e}"}
        else:
            response = handle_request(scorer, request)
        wfile.write(json.dumps(response, ensure_ascii=False).encode("utf-8") + b"\n")
        wfile.flush()


class ScorerServer(socketserver.ThreadingTCPServer):
    """TCP reference server; one in-flight request per connection."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, scorer: Scorer, host: str = "127.0.0.1", port: int = 0):
        self.scorer = scorer

        class Handler(socketserver.StreamRequestHandler):
            def handle(inner) -> None:
                try:
                    _serve_stream(self.scorer, inner.rfile, inner.wfile)
                except (ConnectionError, BrokenPipeError):
                    pass

        super().__init__((host, port), Handler)

    @property
    def endpoint(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"

    def serve_in_background(self) -> threading.Thread:
        t = threading.Thread(target=self.serve_forever, daemon=True)
        t.start()
        return t


def serve_stdio(scorer: Scorer, stdin: IO[bytes], stdout: IO[bytes]) -> None:
    """Serve the protocol over a byte stream pair (for stdio bridging)."""
    _serve_stream(scorer, stdin, stdout)


class ExternalScorerClient:
    """Scorer backed by a remote protocol server at ``host:port``.

    Batches larger than ``max_batch`` are chunked; response order is
    preserved. Not thread-safe: use one client per thread.
    """

    def __init__(self, endpoint: str, timeout: float = 30.0, max_batch: int = 64):
        host, _, port_s = endpoint.rpartition(":")
        try:
            self._address = (host, int(port_s))
        except ValueError:
            raise TransportError(endpoint, "endpoint must be host:port") from None
        if not host:
            raise TransportError(endpoint, "endpoint must be host:port")
        self.endpoint = endpoint
        self.timeout = timeout
        self.max_batch = max_batch
        self._sock: socket.socket | None = None
        self._rfile: IO[bytes] | None = None

    def _connect(self) -> None:
        if self._sock is not None:
            return
        try:
            self._sock = socket.create_connection(self._address, timeout=self.timeout)
            self._rfile = self._sock.makefile("rb")
        except OSError as e:
            self._sock = None
            self._rfile = None
            raise TransportError(self.endpoint, f"connect failed: {e}") from None

    def close(self) -> None:
        if self._rfile is not None:
            self._rfile.close()
            self._rfile = None
        if self._sock is not None:
            self._sock.close()
            self._sock = None

    def __enter__(self) -> "ExternalScorerClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _roundtrip(self, request: dict) -> dict:
        self._connect()
        assert self._sock is not None and self._rfile is not None
        try:
            self._sock.sendall(json.dumps(request, ensure_ascii=False).encode("utf-8") + b"\n")
            raw = self._rfile.readline()
        except OSError as e:
            self.close()
            raise TransportError(self.endpoint, f"transport failure: {e}") from None
        if not raw:
            self.close()
            raise TransportError(self.endpoint, "connection closed by server")
        try:
            response = json.loads(raw)
        except json.JSONDecodeError as e:
            raise TransportError(self.endpoint, f"unparseable response: {e}") from None
        if "error" in response:
            raise TransportError(self.endpoint, f"remote error: {response['error']}")
        return response

    def _chunks(self, seq: Sequence) -> list[Sequence]:
        return [seq[i : i + self.max_batch] for i in range(0, len(seq), self.max_batch)]

    def loss_batch(self, us: Sequence[Utterance]) -> list[float]:
        out: list[float] = []
        for chunk in self._chunks(list(us)):
            items = [
                {"tokens": list(u.tokens), "slots": list(u.slots), "intent": u.intent}
                for u in chunk
            ]
            response = self._roundtrip({"op": "loss_batch", "items": items})
            losses = response.get("losses")
            if not isinstance(losses, list) or len(losses) != len(chunk):
                raise TransportError(self.endpoint, "malformed loss_batch response")
            out.extend(float(x) for x in losses)
        return out

    def loss(self, u: Utterance) -> float:
        return self.loss_batch([u])[0]

    def predict_batch(self, batch: Sequence[Sequence[str]]) -> list[tuple[str, list[str]]]:
        out: list[tuple[str, list[str]]] = []
        for chunk in self._chunks(list(batch)):
            items = [{"tokens": list(tokens)} for tokens in chunk]
            response = self._roundtrip({"op": "predict_batch", "items": items})
            preds = response.get("predictions")
            if not isinstance(preds, list) or len(preds) != len(chunk):
                raise TransportError(self.endpoint, "malformed predict_batch response")
            for p in preds:
                out.append((p["intent"], list(p["slots"])))
        return out

    def predict(self, tokens: Sequence[str]) -> tuple[str, list[str]]:
        return self.predict_batch([tokens])[0]
