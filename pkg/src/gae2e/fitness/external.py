"""Fitness from an external command speaking a one-line JSON protocol.

The child receives one JSON object on stdin: the parameter values keyed by
name, plus ``eval_id`` and ``seed``. It must print one JSON object on stdout,
``{"fitness": <real in [0, 1]>}`` or ``{"error": "<message>"}``, and exit 0.
"""

from __future__ import annotations

import json
import math
import shlex
import subprocess
import threading
from typing import Mapping, Sequence

from ..errors import EvaluatorFailure, MalformedResponse, NonZeroExit, Timeout

RESERVED_KEYS = ("eval_id", "seed")

_live: set[subprocess.Popen] = set()
_live_lock = threading.Lock()


def terminate_running() -> int:
    """Kill every evaluator child still running in this process."""
    with _live_lock:
        procs = list(_live)
    for proc in procs:
        try:
            proc.kill()
        except OSError:
            pass
    return len(procs)


def build_request(params: Mapping[str, float], eval_id: int, seed: int) -> str:
    clash = [k for k in RESERVED_KEYS if k in params]
    if clash:
        raise ValueError(f"parameter names clash with protocol fields: {clash}")
    msg = dict(params)
    msg["eval_id"] = eval_id
    msg["seed"] = seed
    return json.dumps(msg) + "\n"


def parse_response(stdout: str) -> float:
    line = next((ln for ln in stdout.splitlines() if ln.strip()), None)
    if line is None:
        raise MalformedResponse("no output from evaluator command")
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedResponse(f"invalid JSON reply {line[:200]!r}: {exc}") from None
    if not isinstance(msg, dict):
        raise MalformedResponse(f"reply is not an object: {line[:200]!r}")
    if "error" in msg:
        raise EvaluatorFailure(f"evaluator reported error: {msg['error']}")
    if "fitness" not in msg:
        raise MalformedResponse(f"reply has neither 'fitness' nor 'error': {line[:200]!r}")
    try:
        fitness = float(msg["fitness"])
    except (TypeError, ValueError):
        raise MalformedResponse(f"fitness is not a number: {msg['fitness']!r}") from None
    if not math.isfinite(fitness) or not 0.0 <= fitness <= 1.0:
        raise MalformedResponse(f"fitness {fitness} outside [0, 1]")
    return fitness


def run_command(command: str | Sequence[str], params: Mapping[str, float], eval_id: int, seed: int, timeout: float) -> float:
    """One attempt: spawn, exchange one line each way, enforce ``timeout``."""
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    request = build_request(params, eval_id, seed)
    try:
        proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True
        )
    except OSError as exc:
        raise NonZeroExit(f"could not start evaluator command: {exc}") from None
    with _live_lock:
        _live.add(proc)
    try:
        stdout, stderr = proc.communicate(request, timeout=timeout)
    except subprocess.TimeoutExpired:
        proc.kill()
        proc.communicate()
        raise Timeout(f"evaluator command exceeded {timeout}s") from None
    finally:
        with _live_lock:
            _live.discard(proc)
    if proc.returncode != 0:
        tail = stderr.strip().splitlines()[-1:] or [""]
        raise NonZeroExit(f"evaluator exited with status {proc.returncode}: {tail[0][:200]}")
    return parse_response(stdout)
