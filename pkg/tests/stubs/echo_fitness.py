"""Reads one request line, answers with a fixed fitness."""
import json
import sys

value = float(sys.argv[1]) if len(sys.argv) > 1 else 0.5
request = json.loads(sys.stdin.readline())
assert "eval_id" in request and "seed" in request
print(json.dumps({"fitness": value}))
