"""
JSON reports from the command line
==================================

Every computation above is also reachable through ``tdlc`` with a JSON config.
The same configs can be run in-process.
"""
import json

from tdlc import cli

configs = [
    {"op": "scale", "model": {"field": "Qp", "p": 5, "n": 2}, "matrix": [["5", "0"], ["0", "1/5"]]},
    {"op": "tree_scale", "model": {"kind": "tree", "field": "Qp", "p": 3}, "matrix": [["9", "0"], ["0", "1"]]},
    {"op": "tail_detect", "window": 6},
    {"op": "scale", "model": {"field": "Qp", "p": 5, "n": 2}, "matrix": [["5", "0"], ["0", "1/5"]], "precision": 0},
]
for cfg in configs:
    try:
        rep, code = cli.run(cfg)
        print(code, rep["status"], json.dumps(rep.get("outputs", rep.get("error")), sort_keys=True)[:100])
    except cli.ConfigInvalid as exc:
        print(1, "invalid:", exc)

# Equivalent shell usage:
#   tdlc scale '{"model": {"field": "Qp", "p": 5, "n": 2}, "matrix": [["5", "0"], ["0", "1/5"]]}'
#   tdlc paper-examples --precision 4 --window 2   # surfaces the forced failure modes
