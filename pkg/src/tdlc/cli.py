"""Command-line front end: JSON configs in, JSON reports out.

    tdlc scale '{"model": {"field": "Qp", "p": 5, "n": 2}, "matrix": [["5", "0"], ["0", "1/5"]]}'
    tdlc shift '{"op": "counterexample_suite", "window": 4}'
    tdlc batch runs.json

A config argument is either inline JSON or a path to a JSON file.  Exit
codes: 0 success, 1 invalid config, 2 failed invariant, 3 precision or
saturation exhausted.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import jsonschema

from . import relprof, scale as sc, shift, tree
from .errors import (ConfigInvalid, NoStabilization, OrbitNotSaturated, PrecisionExhausted, SupportOverflow, TdlcError, WindowTooSmall)
from .fields import make_field
from .lattice import Lattice, LatticeModel, LinearAuto

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_EXHAUSTED = 0, 1, 2, 3

_matrix = {"type": "array", "items": {"type": "array", "items": {"type": ["string", "integer"]}}}
_model = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["lattice", "tree", "shift"]},
        "field": {"enum": ["Qp", "Fq_t"]},
        "p": {"type": "integer", "minimum": 2},
        "q": {"type": "integer", "minimum": 2},
        "n": {"type": "integer", "minimum": 1},
        "precision": {"type": "integer", "minimum": 1},
        "window": {"type": "integer"},
    },
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "properties": {
        "op": {"type": "string"},
        "model": _model,
        "matrix": _matrix,
        "generators": {"type": "array", "items": _matrix},
        "subgroup": _matrix,
        "conjugators": {"type": "array", "items": _matrix},
        "n_max": {"type": "integer", "minimum": 2},
        "max_depth": {"type": "integer", "minimum": 1},
        "precision": {"type": "integer", "minimum": 1},
        "window": {"type": "integer"},
        "annihilators": {"type": "array", "items": {"type": "object", "properties": {"h": {"type": "array", "items": {"type": "integer"}}}, "required": ["h"], "additionalProperties": False}},
        "closure": {"enum": list(shift.CLOSURES)},
        "word": {"type": "string"},
        "case": {"type": "string"},
        "radius": {"type": "integer", "minimum": 1},
        "gamma": {"type": "array", "items": {"type": ["string", "integer"]}, "minItems": 4, "maxItems": 4},
        "p": {"type": "integer", "minimum": 2},
        "k_max": {"type": "integer", "minimum": 3},
        "output": {"type": "string"},
        "verbosity": {"type": "integer", "minimum": 0},
    },
    "required": ["op"],
    "additionalProperties": False,
}

FAMILY_OPS = {
    "scale": {"scale", "scale_report", "is_minimizing", "displacement"},
    "tidy": {"tidy", "plus_minus_parts", "is_tidy_above"},
    "flat": {"flat_factor"},
    "tree": {"classify", "tree_scale", "elliptic_product", "probe"},
    "shift": {"counterexample_suite", "tail_detect", "commensuration_index"},
    "relprof": {"fingerprint", "commensuration", "rho_nested", "wreath"},
}
DEFAULT_OP = {"scale": "scale", "tidy": "tidy", "flat": "flat_factor", "tree": "classify",
              "shift": "counterexample_suite", "relprof": "fingerprint"}


def _precision(cfg) -> int:
    if "precision" in cfg:
        return cfg["precision"]
    if "precision" in cfg.get("model", {}):
        return cfg["model"]["precision"]
    return int(os.environ.get("TDLC_PRECISION", "64"))


def _field(cfg):
    m = dict(cfg.get("model") or {})
    if "field" not in m:
        raise ConfigInvalid("config needs model.field")
    m["precision"] = _precision(cfg)
    return make_field(m)


def _need(cfg, key):
    if key not in cfg:
        raise ConfigInvalid(f"operation {cfg['op']!r} needs {key!r}")
    return cfg[key]


def _lattice_setup(cfg):
    K = _field(cfg)
    A = LinearAuto(K, _need(cfg, "matrix"))
    model = LatticeModel(K, A.n)
    V = Lattice.from_matrix(K, cfg["subgroup"]) if "subgroup" in cfg else model.base()
    return K, model, A, V


def _is_tree(cfg):
    return (cfg.get("model") or {}).get("kind") == "tree"


def _tree_setup(cfg):
    K = _field(cfg)
    return K, tree.TreeModel(K), LinearAuto(K, _need(cfg, "matrix"))


def _depth(cfg):
    return cfg.get("max_depth", sc.DEFAULT_MAX_DEPTH)


def op_scale(cfg):
    if _is_tree(cfg):
        K, model, A = _tree_setup(cfg)
    else:
        K, model, A, _ = _lattice_setup(cfg)
    s = sc.scale(model, A, _depth(cfg))
    oracle = model.scale_oracle(A)
    return {"scale": s.to_json(), "oracle": oracle.value}, {"oracle_agreement": oracle == s}


def op_scale_report(cfg):
    K, model, A, _ = _lattice_setup(cfg)
    conj = [LinearAuto(K, m) for m in cfg.get("conjugators", [])]
    rep = sc.scale_report(model, A, cfg.get("n_max", 4), conj, max_depth=_depth(cfg))
    return rep.to_json(), dict(rep.checks)


def op_is_minimizing(cfg):
    K, model, A, V = _lattice_setup(cfg)
    return {"minimizing": sc.is_minimizing(model, A, V, _depth(cfg))}, {}


def op_displacement(cfg):
    K, model, A, V = _lattice_setup(cfg)
    d = sc.displacement(model, V, model.apply(A, V))
    return d.to_json(), {"symmetric": d.swapped() == sc.displacement(model, model.apply(A, V), V)}


def op_tidy(cfg):
    K, model, A, V = _lattice_setup(cfg)
    cert = sc.tidy(model, A, V, _depth(cfg))
    s = model.scale_oracle(A)
    return cert.to_json(), {"minimizing": cert.minimizing_index == s,
                            "divides_input": cert.input_index.value % cert.minimizing_index.value == 0}


def op_plus_minus(cfg):
    K, model, A, V = _lattice_setup(cfg)
    pm = sc.plus_minus_parts(model, A, V, _depth(cfg))
    return {"plus": pm.plus.to_json(), "minus": pm.minus.to_json(), **pm.to_json()}, {}


def op_is_tidy_above(cfg):
    K, model, A, V = _lattice_setup(cfg)
    return {"tidy_above": sc.is_tidy_above(model, A, V, _depth(cfg))}, {}


def op_flat(cfg):
    K = _field(cfg)
    gens = [LinearAuto(K, m) for m in _need(cfg, "generators")]
    model = LatticeModel(K, gens[0].n)
    ff = sc.flat_factor(model, gens, max_depth=_depth(cfg))
    words = list(sc.all_words(len(gens), 3))
    ok = all(ff.predicted_scale(w) == model.scale_oracle(sc.compose_word(model, gens, w)).value for w in words)
    return ff.to_json(), {"word_formula": ok, "rank_bound": ff.rank <= ff.q}


def op_classify(cfg):
    K, model, A = _tree_setup(cfg)
    c = tree.classify(A)
    return c.to_json(), {}


def op_tree_scale(cfg):
    K, model, A = _tree_setup(cfg)
    c = tree.classify(A)
    s = sc.scale(model, A, _depth(cfg))
    expect = K.q ** c.translation_length if c.kind == tree.HYPERBOLIC else 1
    return {"classification": c.to_json(), "scale": s.value}, {"scale_law": s.value == expect}


def op_elliptic_product(cfg):
    rep = tree.elliptic_product_demo(cfg.get("p", 3))
    return rep.to_json(), {"s(xy)=q^2": rep.scale_xy == rep.q ** 2, "submultiplicativity_fails": rep.submultiplicativity_fails}


def op_probe(cfg):
    tab = tree.solvable_nonflat_probe(cfg.get("k_max", 6))
    return tab.to_json(), {"strictly_increasing": tab.strictly_increasing,
                           "uniscalar": all(s == 1 for s in tab.unipotent_scales)}


def op_suite(cfg):
    rep = shift.counterexample_suite(cfg.get("window", 4))
    return rep.to_json(), {"tau_indices": rep.tau_ok, "no_commensurable_stable_code": not rep.commensurable_with_upsilon}


def _code(cfg):
    N = cfg.get("window", 4)
    anns = tuple(tuple(a["h"]) for a in cfg.get("annihilators", []))
    if not anns and "closure" not in cfg:
        return shift.AnnihilatorCode.upsilon(N)
    return shift.AnnihilatorCode(N, anns, cfg.get("closure", "none"))


def op_tail(cfg):
    return shift.tail_detect(_code(cfg)).to_json(), {}


def op_shift_index(cfg):
    K = _code(cfg)
    return {"index": shift.commensuration_index(K, cfg.get("word", "t")).value}, {}


def op_fingerprint(cfg):
    rep = relprof.completion_fingerprint(cfg.get("case", "lamplighter"), cfg.get("radius", 3), cfg.get("p", 3))
    return rep.to_json(), {"match": rep.matched}


def op_commensuration(cfg):
    p = cfg.get("p", 3)
    M = relprof.SL2Rational(p)
    gamma = M.mat(*(Fraction(x) for x in cfg.get("gamma", [p, 0, 0, f"1/{p}"])))
    disc = relprof.commensuration_index(M, gamma, cfg.get("radius", 3))
    lat = relprof.lattice_side_index(p, gamma)
    return {"coset_orbit": disc.value, "lattice_side": lat.value}, {"bridge": disc == lat}


def op_rho(cfg):
    case = cfg.get("case", "trivial_kernel")
    small, big = {"trivial_kernel": ((0, 1), (0,)), "restriction": ((0,), ()), "identity": ((0,), (0,))}[case]
    rep = relprof.rho_nested(relprof.Lamplighter(small), relprof.Lamplighter(big), cfg.get("radius", 2))
    return rep.to_json(), {"well_defined": rep.well_defined, "functorial": rep.functorial,
                           "pullback_identity": rep.pullback_identity}


def op_wreath(cfg):
    rep = relprof.s3_a3_case() if cfg.get("case", "z") == "s3" else relprof.z_mod_two_case()
    return rep.to_json(), {"homomorphism": rep.homomorphism, "projection": rep.projection_ok, "ad": rep.ad_ok}


OPS = {
    "scale": op_scale, "scale_report": op_scale_report, "is_minimizing": op_is_minimizing,
    "displacement": op_displacement, "tidy": op_tidy, "plus_minus_parts": op_plus_minus,
    "is_tidy_above": op_is_tidy_above, "flat_factor": op_flat, "classify": op_classify,
    "tree_scale": op_tree_scale, "elliptic_product": op_elliptic_product, "probe": op_probe,
    "counterexample_suite": op_suite, "tail_detect": op_tail, "commensuration_index": op_shift_index,
    "fingerprint": op_fingerprint, "commensuration": op_commensuration, "rho_nested": op_rho, "wreath": op_wreath,
}


# where each check's expected value comes from
PROVENANCE = {"oracle_agreement": "oracle", "minimizing": "oracle", "bridge": "oracle",
              "word_formula": "oracle", "scale_law": "oracle", "match": "oracle"}


def validate(cfg) -> dict:
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigInvalid(exc.message) from exc
    if cfg["op"] not in OPS:
        raise ConfigInvalid(f"unknown op {cfg['op']!r}")
    return cfg


def _status_for(exc: Exception) -> int:
    if isinstance(exc, (PrecisionExhausted, NoStabilization, OrbitNotSaturated, WindowTooSmall, SupportOverflow)):
        return EXIT_EXHAUSTED
    return EXIT_INVARIANT


def run(cfg: dict) -> tuple[dict, int]:
    """Execute one config; returns the report and its exit code."""
    cfg = validate(cfg)
    report = {"op": cfg["op"], "inputs": cfg}
    try:
        outputs, checks = OPS[cfg["op"]](cfg)
    except (ConfigInvalid, ValueError) as exc:
        if isinstance(exc, ConfigInvalid):
            raise
        raise ConfigInvalid(str(exc)) from exc
    except TdlcError as exc:
        report.update(status="error", error={"type": type(exc).__name__, "message": str(exc)})
        return report, _status_for(exc)
    provenance = {name: PROVENANCE.get(name, "invariant") for name in checks}
    report.update(outputs=outputs, checks=checks, provenance=provenance,
                  status="pass" if all(checks.values()) else "fail")
    return report, EXIT_OK if report["status"] == "pass" else EXIT_INVARIANT


# ---------- the golden suite of worked examples


def golden_configs(window: int = 4) -> list[tuple[dict, dict]]:
    """(config, expected values by dotted output path) for every worked example."""
    qp = lambda p, n=2: {"field": "Qp", "p": p, "n": n}
    diag3 = [[["2", "0", "0"], ["0", "2", "0"], ["0", "0", "2"]], [["2", "0", "0"], ["0", "4", "0"], ["0", "0", "8"]]]
    return [
        ({"op": "scale", "model": qp(5), "matrix": [["5", "0"], ["0", "1/5"]]}, {"scale.value": 5}),
        ({"op": "scale", "model": qp(3), "matrix": [["0", "1"], ["1/3", "0"]]}, {"scale.value": 3}),
        ({"op": "scale", "model": {"field": "Fq_t", "q": 2, "n": 2}, "matrix": [["t", "0"], ["0", "1/t"]]},
         {"scale.value": 2}),
        ({"op": "scale_report", "model": qp(5), "matrix": [["25", "0"], ["0", "1/5"]], "n_max": 3},
         {"scale": 5, "inverse_scale": 25, "modular": "1/5"}),
        ({"op": "tidy", "model": qp(3), "matrix": [["3", "0"], ["0", "1/3"]], "subgroup": [["1", "0"], ["1", "3"]]},
         {"minimizing_index.value": 3}),
        ({"op": "flat_factor", "model": qp(2, 3), "generators": diag3}, {"q": 3, "flat_rank": 2}),
        ({"op": "tree_scale", "model": {"kind": "tree", "field": "Qp", "p": 2}, "matrix": [["2", "0"], ["0", "1/2"]]},
         {"scale": 4, "classification.translation_length": 2}),
        ({"op": "elliptic_product", "p": 2}, {"s(xy)": 4}),
        ({"op": "elliptic_product", "p": 3}, {"s(xy)": 9}),
        ({"op": "elliptic_product", "p": 5}, {"s(xy)": 25}),
        ({"op": "probe", "k_max": 6}, {"unipotent_scales": [1] * 7}),
        ({"op": "counterexample_suite", "window": max(window, 4)}, {"sigma_index": 2 ** max(window, 4), "commensurable_with_upsilon": []}),
        ({"op": "tail_detect", "window": window}, {"verdict": "cofinite-tail", "J": 0}),
        ({"op": "tail_detect", "window": window, "annihilators": [{"h": [-1, 1]}], "closure": "forward"},
         {"verdict": "cofinite-tail"}),
        ({"op": "tail_detect", "window": max(window, 4), "annihilators": [{"h": [0, 1]}], "closure": "stable"},
         {"verdict": "finite"}),
        ({"op": "commensuration_index", "window": max(window, 4), "word": "t"}, {"index": 2}),
        ({"op": "fingerprint", "case": "lamplighter", "radius": 3}, {"matched": True}),
        ({"op": "fingerprint", "case": "sl2", "radius": 3, "p": 3}, {"matched": True}),
        ({"op": "commensuration", "p": 3, "gamma": ["3", "0", "0", "1/3"]}, {"coset_orbit": 12, "lattice_side": 12}),
        ({"op": "commensuration", "p": 3, "gamma": ["1", "1/3", "0", "1"]}, {"coset_orbit": 12}),
        ({"op": "rho_nested", "case": "trivial_kernel"}, {"kernel_order": 1, "fiber_group_order": 2}),
        ({"op": "rho_nested", "case": "restriction"}, {"fiber_group_order": 2}),
        ({"op": "wreath", "case": "z"}, {"homomorphism": True}),
        ({"op": "wreath", "case": "s3"}, {"homomorphism": True}),
    ]


_MISSING = object()


def _lookup(doc, path: str):
    for part in path.split("."):
        if not isinstance(doc, dict) or part not in doc:
            return _MISSING
        doc = doc[part]
    return doc


def golden_suite(window: int = 4, precision: int | None = None) -> dict:
    rows, worst = [], EXIT_OK
    for cfg, expected in golden_configs(window):
        if precision is not None:
            cfg["precision"] = precision
        try:
            rep, code = run(cfg)
        except ConfigInvalid as exc:
            rep, code = {"op": cfg["op"], "status": "error", "error": {"type": "ConfigInvalid", "message": str(exc)}}, 1
        if rep.get("status") != "error":
            for path, want in expected.items():
                ok = _lookup(rep["outputs"], path) == want
                rep["checks"][f"expected:{path}"] = ok
                rep["provenance"][f"expected:{path}"] = "worked-example"
            if not all(rep["checks"].values()):
                rep["status"], code = "fail", max(code, EXIT_INVARIANT)
        rows.append(rep)
        worst = max(worst, code)
    return {"op": "worked_examples", "status": "pass" if worst == EXIT_OK else "fail", "results": rows,
            "exit_code": worst}


# ---------- argument handling


def _load(arg: str):
    try:
        return json.loads(arg)
    except json.JSONDecodeError:
        path = Path(arg)
        if not path.exists():
            raise ConfigInvalid(f"not JSON and not a file: {arg!r}")
        try:
            return json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"{arg}: {exc}") from exc


def _emit(doc, output: str | None):
    text = json.dumps(doc, indent=2, sort_keys=True, default=str)
    if output:
        Path(output).write_text(text + "\n")
    else:
        print(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tdlc", description="Scale, tidy subgroups and completions on exact models.")
    sub = parser.add_subparsers(dest="command", required=True)
    for fam in FAMILY_OPS:
        p = sub.add_parser(fam, help=f"{fam} operations: {', '.join(sorted(FAMILY_OPS[fam]))}")
        p.add_argument("config", help="inline JSON or a JSON file")
        p.add_argument("-o", "--output")
    p = sub.add_parser("paper-examples", help="run every worked example and summarize")
    p.add_argument("--precision", type=int)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("-o", "--output")
    p = sub.add_parser("batch", help="run a JSON list of configs in order")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "paper-examples":
            doc = golden_suite(args.window, args.precision)
            _emit(doc, args.output)
            return doc["exit_code"]
        if args.command == "batch":
            cfgs = _load(args.file)
            if not isinstance(cfgs, list):
                raise ConfigInvalid("batch file must hold a JSON list")
            reports, worst = [], EXIT_OK
            for cfg in cfgs:
                rep, code = run(cfg)
                reports.append(rep)
                worst = max(worst, code)
            _emit({"op": "batch", "results": reports}, args.output)
            return worst
        cfg = _load(args.config)
        if not isinstance(cfg, dict):
            raise ConfigInvalid("config must be a JSON object")
        cfg.setdefault("op", DEFAULT_OP[args.command])
        if cfg["op"] not in FAMILY_OPS[args.command]:
            raise ConfigInvalid(f"op {cfg['op']!r} does not belong to the {args.command} command")
        rep, code = run(cfg)
        _emit(rep, args.output or cfg.get("output"))
        return code
    except ConfigInvalid as exc:
        print(json.dumps({"status": "error", "error": {"type": "ConfigInvalid", "message": str(exc)}}), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
