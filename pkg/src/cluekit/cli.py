"""Command-line front end.

Commands: analyze, spectrum, clue, game, perco, mc-clue, zoo, verify.
Output is JSON on stdout (schema version 1); ``--csv`` switches sweep-style
outputs to CSV.  Exit codes: 0 ok, 1 verification failure, 2 parse error,
3 guard violation, 4 degenerate function.  Randomized estimators always
require an explicit ``--seed``.  The CLUEKIT_THREADS environment variable
caps internal parallelism.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import clue as clue_mod
from . import games, infotheory, perco, spectral, suites, zoo
from .core import (
    FunctionTable,
    bernoulli_sets,
    full_mask,
    mask_from_indices,
    mask_indices,
    revealment,
    singleton_sets,
)
from .errors import DegenerateError, GuardError, ParseError
from .fnio import load_function
from .montecarlo import GENERATOR_ID, mc_clue, thread_count

SCHEMA = 1


def _emit(payload: dict):
    payload = {"schema": SCHEMA, **payload}
    json.dump(payload, sys.stdout, default=_jsonable)
    sys.stdout.write("\n")


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _fail(code: int, reason: str):
    print(json.dumps({"schema": SCHEMA, "error": reason, "exit": code}), file=sys.stderr)
    sys.exit(code)


def _load_table(spec: str) -> FunctionTable:
    if spec.endswith(".json"):
        return load_function(spec)
    return zoo.from_spec(spec).table


def _parse_subset(text: str, n: int, torus: perco.TorusSpec | None = None) -> int:
    """Subset syntax: comma-separated indices, a hex mask (0x...), or for the
    torus '+'-joined edges like h:0,1+v:2,0."""
    text = text.strip()
    if not text or text == "empty":
        return 0
    if text == "full":
        return full_mask(n)
    if torus is not None and (text.startswith("h:") or text.startswith("v:")):
        mask = 0
        for part in text.split("+"):
            kind, _, coords = part.partition(":")
            try:
                x, y = (int(c) for c in coords.split(","))
            except ValueError as exc:
                raise ParseError(f"bad edge spec '{part}'") from exc
            if kind == "h":
                mask |= 1 << torus.h_edge(x, y)
            elif kind == "v":
                mask |= 1 << torus.v_edge(x, y)
            else:
                raise ParseError(f"bad edge kind '{kind}'")
        return mask
    if text.lower().startswith("0x"):
        try:
            mask = int(text, 16)
        except ValueError as exc:
            raise ParseError(f"bad hex mask '{text}'") from exc
    else:
        try:
            mask = mask_from_indices([int(tok) for tok in text.split(",")], n)
        except ValueError as exc:
            raise ParseError(f"bad subset '{text}': {exc}") from exc
    if mask >> n:
        raise ParseError(f"mask {text} sets coordinates >= n={n}")
    return mask


METRIC_NAMES = ("l2", "spectral", "sig", "inf", "wit", "tv", "i", "kl")


def _metric_values(f: FunctionTable, mask: int, names: list[str]) -> dict:
    out = {}
    dist = None
    for name in names:
        if name == "l2":
            out["l2_clue"] = clue_mod.clue(f, mask)
        elif name == "spectral":
            if dist is None:
                dist = spectral.spectral_distribution(f, conditioned=True)
            out["spectral_clue"] = clue_mod.clue_spectral(dist, mask)
        elif name == "sig":
            out["sig"] = clue_mod.sig(f, mask)
            out["sig_i"] = infotheory.sig_i(f, mask)
        elif name == "inf":
            out["influence_set"] = clue_mod.influence_set(f, mask)
        elif name == "wit":
            out["witness"] = clue_mod.witness(f, mask)
        elif name == "tv":
            out["tv_clue"] = clue_mod.tv_clue(f, mask)
        elif name == "i":
            out["i_clue"] = infotheory.i_clue(f, mask)
        elif name == "kl":
            out["kl_clue"] = infotheory.kl_clue(f.as_indicator() if f.is_boolean() else f, mask)
        else:
            raise ParseError(f"unknown metric '{name}' (known: {','.join(METRIC_NAMES)})")
    return out


def _cmd_analyze(args) -> int:
    f = _load_table(args.fn)
    names = [m.strip() for m in args.metrics.split(",") if m.strip()]
    payload = {"fn": args.fn, "n": f.n}
    if args.subset.startswith("bernoulli:") or args.subset == "singletons":
        if args.subset == "singletons":
            dist = singleton_sets(f.n)
        else:
            dist = bernoulli_sets(f.n, float(args.subset.split(":")[1]))
        payload["expected_clue"] = clue_mod.expected_clue(f, dist)
        payload["revealment"] = revealment(dist)
    else:
        mask = _parse_subset(args.subset, f.n)
        payload["subset"] = mask_indices(mask)
        payload["metrics"] = _metric_values(f, mask, names)
    if f.is_boolean():
        payload["p_min"] = clue_mod.p_min(f)
    payload["degenerate_fibers"] = f.space.has_zero_atoms
    _emit(payload)
    return 0


def _cmd_spectrum(args) -> int:
    f = _load_table(args.fn)
    if args.efron_stein or not f.space.is_uniform_binary:
        comp = spectral.efron_stein(f)
        weights = comp.norms
        kind = "component_norms"
    else:
        weights = spectral.walsh_hadamard(f).coeffs
        kind = "coefficients"
    dist = spectral.spectral_distribution(f, conditioned=True)
    prof = spectral.stability_profile(f)
    if args.csv:
        print("mask,value")
        for mask, value in enumerate(weights):
            print(f"{mask:#x},{float(value)!r}")
        return 0
    _emit(
        {
            "fn": args.fn,
            "kind": kind,
            "values": {f"{m:#x}": float(w) for m, w in enumerate(weights)},
            "level_weights": prof.level_weights.tolist(),
            "marginals": spectral.spectral_marginals(dist).tolist(),
        }
    )
    return 0


def _cmd_clue(args) -> int:
    f = _load_table(args.fn)
    if args.all_subsets:
        values = clue_mod.clue_all_subsets_table(f)
        if args.csv:
            print("mask,clue")
            for mask, value in enumerate(values):
                print(f"{mask:#x},{float(value)!r}")
            return 0
        _emit({"fn": args.fn, "clue": {f"{m:#x}": float(v) for m, v in enumerate(values)}})
        return 0
    names = [m.strip() for m in args.metrics.split(",") if m.strip()]
    mask = _parse_subset(args.subset, f.n)
    _emit(
        {
            "fn": args.fn,
            "subset": mask_indices(mask),
            "metrics": _metric_values(f, mask, names),
        }
    )
    return 0


def _cmd_game(args) -> int:
    f = _load_table(args.fn)
    game = games.build_iclue_game(f) if args.iclue else games.build_clue_game(f)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    payload = {"fn": args.fn, "kind": "information" if args.iclue else "variance"}
    action = None
    if "bound" in checks:
        if args.action:
            from .symmetry import group_from_spec

            action = group_from_spec(args.action)
        elif not args.fn.endswith(".json"):
            action = zoo.from_spec(args.fn).action
    for check in checks:
        if check == "shapley":
            vec = games.shapley(game)
            payload["shapley"] = vec.phi.tolist()
            payload["efficiency_gap"] = abs(vec.total - game.grand_value)
        elif check == "supermod":
            ok, pair = games.is_supermodular(game)
            payload["supermodular"] = ok
            if pair is not None:
                payload["supermodular_witness"] = list(pair)
        elif check == "core":
            payload["shapley_in_core"] = games.shapley_in_core(game)
        elif check == "bound":
            if action is None:
                raise ParseError(
                    "bound check needs a tagged zoo action or an --action group spec"
                )
            report = games.transitive_game_bound(game, action)
            payload["transitive_bound"] = {
                "holds": report.bound_holds,
                "max_violation": report.max_violation,
            }
        else:
            raise ParseError(f"unknown check '{check}'")
    if args.power is not None:
        ok, pair = games.is_supermodular(games.power_clue_game(f, args.power))
        payload["power_game"] = {"k": args.power, "supermodular": ok,
                                 "witness": list(pair) if pair else None}
    _emit(payload)
    return 0


def _cmd_perco(args) -> int:
    if args.rect:
        try:
            w, h = (int(tok) for tok in args.rect.lower().split("x"))
        except ValueError as exc:
            raise ParseError(f"bad rectangle '{args.rect}', expected WxH") from exc
        rect = perco.RectangleSpec(w, h)
        if args.mc:
            if args.seed is None:
                raise ParseError("--mc requires --seed")
            estimate, stderr = perco.crossing_probability_mc(rect, args.mc, args.seed)
            _emit({"rect": [w, h], "probability": estimate, "stderr": stderr,
                   "samples": args.mc, "seed": args.seed, "generator": GENERATOR_ID})
        else:
            p = perco.crossing_probability_exact(rect)
            _emit({"rect": [w, h], "probability": float(p),
                   "probability_exact": f"{p.numerator}/{p.denominator}",
                   "self_dual": rect.self_dual})
        return 0
    if args.torus is None:
        raise ParseError("perco needs --rect WxH or --torus n")
    torus = perco.TorusSpec(args.torus)
    if args.disagree:
        try:
            dx, dy = (int(tok) for tok in args.disagree.split(","))
        except ValueError as exc:
            raise ParseError("--disagree expects dx,dy") from exc
        if args.seed is None:
            raise ParseError("--disagree requires --seed")
        est = perco.translate_disagreement(args.torus, (dx, dy), args.samples, args.seed)
        _emit({"torus": args.torus, "displacement": [dx, dy], "estimate": est.estimate,
               "ci": [est.ci_low, est.ci_high], "samples": est.samples, "seed": args.seed,
               "generator": GENERATOR_ID})
        return 0
    if args.avg_clue:
        mask = _parse_subset(args.subset or "empty", torus.edge_count, torus)
        needs_mc = torus.edge_count > perco.TORUS_TABLE_GUARD
        if needs_mc and args.seed is None:
            raise ParseError("torus beyond the exact guard requires --seed")
        report = perco.averaged_crossing_clue_bound(torus, mask, seed=args.seed)
        _emit({"torus": args.torus, "subset_mask": mask, "clue": report.clue,
               "bound": report.bound, "stderr": report.stderr, "holds": report.holds})
        return 0
    raise ParseError("perco --torus needs --avg-clue or --disagree")


def _cmd_mc_clue(args) -> int:
    n, evaluator = zoo.evaluator_from_spec(args.fn) if not args.fn.endswith(".json") else (None, None)
    if n is None:
        f = load_function(args.fn)
        n, evaluator = f.n, f.evaluator()
        space = f.space
    else:
        from .core import uniform_space

        space = uniform_space(n)
    mask = _parse_subset(args.subset, n)
    est = mc_clue(evaluator, space, mask, args.outer, args.inner, args.seed,
                  threads=thread_count())
    _emit({"fn": args.fn, "subset": mask_indices(mask), "estimate": est.estimate,
           "stderr": est.stderr, "outer": est.n_outer, "inner": est.m_inner,
           "seed": est.seed, "generator": est.generator, "clamped": est.clamped})
    return 0


def _cmd_zoo(args) -> int:
    if args.action == "list":
        _emit({"families": zoo.SPEC_FORMS})
        return 0
    raise ParseError(f"unknown zoo action '{args.action}'")


def _cmd_verify(args) -> int:
    try:
        report = suites.run_suite(args.suite)
    except KeyError:
        _fail(2, f"unknown suite '{args.suite}' (known: {', '.join(sorted(suites.SUITES))})")
    _emit(report.to_dict())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cluekit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="metrics of a function / subset pair")
    p.add_argument("--fn", required=True, help="zoo spec (e.g. maj:3) or JSON file")
    p.add_argument("--subset", required=True,
                   help="indices '0,2', hex mask '0x5', 'bernoulli:p', or 'singletons'")
    p.add_argument("--metrics", default="l2")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("spectrum", help="subset weights, level weights, marginals")
    p.add_argument("--fn", required=True)
    p.add_argument("--efron-stein", action="store_true")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("clue", help="clue metrics, optionally for all subsets")
    p.add_argument("--fn", required=True)
    p.add_argument("--subset", default="empty")
    p.add_argument("--metrics", default="l2,spectral,sig,inf,wit,tv")
    p.add_argument("--all-subsets", action="store_true")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=_cmd_clue)

    p = sub.add_parser("game", help="cooperative-game checks")
    p.add_argument("--fn", required=True)
    p.add_argument("--iclue", action="store_true")
    p.add_argument("--checks", default="shapley,supermod,core")
    p.add_argument("--action", default=None,
                   help="group spec for the bound check: cyclic:n, symmetric:n, "
                        "tribes:l,k, torus:n, or @perms.json")
    p.add_argument("--power", type=int, default=None,
                   help="also test supermodularity of clue^k")
    p.set_defaults(func=_cmd_game)

    p = sub.add_parser("perco", help="percolation crossings and torus bounds")
    p.add_argument("--rect", help="WxH vertices")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--mc", type=int, default=None, help="Monte Carlo sample count")
    p.add_argument("--torus", type=int, default=None)
    p.add_argument("--avg-clue", action="store_true")
    p.add_argument("--subset", default=None, help="edges like h:0,1+v:2,0, or a mask")
    p.add_argument("--disagree", default=None, help="displacement dx,dy")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_perco)

    p = sub.add_parser("mc-clue", help="nested Monte Carlo clue estimate")
    p.add_argument("--fn", required=True)
    p.add_argument("--subset", required=True)
    p.add_argument("--outer", type=int, default=2000)
    p.add_argument("--inner", type=int, default=50)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_mc_clue)

    p = sub.add_parser("zoo", help="zoo utilities")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=_cmd_zoo)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("suite")
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ParseError as exc:
        _fail(2, str(exc))
    except GuardError as exc:
        _fail(3, str(exc))
    except DegenerateError as exc:
        _fail(4, str(exc))
    except ValueError as exc:
        _fail(2, str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
