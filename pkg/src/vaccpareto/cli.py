"""Command-line entry point: ``vaccpareto <command> [options]``.

Exit status is 0 on success, 1 on malformed input and 2 when a numerical
routine fails to converge (partial results are still written when available).
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import equivalence as eqv
from .equilibrium import linear_stability, maximal_equilibrium
from .errors import NumericalError
from .model import (
    build_block_model,
    build_homogeneous,
    build_multipartite,
    build_perturbed_multipartite,
    check_strategy,
    load_model,
    model_to_dict,
    next_gen_kernel,
    save_model,
    zoo,
)
from .pareto import (
    CostFunction,
    OptimizerOptions,
    anti_pareto_frontier,
    eradication_cost,
    feasible_region_sample,
    pareto_frontier,
    write_frontier_csv,
)
from .spectral import perron_triple, re_stability_gap

THREADS_ENV = "VACC_PARETO_THREADS"
BUILDERS = ("homogeneous", "block", "multipartite", "perturbed-multipartite", "zoo")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_model_args(p):
    p.add_argument("--model", help="model JSON file")
    p.add_argument("--builder", choices=BUILDERS)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0, help="recovery rate of the homogeneous builder")
    p.add_argument("--groups", type=int, default=8)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--weights", help="block weights as a JSON list")
    p.add_argument("--kernel", help="block kernel as a JSON matrix")
    p.add_argument("--gammas", help="block recovery rates as a JSON list")
    p.add_argument("--name", default="sbm2", help="zoo model name")


def _add_cost_args(p):
    p.add_argument("--cost", choices=("uniform", "affine"), default="uniform")
    p.add_argument("--density", help="JSON file with the per-site cost density (affine cost)")


def _add_solver_args(p):
    p.add_argument("--loss", choices=("re", "i"), default="re")
    p.add_argument("--grid", type=int, default=21)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-random", type=int, default=8)
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--pg-tol", type=float, default=1e-9)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vaccpareto", description="Vaccination Pareto frontiers for heterogeneous SIS models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, helptext in (("r0", "basic reproduction number"), ("re", "effective reproduction number")):
        p = sub.add_parser(name, help=helptext)
        _add_model_args(p)
        if name == "re":
            p.add_argument("--eta", required=True, help="strategy: a number, a JSON list, or @file.json")

    p = sub.add_parser("equilibrium", help="maximal endemic equilibrium")
    _add_model_args(p)
    p.add_argument("--eta", default="1", help="strategy: a number, a JSON list, or @file.json")
    p.add_argument("--output")

    for name in ("frontier", "anti-frontier"):
        p = sub.add_parser(name, help=f"{'anti-' if name != 'frontier' else ''}Pareto frontier CSV")
        _add_model_args(p)
        _add_cost_args(p)
        _add_solver_args(p)
        p.add_argument("--output", help="CSV path (default: stdout, no sidecar)")

    p = sub.add_parser("feasible", help="sampled (cost, loss) pairs")
    _add_model_args(p)
    _add_cost_args(p)
    p.add_argument("--loss", choices=("re", "i"), default="re")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")

    p = sub.add_parser("erad-cost", help="minimal cost of eradication")
    _add_model_args(p)
    _add_cost_args(p)
    _add_solver_args(p)

    p = sub.add_parser("reduce", help="merge behaviourally identical sites")
    _add_model_args(p)
    p.add_argument("--output", help="coarse model JSON (mapping goes to <root>.mapping.json)")

    p = sub.add_parser("blowup", help="split sites into block-constant parts")
    _add_model_args(p)
    p.add_argument("--splits", required=True, help="JSON list: part counts or sub-weight lists per site")
    p.add_argument("--output", help="fine model JSON (mapping goes to <root>.mapping.json)")

    p = sub.add_parser("verify-equiv", help="check equivalence of a fine and a coarse model")
    _add_model_args(p)
    p.add_argument("--coarse", help="coarse model JSON (default: reduction of the fine model)")
    p.add_argument("--mapping", help="mapping JSON with fine_to_coarse")
    p.add_argument("--splits", help="blow the built model up first and compare against it")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("stability", help="sampled sup-gap of R_e between two models")
    _add_model_args(p)
    p.add_argument("--other", required=True, help="second model JSON")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _json(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{what} is not valid JSON: {exc}") from None


def load_or_build(args):
    if (args.model is None) == (args.builder is None):
        raise ValueError("give exactly one of --model or --builder")
    if args.model is not None:
        return load_model(args.model)
    if args.builder == "homogeneous":
        return build_homogeneous(args.kappa, args.gamma)
    if args.builder == "multipartite":
        return build_multipartite(args.groups, args.kappa)
    if args.builder == "perturbed-multipartite":
        return build_perturbed_multipartite(args.groups, args.kappa, args.eps)
    if args.builder == "zoo":
        models = zoo()
        if args.name not in models:
            raise ValueError(f"unknown zoo model {args.name!r}; choose from {sorted(models)}")
        return models[args.name]
    if args.weights is None or args.kernel is None:
        raise ValueError("the block builder needs --weights and --kernel")
    gammas = _json(args.gammas, "--gammas") if args.gammas else None
    return build_block_model(_json(args.weights, "--weights"), _json(args.kernel, "--kernel"), gammas)


def parse_strategy(text, n):
    if text.startswith("@"):
        with open(text[1:]) as fh:
            value = json.load(fh)
    else:
        value = _json(text, "--eta")
    return check_strategy(value, n)


def cost_function(args, model):
    if args.cost == "uniform":
        return CostFunction.uniform(model)
    if args.density is None:
        raise ValueError("affine cost needs --density")
    with open(args.density) as fh:
        return CostFunction.affine(model, json.load(fh))


def optimizer_options(args):
    try:
        workers = int(os.environ.get(THREADS_ENV, "1"))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer") from None
    if workers < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0")
    return OptimizerOptions(
        n_random=args.n_random, max_iter=args.max_iter, pg_tol=args.pg_tol, seed=args.seed, workers=workers
    )


def _emit(obj, out=None):
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _mapping_path(path):
    return os.path.splitext(path)[0] + ".mapping.json"


def _write_model_and_mapping(model, mapping, out):
    if out is None:
        _emit({"model": model_to_dict(model), "fine_to_coarse": mapping.fine_to_coarse.tolist()})
        return
    save_model(model, out)
    with open(_mapping_path(out), "w") as fh:
        fh.write(mapping.to_json() + "\n")


def _spectral(args):
    model = load_or_build(args)
    eta = np.ones(model.n) if args.command == "r0" else parse_strategy(args.eta, model.n)
    t = perron_triple(next_gen_kernel(model), eta)
    _emit({"value": t.rho, "iterations": t.iterations, "residual": t.residual})


def _equilibrium(args):
    model = load_or_build(args)
    eta = parse_strategy(args.eta, model.n)
    eq = maximal_equilibrium(model, eta)
    _emit(
        {
            "g": eq.g.tolist(),
            "infected_fraction": eq.infected_fraction,
            "residual": eq.residual,
            "iterations": eq.iterations,
            "maximality_certificate": eq.maximality_certificate,
            "stability": linear_stability(model, eta, eq.g).verdict.value,
        },
        args.output,
    )


def _frontier(args):
    model = load_or_build(args)
    cf = cost_function(args, model)
    opts = optimizer_options(args)
    build = pareto_frontier if args.command == "frontier" else anti_pareto_frontier
    front = build(model, args.loss, cf, args.grid, opts)
    if args.output is None:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["cost", "loss", "status"])
        for p in front.points:
            w.writerow([repr(float(p.cost)), repr(float(p.loss)), p.solver_status])
    else:
        write_frontier_csv(front, args.output)
    for note in front.notes:
        print(f"note: {note}", file=sys.stderr)


def _feasible(args):
    model = load_or_build(args)
    sample = feasible_region_sample(model, args.loss, cost_function(args, model), args.samples, args.seed)
    fh = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cost", "loss"])
        for c, l in zip(sample.costs, sample.losses):
            w.writerow([repr(float(c)), repr(float(l))])
    finally:
        if fh is not sys.stdout:
            fh.close()


def _erad(args):
    model = load_or_build(args)
    rep = eradication_cost(model, cost_function(args, model), optimizer_options(args))
    _emit(
        {
            "value": rep.value,
            "value_via_i": rep.value_via_i,
            "bound": rep.bound,
            "consistent": rep.consistent,
            "within_bound": rep.within_bound,
            "strategy": rep.strategy.tolist(),
        }
    )


def _reduce(args):
    coarse, mapping = eqv.reduce(load_or_build(args))
    _write_model_and_mapping(coarse, mapping, args.output)


def _blowup(args):
    fine, mapping = eqv.blow_up(load_or_build(args), _json(args.splits, "--splits"))
    _write_model_and_mapping(fine, mapping, args.output)


def _verify(args):
    model = load_or_build(args)
    if args.splits is not None:
        coarse = model
        fine, mapping = eqv.blow_up(model, _json(args.splits, "--splits"))
    elif args.coarse is not None:
        fine, coarse = model, load_model(args.coarse)
        if args.mapping is None:
            raise ValueError("--coarse needs --mapping")
        with open(args.mapping) as fh:
            mapping = eqv.SiteMapping.from_json(fh.read(), fine, coarse)
    else:
        fine = model
        coarse, mapping = eqv.reduce(model)
    rep = eqv.verify_equivalence(fine, coarse, mapping, args.samples, args.seed)
    _emit(rep.to_dict())
    return 0 if rep.passed else 1


def _stability(args):
    gap = re_stability_gap(load_or_build(args), load_model(args.other), args.samples, args.seed)
    _emit({"sampled_sup_gap": gap, "samples": args.samples + 3, "note": "lower bound on the supremum"})


COMMANDS = {
    "r0": _spectral,
    "re": _spectral,
    "equilibrium": _equilibrium,
    "frontier": _frontier,
    "anti-frontier": _frontier,
    "feasible": _feasible,
    "erad-cost": _erad,
    "reduce": _reduce,
    "blowup": _blowup,
    "verify-equiv": _verify,
    "stability": _stability,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args) or 0
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.partial is not None:
            partial = exc.partial
            if hasattr(partial, "tolist"):
                partial = partial.tolist()
            elif hasattr(partial, "rho"):
                partial = {"value": partial.rho, "iterations": partial.iterations, "residual": partial.residual}
            print(json.dumps({"partial": partial}, default=float), file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
