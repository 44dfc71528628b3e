"""Command line entry point.

Exit codes: 0 pass, 1 counterexample found, 2 input error, 64 usage error.
"""
import argparse
import json
import sys

import numpy as np

from . import generators as gen
from .azema import eta_martingales, mult_decomp
from .deflators import certificate_search
from .enlargement import enlarge_progressively
from .errors import DeflatorLabError
from .harness import SUITES, run_on_models, run_suite
from .inference import find_b1_measure, infer_filtration, terminal_algebra
from .io import certificate_to_dict, load_model, model_to_dict, proc_to_json, time_to_json

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_USAGE = 0, 1, 2, 64

KINDS = ("random", "density", "cox") + gen.PATHOLOGICAL_CLASSES
INSPECT_TARGETS = ("space", "bundle", "times", "decomp", "eta", "certificate", "enlarged")


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _sizes(args):
    return gen.Sizes(args.max_outcomes, args.max_horizon)


def _emit(payload, out):
    text = json.dumps(payload, indent=1, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _generate(kind, seed, sizes):
    if kind == "random":
        return gen.random_model(seed, sizes)
    if kind == "density":
        return gen.gen_density_model(seed, sizes)
    if kind == "cox":
        return gen.gen_cox_model(seed, sizes)
    return gen.gen_pathological(seed, kind, sizes)


def cmd_gen(args):
    models = []
    for i in range(args.models):
        F, tau = _generate(args.kind, f"{args.seed}:gen:{i}", _sizes(args))
        models.append(model_to_dict(F, tau))
    _emit(models[0] if len(models) == 1 else models, args.out)
    return EXIT_PASS


def _load_all(paths):
    out = []
    for path in paths:
        model = load_model(path)
        if "tau" not in model.times:
            raise DeflatorLabError(f"{path}: the model has no 'tau' time")
        out.append((path, model.space, model.tau))
    return out


def cmd_verify(args):
    if args.model:
        report = run_on_models(args.suite, _load_all(args.model), seed=args.seed)
    else:
        report = run_suite(args.suite, args.models, args.seed, _sizes(args))
    _emit(report.as_dict(), args.out)
    print(f"{report.failures} failure(s) in {report.wall_time:.2f}s", file=sys.stderr)
    return EXIT_FAIL if report.failures else EXIT_PASS


def _table(procs):
    return {k: proc_to_json(v) for k, v in procs.items()}


def cmd_inspect(args):
    model = load_model(args.model_file)
    F, tau = model.space, model.tau
    pair = enlarge_progressively(F, tau)
    b, vt = pair.bundle, pair.vt
    if args.what == "space":
        payload = model_to_dict(F, tau)
    elif args.what == "bundle":
        payload = _table(b.processes())
    elif args.what == "times":
        payload = {k: time_to_json(v) for k, v in vt.times().items()}
        payload["zeta_n"] = {str(k): time_to_json(v) for k, v in vt.zeta_n.items()}
    elif args.what == "decomp":
        md = mult_decomp(b, vt)
        payload = _table({"D": md.D, "Lhat": md.Lhat, "L_on_C": md.L.filled()})
    elif args.what == "eta":
        em = eta_martingales(b, vt)
        payload = _table({"d": em.d_comp, "n": em.n, "dtilde": em.d_tilde, "ntilde": em.n_tilde})
    elif args.what == "certificate":
        X = model.processes.get(args.process) if args.process else None
        if args.process and X is None:
            raise DeflatorLabError(f"no process named {args.process!r} in the model")
        if X is None:
            X = np.full(F.shape(), gen.ONE, dtype=object)
        cert = certificate_search(pair, b, mult_decomp(b, vt), vt, X)
        payload = certificate_to_dict(cert)
    else:
        payload = {"filtration": [[list(bl) for bl in part] for part in pair.G_space.partitions]}
    _emit(payload, args.out)
    return EXIT_PASS


def cmd_infer(args):
    model = load_model(args.model_file)
    F, tau = model.space, model.tau
    pair = enlarge_progressively(F, tau)
    H = terminal_algebra(F)
    found = find_b1_measure(F, tau, H)
    if found is None:
        _emit({"b1_level": None, "recovered": None}, args.out)
        return EXIT_PASS
    level, P = found
    rec = infer_filtration(pair.G_space, tau, H, P, reference=F)
    _emit({"b1_level": time_to_json([level])[0],
           "recovered": [[list(a) for a in alg.atoms] for alg in rec.partitions],
           "matches_reference": rec.matches}, args.out)
    return EXIT_PASS if rec.matches else EXIT_FAIL


def cmd_report(args):
    try:
        with open(args.report_file) as fh:
            data = json.load(fh)
        suites = data["suites"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DeflatorLabError(f"not a suite report: {exc}") from exc
    failures = 0
    for suite, checks in sorted(suites.items()):
        for name, st in checks.items():
            failures += st["failed"]
            flag = "FAIL" if st["failed"] else "ok"
            print(f"{suite:15s} {name:22s} {flag:4s} tested={st['tested']} "
                  f"passed={st['passed']} failed={st['failed']} skipped={st['skipped']}")
            if "counterexample" in st:
                cx = st["counterexample"]
                print(f"    first counterexample: {cx['model_id']} ({cx['message']})")
    return EXIT_FAIL if failures else EXIT_PASS


def build_parser():
    p = Parser(prog="deflator-lab", description="Exact checks for deflators under enlargement.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=Parser)

    def common(sp):
        sp.add_argument("--seed", default=0, type=int)
        sp.add_argument("--models", default=100, type=int)
        sp.add_argument("--max-outcomes", default=8, type=int)
        sp.add_argument("--max-horizon", default=5, type=int)
        sp.add_argument("--out")

    g = sub.add_parser("gen", help="generate models as JSON")
    common(g)
    g.add_argument("--kind", choices=KINDS, default="random")
    g.set_defaults(func=cmd_gen, models=1)

    v = sub.add_parser("verify", help="run a property suite")
    common(v)
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("model", nargs="*", help="model files to check instead of generated ones")
    v.set_defaults(func=cmd_verify)

    i = sub.add_parser("inspect", help="print derived objects of a model")
    i.add_argument("model_file")
    i.add_argument("what", choices=INSPECT_TARGETS)
    i.add_argument("--process", help="process name used as X for 'certificate'")
    i.add_argument("--out")
    i.set_defaults(func=cmd_inspect)

    f = sub.add_parser("infer", help="recover F from the enlarged filtration")
    f.add_argument("model_file")
    f.add_argument("--out")
    f.set_defaults(func=cmd_infer)

    r = sub.add_parser("report", help="summarise a suite report")
    r.add_argument("report_file")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "models", 1) < 0:
        print("usage error: --models must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (DeflatorLabError, OSError) as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
