"""Command-line interface: ``ucml <command> ...``.

Exit status is 0 for success or a true answer, 1 for a false answer or an
invalid model (with a report), and 2 for usage and parse errors.
"""

import argparse
import json
import sys
from fractions import Fraction as Frac

from . import measures as ms
from .deduction import RULE_IDS, SCHEMAS, describe_element, soundness_harness
from .errors import ModelError, ParseError, SchemaError, UcmlError
from .functors import (ACCEPTED_KINDS, Delta, Id, MeasureElem, constants, format_functor,
                       multigraph, parse_functor, verify_measure)
from .logic import parse_formula, print_formula
from .models import (check_morphism, declaration_sort, element_from_text, format_element_text,
                     load_declarations, load_map, load_model, validation_errors, parse_model)
from .semantics import (default_probes, description_set, interpret,
                        sample_elements, satisfies, valid_in_model)
from .spaces import Inj


class UsageError(Exception):
    pass


def jrat(r):
    r = Frac(r)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def jpoint(p):
    if isinstance(p, tuple):
        return [jpoint(x) for x in p]
    if isinstance(p, Inj):
        return [f"in{p.side}", jpoint(p.value)]
    if isinstance(p, MeasureElem):
        return describe_element(p)
    return str(p)


def _sort_key(p):
    return json.dumps(jpoint(p))


def _emit(args, text, data):
    if args.format == "json":
        print(json.dumps(data, ensure_ascii=False, sort_keys=False))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _model(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    return load_model(text)


def _sort(text, model):
    if text is None:
        return None
    spaces = {c.name: c.space for c in constants(model.T)}
    return parse_functor(text, spaces, model.X.name)


def _element(text, S, model):
    return element_from_text(text, S, model)


def _show(p, S):
    try:
        return format_element_text(p, S)
    except UcmlError:
        return describe_element(p)


# commands


def cmd_validate(args):
    try:
        with open(args.model, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {args.model}: {e.strerror}") from None
    m = parse_model(text)
    errs = validation_errors(m)
    if errs:
        _emit(args, "invalid\n" + "".join(f"  {e}\n" for e in errs), {"valid": False, "errors": errs})
        return 1
    text = (f"valid: {len(m.X.carrier)} states, functor {format_functor(m.T)}, "
            f"{len(m.declarations)} named measures")
    _emit(args, text, {"valid": True, "states": len(m.X.carrier), "functor": format_functor(m.T),
                       "measures": [d.name for d in m.declarations]})
    return 0


def cmd_eval(args):
    m = _model(args.model)
    sf = parse_formula(args.formula, m.T, _sort(args.sort, m))
    I = interpret(sf, m)
    S = sf.sort
    if I.explicit:
        pts = I.sorted_points()
        regime = "exhaustive"
    else:
        elems = sample_elements(S, m, default_probes(m))
        pts = [e for e in elems if e in I]
        regime = "reachable+probes"
    shown = [_show(p, S) for p in pts]
    text = f"sort {format_functor(S)}: {{{', '.join(shown)}}}"
    if regime != "exhaustive":
        text += f"  ({regime})"
    _emit(args, text, {"formula": print_formula(sf), "sort": format_functor(S), "regime": regime,
                       "set": sorted((jpoint(p) for p in pts), key=json.dumps)})
    return 0


def cmd_sat(args):
    m = _model(args.model)
    sf = parse_formula(args.formula, m.T, _sort(args.sort, m))
    e = _element(args.element, sf.sort, m)
    ok = satisfies(e, sf, m)
    _emit(args, "true" if ok else "false", {"formula": print_formula(sf), "sort": format_functor(sf.sort),
                                            "element": args.element, "satisfies": ok})
    return 0 if ok else 1


def _probes(path, model):
    if path is None:
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    decls = load_declarations(text, model)
    every = list(model.declarations) + decls
    probes = {}
    for d in decls:
        S = declaration_sort(d, every)
        for D in multigraph(model.T).nodes:
            if isinstance(D, Delta) and D.arg == S and d.measure.kind in ACCEPTED_KINDS[D.kind]:
                if verify_measure(d.measure, D.kind):
                    probes.setdefault(D, []).append(MeasureElem(d.measure, d.name))
    return probes


def cmd_valid(args):
    m = _model(args.model)
    sf = parse_formula(args.formula, m.T, _sort(args.sort, m))
    res = valid_in_model(sf, m, _probes(args.probes, m))
    text = f"{'valid' if res.valid else 'not valid'} at sort {format_functor(sf.sort)} ({res.regime}, {res.checked} checked)"
    if not res.valid:
        text += f"\n  fails at {_show(res.counterexample, sf.sort)}"
    _emit(args, text, {"formula": print_formula(sf), "sort": format_functor(sf.sort), "valid": res.valid,
                       "regime": res.regime, "checked": res.checked,
                       "counterexample": None if res.valid else jpoint(res.counterexample)})
    return 0 if res.valid else 1


def _grid(text):
    if text is None:
        return None
    try:
        out = [ms.rat(x.strip()) for x in text.split(",") if x.strip()]
    except UcmlError as e:
        raise UsageError(str(e)) from None
    if any(not 0 <= v <= 1 for v in out):
        raise UsageError("grid values must lie in [0,1]")
    return out


def cmd_des(args):
    m = _model(args.model)
    if args.depth < 0:
        raise UsageError("--depth must be non-negative")
    S = _sort(args.sort, m) or Id()
    e = _element(args.element, S, m)
    grid = _grid(args.grid)
    d = description_set(e, args.depth, grid, m, sort=S)
    lines = [f"{len(d.formulas)} formulas at sort {format_functor(S)}, depth {args.depth}, "
             f"grid {{{', '.join(jrat(g) for g in d.grid)}}}"]
    lines += [f"  {print_formula(f)}" for f in d.formulas]
    _emit(args, "\n".join(lines), {"element": args.element, "sort": format_functor(S), "depth": args.depth,
                                   "grid": [jrat(g) for g in d.grid],
                                   "formulas": [print_formula(f) for f in d.formulas]})
    return 0


def cmd_classify(args):
    m = _model(args.model)
    try:
        mu = m.measure(args.measure)
    except KeyError:
        raise UsageError(f"no measure named {args.measure!r}") from None
    g = ms.upper_side(mu)
    results = {}
    details = {}
    v = ms.is_probability(g)
    results["probability"] = v.ok
    details["probability"] = v.reason
    if args.method == "cover":
        w = ms.find_cover_violation(g, args.mmax)
        results["upper"] = None if w is None else False
        details["upper"] = (f"no cover violation with at most {args.mmax} sets (bounded search)" if w is None
                            else f"violated by a ({w.n},{w.k})-cover: {w.lhs} > {w.rhs}")
    else:
        v = ms.is_upper_probability_lp(g)
        results["upper"] = v.ok
        details["upper"] = v.reason
    v = ms.is_plausibility(g)
    results["plausibility"] = v.ok
    details["plausibility"] = v.reason
    v = ms.is_possibility(g)
    results["possibility"] = v.ok
    details["possibility"] = v.reason
    declared = mu.kind
    upper_kind = ms.DUAL_KIND[declared] if declared in ms.LOWER_SIDE else declared
    key = {ms.Kind.PROBABILITY: "probability", ms.Kind.UPPER: "upper",
           ms.Kind.PLAUSIBILITY: "plausibility", ms.Kind.POSSIBILITY: "possibility"}[upper_kind]
    ok = results[key] is not False
    lines = [f"{args.measure}: declared {declared}"]
    for k, r in results.items():
        mark = "yes" if r else ("unknown" if r is None else "no")
        lines.append(f"  {k:<13} {mark:<8} {details[k]}")
    _emit(args, "\n".join(lines), {"measure": args.measure, "declared": str(declared),
                                   "classes": results, "details": details, "consistent": ok})
    return 0 if ok else 1


def cmd_soundness(args):
    T = parse_functor(args.functor)
    schemas = None
    if args.schemas:
        schemas = [s.strip() for s in args.schemas.split(",") if s.strip()]
        bad = [s for s in schemas if s not in SCHEMAS and s not in RULE_IDS]
        if bad:
            raise UsageError(f"unknown schema ids {bad}; known: {', '.join(list(SCHEMAS) + list(RULE_IDS))}")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    rep = soundness_harness(T, args.trials, args.seed, schemas, per_schema=args.per_schema)
    _emit(args, rep.to_text(), rep.to_dict())
    return 0 if rep.ok else 1


def cmd_morphism(args):
    src, tgt = _model(args.source), _model(args.target)
    try:
        with open(args.map, encoding="utf-8") as fh:
            f = load_map(fh.read())
    except OSError as e:
        raise UsageError(f"cannot read {args.map}: {e.strerror}") from None
    formulas = []
    if args.formulas:
        with open(args.formulas, encoding="utf-8") as fh:
            formulas = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    v = check_morphism(f, src, tgt, formulas)
    text = ("morphism" if v.ok else "not a morphism") + f": {v.reason}"
    if v.ok and formulas:
        text += f" ({v.formulas_checked} formulas preserved)"
    _emit(args, text, {"morphism": v.ok, "reason": v.reason,
                       "point": None if v.point is None else jpoint(v.point),
                       "formulas_checked": v.formulas_checked})
    return 0 if v.ok else 1


def build_parser():
    p = argparse.ArgumentParser(prog="ucml", description="Model checker and soundness harness for "
                                "coalgebraic modal logics of uncertainty.")
    sub = p.add_subparsers(dest="command", required=True)

    def command(name, fn, help):
        c = sub.add_parser(name, help=help)
        c.add_argument("--format", choices=("text", "json"), default="text")
        c.set_defaults(fn=fn)
        return c

    c = command("validate", cmd_validate, "parse and validate a model file")
    c.add_argument("--model", required=True)
    c = command("eval", cmd_eval, "interpretation of a formula")
    c.add_argument("--model", required=True)
    c.add_argument("--formula", required=True)
    c.add_argument("--sort")
    c = command("sat", cmd_sat, "does an element satisfy a formula")
    c.add_argument("--model", required=True)
    c.add_argument("--element", required=True)
    c.add_argument("--formula", required=True)
    c.add_argument("--sort")
    c = command("valid", cmd_valid, "validity of a formula in a model")
    c.add_argument("--model", required=True)
    c.add_argument("--formula", required=True)
    c.add_argument("--sort")
    c.add_argument("--probes", help="file of extra measure statements used as probes")
    c = command("des", cmd_des, "bounded description set of an element")
    c.add_argument("--model", required=True)
    c.add_argument("--element", required=True)
    c.add_argument("--depth", type=int, required=True)
    c.add_argument("--grid", help="comma-separated thresholds, e.g. 0,1/2,1 (default: attained values)")
    c.add_argument("--sort")
    c = command("classify", cmd_classify, "which measure classes a named measure belongs to")
    c.add_argument("--model", required=True)
    c.add_argument("--measure", required=True)
    c.add_argument("--method", choices=("lp", "cover"), default="lp")
    c.add_argument("--mmax", type=int, default=4)
    c = command("soundness", cmd_soundness, "randomized soundness harness")
    c.add_argument("--functor", required=True)
    c.add_argument("--trials", type=int, default=100)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--schemas", help="comma-separated schema and rule ids; mutants end in '!'")
    c.add_argument("--per-schema", type=int, default=2)
    c = command("morphism", cmd_morphism, "check a coalgebra morphism")
    c.add_argument("--from", dest="source", required=True)
    c.add_argument("--to", dest="target", required=True)
    c.add_argument("--map", required=True)
    c.add_argument("--formulas", help="file with one formula per line to check for preservation")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.fn(args)
    except ModelError as e:
        _emit(args, "invalid model\n" + "".join(f"  {x}\n" for x in e.errors), {"valid": False, "errors": e.errors})
        return 1
    except (ParseError, UsageError, SchemaError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except UcmlError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
