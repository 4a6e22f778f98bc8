"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 domain error, 3 parse error,
4 optimizer non-convergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import bounds as B
from . import divergences as Dv
from . import markov as M
from . import variational as V
from .errors import DomainError, NonConvergenceError, ParseError, VerificationError
from .serialization import format_float, load_state, to_jsonable

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_VERIFY", "EXIT_DOMAIN", "EXIT_PARSE", "EXIT_NONCONV"]

EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_PARSE, EXIT_NONCONV = 0, 1, 2, 3, 4

log = logging.getLogger("renyi_bounds")

BUILTINS = {"RHO1": Dv.RHO1, "RHO2": Dv.RHO2, "TAU": Dv.TAU}

PAIR_QUANTITIES = ("d_sandwiched", "q_sandwiched", "q_petz", "q_geometric", "umegaki", "d_max")
STATE_QUANTITIES = ("cond_entropy_up", "cond_entropy_nonvar", "mutual_info_up", "mutual_info_nonvar",
                    "cmi_up", "cmi_nonvar", "gen_mutual_info", "sep_distance")
INF_QUANTITIES = ("min_cond_entropy", "max_mutual_info", "max_cmi")
QUANTITIES = PAIR_QUANTITIES + STATE_QUANTITIES + INF_QUANTITIES + ("markov_gap", "bound")


def _matrix(ref):
    """Load ``builtin:NAME`` or a state file; returns ``(matrix, dims)``."""
    if ref is None:
        raise ParseError("a state argument is required")
    if ref.startswith("builtin:"):
        key = ref.split(":", 1)[1].upper()
        if key not in BUILTINS:
            raise ParseError(f"unknown builtin {key!r}; choose from {sorted(BUILTINS)}")
        X = BUILTINS[key].copy()
        return X, (X.shape[0],)
    try:
        return load_state(ref)
    except OSError as exc:
        raise ParseError(f"cannot read {ref}: {exc}") from None


def _csv_list(text, conv=float):
    try:
        return [conv(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"cannot parse list {text!r}") from None


def _alpha_arg(text):
    return Dv.parse_alpha(text)


def _emit(obj, out=None):
    text = json.dumps(to_jsonable(obj), indent=1)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    print(text)


def _cfg(args):
    return V.DEFAULT.with_(seed=args.seed)


def _opt_payload(res):
    return {"value": res.value, "error": res.error, "converged": res.converged,
            "iterations": res.iterations, "witness": res.witness}


def _compute_bound(args):
    a = _alpha_arg(args.alpha)
    params = B.BoundParams(a, args.epsilon[0], d_a=args.d_a, d_b=args.d_b, d_c=args.d_c,
                           m_tau=args.m_tau)
    q = args.bound_quantity
    if q == "kappa":
        fn = B.bound_generic_limit if Dv.is_limit(a) else B.bound_generic
        return fn(args.approach, a, args.epsilon[0], args.kappa)
    if q == "cmi":
        fn = B.bound_cmi_limit if Dv.is_limit(a) else B.bound_cmi
        return fn(args.approach, a, args.epsilon[0], args.d_c)
    if q == "mutual_info":
        fn = B.bound_mutual_info_limit if Dv.is_limit(a) else B.bound_mutual_info
        return fn(a, args.epsilon[0], min(args.d_a, args.d_b))
    return B.bound_for_quantity(q, args.approach, params)


def cmd_compute(args) -> int:
    q = args.quantity
    if q == "bound":
        if not args.epsilon:
            raise DomainError("bound needs --epsilon")
        _emit({"quantity": "bound", "bound_quantity": args.bound_quantity, "approach": args.approach,
               "alpha": str(args.alpha), "eps": args.epsilon[0], "value": _compute_bound(args)}, args.out)
        return EXIT_OK
    rho, dims = _matrix(args.input)
    if args.dims:
        dims = tuple(_csv_list(args.dims, int))
        if int(np.prod(dims)) != rho.shape[0]:
            raise ParseError(f"dims {dims} do not match matrix size {rho.shape[0]}")
    out = {"quantity": q, "alpha": str(args.alpha) if args.alpha is not None else None}
    code = EXIT_OK
    if q in PAIR_QUANTITIES:
        sigma, _ = _matrix(args.sigma)
        if sigma.shape != rho.shape:
            raise ParseError("sigma and rho have different sizes")
        if q == "umegaki":
            out["value"] = Dv.umegaki(rho, sigma)
        elif q == "d_max":
            out["value"] = Dv.d_max(rho, sigma)
        else:
            out["value"] = getattr(Dv, q)(rho, sigma, _alpha_arg(args.alpha))
    elif q in INF_QUANTITIES:
        out["value"] = V.inf_order_quantities(rho, q, dims, _cfg(args))
    elif q == "markov_gap":
        kind = {"petz": M.RecoveryKind.petz(), "rotated": M.RecoveryKind.rotated(args.t),
                "universal": M.RecoveryKind.universal()}[args.kind]
        out["value"] = M.markov_gap(rho, kind, dims)
    elif q.endswith("_nonvar"):
        out["value"] = getattr(V, q)(rho, _alpha_arg(args.alpha), dims)
    else:
        a = _alpha_arg(args.alpha)
        if q == "gen_mutual_info":
            tau_a, _ = _matrix(args.tau_a)
            res = V.gen_mutual_info(rho, tau_a, a, dims, _cfg(args), full=True)
        elif q == "sep_distance":
            res = V.sep_distance(rho, a, dims, _cfg(args))
        else:
            res = getattr(V, q)(rho, a, dims, _cfg(args), full=True)
        out.update(_opt_payload(res))
        if not res.converged:
            code = EXIT_NONCONV
    _emit(out, args.out)
    return code


def cmd_sweep(args) -> int:
    from .sweep import SweepGrid, default_grid, run_sweep

    if args.grid:
        grid = SweepGrid.from_json(args.grid)
    else:
        base = default_grid()
        grid = SweepGrid(alphas=args.alpha or base.alphas, eps=args.epsilon or base.eps,
                         dims=args.dims_list or base.dims, quantity=args.quantity,
                         baselines=args.baselines or [])
    res = run_sweep(grid, seed=args.seed)
    text = res.to_csv(args.out) if args.format == "csv" else res.to_json(args.out)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suite

    kw = {}
    if args.dims:
        dims = tuple(_csv_list(args.dims, int))
        kw["dims"] = dims
    if args.suite == "bound-validity":
        if args.alpha:
            kw["alphas"] = tuple(args.alpha)
        if args.epsilon:
            kw["eps"] = tuple(args.epsilon)
    elif args.alpha or args.epsilon:
        raise DomainError("--alpha/--epsilon apply to bound-validity only")
    if args.suite in ("divergence-laws", "markov") and "dims" in kw:
        raise DomainError(f"--dims does not apply to {args.suite}")
    if args.suite == "divergence-laws" and args.corrupt:
        kw["corrupt"] = "subadditivity"
    rep = run_suite(args.suite, trials=args.trials, seed=args.seed, **kw)
    payload = rep.to_dict()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    print(rep.summary())
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_counterexample(args) -> int:
    r = Dv.superadditivity_counterexample(1.5)
    lines = []
    for name in ("RHO1", "RHO2", "TAU"):
        lines.append(f"{name} = {json.dumps(to_jsonable(BUILTINS[name]))}")
    for fam in ("petz", "geometric"):
        v = r[fam]
        lines.append(f"{fam}: rho1={format_float(v['rho1'])} rho2={format_float(v['rho2'])} "
                     f"sum={format_float(v['sum'])} combined={format_float(v['combined'])}")
    p, g = r["petz"], r["geometric"]
    lines.append(f"petz chain {format_float(p['sum'])} > 6 > 5.9 > {format_float(p['combined'])}: "
                 f"{'holds' if r['petz_chain'] else 'FAILS'}")
    lines.append(f"geometric chain {format_float(g['sum'])} > 9 > 6 > {format_float(g['combined'])}: "
                 f"{'holds' if r['geometric_chain'] else 'FAILS'}")
    print("\n".join(lines))
    if args.out:
        _write_json(args.out, {"matrices": BUILTINS, **r})
    return EXIT_OK if r["holds"] else EXIT_VERIFY


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(to_jsonable(obj), fh, indent=1)
        fh.write("\n")


def cmd_markov(args) -> int:
    rho, dims = _matrix(args.input)
    if args.dims:
        dims = tuple(_csv_list(args.dims, int))
    try:
        cert = M.certify_amc(rho, _alpha_arg(args.alpha), args.cert_param, args.t, dims)
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise ParseError(str(exc)) from None
    _emit({"alpha": str(args.alpha), "cert_param": args.cert_param, "t": args.t,
           "cmi_value": cert.cmi_value, "lower_bound": cert.lower_bound,
           "upper_bound": cert.upper_bound, "petz_gap": cert.petz_gap,
           "rotated_gap": cert.rotated_gap, "holds": cert.holds}, args.out)
    return EXIT_OK if cert.holds else EXIT_VERIFY


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="renyi-bounds", description="Sandwiched Renyi quantities and continuity bounds.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", help="evaluate a quantity on a state file")
    c.add_argument("quantity", choices=QUANTITIES)
    c.add_argument("--input", help="state file or builtin:RHO1|RHO2|TAU")
    c.add_argument("--sigma", help="second argument for divergences")
    c.add_argument("--tau-a", help="fixed A factor for gen_mutual_info")
    c.add_argument("--dims", help="comma-separated factor dimensions overriding the file")
    c.add_argument("--alpha", default=None)
    c.add_argument("--epsilon", type=lambda s: _csv_list(s), default=None)
    c.add_argument("--approach", default="axiomatic")
    c.add_argument("--bound-quantity", default="cond_entropy",
                   choices=[q.value for q in B.Quantity] + ["cmi", "mutual_info", "kappa"])
    c.add_argument("--d-a", type=int)
    c.add_argument("--d-b", type=int)
    c.add_argument("--d-c", type=int)
    c.add_argument("--m-tau", type=float)
    c.add_argument("--kappa", type=float)
    c.add_argument("--kind", choices=("petz", "rotated", "universal"), default="petz")
    c.add_argument("--t", type=float, default=0.0)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("sweep", help="tabulate bounds over a grid with a winner column")
    s.add_argument("--grid", help="JSON grid file")
    s.add_argument("--alpha", type=lambda t: _csv_list(t, str))
    s.add_argument("--epsilon", type=lambda t: _csv_list(t))
    s.add_argument("--dims", dest="dims_list", type=lambda t: _csv_list(t))
    s.add_argument("--quantity", default="cond_entropy")
    s.add_argument("--baselines", type=lambda t: _csv_list(t, str))
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run a randomized property suite")
    v.add_argument("suite", choices=("divergence-laws", "norm-laws", "bound-validity", "alaff", "markov"))
    v.add_argument("--trials", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--dims")
    v.add_argument("--alpha", type=lambda t: _csv_list(t))
    v.add_argument("--epsilon", type=lambda t: _csv_list(t))
    v.add_argument("--corrupt", action="store_true", help="negative control (divergence-laws)")
    v.add_argument("--out", help="JSON report path")
    v.set_defaults(func=cmd_verify)

    x = sub.add_parser("counterexample", help="superadditivity counterexample")
    x.add_argument("--out")
    x.set_defaults(func=cmd_counterexample)

    m = sub.add_parser("markov", help="certify an approximate Markov chain")
    m.add_argument("--input", required=True)
    m.add_argument("--dims")
    m.add_argument("--alpha", required=True)
    m.add_argument("--cert-param", type=float, required=True)
    m.add_argument("--t", type=float, default=0.0)
    m.add_argument("--out")
    m.set_defaults(func=cmd_markov)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NonConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, TypeError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
