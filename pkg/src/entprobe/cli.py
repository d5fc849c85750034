"""Command-line driver.

Exit codes: 0 success / product, 3 entangled, 4 witness not found,
1 parse error, 2 precondition or invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import EntProbeError, ICError, InvariantViolation, NotFound
from .io import FormatError, dumps, load, load_observables, to_record
from .measure import Observable, StateOracle, ic_budget, pure_budgets
from .pureverify import VerifyConfig, verify_pure_product
from .qcore import SystemShape, random_hermitian, upb_shifts_state
from .separability import SeesawConfig, bipartitions, is_ppt, max_product_overlap, pt_invariant, range_projector
from .witness import SearchConfig, indistinguishable_pair

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_ENTANGLED, EXIT_NOT_FOUND = 0, 1, 2, 3, 4

# A product state has overlap 1; require a clear margin below it.
UPB_OVERLAP_MARGIN = 1e-6


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def parse_shape(text: str) -> SystemShape:
    """``2,2,2`` or ``2x10`` (ten qubits) or a mix such as ``3,2x4``."""
    dims = []
    try:
        for part in text.replace(" ", "").split(","):
            if "x" in part:
                d, times = part.split("x")
                dims.extend([int(d)] * int(times))
            else:
                dims.append(int(part))
        return SystemShape(dims)
    except (ValueError, InvariantViolation) as exc:
        raise argparse.ArgumentTypeError(f"bad shape {text!r}: {exc}") from None


def _emit(payload: dict, out: str | None, command: str, seed: int | None, config: dict) -> None:
    text = dumps(payload) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)
    manifest = {
        "command": command,
        "seed": seed,
        "config": config,
        "artifact_version": __version__,
        "outputs": [str(out)],
    }
    Path(str(out) + ".manifest.json").write_text(dumps(manifest) + "\n")


def cmd_verify(args) -> int:
    try:
        psi = load(args.state, expect="pure")
    except FormatError as exc:
        raise CliError(str(exc), EXIT_PARSE)
    cfg = VerifyConfig(epsilon_norm=args.eps, tau_zero=args.tau)
    verdict = verify_pure_product(StateOracle(psi), cfg)
    budget = pure_budgets(psi.shape)[0]
    print(
        f"b={verdict.b} ({'product' if verdict.b == 0 else 'entangled'}); "
        f"observables {verdict.total_observables} / budget {budget}",
        file=sys.stderr,
    )
    _emit(verdict.to_json(), args.json, "verify", None,
          {"state": str(args.state), "eps": args.eps, "tau": args.tau})
    return EXIT_OK if verdict.b == 0 else EXIT_ENTANGLED


def random_observables(shape: SystemShape, count: int, seed: int) -> list[Observable]:
    rng = np.random.default_rng([seed, 0])
    D = shape.total_dim
    return [Observable(shape, random_hermitian(D, rng), f"O{i + 1}") for i in range(count)]


def cmd_witness(args) -> int:
    shape = args.shape
    if args.observables is not None:
        try:
            observables = load_observables(args.observables)
        except FormatError as exc:
            raise CliError(str(exc), EXIT_PARSE)
    else:
        shape.require_dense()
        observables = random_observables(shape, args.random, args.seed)
    cfg = SearchConfig(num_base=args.num_base, num_random=args.num_random, seed=args.seed)
    config = {
        "shape": list(shape.dims),
        "observables": str(args.observables) if args.observables else {"random": args.random},
        "property": args.property,
        "search": cfg.to_json(),
    }
    t = ic_budget(shape)
    try:
        pair = indistinguishable_pair(observables, shape, args.property, cfg)
    except ICError as exc:
        raise CliError(str(exc), EXIT_PRECONDITION)
    except NotFound as exc:
        print(f"not found: {exc}", file=sys.stderr)
        _emit({"status": "not_found", "diagnostics": exc.report}, args.json, "witness", args.seed, config)
        return EXIT_NOT_FOUND
    payload = {
        "rho": to_record(pair.rho),
        "sigma": to_record(pair.sigma),
        "report": pair.report(),
    }
    print(f"witness found: max_stat_gap={pair.max_stat_gap:.3e}, s={len(observables)} < t={t}", file=sys.stderr)
    _emit(payload, args.json, "witness", args.seed, config)
    return EXIT_OK


def cmd_upb(args) -> int:
    rho = upb_shifts_state()
    shape = rho.shape
    inv = {k: pt_invariant(rho, k, 1e-12) for k in range(1, shape.n + 1)}
    ppt = {tuple(b.left): is_ppt(rho, b, 1e-12) for b in bipartitions(shape)}
    cfg = SeesawConfig(restarts=args.restarts, seed=args.seed)
    res = max_product_overlap(range_projector(rho), shape, cfg)
    checks = [
        ("pt_invariant", all(inv.values())),
        ("ppt_all_bipartitions", all(ok for ok, _ in ppt.values())),
        ("product_overlap_below_1", res.best_overlap < 1.0 - UPB_OVERLAP_MARGIN),
    ]
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    payload = {
        "checks": {name: ok for name, ok in checks},
        "pt_invariant": {str(k): v for k, v in inv.items()},
        "min_pt_eigenvalues": {",".join(map(str, left)): lo for left, (_, lo) in ppt.items()},
        "seesaw": res.to_json(),
        "delta": 1.0 - res.best_overlap,
    }
    if args.json:
        _emit(payload, args.json, "upb", args.seed, {"restarts": args.restarts})
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_PRECONDITION


def cmd_budget(args) -> int:
    shape = args.shape
    t = ic_budget(shape)
    upper, lower, nonadaptive = pure_budgets(shape)
    rows = [
        ("tomography t = prod d^2 - 1", t),
        ("adaptive upper sum(2d_k - 1)", upper),
        ("adaptive lower sum 2(d_k - 1)", lower),
        ("non-adaptive lower sum(4d_k - 5)", nonadaptive),
    ]
    print(f"shape {list(shape.dims)}")
    for name, value in rows:
        print(f"  {name:<34} {value}")
    print(f"  {'ratio t / upper':<34} {t / upper:.6g}")
    if args.json:
        payload = {"dims": list(shape.dims), "t": t, "upper": upper, "adaptive_lower": lower,
                   "nonadaptive_lower": nonadaptive, "ratio": t / upper}
        _emit(payload, args.json, "budget", None, {"shape": list(shape.dims)})
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PRECONDITION, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="entprobe", description="Entanglement verification experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="adaptive product test of a pure state file")
    v.add_argument("state", help="JSON file of kind 'pure'")
    v.add_argument("--eps", type=float, default=VerifyConfig.epsilon_norm)
    v.add_argument("--tau", type=float, default=VerifyConfig.tau_zero)
    v.add_argument("--json", metavar="OUT", help="write the verdict here instead of stdout")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("witness", help="indistinguishable pair for an incomplete observable set")
    w.add_argument("shape", type=parse_shape)
    src = w.add_mutually_exclusive_group(required=True)
    src.add_argument("--observables", metavar="FILE")
    src.add_argument("--random", type=int, metavar="S", help="draw S random Hermitian observables")
    w.add_argument("--property", choices=["ppt", "separable2xN"], default="ppt")
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--num-base", type=int, default=SearchConfig.num_base)
    w.add_argument("--num-random", type=int, default=SearchConfig.num_random)
    w.add_argument("--json", metavar="OUT")
    w.set_defaults(func=cmd_witness)

    u = sub.add_parser("upb", help="certify the three-qubit UPB bound-entangled state")
    u.add_argument("--seed", type=int, default=0)
    u.add_argument("--restarts", type=int, default=SeesawConfig.restarts)
    u.add_argument("--json", metavar="OUT")
    u.set_defaults(func=cmd_upb)

    b = sub.add_parser("budget", help="print observable budgets for a shape")
    b.add_argument("shape", type=parse_shape)
    b.add_argument("--json", metavar="OUT")
    b.set_defaults(func=cmd_budget)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (EntProbeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
