"""Command-line front end: ``jlab terms|chain|spectrum|congruences|check``.

Exit codes: 0 success, 1 identity violated (``check``), 2 malformed input,
3 not found, 4 inconclusive (cap reached), 5 a step or equation failed
validation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .algebra import FiniteAlgebra, load_algebra
from .chains import (
    STRICT,
    TRY_ALL,
    ChainContext,
    full_reduction,
    initial_chain,
    thm22_chain,
    thm43_chain,
    thm44_chain,
    validate_chain,
    validate_nln,
)
from .chains.report import chain_to_json, render_text
from .errors import (
    AlgebraFormatError,
    AmbiguousFormula,
    ArityMismatch,
    NoSuchX,
    NotFound,
    ResourceLimit,
    StepValidationFailed,
    UnknownSymbol,
    VerificationFailed,
)
from .generators import generate, named_congruences
from .maltsev import Flavor, JonssonSystem, find_level, find_terms, jonsson_to_alvin, verify_system
from .relations import Congruence, all_congruences
from .verifier import BETA_FIRST, GAMMA_FIRST, IdentityInstance, spectrum, violations

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_INPUT = 2
EXIT_NOT_FOUND = 3
EXIT_CAP = 4
EXIT_VALIDATION = 5

CONSTRUCTIONS = ("thm22", "thm23", "thm43", "thm44", "initial", "full-reduction")


class UsageError(Exception):
    pass


@dataclass
class CommandConfig:
    """Parsed arguments after the input algebra has been resolved."""

    args: argparse.Namespace
    alg: FiniteAlgebra


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(obj) -> None:
    print(obj if isinstance(obj, str) else json.dumps(obj, indent=2))


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("values must be at least 1")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jlab", description="Jónsson terms, witness chains and "
                                "congruence identities of finite algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--gen", help="built-in algebra, e.g. lattice-chain:3, lattice-prod:2x2, z2")
        g.add_argument("--input", help="algebra JSON file")
        return sp

    def with_triple(sp):
        for name in ("alpha", "beta", "gamma"):
            sp.add_argument(f"--{name}", default="top",
                            help="congruence: canonical index, block vector ('0 0 1 1') or name")

    sp = with_input(sub.add_parser("terms", help="search for a Jónsson-type term system"))
    sp.add_argument("--flavor", choices=("jonsson", "alvin", "defective4", "level"), default="jonsson")
    sp.add_argument("--n", type=_positive, default=4, help="system length (upper bound for 'level')")
    sp.add_argument("--cap", type=_positive, help="closure cap (default: JLAB_CAP or 1000000)")

    sp = with_input(sub.add_parser("chain", help="build and validate a witness chain"))
    sp.add_argument("--construction", choices=CONSTRUCTIONS, default="thm22")
    with_triple(sp)
    sp.add_argument("--elements", help="b_0,...,b_n (default: first valid chain found)")
    sp.add_argument("--n", type=_positive, help="chain length n, or the system length for thm43/thm44")
    sp.add_argument("--system", help="term system JSON (default: search)")
    sp.add_argument("--x", type=int, help="element X for thm44 (default: search)")
    sp.add_argument("--x-end", type=int, help="mirrored element X' for thm44 (default: search)")
    sp.add_argument("--reading", choices=(STRICT, TRY_ALL), default=TRY_ALL,
                    help="strict: first reading only; try-all: every candidate in order")
    sp.add_argument("--paper-reading", dest="reading", choices=(STRICT, TRY_ALL),
                    help=argparse.SUPPRESS)
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.add_argument("--cap", type=_positive)

    sp = with_input(sub.add_parser("spectrum", help="minimal k over all congruence triples"))
    sp.add_argument("--m", type=_int_list, default=[4])
    sp.add_argument("--k-max", type=_positive)
    sp.add_argument("--rhs-start", choices=(BETA_FIRST, GAMMA_FIRST), default=BETA_FIRST)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--cap", type=_positive, help="largest congruence lattice to tabulate")

    sp = with_input(sub.add_parser("congruences", help="list the congruence lattice"))
    sp.add_argument("--format", choices=("json", "text"), default="text")

    sp = with_input(sub.add_parser("check", help="test one congruence identity"))
    with_triple(sp)
    sp.add_argument("--m", type=_positive, required=True)
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--rhs-start", choices=(BETA_FIRST, GAMMA_FIRST), default=BETA_FIRST)
    return p


def _load(args) -> FiniteAlgebra:
    if args.gen:
        return generate(args.gen)
    if args.input:
        try:
            return load_algebra(args.input)
        except OSError as exc:
            raise AlgebraFormatError(str(exc), args.input) from None
    raise UsageError("an input algebra is required (--gen SPEC or --input FILE)")


def resolve_congruence(alg: FiniteAlgebra, text: str, cons=None) -> Congruence:
    text = text.strip()
    names = named_congruences(alg)
    if text in names:
        return names[text]
    cons = all_congruences(alg) if cons is None else cons
    if text.isdigit():
        i = int(text)
        if i >= len(cons):
            raise UsageError(f"congruence index {i} out of range (0..{len(cons) - 1})")
        return cons[i]
    try:
        th = Congruence.parse(text)
    except ValueError:
        raise UsageError(f"cannot read congruence {text!r}") from None
    if th.size != alg.size or th not in cons:
        raise UsageError(f"{text!r} is not a congruence of {alg.name}")
    return th


def _triple(alg, args):
    cons = all_congruences(alg)
    return tuple(resolve_congruence(alg, getattr(args, n), cons) for n in ("alpha", "beta", "gamma"))


# ---------------------------------------------------------------------------
# terms
# ---------------------------------------------------------------------------


def cmd_terms(cfg: CommandConfig) -> int:
    args, alg = cfg.args, cfg.alg
    if args.flavor == "level":
        system = find_level(alg, max(2, args.n), cap=args.cap)
        if system is None:
            _emit({"algebra": alg.name, "found": False, "searched_up_to": max(2, args.n)})
            return EXIT_NOT_FOUND
    else:
        flavor = {"jonsson": Flavor.jonsson, "alvin": Flavor.alvin}.get(args.flavor)
        flavor = Flavor.defective4() if flavor is None else flavor(args.n)
        try:
            system = find_terms(alg, flavor, cap=args.cap)
        except NotFound as exc:
            _emit({"algebra": alg.name, "flavor": str(flavor), "found": False, "reason": str(exc)})
            return EXIT_NOT_FOUND
    out = system.to_json()
    out["verified"] = verify_system(alg, system).ok
    _emit(out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# chain
# ---------------------------------------------------------------------------


def _system_for(cfg: CommandConfig, construction: str, n: int) -> JonssonSystem:
    args, alg = cfg.args, cfg.alg
    if args.system:
        try:
            with open(args.system) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise AlgebraFormatError(str(exc), args.system) from None
        except json.JSONDecodeError as exc:
            raise AlgebraFormatError(exc.msg, f"{args.system} line {exc.lineno} column {exc.colno}") from None
        system = JonssonSystem.from_json(data, alg)
        report = verify_system(alg, system)
        if not report.ok:
            raise VerificationFailed(f"system fails {report.failures[0].name}", report)
        return system
    if construction == "thm23":
        return find_terms(alg, Flavor.defective4(), cap=args.cap)
    if construction == "thm43":
        return find_terms(alg, Flavor.jonsson(n), cap=args.cap)
    if construction == "thm44":
        return jonsson_to_alvin(find_terms(alg, Flavor.jonsson(n), cap=args.cap))
    return find_terms(alg, Flavor.jonsson(4), cap=args.cap)


def _first_chain(alg, alpha, beta, gamma, n):
    """Lexicographically first beta/gamma chain of n steps with alpha-related, distinct ends."""
    fallback = None
    for a in alg.universe:
        stack = [(a,)]
        while stack:
            seq = stack.pop()
            if len(seq) == n + 1:
                if alpha.related(seq[0], seq[-1]):
                    if seq[0] != seq[-1]:
                        return seq
                    fallback = fallback or seq
                continue
            th = beta if (len(seq) - 1) % 2 == 0 else gamma
            stack.extend(seq + (v,) for v in reversed(alg.universe) if th.related(seq[-1], v))
    return fallback


def _elements(cfg, alpha, beta, gamma, n_default):
    args, alg = cfg.args, cfg.alg
    if args.elements:
        try:
            b = tuple(int(v) for v in args.elements.split(","))
        except ValueError:
            raise UsageError(f"--elements must be comma-separated integers, got {args.elements!r}") from None
        if any(not 0 <= v < alg.size for v in b):
            raise UsageError(f"--elements outside the universe 0..{alg.size - 1}")
        if len(b) < 2:
            raise UsageError("--elements needs at least two entries")
        return b
    b = _first_chain(alg, alpha, beta, gamma, n_default)
    if b is None:
        raise UsageError("no alternating chain with alpha-related ends exists for this triple")
    return b


def cmd_chain(cfg: CommandConfig) -> int:
    args, alg = cfg.args, cfg.alg
    alpha, beta, gamma = _triple(alg, args)
    con = args.construction
    four_point = con in ("thm22", "thm23", "thm43", "thm44")
    if four_point:
        n_sys = args.n or (4 if con in ("thm22", "thm23") else 6 if con == "thm43" else 4)
        b = _elements(cfg, alpha, beta, gamma, 4)
    else:
        b = _elements(cfg, alpha, beta, gamma, args.n or 4)
        if args.n and args.n != len(b) - 1:
            raise UsageError(f"--n {args.n} disagrees with {len(b)} elements")
        n_sys = 4
    if four_point and len(b) != 5:
        raise UsageError(f"{con} needs five elements a,b,c,d,e")
    system = _system_for(cfg, con, n_sys)
    ctx = ChainContext(alg, system, alpha, beta, gamma, b)
    try:
        ctx.check()
    except StepValidationFailed as exc:
        raise UsageError(f"elements do not satisfy the premise: {exc}") from None

    if con == "initial":
        nln = initial_chain(ctx)
        report = validate_nln(alg, nln, alpha, beta, gamma)
        out = {"construction": con, "n": nln.n, "ell": nln.ell, "A": nln.A, "B": nln.B, "C": nln.C,
               "from_a": nln.from_a, "to_c": nln.to_c, "validation": report.to_json()}
        _emit(out)
        return EXIT_OK if report.ok else EXIT_VALIDATION

    if con in ("thm22", "thm23"):
        chain = thm22_chain(ctx, defective=con == "thm23")
    elif con == "thm43":
        chain = thm43_chain(ctx)
    elif con == "thm44":
        chain = thm44_chain(ctx, x=args.x, x_end=args.x_end)
    else:
        chain = full_reduction(ctx, policy=args.reading)
    report = validate_chain(alg, chain, alpha, beta, gamma)
    if args.format == "text":
        _emit(render_text(chain, report))
    else:
        out = chain_to_json(chain, report)
        out = {"construction": con, "algebra": alg.name, "elements": list(b), **out}
        _emit(out)
    return EXIT_OK if report.ok else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# spectrum / congruences / check
# ---------------------------------------------------------------------------


def cmd_spectrum(cfg: CommandConfig) -> int:
    args = cfg.args
    kw = {} if args.cap is None else {"cap": args.cap}
    sp = spectrum(cfg.alg, args.m, args.k_max, rhs_start=args.rhs_start, **kw)
    _emit(sp.to_csv().rstrip("\n") if args.format == "csv" else sp.to_json())
    return EXIT_OK


def cmd_congruences(cfg: CommandConfig) -> int:
    cons = all_congruences(cfg.alg)
    names = {th: n for n, th in sorted(named_congruences(cfg.alg).items())}
    if cfg.args.format == "json":
        _emit({"algebra": cfg.alg.name, "congruences": [
            {"index": i, "blocks": str(th), "name": names.get(th)} for i, th in enumerate(cons)]})
    else:
        for i, th in enumerate(cons):
            tag = f"  ({names[th]})" if th in names else ""
            print(f"{i:>3}  {th}{tag}")
    return EXIT_OK


def cmd_check(cfg: CommandConfig) -> int:
    args = cfg.args
    alpha, beta, gamma = _triple(cfg.alg, args)
    inst = IdentityInstance(alpha, beta, gamma, args.m, args.k, args.rhs_start)
    bad = violations(inst)
    _emit({"algebra": cfg.alg.name, "alpha": str(alpha), "beta": str(beta), "gamma": str(gamma),
           "m": args.m, "k": args.k, "rhs_start": args.rhs_start, "holds": not bad,
           "violating_pair": list(bad[0]) if bad else None})
    return EXIT_OK if not bad else EXIT_VIOLATED


COMMANDS = {"terms": cmd_terms, "chain": cmd_chain, "spectrum": cmd_spectrum,
            "congruences": cmd_congruences, "check": cmd_check}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = CommandConfig(args, _load(args))
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        _err(f"jlab {args.command}: error: {exc}")
        return EXIT_INPUT
    except (AlgebraFormatError, UnknownSymbol, ArityMismatch) as exc:
        _err(f"malformed input: {exc}")
        return EXIT_INPUT
    except NotFound as exc:
        _err(f"not found: {exc}")
        return EXIT_NOT_FOUND
    except NoSuchX as exc:
        _err(f"premise unavailable: {exc}")
        return EXIT_NOT_FOUND
    except ResourceLimit as exc:
        _err(f"inconclusive: {exc}")
        return EXIT_CAP
    except VerificationFailed as exc:
        _err(f"validation failed: {exc}")
        return EXIT_VALIDATION
    except AmbiguousFormula as exc:
        _err(f"no candidate reading validated: {exc}")
        for name, err in exc.failures:
            _err(f"  {name}: {err}")
        return EXIT_VALIDATION
    except StepValidationFailed as exc:
        _err(f"step validation failed: {exc}")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
