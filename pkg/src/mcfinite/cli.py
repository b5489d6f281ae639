"""Command-line entry point: ``mcfinite <subcommand> ...``.

Exit status is 0 on success, 1 on a domain error (bad input data, budget
exhausted, a check that came out false) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TextIO

from . import adversary as adv
from . import du, falsify as fals, specker
from .modarith import nth_prime
from .periodic import CertificateError, parse_index, serialize
from .prs import DetectBudgetExceeded, PolyRecurrence, SpecError, cached_state_cycle, eval_mod, parse_spec
from .structures import (
    BudgetExceeded,
    PropertySpec,
    VocabularyMismatch,
    all_structures_upto,
    density_series,
    format_structure,
    parse_property,
)

DATA_DIR = Path(__file__).with_name("data")
BUILTIN_SPECS = {"fib": "fib.prs", "fibonacci": "fib.prs", "telephone": "telephone.prs"}


class DomainError(Exception):
    pass


class Output:
    """Collects result records and prints them as text or ``key=value`` lines."""

    def __init__(self, fmt: str, stream: TextIO):
        self.fmt = fmt
        self.stream = stream

    def text(self, line: str) -> None:
        if self.fmt == "text":
            print(line, file=self.stream)

    def record(self, **fields) -> None:
        if self.fmt == "machine":
            print(" ".join(f"{k}={_machine(v)}" for k, v in fields.items()), file=self.stream)

    def both(self, line: str, **fields) -> None:
        self.text(line)
        self.record(**fields)


def _machine(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(map(str, v))
    return str(v).replace(" ", "")


# -- input helpers -------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror or exc}") from None


def load_spec(ref: str) -> PolyRecurrence:
    """A DSL file path, or one of the bundled names ``fib`` / ``telephone``."""
    if not Path(ref).exists() and ref in BUILTIN_SPECS:
        return parse_spec((DATA_DIR / BUILTIN_SPECS[ref]).read_text(encoding="utf-8"))
    return parse_spec(_read(ref))


def _modulus(text: str) -> int:
    try:
        m = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid modulus {text!r}") from None
    if m < 1:
        raise argparse.ArgumentTypeError("modulus must be >= 1")
    return m


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _positive(text: str) -> int:
    v = _nonneg(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _index(text: str) -> int:
    try:
        return parse_index(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _property(text: str) -> PropertySpec:
    try:
        return parse_property(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _witness_structures(args, p: PropertySpec):
    vocab = p.counting_vocab()
    if args.witnesses is not None:
        try:
            return du.parse_witness_file(_read(args.witnesses), vocab)
        except ValueError as exc:
            raise DomainError(f"{args.witnesses}: {exc}") from None
    structs = all_structures_upto(vocab, args.gen_max)
    return structs, du.all_pointed(structs)


# -- subcommands -----------------------------------------------------------------

def cmd_period(args, out: Output) -> int:
    prs = load_spec(args.spec)
    sc = cached_state_cycle(prs, args.mod, args.coord)
    ep = sc.scalar
    out.text(serialize(ep).rstrip("\n"))
    out.record(modulus=ep.modulus, preperiod=ep.preperiod, period=ep.period, table=list(ep.table),
               state_preperiod=sc.preperiod, state_period=sc.period, bound=sc.bound)
    return 0


def cmd_eval(args, out: Output) -> int:
    prs = load_spec(args.spec)
    r = eval_mod(prs, args.mod, args.n, args.coord)
    out.both(str(r.value), n=args.n, m=args.mod, residue=r.value)
    return 0


def cmd_falsify(args, out: Output) -> int:
    prs = load_spec(args.spec)
    try:
        seq = fals.ingest_bfile(_read(args.bfile), args.bfile)
        moduli = fals.parse_moduli(args.moduli)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    report = fals.falsify(seq, prs, moduli, args.coord)
    for line in report.lines():
        out.text(line)
    for mm in report.mismatches:
        out.record(mismatch_n=mm.n, m=mm.modulus, expected=mm.expected, got=mm.got)
    out.record(verdict=report.verdict, entries=report.checked, moduli=f"{moduli[0]}..{moduli[-1]}")
    return 0


def cmd_count(args, out: Output) -> int:
    p = args.property
    out.text(f"# {p.text}" + (f" mod {args.mod}" if args.mod else ""))
    methods: Dict[str, List[int]] = {}
    for n, count, used in density_series(p, range(args.n_min, args.n_max + 1), args.method, args.jobs):
        methods.setdefault(used, []).append(n)
        if args.mod:
            out.both(f"{n} {count} {count % args.mod}", n=n, count=count, residue=count % args.mod,
                     method=used)
        else:
            out.both(f"{n} {count}", n=n, count=count, method=used)
    for used, ns in methods.items():
        out.text(f"# method {used}: n = {', '.join(map(str, ns))}")
    return 0


def cmd_du_rank(args, out: Output) -> int:
    p = args.property
    cols, _ = _witness_structures(args, p)
    if not cols:
        raise DomainError("no column witnesses")
    mat = du.du_submatrix(p, cols)
    return _print_matrix(mat, out, p)


def cmd_subst_rank(args, out: Output) -> int:
    p = args.property
    cols, rows = _witness_structures(args, p)
    if not cols or not rows:
        raise DomainError("need both pointed rows (@A0 lines) and column witnesses")
    mat = du.subst_submatrix(p, rows, cols)
    return _print_matrix(mat, out, p)


def _print_matrix(mat: du.Gf2Matrix, out: Output, p: PropertySpec) -> int:
    rank = du.gf2_rank(mat)
    out.text(f"# {p.text}: {mat.shape[0]} x {mat.shape[1]}")
    out.text("# columns: " + " | ".join(mat.col_labels))
    out.text(mat.render())
    out.text(f"rank {rank}")
    out.text(f"# certified: full matrix rank >= {rank}; a finite submatrix gives no upper bound")
    for label, row in zip(mat.row_labels, mat.to_lists()):
        out.record(row=label, entries="".join(map(str, row)))
    out.record(rows=mat.shape[0], cols=mat.shape[1], rank=rank, certified="lower")
    return 0


def cmd_orbit_check(args, out: Output) -> int:
    instances = specker.random_dvlm_instances(args.trials, args.max_n, args.seed)
    failures = 0
    for k, inst in enumerate(instances, start=1):
        res = specker.check_dvlm(inst.structure, inst.subset, inst.vertex)
        failures += not res.divides
        subset = ",".join(map(str, inst.subset))
        out.both(
            f"{k} {inst.structure.vocab.name} {format_structure(inst.structure)} A'={{{subset}}} "
            f"v={inst.vertex} d'={res.neighbors} binom={res.binomial} orbit={res.orbit} "
            f"{'ok' if res.divides else 'FAIL'}",
            trial=k, structure=format_structure(inst.structure), subset=list(inst.subset),
            v=inst.vertex, d=res.neighbors, binom=res.binomial, orbit=res.orbit,
            divides=int(res.divides),
        )
    out.both(f"passed {len(instances) - failures}/{len(instances)} (seed {args.seed})",
             passed=len(instances) - failures, trials=len(instances), seed=args.seed)
    return 1 if failures else 0


def cmd_recur(args, out: Output) -> int:
    p, m, d = args.property, args.mod, args.degree
    params = specker.RecurrenceParams(m, d)
    cols, _ = _witness_structures(args, p)
    table = specker.equiv_table(p, d, m, cols, range(0, args.n_max + 1))
    rec = specker.extract_recurrence(table, params)
    rows = specker.verify_recurrence(rec, table, params, range(1, args.n_max + 1))
    out.both(f"# {table.property.text} m={m} d={d} C={params.stride}", m=m, d=d, C=params.stride)
    for b, rep in enumerate(table.representatives):
        tag = "sink" if b == table.sink else "block"
        out.both(f"{tag} {b} {format_structure(rep)}", block=b, sink=int(b == table.sink),
                 representative=format_structure(rep))
    for rho in range(params.stride):
        for D in range(1, rec.blocks):
            for E in range(1, rec.blocks):
                c = rec.coefficient(D, E, rho)
                out.both(f"coef rho={rho} D={D} E={E} {c}", rho=rho, D=D, E=E, coef=c)
    bad = 0
    for r in rows:
        bad += r.residual != 0
        out.both(f"D={r.block} n={r.n} lhs={r.lhs} rhs={r.rhs} residual={r.residual}",
                 D=r.block, n=r.n, lhs=r.lhs, rhs=r.rhs, residual=r.residual)
    out.both("verified" if not bad else f"nonzero residuals: {bad}", verified=int(not bad))
    return 1 if bad else 0


def cmd_vanish(args, out: Output) -> int:
    try:
        rep = specker.check_ultimate_vanishing(args.property, args.mod, range(1, args.n_max + 1),
                                               args.method, args.jobs)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    for n, r, used in rep.residues:
        out.both(f"{n} {r} {used}", n=n, residue=r, method=used)
    if rep.vanishes:
        out.both(f"vanishes from n={rep.first_zero}", first_zero=rep.first_zero)
    else:
        out.both("no vanishing tail in range", first_zero="none")
    return 0


def cmd_adversary(args, out: Output) -> int:
    try:
        bits = adv.parse_bits(args.bits)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    a = adv.adversary_term(bits, args.n, args.max_n)
    out.both(str(a), n=args.n, bits=bits.name, value=a)
    for k, ok in adv.crt_consistent(bits, args.n, args.max_n):
        q = nth_prime(k) ** args.n
        out.both(f"p{k}^{args.n}={q} residue={a % q} bit={bits(k)}", i=k, modulus=q,
                 residue=a % q, bit=bits(k))
    return 0


# -- parser -----------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, suppress: bool) -> None:
    # subcommands repeat the global flags without overriding them when absent
    p.add_argument("--format", choices=("text", "machine"),
                   default=argparse.SUPPRESS if suppress else "text", help="output style")
    p.add_argument("--jobs", type=_positive, default=argparse.SUPPRESS if suppress else 1,
                   help="worker processes for enumeration")


def _witness_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--witnesses", metavar="F", help="witness file: one structure per line, @A0 for pointed rows")
    g.add_argument("--gen-max", type=_nonneg, metavar="S", help="use every structure on at most S points")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcfinite", description=__doc__.splitlines()[0])
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common, suppress=True)

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help, description=help)
        sp.set_defaults(func=fn)
        return sp

    sp = add("period", cmd_period, "eventually periodic table of a recurrence modulo M")
    sp.add_argument("--spec", required=True, metavar="F")
    sp.add_argument("--mod", required=True, type=_modulus, metavar="M")
    sp.add_argument("--coord", type=_positive, default=1)

    sp = add("eval", cmd_eval, "a_N mod M")
    sp.add_argument("--spec", required=True, metavar="F")
    sp.add_argument("--mod", required=True, type=_modulus, metavar="M")
    sp.add_argument("--n", required=True, type=_index, metavar="N")
    sp.add_argument("--coord", type=_positive, default=1)

    sp = add("falsify", cmd_falsify, "check claimed values against a recurrence")
    sp.add_argument("--spec", required=True, metavar="F")
    sp.add_argument("--bfile", required=True, metavar="B")
    sp.add_argument("--moduli", default="2..64", metavar="LO..HI")
    sp.add_argument("--coord", type=_positive, default=1)

    sp = add("count", cmd_count, "density of a property for n up to N")
    sp.add_argument("--property", required=True, type=_property, metavar="P")
    sp.add_argument("--n-max", required=True, type=_nonneg, metavar="N")
    sp.add_argument("--n-min", type=_nonneg, default=1, metavar="N")
    sp.add_argument("--mod", type=_modulus, metavar="M")
    sp.add_argument("--method", default="auto",
                    choices=("auto", "kernel", "enumerate", "pruned", "counter", "formula"))

    sp = add("du-rank", cmd_du_rank, "disjoint-union matrix and its GF(2) rank")
    sp.add_argument("--property", required=True, type=_property, metavar="P")
    _witness_args(sp)

    sp = add("subst-rank", cmd_subst_rank, "substitution matrix and its GF(2) rank")
    sp.add_argument("--property", required=True, type=_property, metavar="P")
    _witness_args(sp)

    sp = add("orbit-check", cmd_orbit_check, "orbit divisibility on seeded random instances")
    sp.add_argument("--trials", required=True, type=_positive, metavar="T")
    sp.add_argument("--max-n", required=True, type=_positive, metavar="N")
    sp.add_argument("--seed", required=True, type=int, metavar="S")

    sp = add("recur", cmd_recur, "extract and verify the modular recurrence")
    sp.add_argument("--property", required=True, type=_property, metavar="P")
    sp.add_argument("--mod", required=True, type=_modulus, metavar="M")
    sp.add_argument("--degree", required=True, type=_nonneg, metavar="D")
    sp.add_argument("--n-max", required=True, type=_nonneg, metavar="N")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--witnesses", metavar="F")
    g.add_argument("--gen-max", type=_nonneg, default=3, metavar="S")

    sp = add("vanish", cmd_vanish, "where the density residues become identically 0")
    sp.add_argument("--property", required=True, type=_property, metavar="P")
    sp.add_argument("--mod", required=True, type=_modulus, metavar="M")
    sp.add_argument("--n-max", required=True, type=_positive, metavar="N")
    sp.add_argument("--method", default="auto",
                    choices=("auto", "kernel", "enumerate", "pruned", "counter", "formula"))

    sp = add("adversary", cmd_adversary, "term of the CRT sequence with prescribed residues")
    sp.add_argument("--bits", required=True, metavar="SPEC", help="alternating | thue-morse | list:b1,b2,...")
    sp.add_argument("--n", required=True, type=_positive, metavar="N")
    sp.add_argument("--max-n", type=_positive, default=adv.DEFAULT_MAX_N, metavar="N")
    return parser


DOMAIN_ERRORS = (
    DomainError, SpecError, CertificateError, BudgetExceeded, adv.BudgetExceeded,
    DetectBudgetExceeded, VocabularyMismatch, ValueError, KeyError,
)


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None,
         stderr: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        # argparse prints help and diagnostics on the process streams
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Output(args.format, stdout)
    try:
        return args.func(args, out)
    except DOMAIN_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"mcfinite {args.command}: error: {msg}", file=stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
