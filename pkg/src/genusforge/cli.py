"""Command-line front end: ``genusforge [--json] GROUP COMMAND ...``."""

import argparse
import sys

from . import classify as cls
from . import criteria as crit
from .discform import (
    FormError,
    embeddings,
    enumerate_gluings,
    from_genus,
    glue,
    isometric,
    symbol_of_form,
    witt_complement,
)
from .genus import (
    GenusError,
    canonicalize_2adic,
    check_legal,
    exists,
    negate,
    oddity,
    p_excess,
    p_length,
    parse_symbol,
    print_symbol,
    symbol_from_gram,
)
from .lattice import GramMatrix, LatticeError, discriminant_form

# library operation -> subcommand reaching it
OP_REGISTRY = {
    "parse_symbol": "genus parse",
    "print_symbol": "genus print",
    "negate": "genus negate",
    "canonicalize_2adic": "genus canon",
    "p_excess": "genus excess",
    "oddity": "genus excess",
    "exists": "genus exists",
    "symbol_from_gram": "genus from-gram",
    "discriminant_form": "genus from-gram",
    "glue": "disc glue",
    "enumerate_gluings": "disc glue",
    "witt_complement": "disc witt",
    "embeddings": "disc embed",
    "isometric": "disc iso",
    "from_genus": "disc iso",
    "symbol_of_form": "disc witt",
    "length_criterion": "criteria length",
    "constituent_criterion": "criteria constituent",
    "determinant_condition": "criteria det",
    "tame_conditions": "criteria tame",
    "legendre_orbit_condition": "criteria legendre",
    "classify_entry": "classify entry",
    "reproduce_table": "classify table",
    "classify_all": "classify all",
    "mukai_holds": "mukai holds",
    "mukai_residues": "mukai residues",
    "load_entries": "data load",
    "validate_entries": "data validate",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _symbol(text, args):
    sig = getattr(args, "signature", None)
    if sig:
        try:
            a, b = (int(x) for x in sig.split(","))
        except ValueError:
            raise UsageError(f"bad signature {sig!r}") from None
        s = parse_symbol(text, signature=(a, b), even=not getattr(args, "odd", False))
    else:
        s = parse_symbol(text)
    check_legal(s)
    return s


def _gram(text):
    rows = [r for r in text.replace("\n", ";").split(";") if r.strip()]
    return GramMatrix(tuple(tuple(int(x) for x in r.replace(",", " ").split()) for r in rows))


def _form(text):
    """Discriminant form of a symbol fragment, or of a rank-one lattice written <n>."""
    text = text.strip()
    if text.startswith("<") and text.endswith(">"):
        try:
            n = int(text[1:-1])
        except ValueError:
            raise UsageError(f"bad rank-one lattice {text!r}") from None
        return discriminant_form(GramMatrix(((n,),)))
    s = parse_symbol(text)
    check_legal(s)
    return from_genus(s)


def _entry(args):
    try:
        return cls.get_entry(int(args.hm_id))
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from None


class Out:
    def __init__(self, machine, stream):
        self.machine = machine
        self.stream = stream

    def line(self, *fields):
        if self.machine:
            print("\t".join(str(f) for f in fields), file=self.stream)
        else:
            print(" ".join(str(f) for f in fields), file=self.stream)

    def verdict(self, hm_id, p, v):
        if self.machine:
            print(cls.verdict_line(hm_id, p, v), file=self.stream)
        else:
            print(f"HM {hm_id}, p = {p}: {v.realized}", file=self.stream)
            for r in v.reasons:
                print(f"  {r.criterion}: {r.explanation}", file=self.stream)


# genus

def _genus_parse(args, out):
    s = _symbol(args.symbol, args)
    out.line("symbol", print_symbol(s))
    if s.signature is not None:
        out.line("signature", f"{s.signature[0]},{s.signature[1]}")
        out.line("det", s.det())
    else:
        out.line("abs_det", s.abs_det())
    for p in s.primes():
        for c in s.constituents(p):
            out.line("constituent", p, c)
        out.line("length", p, p_length(s, p))
    return 0


def _genus_print(args, out):
    out.line(print_symbol(_symbol(args.symbol, args)))
    return 0


def _genus_negate(args, out):
    out.line(print_symbol(negate(_symbol(args.symbol, args))))
    return 0


def _genus_canon(args, out):
    out.line(print_symbol(canonicalize_2adic(_symbol(args.symbol, args))))
    return 0


def _genus_excess(args, out):
    s = _symbol(args.symbol, args)
    value = oddity(s) if args.p == 2 else p_excess(s, args.p)
    out.line(value)
    return 0


def _genus_exists(args, out):
    res = exists(_symbol(args.symbol, args))
    out.line("yes" if res.ok else "no", "; ".join(res.reasons))
    return 0


def _genus_from_gram(args, out):
    text = args.gram
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    if text is None:
        raise UsageError("give a Gram matrix or --file")
    out.line(print_symbol(symbol_from_gram(_gram(text))))
    return 0


# discriminant forms

def _disc_glue(args, out):
    left = _form(args.left)
    right = _form(args.right)
    counts = {}
    for d in enumerate_gluings(left, right, args.p, elementary=not args.all_subgroups):
        if args.order and d.order != args.order:
            continue
        key = (d.order, print_symbol(symbol_of_form(glue(d))) or "0")
        counts[key] = counts.get(key, 0) + 1
    for (order, text), n in sorted(counts.items()):
        out.line(order, text, n)
    return 0 if counts or not args.order else 1


def _disc_witt(args, out):
    form = _form(args.form)
    sub = _form(args.sub)
    if not embeddings(sub, form):
        out.line("no embedding")
        return 1
    out.line(print_symbol(symbol_of_form(witt_complement(form, sub))) or "0")
    return 0


def _disc_embed(args, out):
    maps = embeddings(_form(args.source), _form(args.target))
    out.line(len(maps))
    return 0


def _disc_iso(args, out):
    same = isometric(_form(args.a), _form(args.b))
    out.line("yes" if same else "no")
    return 0


# criteria

def _crit_length(args, out):
    forced = crit.length_criterion(_entry(args))
    out.line(",".join(str(p) for p in sorted(forced)) or "-")
    return 0


def _crit_constituent(args, out):
    out.line(crit.constituent_criterion(_entry(args), args.p))
    return 0


def _crit_det(args, out):
    out.line(crit.determinant_condition(_entry(args), args.p, args.at))
    return 0


def _crit_tame(args, out):
    e = _entry(args)
    out.verdict(e.hm_id, args.p, crit.tame_conditions(e, args.p))
    return 0


def _crit_legendre(args, out):
    try:
        lengths = tuple(int(x) for x in args.orbits.split(","))
        out.line(crit.legendre_orbit_condition(lengths, args.p))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return 0


# classification

def _classify_entry(args, out):
    e = _entry(args)
    out.verdict(e.hm_id, args.p, cls.classify_entry(e, args.p))
    return 0


def _classify_table(args, out):
    try:
        diff = cls.reproduce_table(args.table_id)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    for text in diff.lines():
        out.line(*text.split("\t"))
    return 0 if diff.ok else 1


def _classify_all(args, out):
    entries = cls.dataset()
    for hm, p, v in cls.classify_all(entries, args.bound):
        if out.machine:
            out.verdict(hm, p, v)
        else:
            out.line(hm, p, v.realized)
    if args.symbolic:
        for hm in sorted(entries):
            cond = cls.symbolic_conditions(entries[hm])
            if cond:
                out.line("symbolic", hm, cond)
    return 0


def _mukai_holds(args, out):
    try:
        out.line("true" if cls.mukai_holds(args.p) else "false")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return 0


def _mukai_residues(args, out):
    res = sorted(cls.mukai_residues(args.bound))
    if out.machine:
        for r in res:
            out.line(r)
    else:
        out.line(" ".join(str(r) for r in res))
    return 0


def _data_load(args, out):
    for e in cls.load_entries(args.path):
        out.line(e.hm_id, e.group, e.order or "-", e.rank_fixed, e.genus_text)
    return 0


def _data_validate(args, out):
    entries = cls.load_entries(args.path) if args.path else list(cls.dataset().values())
    report = cls.validate_entries(entries)
    for problem in report:
        out.line(problem)
    if not report:
        out.line(f"{len(entries)} entries, no violations")
    return 1 if report else 0


def build_parser():
    parser = _Parser(prog="genusforge", description="Genus symbols, discriminant forms and K3 classification checks.")
    parser.add_argument("--json", action="store_true", help="line-oriented tab-separated output")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def sym_cmd(sub, name, func, help_text):
        c = sub.add_parser(name, help=help_text)
        c.add_argument("symbol")
        c.add_argument("--signature", help="e.g. 0,21; completes unimodular parts")
        c.add_argument("--odd", action="store_true", help="odd lattice (with --signature)")
        c.set_defaults(func=func)
        return c

    g = groups.add_parser("genus", help="genus symbols").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sym_cmd(g, "parse", _genus_parse, "show the parsed structure")
    sym_cmd(g, "print", _genus_print, "print in normal form")
    sym_cmd(g, "negate", _genus_negate, "symbol of the rescaled lattice L(-1)")
    sym_cmd(g, "canon", _genus_canon, "canonical 2-adic spelling")
    sym_cmd(g, "excess", _genus_excess, "p-excess, or oddity for p = 2").add_argument("--p", type=int, required=True)
    sym_cmd(g, "exists", _genus_exists, "existence conditions")
    c = g.add_parser("from-gram", help="symbol of a Gram matrix, rows separated by ';'")
    c.add_argument("gram", nargs="?")
    c.add_argument("--file")
    c.set_defaults(func=_genus_from_gram)

    d = groups.add_parser("disc", help="discriminant forms given by symbol fragments").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    c = d.add_parser("glue", help="glue two forms along p-subgroups")
    c.add_argument("left")
    c.add_argument("right")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--order", type=int)
    c.add_argument("--all-subgroups", action="store_true", help="allow non-elementary glue groups")
    c.set_defaults(func=_disc_glue)
    c = d.add_parser("witt", help="complement of an embedded subform")
    c.add_argument("form")
    c.add_argument("sub")
    c.set_defaults(func=_disc_witt)
    c = d.add_parser("embed", help="count isometric embeddings")
    c.add_argument("source")
    c.add_argument("target")
    c.set_defaults(func=_disc_embed)
    c = d.add_parser("iso", help="isometry test")
    c.add_argument("a")
    c.add_argument("b")
    c.set_defaults(func=_disc_iso)

    k = groups.add_parser("criteria", help="single criteria on a dataset entry").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    for name, func, extra in (
        ("length", _crit_length, ()),
        ("constituent", _crit_constituent, ("p",)),
        ("det", _crit_det, ("p", "at")),
        ("tame", _crit_tame, ("p",)),
    ):
        c = k.add_parser(name)
        c.add_argument("hm_id")
        for flag in extra:
            c.add_argument(f"--{flag}", type=int, required=True)
        c.set_defaults(func=func)
    c = k.add_parser("legendre", help="orbit-length Legendre test")
    c.add_argument("--orbits", required=True)
    c.add_argument("--p", type=int, required=True)
    c.set_defaults(func=_crit_legendre)

    k = groups.add_parser("classify", help="classification driver").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    c = k.add_parser("entry")
    c.add_argument("hm_id")
    c.add_argument("--p", type=int, required=True)
    c.set_defaults(func=_classify_entry)
    c = k.add_parser("table")
    c.add_argument("table_id", type=int)
    c.set_defaults(func=_classify_table)
    c = k.add_parser("all")
    c.add_argument("--bound", type=int, default=200)
    c.add_argument("--symbolic", action="store_true")
    c.set_defaults(func=_classify_all)

    k = groups.add_parser("mukai", help="residue characterization").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    c = k.add_parser("holds")
    c.add_argument("--p", type=int, required=True)
    c.set_defaults(func=_mukai_holds)
    c = k.add_parser("residues")
    c.add_argument("--bound", type=int, default=10 ** 6)
    c.set_defaults(func=_mukai_residues)

    k = groups.add_parser("data", help="entry files").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    c = k.add_parser("load")
    c.add_argument("path")
    c.set_defaults(func=_data_load)
    c = k.add_parser("validate")
    c.add_argument("path", nargs="?")
    c.set_defaults(func=_data_validate)
    return parser


def run(argv=None, stream=None):
    stream = stream or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, Out(args.json, stream))
    except UsageError as exc:
        print(f"genusforge: error: {exc}", file=sys.stderr)
        return 2
    except (GenusError, FormError, LatticeError, cls.DataError, OSError) as exc:
        print(f"genusforge: error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
