"""Command-line interface: ``wardlab <command> [options]``.

Exit status is 0 when every verdict is decisive (and every lattice
implication consistent), 2 when something is inconclusive or contradicted,
and 1 for usage, input or evaluation errors.
"""

from __future__ import annotations

import argparse
import logging
import math
import re
import sys
from pathlib import Path
from typing import Sequence as Seq


from . import catalogue
from .classifiers import SEQUENCE_CLASSES, classify
from .compactness import (
    ascending_witness,
    bounded,
    bounded_above,
    bounded_below,
    descending_witness,
    parse_set,
    stat_downward_compact,
    stat_upward_compact,
    REALS,
)
from .continuity import (
    Corpus,
    FunctionUnderTest,
    default_corpus,
    implication_lattice_report,
    uniform_continuity_witness_search,
)
from .density import AnalysisConfig, Status, density_limit_verdict, evens, from_index_file, squares
from .errors import CatalogueError, ParseError, WardlabError
from .expr import compile_expression
from .methods import (
    LacunaryScheme,
    fibonacci_scheme,
    fibonacci_scheme_covering,
    lacunary_statistical_verdict,
    ntheta_verdict,
    ordinary_limit,
    statistical_limit_estimate,
    statistical_limit_verdict,
)
from .classifiers import fit_config
from .report import Report, verdict_to_dict
from .sequences import Sequence

log = logging.getLogger("wardlab")

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2
_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")


class UsageError(WardlabError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog.split()[-1]}: {message}")


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _number(token: str, where: str) -> float:
    token = token.strip().replace("−", "-")
    if "," in token:
        raise ParseError(f"{where}: {token!r} uses a comma; use a decimal point, one value per line")
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{where}: not a number: {token!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"{where}: non-finite value {token!r}")
    return value


def read_values(path: str) -> list[float]:
    """One value per line; an optional non-numeric header on the first line."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    values = []
    for i, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        if not values and i == _first_nonblank(lines) and not _looks_numeric(line):
            continue  # header
        values.append(_number(line, f"{path}:{i}"))
    if not values:
        raise ParseError(f"{path}: no values")
    return values


def _first_nonblank(lines: list[str]) -> int:
    return next(i for i, line in enumerate(lines, start=1) if line.strip())


def _looks_numeric(line: str) -> bool:
    return bool(re.match(r"^[-+−]?(\d|\.\d|inf|nan)", line.strip(), re.IGNORECASE))


def resolve_sequence(text: str, params: dict[str, str]) -> Sequence:
    """``@file`` data, a catalogue name, or an expression in ``n``."""
    if text.startswith("@"):
        path = text[1:]
        return Sequence.from_values(read_values(path), name=Path(path).name)
    if text in catalogue.names():
        return catalogue.get(text, **{k: _param(v) for k, v in params.items()})
    if _NAME_RE.match(text) and text not in ("n",):
        raise CatalogueError(f"unknown catalogue sequence {text!r} (see `wardlab catalogue`)")
    func = compile_expression(text, "n")
    return Sequence(lambda k: func(k.astype(float)), vectorized=True, name=text)


def _param(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def _params(items: Seq[str] | None) -> dict[str, str]:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _config(args) -> AnalysisConfig:
    overrides = {}
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if args.eps is not None:
        overrides["epsilon_grid"] = tuple(sorted(_floats(args.eps), reverse=True))
    if args.tol is not None:
        overrides["pass_tolerance"] = args.tol
    if args.fail is not None:
        overrides["fail_threshold"] = args.fail
    return AnalysisConfig.from_env(**overrides)


def _scheme(spec: str | None, horizon: int) -> LacunaryScheme:
    if spec is None:
        return fibonacci_scheme_covering(horizon)
    if spec.startswith("fib:"):
        try:
            r = int(spec[4:])
        except ValueError:
            raise UsageError(f"bad Fibonacci scheme {spec!r}; expected fib:R") from None
        return fibonacci_scheme(r)
    if spec.startswith("@"):
        bounds = [int(v) if v == int(v) else None for v in read_values(spec[1:])]
        if None in bounds:
            raise ParseError(f"{spec[1:]}: lacunary boundaries must be integers")
        if bounds[0] != 0:
            bounds.insert(0, 0)
        return LacunaryScheme(tuple(bounds), name=Path(spec[1:]).name)
    raise UsageError(f"bad --theta {spec!r}; expected fib:R or @file")


def _classification(name: str, label: str, verdict) -> dict:
    return {"kind": "classification", "subject": name, "class": label, "status": verdict.status.value,
            "verdict": verdict_to_dict(verdict)}


def cmd_classify(args, report: Report) -> None:
    seq = resolve_sequence(args.seq, _params(args.param))
    labels = _labels(args.classes)
    result = classify(seq, labels, report.config)
    if result.note:
        report.diagnostics.append(result.note)
        report.config = result.config
    for label in labels or SEQUENCE_CLASSES:
        report.results.append(_classification(seq.name, label, result[label]))


def _labels(items: Seq[str] | None) -> list[str] | None:
    if not items:
        return None
    return [l for item in items for l in item.split(",") if l]


def cmd_limit(args, report: Report) -> None:
    seq = resolve_sequence(args.seq, _params(args.param))
    config, note = fit_config(seq, report.config)
    if note:
        report.diagnostics.append(note)
        report.config = config
    if args.method == "ordinary":
        mv = ordinary_limit(seq, config)
    elif args.method == "stat":
        mv = statistical_limit_estimate(seq, config) if args.ell is None else statistical_limit_verdict(seq, args.ell, config)
    else:
        ell = args.ell if args.ell is not None else statistical_limit_estimate(seq, config).limit_estimate
        scheme = _scheme(args.theta, config.horizon)
        fn = lacunary_statistical_verdict if args.method == "stheta" else ntheta_verdict
        mv = fn(seq, scheme, ell, config)
    report.results.append({
        "kind": "method", "subject": seq.name, "method": mv.method, "limitEstimate": mv.limit_estimate,
        "status": mv.status.value, "verdict": verdict_to_dict(mv.verdict),
    })


def cmd_density(args, report: Report) -> None:
    if args.pred == "squares":
        pred = squares()
    elif args.pred == "evens":
        pred = evens()
    elif args.pred.startswith("@"):
        raw = read_values(args.pred[1:])
        if any(v != int(v) or v < 1 for v in raw):
            raise ParseError(f"{args.pred[1:]}: indices must be positive integers")
        pred = from_index_file([int(v) for v in raw], Path(args.pred[1:]).name)
    else:
        raise UsageError(f"unknown predicate {args.pred!r}; expected squares, evens or @file")
    v = density_limit_verdict(pred, report.config)
    report.results.append({"kind": "density", "subject": pred.description, "class": "densityZero",
                           "status": v.status.value, "verdict": verdict_to_dict(v)})


def _corpus(names: Seq[str] | None) -> Corpus:
    if not names or list(names) == ["default"]:
        return default_corpus()
    pool = {s.name: s for s in default_corpus()}
    missing = [n for n in names if n not in pool]
    if missing:
        raise CatalogueError(f"unknown corpus member(s): {', '.join(missing)}")
    return Corpus(pool[n] for n in names)


def cmd_lattice(args, report: Report) -> None:
    domain = parse_set(args.domain) if args.domain else REALS
    f = FunctionUnderTest.from_expression(args.fn, domain)
    corpus = _corpus(args.corpus)
    if domain is not REALS:
        kept = corpus.within(domain, report.config)
        dropped = sorted({s.name for s in corpus} - {s.name for s in kept})
        if dropped:
            report.diagnostics.append(f"corpus members outside the domain dropped: {', '.join(dropped)}")
        corpus = kept
    lattice = implication_lattice_report(f, corpus, report.config)
    report.results.append({
        "kind": "lattice",
        "subject": f.name,
        "properties": {k: verdict_to_dict(v) for k, v in lattice.per_property.items()},
        "implications": [{"from": a, "to": b, "consistent": ok} for a, b, ok in lattice.implied_pairs],
        "consistent": lattice.consistent,
    })


def cmd_compact(args, report: Report) -> None:
    s = parse_set(args.set)
    entry = {
        "kind": "compactness",
        "subject": args.set,
        "boundedBelow": bounded_below(s),
        "boundedAbove": bounded_above(s),
        "statUpwardCompact": stat_upward_compact(s),
        "statDownwardCompact": stat_downward_compact(s),
        "bounded": bounded(s),
    }
    if args.witness is not None:
        if args.witness < 1:
            raise UsageError("--witness needs a positive length")
        if not entry["boundedBelow"]:
            entry["witnessDirection"] = "descending"
            entry["witness"] = list(descending_witness(s, args.witness).values)
        elif not entry["boundedAbove"]:
            entry["witnessDirection"] = "ascending"
            entry["witness"] = list(ascending_witness(s, args.witness).values)
        else:
            entry["witnessError"] = "set is bounded: no monotone witness exists"
    report.results.append(entry)


def cmd_ucwitness(args, report: Report) -> None:
    f = FunctionUnderTest.from_expression(args.fn, parse_set(args.domain))
    pairs = uniform_continuity_witness_search(f, args.nmax, args.eps0)
    report.results.append({
        "kind": "witnessSearch",
        "subject": f.name,
        "domain": args.domain,
        "eps0": args.eps0,
        "nMax": args.nmax,
        "noneFound": not pairs,
        "pairs": [{"n": p.n, "x": p.x, "y": p.y, "fx": p.fx, "fy": p.fy} for p in pairs],
        "missing": sorted(set(range(1, args.nmax + 1)) - {p.n for p in pairs}),
    })


def cmd_catalogue(args, report: Report) -> None:
    for e in catalogue.entries():
        report.results.append({
            "kind": "catalogue",
            "subject": e.name,
            "description": e.description,
            "parameters": e.defaults,
            "claims": [{"class": c, "status": s} for c, s in e.claims],
        })


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--horizon", type=int, help="analysis horizon N (default 100000 or $WARDLAB_DEFAULT_HORIZON)")
    common.add_argument("--eps", help="comma-separated epsilon grid")
    common.add_argument("--tol", type=float, help="pass tolerance on densities")
    common.add_argument("--fail", type=float, help="fail threshold on densities")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", help="write the report into this directory instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="wardlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", parents=[common], help="classify a sequence")
    p.add_argument("--seq", required=True, help="catalogue name, @file.csv, or expression in n")
    p.add_argument("--classes", nargs="+", help=f"subset of: {', '.join(SEQUENCE_CLASSES)}")
    p.add_argument("--param", action="append", help="catalogue parameter key=value")
    p.set_defaults(run=cmd_classify)

    p = sub.add_parser("limit", parents=[common], help="judge a limit under a convergence method")
    p.add_argument("--seq", required=True)
    p.add_argument("--method", choices=("ordinary", "stat", "stheta", "ntheta"), required=True)
    p.add_argument("--theta", help="lacunary scheme: fib:R or @file of boundaries")
    p.add_argument("--ell", type=float, help="candidate limit (estimated when omitted)")
    p.add_argument("--param", action="append")
    p.set_defaults(run=cmd_limit)

    p = sub.add_parser("density", parents=[common], help="natural density of an index set")
    p.add_argument("--pred", required=True, help="squares, evens, or @file of indices")
    p.set_defaults(run=cmd_density)

    p = sub.add_parser("lattice", parents=[common], help="preservation properties of a function")
    p.add_argument("--fn", required=True, help="expression in x")
    p.add_argument("--domain", help="set literal (default: all reals)")
    p.add_argument("--corpus", nargs="+", help="'default' or corpus member names")
    p.set_defaults(run=cmd_lattice)

    p = sub.add_parser("compact", parents=[common], help="boundedness and compactness of a set")
    p.add_argument("--set", required=True, help='set literal, e.g. "[0,inf)" or "{1,2,7}"')
    p.add_argument("--witness", type=int, help="also build a monotone witness of this length")
    p.set_defaults(run=cmd_compact)

    p = sub.add_parser("ucwitness", parents=[common], help="search for non-uniform-continuity pairs")
    p.add_argument("--fn", required=True)
    p.add_argument("--domain", required=True)
    p.add_argument("--eps0", type=float, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.set_defaults(run=cmd_ucwitness)

    p = sub.add_parser("catalogue", parents=[common], help="list catalogue sequences and their claims")
    p.set_defaults(run=cmd_catalogue)
    return parser


def _exit_code(report: Report) -> int:
    if any(s is Status.INCONCLUSIVE for s in report.statuses()):
        return EXIT_INCONCLUSIVE
    if any(r.get("kind") == "lattice" and not r["consistent"] for r in report.results):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def run(argv: Seq[str] | None = None, stdout=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
        report = Report(args.command, argv, _config(args))
        args.run(args, report)
        body = {"json": report.to_json, "csv": report.to_csv, "text": report.to_text}[args.format]()
        if args.out:
            out_dir = Path(args.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            target = out_dir / f"{args.command}.{args.format if args.format != 'text' else 'txt'}"
            target.write_text(body, encoding="utf-8")
            log.info("wrote %s", target)
        else:
            stdout.write(body)
        for note in report.diagnostics:
            print(f"wardlab: {note}", file=sys.stderr)
        return _exit_code(report)
    except WardlabError as exc:
        print(f"wardlab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"wardlab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
