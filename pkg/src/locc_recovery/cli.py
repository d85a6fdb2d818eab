"""Command-line front end.

Exit codes: 0 success, 1 not convertible or no recovery, 2 input error,
3 open problem, 4 resource limit or infeasible pattern.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
from typing import Optional, Tuple

from . import __version__
from .errors import (
    BudgetExceeded,
    NotARecovery,
    NotConvertibleError,
    NotFeasibleAtZero,
    PatternInfeasible,
    RecoveryError,
    SearchExhausted,
    SpectrumError,
)
from .genpairs import PatternSpec, pair_with_pattern, parse_pattern
from .majorization import PairKind, classify_report, majorize
from .oracle import GridSpec, max_recovery_scan
from .recovery import (
    Found,
    ImpossibleAtDim,
    NotConvertible,
    OpenProblem,
    RecoveryCertificate,
    RecoveryOptions,
    dimension_lower_bound,
    epsilon_max,
    recover_general,
    verify_recovery,
)
from .spectra import DEFAULT_EQ_TOL, SchmidtVector, entropy, make_schmidt

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_OPEN, EXIT_RESOURCE = 0, 1, 2, 3, 4
CSV_HEADER = ("k", "best_recovered_nats", "feasible_count", "points_tested")
RECORD_VERSION = 1


class InputError(Exception):
    pass


def load_state(path: str, tol: float) -> Tuple[SchmidtVector, Optional[str]]:
    """Read ``{"label": str?, "schmidt": [float, ...]}``; entries may be unsorted."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(data, dict) or not isinstance(data.get("schmidt"), list):
        raise InputError(f'{path}: expected an object with a "schmidt" list')
    label = data.get("label")
    if label is not None and not isinstance(label, str):
        raise InputError(f"{path}: label must be a string")
    try:
        vec = make_schmidt([float(x) for x in data["schmidt"]], tol)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    return vec, label


def write_state(path: str, vec: SchmidtVector, label: Optional[str]) -> None:
    body = {"label": label, "schmidt": list(vec.values)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(body, fh, indent=2)
        fh.write("\n")


def _fmt_nats(x: float, bits: bool) -> str:
    if bits:
        return f"{x / math.log(2.0):.5f} bits"
    return f"{x:.5f} nats"


def _timestamp(stamp: bool) -> Optional[str]:
    if not stamp:
        return None
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (
        _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc)
        if epoch
        else _dt.datetime.now(_dt.timezone.utc)
    )
    return when.replace(microsecond=0).isoformat()


def certificate_record(
    cert: RecoveryCertificate,
    labels: Tuple[Optional[str], Optional[str]],
    tol: float,
    pair_class: str,
    timestamp: Optional[str] = None,
) -> dict:
    pert = cert.pair.perturbation
    rep = cert.report
    return {
        "version": RECORD_VERSION,
        "tool_version": __version__,
        "timestamp": timestamp,
        "tol": tol,
        "psi_label": labels[0],
        "phi_label": labels[1],
        "pair_class": pair_class,
        "psi": list(cert.psi.values),
        "phi": list(cert.phi.values),
        "chi": list(cert.pair.chi.values),
        "omega": list(cert.pair.omega.values),
        "k": cert.k,
        "perturbed_index": pert.perturbed_index if pert else None,
        "receiver_index": pert.receiver_index if pert else None,
        "epsilon": pert.epsilon if pert else None,
        "epsilon_max": pert.epsilon_max if pert else None,
        "report_holds": rep.holds,
        "report_first_violation": rep.first_violation,
        "report_equality_indices": list(rep.equality_indices),
        "report_strict_all": rep.strict_all,
        "report_eta": rep.eta,
        "recovered_nats": cert.recovered,
        "loss_nats": cert.loss,
        "genuine": cert.genuine,
        "efficient_bound": cert.efficient_bound,
    }


def verify_record(record: dict, tol: Optional[float] = None) -> RecoveryCertificate:
    """Rebuild a certificate from the spectra stored in a record."""
    eps = float(record.get("tol", DEFAULT_EQ_TOL)) if tol is None else tol
    try:
        vecs = [make_schmidt(record[key], eps) for key in ("psi", "phi", "chi", "omega")]
    except KeyError as exc:
        raise InputError(f"certificate is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise InputError(f"certificate spectra invalid: {exc}") from exc
    return verify_recovery(*vecs, eps)


def _print_check(psi, phi, tol, bits, out) -> int:
    report = majorize(psi, phi, tol)
    if not report.holds:
        print(f"not convertible, first violation m={report.first_violation}", file=out)
        return EXIT_NO
    cls = classify_report(report, psi.dim)
    loss = entropy(psi) - entropy(phi)
    if cls.kind is PairKind.STRICT_ALL:
        shape = "strict"
    else:
        shape = f"{cls.kind.value}, delta={{{','.join(map(str, cls.delta))}}}, eta={cls.eta}"
    if cls.kind is PairKind.IDENTICAL:
        aux = "none needed"
    else:
        aux = str(dimension_lower_bound(psi, phi, tol))
    print(f"convertible, {shape}, loss {_fmt_nats(loss, bits)}, min aux dim {aux}", file=out)
    print(f"tol {tol:g}", file=out)
    return EXIT_OK


def cmd_check(args, out) -> int:
    if args.cert:
        with open(args.cert, encoding="utf-8") as fh:
            try:
                record = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"{args.cert}: malformed JSON ({exc.msg})") from exc
        try:
            cert = verify_record(record, args.tol)
        except (NotARecovery, NotConvertibleError) as exc:
            print(f"certificate rejected: {exc}", file=out)
            return EXIT_NO
        print(
            f"certificate valid, k={cert.k}, recovered {_fmt_nats(cert.recovered, args.bits)}, "
            f"loss {_fmt_nats(cert.loss, args.bits)}, genuine={str(cert.genuine).lower()}",
            file=out,
        )
        return EXIT_OK
    if not (args.psi and args.phi):
        raise InputError("check needs PSI and PHI files, or --cert")
    tol = _tol(args)
    psi, _ = load_state(args.psi, tol)
    phi, _ = load_state(args.phi, tol)
    _same_dim(psi, phi)
    return _print_check(psi, phi, tol, args.bits, out)


def _tol(args) -> float:
    return DEFAULT_EQ_TOL if args.tol is None else args.tol


def _same_dim(psi: SchmidtVector, phi: SchmidtVector) -> None:
    if psi.dim != phi.dim:
        raise InputError(f"dimensions differ ({psi.dim} vs {phi.dim}); pad the shorter state with zeros")


def cmd_recover(args, out) -> int:
    tol = _tol(args)
    psi, lpsi = load_state(args.psi, tol)
    phi, lphi = load_state(args.phi, tol)
    _same_dim(psi, phi)
    opts = RecoveryOptions(
        tol=tol, epsilon_fraction=args.epsilon_fraction, heuristic=args.heuristic, seed=args.seed
    )
    try:
        outcome = recover_general(psi, phi, opts)
    except NotARecovery as exc:
        print(f"no recovery: {exc}", file=out)
        return EXIT_NO
    except SearchExhausted as exc:
        print(f"no recovery found: {exc}", file=out)
        return EXIT_NO
    if isinstance(outcome, NotConvertible):
        print(f"not convertible: {outcome.reason}", file=out)
        return EXIT_NO
    if isinstance(outcome, OpenProblem):
        print(f"open problem: {outcome.reason}", file=out)
        return EXIT_OPEN
    if isinstance(outcome, ImpossibleAtDim):
        print(f"impossible at k={outcome.k}: {outcome.reason}", file=out)
        return EXIT_NO
    assert isinstance(outcome, Found)
    cert = outcome.certificate
    cls = classify_report(majorize(psi, phi, tol), psi.dim).kind.value
    record = certificate_record(cert, (lpsi, lphi), tol, cls, _timestamp(args.stamp))
    text = json.dumps(record, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(
            f"recovered {_fmt_nats(cert.recovered, args.bits)} of {_fmt_nats(cert.loss, args.bits)} "
            f"lost, k={cert.k}, certificate written to {args.out}",
            file=out,
        )
    else:
        out.write(text)
    return EXIT_OK


def cmd_epsmax(args, out) -> int:
    tol = _tol(args)
    psi, _ = load_state(args.psi, tol)
    phi, _ = load_state(args.phi, tol)
    _same_dim(psi, phi)
    if not 0.5 <= args.p <= 1.0:
        raise InputError("--p must lie in [1/2, 1]")
    chi = make_schmidt([args.p, 1.0 - args.p], tol)
    try:
        value = epsilon_max(psi, phi, chi, 1, 2, tol)
    except NotFeasibleAtZero as exc:
        print(f"not feasible at zero transfer: {exc}", file=out)
        return EXIT_NO
    print(f"{value:.9f}", file=out)
    return EXIT_OK


def cmd_scan(args, out) -> int:
    tol = _tol(args)
    psi, _ = load_state(args.psi, tol)
    phi, _ = load_state(args.phi, tol)
    _same_dim(psi, phi)
    grid = GridSpec(args.resolution, args.max_points, args.seed, tol)
    try:
        res = max_recovery_scan(psi, phi, args.kmax, grid, args.samples)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    if res.not_convertible:
        print("not convertible", file=sys.stderr)
        return EXIT_NO
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in res.per_k:
        writer.writerow([row.k, repr(row.best_recovered), row.feasible_count, row.points_tested])
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        out.write(buf.getvalue())
    return EXIT_OK


def cmd_gen(args, out) -> int:
    try:
        delta = parse_pattern(args.pattern)
        spec = PatternSpec(args.n, delta, args.margin, args.seed, tol=_tol(args))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    try:
        psi, phi = pair_with_pattern(spec)
    except PatternInfeasible as exc:
        print(f"pattern infeasible: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    label = args.pattern
    write_state(f"{args.out_prefix}psi.json", psi, f"psi {label} n={args.n} seed={args.seed}")
    write_state(f"{args.out_prefix}phi.json", phi, f"phi {label} n={args.n} seed={args.seed}")
    print(f"wrote {args.out_prefix}psi.json and {args.out_prefix}phi.json", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    # accepted before or after the subcommand; SUPPRESS keeps a subparser
    # default from clobbering a value given at the top level
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="equality tolerance on prefix sums (default 1e-12)")
    common.add_argument("--bits", action="store_true", default=argparse.SUPPRESS, help="display entropies in bits instead of nats")

    parser = argparse.ArgumentParser(prog="locc-recovery", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--tol", type=float, default=None, help="equality tolerance on prefix sums (default 1e-12)")
    parser.add_argument("--bits", action="store_true", help="display entropies in bits instead of nats")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="decide convertibility of PSI into PHI")
    p.add_argument("psi", nargs="?")
    p.add_argument("phi", nargs="?")
    p.add_argument("--cert", help="re-verify a certificate JSON instead")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("recover", parents=[common], help="synthesize an auxiliary recovery pair")
    p.add_argument("psi")
    p.add_argument("phi")
    p.add_argument("--epsilon-fraction", type=float, default=1.0)
    p.add_argument("--heuristic", action="store_true", help="search even when alpha_n == beta_n")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="certificate JSON path (default: stdout)")
    p.add_argument("--stamp", action="store_true", help="record the current UTC time (honours SOURCE_DATE_EPOCH)")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("epsmax", parents=[common], help="largest transfer for chi = (p, 1-p)")
    p.add_argument("psi")
    p.add_argument("phi")
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(func=cmd_epsmax)

    p = sub.add_parser("scan", parents=[common], help="best recovery per auxiliary dimension")
    p.add_argument("psi")
    p.add_argument("phi")
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--resolution", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--max-points", type=int, default=10_000_000)
    p.add_argument("--csv", help="output CSV path (default: stdout)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("gen", parents=[common], help="generate a pair with a given equality pattern")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pattern", default="strict", help="'strict' or 'delta:2,3,5'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--margin", type=float, default=0.01)
    p.add_argument("--out-prefix", default="")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    if args.tol is not None and not args.tol >= 0.0:
        print("error: --tol must be nonnegative", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args, out)
    except (InputError, SpectrumError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RecoveryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO


if __name__ == "__main__":
    sys.exit(main())
