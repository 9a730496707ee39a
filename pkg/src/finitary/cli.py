"""Command-line front end.

Exit codes: 0 success (or acceptance), 1 the machine or data failed a domain check
(or the reference was rejected), 2 unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import matcore, proclang, quantum, serialization, stochastic
from .exceptions import ConvergenceError, EnumerationLimitError, MachineError
from .machines import EXAMPLES, example
from .protocols import MeasurementProtocol, run_protocol
from .quantum import QuantumMachine
from .serialization import ParseError


class InputError(Exception):
    pass


def _load_machine(args):
    if (args.machine is None) == (args.example is None):
        raise InputError("give exactly one of --machine or --example")
    if args.example is not None:
        if args.example not in EXAMPLES:
            raise InputError(f"unknown example {args.example!r}; choose from {', '.join(sorted(EXAMPLES))}")
        return example(args.example).machine
    return serialization.load_machine(args.machine)


def _protocol(args, m):
    if getattr(args, "protocol", None) is None:
        return None
    if not isinstance(m, QuantumMachine):
        raise MachineError("measurement protocols apply to quantum machines only")
    if args.protocol.strip().upper() in ("I", "II", "1", "2"):
        return MeasurementProtocol.named(args.protocol, m)
    return serialization.load_protocol(args.protocol)


def _distribution(m, L, protocol):
    if protocol is not None:
        return run_protocol(m, protocol, L)
    return proclang.enumerate_distribution(m, L)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _require_length(args, minimum: int = 0) -> int:
    if args.length is None:
        raise InputError("--length is required")
    if args.length < minimum:
        raise InputError(f"--length must be at least {minimum}")
    return args.length


# -- commands ------------------------------------------------------------------------


def cmd_validate(args) -> int:
    m = _load_machine(args)
    report = {"kind": m.kind, "name": m.name, "states": len(m.states), "valid": True}
    status = 0
    if isinstance(m, QuantumMachine):
        s = quantum.structural_checks(m)
        report["structural"] = {
            "strongly_connected": s.strongly_connected,
            "components": s.components,
            "incoming_labels_consistent": s.incoming_labels_consistent,
            "alphabet_bounded": s.alphabet_bounded,
            "violations": s.violations,
        }
        report["deterministic"] = quantum.is_deterministic(m)
        report["complete"] = quantum.is_complete(m)
        if not s.ok:
            report["valid"] = False
            status = 1
    else:
        report["deterministic"] = stochastic.is_deterministic(m)
        report["state_classes"] = {k: v.value for k, v in stochastic.classify_states(m).items()}
    _emit(args, serialization.dumps(report))
    return status


def cmd_words(args) -> int:
    m = _load_machine(args)
    d = _distribution(m, _require_length(args), _protocol(args, m))
    _emit(args, serialization.dumps(d.to_dict()))
    return 0


def cmd_convert(args) -> int:
    m = _load_machine(args)
    if not isinstance(m, QuantumMachine):
        raise MachineError("convert expects a deterministic quantum generator")
    _emit(args, serialization.dumps(serialization.machine_to_dict(quantum.equivalent_sdg(m))))
    return 0


def cmd_reverse(args) -> int:
    m = _load_machine(args)
    if not isinstance(m, QuantumMachine):
        raise MachineError("reverse expects a quantum machine")
    _emit(args, serialization.dumps(serialization.machine_to_dict(quantum.reverse(m))))
    return 0


def cmd_stationary(args) -> int:
    m = _load_machine(args)
    tol = matcore.DEFAULT_TOL if args.tol is None else args.tol
    if isinstance(m, QuantumMachine):
        rho = quantum.stationary_state(m, tol)
        out = {
            "states": list(m.states),
            "density": matcore.encode_matrix(rho),
            "residual": quantum.fixed_point_residual(m, rho),
        }
    else:
        r = stochastic.restrict_to_recurrent(m)
        out = {"states": list(r.states), "stationary": [float(p) for p in r.initial]}
    _emit(args, serialization.dumps(out))
    return 0


def cmd_forbidden(args) -> int:
    m = _load_machine(args)
    tol = matcore.ZERO_TOL if args.tol is None else args.tol
    kw = {}
    protocol = _protocol(args, m)
    if protocol is not None:
        kw["protocol"] = protocol
    report = proclang.irreducible_forbidden_words(m, _require_length(args, 1), tol, **kw)
    _emit(args, serialization.dumps({"horizon": report.horizon, "irreducible": report.irreducible}))
    return 0


def cmd_accept(args) -> int:
    m = _load_machine(args)
    if args.ref is None:
        raise InputError("--ref is required")
    if args.delta is None or args.delta < 0:
        raise InputError("--delta must be given and non-negative")
    refs = serialization.load_distributions(args.ref)
    tol = matcore.ZERO_TOL if args.tol is None else args.tol
    kw = {}
    protocol = _protocol(args, m)
    if protocol is not None:
        kw["protocol"] = protocol
    result = proclang.accepts_with_threshold(m, refs, args.delta, tol, **kw)
    out = {
        "accepted": result.accepted,
        "max_deviation": result.max_deviation,
        "worst_word": result.worst_word,
        "support_violations": result.support_violations,
    }
    _emit(args, serialization.dumps(out))
    return 0 if result.accepted else 1


def cmd_plotdata(args) -> int:
    m = _load_machine(args)
    d = _distribution(m, _require_length(args, 1), _protocol(args, m))
    points = proclang.plot_data(d)
    if args.format == "json":
        _emit(args, serialization.dumps([[x, y] for x, y in points]))
    else:
        _emit(args, proclang.plot_tsv(points))
    return 0


COMMANDS = {
    "validate": (cmd_validate, "check a machine's invariants and structural properties"),
    "words": (cmd_words, "word distribution at one length"),
    "convert": (cmd_convert, "equivalent classical generator of a deterministic quantum generator"),
    "reverse": (cmd_reverse, "time-reversed quantum machine"),
    "stationary": (cmd_stationary, "stationary distribution or density matrix"),
    "forbidden": (cmd_forbidden, "irreducible forbidden words up to a length"),
    "accept": (cmd_accept, "threshold recognition of a reference distribution"),
    "plotdata": (cmd_plotdata, "(0.w, log2 density) points of a binary distribution"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finitary", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--machine", help="machine JSON file")
        p.add_argument("--example", help=f"built-in machine: {', '.join(EXAMPLES)}")
        p.add_argument("--protocol", help="I, II, or a protocol JSON file (quantum machines)")
        p.add_argument("--length", "-L", type=int, help="word length (maximum length for forbidden)")
        p.add_argument("--delta", type=float, help="acceptance threshold")
        p.add_argument("--tol", type=float, help="tolerance override")
        p.add_argument("--ref", help="reference distribution JSON (object or list)")
        p.add_argument("--out", "-o", help="write output here instead of stdout")
        p.add_argument("--format", choices=("json", "tsv"), default="tsv" if name == "plotdata" else "json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func = COMMANDS[args.command][0]
    try:
        return func(args)
    except (InputError, ParseError, EnumerationLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MachineError, ConvergenceError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
