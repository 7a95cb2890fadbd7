"""Command-line entry point: ``tact {forward,gen-model,energy,circuit}``.

Exit codes: 0 success, 1 computation error, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import circuit, modelio
from .modelio import ModelFormatError
from .network import forward_states, decode_output
from .oracle import compare, oracle_forward
from .timing import DomainError, EncodingConfig

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive(kind):
    def parse(text):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid value {text!r}") from None
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


def cmd_forward(args) -> int:
    if args.trace and args.mode == "oracle":
        raise UsageError("--trace needs --mode timing or both")
    model = modelio.load_model(args.model)
    inputs = modelio.load_inputs(args.input, width=model.layers[0].fan_in)
    out = sys.stdout
    traces = []
    for i, x in enumerate(inputs):
        if args.mode == "oracle":
            values, _ = oracle_forward(model, x)
        else:
            states = forward_states(model, x)
            values = decode_output(states[-1], model.cfg)
            traces.append((i, states))
        out.write(modelio.format_vector(values) + "\n")
    if args.trace:
        with open(args.trace, "w", newline="") as fp:
            modelio.write_trace(fp, traces)
    if args.mode == "both":
        out.write(compare(model, inputs).summary() + "\n")
    return EXIT_OK


def cmd_gen_model(args) -> int:
    try:
        shape = modelio.parse_shape(args.shape)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        cfg = EncodingConfig(args.t_in, args.lam, args.epsilon)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    model = modelio.generate_model(shape, args.seed, args.weight_mode, cfg)
    text = modelio.dumps_model(model)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return EXIT_OK


def cmd_energy(args) -> int:
    try:
        params = circuit.CrossbarParams(
            n_inputs=args.n, m_outputs=args.m, c_dl_per_syn=args.cdl, c_al_per_syn=args.cal,
            v_dd=args.vdd, e_neuron=args.e_neuron, r_syn=args.r, c_in_neuron=args.c_in,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = circuit.energy_report(params)
    check = circuit.subthreshold_current_check(params)
    for line in report.lines() + check.lines():
        print(line)
    return EXIT_OK


def cmd_circuit(args) -> int:
    events = modelio.parse_events(Path(args.events).read_text())
    if not 0 < args.theta_v < args.vdd:
        raise UsageError("--theta-v must lie strictly between 0 and --vdd")
    # each event's weight scales the unit conductance 1/R
    branches = [(t_on, weight / args.r) for t_on, weight in events]
    rail = circuit.RcRailSpec(branches, args.c, args.vdd, args.theta_v)
    for line in circuit.compare_rc_ideal(rail).lines():
        print(line)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tact", description="Time-domain analog weighted-sum simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forward", help="run inference on a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="one input vector per line")
    p.add_argument("--mode", choices=("timing", "oracle", "both"), default="timing")
    p.add_argument("--trace", help="write per-neuron timing pairs as CSV")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("gen-model", help="generate a seeded random model")
    p.add_argument("--shape", required=True, help='layer widths, e.g. "784-100-100-10"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weight-mode", choices=("analog", "binary"), default="analog")
    p.add_argument("--out", default="-")
    p.add_argument("--t-in", type=_positive(float), default=1.0)
    p.add_argument("--lambda", dest="lam", type=_positive(float), default=1.0)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.set_defaults(func=cmd_gen_model)

    poc = circuit.POC_250NM
    p = sub.add_parser("energy", help="crossbar energy per synapse operation")
    p.add_argument("--n", type=_positive(int), default=poc.n_inputs)
    p.add_argument("--m", type=_positive(int), default=poc.m_outputs)
    p.add_argument("--cdl", type=_positive(float), default=poc.c_dl_per_syn)
    p.add_argument("--cal", type=_positive(float), default=poc.c_al_per_syn)
    p.add_argument("--vdd", type=_positive(float), default=poc.v_dd)
    p.add_argument("--e-neuron", type=_positive(float), default=poc.e_neuron)
    p.add_argument("--r", type=_positive(float), default=poc.r_syn)
    p.add_argument("--c-in", type=float, default=0.0, help="post-neuron input capacitance")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("circuit", help="RC firing time versus the linear model")
    p.add_argument("--events", required=True, help="rows of 't_on, weight'")
    p.add_argument("--r", type=_positive(float), default=1e9)
    p.add_argument("--c", type=_positive(float), default=1e-12)
    p.add_argument("--theta-v", type=_positive(float), default=0.3)
    p.add_argument("--vdd", type=_positive(float), default=1.0)
    p.set_defaults(func=cmd_circuit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelFormatError, UsageError, OSError) as exc:
        print(f"tact {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValueError) as exc:
        print(f"tact {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
