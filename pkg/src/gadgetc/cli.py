"""Command-line driver: ``gadgetc <command> ...``.

Exit codes: 0 success, 1 thresholds failed, 2 parse error, 3 validation
error, 4 resource limit.
"""

from __future__ import annotations

import argparse
import configparser
import io
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .circuits import CircuitParseError, parse_circuit, random_circuit
from .gadgets import (
    CompileError,
    Kind,
    compile_hamiltonian,
    epsilon_sweep,
    is_non_increasing,
)
from .history import (
    HistoryProblem,
    NotSelfInverseError,
    build_history_state,
    build_total,
)
from .pauli import (
    INTERACTION_SETS,
    DimensionError,
    HamiltonianParseError,
    OperatorSum,
    dense_limit,
    format_hamiltonian,
    parse_hamiltonian,
    realize_matrix,
    validate_interaction_set,
)
from .spectral import eigensolve, gap_sweep, ground_overlap

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_VALIDATION, EXIT_RESOURCE = 0, 1, 2, 3, 4

MODEL_SETS = {"zzxx": "ZZXX", "zx": "ZX", "real": "REAL_SUBSET"}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt(value: float) -> str:
    return f"{value:.12g}"


def _header(args) -> str:
    return f"gadgetc {args.command} seed={args.seed}"


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE) from None


def _looks_like_circuit(text: str) -> bool:
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            return line.split()[0].lower() == "qubits"
    return False


def _load_hamiltonian(path) -> OperatorSum:
    try:
        return parse_hamiltonian(_read_text(path))
    except HamiltonianParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None


def _load_circuit(path):
    try:
        return parse_circuit(_read_text(path), base_dir=Path(path).parent)
    except CircuitParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None


def _input_bits(x, n):
    x = "0" * n if x is None else x
    if len(x) != n or set(x) - {"0", "1"}:
        raise CliError(f"--x must be a bitstring of length {n}", EXIT_PARSE)
    return x


def _history_operator(circuit, x, include_clockinit):
    if circuit.n + circuit.T > dense_limit():
        raise CliError(
            f"n + T = {circuit.n + circuit.T} qubits exceeds the dense limit {dense_limit()}",
            EXIT_RESOURCE,
        )
    try:
        return build_total(circuit, x, include_clockinit)
    except NotSelfInverseError as exc:
        raise CliError(str(exc), EXIT_VALIDATION) from None


# -- commands ---------------------------------------------------------------------

def cmd_compile(args) -> int:
    text = _read_text(args.input)
    header = [_header(args)]
    if _looks_like_circuit(text):
        circuit = _load_circuit(args.input)
        x = _input_bits(args.x, circuit.n)
        target = _history_operator(circuit, x, args.include_clockinit)
        header += HistoryProblem(circuit, x).header()
    else:
        target = _load_hamiltonian(args.input)
    try:
        compiled = compile_hamiltonian(target, args.model, args.eps, args.ebar)
    except CompileError as exc:
        for t in exc.violations:
            print(f"violation: {fmt(t.coeff)} {t.word}", file=sys.stderr)
        raise CliError(str(exc), EXIT_VALIDATION) from None

    header += [
        f"model={args.model} eps={fmt(args.eps)} ebar={fmt(args.ebar)}",
        f"system qubits 1..{compiled.n_system}, ancillas {len(compiled.gadgets)}",
        f"total_shift={fmt(compiled.total_shift)} (target energy = energy + total_shift)",
    ]
    _emit(format_hamiltonian(compiled.H, header), args.out)

    report = _compile_report(args, compiled)
    if args.report:
        report_path = args.report
    elif args.out:
        report_path = str(args.out) + ".report"
    else:
        report_path = None
    if report_path:
        Path(report_path).write_text(report)
    else:
        sys.stderr.write(report)
    return EXIT_OK


def _compile_report(args, compiled) -> str:
    cfg = configparser.ConfigParser()
    cfg.optionxform = str
    cfg["compile"] = {
        "seed": str(args.seed),
        "model": compiled.model,
        "eps": fmt(compiled.eps),
        "ebar": fmt(compiled.ebar),
        "system_qubits": str(compiled.n_system),
        "ancillas": str(len(compiled.gadgets)),
        "total_qubits": str(compiled.H.n),
        "total_shift": fmt(compiled.total_shift),
    }
    for idx, g in enumerate(compiled.gadgets, start=1):
        p = g.params
        section = {
            "kind": g.kind.value,
            "target": f"{fmt(g.coefficient)} {g.target.terms[0].word}",
            "i": str(g.i), "j": str(g.j), "ancilla": str(g.k),
            "delta": fmt(p.delta), "A": fmt(p.A), "B": fmt(p.B),
        }
        if p.C is not None:
            section["C"] = fmt(p.C)
            section["D"] = fmt(p.D)
        section["declared_shift"] = fmt(g.declared_shift)
        cfg[f"gadget {idx}"] = section
    buf = io.StringIO()
    buf.write(f"# {_header(args)}\n")
    cfg.write(buf)
    return buf.getvalue()


def cmd_validate(args) -> int:
    op = _load_hamiltonian(args.input)
    verdict = validate_interaction_set(op, INTERACTION_SETS[MODEL_SETS[args.model]])
    if verdict:
        print(f"pass: {len(op.terms)} terms in the {args.model} set")
        return EXIT_OK
    for t in verdict.violations:
        print(f"violation: {fmt(np.real(t.coeff))} {t.word}")
    return EXIT_VALIDATION


def cmd_build_history(args) -> int:
    circuit = _load_circuit(args.circuit)
    x = _input_bits(args.x, circuit.n)
    op = _history_operator(circuit, x, args.include_clockinit)
    header = [_header(args)] + HistoryProblem(circuit, x).header()
    header.append(f"include_clockinit={args.include_clockinit}")
    _emit(format_hamiltonian(op, header), args.out)
    return EXIT_OK


def _verify_one(circuit, x, include_clockinit):
    op = _history_operator(circuit, x, include_clockinit)
    psi = build_history_state(circuit, x)
    h = realize_matrix(op)
    residual = float(np.linalg.norm(h @ psi))
    rep = eigensolve(h, k=2)
    overlap = ground_overlap(h, psi)
    return residual, overlap, rep.gap


def cmd_verify_history(args) -> int:
    lines = [f"# {_header(args)}"]
    ok = True
    if args.random:
        rng = np.random.default_rng(args.seed)
        lines.append("index,n,T,residual,overlap,gap")
        for idx in range(args.random):
            n = int(rng.integers(1, args.max_n + 1))
            T = int(rng.integers(1, args.max_t + 1))
            circuit = random_circuit(n, T, rng)
            x = "".join(str(b) for b in rng.integers(0, 2, size=n))
            residual, overlap, gap = _verify_one(circuit, x, args.include_clockinit)
            ok &= residual <= args.tol_residual and overlap >= 1 - args.tol_overlap
            lines.append(f"{idx},{n},{T},{fmt(residual)},{fmt(overlap)},{fmt(gap)}")
    else:
        if args.circuit is None:
            raise CliError("give a circuit file or --random N", EXIT_PARSE)
        circuit = _load_circuit(args.circuit)
        x = _input_bits(args.x, circuit.n)
        residual, overlap, gap = _verify_one(circuit, x, args.include_clockinit)
        ok = residual <= args.tol_residual and overlap >= 1 - args.tol_overlap
        lines += [
            f"n = {circuit.n}", f"T = {circuit.T}", f"x = {x}",
            f"residual = {fmt(residual)}", f"overlap = {fmt(overlap)}", f"gap = {fmt(gap)}",
        ]
    verdict = "pass" if ok else "fail"
    lines.append(f"# verdict={verdict}" if args.random else f"verdict = {verdict}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_FAIL


def _parse_eps(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise CliError(f"bad --eps list {text!r}", EXIT_PARSE) from None
    if not values:
        raise CliError("--eps needs at least one value", EXIT_PARSE)
    if any(not 0 < v < 1 for v in values):
        raise CliError("eps values must lie in (0, 1)", EXIT_PARSE)
    if any(b >= a for a, b in zip(values, values[1:])):
        raise CliError("eps values must be strictly descending", EXIT_PARSE)
    return values


def cmd_sweep_epsilon(args) -> int:
    eps = _parse_eps(args.eps)
    try:
        kind = Kind(args.kind.upper())
    except ValueError:
        raise CliError(f"unknown gadget kind {args.kind!r}", EXIT_PARSE) from None
    rows = epsilon_sweep(kind, args.coeff, eps, args.ebar)
    lines = [
        f"# {_header(args)} kind={kind.value} coeff={fmt(args.coeff)} ebar={fmt(args.ebar)}",
        "epsilon,delta,lambda_target,lambda_gadget,abs_error,overlap",
    ]
    for r in rows:
        lines.append(",".join(fmt(v) for v in (
            r.epsilon, r.delta, r.lambda_target, r.lambda_gadget, r.abs_error, r.overlap)))
    monotone = is_non_increasing([r.abs_error for r in rows])
    lines.append(f"# monotone_error={'true' if monotone else 'false'}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_gap_sweep(args) -> int:
    hi = _load_hamiltonian(args.initial)
    hf = _load_hamiltonian(args.final)
    if hi.n != hf.n:
        raise CliError(f"qubit counts differ: {hi.n} vs {hf.n}", EXIT_VALIDATION)
    if hi.n > dense_limit():
        raise CliError(f"{hi.n} qubits exceeds the dense limit {dense_limit()}", EXIT_RESOURCE)
    if args.grid < 2:
        raise CliError("--grid needs at least 2 points", EXIT_PARSE)
    sweep = gap_sweep(hi, hf, args.grid)
    lines = [f"# {_header(args)} grid={args.grid}", "s,gap"]
    lines += [f"{fmt(s)},{fmt(g)}" for s, g in zip(sweep.s, sweep.gaps)]
    lines.append(f"# min_gap={fmt(sweep.min_gap)} at s={fmt(sweep.argmin)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gadgetc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--seed", type=int, default=0, help="recorded in every output header")

    p = sub.add_parser("compile", help="rewrite a Hamiltonian (or circuit) into the ZZXX or ZX set")
    p.add_argument("input", help="Hamiltonian file or circuit file")
    p.add_argument("--model", choices=["zzxx", "zx"], default="zzxx")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--ebar", type=float, default=1.0)
    p.add_argument("--x", help="circuit input bits (default all zeros)")
    p.add_argument("--include-clockinit", action="store_true")
    p.add_argument("--report", help="gadget report path (default: <out>.report or stderr)")
    common(p)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("validate", help="check a Hamiltonian against an interaction set")
    p.add_argument("input")
    p.add_argument("--model", choices=sorted(MODEL_SETS), default="zzxx")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("build-history", help="write the history Hamiltonian of a circuit")
    p.add_argument("circuit")
    p.add_argument("--x")
    p.add_argument("--include-clockinit", action="store_true")
    common(p)
    p.set_defaults(func=cmd_build_history)

    p = sub.add_parser("verify-history", help="check that the history state is the ground state")
    p.add_argument("circuit", nargs="?")
    p.add_argument("--x")
    p.add_argument("--include-clockinit", action="store_true")
    p.add_argument("--tol-residual", type=float, default=1e-10)
    p.add_argument("--tol-overlap", type=float, default=1e-8)
    p.add_argument("--random", type=int, default=0, metavar="N", help="verify N seeded random circuits")
    p.add_argument("--max-n", type=int, default=3)
    p.add_argument("--max-t", type=int, default=4)
    common(p)
    p.set_defaults(func=cmd_verify_history)

    p = sub.add_parser("sweep-epsilon", help="gadget error versus eps as CSV")
    p.add_argument("--kind", required=True, help="zx_from_zzxx, zz_from_zx or xx_from_zx")
    p.add_argument("--coeff", type=float, default=1.0)
    p.add_argument("--eps", required=True, help="descending list, e.g. 0.2,0.1,0.05")
    p.add_argument("--ebar", type=float, default=1.0)
    common(p)
    p.set_defaults(func=cmd_sweep_epsilon)

    p = sub.add_parser("gap-sweep", help="gap of (1-s) Hi + s Hf as CSV")
    p.add_argument("initial")
    p.add_argument("final")
    p.add_argument("--grid", type=int, default=101)
    common(p)
    p.set_defaults(func=cmd_gap_sweep)
    return parser


def _check_tolerances(args):
    for name in ("tol_residual", "tol_overlap", "eps", "ebar"):
        value = getattr(args, name, None)
        # sweep-epsilon takes an eps list, checked by _parse_eps
        if isinstance(value, float) and not value > 0:
            raise CliError(f"--{name.replace('_', '-')} must be positive", EXIT_PARSE)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _check_tolerances(args)
        return args.func(args)
    except CliError as exc:
        print(f"gadgetc: error: {exc}", file=sys.stderr)
        return exc.code
    except DimensionError as exc:
        print(f"gadgetc: error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
