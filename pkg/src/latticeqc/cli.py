"""Command-line front end.

Every command writes its result files plus a ``manifest.json`` into
``--out``. Errors print one JSON line on stderr and exit with a distinct
code: 2 parse, 3 dimension mismatch, 4 sampling (Nyquist), 5 function
neither constant nor balanced, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from latticeqc import __version__
from latticeqc.errors import DimensionError, FunctionClassError, LatticeQCError, ParseError
from latticeqc.experiments import crosstalk_bench, dj_run, scaling_study
from latticeqc.fileio import (
    atomic_write,
    load_config,
    read_boolean_function,
    read_matrix,
    read_vector,
    run_manifest,
    write_field_csv,
    write_json,
    write_matrix,
    write_pgm16,
    write_vector,
)
from latticeqc.gates import (
    BooleanFunction,
    dj_expected_output,
    dj_matrix,
    hadamard_basis_state,
    hadamard_matrix,
    matvec_oracle,
    normalize,
    qubits_for,
)
from latticeqc.lattice import LatticeLayout
from latticeqc.optics import PipelineConfig, pipeline_planes, run_pipeline
from latticeqc import plotting

LAYOUT_KEYS = {"n", "cell_pitch", "waist", "grid_px", "px_pitch", "px_per_cell", "pad", "extent"}
PIPELINE_KEYS = {"mode", "wavelength", "propagation_distance", "relay_distance", "zero_order_halfwidth"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail(ParseError(message))


def _fail(exc: LatticeQCError):
    line = {"error": exc.kind, "exit_code": exc.exit_code, "message": str(exc)}
    print(json.dumps(line), file=sys.stderr)
    sys.exit(exc.exit_code)


def build_config(n: int, args) -> PipelineConfig:
    """Defaults < config file < command-line flags."""
    settings = load_config(args.config) if args.config else {}
    unknown = set(settings) - LAYOUT_KEYS - PIPELINE_KEYS
    if unknown:
        raise ParseError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key in PIPELINE_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if settings.get("n", n) != n:
        raise DimensionError(f"config sets n={settings['n']} but the inputs have N={n}")
    pipeline = {k: settings[k] for k in PIPELINE_KEYS if k in settings}
    mode = pipeline.get("mode", "ideal")
    try:
        if "grid_px" in settings or "px_pitch" in settings:
            layout = LatticeLayout(
                n=n,
                cell_pitch=float(settings["cell_pitch"]),
                waist=float(settings.get("waist", settings["cell_pitch"] / 4)),
                grid_px=int(settings["grid_px"]),
                px_pitch=float(settings["px_pitch"]),
            )
            return PipelineConfig(layout=layout, **pipeline)
        geometry = {k: settings[k] for k in ("cell_pitch", "waist", "px_per_cell", "pad", "extent") if k in settings}
        pipeline.pop("mode", None)
        return PipelineConfig.create(n, mode, **geometry, **pipeline)
    except KeyError as exc:
        raise ParseError(f"config is missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, LatticeQCError):
            raise
        raise ParseError(f"invalid configuration: {exc}") from None


class _Run:
    """Collects output files for the manifest."""

    def __init__(self, args, command: str):
        self.out = Path(args.out)
        self.command = command
        self.argv = args.argv
        self.outputs: list[str] = []
        self.scales: dict[str, float] = {}

    def path(self, name: str) -> Path:
        self.outputs.append(name)
        return self.out / name

    def image(self, stem: str, intensity):
        self.scales[f"{stem}.pgm"] = write_pgm16(self.path(f"{stem}.pgm"), intensity)
        self.scales[f"{stem}.png"] = plotting.save_intensity_png(intensity, self.path(f"{stem}.png"))

    def finish(self, cfg: PipelineConfig | None):
        manifest = run_manifest(
            self.command,
            self.argv,
            cfg.to_dict() if cfg else {},
            self.outputs,
            __version__,
            self.scales,
        )
        write_json(self.out / "manifest.json", manifest)


def _prob_table(p, oracle=None) -> str:
    lines = ["row\tprobability" + ("\toracle" if oracle is not None else "")]
    for j, pj in enumerate(p):
        line = f"{j}\t{pj:.12f}"
        if oracle is not None:
            line += f"\t{oracle[j]:.12f}"
        lines.append(line)
    return "\n".join(lines)


def cmd_multiply(args) -> int:
    m = read_matrix(args.matrix)
    u = read_vector(args.vector)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"matrix must be square, got {m.shape[0]}x{m.shape[1]}")
    if m.shape[1] != u.size:
        raise DimensionError(f"matrix is {m.shape[0]}x{m.shape[1]} but vector has length {u.size}")
    u = normalize(u)
    cfg = build_config(u.size, args)
    result = run_pipeline(u, m, cfg)
    payload = result.to_dict()
    oracle = None
    if args.compare_oracle:
        v = matvec_oracle(m, u)
        oracle = np.abs(v) ** 2 / np.sum(np.abs(v) ** 2)
        deviation = float(np.max(np.abs(result.probabilities - oracle)))
        payload["oracle_probabilities"] = [float(x) for x in oracle]
        payload["max_deviation"] = deviation
    print(_prob_table(result.probabilities, oracle))
    if oracle is not None:
        print(f"max_deviation={payload['max_deviation']:.3e}")
    run = _Run(args, "multiply")
    write_json(run.path("readout.json"), payload)
    if args.images:
        planes = pipeline_planes(u, m, cfg)
        for name, fld in planes.items():
            run.image(f"plane_{name}", fld.intensity())
    run.finish(cfg)
    return 0


def cmd_crosstalk(args) -> int:
    n = 2**args.n
    cfg = build_config(n, args)
    cm = crosstalk_bench(args.n, cfg)
    run = _Run(args, "crosstalk")
    rows = "\n".join(",".join("%.17g" % x for x in row) for row in cm.entries) + "\n"
    atomic_write(run.path("crosstalk.csv"), rows)
    summary = dict(cm.summary(), mode=cfg.mode, fidelity_std_source="systematic (diffraction) spread only")
    write_json(run.path("summary.json"), summary)
    plotting.plot_crosstalk(cm, run.path("crosstalk.png"), title=f"N = {n}, {cfg.mode}")
    if args.images:
        h = hadamard_matrix(args.n)
        for j in range(n):
            planes = pipeline_planes(hadamard_basis_state(args.n, j), h, cfg)
            run.image(f"basis_{j}", planes["detected"].intensity())
    run.finish(cfg)
    print(f"N={n} mode={cfg.mode} fidelity={cm.fidelity:.6f} fidelity_std={cm.fidelity_std:.6f}")
    return 0


def parse_function(token: str, n_qubits: int | None, seed: int | None) -> BooleanFunction:
    """Bit string, file path, or one of constant0 / constant1 / random-balanced."""
    if token in ("constant0", "constant1", "random-balanced"):
        if n_qubits is None:
            raise ParseError(f"--n is required for {token}")
        n = 2**n_qubits
        if token == "random-balanced":
            return BooleanFunction.random_balanced(n, np.random.default_rng(seed))
        return BooleanFunction.constant(n, int(token[-1]))
    if Path(token).is_file():
        f = read_boolean_function(token)
    else:
        try:
            f = BooleanFunction.from_bits(token)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    if n_qubits is not None and f.n != 2**n_qubits:
        raise DimensionError(f"function has {f.n} entries but --n {n_qubits} needs {2**n_qubits}")
    return f


def cmd_deutsch_jozsa(args) -> int:
    f = parse_function(args.function, args.n, args.seed)
    if f.kind == "neither":
        raise FunctionClassError(f"function {f.bits()} is neither constant nor balanced")
    n_qubits = qubits_for(f.n)
    cfg = build_config(f.n, args)
    verdict = dj_run(f, cfg, args.threshold)
    expected = np.abs(dj_expected_output(f, n_qubits)) ** 2
    run = _Run(args, "deutsch-jozsa")
    lines = ["row,probability,expected"]
    lines += [f"{j},{'%.17g' % p},{'%.17g' % q}" for j, (p, q) in enumerate(zip(verdict.measured_probabilities, expected))]
    atomic_write(run.path("dj_bars.csv"), "\n".join(lines) + "\n")
    write_json(run.path("verdict.json"), dict(verdict.to_dict(), table=f.bits(), threshold=args.threshold))
    plotting.plot_dj_bars(verdict, expected, run.path("dj_bars.png"))
    if args.images:
        planes = pipeline_planes(hadamard_basis_state(n_qubits, 0), dj_matrix(f), cfg)
        run.image("detected", planes["detected"].intensity())
    run.finish(cfg)
    print(
        f"function={f.bits()} verdict={verdict.verdict} "
        f"zero_row_probability={verdict.zero_row_probability:.6f} correct={str(verdict.correct).lower()}"
    )
    return 0


def _dims(text: str) -> list[int]:
    try:
        dims = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ParseError(f"--dims must be comma-separated integers, got {text!r}") from None
    for d in dims:
        qubits_for(d)
    return dims


def cmd_scaling(args) -> int:
    dims = _dims(args.dims)
    cfg = build_config(dims[0], args)
    rows = scaling_study(dims, cfg, extent=args.extent) if args.extent else scaling_study(dims, cfg)
    run = _Run(args, "scaling")
    header = ["n", "fidelity", "fidelity_std", "cell_pitch", "waist", "spread_waist", "overlap"]
    lines = [",".join(header)]
    for r in rows:
        d = r.to_dict()
        lines.append(",".join(str(d["n"]) if k == "n" else "%.17g" % d[k] for k in header))
    atomic_write(run.path("scaling.csv"), "\n".join(lines) + "\n")
    write_json(run.path("scaling.json"), [r.to_dict() for r in rows])
    plotting.plot_scaling(rows, run.path("scaling.png"))
    run.finish(cfg)
    for r in rows:
        print(f"N={r.n} fidelity={r.fidelity:.6f} overlap={r.overlap:.4g}")
    return 0


def cmd_export_field(args) -> int:
    if args.vector:
        u = normalize(read_vector(args.vector))
    elif args.n:
        u = hadamard_basis_state(args.n, 0)
    else:
        raise ParseError("export-field needs --vector or --n")
    n = u.size
    if args.matrix:
        m = read_matrix(args.matrix)
    elif args.hadamard:
        m = hadamard_matrix(qubits_for(n))
    else:
        m = np.eye(n, dtype=np.complex128)
    if m.shape != (n, n):
        raise DimensionError(f"matrix is {m.shape[0]}x{m.shape[1]} but vector has length {n}")
    cfg = build_config(n, args)
    planes = pipeline_planes(u, m, cfg)
    names = list(planes) if args.plane == "all" else [args.plane]
    run = _Run(args, "export-field")
    write_matrix(run.path("matrix.csv"), m)
    write_vector(run.path("vector.csv"), u)
    for name in names:
        fld = planes[name]
        run.image(name, fld.intensity())
        if args.csv:
            write_field_csv(run.path(f"{name}.csv"), fld.amplitude)
    run.finish(cfg)
    print(f"wrote {len(run.outputs)} files to {run.out}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    shared = _Parser(add_help=False)
    shared.add_argument("--config", metavar="PATH", help="key = value or JSON config file")
    mode = shared.add_mutually_exclusive_group()
    mode.add_argument("--mode", choices=["ideal", "physical"], default=None)
    mode.add_argument("--ideal", dest="mode", action="store_const", const="ideal")
    mode.add_argument("--physical", dest="mode", action="store_const", const="physical")
    shared.add_argument("--out", metavar="DIR", default="results", help="output directory (default: results)")
    shared.add_argument("--seed", type=int, default=None, help="seed for random-balanced sampling")
    shared.add_argument("--compare-oracle", action="store_true", help="compare with the direct matrix product")
    shared.add_argument("--images", action="store_true", help="also write PGM/PNG intensity panels")
    shared.add_argument("--wavelength", type=float, default=None, metavar="M")
    shared.add_argument("--propagation-distance", type=float, default=None, metavar="M")
    shared.add_argument("--relay-distance", type=float, default=None, metavar="M")
    shared.add_argument("--zero-order-halfwidth", type=int, default=None, metavar="COLS")

    parser = _Parser(prog="latticeqc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"latticeqc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("multiply", parents=[shared], help="optical matrix-vector product")
    p.add_argument("matrix", help="N x N matrix (CSV or JSON)")
    p.add_argument("vector", help="length-N vector (CSV or JSON); normalized before encoding")
    p.set_defaults(func=cmd_multiply)

    p = sub.add_parser("crosstalk", parents=[shared], help="Hadamard-basis crosstalk matrix and fidelity")
    p.add_argument("--n", type=int, required=True, choices=[1, 2, 3, 4], help="number of qubits")
    p.set_defaults(func=cmd_crosstalk)

    p = sub.add_parser("deutsch-jozsa", parents=[shared], help="classify a Boolean function")
    p.add_argument("function", help="bit string, truth-table file, constant0, constant1 or random-balanced")
    p.add_argument("--n", type=int, default=None, help="number of qubits")
    p.add_argument("--threshold", type=float, default=0.5, help="zero-row probability above which the verdict is constant")
    p.set_defaults(func=cmd_deutsch_jozsa)

    p = sub.add_parser("scaling", parents=[shared], help="fidelity versus dimension at fixed lattice extent")
    p.add_argument("--dims", default="2,4,8,16", help="comma-separated powers of two")
    p.add_argument("--extent", type=float, default=None, metavar="M", help="lattice width (default 6.4 mm)")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("export-field", parents=[shared], help="write field intensities at pipeline planes")
    p.add_argument("--vector", help="input vector file")
    p.add_argument("--n", type=int, default=None, help="use the uniform state on 2**n cells instead of --vector")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--matrix", help="matrix file (default: identity)")
    g.add_argument("--hadamard", action="store_true", help="use the Hadamard gate")
    p.add_argument("--plane", default="all", choices=["all", "encoded", "modulated", "transformed", "detected"])
    p.add_argument("--csv", action="store_true", help="also write raw (re, im) CSV of each field")
    p.set_defaults(func=cmd_export_field)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = make_parser().parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except LatticeQCError as exc:
        _fail(exc)
    except (ValueError, IndexError) as exc:
        _fail(LatticeQCError(str(exc)))


if __name__ == "__main__":
    sys.exit(main())
