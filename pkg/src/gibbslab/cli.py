"""``gibbslab`` command line.

Subcommands
-----------
count          microstate count of N particles over X states
mix SCENARIO   mixing entropy of a scenario file, exact and leading order
demon CONFIG   membrane-demon un-mixing run, with event ledger
quantum TASK   enumerate | bookkeeping | reduced-dm | orthogonality
replay FILE    re-run a manifest and compare checksums

Reports go to stdout as JSON (default) or CSV. Every report carries
``"units": "k"``. Problems are reported as an error record and exit
status 1.

Stochastic runs (``demon``, ``quantum orthogonality``) also write a run
manifest, and ``demon`` its event ledger, to the output directory: the
``--output-dir`` flag, else ``$GIBBSLAB_OUTPUT_DIR``, else
``./gibbslab-output``. A manifest stores the fully resolved parameters, so
``gibbslab replay`` needs neither the original config file nor the seed
flag.
"""
import argparse
import csv
import hashlib
import io
import json
import math
import os
import secrets
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import DEMON_FIELDS, SCENARIO_FIELDS, load_config
from .counting import (CountingConvention, StateSpaceSpec, dilute_limit_deviation,
                       ln_microstate_count)
from .demon import (DemonConfig, EventLedger, init_ensemble, left_count_chisquare,
                    remove_partition, evolve, run_demon_protocol, sample_left_counts,
                    speed_ladder)
from .errors import ConfigError, InfeasibleStateError
from .mixing import (DiscriminationPolicy, MixingScenario, boltzmann_mixing_entropy,
                     stirling_mixing_entropy)
from .quantum import (ModeBasis, antisymmetrize, basis_state, enumerate_states,
                      evolve_and_check_orthogonality, haar_unitary, localized_state,
                      reduced_density_matrix, symmetrization_bookkeeping, symmetrize)
from .thermo import GasSpecimen, thermo_mixing_entropy

__all__ = ["main", "RunManifest", "run_command", "output_dir", "ENV_OUTPUT_DIR"]

ENV_OUTPUT_DIR = "GIBBSLAB_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "gibbslab-output"
UNITS = "k"
STOCHASTIC = ("demon", "quantum.orthogonality")


class UsageError(ValueError):
    pass


class ReplayMismatch(ValueError):
    pass


def output_dir(override=None):
    return Path(override or os.environ.get(ENV_OUTPUT_DIR) or DEFAULT_OUTPUT_DIR)


def _sha256(text):
    return hashlib.sha256(text.encode()).hexdigest()


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False,
                      default=_jsonable)


@dataclass
class RunManifest:
    """Everything needed to re-run a command and check its outputs."""

    subcommand: str
    params: dict
    seed: int = None
    version: str = __version__
    output_checksum: str = ""
    ledger_checksum: str = None

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=_jsonable) + "\n"

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
            return cls(**data)
        except (json.JSONDecodeError, TypeError) as exc:
            raise ConfigError(f"not a run manifest: {exc}") from None


# -- handlers: resolved params -> (records, ledger text or None) -------------

def _finite_or_none(x):
    return x if math.isfinite(x) else None


def run_count(p):
    conv = CountingConvention.parse(p["convention"])
    spec = StateSpaceSpec(p["N"], p["X"])
    lnW = ln_microstate_count(spec, conv)
    deviation = None
    if conv in (CountingConvention.BOSE, CountingConvention.FERMI) and spec.N >= 1:
        deviation = dilute_limit_deviation(spec, conv)
    return [{"N": spec.N, "X": spec.X, "convention": conv.value, "ln_W": lnW.ln_value,
             "W": _finite_or_none(lnW.value), "dilute_deviation": deviation}], None


def _scenario(p):
    def side(name):
        T = p[f"{name}.T"] if p[f"{name}.T"] is not None else p["T"]
        return GasSpecimen(p[f"{name}.species"], p[f"{name}.N"], p[f"{name}.V"], T)

    return MixingScenario(side("left"), side("right"),
                          DiscriminationPolicy.parse(p["policy"]),
                          CountingConvention.parse(p["convention"]),
                          p["states_per_volume"], p["similarity"])


def run_mix(p):
    s = _scenario(p)
    exact = boltzmann_mixing_entropy(s)
    leading = stirling_mixing_entropy(s)
    return [{"policy": s.policy.value, "convention": s.convention.value,
             "same_species": s.same_species, "N_left": s.left.N, "N_right": s.right.N,
             "delta_S_exact": exact, "delta_S_leading": leading,
             "leading_minus_exact": leading - exact,
             "delta_S_thermo": thermo_mixing_entropy(s.left, s.right, s.mixes)}], None


def demon_config(p):
    T = p["T"]
    speed = p["membrane_speed"] if p["membrane_speed"] is not None else p["speed_factor"] * math.sqrt(T)
    return DemonConfig(N_per_side=p["n_per_side"], box=(p["box_width"], p["box_height"]), T=T,
                       membrane_speed=speed, seed=p["seed"], thermal_walls=p["thermal_walls"],
                       species=(p["species_left"], p["species_right"]),
                       mixing_time=p["mixing_time"], quasi_static_limit=p["quasi_static_limit"])


def run_demon(p):
    cfg = demon_config(p)
    ledger = EventLedger()
    result = run_demon_protocol(cfg, ledger=ledger)
    ledger_text = ledger.to_jsonl()
    summary = {"record": "summary", "seed": cfg.seed, **result.summary(),
               "ledger_checksum": _sha256(ledger_text), "ledger_records": len(ledger)}
    records = [summary]
    if p["ladder"]:
        rungs = speed_ladder(cfg, tuple(p["ladder"]), replicas=p["replicas"])
        devs = [r.mean_relative_deviation for r in rungs]
        order = np.argsort([-r.factor for r in rungs])  # fastest first
        ordered = [devs[i] for i in order]
        summary["ladder_monotone_from_above"] = bool(
            all(d > 0 for d in ordered) and all(a > b for a, b in zip(ordered, ordered[1:])))
        for r in rungs:
            records.append({"record": "ladder", "speed_factor": r.factor,
                            "membrane_speed": r.membrane_speed, "replicas": len(r.runs),
                            "work_total_over_T": r.mean_entropy, "target": r.runs[0].target,
                            "relative_deviation": r.mean_relative_deviation})
    if p["fluctuation_samples"]:
        e = init_ensemble(cfg)
        remove_partition(e)
        evolve(e, cfg.resolved_mixing_time)
        counts = sample_left_counts(e, p["fluctuation_samples"], p["fluctuation_interval"])
        n = 2 * cfg.N_per_side
        stat, pvalue, dof = left_count_chisquare(counts, n)
        records.append({"record": "fluctuations", "samples": int(counts.size),
                        "interval": p["fluctuation_interval"], "n_particles": n,
                        "mean_left": float(counts.mean()), "variance_left": float(counts.var()),
                        "expected_mean": n / 2, "expected_variance": n / 4,
                        "chi2": stat, "pvalue": pvalue, "dof": dof})
    return records, ledger_text


def run_quantum_enumerate(p):
    records = []
    for name in p["statistics"]:
        conv = CountingConvention.parse(name)
        counted = enumerate_states(p["N"], p["X"], conv)
        try:
            closed = round(ln_microstate_count(StateSpaceSpec(p["N"], p["X"]), conv).value)
        except InfeasibleStateError:
            closed = 0
        records.append({"N": p["N"], "X": p["X"], "statistics": conv.value,
                        "enumerated": counted, "closed_form": closed, "match": counted == closed})
    return records, None


def run_quantum_bookkeeping(p):
    b = symmetrization_bookkeeping(p["N_left"], p["N_right"], p["X_left"], p["X_right"],
                                   p["constant"])
    return [{"N_left": p["N_left"], "N_right": p["N_right"], "X_left": p["X_left"],
             "X_right": p["X_right"], "constant": p["constant"],
             "ln_W_flawed_before": b.flawed_before.ln_value,
             "ln_W_flawed_after": b.flawed_after.ln_value,
             "ln_W_correct_before": b.correct_before.ln_value,
             "ln_W_correct_after": b.correct_after.ln_value,
             "delta_S_flawed": b.delta_flawed, "delta_S_correct": b.delta_correct,
             "gap": b.gap}], None


def run_quantum_reduced_dm(p):
    X = p["X"]
    phi, psi = basis_state(X, p["phi"]), basis_state(X, p["psi"])
    build = antisymmetrize if p["symmetry"] == "antisymmetric" else symmetrize
    state = build(phi, psi)
    mixture = 0.5 * (np.outer(phi, phi.conj()) + np.outer(psi, psi.conj()))
    records = []
    for which in ("first", "second"):
        rho = reduced_density_matrix(state, which)
        rec = {"label": which, "symmetry": p["symmetry"], "purity": rho.purity(),
               "max_abs_deviation": float(np.max(np.abs(rho.matrix - mixture)))}
        for i, ev in enumerate(sorted(rho.eigenvalues(), reverse=True)):
            rec[f"eigenvalue_{i}"] = float(ev)
        records.append(rec)
    return records, None


def run_quantum_orthogonality(p):
    X = p["X"]
    rng = np.random.default_rng(p["seed"])
    basis = ModeBasis.halves(X // 2, X - X // 2)
    phi = localized_state(basis, "L", rng)
    psi = localized_state(basis, "R", rng)
    U = haar_unitary(X, rng)
    worst = evolve_and_check_orthogonality(phi, psi, U, p["steps"])
    return [{"X": X, "steps": p["steps"], "seed": p["seed"],
             "initial_overlap": float(abs(np.vdot(phi, psi))), "max_overlap": worst}], None


HANDLERS = {
    "count": run_count,
    "mix": run_mix,
    "demon": run_demon,
    "quantum.enumerate": run_quantum_enumerate,
    "quantum.bookkeeping": run_quantum_bookkeeping,
    "quantum.reduced-dm": run_quantum_reduced_dm,
    "quantum.orthogonality": run_quantum_orthogonality,
}


def run_command(name, params):
    """Run a subcommand on resolved parameters.

    Returns
    -------
    report : dict
        ``command``, ``version``, ``units``, ``params`` and ``records``.
    ledger : str or None
        Event ledger as JSON lines, for ``demon``.
    """
    if name not in HANDLERS:
        raise UsageError(f"unknown subcommand {name!r}")
    records, ledger = HANDLERS[name](params)
    # sorted so a replay from the manifest prints the same bytes
    report = {"command": name, "version": __version__, "units": UNITS, "params": dict(sorted(params.items())),
              "records": records}
    return report, ledger


# -- output -----------------------------------------------------------------

def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_cell(x) for x in v)
    return v


def format_report(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2, allow_nan=False, default=_jsonable) + "\n"
    if "error" in report:
        rows = [{"command": report["command"], "units": UNITS,
                 **{f"error_{k}" if k in ("type", "message") else k: v
                    for k, v in report["error"].items()}}]
    else:
        rows = [{"command": report["command"], "units": UNITS, **r} for r in report["records"]]
    fields = []
    for r in rows:
        fields += [k for k in r if k not in fields]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, restval="", lineterminator="\r\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: _csv_cell(v) for k, v in r.items()})
    return buf.getvalue()


def error_report(command, exc):
    return {"command": command, "version": __version__, "units": UNITS,
            "error": {"type": type(exc).__name__, "message": str(exc),
                      "line": getattr(exc, "line", None), "field": getattr(exc, "field", None)}}


# -- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output-dir", help=f"overrides ${ENV_OUTPUT_DIR}")
    common.add_argument("--manifest", help="write the run manifest to this path")

    parser = _Parser(prog="gibbslab", description="Entropy-of-mixing laboratory.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("count", parents=[common], help="microstate count")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--convention", required=True,
                   choices=[c.value for c in CountingConvention])

    p = sub.add_parser("mix", parents=[common], help="mixing entropy of a scenario file")
    p.add_argument("scenario")

    p = sub.add_parser("demon", parents=[common], help="membrane-demon un-mixing run")
    p.add_argument("config")
    p.add_argument("--seed", type=int)
    p.add_argument("--ledger", help="ledger path (default: in the output directory)")

    q = sub.add_parser("quantum", help="small quantum demonstrations")
    tasks = q.add_subparsers(dest="task", required=True, parser_class=_Parser)
    t = tasks.add_parser("enumerate", parents=[common])
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--x", type=int, required=True)
    t.add_argument("--statistics", nargs="+", default=["distinguishable", "bose", "fermi"],
                   choices=["distinguishable", "bose", "fermi"])
    t = tasks.add_parser("bookkeeping", parents=[common])
    t.add_argument("--n", type=int, required=True, help="particles per compartment")
    t.add_argument("--x", type=int, required=True, help="modes per compartment")
    t.add_argument("--n-right", type=int, help="right compartment, if different")
    t.add_argument("--x-right", type=int, help="right compartment, if different")
    t.add_argument("--constant", choices=("factorial", "bose", "fermi"), default="factorial")
    t = tasks.add_parser("reduced-dm", parents=[common])
    t.add_argument("--x", type=int, default=2)
    t.add_argument("--phi", type=int, default=0, help="mode of the first orbital")
    t.add_argument("--psi", type=int, default=1, help="mode of the second orbital")
    t.add_argument("--symmetry", choices=("antisymmetric", "symmetric"), default="antisymmetric")
    t = tasks.add_parser("orthogonality", parents=[common])
    t.add_argument("--x", type=int, default=4)
    t.add_argument("--steps", type=int, default=1000)
    t.add_argument("--seed", type=int)

    p = sub.add_parser("replay", parents=[common], help="re-run a manifest")
    p.add_argument("manifest_file", metavar="MANIFEST")
    p.add_argument("--ledger", help="also write the regenerated ledger here")
    return parser


def _new_seed():
    return secrets.randbits(63)


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def resolve(args):
    """Turn parsed arguments into ``(command name, resolved params)``."""
    if args.subcommand == "count":
        return "count", {"N": args.n, "X": args.x, "convention": args.convention}
    if args.subcommand == "mix":
        return "mix", load_config(_read(args.scenario), SCENARIO_FIELDS)
    if args.subcommand == "demon":
        params = load_config(_read(args.config), DEMON_FIELDS)
        if args.seed is not None:
            params["seed"] = args.seed
        if params["seed"] is None:
            params["seed"] = _new_seed()
        return "demon", params
    task = args.task
    if task == "enumerate":
        return "quantum.enumerate", {"N": args.n, "X": args.x, "statistics": list(args.statistics)}
    if task == "bookkeeping":
        n_right = args.n if args.n_right is None else args.n_right
        x_right = args.x if args.x_right is None else args.x_right
        return "quantum.bookkeeping", {"N_left": args.n, "N_right": n_right, "X_left": args.x,
                                       "X_right": x_right, "constant": args.constant}
    if task == "reduced-dm":
        return "quantum.reduced-dm", {"X": args.x, "phi": args.phi, "psi": args.psi,
                                      "symmetry": args.symmetry}
    if task == "orthogonality":
        seed = args.seed if args.seed is not None else _new_seed()
        return "quantum.orthogonality", {"X": args.x, "steps": args.steps, "seed": seed}
    raise UsageError(f"unknown task {task!r}")


def _write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}", file=sys.stderr)


def _replay(args):
    manifest = RunManifest.from_json(_read(args.manifest_file))
    report, ledger = run_command(manifest.subcommand, manifest.params)
    out_sum = _sha256(canonical_json(report))
    led_sum = _sha256(ledger) if ledger is not None else None
    if ledger is not None and args.ledger:
        _write(args.ledger, ledger)
    record = {"subcommand": manifest.subcommand, "manifest_version": manifest.version,
              "output_checksum_expected": manifest.output_checksum,
              "output_checksum_actual": out_sum,
              "ledger_checksum_expected": manifest.ledger_checksum,
              "ledger_checksum_actual": led_sum,
              "output_match": out_sum == manifest.output_checksum,
              "ledger_match": led_sum == manifest.ledger_checksum}
    if not (record["output_match"] and record["ledger_match"]):
        raise ReplayMismatch(f"replay of {args.manifest_file} does not reproduce its checksums")
    return {"command": "replay", "version": __version__, "units": UNITS,
            "params": {"manifest": asdict(manifest)}, "records": [record]}


def main(argv=None):
    """Entry point; returns the exit status."""
    argv = sys.argv[1:] if argv is None else argv
    fmt, command = "json", "gibbslab"
    if "--format" in argv:
        i = argv.index("--format")
        if i + 1 < len(argv) and argv[i + 1] in ("json", "csv"):
            fmt = argv[i + 1]
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        command = args.subcommand if args.subcommand != "quantum" else f"quantum.{args.task}"
        if args.subcommand == "replay":
            report = _replay(args)
        else:
            command, params = resolve(args)
            report, ledger = run_command(command, params)
            manifest_path = args.manifest
            outdir = output_dir(args.output_dir)
            stem = f"{command.replace('.', '-')}-{params.get('seed')}"
            if manifest_path is None and command in STOCHASTIC:
                manifest_path = outdir / f"{stem}.manifest.json"
            if ledger is not None:
                _write(args.ledger or outdir / f"{stem}.ledger.jsonl", ledger)
            if manifest_path is not None:
                manifest = RunManifest(command, params, params.get("seed"), __version__,
                                       _sha256(canonical_json(report)),
                                       _sha256(ledger) if ledger is not None else None)
                _write(manifest_path, manifest.to_json())
    except (ValueError, OSError) as exc:
        sys.stdout.write(format_report(error_report(command, exc), fmt))
        return 1
    sys.stdout.write(format_report(report, fmt))
    return 0


if __name__ == "__main__":
    sys.exit(main())
