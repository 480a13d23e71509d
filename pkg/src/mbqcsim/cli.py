"""Command-line front end.

Subcommands reproduce the cluster-state experiments as machine-readable
reports: ``rotation``, ``two-qubit``, ``grover``, ``tomography``,
``timing``. Reports are JSON on stdout; ``--out`` additionally writes
the JSON file plus a ``label,x,y`` CSV with the bar-chart data behind
it. Identical arguments and seed give byte-identical output.

Exit codes: 0 success, 2 usage error, 3 numerical failure
(non-convergence), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .cluster import build_box_cluster, build_cluster_state
from .core import StateVector
from .engine import (
    FeedForwardPolicy,
    grover_reference_distribution,
    run_grover,
    run_single_qubit_rotation,
    run_two_qubit_gate,
)
from .metrics import chsh_max, fidelity, tangle, witness
from .noise import load_density, solve_p_for_fidelity, white_noise
from .timing import (
    LatencyBudget,
    PipelineSpec,
    load_timing_config,
    render_table,
    timing_report,
)
from .tomography import (
    MLEConfig,
    mle_reconstruct,
    mle_reconstruct_full,
    monte_carlo_errors,
    simulate_counts,
    single_qubit_tomography,
)

_POLICIES = (FeedForwardPolicy.ACTIVE, FeedForwardPolicy.OFF)
_FF_NAME = {FeedForwardPolicy.ACTIVE: "on", FeedForwardPolicy.OFF: "off"}


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dump(report: dict) -> str:
    return json.dumps(_jsonify(report), sort_keys=True, indent=2)


def _emit(report: dict, rows, out):
    text = _dump(report)
    print(text)
    if out:
        path = Path(out)
        path.write_text(text + "\n", encoding="utf-8")
        csv_path = path.with_suffix(".csv")
        lines = ["label,x,y"]
        lines += [f"{label},{x},{y}" for label, x, y in rows]
        csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cluster_for(args, experiment: str):
    """The input cluster in the frame the experiment consumes."""
    base = build_box_cluster() if experiment == "grover" else build_cluster_state()
    if args.rho:
        rho = load_density(args.rho)
        if rho.n_qubits != 4:
            raise ValueError(f"--rho file must hold 4 qubits, got {rho.n_qubits}")
        return rho, {"kind": "file", "path": str(args.rho)}
    if args.noise_fidelity is not None:
        p = solve_p_for_fidelity(args.noise_fidelity, 4)
        return white_noise(base, p), {
            "kind": "white_noise",
            "fidelity": args.noise_fidelity,
            "p": p,
        }
    return base, {"kind": "ideal"}


def _tomography_block(state, target: StateVector, mean_counts, mc_runs, seed, extra=None):
    """Simulated tomography of an output state plus Monte Carlo error bars."""
    rng = np.random.default_rng([seed, 7])
    records = simulate_counts(state, mean_counts, rng)
    if target.n_qubits == 1:
        recon = single_qubit_tomography(records)
    else:
        recon = mle_reconstruct(records)
    block = {
        "mean_counts": mean_counts,
        "settings": len(records),
        "fidelity": fidelity(recon, target),
    }
    quantities = {"fidelity": lambda rho: fidelity(rho, target)}
    if extra:
        quantities.update(extra)
    if mc_runs >= 2:
        mc = {}
        for offset, (name, fn) in enumerate(sorted(quantities.items())):
            mc_rng = np.random.default_rng([seed, 11, offset])
            mean, std = monte_carlo_errors(records, fn, n_runs=mc_runs, rng=mc_rng)
            mc[name] = {"mean": mean, "std": std}
        block["monte_carlo"] = {"runs": mc_runs, **mc}
    return block


def cmd_rotation(args) -> tuple[dict, list]:
    cluster, noise_info = _cluster_for(args, "rotation")
    results = {
        pol: run_single_qubit_rotation(
            args.alpha, args.beta, pol, shots=args.shots, seed=args.seed, cluster=cluster
        )
        for pol in _POLICIES
    }
    selected = results[_ff_policy(args.ff)]
    report = {
        "experiment": "rotation",
        "alpha": args.alpha,
        "beta": args.beta,
        "feedforward": args.ff,
        "noise": noise_info,
        "results": {
            _FF_NAME[pol]: res.to_json_dict() for pol, res in results.items()
        },
        "average_fidelity": selected.average_fidelity,
        "output_tomography": _tomography_block(
            selected.average_density_matrix,
            selected.reference,
            args.mean_counts,
            args.mc_runs,
            args.seed,
        ),
    }
    rows = []
    x = 0
    for pol, res in results.items():
        for branch in sorted(res.branch_fidelities):
            rows.append((f"{_FF_NAME[pol]}:{branch}", x, res.branch_fidelities[branch]))
            x += 1
        rows.append((f"{_FF_NAME[pol]}:average", x, res.average_fidelity))
        x += 1
    return report, rows


def cmd_two_qubit(args) -> tuple[dict, list]:
    cluster, noise_info = _cluster_for(args, "two_qubit")
    results = {
        pol: run_two_qubit_gate(
            args.alpha, args.beta, pol, shots=args.shots, seed=args.seed, cluster=cluster
        )
        for pol in _POLICIES
    }
    selected = results[_ff_policy(args.ff)]
    metrics = {}
    for pol, res in results.items():
        avg = res.average_density_matrix
        f = fidelity(avg, res.reference)
        metrics[_FF_NAME[pol]] = {
            "fidelity": f,
            "witness_pass": witness(f),
            "tangle": tangle(avg),
            "chsh_s": chsh_max(avg),
        }
    report = {
        "experiment": "two_qubit",
        "alpha": args.alpha,
        "beta": args.beta,
        "feedforward": args.ff,
        "noise": noise_info,
        "results": {
            _FF_NAME[pol]: res.to_json_dict() for pol, res in results.items()
        },
        "metrics": metrics,
        "average_fidelity": selected.average_fidelity,
        "output_tomography": _tomography_block(
            selected.average_density_matrix,
            selected.reference,
            args.mean_counts,
            args.mc_runs,
            args.seed,
            extra={"tangle": tangle, "chsh_s": chsh_max},
        ),
    }
    rows = []
    x = 0
    for pol, res in results.items():
        for branch in sorted(res.branch_fidelities):
            rows.append((f"{_FF_NAME[pol]}:{branch}", x, res.branch_fidelities[branch]))
            x += 1
        rows.append((f"{_FF_NAME[pol]}:average", x, res.average_fidelity))
        x += 1
    return report, rows


def cmd_grover(args) -> tuple[dict, list]:
    cluster, noise_info = _cluster_for(args, "grover")
    results = {
        pol: run_grover(args.tag, pol, shots=args.shots, seed=args.seed, cluster=cluster)
        for pol in _POLICIES
    }
    selected = results[_ff_policy(args.ff)]
    report = {
        "experiment": "grover",
        "tag": args.tag,
        "feedforward": args.ff,
        "noise": noise_info,
        "reference_distribution": grover_reference_distribution(args.tag),
        "results": {
            _FF_NAME[pol]: res.to_json_dict() for pol, res in results.items()
        },
        "probabilities": selected.probabilities,
    }
    rows = []
    x = 0
    for pol, res in results.items():
        for element in sorted(res.probabilities):
            rows.append((f"{_FF_NAME[pol]}:{element}", x, res.probabilities[element]))
            x += 1
    return report, rows


class _NotConverged(Exception):
    pass


def cmd_tomography(args) -> tuple[dict, list]:
    cluster, noise_info = _cluster_for(args, "tomography")
    target = build_cluster_state()
    rng = np.random.default_rng([args.seed, 3])
    records = simulate_counts(cluster, args.mean_counts, rng)
    result = mle_reconstruct_full(records, MLEConfig())
    f = fidelity(result.rho, target)
    report = {
        "experiment": "tomography",
        "noise": noise_info,
        "mean_counts": args.mean_counts,
        "settings": len(records),
        "projectors": len(records) * records[0].counts.shape[0],
        "mle": {
            "iterations": result.iterations,
            "converged": result.converged,
            "log_likelihood": result.log_likelihood,
            "gradient_norm": result.gradient_norm,
        },
        "fidelity_vs_cluster": f,
        "witness_pass": witness(f),
    }
    if args.mc_runs >= 2:
        mc_rng = np.random.default_rng([args.seed, 11])
        mean, std = monte_carlo_errors(
            records, lambda rho: fidelity(rho, target), n_runs=args.mc_runs, rng=mc_rng
        )
        report["monte_carlo"] = {"runs": args.mc_runs, "fidelity_mean": mean, "fidelity_std": std}
    diag = np.real(np.diag(result.rho.matrix))
    rows = [
        (format(k, "04b"), k, float(diag[k])) for k in range(diag.shape[0])
    ]
    if not result.converged:
        raise _NotConverged(report)
    return report, rows


def cmd_timing(args) -> tuple[dict, list]:
    if args.config:
        spec, budget = load_timing_config(args.config)
    else:
        spec, budget = PipelineSpec(), LatencyBudget()
    report = timing_report(spec, budget)
    print(render_table(report), file=sys.stderr)
    rows = [
        (name, i, value)
        for i, (name, value) in enumerate(report["components_ns"].items())
    ]
    return report, rows


def _ff_policy(name: str) -> FeedForwardPolicy:
    return FeedForwardPolicy.ACTIVE if name == "on" else FeedForwardPolicy.OFF


def _add_noise_flags(p: argparse.ArgumentParser):
    group = p.add_mutually_exclusive_group()
    group.add_argument(
        "--noise-fidelity",
        type=float,
        default=None,
        help="degrade the ideal cluster with white noise to this fidelity",
    )
    group.add_argument(
        "--rho", default=None, help="JSON density-matrix file to use as the cluster"
    )


def _add_common(p: argparse.ArgumentParser, tomography_opts: bool = True):
    p.add_argument("--ff", choices=("on", "off"), required=True,
                   help="feed-forward policy for the headline numbers")
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True,
                   help="RNG seed; required so runs are reproducible")
    p.add_argument("--out", default=None, help="write the JSON report here (plus a .csv)")
    _add_noise_flags(p)
    if tomography_opts:
        p.add_argument("--mean-counts", type=float, default=500.0,
                       help="expected counts per tomography setting")
        p.add_argument("--mc-runs", type=int, default=100,
                       help="Monte Carlo repetitions for error bars (< 2 disables)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbqcsim",
        description="One-way quantum computing on four-qubit cluster states "
        "with active feed-forward.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_rot = sub.add_parser("rotation", help="single-qubit rotation R_x(beta) R_z(alpha)")
    p_rot.add_argument("--alpha", type=float, required=True)
    p_rot.add_argument("--beta", type=float, required=True)
    _add_common(p_rot)
    p_rot.set_defaults(func=cmd_rotation)

    p_two = sub.add_parser("two-qubit", help="entangling gate on the horseshoe ordering")
    p_two.add_argument("--alpha", type=float, required=True)
    p_two.add_argument("--beta", type=float, required=True)
    _add_common(p_two)
    p_two.set_defaults(func=cmd_two_qubit)

    p_gro = sub.add_parser("grover", help="four-entry Grover search on the box cluster")
    p_gro.add_argument("--tag", choices=("00", "01", "10", "11"), required=True)
    _add_common(p_gro, tomography_opts=False)
    p_gro.set_defaults(func=cmd_grover)

    p_tom = sub.add_parser("tomography", help="tomograph a four-qubit cluster state")
    p_tom.add_argument("--seed", type=int, required=True)
    p_tom.add_argument("--out", default=None)
    p_tom.add_argument("--mean-counts", type=float, default=500.0)
    p_tom.add_argument("--mc-runs", type=int, default=100)
    _add_noise_flags(p_tom)
    p_tom.set_defaults(func=cmd_tomography)

    p_tim = sub.add_parser("timing", help="feed-forward latency budget report")
    p_tim.add_argument("--config", default=None,
                       help='JSON file with optional "pipeline" and "budget" sections')
    p_tim.add_argument("--out", default=None)
    p_tim.set_defaults(func=cmd_timing)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, rows = args.func(args)
        _emit(report, rows, args.out)
        return 0
    except _NotConverged as exc:
        _emit(exc.args[0], [], args.out)
        print("error: likelihood ascent did not converge", file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
