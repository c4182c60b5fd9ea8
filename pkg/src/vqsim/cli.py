"""Batch experiment runner.

Each subcommand reads a JSON config, runs the corresponding library
routine, and persists result.json, one or more tidy CSV tables, and a log
with wall-clock and version facts (kept out of result.json so identical
dense-mode runs are byte-identical).

Exit codes: 0 ok, 1 runtime failure, 2 config violation.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, channels, gates, mps
from . import statevector as sv
from .analysis import (
    alternated_sequential_contrast,
    derived_metrics,
    entanglement_scan,
    expressibility,
    fourier_coefficients,
    generalization_bound,
    gradient_variance_experiment,
    deep_random_circuit,
    two_design_gradient_variance,
)
from .circuits import AnsatzSpec, BinaryPattern, Circuit, build_qnn
from .config import ConfigError, ExperimentConfig, RunRecord, content_hash, jsonable, load_config
from .dataio import ingest_csv, write_csv
from .optimize import (
    LossSpec,
    OptimizerConfig,
    kernel_ridge_fit,
    synthetic_phase_family,
    train_autoencoder,
    train_classifier,
    train_neuron,
    two_cluster_angles,
    concentric_rings,
    unsample_global,
    unsample_local,
)

PAULI_BY_AXIS = {"x": gates.X, "y": gates.Y, "z": gates.Z}


def _optimizer_from(block: dict | None, seed: int) -> OptimizerConfig:
    block = dict(block or {})
    block.setdefault("seed", seed)
    known = {
        "kind",
        "learning_rate",
        "max_iters",
        "seed",
        "beta1",
        "beta2",
        "eps",
        "spsa_a",
        "spsa_c",
        "spsa_stability",
        "spsa_alpha",
        "spsa_gamma",
    }
    unknown = set(block) - known
    if unknown:
        raise ConfigError(f"unknown optimizer fields {sorted(unknown)}")
    return OptimizerConfig(**block)


def _ansatz_from(block: dict, n: int) -> AnsatzSpec:
    try:
        return AnsatzSpec(block["kind"], block.get("topology", "linear"), n)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad ansatz block {block!r}: {exc}") from exc


def _observable_matrix(spec) -> np.ndarray:
    if isinstance(spec, str):
        if spec in PAULI_BY_AXIS:
            return PAULI_BY_AXIS[spec]
        raise ConfigError(f"observable must be x, y, z or a coefficient map, got {spec!r}")
    if isinstance(spec, dict):
        out = np.zeros((2, 2), dtype=complex)
        for key, coeff in spec.items():
            if key == "i":
                out += coeff * gates.I2
            elif key in PAULI_BY_AXIS:
                out += coeff * PAULI_BY_AXIS[key]
            else:
                raise ConfigError(f"unknown observable component {key!r}")
        return out
    raise ConfigError("observable must be an axis name or a coefficient map")


# --- command implementations -----------------------------------------------


def _run_entanglement_scan(cfg: ExperimentConfig, out_dir: str) -> dict:
    p = cfg.payload
    n = int(p["n"])
    feature = _ansatz_from(p["feature"], n)
    var = _ansatz_from(p["var"], n)
    mode = p.get("mode", "alternated")
    policy = mps.TruncationPolicy(cfg.chi_max, cfg.rel_cutoff)
    profile = entanglement_scan(
        feature,
        var,
        mode,
        n,
        int(p["l_max"]),
        int(p.get("samples", 100)),
        cfg.seed,
        policy=policy,
        backend=cfg.backend,
    )
    write_csv(os.path.join(out_dir, "profile.csv"), profile.to_rows())
    metrics = derived_metrics(profile).to_dict()
    if p.get("compare_sequential"):
        seq = entanglement_scan(
            feature, var, "sequential", n, int(p["l_max"]),
            int(p.get("samples", 100)), cfg.seed, policy=policy, backend=cfg.backend,
        )
        metrics["alternated_sequential_contrast"] = jsonable(
            alternated_sequential_contrast(profile, seq)
        )
    return {"metrics": metrics, "excluded": {"per_layer": profile.excluded}}


def _run_expressibility(cfg: ExperimentConfig, out_dir: str) -> dict:
    p = cfg.payload
    n = int(p["n"])
    feature = _ansatz_from(p["feature"], n)
    var = _ansatz_from(p["var"], n)
    layers = [int(x) for x in p.get("layers", [1, 2, 3])]
    rows = []
    for layer in layers:
        circ = build_qnn(feature, var, layer, p.get("mode", "alternated"))
        kl = expressibility(
            circ,
            samples=int(p.get("samples", 5000)),
            bins=int(p.get("bins", 75)),
            seed=cfg.seed,
        )
        rows.append({"L": layer, "kl_divergence": kl, "seed": cfg.seed})
    write_csv(os.path.join(out_dir, "expressibility.csv"), rows)
    return {"metrics": {"kl_by_layer": {str(r["L"]): r["kl_divergence"] for r in rows}}}


def _run_gradvar(cfg: ExperimentConfig, out_dir: str) -> dict:
    p = cfg.payload
    n = int(p["n"])
    layers = int(p.get("layers", 3 * n))
    circuit = deep_random_circuit(n, layers)
    cost = p.get("cost", "Z" + "I" * (n - 1))
    stats = gradient_variance_experiment(
        circuit, cost, int(p.get("samples", 1000)), cfg.seed
    )
    rows = [
        {
            "parameter": k,
            "mean": s.mean,
            "variance": s.variance,
            "stderr_mean": s.stderr_mean,
            "samples": s.samples,
            "seed": cfg.seed,
        }
        for k, s in stats.items()
    ]
    write_csv(os.path.join(out_dir, "gradvar.csv"), rows)
    return {
        "metrics": {
            "per_parameter": {str(k): jsonable(vars(s)) for k, s in stats.items()},
            "two_design_prediction": two_design_gradient_variance(n),
        }
    }


def _run_fourier(cfg: ExperimentConfig, out_dir: str) -> dict:
    p = cfg.payload
    circuit = Circuit.from_dict(p["circuit"])
    if circuit.n_features() != 1:
        raise ConfigError("fourier expects a circuit with a single scalar feature")
    pauli = p.get("observable", "Z" * circuit.n_qubits)
    obs = sv.Observable.single(pauli)
    compiled = sv.CompiledCircuit(circuit)
    params = np.asarray(p.get("params", [0.0] * circuit.n_trainable()), dtype=float)

    def model(x: float) -> float:
        return sv.expectation(compiled.state(features=[x], params=params), obs)

    report = fourier_coefficients(model, int(p["l_max"]))
    rows = [
        {
            "frequency": w,
            "real": report.coefficients[w].real,
            "imag": report.coefficients[w].imag,
            "magnitude": abs(report.coefficients[w]),
        }
        for w in report.frequencies
    ]
    write_csv(os.path.join(out_dir, "coefficients.csv"), rows)
    return {
        "metrics": {
            "residual": report.residual,
            "coefficient_norm": report.coefficient_norm(),
            "nonzero_frequencies": report.nonzero_frequencies(),
        }
    }


def _run_bound(cfg: ExperimentConfig, out_dir: str) -> dict:
    p = cfg.payload
    report = generalization_bound(
        int(p["spectrum_size"]),
        int(p["sample_size"]),
        float(p.get("lipschitz", 1.0)),
        float(p.get("obs_norm", 1.0)),
        float(p.get("loss_range", 1.0)),
        float(p.get("confidence", 0.05)),
    )
    return {"metrics": report.to_dict()}


def _run_deconvolve(cfg: ExperimentConfig, out_dir: str) -> dict:
    p = cfg.payload
    chan_block = dict(p["channel"])
    kind = chan_block.pop("kind")
    channel = channels.make_channel(kind, **chan_block)
    prep = Circuit.from_dict(p["prep"])
    obs = _observable_matrix(p.get("observable", "z"))
    reps = int(p.get("repetitions", 1))
    sweep = p.get("sweep")
    values = [float(v) for v in sweep["values"]] if sweep else [None]
    rows = []
    worst = 0.0
    for i, value in enumerate(values):
        bound_prep = prep if value is None else prep.bind(features=[value])
        record = channels.self_consistency_run(
            channel,
            bound_prep,
            obs,
            cfg.shots,
            rng=np.random.default_rng(cfg.seed + i),
            repetitions=reps,
        )
        noisy_obs = channels.observable_mean_from_paulis(obs, record.noisy)
        rows.append(
            {
                "sweep_value": 0.0 if value is None else value,
                "ideal": record.ideal,
                "noisy": noisy_obs,
                "mitigated": record.mitigated,
                "stderr": record.mitigated_stderr,
                "seed": cfg.seed + i,
            }
        )
        worst = max(worst, abs(record.mitigated - record.ideal))
    write_csv(os.path.join(out_dir, "deconvolution.csv"), rows)
    return {"metrics": {"max_abs_error": worst, "points": len(rows)}}


def _load_features(cfg: ExperimentConfig, p: dict) -> tuple[np.ndarray, np.ndarray | None]:
    if "dataset" not in p:
        raise ConfigError("missing 'dataset' path")
    ds = ingest_csv(p["dataset"], p.get("normalization", "none"))
    return ds.features, ds.labels


def _run_autoencoder(cfg: ExperimentConfig, out_dir: str) -> dict:
    p = cfg.payload
    if p.get("dataset") == "synthetic":
        data = synthetic_phase_family(int(p.get("samples", 512)), cfg.seed)
    else:
        feats, _ = _load_features(cfg, p)
        if feats.shape[1] != 4:
            raise ConfigError("the 2-qubit autoencoder takes 4-feature rows")
        data = [row for row in feats]
    split = max(1, int(0.8 * len(data)))
    run = train_autoencoder(
        data[:split],
        _optimizer_from(p.get("optimizer"), cfg.seed),
        batch_size=p.get("batch_size", 20),
        validation=data[split:] or None,
    )
    _write_trace(out_dir, run)
    return {"metrics": _train_metrics(run)}


def _run_neuron(cfg: ExperimentConfig, out_dir: str) -> dict:
    p = cfg.payload
    source = p.get("dataset", "two_clusters")
    if source == "two_clusters":
        data = two_cluster_angles(int(p.get("samples", 60)), cfg.seed)
    elif source == "rings":
        data = concentric_rings(int(p.get("samples", 60)), cfg.seed)
    else:
        feats, labels = _load_features(cfg, p)
        if labels is None:
            raise ConfigError("neuron training needs a label column")
        data = list(zip(feats, labels.astype(float)))
    loss = LossSpec("thresholded_mse", threshold=float(p.get("threshold", 0.95)))
    run = train_neuron(
        data,
        _optimizer_from(p.get("optimizer", {"kind": "spsa", "max_iters": 400}), cfg.seed),
        loss,
        bias=p.get("bias"),
    )
    _write_trace(out_dir, run)
    return {"metrics": _train_metrics(run)}


def _run_unsample(cfg: ExperimentConfig, out_dir: str) -> dict:
    p = cfg.payload
    n = int(p.get("n", 4))
    pattern = BinaryPattern.from_label(int(p["target_label"]), 2**n)
    target = sv.from_amplitudes(pattern.state_vector())
    opt = _optimizer_from(
        p.get("optimizer", {"kind": "cobyla_like", "max_iters": 2500}), cfg.seed
    )
    if p.get("mode", "global") == "global":
        run = unsample_global(target, int(p.get("cycles", 3)), opt, p.get("scheme", "a2a"))
        _write_trace(out_dir, run)
        return {"metrics": {"final_fidelity": run.metric_traces["final_fidelity"][0]}}
    result = unsample_local(target, str(p["structure"]), opt, p.get("scheme", "nn"))
    return {"metrics": {"final_fidelity": result.total_fidelity}}


def _run_train(cfg: ExperimentConfig, out_dir: str) -> dict:
    p = cfg.payload
    procedure = p.get("procedure")
    if procedure == "autoencoder":
        return _run_autoencoder(cfg, out_dir)
    if procedure == "neuron":
        return _run_neuron(cfg, out_dir)
    if procedure == "classifier":
        feats, labels = _load_features(cfg, p)
        if labels is None:
            raise ConfigError("classifier training needs a label column")
        states = [_bloch_state(row) for row in feats]
        run = train_classifier(states, labels, _optimizer_from(p.get("optimizer"), cfg.seed))
        _write_trace(out_dir, run)
        return {"metrics": _train_metrics(run)}
    if procedure == "kernel_ridge":
        feats, _ = _load_features(cfg, p)
        targets = np.asarray(p["targets"], dtype=float)
        circuit = Circuit.from_dict(p["feature_circuit"]) if "feature_circuit" in p else None
        model = kernel_ridge_fit(
            [row for row in feats], targets, circuit, float(p.get("regularization", 1e-3))
        )
        preds = [model.predict(row) for row in feats]
        rmse = float(np.sqrt(np.mean((np.array(preds) - targets) ** 2)))
        return {"metrics": {"train_rmse": rmse, "condition": model.condition}}
    raise ConfigError(f"unknown training procedure {procedure!r}")


def _bloch_state(row: np.ndarray) -> np.ndarray:
    theta, phi = float(row[0]), float(row[1]) if len(row) > 1 else 0.0
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def _train_metrics(run) -> dict:
    out = {"best_loss": run.best_loss, "final_params": jsonable(run.final_params)}
    for key, vals in run.metric_traces.items():
        out[key] = vals[-1] if len(vals) == 1 else jsonable(vals)
    return out


def _write_trace(out_dir: str, run) -> None:
    rows = [{"iteration": i, "loss": v} for i, v in run.loss_trace]
    write_csv(os.path.join(out_dir, "loss_trace.csv"), rows)
    with open(os.path.join(out_dir, "train_run.json"), "w") as fh:
        fh.write(run.to_json())


HANDLERS = {
    "entanglement-scan": _run_entanglement_scan,
    "expressibility": _run_expressibility,
    "gradvar": _run_gradvar,
    "fourier": _run_fourier,
    "bound": _run_bound,
    "deconvolve": _run_deconvolve,
    "autoencoder": _run_autoencoder,
    "neuron": _run_neuron,
    "unsample": _run_unsample,
    "train": _run_train,
}


def execute(cfg: ExperimentConfig) -> str:
    """Run one experiment; returns the output directory."""
    out_dir = os.environ.get("VQSIM_OUT", cfg.out_dir)
    os.makedirs(out_dir, exist_ok=True)
    started = time.time()
    result = HANDLERS[cfg.command](cfg, out_dir)
    elapsed = time.time() - started
    dataset = cfg.payload.get("dataset")
    paths = [dataset] if isinstance(dataset, str) and os.path.exists(str(dataset)) else []
    record = RunRecord(
        config=cfg.resolved(),
        input_hash=content_hash(cfg, paths),
        metrics=jsonable(result.get("metrics", {})),
        excluded_draws=jsonable(result.get("excluded", {})),
    )
    with open(os.path.join(out_dir, "result.json"), "w") as fh:
        fh.write(record.to_json())
    with open(os.path.join(out_dir, "run.log"), "a") as fh:
        fh.write(
            f"command={cfg.command} seed={cfg.seed} wall_clock={elapsed:.3f}s "
            f"version={__version__}\n"
        )
    return out_dir


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqsim", description="variational-circuit experiment runner"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    names = ["run"] + sorted(HANDLERS)
    for name in names:
        s = sub.add_parser(name)
        s.add_argument("config", nargs="?", help="path to the experiment JSON")
        s.add_argument("--config", dest="config_flag", help="path to the experiment JSON")
        s.add_argument("--seed", type=int)
        s.add_argument("--jobs", type=int)
        s.add_argument("--out")
        s.add_argument("--backend", choices=["dense", "mps"])
        s.add_argument("--chi-max", type=int)
        s.add_argument("--shots")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        path = args.config_flag or args.config
        if not path:
            raise ConfigError("no config file given")
        cfg = load_config(path)
        if args.subcommand != "run" and cfg.command != args.subcommand:
            raise ConfigError(
                f"config command {cfg.command!r} does not match subcommand {args.subcommand!r}"
            )
        if args.seed is not None:
            cfg.seed = args.seed
        if args.jobs is not None:
            cfg.jobs = args.jobs
        if args.out is not None:
            cfg.out_dir = args.out
        if args.backend is not None:
            cfg.backend = args.backend
        if args.chi_max is not None:
            cfg.chi_max = args.chi_max
        if args.shots is not None:
            cfg.shots = None if args.shots == "exact" else int(args.shots)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        out_dir = execute(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure, exit 1 with diagnostic
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(out_dir)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
