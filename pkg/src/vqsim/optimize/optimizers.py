"""Optimizer loop shared by every training procedure.

`minimize` drives gd / adam (gradient-based), spsa (two-point stochastic
approximation) or cobyla_like (scipy's COBYLA trust-region method) and
records a TrainRun with the loss trace and the best parameters seen, so a
stochastic step can never regress the reported solution.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..rng import stream

GradFn = Callable[[np.ndarray], np.ndarray]
LossFn = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class OptimizerConfig:
    kind: str = "adam"
    learning_rate: float = 0.001
    max_iters: int = 200
    seed: int = 0
    # adam moments
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    # spsa gain schedules a_k = a/(k+1+A)^0.602, c_k = c/(k+1)^0.101
    spsa_a: float = 0.2
    spsa_c: float = 0.1
    spsa_stability: float = 10.0
    spsa_alpha: float = 0.602
    spsa_gamma: float = 0.101

    def __post_init__(self):
        if self.kind not in ("gd", "adam", "spsa", "cobyla_like"):
            raise ValueError(f"unknown optimizer kind {self.kind!r}")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.max_iters < 1:
            raise ValueError("iteration budget must be >= 1")


@dataclass
class TrainRun:
    loss_trace: list[tuple[int, float]]
    final_params: np.ndarray
    best_loss: float
    seed: int
    config: dict
    param_trace: list[np.ndarray] | None = None
    metric_traces: dict[str, list[float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "loss_trace": [[int(i), float(v)] for i, v in self.loss_trace],
            "final_params": [float(x) for x in self.final_params],
            "best_loss": float(self.best_loss),
            "seed": int(self.seed),
            "config": self.config,
            "metric_traces": {k: [float(x) for x in v] for k, v in self.metric_traces.items()},
        }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_json(text: str) -> "TrainRun":
        d = json.loads(text)
        return TrainRun(
            loss_trace=[(int(i), float(v)) for i, v in d["loss_trace"]],
            final_params=np.array(d["final_params"]),
            best_loss=float(d["best_loss"]),
            seed=int(d["seed"]),
            config=d["config"],
            metric_traces={k: list(map(float, v)) for k, v in d.get("metric_traces", {}).items()},
        )


def _checked(objective: LossFn) -> LossFn:
    def run(x: np.ndarray) -> float:
        val = float(objective(np.asarray(x, dtype=float)))
        if not np.isfinite(val):
            raise FloatingPointError(
                f"objective returned {val} at params {np.asarray(x).tolist()}"
            )
        return val

    return run


def minimize(
    objective: LossFn,
    x0: Sequence[float],
    config: OptimizerConfig,
    grad: GradFn | None = None,
    track_params: bool = False,
    metric: Callable[[np.ndarray], dict[str, float]] | None = None,
) -> TrainRun:
    """Minimize objective(params); returns the best-seen parameters.

    gd/adam require `grad`; spsa estimates descent directions from two
    perturbed evaluations; cobyla_like delegates to scipy.  Deterministic
    for a fixed config seed.
    """
    f = _checked(objective)
    x = np.asarray(x0, dtype=float).copy()
    trace: list[tuple[int, float]] = []
    params_trace: list[np.ndarray] = []
    metrics: dict[str, list[float]] = {}
    best_x, best_loss = x.copy(), f(x)
    trace.append((0, best_loss))

    def record(it: int, loss: float, params: np.ndarray) -> None:
        nonlocal best_x, best_loss
        trace.append((it, loss))
        if track_params:
            params_trace.append(params.copy())
        if metric is not None:
            for key, val in metric(params).items():
                metrics.setdefault(key, []).append(val)
        if loss < best_loss:
            best_loss, best_x = loss, params.copy()

    if config.kind in ("gd", "adam"):
        if grad is None:
            raise ValueError(f"{config.kind} needs a gradient callable")
        m = np.zeros_like(x)
        v = np.zeros_like(x)
        for it in range(1, config.max_iters + 1):
            g = np.asarray(grad(x), dtype=float)
            if config.kind == "gd":
                x = x - config.learning_rate * g
            else:
                m = config.beta1 * m + (1 - config.beta1) * g
                v = config.beta2 * v + (1 - config.beta2) * g**2
                mhat = m / (1 - config.beta1**it)
                vhat = v / (1 - config.beta2**it)
                x = x - config.learning_rate * mhat / (np.sqrt(vhat) + config.eps)
            record(it, f(x), x)
    elif config.kind == "spsa":
        rng = stream(config.seed, 0)
        for it in range(1, config.max_iters + 1):
            a_k = config.spsa_a / (it + config.spsa_stability) ** config.spsa_alpha
            c_k = config.spsa_c / it**config.spsa_gamma
            delta = rng.choice([-1.0, 1.0], size=x.shape)
            plus = f(x + c_k * delta)
            minus = f(x - c_k * delta)
            ghat = (plus - minus) / (2.0 * c_k) * delta
            x = x - a_k * ghat
            record(it, f(x), x)
    else:  # cobyla_like
        from scipy.optimize import minimize as scipy_minimize

        it_counter = {"n": 0}

        def wrapped(params: np.ndarray) -> float:
            val = f(params)
            it_counter["n"] += 1
            record(it_counter["n"], val, np.asarray(params, dtype=float))
            return val

        scipy_minimize(
            wrapped,
            x,
            method="COBYLA",
            options={"maxiter": config.max_iters, "rhobeg": 0.5, "tol": 1e-10},
        )

    return TrainRun(
        loss_trace=trace,
        final_params=best_x,
        best_loss=best_loss,
        seed=config.seed,
        config=config.__dict__.copy(),
        param_trace=params_trace if track_params else None,
        metric_traces=metrics,
    )
