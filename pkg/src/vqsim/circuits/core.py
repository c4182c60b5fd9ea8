"""Circuit intermediate representation.

A circuit is an ordered list of ops.  Parametric ops carry a slot that is
either a constant, a reference to a feature (input) index, a reference to a
trainable index, or a product of two features (used by ZZ-interaction
feature maps).  Slots carry a real `scale` multiplier so adjoint circuits
can negate angles without losing the symbolic reference.

Circuits are immutable after construction; `bind` returns a new circuit.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .. import gates

__all__ = ["Slot", "const", "feature", "trainable", "feature_product", "Op", "Circuit"]


@dataclass(frozen=True)
class Slot:
    kind: str  # const | feature | train | feature_product
    value: float | int | tuple[int, int]
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("const", "feature", "train", "feature_product"):
            raise ValueError(f"bad slot kind {self.kind!r}")

    def is_bound(self) -> bool:
        return self.kind == "const"

    def constant_value(self) -> float:
        if self.kind != "const":
            raise ValueError(f"unbound {self.kind} slot; bind the circuit first")
        return float(self.value) * self.scale

    def bound(self, features: Sequence[float] | None, params: Sequence[float] | None) -> "Slot":
        if self.kind == "const":
            return self
        if self.kind == "feature":
            if features is None:
                return self
            return Slot("const", self.scale * float(features[self.value]))
        if self.kind == "train":
            if params is None:
                return self
            return Slot("const", self.scale * float(params[self.value]))
        if features is None:
            return self
        i, j = self.value
        return Slot("const", self.scale * float(features[i]) * float(features[j]))

    def negated(self) -> "Slot":
        if self.kind == "const":
            return Slot("const", -float(self.value) * self.scale)
        return Slot(self.kind, self.value, -self.scale)

    def to_json(self):
        if self.kind == "const":
            return {"const": float(self.value) * self.scale}
        key = {"feature": "feature", "train": "train", "feature_product": "feature_product"}[self.kind]
        out = {key: list(self.value) if self.kind == "feature_product" else self.value}
        if self.scale != 1.0:
            out["scale"] = self.scale
        return out

    @staticmethod
    def from_json(data: dict) -> "Slot":
        scale = float(data.get("scale", 1.0))
        if "const" in data:
            return Slot("const", float(data["const"]))
        if "feature" in data:
            return Slot("feature", int(data["feature"]), scale)
        if "train" in data:
            return Slot("train", int(data["train"]), scale)
        if "feature_product" in data:
            i, j = data["feature_product"]
            return Slot("feature_product", (int(i), int(j)), scale)
        raise ValueError(f"unrecognized slot {data!r}")


def const(value: float) -> Slot:
    return Slot("const", float(value))


def feature(index: int, scale: float = 1.0) -> Slot:
    return Slot("feature", int(index), scale)


def trainable(index: int, scale: float = 1.0) -> Slot:
    return Slot("train", int(index), scale)


def feature_product(i: int, j: int, scale: float = 1.0) -> Slot:
    return Slot("feature_product", (int(i), int(j)), scale)


@dataclass(frozen=True)
class Op:
    gate: str
    targets: tuple[int, ...]
    slot: Slot | None = None

    def __post_init__(self):
        arity = gates.gate_arity(self.gate)
        if arity is not None and len(self.targets) != arity:
            raise ValueError(f"{self.gate} takes {arity} targets, got {len(self.targets)}")
        if self.gate in ("cp", "mcz") and len(self.targets) < 1:
            raise ValueError(f"{self.gate} needs at least one target")
        if self.gate == "mcx" and len(self.targets) < 2:
            raise ValueError("mcx needs at least one control and a target")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"repeated target in {self.targets}")
        if gates.is_parametric(self.gate) != (self.slot is not None):
            raise ValueError(f"gate {self.gate} and slot presence disagree")


_SELF_INVERSE = {"h", "x", "cnot", "cz", "mcz", "mcx"}


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    ops: tuple[Op, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for op in self.ops:
            for t in op.targets:
                if not 0 <= t < self.n_qubits:
                    raise ValueError(f"target {t} out of range in {op.gate}")

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot concatenate circuits of different widths")
        return Circuit(self.n_qubits, self.ops + other.ops)

    def with_ops(self, ops: Iterable[Op]) -> "Circuit":
        return Circuit(self.n_qubits, self.ops + tuple(ops))

    # --- slot bookkeeping ---

    def n_trainable(self) -> int:
        idx = [op.slot.value for op in self.ops if op.slot is not None and op.slot.kind == "train"]
        return max(idx) + 1 if idx else 0

    def n_features(self) -> int:
        top = -1
        for op in self.ops:
            if op.slot is None:
                continue
            if op.slot.kind == "feature":
                top = max(top, op.slot.value)
            elif op.slot.kind == "feature_product":
                top = max(top, *op.slot.value)
        return top + 1

    def is_bound(self) -> bool:
        return all(op.slot is None or op.slot.is_bound() for op in self.ops)

    def trainable_occurrences(self, index: int) -> list[int]:
        """Positions of ops whose slot references trainable `index`."""
        return [
            i
            for i, op in enumerate(self.ops)
            if op.slot is not None and op.slot.kind == "train" and op.slot.value == index
        ]

    def bind(
        self,
        features: Sequence[float] | None = None,
        params: Sequence[float] | None = None,
    ) -> "Circuit":
        """Substitute feature/trainable references; full assignment leaves only constants."""
        if features is not None and len(features) < self.n_features():
            raise ValueError(f"need {self.n_features()} features, got {len(features)}")
        if params is not None and len(params) < self.n_trainable():
            raise ValueError(f"need {self.n_trainable()} parameters, got {len(params)}")
        new_ops = []
        for op in self.ops:
            if op.slot is None:
                new_ops.append(op)
            else:
                new_ops.append(Op(op.gate, op.targets, op.slot.bound(features, params)))
        return Circuit(self.n_qubits, tuple(new_ops))

    def adjoint(self) -> "Circuit":
        """Inverse circuit: reversed op order, negated rotation angles."""
        new_ops = []
        for op in reversed(self.ops):
            if op.gate in _SELF_INVERSE:
                new_ops.append(op)
            elif op.slot is not None:
                new_ops.append(Op(op.gate, op.targets, op.slot.negated()))
            else:
                raise ValueError(f"no adjoint rule for gate {op.gate}")
        return Circuit(self.n_qubits, tuple(new_ops))

    def shifted(self, op_index: int, offset: float) -> "Circuit":
        """Copy with `offset` added to the (bound) angle of op `op_index`."""
        op = self.ops[op_index]
        if op.slot is None:
            raise ValueError("op has no angle to shift")
        shifted = Op(op.gate, op.targets, const(op.slot.constant_value() + offset))
        ops = self.ops[:op_index] + (shifted,) + self.ops[op_index + 1 :]
        return Circuit(self.n_qubits, ops)

    # --- serialization (round-trips bit-exactly for finite doubles) ---

    def to_dict(self) -> dict:
        ops = []
        for op in self.ops:
            entry = {"gate": op.gate, "targets": list(op.targets)}
            if op.slot is not None:
                entry["slot"] = op.slot.to_json()
            ops.append(entry)
        return {"n_qubits": self.n_qubits, "ops": ops}

    @staticmethod
    def from_dict(data: dict) -> "Circuit":
        ops = []
        for entry in data["ops"]:
            slot = Slot.from_json(entry["slot"]) if "slot" in entry else None
            ops.append(Op(entry["gate"], tuple(entry["targets"]), slot))
        return Circuit(int(data["n_qubits"]), tuple(ops))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_json(text: str) -> "Circuit":
        return Circuit.from_dict(json.loads(text))

    def unitary(self) -> np.ndarray:
        """Full matrix of a bound circuit (small n only)."""
        if self.n_qubits > 12:
            raise ValueError("unitary construction capped at 12 qubits")
        from .. import statevector as sv

        dim = 2**self.n_qubits
        cols = []
        for k in range(dim):
            amps = np.zeros(dim, dtype=complex)
            amps[k] = 1.0
            out = sv.apply_circuit(sv.StateVector(self.n_qubits, amps), self)
            cols.append(out.amplitudes)
        return np.array(cols).T
