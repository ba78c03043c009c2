"""Chambers of quantum ideal gases, membranes, and the isothermal ledger.

Conventions.  The gas constant is R = 1 and the default run uses one mole
total at temperature 1, so every ledger entry is directly the dimensionless
coefficient of nRT.  All processes are isothermal, hence for every event the
heat absorbed by the gas equals the work it performs:

    W = n R T ln(Vf / Vi) = Q.

Ground truth is kept as the literal list of (state, moles) components per
chamber; aggregate and eigen-mixture descriptions are derived on demand.
That bookkeeping is what lets a later, finer observer remember that a
chamber a coarse observer calls "pure" is in fact a mixture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg
from .errors import (
    DimensionError,
    DomainError,
    EmptyChamberError,
    IndistinguishableError,
    UnitaryError,
    UnknownChamberError,
    UnknownCheckpointError,
)
from .quantum import Povm, StatisticalMatrix

R = 1.0

#: outcome mole fractions below this are pruned (avoids ln 0 chambers)
PRUNE = 1e-12

#: entrywise tolerance for merging identical component states
MERGE_TOL = 1e-12

EVENT_KINDS = ("mix", "separate", "rotate", "partition", "join", "checkpoint")


@dataclass(frozen=True, eq=False)
class GasComponent:
    """A quantity of one gas: its internal state and its mole count."""

    state: StatisticalMatrix
    moles: float

    def __post_init__(self):
        if not self.moles > 0:
            raise DomainError(f"moles must be positive, got {self.moles}")


@dataclass(frozen=True, eq=False)
class Chamber:
    """A volume at the lab temperature holding a multiset of gas components."""

    name: str
    volume: float
    contents: tuple[GasComponent, ...] = ()

    def __post_init__(self):
        if not self.volume > 0:
            raise DomainError(f"volume must be positive, got {self.volume}")
        dims = {c.state.dim for c in self.contents}
        if len(dims) > 1:
            raise DimensionError(f"components of {self.name!r} mix dimensions {dims}")
        object.__setattr__(self, "contents", tuple(self.contents))

    @property
    def moles(self) -> float:
        return sum(c.moles for c in self.contents)


@dataclass(frozen=True, eq=False)
class LabState:
    """Everything in the lab: temperature, named chambers, and the Hilbert
    dimension of the ground-truth description."""

    temperature: float
    chambers: dict[str, Chamber]
    lab_dim: int

    def __post_init__(self):
        if not self.temperature > 0:
            raise DomainError(f"temperature must be positive, got {self.temperature}")

    def chamber(self, name: str) -> Chamber:
        try:
            return self.chambers[name]
        except KeyError:
            raise UnknownChamberError(f"no chamber named {name!r}") from None

    def total_moles(self) -> float:
        return sum(ch.moles for ch in self.chambers.values())


@dataclass(frozen=True)
class LedgerEvent:
    """One protocol step with its work/heat bookkeeping (Q == W always,
    isothermal ideal gas)."""

    step_index: int
    kind: str
    heat_absorbed_by_gas: float
    work_done_by_gas: float
    description: str

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise DomainError(f"unknown event kind {self.kind!r}")
        if self.heat_absorbed_by_gas != self.work_done_by_gas:
            raise DomainError("isothermal events must satisfy Q == W")

    @classmethod
    def isothermal(cls, step_index: int, kind: str, q: float,
                   description: str) -> "LedgerEvent":
        return cls(step_index, kind, q, q, description)

    def to_record(self) -> str:
        return (
            f"event step={self.step_index} kind={self.kind}"
            f" q={self.heat_absorbed_by_gas:.12g} w={self.work_done_by_gas:.12g}"
            f' desc="{_escape(self.description)}"'
        )


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


@dataclass(frozen=True)
class Checkpoint:
    step_index: int
    state: LabState


@dataclass
class Ledger:
    """Ordered event log plus labelled lab-state snapshots.

    Lab states are immutable values, so a "deep snapshot" is just a
    reference to the state at checkpoint time.
    """

    events: list[LedgerEvent] = field(default_factory=list)
    checkpoints: dict[str, Checkpoint] = field(default_factory=dict)

    def append(self, event: LedgerEvent) -> None:
        if self.events and event.step_index <= self.events[-1].step_index:
            raise DomainError(
                f"step index {event.step_index} does not increase past"
                f" {self.events[-1].step_index}"
            )
        self.events.append(event)

    def checkpoint(self, label: str, state: LabState, step_index: int) -> LedgerEvent:
        event = LedgerEvent.isothermal(
            step_index, "checkpoint", 0.0, f"checkpoint {label}"
        )
        self.append(event)
        self.checkpoints[label] = Checkpoint(step_index, state)
        return event

    def resolve(self, label: str) -> Checkpoint:
        try:
            return self.checkpoints[label]
        except KeyError:
            raise UnknownCheckpointError(f"no checkpoint named {label!r}") from None

    def events_since(self, label: str) -> list[LedgerEvent]:
        start = self.resolve(label).step_index
        return [e for e in self.events if e.step_index > start]

    def q_total_since(self, label: str) -> float:
        return sum(e.heat_absorbed_by_gas for e in self.events_since(label))

    def to_records(self) -> list[str]:
        return [e.to_record() for e in self.events]

    def to_table(self) -> list[str]:
        """Human-readable event table, one line per event."""
        lines = [f"  {'step':>4}  {'kind':<10}  {'Q':>16}  {'W':>16}  description"]
        for e in self.events:
            lines.append(
                f"  {e.step_index:>4}  {e.kind:<10}"
                f"  {e.heat_absorbed_by_gas:>16.12g}"
                f"  {e.work_done_by_gas:>16.12g}  {e.description}"
            )
        return lines


def isothermal_work(n: float, t: float, v_initial: float, v_final: float) -> float:
    """Work done by n moles of ideal gas in an isothermal volume change,
    n R T ln(v_final / v_initial), with R = 1."""
    for name, value in (("n", n), ("t", t), ("v_initial", v_initial),
                        ("v_final", v_final)):
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")
    return n * R * t * math.log(v_final / v_initial)


def aggregate_state(chamber: Chamber) -> StatisticalMatrix:
    """Mole-weighted mean state of everything in the chamber."""
    if not chamber.contents:
        raise EmptyChamberError(f"chamber {chamber.name!r} holds no gas")
    n = chamber.moles
    m = sum((c.moles / n) * c.state.matrix for c in chamber.contents)
    return StatisticalMatrix(m)


def canonical_contents(chamber: Chamber) -> list[tuple[float, StatisticalMatrix]]:
    """The chamber's contents as the eigen-mixture of its aggregate state:
    (weight, eigenprojector) pairs with zero-weight terms dropped."""
    aggregate = aggregate_state(chamber)
    w, v = linalg.hermitian_eig(aggregate.matrix)
    out = []
    for i in range(len(w)):
        if w[i] > PRUNE:
            out.append((float(w[i]), StatisticalMatrix.pure(v[:, i])))
    return out


def _merge(components) -> tuple[GasComponent, ...]:
    """Canonically merge components whose states coincide entrywise."""
    merged: list[list] = []
    for comp in components:
        for slot in merged:
            if slot[0].close_to(comp.state, MERGE_TOL):
                slot[1] += comp.moles
                break
        else:
            merged.append([comp.state, comp.moles])
    return tuple(GasComponent(state, moles) for state, moles in merged)


def _replace_chambers(lab: LabState, removed, added) -> LabState:
    """New lab state with ``removed`` chamber names replaced by the ``added``
    chambers, inserted where the first removed chamber sat."""
    removed = list(removed)
    out: dict[str, Chamber] = {}
    inserted = False
    for name, ch in lab.chambers.items():
        if name in removed:
            if not inserted:
                for new in added:
                    if new.name in out:
                        raise DomainError(f"chamber {new.name!r} already exists")
                    out[new.name] = new
                inserted = True
            continue
        if any(new.name == name for new in added):
            raise DomainError(f"chamber {name!r} already exists")
        out[name] = ch
    if not inserted:
        for new in added:
            out[new.name] = new
    return replace(lab, chambers=out)


def _check_povm_dim(lab: LabState, povm: Povm) -> None:
    if povm.dim != lab.lab_dim:
        raise DimensionError(
            f"povm dim {povm.dim} does not match lab dim {lab.lab_dim}"
        )


def separate(lab: LabState, chamber: str, povm: Povm, names=None,
             step_index: int = 0) -> tuple[LabState, LedgerEvent]:
    """Drive the membranes of ``povm`` through a chamber.

    Every component (rho, n) of the chamber feeds each outcome i a
    sub-component (post_state_i, n * p_i).  Outcome i ends up in its own
    chamber of volume f_i * V, where f_i is its mole-weighted share, so all
    final pressures are equal; outcomes with negligible share are dropped.
    The gas does work W = Q = sum_i n_i T ln f_i <= 0 (heat is released).
    """
    ch = lab.chamber(chamber)
    _check_povm_dim(lab, povm)
    if not ch.contents:
        raise EmptyChamberError(f"chamber {chamber!r} holds no gas")
    if names is None:
        names = [f"{chamber}.{label}" for label in povm.outcome_labels]
    if len(names) != len(povm.effects):
        raise DomainError(
            f"need {len(povm.effects)} outcome names, got {len(names)}"
        )

    n_total = ch.moles
    t = lab.temperature
    new_chambers = []
    q = 0.0
    parts = []
    for i, (effect, label) in enumerate(zip(povm.effects, povm.outcome_labels)):
        collected = []
        for comp in ch.contents:
            raw = linalg.conjugate(effect, comp.state.matrix)
            p = float(np.real(np.trace(raw)))
            moles = comp.moles * p
            if moles > PRUNE:
                collected.append(
                    GasComponent(StatisticalMatrix(raw / p, label=label), moles)
                )
        fraction = sum(c.moles for c in collected) / n_total
        if fraction <= PRUNE:
            continue
        moles_i = fraction * n_total
        q += moles_i * R * t * math.log(fraction)
        new_chambers.append(
            Chamber(names[i], fraction * ch.volume, _merge(collected))
        )
        parts.append(f"{names[i]}({fraction:.6g}V)")

    new_lab = _replace_chambers(lab, [chamber], new_chambers)
    desc = f"separate {chamber} by {{{', '.join(povm.outcome_labels)}}}" \
           f" into {', '.join(parts)}"
    return new_lab, LedgerEvent.isothermal(step_index, "separate", q, desc)


def mix(lab: LabState, a: str, b: str, povm: Povm, name=None,
        step_index: int = 0, tol: float = 1e-9) -> tuple[LabState, LedgerEvent]:
    """Reversibly merge two chambers using membranes that tell them apart.

    Each effect must pass one chamber's aggregate with probability one and
    block the other's with probability zero (within tol); otherwise the
    membranes cannot reversibly merge the gases and IndistinguishableError
    is raised.  The merged chamber occupies V_a + V_b and the gas absorbs
    Q = sum_c n_c T ln((V_a + V_b) / V_c) > 0.
    """
    cha, chb = lab.chamber(a), lab.chamber(b)
    _check_povm_dim(lab, povm)
    agg_a, agg_b = aggregate_state(cha), aggregate_state(chb)
    for effect, label in zip(povm.effects, povm.outcome_labels):
        pa = float(np.real(np.trace(linalg.conjugate(effect, agg_a.matrix))))
        pb = float(np.real(np.trace(linalg.conjugate(effect, agg_b.matrix))))
        passes_a = pa >= 1.0 - tol and pb <= tol
        passes_b = pb >= 1.0 - tol and pa <= tol
        if not (passes_a or passes_b):
            raise IndistinguishableError(
                f"effect {label!r} passes {a!r} with p={pa:.6g} and {b!r} with"
                f" p={pb:.6g}; it distinguishes neither chamber with certainty"
            )

    volume = cha.volume + chb.volume
    t = lab.temperature
    q = (cha.moles * R * t * math.log(volume / cha.volume)
         + chb.moles * R * t * math.log(volume / chb.volume))
    name = name or f"{a}+{b}"
    merged = Chamber(name, volume, _merge(cha.contents + chb.contents))
    new_lab = _replace_chambers(lab, [a, b], [merged])
    desc = f"mix {a} + {b} into {name} by {{{', '.join(povm.outcome_labels)}}}"
    return new_lab, LedgerEvent.isothermal(step_index, "mix", q, desc)


def _gram_schmidt_completion(vectors: list[np.ndarray], dim: int) -> list[np.ndarray]:
    """Extend an orthonormal list to a full basis, preferring canonical
    axes in index order (deterministic)."""
    basis = list(vectors)
    for i in range(dim):
        cand = np.zeros(dim, dtype=complex)
        cand[i] = 1.0
        for v in basis:
            cand = cand - np.vdot(v, cand) * v
        norm = float(np.linalg.norm(cand))
        if norm > 1e-8:
            basis.append(cand / norm)
        if len(basis) == dim:
            break
    return basis[len(vectors):]


def rotation_unitary(mapping, dim: int) -> np.ndarray:
    """Unitary sending each source ket to its image ket.

    Sources must be orthonormal, images must be orthonormal; the action on
    the orthogonal complement is completed deterministically.
    """
    sources = [linalg.as_ket(s) for s, _ in mapping]
    images = [linalg.as_ket(i) for _, i in mapping]
    if len(sources) != len(images) or not sources:
        raise UnitaryError("mapping needs matching source and image kets")
    if any(s.size != dim for s in sources) or any(i.size != dim for i in images):
        raise DimensionError("mapping kets must live in the lab space")
    for group, what in ((sources, "source"), (images, "image")):
        gram = np.array([[np.vdot(u, v) for v in group] for u in group])
        if float(np.max(np.abs(gram - np.eye(len(group))))) > 1e-10:
            raise UnitaryError(f"{what} kets are not orthonormal")
    sources = sources + _gram_schmidt_completion(sources, dim)
    images = images + _gram_schmidt_completion(images, dim)
    u = sum(np.outer(i, s.conj()) for s, i in zip(sources, images))
    if float(np.max(np.abs(u.conj().T @ u - np.eye(dim)))) > 1e-10:
        raise UnitaryError("mapping does not extend to a unitary")
    return u


def rotate(lab: LabState, chamber: str, mapping,
           step_index: int = 0) -> tuple[LabState, LedgerEvent]:
    """Apply the unitary extending ``mapping`` to every component state of
    the chamber.  Isochoric and energy-free: Q = W = 0."""
    ch = lab.chamber(chamber)
    u = rotation_unitary(mapping, lab.lab_dim)
    contents = tuple(
        GasComponent(StatisticalMatrix(u @ c.state.matrix @ u.conj().T), c.moles)
        for c in ch.contents
    )
    rotated = Chamber(ch.name, ch.volume, _merge(contents))
    new_lab = _replace_chambers(lab, [chamber], [rotated])
    desc = f"rotate {chamber} by a {len(mapping)}-ket mapping"
    return new_lab, LedgerEvent.isothermal(step_index, "rotate", 0.0, desc)


def partition(lab: LabState, chamber: str, fraction: float, names=None,
              step_index: int = 0) -> tuple[LabState, LedgerEvent]:
    """Insert an impermeable wall at the given volume fraction.  Both sides
    inherit the same composition, scaled in moles; Q = W = 0."""
    ch = lab.chamber(chamber)
    if not 0.0 < fraction < 1.0:
        raise DomainError(f"fraction must lie in (0, 1), got {fraction}")
    if names is None:
        names = (f"{chamber}.0", f"{chamber}.1")
    if len(names) != 2:
        raise DomainError("partition needs exactly two chamber names")
    halves = []
    for part_name, f in zip(names, (fraction, 1.0 - fraction)):
        contents = tuple(
            GasComponent(c.state, c.moles * f) for c in ch.contents
        )
        halves.append(Chamber(part_name, f * ch.volume, contents))
    new_lab = _replace_chambers(lab, [chamber], halves)
    desc = f"partition {chamber} at {fraction:.6g} into {names[0]}, {names[1]}"
    return new_lab, LedgerEvent.isothermal(step_index, "partition", 0.0, desc)


def join(lab: LabState, a: str, b: str, name=None,
         step_index: int = 0) -> tuple[LabState, LedgerEvent]:
    """Remove the wall between two chambers.  Bookkeeping records no work
    for wall removal itself; any thermodynamic consequence of the resulting
    diffusion only ever shows up through later membrane operations."""
    cha, chb = lab.chamber(a), lab.chamber(b)
    name = name or f"{a}+{b}"
    merged = Chamber(name, cha.volume + chb.volume,
                     _merge(cha.contents + chb.contents))
    new_lab = _replace_chambers(lab, [a, b], [merged])
    desc = f"join {a} + {b} into {name}"
    return new_lab, LedgerEvent.isothermal(step_index, "join", 0.0, desc)
