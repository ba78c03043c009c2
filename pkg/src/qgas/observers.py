"""Observer-relative descriptions of the lab.

An observer is a trace-preserving coarse-graining channel from the lab
Hilbert space to the observer's own description space, built from a table of
lab-basis kets and the observer kets they look like.  Rows whose images form
an orthonormal set are grouped into one sector, and each sector k yields one
isometry V_k = sum_rows |obs><lab|; the channel is rho -> sum_k V_k rho V_k^dag.
Cross-sector coherences are dropped, which is exactly what "cannot tell the
sectors apart" means operationally.

The same machinery covers classical gases: two argon varieties are two
orthogonal basis states of a 2-dimensional lab space, a species-blind
observer maps both onto one description label (obs_dim 1), and the
fully-informed observer is the identity table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, quantum
from .errors import BasisError, DimensionError, EmbeddingError, SectorError, ShapeError
from .quantum import Povm, StatisticalMatrix
from .thermo import Chamber, LabState, aggregate_state

_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Observer:
    """Named coarse-graining channel, kept with the table that built it."""

    name: str
    obs_dim: int
    lab_dim: int
    sector_isometries: tuple[np.ndarray, ...]
    #: sector k -> ordered (lab_ket, obs_ket) rows
    sectors: tuple[tuple[tuple[np.ndarray, np.ndarray], ...], ...]

    @property
    def is_identity(self) -> bool:
        return len(self.sector_isometries) == 1 and self.obs_dim == self.lab_dim


def build_observer(table, obs_dim: int, name: str = "observer") -> Observer:
    """Build an observer from (lab_ket, observer_ket) rows.

    The lab kets must form an orthonormal basis of the lab space.  Rows are
    grouped greedily, in order, into sectors whose observer images stay
    orthonormal; trace preservation of the resulting channel is asserted.
    """
    rows = [(linalg.as_ket(lab), linalg.as_ket(obs)) for lab, obs in table]
    if not rows:
        raise BasisError("observer table is empty")
    lab_dim = rows[0][0].size
    if any(lab.size != lab_dim for lab, _ in rows):
        raise BasisError("lab kets must share one dimension")
    if any(obs.size != obs_dim for _, obs in rows):
        raise DimensionError(
            f"observer kets must have dimension {obs_dim}"
        )
    if len(rows) != lab_dim:
        raise BasisError(
            f"table has {len(rows)} rows but the lab space needs {lab_dim}"
        )
    gram = np.array([[np.vdot(a, b) for b, _ in rows] for a, _ in rows])
    if float(np.max(np.abs(gram - np.eye(lab_dim)))) > _TOL:
        raise BasisError("lab kets must form an orthonormal basis")

    # greedy first-fit grouping: a row joins the first sector whose images
    # stay orthonormal with its own, else starts a new sector
    sectors: list[list[tuple[np.ndarray, np.ndarray]]] = []
    for lab, obs in rows:
        for sector in sectors:
            if all(abs(np.vdot(obs, other)) <= _TOL for _, other in sector):
                sector.append((lab, obs))
                break
        else:
            if len(sectors) >= lab_dim:
                raise SectorError("table rows admit no valid sector grouping")
            sectors.append([(lab, obs)])

    isometries = []
    for sector in sectors:
        v = np.zeros((obs_dim, lab_dim), dtype=complex)
        for lab, obs in sector:
            v += np.outer(obs, lab.conj())
        isometries.append(v)
    total = sum(v.conj().T @ v for v in isometries)
    if float(np.max(np.abs(total - np.eye(lab_dim)))) > _TOL:
        raise BasisError("channel is not trace preserving")

    return Observer(
        name=name,
        obs_dim=obs_dim,
        lab_dim=lab_dim,
        sector_isometries=tuple(isometries),
        sectors=tuple(tuple(sector) for sector in sectors),
    )


def identity_observer(dim: int, name: str = "identity") -> Observer:
    eye = np.eye(dim)
    return build_observer([(eye[i], eye[i]) for i in range(dim)], dim, name)


def coarse_grain(obs: Observer, rho: StatisticalMatrix) -> StatisticalMatrix:
    """Re-describe a lab state in the observer's space:
    rho -> sum_k V_k rho V_k^dag."""
    if rho.dim != obs.lab_dim:
        raise DimensionError(
            f"state dim {rho.dim} does not match lab dim {obs.lab_dim}"
        )
    out = sum(v @ rho.matrix @ v.conj().T for v in obs.sector_isometries)
    return StatisticalMatrix(out, label=rho.label)


def embedding_table(obs: Observer):
    """The observer's embedding: each observer basis ket with its lab image
    in every sector.  Exists only when every sector realizes the same full
    observer basis; raises EmbeddingError otherwise."""
    reference = [obs_ket for _, obs_ket in obs.sectors[0]]
    if len(reference) != obs.obs_dim:
        raise EmbeddingError(
            f"sector 0 realizes only {len(reference)} of {obs.obs_dim} basis kets"
        )
    table = []
    for ref in reference:
        images = []
        for k, sector in enumerate(obs.sectors):
            match = None
            for lab, obs_ket in sector:
                if float(np.max(np.abs(obs_ket - ref))) <= _TOL:
                    match = lab
                    break
            if match is None:
                raise EmbeddingError(f"sector {k} has no image for a basis ket")
            images.append(match)
        table.append((ref, images))
    return table


def lift_through(obs: Observer, povm: Povm) -> Povm:
    """Lift an observer-space POVM to the lab space via the observer table."""
    return quantum.lift_povm(povm, embedding_table(obs))


@dataclass(frozen=True, eq=False)
class ChamberView:
    name: str
    volume: float
    moles: float
    mixture: tuple[tuple[float, StatisticalMatrix], ...]


@dataclass(frozen=True, eq=False)
class ObserverView:
    observer: str
    chambers: tuple[ChamberView, ...]


def _coarse_aggregate(obs: Observer, chamber: Chamber) -> StatisticalMatrix | None:
    if not chamber.contents:
        return None
    return coarse_grain(obs, aggregate_state(chamber))


def view(obs: Observer, lab: LabState) -> ObserverView:
    """What the lab looks like to this observer: per chamber, the coarse
    aggregate state decomposed into its canonical eigen-mixture."""
    views = []
    for chamber in lab.chambers.values():
        sigma = _coarse_aggregate(obs, chamber)
        if sigma is None:
            mixture = ()
        else:
            w, v = linalg.hermitian_eig(sigma.matrix)
            mixture = tuple(
                (float(w[i]), StatisticalMatrix.pure(v[:, i]))
                for i in range(len(w)) if w[i] > 1e-12
            )
        views.append(ChamberView(chamber.name, chamber.volume, chamber.moles, mixture))
    return ObserverView(obs.name, tuple(views))


def equivalence_mismatch(obs: Observer, a: LabState, b: LabState,
                         tol: float = 1e-9) -> str | None:
    """None when the two lab states look the same to the observer, else a
    one-line description of the first difference found."""
    if set(a.chambers) != set(b.chambers):
        raise ShapeError(
            f"chamber sets differ: {sorted(a.chambers)} vs {sorted(b.chambers)}"
        )
    for name, cha in a.chambers.items():
        chb = b.chambers[name]
        if abs(cha.volume - chb.volume) > tol:
            return (f"chamber {name!r} volume {cha.volume:.9g}"
                    f" vs {chb.volume:.9g}")
        if abs(cha.moles - chb.moles) > tol:
            return f"chamber {name!r} moles {cha.moles:.9g} vs {chb.moles:.9g}"
        sa, sb = _coarse_aggregate(obs, cha), _coarse_aggregate(obs, chb)
        if (sa is None) != (sb is None):
            return f"chamber {name!r} is empty on one side only"
        if sa is not None and float(np.max(np.abs(sa.matrix - sb.matrix))) > tol:
            return f"chamber {name!r} contents differ for observer {obs.name!r}"
    return None


def states_equivalent(obs: Observer, a: LabState, b: LabState,
                      tol: float = 1e-9) -> bool:
    """Whether the observer can tell the two lab states apart: chamber
    volumes, mole counts, and coarse-grained aggregates all match."""
    return equivalence_mismatch(obs, a, b, tol) is None
