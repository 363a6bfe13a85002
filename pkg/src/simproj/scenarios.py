"""The two interaction procedures.

Scenario 1 (interpolation): learn a projection from a small manipulated
control-point layout, then project the full dataset with it.

Scenario 2 (neighbor learning): after points are dragged in the full
layout, rebuild the target/mask from the manipulated layout plus the
high-dimensional and visual neighbors of each moved point, and refit.

Neither run_* function reads labels; labels enter only the simulators
(simulate_center_manipulation, drag_class, supervised_target).
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (CountOutOfRange, DuplicateIndex, EmptyManipulation,
                     IndexOutOfRange, UnknownClass)
from .init_projections import Layout2D
from .metrics import exact_knn
from .optimizer import (KernelModel, LinearModel, OptimizerConfig, fit_kernel,
                        fit_linear)
from .similarity import (MaskMatrix, SimilarityMatrix, clone_target,
                         squared_distances, uniform_mask)


@dataclass
class ControlPointSet:
    indices: np.ndarray

    @property
    def count(self) -> int:
        return len(self.indices)


@dataclass
class ManipulationSet:
    moves: list  # list of (index, (x, y))

    def __post_init__(self):
        seen = set()
        cleaned = []
        for index, xy in self.moves:
            index = int(index)
            if index in seen:
                raise DuplicateIndex(f"duplicate move index {index}")
            seen.add(index)
            xy = np.asarray(xy, dtype=float)
            if xy.shape != (2,) or not np.isfinite(xy).all():
                raise IndexOutOfRange(f"move {index}: coordinates must be 2 finite numbers")
            cleaned.append((index, xy))
        self.moves = cleaned

    @property
    def indices(self) -> np.ndarray:
        return np.array([i for i, _ in self.moves], dtype=int)

    def apply(self, coords: np.ndarray) -> np.ndarray:
        out = coords.copy()
        for index, xy in self.moves:
            if not 0 <= index < len(out):
                raise IndexOutOfRange(f"move index {index} outside layout of {len(out)}")
            out[index] = xy
        return out


@dataclass
class NeighborSpec:
    k_original: int = 10
    k_visual: int = 5
    mask_original: float = 1.0
    mask_visual: float = 0.5
    mask_manipulated: float = 1.0
    mask_base: float = 0.1


def select_control_points(X, count: int | None = None, seed: int = 0) -> ControlPointSet:
    n = np.asarray(X).shape[0]
    if count is None:
        count = int(round(np.sqrt(n)))
    if not 2 <= count <= n:
        raise CountOutOfRange(f"count {count} outside [2, {n}]")
    rng = np.random.default_rng(seed)
    return ControlPointSet(indices=np.sort(rng.choice(n, size=count, replace=False)))


def _fit(family: str, X, target, mask, config: OptimizerConfig, init_model=None):
    if family == "kernel":
        return fit_kernel(X, target, mask, config, init_model=init_model)
    if family == "linear":
        return fit_linear(X, target, mask, config, init_model=init_model)
    raise ValueError(f"unknown model family {family!r}")


def clone_fit(X_train, init: Layout2D, model_family: str, config: OptimizerConfig):
    """Fit a model whose projected similarities clone the init layout.
    Returns (model, loss_trace)."""
    X_train = np.asarray(X_train, dtype=float)
    if len(init) != X_train.shape[0]:
        raise CountOutOfRange("init layout must cover the training rows")
    target = clone_target(init.coords)
    return _fit(model_family, X_train, target, uniform_mask(X_train.shape[0]), config)


def localize_moves(control: ControlPointSet, manipulation: ManipulationSet) -> ManipulationSet:
    """Re-index dataset-level moves into control-set row positions."""
    positions = {int(i): pos for pos, i in enumerate(control.indices)}
    local_moves = []
    for index, xy in manipulation.moves:
        if index not in positions:
            raise IndexOutOfRange(f"manipulated index {index} is not a control point")
        local_moves.append((positions[index], xy))
    return ManipulationSet(local_moves)


def refit_interpolation(model, X_train, manipulated_layout: np.ndarray,
                        model_family: str, config: OptimizerConfig):
    """Re-clone the manipulated control layout, warm-starting from the
    current model."""
    target = clone_target(manipulated_layout)
    mask = uniform_mask(len(manipulated_layout))
    return _fit(model_family, X_train, target, mask, config, init_model=model)


def run_interpolation(X, control: ControlPointSet, init: Layout2D,
                      manipulation: ManipulationSet | None, model_family: str,
                      config: OptimizerConfig):
    """Clone the control-point init, refit against the manipulated layout,
    and project the full dataset. Returns (model, layout, loss_traces)."""
    X = np.asarray(X, dtype=float)
    Xs = X[control.indices]
    model, trace_clone = clone_fit(Xs, init, model_family, config)

    Ys = model.project(Xs)
    if manipulation is not None and manipulation.moves:
        Ys = localize_moves(control, manipulation).apply(Ys)

    model, trace_refit = refit_interpolation(model, Xs, Ys, model_family, config)
    layout = Layout2D(coords=model.project(X), source="learned")
    return model, layout, (trace_clone, trace_refit)


def simulate_center_manipulation(layout: Layout2D, labels, spread: float = 0.05,
                                 seed: int = 0) -> ManipulationSet:
    """Move every point of the layout to its class centroid plus Gaussian
    jitter of sd spread * (std of the layout coordinates)."""
    coords = layout.coords
    labels = np.asarray(labels)
    if len(labels) != len(coords):
        raise IndexOutOfRange("labels must cover every layout point")
    if np.unique(labels).size < 2:
        warnings.warn("single-class manipulation collapses to one centroid",
                      stacklevel=2)
    rng = np.random.default_rng(seed)
    scale = float(coords.std())
    moves = []
    for c in np.unique(labels):
        member = np.where(labels == c)[0]
        centroid = coords[member].mean(axis=0)
        jitter = rng.normal(0.0, spread * scale, size=(len(member), 2))
        for row, idx in enumerate(member):
            moves.append((int(idx), centroid + jitter[row]))
    moves.sort(key=lambda m: m[0])
    return ManipulationSet(moves)


def drag_class(layout: Layout2D, labels, class_id, delta_xy) -> ManipulationSet:
    labels = np.asarray(labels)
    member = np.where(labels == class_id)[0]
    if member.size == 0:
        raise UnknownClass(f"class {class_id!r} not present")
    delta = np.asarray(delta_xy, dtype=float)
    return ManipulationSet([(int(i), layout.coords[i] + delta) for i in member])


def _neighbor_target_and_mask(X, manipulated_layout: np.ndarray,
                              moved: np.ndarray, spec: NeighborSpec):
    """Clone target of the manipulated layout, enriched with similarity 1
    for each moved point's neighbors. Precedence on overlap: base < manipulated
    rows/cols < visual neighbors < original neighbors."""
    n = len(manipulated_layout)
    target = clone_target(manipulated_layout).values
    mask = np.full((n, n), spec.mask_base)
    mask[moved, :] = spec.mask_manipulated
    mask[:, moved] = spec.mask_manipulated

    if spec.k_visual > 0:
        d_low = np.sqrt(squared_distances(manipulated_layout))
        visual_nn = exact_knn(d_low, spec.k_visual)
        for i in moved:
            for j in visual_nn[i]:
                target[i, j] = target[j, i] = 1.0
                mask[i, j] = mask[j, i] = spec.mask_visual
    if spec.k_original > 0:
        d_high = np.sqrt(squared_distances(np.asarray(X, dtype=float)))
        original_nn = exact_knn(d_high, spec.k_original)
        for i in moved:
            for j in original_nn[i]:
                target[i, j] = target[j, i] = 1.0
                mask[i, j] = mask[j, i] = spec.mask_original
    return SimilarityMatrix(values=target, sigma=1.0), MaskMatrix(values=mask)


def refit_neighbors(model, X, manipulated_layout: np.ndarray, moved: np.ndarray,
                    spec: NeighborSpec, model_family: str, config: OptimizerConfig):
    """Build the neighbor-enriched target/mask, then refit."""
    X = np.asarray(X, dtype=float)
    if spec.k_original >= X.shape[0] or spec.k_visual >= X.shape[0]:
        raise CountOutOfRange("neighbor counts must be < N")
    refit_target, refit_mask = _neighbor_target_and_mask(X, manipulated_layout,
                                                         moved, spec)
    return _fit(model_family, X, refit_target, refit_mask, config, init_model=model)


def run_neighbor_learning(X, init: Layout2D, manipulation: ManipulationSet,
                          spec: NeighborSpec, model_family: str,
                          config: OptimizerConfig):
    """Clone the init, apply the manipulation, enrich target/mask with the
    neighbors of each moved point, refit, and project. Returns
    (model, layout, loss_traces)."""
    X = np.asarray(X, dtype=float)
    if manipulation is None or not manipulation.moves:
        raise EmptyManipulation("neighbor learning requires at least one move")
    model, trace_clone = clone_fit(X, init, model_family, config)

    Y = model.project(X)
    Y_tilde = manipulation.apply(Y)

    model, trace_refit = refit_neighbors(model, X, Y_tilde, manipulation.indices,
                                         spec, model_family, config)
    layout = Layout2D(coords=model.project(X), source="learned")
    return model, layout, (trace_clone, trace_refit)


def supervised_target(labels, same_class_similarity: float = 0.8):
    """Label-driven target: same-class pairs get the given similarity,
    different-class pairs 0, diagonal 1; mask is uniform 1."""
    if not 0 < same_class_similarity <= 1:
        raise ValueError("same_class_similarity must lie in (0, 1]")
    labels = np.asarray(labels)
    same = labels[:, None] == labels[None, :]
    values = np.where(same, same_class_similarity, 0.0)
    np.fill_diagonal(values, 1.0)
    target = SimilarityMatrix(values=values, sigma=float("nan"))
    return target, uniform_mask(len(labels))
