"""Object centroid trajectory sampling.

Three families of motion are provided:

* smooth random paths drawn from a zero-mean Gaussian process with a
  squared-exponential kernel, shifted by a uniform initial centroid and
  rejection-sampled to stay inside a centroid bounding box;
* constrained variants of the above where a pair of paths is rigidly
  shifted to coincide at a sampled frame and pixel (guaranteed occlusion);
* straight-line constant-velocity paths (objects may leave the canvas).
"""

from dataclasses import dataclass

import numpy as np

from .errors import GenerationExhaustedError, InvalidParameterError, NumericalError

# Jitter escalation for Cholesky of near-singular SE Gram matrices.
_JITTER_START = 1e-10
_JITTER_MAX = 1e-6


@dataclass(frozen=True)
class GpParams:
    """Parameters for Gaussian-process centroid paths.

    tau : smoothness time constant, in frames.
    bounds_lo, bounds_hi : centroid box (per axis), in pixels.
    length : number of frames.
    max_rejects : retry budget for the out-of-bounds rejection loop.
    """

    tau: float
    bounds_lo: float
    bounds_hi: float
    length: int
    max_rejects: int = 1000

    def __post_init__(self):
        if self.tau <= 0:
            raise InvalidParameterError(f"tau must be positive, got {self.tau}")
        if not self.bounds_lo < self.bounds_hi:
            raise InvalidParameterError(
                f"bounds_lo must be < bounds_hi, got [{self.bounds_lo}, {self.bounds_hi}]"
            )
        if self.length < 1:
            raise InvalidParameterError(f"length must be >= 1, got {self.length}")
        if self.max_rejects < 1:
            raise InvalidParameterError(f"max_rejects must be >= 1, got {self.max_rejects}")


# Centroid sampling box used by the dSprites-style video dataset.
VMDS_BOUNDS = (10.0, 54.0)
VMDS_TAU = 10.0


def vmds_gp_params(length: int, max_rejects: int = 1000) -> GpParams:
    """Default GP parameters for the dSprites-style dataset (tau=10, box [10,54])."""
    return GpParams(
        tau=VMDS_TAU,
        bounds_lo=VMDS_BOUNDS[0],
        bounds_hi=VMDS_BOUNDS[1],
        length=length,
        max_rejects=max_rejects,
    )


@dataclass(frozen=True)
class Trajectory:
    """A per-frame sequence of continuous (x, y) centroid positions.

    `shift` records the rigid offset that was added to the zero-mean GP
    draw (the initial-position shift, or the crossing-constraint shift);
    it is None for linear paths.
    """

    points: np.ndarray  # (length, 2) float
    shift: tuple[float, float] | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidParameterError(f"points must have shape (length, 2), got {pts.shape}")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class CrossingRecord:
    """Where and when two trajectories coincide (same pixel after rounding)."""

    frame: int
    position: tuple[float, float]
    pair: tuple[int, int]


def se_kernel(s: float, t: float, tau: float) -> float:
    """Squared-exponential covariance exp(-(s-t)^2 / (2 tau^2))."""
    if tau <= 0:
        raise InvalidParameterError(f"tau must be positive, got {tau}")
    d = float(s) - float(t)
    return float(np.exp(-(d * d) / (2.0 * tau * tau)))


def gram_matrix(length: int, tau: float) -> np.ndarray:
    """Kernel Gram matrix over frame indices 0..length-1 (no jitter applied)."""
    if length < 1:
        raise InvalidParameterError(f"length must be >= 1, got {length}")
    if tau <= 0:
        raise InvalidParameterError(f"tau must be positive, got {tau}")
    idx = np.arange(length, dtype=float)
    d = idx[:, None] - idx[None, :]
    return np.exp(-(d * d) / (2.0 * tau * tau))


def _cholesky_with_jitter(gram: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, escalating diagonal jitter x10 from 1e-10 to 1e-6."""
    jitter = _JITTER_START
    eye = np.eye(gram.shape[0])
    while jitter <= _JITTER_MAX:
        try:
            return np.linalg.cholesky(gram + jitter * eye)
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise NumericalError(
        f"Cholesky factorization failed for {gram.shape[0]}x{gram.shape[0]} "
        f"Gram matrix even with jitter {_JITTER_MAX}"
    )


def _draw_gp_paths(rng: np.random.Generator, chol: np.ndarray) -> np.ndarray:
    """One zero-mean draw per axis; returns (length, 2)."""
    return chol @ rng.standard_normal((chol.shape[0], 2))


def _in_box(points: np.ndarray, lo: float, hi: float) -> bool:
    return bool(np.all(points >= lo) and np.all(points <= hi))


def sample_trajectory(rng: np.random.Generator, params: GpParams) -> Trajectory:
    """Draw a GP path per axis, shift by a uniform initial centroid, reject out-of-box.

    The whole trajectory is re-drawn (GP and shift) whenever any frame's
    centroid leaves [bounds_lo, bounds_hi]^2.
    """
    chol = _cholesky_with_jitter(gram_matrix(params.length, params.tau))
    for _ in range(params.max_rejects):
        gp = _draw_gp_paths(rng, chol)
        shift = rng.uniform(params.bounds_lo, params.bounds_hi, size=2)
        pts = gp + shift
        if _in_box(pts, params.bounds_lo, params.bounds_hi):
            return Trajectory(pts, shift=(float(shift[0]), float(shift[1])))
    raise GenerationExhaustedError("trajectory rejection sampling exhausted", params.max_rejects)


def sample_crossing_trajectories(
    rng: np.random.Generator, params: GpParams, n_objects: int
) -> tuple[list[Trajectory], CrossingRecord]:
    """Sample trajectories such that one pair coincides at a sampled frame.

    The crossing frame and position are drawn uniformly; the two paths of
    the chosen pair are drawn as zero-mean GP paths and rigidly shifted to
    pass through the crossing position at that frame, so they land on the
    same pixel after rounding. Remaining objects get unconstrained paths.
    """
    if n_objects < 2:
        raise InvalidParameterError(f"need at least 2 objects to cross, got {n_objects}")
    chol = _cholesky_with_jitter(gram_matrix(params.length, params.tau))
    t_star = int(rng.integers(params.length))
    position = rng.uniform(params.bounds_lo, params.bounds_hi, size=2)
    pair_idx = np.sort(rng.choice(n_objects, size=2, replace=False))
    pair = (int(pair_idx[0]), int(pair_idx[1]))

    trajectories: list[Trajectory] = []
    for i in range(n_objects):
        if i in pair:
            for _ in range(params.max_rejects):
                gp = _draw_gp_paths(rng, chol)
                shift = position - gp[t_star]
                pts = gp + shift
                if _in_box(pts, params.bounds_lo, params.bounds_hi):
                    trajectories.append(
                        Trajectory(pts, shift=(float(shift[0]), float(shift[1])))
                    )
                    break
            else:
                raise GenerationExhaustedError(
                    "crossing trajectory rejection sampling exhausted", params.max_rejects
                )
        else:
            trajectories.append(sample_trajectory(rng, params))
    record = CrossingRecord(
        frame=t_star, position=(float(position[0]), float(position[1])), pair=pair
    )
    return trajectories, record


def sample_linear_trajectory(
    rng: np.random.Generator,
    length: int,
    bounds: tuple[float, float],
    speed_range: tuple[float, float],
) -> Trajectory:
    """Constant-velocity path: p(t) = p(0) + t*v.

    p(0) is uniform in the bounds box and v per-axis uniform in
    speed_range. No rejection: objects may enter or leave the canvas.
    """
    if length < 1:
        raise InvalidParameterError(f"length must be >= 1, got {length}")
    lo, hi = bounds
    if not lo < hi:
        raise InvalidParameterError(f"bounds must satisfy lo < hi, got {bounds}")
    v_lo, v_hi = speed_range
    if not v_lo <= v_hi:
        raise InvalidParameterError(f"speed_range must satisfy lo <= hi, got {speed_range}")
    p0 = rng.uniform(lo, hi, size=2)
    v = rng.uniform(v_lo, v_hi, size=2)
    t = np.arange(length, dtype=float)[:, None]
    return Trajectory(p0[None, :] + t * v[None, :])
