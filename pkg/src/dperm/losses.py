"""Dataset-parameterized convex losses and the constants the solvers consume.

All losses carry the 1/n normalization: L(theta; D) = (1/n) sum_i l(theta; d_i).
Lipschitz constants, curvature and Hessian eigenvalue bounds are derived for
the built-in kinds; custom losses must declare their constants explicitly
because noise calibration depends on them.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import ConvexBody, FEAS_TOL

_BINARY_MAGIC = b"DPRM"

LASSO_DOMAIN_TOL = 1e-12


@dataclass(eq=False)
class Dataset:
    """Feature matrix X (n, p), targets y (n,).

    With ``lasso_profile=True`` ingestion validates the sparse-regression
    domain ||x||_inf <= 1, |y| <= 1; out-of-range records are rejected, not
    clipped, because clipping would silently move the minimizer.
    """

    X: np.ndarray
    y: np.ndarray
    lasso_profile: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise ValueError("X must be (n, p) and y (n,) with matching n")
        self.X, self.y = X, y
        if self.lasso_profile:
            self._validate_lasso()

    def _validate_lasso(self) -> None:
        bad_x = np.abs(self.X).max(axis=1) > 1.0 + LASSO_DOMAIN_TOL
        bad_y = np.abs(self.y) > 1.0 + LASSO_DOMAIN_TOL
        bad = np.nonzero(bad_x | bad_y)[0]
        if bad.size:
            raise ValueError(
                f"record {bad[0]} violates the sparse-regression domain "
                "(||x||_inf <= 1, |y| <= 1); records are rejected, not clipped"
            )

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def records(self):
        for i in range(self.n):
            yield self.X[i], float(self.y[i])

    # -- ingestion ---------------------------------------------------------

    @classmethod
    def from_csv(cls, path, lasso_profile: bool = False) -> "Dataset":
        """Read columns x_1..x_p, y (one record per row, optional header)."""
        rows: list[list[float]] = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            for i, row in enumerate(reader):
                if not row:
                    continue
                try:
                    rows.append([float(c) for c in row])
                except ValueError:
                    if i == 0:
                        continue  # header line
                    raise
        data = np.asarray(rows, dtype=float)
        if data.ndim != 2 or data.shape[1] < 2:
            raise ValueError("CSV must have at least one feature column and a target column")
        return cls(X=data[:, :-1], y=data[:, -1], lasso_profile=lasso_profile)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x_{j + 1}" for j in range(self.p)] + ["y"])
            for i in range(self.n):
                writer.writerow([repr(float(v)) for v in self.X[i]]
                                + [repr(float(self.y[i]))])

    @classmethod
    def from_binary(cls, path, lasso_profile: bool = False) -> "Dataset":
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != _BINARY_MAGIC:
                raise ValueError("not a dataset binary file")
            n, p = struct.unpack("<QQ", fh.read(16))
            flat = np.fromfile(fh, dtype="<f8", count=n * (p + 1))
        if flat.size != n * (p + 1):
            raise ValueError("truncated dataset binary file")
        rows = flat.reshape(n, p + 1)
        return cls(X=rows[:, :p], y=rows[:, p], lasso_profile=lasso_profile)

    def to_binary(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(_BINARY_MAGIC)
            fh.write(struct.pack("<QQ", self.n, self.p))
            np.hstack([self.X, self.y[:, None]]).astype("<f8").tofile(fh)


def _require_nonempty(data: Dataset) -> None:
    if data.n == 0:
        raise ValueError("dataset is empty")


class LossSpec:
    """Convex per-record loss with derived (or declared) solver constants."""

    strong_convexity: Optional[float] = None
    strong_convexity_ref: Optional[str] = None

    # -- evaluation ---------------------------------------------------------

    def loss(self, theta, data: Dataset) -> float:
        _require_nonempty(data)
        theta = np.asarray(theta, dtype=float)
        return self._loss_full(theta, data.X, data.y)

    def grad(self, theta, data: Dataset) -> np.ndarray:
        _require_nonempty(data)
        theta = np.asarray(theta, dtype=float)
        return self._grad_full(theta, data.X, data.y)

    def grad_single(self, theta, x, y: float) -> np.ndarray:
        raise NotImplementedError

    def _loss_full(self, theta, X, y) -> float:
        raise NotImplementedError

    def _grad_full(self, theta, X, y) -> np.ndarray:
        raise NotImplementedError

    # -- constants ------------------------------------------------------------

    def lipschitz_constants(self, body: ConvexBody, data: Dataset) -> tuple[float, float]:
        """Per-record worst-case (L1, L2) gradient norms over the body."""
        raise NotImplementedError

    def curvature_bound(self, body: ConvexBody, data: Dataset) -> float:
        raise NotImplementedError

    def curvature_empirical(self, body: ConvexBody, data: Dataset,
                            trials: int, seed: int = 0) -> float:
        """Sampled supremum of the second-order curvature expression.

        A lower bound on the true curvature constant, used to sanity-check
        ``curvature_bound``.
        """
        from .geometry import sample_feasible

        if trials < 1:
            raise ValueError("trials must be >= 1")
        _require_nonempty(data)
        rng = np.random.default_rng(seed)
        best = 0.0
        for _ in range(trials):
            t1 = sample_feasible(body, rng)
            t2 = sample_feasible(body, rng)
            gamma = 1.0 - rng.random()  # in (0, 1]
            t3 = t1 + gamma * (t2 - t1)
            val = (2.0 / gamma ** 2) * (
                self.loss(t3, data) - self.loss(t1, data)
                - float((t3 - t1) @ self.grad(t1, data))
            )
            best = max(best, val)
        return best

    def hessian_eig_bounds(self, body: ConvexBody, data: Dataset) -> tuple[float, float]:
        """Bounds (lambda_min, lambda_max) on per-record Hessian eigenvalues."""
        raise NotImplementedError


def _residual_bounds(body: ConvexBody, data: Dataset) -> np.ndarray:
    # |<x_i, theta> - y_i| <= dual_norm(x_i) + |y_i| over the body.
    return body._dual_norm_batch(data.X) + np.abs(data.y)


class SquaredError(LossSpec):
    """l(theta; (x, y)) = 0.5 (<x, theta> - y)^2."""

    def _loss_full(self, theta, X, y) -> float:
        r = X @ theta - y
        return 0.5 * float(r @ r) / X.shape[0]

    def _grad_full(self, theta, X, y) -> np.ndarray:
        r = X @ theta - y
        return (X.T @ r) / X.shape[0]

    def grad_single(self, theta, x, y: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (float(x @ theta) - y) * x

    def lipschitz_constants(self, body, data) -> tuple[float, float]:
        _require_nonempty(data)
        res = _residual_bounds(body, data)
        L1 = float(np.max(res * np.abs(data.X).max(axis=1), initial=0.0))
        L2 = float(np.max(res * np.linalg.norm(data.X, axis=1), initial=0.0))
        return L1, L2

    def curvature_bound(self, body, data) -> float:
        return _quadratic_curvature_bound(body, data, ridge=0.0)

    def hessian_eig_bounds(self, body, data) -> tuple[float, float]:
        _require_nonempty(data)
        sq = np.sum(data.X * data.X, axis=1)
        lam_max = float(sq.max())
        lam_min = float(sq.min()) if data.p == 1 else 0.0
        return lam_min, lam_max


class Huber(LossSpec):
    """Huber loss of the residual with threshold delta."""

    def __init__(self, delta: float):
        if delta <= 0:
            raise ValueError("Huber delta must be positive")
        self.delta = float(delta)

    def _loss_full(self, theta, X, y) -> float:
        r = X @ theta - y
        a = np.abs(r)
        d = self.delta
        vals = np.where(a <= d, 0.5 * r * r, d * a - 0.5 * d * d)
        return float(vals.sum()) / X.shape[0]

    def _grad_full(self, theta, X, y) -> np.ndarray:
        r = np.clip(X @ theta - y, -self.delta, self.delta)
        return (X.T @ r) / X.shape[0]

    def grad_single(self, theta, x, y: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r = float(np.clip(float(x @ theta) - y, -self.delta, self.delta))
        return r * x

    def lipschitz_constants(self, body, data) -> tuple[float, float]:
        _require_nonempty(data)
        res = np.minimum(_residual_bounds(body, data), self.delta)
        L1 = float(np.max(res * np.abs(data.X).max(axis=1), initial=0.0))
        L2 = float(np.max(res * np.linalg.norm(data.X, axis=1), initial=0.0))
        return L1, L2

    def curvature_bound(self, body, data) -> float:
        # The Huber Hessian is dominated by the quadratic zone's x x^T.
        return _quadratic_curvature_bound(body, data, ridge=0.0)

    def hessian_eig_bounds(self, body, data) -> tuple[float, float]:
        # Piecewise bound: zero outside the quadratic zone.
        _require_nonempty(data)
        sq = np.sum(data.X * data.X, axis=1)
        return 0.0, float(sq.max())


class CustomLoss(LossSpec):
    """User-supplied loss hooks with explicitly declared constants.

    The library never guesses Lipschitz constants for black-box hooks: a
    wrong constant would silently break the privacy calibration.  Batch
    hooks are optional accelerators and must agree with the per-record
    hooks.
    """

    def __init__(self, loss_single: Callable, grad_single: Callable,
                 constants: dict,
                 loss_full: Optional[Callable] = None,
                 grad_full: Optional[Callable] = None,
                 name: str = "custom"):
        self._loss_single = loss_single
        self._grad_single = grad_single
        self._loss_batch = loss_full
        self._grad_batch = grad_full
        self.name = name
        self.constants = dict(constants)
        self.strong_convexity = self.constants.get("strong_convexity")
        self.strong_convexity_ref = self.constants.get("strong_convexity_ref")

    def _loss_full(self, theta, X, y) -> float:
        if self._loss_batch is not None:
            return float(self._loss_batch(theta, X, y))
        return sum(self._loss_single(theta, X[i], float(y[i]))
                   for i in range(X.shape[0])) / X.shape[0]

    def _grad_full(self, theta, X, y) -> np.ndarray:
        if self._grad_batch is not None:
            return np.asarray(self._grad_batch(theta, X, y), dtype=float)
        acc = np.zeros_like(np.asarray(theta, dtype=float))
        for i in range(X.shape[0]):
            acc += self._grad_single(theta, X[i], float(y[i]))
        return acc / X.shape[0]

    def grad_single(self, theta, x, y: float) -> np.ndarray:
        return np.asarray(self._grad_single(theta, x, y), dtype=float)

    def _declared(self, key: str) -> float:
        if key not in self.constants:
            raise ValueError(
                f"custom loss {self.name!r} does not declare {key!r}; "
                "constants must be supplied, never inferred"
            )
        return float(self.constants[key])

    def lipschitz_constants(self, body, data) -> tuple[float, float]:
        return self._declared("l1_lipschitz"), self._declared("l2_lipschitz")

    def curvature_bound(self, body, data) -> float:
        return self._declared("curvature")

    def hessian_eig_bounds(self, body, data) -> tuple[float, float]:
        return self._declared("lambda_min"), self._declared("lambda_max")


def _quadratic_curvature_bound(body: ConvexBody, data: Dataset, ridge: float) -> float:
    """4 max over C of (||X theta||^2 / n + ridge ||theta||^2)."""
    _require_nonempty(data)
    X, n = data.X, data.n
    from .geometry import Box, GroupedL1Ball, L1Ball, L2Ball

    def quad(theta):
        v = X @ theta
        return float(v @ v) / n + ridge * float(theta @ theta)

    try:
        V = body.vertices()
    except ValueError:
        V = None
    if V is not None:
        return 4.0 * max(quad(v) for v in V)
    if isinstance(body, L2Ball):
        top = float(np.linalg.norm(X, 2)) if X.size else 0.0
        return 4.0 * (body.radius ** 2) * (top * top / n + ridge)
    if isinstance(body, GroupedL1Ball):
        best = 0.0
        for s in body._block_slices():
            sub = X[:, s]
            top = float(np.linalg.norm(sub, 2)) if sub.size else 0.0
            best = max(best, top * top)
        return 4.0 * (body.radius ** 2) * (best / n + ridge)
    if isinstance(body, Box):
        if not body.is_symmetric:
            raise ValueError("curvature bound needs a symmetric body or a vertex list")
        m = body.hi
        row = np.abs(X) @ m
        return 4.0 * (float(row @ row) / n + ridge * float(m @ m))
    raise ValueError(f"curvature bound not implemented for {type(body).__name__}")


def ridge_loss(ridge: float, body: ConvexBody, data: Dataset) -> CustomLoss:
    """Squared error plus (ridge/2)||theta||^2, with constants derived for the body.

    The ridge term makes the loss ``ridge``-strongly convex w.r.t. l2, which
    is what the strongly-convex mirror-descent variant requires.
    """
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    base = SquaredError()
    L1, L2 = base.lipschitz_constants(body, data)
    max_l2 = max(float(np.linalg.norm(v)) for v in _extreme_points(body))
    max_linf = max(float(np.abs(v).max()) for v in _extreme_points(body))
    lam_min, lam_max = base.hessian_eig_bounds(body, data)
    constants = {
        "l1_lipschitz": L1 + ridge * max_linf,
        "l2_lipschitz": L2 + ridge * max_l2,
        "curvature": _quadratic_curvature_bound(body, data, ridge=ridge),
        "lambda_min": lam_min + ridge,
        "lambda_max": lam_max + ridge,
        "strong_convexity": ridge,
        "strong_convexity_ref": "squared_l2",
    }

    def loss_full(theta, X, y):
        r = X @ theta - y
        return 0.5 * float(r @ r) / X.shape[0] + 0.5 * ridge * float(theta @ theta)

    def grad_full(theta, X, y):
        r = X @ theta - y
        return (X.T @ r) / X.shape[0] + ridge * np.asarray(theta, dtype=float)

    def loss_single(theta, x, y):
        r = float(np.asarray(x) @ theta) - y
        return 0.5 * r * r + 0.5 * ridge * float(np.asarray(theta) @ np.asarray(theta))

    def grad_single(theta, x, y):
        x = np.asarray(x, dtype=float)
        return (float(x @ theta) - y) * x + ridge * np.asarray(theta, dtype=float)

    return CustomLoss(loss_single, grad_single, constants,
                      loss_full=loss_full, grad_full=grad_full,
                      name=f"ridge({ridge})")


def _extreme_points(body: ConvexBody):
    """Points spanning the body for norm maxima (vertices or ball axes)."""
    from .geometry import Box, GroupedL1Ball, L1Ball, L2Ball

    try:
        return list(body.vertices())
    except ValueError:
        pass
    p = body.dimension
    if isinstance(body, L2Ball):
        # ||theta||_2 and ||theta||_inf maxima both occur at radius.
        return [body.radius * np.ones(p) / math.sqrt(p), body.radius * np.eye(p)[0]]
    if isinstance(body, GroupedL1Ball):
        out = []
        for s in body._block_slices():
            v = np.zeros(p)
            width = s.stop - s.start
            v[s] = body.radius / math.sqrt(width)
            out.append(v)
            v2 = np.zeros(p)
            v2[s.start] = body.radius
            out.append(v2)
        return out
    if isinstance(body, Box):
        return [body.lo, body.hi]
    raise ValueError(f"no extreme-point list for {type(body).__name__}")


_LOSS_TAGS = {
    "squared_error": lambda d: SquaredError(),
    "huber": lambda d: Huber(delta=float(d["delta"])),
}


def loss_from_dict(doc: dict) -> LossSpec:
    kind = doc.get("kind")
    if kind not in _LOSS_TAGS:
        raise ValueError(f"unknown loss kind {kind!r} (custom losses are built in code)")
    return _LOSS_TAGS[kind](doc)
