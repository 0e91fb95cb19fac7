"""Exact desk-scale solvers for the sparse and concave-power objectives.

``solve_l0`` finds every sparsest solution by exhaustive support search.
``solve_lp_extreme`` minimizes sum(|x_i|^p) for 0 < p <= 1 by scoring the
extreme points of the modulus-dominance polytope: the objective is concave
(strictly so for p < 1) on the nonnegative cone, hence its minimum over a
polytope is attained at a vertex. ``solve_lp_corank1`` is an independent
breakpoint oracle for one-dimensional solution sets.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .config import DEFAULT_CAPS, DEFAULT_TOLERANCES, Caps, Tolerances
from .errors import CorankMismatch, SignRecoveryFailure
from .polytope import g_vertices
from .system import Instance, SolutionParam, decompose

__all__ = [
    "SparseSolution",
    "LpSolution",
    "lp_objective",
    "solve_l0",
    "solve_lp_extreme",
    "solve_lp_corank1",
    "recover_sign",
]


@dataclass(frozen=True)
class SparseSolution:
    """A solution of A x = b together with its support statistics."""

    x: np.ndarray
    support: tuple[int, ...]
    l0: int
    residual: float

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "support", tuple(int(i) for i in self.support))


@dataclass(frozen=True)
class LpSolution:
    """A minimizer of sum(|x_i|^p) subject to A x = b.

    ``vertex_certificate`` lists the active rows of the modulus polytope at
    the optimal vertex; it is None for solutions produced by the corank-1
    breakpoint solver, which never builds the polytope.
    """

    p: float
    x: np.ndarray
    objective: float
    z: np.ndarray
    vertex_certificate: tuple[int, ...] | None
    radius_used: float | None
    radius_active: bool = False

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        z = np.array(self.z, dtype=float)
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    def l0(self, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
        x_inf = float(np.max(np.abs(self.x))) if self.x.size else 0.0
        return int(np.count_nonzero(np.abs(self.x) > tol.zero_tol(x_inf)))


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 < p <= 1.0:
        raise ValueError(f"exponent must lie in (0, 1], got {p}")
    return p


def lp_objective(x, p: float) -> float:
    """sum(|x_i|^p); exactly 0 for the zero vector."""
    p = _check_p(p)
    x = np.asarray(x, dtype=float)
    return float(np.sum(np.abs(x) ** p))


def _support(x: np.ndarray, tol: Tolerances) -> tuple[int, ...]:
    x_inf = float(np.max(np.abs(x))) if x.size else 0.0
    return tuple(int(i) for i in np.flatnonzero(np.abs(x) > tol.zero_tol(x_inf)))


def solve_l0(inst: Instance, tol: Tolerances = DEFAULT_TOLERANCES) -> list[SparseSolution]:
    """All minimum-support solutions, by exhaustive search over supports.

    For k = 0, 1, ... the least-squares fit on every k-column subset is
    tested for feasibility; the first k with a hit is the minimum support
    size. Output is ordered lexicographically by support.
    """
    A, b = inst.A, inst.b
    m, n = A.shape
    feas = tol.feas_tol(float(np.max(np.abs(b))))
    for k in range(m + 1):
        found: list[SparseSolution] = []
        seen: set[tuple] = set()
        for S in combinations(range(n), k):
            if k == 0:
                resid = float(np.max(np.abs(b)))
            else:
                cols = A[:, S]
                xs, *_ = np.linalg.lstsq(cols, b, rcond=None)
                resid = float(np.max(np.abs(cols @ xs - b)))
            if resid > feas:
                continue
            x = np.zeros(n)
            if k:
                x[list(S)] = xs
            key = tuple(np.round(x, 10))
            if key in seen:
                continue
            seen.add(key)
            found.append(
                SparseSolution(
                    x=x,
                    support=_support(x, tol),
                    l0=len(_support(x, tol)),
                    residual=resid,
                )
            )
        if found:
            return found
    raise AssertionError("full-rank system must admit a support of size m")


def recover_sign(
    z,
    param: SolutionParam,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """Invert the modulus map: find x with |x| = z (off-support zero) and A x = b.

    Sign patterns are tried in a deterministic order: all-positive first,
    then by increasing number of negative entries, lexicographic within each
    count.
    """
    z = np.asarray(z, dtype=float)
    A, b = param.instance.A, param.instance.b
    feas = tol.feas_tol(float(np.max(np.abs(b))))
    z_inf = float(np.max(np.abs(z))) if z.size else 0.0
    support = [int(i) for i in np.flatnonzero(np.abs(z) > tol.zero_tol(z_inf))]
    base = np.zeros(z.shape[0])
    base[support] = np.abs(z[support])
    for neg_count in range(len(support) + 1):
        for negs in combinations(support, neg_count):
            x = base.copy()
            for i in negs:
                x[i] = -x[i]
            if float(np.max(np.abs(A @ x - b))) <= feas:
                return x
    raise SignRecoveryFailure(
        f"no sign pattern over support {support} satisfies the system"
    )


def solve_lp_extreme(
    inst: Instance,
    p: float,
    radius_override: float | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
    caps: Caps = DEFAULT_CAPS,
) -> list[LpSolution]:
    """All vertex minimizers of sum(|x_i|^p) subject to A x = b.

    The search box radius defaults to the p-quasinorm of the least-norm
    solution: any minimizer x satisfies |x_i| <= ||x||_p <= ||x_ls||_p, so the
    box certifiably contains every minimizer. An override is accepted for
    reproducing runs with externally supplied bounds; ``radius_active`` flags
    minimizers that touch the box, which would indicate an unsound override.

    All vertices within a 1e-10 relative objective tie are returned, ordered
    lexicographically by modulus vector. With very large radii the far box
    corners are computed less accurately, which never affects the argmin set.
    """
    p = _check_p(p)
    param = decompose(inst, tol=tol)
    if radius_override is not None:
        r = float(radius_override)
        if not r > 0.0:
            raise ValueError(f"radius override must be positive, got {r}")
    else:
        r = float(np.sum(np.abs(param.x_ls) ** p) ** (1.0 / p))
    vs = g_vertices(param, r, tol=tol, caps=caps)
    if len(vs) == 0:
        raise ValueError(
            f"radius {r} leaves no feasible modulus vector; override too small"
        )
    objs = np.sum(np.abs(vs.points) ** p, axis=1)
    best = float(np.min(objs))
    tie = objs <= best * (1.0 + 1e-10)
    solutions: list[LpSolution] = []
    for idx in np.flatnonzero(tie):
        z = vs.points[idx]
        x = recover_sign(z, param, tol=tol)
        x_inf = float(np.max(np.abs(x))) if x.size else 0.0
        active_box = bool(x_inf >= r - tol.dedup_tol(r))
        solutions.append(
            LpSolution(
                p=p,
                x=x,
                objective=lp_objective(x, p),
                z=np.abs(x),
                vertex_certificate=vs.active_sets[idx],
                radius_used=r,
                radius_active=active_box,
            )
        )
    return solutions


def solve_lp_corank1(
    inst: Instance,
    p: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> LpSolution:
    """Breakpoint minimizer of sum(|x_i|^p) on a one-dimensional solution set.

    Along the solution line the objective is concave between consecutive
    component roots and coercive, so its global minimum is attained where
    some component vanishes. Evaluates every such breakpoint and returns the
    argmin (ties broken by the smaller parameter value).
    """
    p = _check_p(p)
    param = decompose(inst, tol=tol)
    if param.d != 1:
        raise CorankMismatch(f"corank {param.d}, need exactly 1")
    u = param.N[:, 0]
    x_ls = param.x_ls
    breaks = sorted(
        float(-x_ls[i] / u[i]) for i in range(u.shape[0]) if abs(u[i]) > 1e-12
    )
    best_t = None
    best_obj = np.inf
    for t in breaks:
        obj = lp_objective(x_ls + t * u, p)
        if obj < best_obj * (1.0 - 1e-14) or best_t is None:
            best_obj = obj
            best_t = t
    x = x_ls + best_t * u
    x_inf = float(np.max(np.abs(x)))
    x = np.where(np.abs(x) <= tol.zero_tol(x_inf), 0.0, x)
    return LpSolution(
        p=p,
        x=x,
        objective=lp_objective(x, p),
        z=np.abs(x),
        vertex_certificate=None,
        radius_used=None,
    )
