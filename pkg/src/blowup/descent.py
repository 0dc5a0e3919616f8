"""Preconditioned steepest descent on phi(g) = 0.5 ||lam*g - M g||^2.

Starting from g0 (all ones, or seeded Gaussian noise), each iteration
solves Q d = grad phi(g) with the tridiagonal preconditioner and moves
along -d by the exact line-search step

    s* = <R g, R d> / <R d, R d>,

which minimizes phi(g - s d) over s because phi is quadratic along any
line.  With that step phi never increases; a numerically observed uptick
would mean the arithmetic has degenerated, so the move is rejected and
the run stops.

What the final iterate means: when R is far from singular the descent
drives g to (numerical) zero, and when R is nearly singular the descent
leaves behind g0's component along the near-null direction — an
approximate eigenfunction of M with eigenvalue lam.  The caller reads off
the verdict from the trace's norm ratio and relative residual.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discrete import DiscreteGenerator, Preconditioner

__all__ = [
    "DescentConfig",
    "DescentTrace",
    "initial_vector",
    "optimal_step",
    "run_descent",
]

INIT_ONES = "ones"
INIT_RANDOM = "random"


@dataclass(frozen=True)
class DescentConfig:
    """Iteration budget, stopping rule and starting-vector choice.

    max_iters   hard iteration cap
    stop_grad   stop when ||grad phi|| <= stop_grad * ||g||
    init        "ones" or "random"
    seed        RNG seed for the random start
    init_scale  multiplier on the starting vector
    """

    max_iters: int = 20000
    stop_grad: float = 1e-12
    init: str = INIT_ONES
    seed: int = 0
    init_scale: float = 1.0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be positive, got {self.max_iters!r}")
        if self.stop_grad < 0.0:
            raise ValueError(f"stop_grad must be nonnegative, got {self.stop_grad!r}")
        if self.init not in (INIT_ONES, INIT_RANDOM):
            raise ValueError(f"init must be 'ones' or 'random', got {self.init!r}")


@dataclass
class DescentTrace:
    """Everything a classifier needs from one descent run.

    g_final        final iterate
    initial_norm   ||g0||_inf
    final_norm     ||g_final||_inf
    rel_residual   ||R g||_2 / ||g||_2 at the final iterate, None if g = 0
    objectives     phi per iteration, including the starting value
    iterations     number of accepted steps
    stagnated      True when the run stopped because R d vanished or a
                   step failed to decrease phi
    """

    g_final: np.ndarray
    initial_norm: float
    final_norm: float
    rel_residual: float | None
    objectives: list = field(default_factory=list)
    iterations: int = 0
    stagnated: bool = False

    @property
    def norm_ratio(self) -> float:
        if self.initial_norm == 0.0:
            return 0.0
        return self.final_norm / self.initial_norm


def initial_vector(size: int, config: DescentConfig) -> np.ndarray:
    if config.init == INIT_RANDOM:
        g0 = np.random.default_rng(config.seed).standard_normal(size)
    else:
        g0 = np.ones(size)
    return config.init_scale * g0


def optimal_step(op: DiscreteGenerator, g, d):
    """Exact line-search step along d, and whether the search stagnated.

    Returns (s, stagnated).  stagnated is True when R d = 0, i.e. the
    direction carries no residual change and the quadratic has no
    minimizer along it; the caller should stop rather than divide by zero.
    """
    rd = op.residual(d)
    den = float(rd @ rd)
    if den == 0.0:
        return 0.0, True
    rg = op.residual(g)
    return float(rg @ rd) / den, False


def run_descent(
    op: DiscreteGenerator,
    config: DescentConfig = DescentConfig(),
    g0=None,
) -> DescentTrace:
    """Run preconditioned steepest descent; see the module docstring.

    ``g0`` overrides the configured starting vector when given.
    """
    if g0 is None:
        g = initial_vector(op.grid.n + 1, config)
    else:
        g = np.array(g0, dtype=float)
        if g.shape != (op.grid.n + 1,):
            raise ValueError(
                f"starting vector must have shape ({op.grid.n + 1},), "
                f"got {g.shape}"
            )

    precond = Preconditioner(op)
    initial_norm = float(np.max(np.abs(g)))
    objectives = [op.objective(g)]
    iterations = 0
    stagnated = False

    for _ in range(config.max_iters):
        grad = op.ordinary_gradient(g)
        g_norm = float(np.linalg.norm(g))
        if float(np.linalg.norm(grad)) <= config.stop_grad * g_norm:
            break

        d = precond.solve(grad)
        s, stalled = optimal_step(op, g, d)
        if stalled:
            stagnated = True
            break

        g_next = g - s * d
        phi_next = op.objective(g_next)
        if phi_next > objectives[-1]:
            # exact step on a quadratic cannot increase phi; arithmetic is
            # exhausted, keep the better iterate
            stagnated = True
            break
        g = g_next
        objectives.append(phi_next)
        iterations += 1

    final_norm = float(np.max(np.abs(g)))
    g_l2 = float(np.linalg.norm(g))
    if g_l2 == 0.0:
        rel_residual = None
    else:
        rel_residual = float(np.linalg.norm(op.residual(g))) / g_l2

    return DescentTrace(
        g_final=g,
        initial_norm=initial_norm,
        final_norm=final_norm,
        rel_residual=rel_residual,
        objectives=objectives,
        iterations=iterations,
        stagnated=stagnated,
    )
