"""Gradient descent of the Markov gap over Gaussian smoother unitaries.

The objective is h(A:B) = S_R(A:B) - I(A:B) evaluated on a covariance C
over a "universe" of modes U containing A, B, and every smoother support.
A smoother step conjugates C by exp(i*dt*X) with X Hermitian and supported
on prescribed mode blocks, so dC/dt = i[X, C].

The first variation of each entropy piece is Tr[dC_Y h_Y] with h_Y the
entanglement Hamiltonian of the restriction to Y, giving the
mutual-information kernel

    K_I = h_A (+) h_B (-) h_AB        (embedded in the AB block).

For the reflected entropy, write the doubled covariance restricted to
A u A' as CR = [[C_AA, K_AA], [K_AA, 1 - C_AA]] with K = sqrt(C_AB(1-C_AB)).
With hR = log[(1-CR)/CR] split into blocks h00, h01, h10, h11, the chain
rule through K (eigenbasis V, occupations r of C_AB, divided differences
of sqrt(x(1-x))) yields

    K_R = (h00 - h11, embedded on A) + V (coef o W) V^dag,
    W = V^dag (h01 + h10, embedded on A) V,
    coef_ab = (1 - r_a - r_b) / (sqrt(r_a(1-r_a)) + sqrt(r_b(1-r_b))),

with coef set to zero where the denominator is below 1e-10 (modes pinned
at occupation 0 or 1 do not move).  The full descent kernel is
K = K_R - K_I, and the steepest-descent generator on a support S is

    X_S = -( i[C, K] )|_S,       dh/dt = -sum_S ||X_S||_F^2.

Optional time-reversal constraint: generators are projected onto the
fixed-point set of X -> S conj(X) S (S the single-particle TR matrix,
S^2 = -1), an orthogonal projection, so the descent identity survives.

Saddle handling: when enabled, random Hermitian kicks of prescribed
Frobenius norm are applied on the supports whenever the run stalls, the
gradient norm plateaus, or the gradient drops below tolerance (a
small-gradient point reached by descent may be a saddle; a kick followed
by re-descent distinguishes it from a minimum).  A kick "escapes" if the
gap later drops measurably below its pre-kick value; after
``noise_max_failures`` consecutive non-escapes the point is accepted.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import ConfigError
from .gaussian import (
    LOG_EPS,
    CovarianceMatrix,
    _eigh,
    _validated_spectrum,
    as_mask,
    entropy_from_spectrum,
)

__all__ = [
    "OptimizerConfig",
    "OptimizationReport",
    "TraceRow",
    "gap_and_kernel",
    "descent_generators",
    "project_tr",
    "apply_generator",
    "optimize",
]

#: Divided-difference denominators below this are treated as pinned modes.
PINNED_TOL = 1e-10
#: Relative improvement a noise kick must produce to count as an escape.
ESCAPE_RTOL = 1e-3


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the descent loop.  Defaults suit lattice sizes up to ~1000
    modes; only ``max_iters`` usually needs raising for hard TR-broken runs."""

    grad_tol: float = 3e-3
    max_iters: int = 500
    step_init: float = 1.0
    backtrack_factor: float = 0.5
    max_backtracks: int = 40
    max_bisections: int = 12
    accept_drop: float = 1e-12
    plateau_window: int = 20
    plateau_rtol: float = 1e-3
    noise: bool = True
    noise_amplitude: float = 1e-2
    noise_max_failures: int = 3
    tr_constrained: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.grad_tol <= 0 or self.max_iters < 1 or self.step_init <= 0:
            raise ConfigError("grad_tol, max_iters, step_init must be positive")
        if not 0 < self.backtrack_factor < 1:
            raise ConfigError("backtrack_factor must lie in (0, 1)")
        if self.noise_amplitude <= 0 or self.noise_max_failures < 1:
            raise ConfigError("noise_amplitude and noise_max_failures must be positive")
        if self.plateau_window < 2:
            raise ConfigError("plateau_window must be at least 2")


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    h: float
    grad_norm: float
    step: float
    noise: bool


@dataclass(frozen=True)
class OptimizationReport:
    """Everything a run produced.  ``generators`` are the Hermitian logs of
    the accumulated per-support unitaries at the best visited state; feeding
    them back through ``initial_generators`` reproduces that state."""

    bare_h: float
    final_h: float
    iterations: int
    converged: bool
    reason: str
    grad_norm: float
    h_trace: tuple[TraceRow, ...]
    saddle_events: tuple[dict, ...]
    generators: tuple[np.ndarray, ...]
    n_evaluations: int
    wall_time: float
    config: OptimizerConfig

    def trace_array(self) -> np.ndarray:
        """(iteration, h, grad_norm, step, noise) rows as a float array."""
        return np.array(
            [[r.iteration, r.h, r.grad_norm, r.step, float(r.noise)] for r in self.h_trace]
        )


def _log_ratio(vals: np.ndarray, eps: float = LOG_EPS) -> np.ndarray:
    v = np.clip(vals, eps, 1.0 - eps)
    return np.log((1.0 - v) / v)


def _eh_from(vals: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    mat = (vecs * _log_ratio(vals)) @ vecs.conj().T
    return 0.5 * (mat + mat.conj().T)


class _Partition:
    """Index bookkeeping for one (A, B, supports) problem on a universe."""

    def __init__(self, dim: int, mask_a, mask_b, supports: Sequence):
        self.a = as_mask(mask_a, dim)
        self.b = as_mask(mask_b, dim)
        if np.intersect1d(self.a, self.b).size:
            raise ConfigError("regions A and B overlap")
        self.ab = np.union1d(self.a, self.b)
        self.pa = np.searchsorted(self.ab, self.a)
        self.pb = np.searchsorted(self.ab, self.b)
        self.supports = tuple(as_mask(s, dim) for s in supports)
        if not self.supports:
            raise ConfigError("at least one smoother support is required")
        for i, s in enumerate(self.supports):
            for t in self.supports[i + 1 :]:
                if np.intersect1d(s, t).size:
                    raise ConfigError("smoother supports must be pairwise disjoint")


def gap_and_kernel(
    c: np.ndarray, part: _Partition, want_kernel: bool = True
) -> tuple[float, np.ndarray | None]:
    """Markov gap of ``c`` over the partition; optionally the descent kernel
    K = K_R - K_I on the AB block (indexed like ``part.ab``)."""
    a, b, ab, pa, pb = part.a, part.b, part.ab, part.pa, part.pb
    c_ab = c[np.ix_(ab, ab)]
    c_ab = 0.5 * (c_ab + c_ab.conj().T)

    if want_kernel:
        ra, va = _eigh(c[np.ix_(a, a)])
        rb, vb = _eigh(c[np.ix_(b, b)])
    else:
        ra = _validated_spectrum(np.linalg.eigvalsh(c[np.ix_(a, a)]))
        rb = _validated_spectrum(np.linalg.eigvalsh(c[np.ix_(b, b)]))
    r, v = _eigh(c_ab)
    s_a = entropy_from_spectrum(ra)
    s_b = entropy_from_spectrum(rb)
    s_ab = entropy_from_spectrum(r)

    q = np.sqrt(np.clip(r * (1.0 - r), 0.0, None))
    k_mat = (v * q) @ v.conj().T
    caa = c_ab[np.ix_(pa, pa)]
    kaa = k_mat[np.ix_(pa, pa)]
    na = pa.size
    cr = np.empty((2 * na, 2 * na), dtype=complex)
    cr[:na, :na] = caa
    cr[:na, na:] = kaa
    cr[na:, :na] = kaa
    cr[na:, na:] = np.eye(na) - caa
    cr = 0.5 * (cr + cr.conj().T)

    if not want_kernel:
        s_r = entropy_from_spectrum(_validated_spectrum(np.linalg.eigvalsh(cr)))
        return s_r - (s_a + s_b - s_ab), None

    rr, vr = _eigh(cr)
    s_r = entropy_from_spectrum(rr)
    h_r = _eh_from(rr, vr)
    h00, h01 = h_r[:na, :na], h_r[:na, na:]
    h10, h11 = h_r[na:, :na], h_r[na:, na:]

    n_ab = ab.size
    kernel = np.zeros((n_ab, n_ab), dtype=complex)
    # -K_I
    kernel[np.ix_(pa, pa)] -= _eh_from(ra, va)
    kernel[np.ix_(pb, pb)] -= _eh_from(rb, vb)
    kernel += _eh_from(r, v)
    # +K_R: direct block plus the chain rule through K = sqrt(C(1-C))
    kernel[np.ix_(pa, pa)] += h00 - h11
    g_ext = np.zeros((n_ab, n_ab), dtype=complex)
    g_ext[np.ix_(pa, pa)] = h01 + h10
    w = v.conj().T @ g_ext @ v
    denom = q[:, None] + q[None, :]
    coef = np.zeros_like(denom)
    live = denom > PINNED_TOL
    coef[live] = (1.0 - r[:, None] - r[None, :])[live] / denom[live]
    kernel += v @ (coef * w) @ v.conj().T
    kernel = 0.5 * (kernel + kernel.conj().T)
    return s_r - (s_a + s_b - s_ab), kernel


def descent_generators(
    c: np.ndarray, part: _Partition, tr: np.ndarray | None = None
) -> tuple[float, list[np.ndarray], float]:
    """Current gap, steepest-descent generators per support, gradient norm.

    The generators satisfy dh/dt = -sum ||X_S||_F^2 along the flow
    C -> e^{i t X} C e^{-i t X}.
    """
    h, kernel = gap_and_kernel(c, part, want_kernel=True)
    ab = part.ab
    right = c[:, ab] @ kernel  # = (C K)[:, ab-columns]
    m = np.zeros_like(c)
    m[:, ab] = 1j * right
    m[ab, :] -= 1j * right.conj().T
    gens = []
    sq = 0.0
    for s in part.supports:
        x = -m[np.ix_(s, s)]
        x = 0.5 * (x + x.conj().T)
        if tr is not None:
            x = project_tr(x, tr[np.ix_(s, s)])
        gens.append(x)
        sq += float(np.vdot(x, x).real)
    return h, gens, float(np.sqrt(sq))


def project_tr(x: np.ndarray, s_sub: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto time-reversal-symmetric generators,
    P(X) = (X + S conj(X) S)/2 for the single-particle TR matrix S."""
    return 0.5 * (x + s_sub @ x.conj() @ s_sub)


def apply_generator(c: np.ndarray, mask: np.ndarray, u: np.ndarray):
    """In-place conjugation C -> (1 (+) u) C (1 (+) u)^dag for a block unitary."""
    c[mask, :] = u @ c[mask, :]
    c[:, mask] = c[:, mask] @ u.conj().T


def _unitary(evals: np.ndarray, evecs: np.ndarray, dt: float) -> np.ndarray:
    return (evecs * np.exp(1j * dt * evals)) @ evecs.conj().T


class _LineSearch:
    """Backtrack to a decrease, then golden-section refine the step."""

    GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0

    def __init__(self, cfg: OptimizerConfig, evaluate: Callable[[np.ndarray], float]):
        self.cfg = cfg
        self.evaluate = evaluate
        self.n_evals = 0

    def _trial(self, c, decomps, supports, dt):
        cc = c.copy()
        for s, (lam, p) in zip(supports, decomps):
            apply_generator(cc, s, _unitary(lam, p, dt))
        self.n_evals += 1
        return self.evaluate(cc), cc

    def run(self, c, supports, decomps, h0):
        """Returns (dt, h_new, c_new) or (0, h0, None) when no decrease exists."""
        cfg = self.cfg
        dt = cfg.step_init
        best = None
        for _ in range(cfg.max_backtracks):
            h, cc = self._trial(c, decomps, supports, dt)
            if h < h0 - cfg.accept_drop:
                best = (dt, h, cc)
                break
            dt *= cfg.backtrack_factor
        if best is None:
            return 0.0, h0, None
        # refine on [0, 2*dt]; keep the best evaluated point regardless
        lo, hi = 0.0, 2.0 * best[0]
        x1 = hi - self.GOLDEN * (hi - lo)
        x2 = lo + self.GOLDEN * (hi - lo)
        f1, c1 = self._trial(c, decomps, supports, x1)
        f2, c2 = self._trial(c, decomps, supports, x2)
        if f1 < best[1]:
            best = (x1, f1, c1)
        if f2 < best[1]:
            best = (x2, f2, c2)
        for _ in range(max(cfg.max_bisections - 2, 0)):
            if f1 <= f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - self.GOLDEN * (hi - lo)
                f1, cc = self._trial(c, decomps, supports, x1)
                if f1 < best[1]:
                    best = (x1, f1, cc)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + self.GOLDEN * (hi - lo)
                f2, cc = self._trial(c, decomps, supports, x2)
                if f2 < best[1]:
                    best = (x2, f2, cc)
        return best


def _principal_log(u: np.ndarray) -> np.ndarray:
    g = -1j * sla.logm(u)
    return 0.5 * (g + g.conj().T)


def optimize(
    cov: CovarianceMatrix,
    mask_a,
    mask_b,
    supports: Sequence,
    config: OptimizerConfig = OptimizerConfig(),
    tr: np.ndarray | None = None,
    initial_generators: Sequence[np.ndarray] | None = None,
) -> OptimizationReport:
    """Minimize the Markov gap h(A:B) over unitaries on the given supports.

    ``cov`` lives on the universe of modes; ``mask_a``, ``mask_b`` and each
    support are index arrays into it.  ``tr`` is the single-particle
    time-reversal matrix on the same universe; required when
    ``config.tr_constrained`` and ignored otherwise.  ``initial_generators``
    warm-starts the run by applying exp(i G) per support first.
    """
    part = _Partition(cov.dim, mask_a, mask_b, supports)
    if config.tr_constrained:
        if tr is None:
            raise ConfigError("tr_constrained requires the time-reversal matrix")
        for s in part.supports:
            ss = tr[np.ix_(s, s)]
            if not np.allclose(ss @ ss, -np.eye(s.size)):
                raise ConfigError(
                    "smoother support is not closed under time reversal "
                    "(must contain both layers of every site)"
                )
        tr_sub = tr
    else:
        tr_sub = None
    noise_on = config.noise and not config.tr_constrained
    rng = np.random.default_rng(config.seed)

    c = np.array(cov.mat, dtype=complex)
    totals = [np.eye(s.size, dtype=complex) for s in part.supports]
    if initial_generators is not None:
        if len(initial_generators) != len(part.supports):
            raise ConfigError("one initial generator per support required")
        for i, (s, g) in enumerate(zip(part.supports, initial_generators)):
            if g.shape != (s.size, s.size):
                raise ConfigError("initial generator shape mismatch")
            lam, p = np.linalg.eigh(0.5 * (g + g.conj().T))
            u = _unitary(lam, p, 1.0)
            apply_generator(c, s, u)
            totals[i] = u @ totals[i]

    t_start = time.perf_counter()
    searcher = _LineSearch(config, lambda cc: gap_and_kernel(cc, part, want_kernel=False)[0])

    bare_h, _ = gap_and_kernel(c, part, want_kernel=False)
    best_h = bare_h
    best_totals = [u.copy() for u in totals]

    trace: list[TraceRow] = []
    saddle_events: list[dict] = []
    grad_window: list[float] = []
    amplitude = config.noise_amplitude
    failures = 0
    pending_h_pre: float | None = None
    best_since_kick = np.inf
    noise_this_iter = False
    last_dt = 0.0
    converged = False
    reason = "max_iters"
    it = 0
    gnorm = np.nan

    def inject_noise():
        nonlocal best_since_kick, pending_h_pre, noise_this_iter
        blocks = []
        for s in part.supports:
            g = rng.normal(size=(s.size, s.size)) + 1j * rng.normal(size=(s.size, s.size))
            blocks.append(0.5 * (g + g.conj().T))
        total = np.sqrt(sum(float(np.vdot(b, b).real) for b in blocks))
        for s, b, i in zip(part.supports, blocks, range(len(blocks))):
            b *= amplitude / total
            lam, p = np.linalg.eigh(b)
            u = _unitary(lam, p, 1.0)
            apply_generator(c, s, u)
            totals[i] = u @ totals[i]
        noise_this_iter = True

    def handle_trigger(kind: str, h_now: float) -> bool:
        """Returns True when the loop should stop."""
        nonlocal failures, amplitude, pending_h_pre, best_since_kick, grad_window
        if pending_h_pre is not None:
            escaped = best_since_kick < pending_h_pre - max(1e-9, ESCAPE_RTOL * abs(pending_h_pre))
            if escaped:
                failures = 0
                amplitude *= 0.5
            else:
                failures += 1
        if failures >= config.noise_max_failures:
            return True
        saddle_events.append(
            {"iteration": it, "h": h_now, "kind": kind, "amplitude": amplitude}
        )
        inject_noise()
        pending_h_pre = h_now
        best_since_kick = np.inf
        grad_window = []
        return False

    while it < config.max_iters:
        it += 1
        c = 0.5 * (c + c.conj().T)
        h, gens, gnorm = descent_generators(c, part, tr=tr_sub)
        searcher.n_evals += 1
        best_since_kick = min(best_since_kick, h)
        if h < best_h:
            best_h = h
            best_totals = [u.copy() for u in totals]
        trace.append(TraceRow(it, h, gnorm, last_dt, noise_this_iter))
        noise_this_iter = False

        if gnorm < config.grad_tol:
            if not noise_on:
                converged, reason = True, "gradient"
                break
            if handle_trigger("small_gradient", h):
                converged, reason = True, "noise_exhausted"
                break
            continue

        grad_window.append(gnorm)
        if len(grad_window) > config.plateau_window:
            grad_window.pop(0)
            lo, hi_ = min(grad_window), max(grad_window)
            if hi_ > 0 and (hi_ - lo) / hi_ < config.plateau_rtol:
                if noise_on:
                    if handle_trigger("gradient_plateau", h):
                        converged, reason = gnorm < config.grad_tol, "noise_exhausted"
                        break
                    continue
                converged, reason = False, "plateau"
                break

        decomps = [np.linalg.eigh(x) for x in gens]
        dt, h_new, c_new = searcher.run(c, part.supports, decomps, h)
        if c_new is None:
            if noise_on:
                if handle_trigger("stall", h):
                    converged, reason = gnorm < config.grad_tol, "noise_exhausted"
                    break
                continue
            converged, reason = False, "stalled"
            break
        c = c_new
        last_dt = float(dt)
        for i, (lam, p) in enumerate(decomps):
            totals[i] = _unitary(lam, p, dt) @ totals[i]
        if h_new < best_h:
            best_h = h_new
            best_totals = [u.copy() for u in totals]
        best_since_kick = min(best_since_kick, h_new)
    else:
        # ran out of iterations: the state reached by the last accepted
        # step has not been recorded yet (rows are written at the top of
        # each iteration), so evaluate it once more for the trace
        h, _, gnorm = descent_generators(c, part, tr=tr_sub)
        searcher.n_evals += 1
        if h < best_h:
            best_h = h
            best_totals = [u.copy() for u in totals]
        trace.append(TraceRow(it + 1, h, gnorm, last_dt, noise_this_iter))

    generators = tuple(_principal_log(u) for u in best_totals)
    return OptimizationReport(
        bare_h=bare_h,
        final_h=best_h,
        iterations=it,
        converged=converged,
        reason=reason,
        grad_norm=float(gnorm),
        h_trace=tuple(trace),
        saddle_events=tuple(saddle_events),
        generators=generators,
        n_evaluations=searcher.n_evals,
        wall_time=time.perf_counter() - t_start,
        config=config,
    )
