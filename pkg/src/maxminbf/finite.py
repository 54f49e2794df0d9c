"""Exact finite-system max-min solver and its verification oracles."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coupling import (
    ExtendedCouplingMatrix,
    build_gain,
    dual_sinr,
    extended_matrix,
    mvdr_matrix,
    primal_sinr,
)
from .model import (
    BeamformingMatrix,
    ChannelRealization,
    NetworkConfig,
    PowerVector,
    as_power_array,
)


class ConvergenceError(RuntimeError):
    """An iteration hit its cap before meeting the residual target."""


@dataclass
class IterationRecord:
    iteration: int
    p: np.ndarray
    q: np.ndarray
    wsinr: np.ndarray
    residual_p: float
    residual_q: float

    @property
    def wsinr_min(self) -> float:
        return float(np.min(self.wsinr))

    @property
    def wsinr_max(self) -> float:
        return float(np.max(self.wsinr))


@dataclass
class SolveResult:
    p_star: PowerVector
    q_star: PowerVector
    u_star: BeamformingMatrix
    tau_star: float
    trace: list[IterationRecord]
    iterations: int
    converged: bool


@dataclass(frozen=True)
class PerronPair:
    rho: float
    x: np.ndarray
    y: np.ndarray
    residual: float


@dataclass(frozen=True)
class OptimalityReport:
    equalization_gap: float
    primal_tightness_gap: float
    dual_tightness_gap: float
    eigen_residual: float
    tau_vs_rho_primal: float
    tau_vs_rho_dual: float
    primal_dual_gap: float
    tol: float

    @property
    def all_ok(self) -> bool:
        return max(
            self.equalization_gap,
            self.primal_tightness_gap,
            self.dual_tightness_gap,
            self.eigen_residual,
            self.tau_vs_rho_primal,
            self.tau_vs_rho_dual,
            self.primal_dual_gap,
        ) <= self.tol


def _rel_change(new: np.ndarray, old: np.ndarray) -> float:
    return float(np.max(np.abs(new - old) / np.maximum(np.abs(old), 1e-300)))


def algorithm_a(channels: ChannelRealization, config: NetworkConfig,
                init: tuple | None = None) -> SolveResult:
    """Alternating dual power / beamformer / primal power fixed point.

    Per sweep: scale the dual powers by priority over dual SINR and
    renormalize onto the dual budget, refresh the MVDR beamformers from the
    new dual powers, then scale the primal powers by priority over the primal
    SINR (evaluated with the fresh beamformers) and renormalize onto the
    primal budget. Stops when both powers and the weighted-SINR spread settle
    below ``config.tol``.
    """
    JK, N = config.n_streams, config.N
    if init is not None:
        p, q, U = init
        p = as_power_array(p).copy()
        q = as_power_array(q).copy()
        if not isinstance(U, BeamformingMatrix):
            U = BeamformingMatrix(u=np.asarray(U, dtype=complex))
        if config.w @ p / N > config.p_bar * (1 + 1e-12):
            raise ValueError("initial primal power violates the budget")
        if config.sigma @ q / N > config.p_bar * (1 + 1e-12):
            raise ValueError("initial dual power violates the budget")
    else:
        p = np.full(JK, N * config.p_bar / np.sum(config.w))
        q = np.full(JK, N * config.p_bar / np.sum(config.sigma))
        matched = np.empty((JK, N), dtype=complex)
        for m in range(JK):
            h = channels.vectors[m // config.K, m]
            matched[m] = h / np.linalg.norm(h)
        U = BeamformingMatrix(u=matched)

    trace: list[IterationRecord] = []
    converged = False
    it = 0
    for it in range(1, config.max_iter + 1):
        gm = build_gain(channels, U)
        gdn = dual_sinr(q, gm, config)
        q_new = (config.beta / gdn) * q
        q_new *= N * config.p_bar / (config.sigma @ q_new)

        U = mvdr_matrix(channels, q_new, config)
        gm = build_gain(channels, U)
        gpn = primal_sinr(p, gm, config)
        p_new = (config.beta / gpn) * p
        p_new *= N * config.p_bar / (config.w @ p_new)

        res_p = _rel_change(p_new, p)
        res_q = _rel_change(q_new, q)
        p, q = p_new, q_new

        wsinr = primal_sinr(p, gm, config) / config.beta
        trace.append(IterationRecord(it, p.copy(), q.copy(), wsinr, res_p, res_q))
        spread = float((np.max(wsinr) - np.min(wsinr)) / np.min(wsinr))
        if res_p < config.tol and res_q < config.tol and spread < config.tol:
            converged = True
            break

    gm = build_gain(channels, U)
    tau_star = float(np.min(primal_sinr(p, gm, config) / config.beta))
    return SolveResult(
        p_star=PowerVector(p, kind="primal"),
        q_star=PowerVector(q, kind="dual"),
        u_star=U,
        tau_star=tau_star,
        trace=trace,
        iterations=it,
        converged=converged,
    )


def perron_pair(B: ExtendedCouplingMatrix | np.ndarray, tol: float = 1e-12,
                max_iter: int = 200_000) -> PerronPair:
    """Spectral radius with positive right/left eigenvectors by power iteration.

    Vectors are returned normalized to unit 1-norm; the residual is the
    relative infinity-norm eigen-equation defect of the right vector.
    """
    mat = B.b_mat if isinstance(B, ExtendedCouplingMatrix) else np.asarray(B, float)
    if np.any(mat < 0):
        raise ValueError("matrix must be entrywise nonnegative")

    def iterate(A):
        v = np.full(A.shape[0], 1.0 / A.shape[0])
        rho = 0.0
        for _ in range(max_iter):
            Av = A @ v
            rho = float(np.max(Av))
            if rho <= 0:
                raise ConvergenceError("power iteration collapsed to zero")
            v_new = Av / rho
            res = float(np.max(np.abs(A @ v_new - rho * v_new)) / rho)
            if res <= tol:
                v = v_new
                break
            v = v_new
        else:
            raise ConvergenceError(
                f"power iteration did not converge (residual {res:.3e})")
        return rho, v / np.sum(v)

    rho, x = iterate(mat)
    _, y = iterate(mat.T)
    residual = float(np.max(np.abs(mat @ x - rho * x)) / rho)
    return PerronPair(rho=rho, x=x, y=y, residual=residual)


def verify_optimality(result: SolveResult, channels: ChannelRealization,
                      config: NetworkConfig, tol: float = 1e-6) -> OptimalityReport:
    """Cross-check a converged solve against every optimality condition."""
    p = result.p_star.values
    q = result.q_star.values
    N = config.N
    gm = build_gain(channels, result.u_star)

    wsinr = primal_sinr(p, gm, config) / config.beta
    equalization = float((np.max(wsinr) - np.min(wsinr)) / np.min(wsinr))
    primal_tight = float(abs(config.w @ p / N - config.p_bar) / config.p_bar)
    dual_tight = float(abs(config.sigma @ q / N - config.p_bar) / config.p_bar)

    B = extended_matrix(gm, config, "primal")
    Bd = extended_matrix(gm, config, "dual")
    v = p / N
    eigen_residual = float(
        np.max(np.abs(B.b_mat @ v - v / result.tau_star)) /
        np.max(v / result.tau_star))

    pp = perron_pair(B, tol=1e-13)
    pd = perron_pair(Bd, tol=1e-13)
    tau_vs_rho_primal = float(abs(result.tau_star - 1.0 / pp.rho) * pp.rho)
    tau_vs_rho_dual = float(abs(result.tau_star - 1.0 / pd.rho) * pd.rho)

    tau_dual = float(np.min(dual_sinr(q, gm, config) / config.beta))
    primal_dual_gap = float(abs(tau_dual - result.tau_star) / result.tau_star)

    return OptimalityReport(
        equalization_gap=equalization,
        primal_tightness_gap=primal_tight,
        dual_tightness_gap=dual_tight,
        eigen_residual=eigen_residual,
        tau_vs_rho_primal=tau_vs_rho_primal,
        tau_vs_rho_dual=tau_vs_rho_dual,
        primal_dual_gap=primal_dual_gap,
        tol=tol,
    )


def _min_weighted_sinr(G: np.ndarray, p: np.ndarray,
                       config: NetworkConfig) -> float:
    F = G.copy()
    np.fill_diagonal(F, 0.0)
    sinr = (p / config.N) * np.diagonal(G) / (F @ p / config.N + config.sigma)
    return float(np.min(sinr / config.beta))


_BF_POWER_GRID = 32
_BF_BLOCK = 512


def brute_force_maxmin(channels: ChannelRealization, config: NetworkConfig,
                       budget: int, seed: int = 0) -> float:
    """Random-search lower bound on the optimal weighted SINR.

    Searches unit beamformers (uniform on the complex sphere, with local
    refinement stages around the incumbent once enough global draws have been
    seen) against a fixed grid of powers on the tight weighted-budget simplex.
    ``budget`` counts (beamformer, power) evaluations; the evaluation sequence
    for a smaller budget is an exact prefix of that for a larger one, so the
    returned best-so-far value is non-decreasing in the budget for a fixed
    seed. Guarded to tiny instances; independent of the fixed-point and
    eigenvalue machinery it serves as an oracle for.
    """
    JK, N = config.n_streams, config.N
    if JK > 3 or N > 2:
        raise ValueError("brute force is guarded to JK <= 3 and N <= 2")
    if budget < 1:
        raise ValueError("budget must be positive")
    rng = np.random.default_rng(seed)
    budget_scale = N * config.p_bar

    # global tight-budget power grid: (1/N) w^T p = p_bar on the simplex
    if JK == 1:
        global_fracs = np.ones((1, 1))
    else:
        global_fracs = rng.dirichlet(np.ones(JK), size=_BF_POWER_GRID)
        global_fracs[0] = np.full(JK, 1.0 / JK)  # always cover the center
    n_p = global_fracs.shape[0]

    diag_idx = np.arange(JK)
    sigma = config.sigma

    def evaluate(U_blk, P_blk):
        """Best min-weighted-SINR over draws x per-draw power points."""
        B = U_blk.shape[0]
        G = np.empty((B, JK, JK))
        for n in range(JK):
            j = n // config.K
            proj = channels.vectors[j].conj() @ U_blk[:, n, :].T  # (JK, B)
            G[:, :, n] = (np.abs(proj) ** 2).T
        F = G.copy()
        F[:, diag_idx, diag_idx] = 0.0
        interf = np.einsum("bmn,bgn->bgm", F, P_blk) / N
        signal = (P_blk / N) * G[:, diag_idx, diag_idx][:, None, :]
        wsinr = signal / (interf + sigma[None, None, :]) / config.beta
        per_draw = wsinr.min(axis=2)       # (B, n_powers): worst user
        flat = int(np.argmax(per_draw))
        b, g = divmod(flat, per_draw.shape[1])
        return float(per_draw[b, g]), b, g

    # shrinking search radii keyed to the absolute draw index so that the
    # sample sequence is budget-independent
    def radius_at(draw_idx):
        if draw_idx < 4096:
            return None
        if draw_idx < 16384:
            return 0.3
        if draw_idx < 28672:
            return 0.05
        return 0.01

    best = -np.inf
    best_u = None
    best_frac = global_fracs[0]
    done = 0
    draw_idx = 0
    while done < budget:
        # always generate full blocks so the random stream position (and
        # hence every sample) is independent of the budget
        raw = (rng.standard_normal((_BF_BLOCK, JK, N)) +
               1j * rng.standard_normal((_BF_BLOCK, JK, N)))
        p_noise = rng.standard_normal((_BF_BLOCK, n_p, JK))
        radius = radius_at(draw_idx)
        if radius is not None and best_u is not None:
            raw = best_u[None, :, :] + radius * raw
            # half the power points stay global, half perturb the incumbent
            fracs = np.broadcast_to(global_fracs,
                                    (_BF_BLOCK, n_p, JK)).copy()
            half = n_p // 2
            if half and JK > 1:
                local = best_frac[None, None, :] * np.exp(
                    radius * p_noise[:, half:, :])
                fracs[:, half:, :] = local / local.sum(axis=2, keepdims=True)
        else:
            fracs = np.broadcast_to(global_fracs, (_BF_BLOCK, n_p, JK))
        P_blk = fracs * budget_scale / config.w[None, None, :]
        U_blk = raw / np.linalg.norm(raw, axis=2, keepdims=True)

        remaining = budget - done
        if remaining >= _BF_BLOCK * n_p:
            val, b, g = evaluate(U_blk, P_blk)
            done += _BF_BLOCK * n_p
        else:
            # partial tail: full power set for the first draws, then the
            # leading power points for the last one
            full = remaining // n_p
            val, b, g = -np.inf, 0, 0
            if full:
                val, b, g = evaluate(U_blk[:full], P_blk[:full])
            leftover = remaining - full * n_p
            if leftover:
                v2, _, g2 = evaluate(U_blk[full:full + 1],
                                     P_blk[full:full + 1, :leftover])
                if v2 > val:
                    val, b, g = v2, full, g2
            done = budget
        if val > best:
            best = val
            best_u = U_blk[b].copy()
            best_frac = np.asarray(fracs[b, g]).copy()
        draw_idx += _BF_BLOCK
    return best
