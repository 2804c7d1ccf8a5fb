//! Reference designs: the fully digital energy-efficiency upper bound, hybrid
//! reconstruction of a fully digital precoder for a fixed connection pattern,
//! and the greedy switch-off heuristic built on both.
//!
//! The fully digital precoder `U` (`N_T × K`) is optimized for the
//! transmit-power efficiency `η̃(U) = Σ_k R_k(U) / ‖U‖²_F` under the
//! per-antenna caps. Its rate then bounds the hybrid energy efficiency once
//! the hardware power of a connection pattern is added to the denominator.

use crate::linalg::{fro2, pinv, psd_solve, unit_phase};
use crate::model::{
    gca_count, mw_to_w, per_antenna_power, see, sparsity_power, ChannelMatrix, HybridPrecoder, MappingMatrix,
    PowerParams, SystemDims, Tolerances,
};
use crate::error::dim_err;
use crate::{CMat, CVec, Error, Result, C64};

/// Iteration cap of the fully digital ascent.
pub const FDP_MAX_ITER: usize = 500;
/// Default number of reconstruction alternations.
pub const RECON_ITERS: usize = 30;
/// Reconstruction stops early when the residual changes by less than this
/// fraction of `‖U‖²_F`.
pub const RECON_TOL: f64 = 1e-6;
const GRID_POINTS: usize = 21;
const GOLDEN_ITERS: usize = 40;
const PGD_ITERS: usize = 20;

/// Fully digital precoder, one column per user.
#[derive(Debug, Clone, PartialEq)]
pub struct FdpMatrix {
    pub u: CMat,
}

impl FdpMatrix {
    /// Checks the per-antenna caps (with a 1e-9 mW slack).
    pub fn new(u: CMat, params: &PowerParams) -> Result<Self> {
        if u.nrows() != params.p_max_per_antenna.len() {
            return Err(dim_err("precoder rows differ from the cap vector"));
        }
        if !fdp_feasible(&u, params, 1e-9) {
            return Err(Error::InvalidInput("per-antenna cap exceeded".into()));
        }
        Ok(Self { u })
    }

    pub fn transmit_power(&self) -> f64 {
        fro2(&self.u)
    }
}

fn fdp_feasible(u: &CMat, params: &PowerParams, slack: f64) -> bool {
    u.row_iter()
        .zip(&params.p_max_per_antenna)
        .all(|(row, cap)| row.iter().map(|z| z.norm_sqr()).sum::<f64>() <= cap + slack)
}

fn check_fdp_dims(u: &CMat, h: &ChannelMatrix) -> Result<()> {
    if u.shape() != h.h.shape() {
        return Err(dim_err(format!("U is {:?}, channel is {:?}", u.shape(), h.h.shape())));
    }
    Ok(())
}

/// `(p_k, m_k)` per user: desired power `|h_kᴴu_k|²` and total received
/// power plus noise.
fn received(u: &CMat, h: &ChannelMatrix, sigma2: f64) -> Vec<(f64, f64)> {
    let g = h.h.adjoint() * u;
    (0..g.nrows())
        .map(|k| {
            let total: f64 = g.row(k).iter().map(|z| z.norm_sqr()).sum();
            (g[(k, k)].norm_sqr(), total + sigma2)
        })
        .collect()
}

/// Per-user rates `R_k(U)` in nats/s/Hz.
pub fn fdp_rates(u: &CMat, h: &ChannelMatrix, sigma2: f64) -> Result<Vec<f64>> {
    check_fdp_dims(u, h)?;
    Ok(received(u, h, sigma2).into_iter().map(|(p, m)| (m / (m - p)).ln()).collect())
}

/// `η̃(U) = Σ_k R_k / ‖U‖²_F` in nats/Hz/mW; zero for `U = 0`.
pub fn eta_tilde(u: &CMat, h: &ChannelMatrix, sigma2: f64) -> Result<f64> {
    let r: f64 = fdp_rates(u, h, sigma2)?.iter().sum();
    let pt = fro2(u);
    Ok(if pt > 0.0 { r / pt } else { 0.0 })
}

/// Matrices of the zero-gradient condition `Φ_k u_k = Υ_k u_k`.
#[derive(Debug, Clone)]
pub struct GradientTerms {
    pub upsilon: Vec<CMat>,
    pub phi: Vec<CMat>,
    /// `‖U‖²_F`.
    pub p_t: f64,
}

/// `Υ_k = P_T h_k h_kᴴ / m_k` and
/// `Φ_k = (Σ_j R_j) I + P_T Σ_{j≠k} p_j h_j h_jᴴ / (m_j (m_j − p_j))`.
pub fn fdp_gradient_terms(u: &CMat, h: &ChannelMatrix, sigma2: f64) -> Result<GradientTerms> {
    check_fdp_dims(u, h)?;
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidInput("noise power must be > 0".into()));
    }
    let n = u.nrows();
    let k_users = u.ncols();
    let pm = received(u, h, sigma2);
    let rate: f64 = pm.iter().map(|&(p, m)| (m / (m - p)).ln()).sum();
    let p_t = fro2(u);
    let outer: Vec<CMat> = (0..k_users).map(|k| { let hk = h.h.column(k); hk * hk.adjoint() }).collect();
    let mut upsilon = Vec::with_capacity(k_users);
    let mut phi = Vec::with_capacity(k_users);
    for k in 0..k_users {
        upsilon.push(outer[k].scale(p_t / pm[k].1));
        let mut f = CMat::identity(n, n).scale(rate);
        for (j, &(p, m)) in pm.iter().enumerate() {
            if j != k {
                f += outer[j].scale(p_t * p / (m * (m - p)));
            }
        }
        phi.push(f);
    }
    Ok(GradientTerms { upsilon, phi, p_t })
}

/// Gradient of `η̃`: column `k` is `∂η̃/∂Re u_k + i ∂η̃/∂Im u_k
/// = 2 (Υ_k − Φ_k) u_k / P_T²`.
pub fn eta_tilde_gradient(u: &CMat, h: &ChannelMatrix, sigma2: f64) -> Result<CMat> {
    let terms = fdp_gradient_terms(u, h, sigma2)?;
    if !(terms.p_t > 0.0) {
        return Err(Error::InvalidInput("gradient undefined at U = 0".into()));
    }
    let mut g = CMat::zeros(u.nrows(), u.ncols());
    for k in 0..u.ncols() {
        let col = (&terms.upsilon[k] - &terms.phi[k]) * u.column(k);
        g.set_column(k, &col.scale(2.0 / (terms.p_t * terms.p_t)));
    }
    Ok(g)
}

/// Output of the fully digital ascent.
#[derive(Debug, Clone)]
pub struct FdpUpper {
    pub u: FdpMatrix,
    pub eta_tilde: f64,
    /// `Σ_k R_k(U)` in nats/s/Hz.
    pub sum_rate: f64,
    /// `η̃` after every iteration, starting with the initial point.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Matched filter `u_k ∝ h_k`, scaled so the tightest antenna meets its cap.
pub fn matched_filter_start(h: &ChannelMatrix, params: &PowerParams) -> Result<CMat> {
    let mut u = h.h.clone();
    for mut col in u.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col.unscale_mut(nrm);
        }
    }
    let scale = u
        .row_iter()
        .zip(&params.p_max_per_antenna)
        .map(|(row, cap)| (row.iter().map(|z| z.norm_sqr()).sum::<f64>(), cap))
        .filter(|(p, _)| *p > 0.0)
        .map(|(p, cap)| (cap / p).sqrt())
        .fold(f64::INFINITY, f64::min);
    if !scale.is_finite() {
        return Err(Error::InvalidInput("channel is identically zero".into()));
    }
    Ok(u.scale(scale))
}

/// Maximizes `η̃` under the per-antenna caps from the matched-filter start.
pub fn run_fdp_upper(
    h: &ChannelMatrix,
    dims: &SystemDims,
    params: &PowerParams,
    sigma2: f64,
    tau_up: f64,
) -> Result<FdpUpper> {
    let start = matched_filter_start(h, params)?;
    run_fdp_upper_from(h, dims, params, sigma2, tau_up, FDP_MAX_ITER, start)
}

/// As [`run_fdp_upper`] from a given feasible start. Each iteration moves
/// user by user along `(Φ_k⁻¹Υ_k − I) u_k`, all directions taken at the
/// iterate, with a step in `[0, 1]` from a 21-point grid refined by golden
/// section. Steps that break a cap are discarded. Stops when `η̃` changes
/// by at most `tau_up · η̃`, when no step improves, or after
/// `max_iter` iterations.
pub fn run_fdp_upper_from(
    h: &ChannelMatrix,
    dims: &SystemDims,
    params: &PowerParams,
    sigma2: f64,
    tau_up: f64,
    max_iter: usize,
    start: CMat,
) -> Result<FdpUpper> {
    dims.validate()?;
    params.validate(dims)?;
    if h.n_tx() != dims.n_tx || h.n_users() != dims.n_users {
        return Err(dim_err("channel shape differs from dims"));
    }
    if !(tau_up > 0.0) {
        return Err(Error::InvalidInput("tau_up must be > 0".into()));
    }
    let mut u = FdpMatrix::new(start, params)?.u;
    let mut eta = eta_tilde(&u, h, sigma2)?;
    let mut trace = vec![eta];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let terms = fdp_gradient_terms(&u, h, sigma2)?;
        let dirs: Vec<CVec> = (0..dims.n_users)
            .map(|k| {
                let uk = u.column(k).into_owned();
                let target = psd_solve(&terms.phi[k], &(&terms.upsilon[k] * &uk)).unwrap_or_else(|| uk.clone());
                target - uk
            })
            .collect();
        let before = eta;
        for (k, d) in dirs.iter().enumerate() {
            if d.norm() == 0.0 {
                continue;
            }
            let base = u.column(k).into_owned();
            let value = |mu: f64| -> f64 {
                let mut cand = u.clone();
                cand.set_column(k, &(&base + d.scale(mu)));
                if !fdp_feasible(&cand, params, 0.0) {
                    return f64::NEG_INFINITY;
                }
                eta_tilde(&cand, h, sigma2).unwrap_or(f64::NEG_INFINITY)
            };
            let mu = line_search(value);
            if mu.1 > eta {
                eta = mu.1;
                u.set_column(k, &(&base + d.scale(mu.0)));
            }
        }
        trace.push(eta);
        if eta <= before || (eta - before).abs() <= tau_up * eta.abs() {
            converged = true;
            break;
        }
    }
    let sum_rate = fdp_rates(&u, h, sigma2)?.iter().sum();
    Ok(FdpUpper { u: FdpMatrix { u }, eta_tilde: eta, sum_rate, trace, iterations, converged })
}

/// Maximizes `f` on `[0, 1]`: uniform grid, then golden section on the
/// interval around the best grid point. Returns `(μ, f(μ))`; `μ = 0` is
/// always a candidate.
fn line_search(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let step = 1.0 / (GRID_POINTS - 1) as f64;
    let mut best = (0.0, f(0.0));
    let mut best_i = 0;
    for i in 1..GRID_POINTS {
        let mu = i as f64 * step;
        let v = f(mu);
        if v > best.1 {
            best = (mu, v);
            best_i = i;
        }
    }
    let mut lo = best_i.saturating_sub(1) as f64 * step;
    let mut hi = ((best_i + 1).min(GRID_POINTS - 1)) as f64 * step;
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// `η̄ = R(U) / (P_cons + P̄_spr(B) + (1 + 1/ρ_pa) ‖U‖²_F)` in nats/Hz/W.
pub fn upper_bound_see(fdp: &FdpUpper, b: &MappingMatrix, dims: &SystemDims, params: &PowerParams) -> Result<f64> {
    if b.n_tx() != dims.n_tx || b.n_rf() != dims.n_rf {
        return Err(dim_err("mapping matrix shape differs from dims"));
    }
    let m_gca = gca_count(dims, params);
    let p = params.p_cons(dims) + sparsity_power(b, params, m_gca) + params.pa_factor() * fdp.u.transmit_power();
    Ok(fdp.sum_rate / mw_to_w(p))
}

/// Hybrid precoder fitted to a fully digital one.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub precoder: HybridPrecoder,
    /// `‖U − A W‖²_F` before scaling, after every alternation.
    pub residual_trace: Vec<f64>,
    /// Scalar applied to `W` to meet the caps (`≤ 1`).
    pub beta: f64,
    /// `true` when `B` has no active entry and the zero precoder is returned.
    pub empty_pattern: bool,
}

/// Initial analog matrix on the entries allowed by `B`: phases of the left
/// singular vectors of `U`, then DFT columns once those run out.
fn initial_analog(u: &CMat, b: &MappingMatrix) -> CMat {
    let svd = u.clone().svd(true, false);
    let left = svd.u.unwrap_or_else(|| CMat::identity(u.nrows(), u.ncols()));
    let one = C64::new(1.0, 0.0);
    let n_tx = b.n_tx() as f64;
    CMat::from_fn(b.n_tx(), b.n_rf(), |t, n| {
        if !b.get(t, n) {
            return C64::new(0.0, 0.0);
        }
        if n < left.ncols() {
            unit_phase(left[(t, n)], one)
        } else {
            C64::from_polar(1.0, std::f64::consts::TAU * (t * n) as f64 / n_tx)
        }
    })
}

fn residual(u: &CMat, a: &CMat, w: &CMat) -> f64 {
    fro2(&(u - a * w))
}

/// Projected gradient steps on `‖U − A W‖²_F` over `a_t^n = b_t^n e^{jθ}`
/// with backtracking; only decreasing steps are taken.
fn analog_pgd(u: &CMat, w: &CMat, a: &CMat, b: &MappingMatrix) -> CMat {
    let mask = b.as_f64();
    let project = |m: &CMat| {
        CMat::from_fn(m.nrows(), m.ncols(), |t, n| {
            if mask[(t, n)] > 0.0 {
                unit_phase(m[(t, n)], C64::new(1.0, 0.0))
            } else {
                C64::new(0.0, 0.0)
            }
        })
    };
    let ww = w * w.adjoint();
    let lip = ww.iter().map(|z| z.norm()).sum::<f64>().max(f64::MIN_POSITIVE);
    let mut a = a.clone();
    let mut f = residual(u, &a, w);
    for _ in 0..PGD_ITERS {
        let grad = (&a * &ww) - u * w.adjoint();
        let mut step = 4.0 / lip;
        let mut moved = false;
        for _ in 0..30 {
            let cand = project(&(&a - grad.scale(step)));
            let fc = residual(u, &cand, w);
            if fc < f {
                a = cand;
                f = fc;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    a
}

/// Alternates `W = A⁺U` and a phase-projected gradient step on `A` for the
/// pattern `B`, then scales `W` by one scalar `β` so every antenna meets its
/// cap. Stops after `iters` alternations or when the residual changes by
/// less than `RECON_TOL · ‖U‖²_F`.
pub fn reconstruct_hp(u: &CMat, b: &MappingMatrix, params: &PowerParams, iters: usize) -> Result<Reconstruction> {
    if b.n_tx() != u.nrows() {
        return Err(dim_err("mapping matrix rows differ from U"));
    }
    if params.p_max_per_antenna.len() != u.nrows() {
        return Err(dim_err("cap vector length differs from N_T"));
    }
    let (n_tx, n_rf, k_users) = (u.nrows(), b.n_rf(), u.ncols());
    if b.active_entries() == 0 {
        let precoder = HybridPrecoder::new(CMat::zeros(n_rf, k_users), CMat::zeros(n_tx, n_rf))?;
        return Ok(Reconstruction { precoder, residual_trace: vec![fro2(u)], beta: 1.0, empty_pattern: true });
    }
    let scale = fro2(u).max(f64::MIN_POSITIVE);
    let mut a = initial_analog(u, b);
    let mut w = pinv(&a) * u;
    let mut trace = vec![residual(u, &a, &w)];
    for _ in 0..iters {
        a = analog_pgd(u, &w, &a, b);
        let w_ls = pinv(&a) * u;
        // pinv can lose accuracy on nearly rank-deficient A; keep the better W.
        if residual(u, &a, &w_ls) <= residual(u, &a, &w) {
            w = w_ls;
        }
        let r = residual(u, &a, &w);
        let prev = *trace.last().unwrap_or(&r);
        trace.push(r);
        if (prev - r).abs() < RECON_TOL * scale {
            break;
        }
    }
    let p = per_antenna_power(&w, &a)?;
    let beta = p
        .iter()
        .zip(&params.p_max_per_antenna)
        .filter(|(pt, _)| **pt > 0.0)
        .map(|(pt, cap)| (cap / pt).sqrt())
        .fold(1.0, f64::min);
    let precoder = HybridPrecoder::new(w.scale(beta), a)?;
    Ok(Reconstruction { precoder, residual_trace: trace, beta, empty_pattern: false })
}

/// Output of the greedy switch-off heuristic.
#[derive(Debug, Clone)]
pub struct HeuristicResult {
    pub precoder: HybridPrecoder,
    pub mapping: MappingMatrix,
    /// Energy efficiency of `precoder` in nats/Hz/W.
    pub see: f64,
    /// Best energy efficiency after every round.
    pub see_trace: Vec<f64>,
    /// Connections switched off.
    pub deactivated: usize,
    pub rounds: usize,
    pub fdp: FdpUpper,
}

/// Greedy switch-off: from `B = 1`, reconstruct `(W, A)` from `U`, evaluate
/// the energy efficiency with each active connection zeroed in `A` (same
/// `W`), and switch off the best one if it strictly improves. Ties go to the
/// lowest `(t, n)`. Candidates that break a cap are skipped. The best
/// reconstructed precoder across rounds is returned.
pub fn run_heuristic(
    h: &ChannelMatrix,
    dims: &SystemDims,
    params: &PowerParams,
    sigma2: f64,
    tolerances: &Tolerances,
) -> Result<HeuristicResult> {
    let fdp = run_fdp_upper(h, dims, params, sigma2, tolerances.tau_up)?;
    heuristic_from(&fdp, h, dims, params, sigma2)
}

/// As [`run_heuristic`] with a precomputed fully digital precoder.
pub fn heuristic_from(
    fdp: &FdpUpper,
    h: &ChannelMatrix,
    dims: &SystemDims,
    params: &PowerParams,
    sigma2: f64,
) -> Result<HeuristicResult> {
    let mut b = MappingMatrix::ones(dims.n_tx, dims.n_rf);
    let mut best: Option<(HybridPrecoder, MappingMatrix, f64)> = None;
    let mut see_trace = Vec::new();
    let mut rounds = 0;
    let mut deactivated = 0;
    loop {
        rounds += 1;
        let rec = reconstruct_hp(&fdp.u.u, &b, params, RECON_ITERS)?;
        let (w, a) = (rec.precoder.w.clone(), rec.precoder.a.clone());
        let current = see(&w, &a, h, dims, params, sigma2)?;
        if best.as_ref().is_none_or(|bst| current > bst.2) {
            best = Some((rec.precoder, b.clone(), current));
        }
        see_trace.push(best.as_ref().map_or(current, |bst| bst.2));
        let mut pick: Option<(usize, usize, f64)> = None;
        for t in 0..dims.n_tx {
            for n in 0..dims.n_rf {
                if !b.get(t, n) {
                    continue;
                }
                let mut cand = a.clone();
                cand[(t, n)] = C64::new(0.0, 0.0);
                let p = per_antenna_power(&w, &cand)?;
                if p.iter().zip(&params.p_max_per_antenna).any(|(pt, cap)| *pt > cap + crate::model::POWER_TOL) {
                    continue;
                }
                let v = see(&w, &cand, h, dims, params, sigma2)?;
                if pick.is_none_or(|(_, _, pv)| v > pv) {
                    pick = Some((t, n, v));
                }
            }
        }
        match pick {
            Some((t, n, v)) if v > current => {
                b.set(t, n, false);
                deactivated += 1;
            }
            _ => break,
        }
    }
    let (precoder, mapping, see_best) = best.expect("at least one round runs");
    Ok(HeuristicResult { precoder, mapping, see: see_best, see_trace, deactivated, rounds, fdp: fdp.clone() })
}
