//! Reweighted-ℓ1 weighted-MMSE solver for the rate-minus-priced-power
//! problem `max R − η·P_tot` at a fixed price `η` (nats/Hz/W).
//!
//! The solver works on a working analog matrix `Ã` with `|ã| ≤ 1`. Each sweep
//! freezes the majorization weights `ψ, φ, ϕ` at the current `Ã`; the analog
//! precoder seen by the rate and power terms is `√Ψ ⊙ Ã`, and the
//! connection-dependent power is priced through `Σ D_t^n ψ_t^n |ã_t^n|²` with
//! `D_t^n = P_PS ψ_t^n + P_GCA ϕ_t + (P_DAC + P_RFC) φ_n`. A sweep updates the
//! MMSE receivers `δ`, the MSE weights `ω`, the digital precoder user by user
//! and the analog precoder antenna by antenna, each block by an exact QCQP
//! minimization of the frozen surrogate. Each column of the new `Ã` is then
//! rescaled to unit peak modulus.
//!
//! The relaxed analog precoder of a working point is
//! `E(Ã)`, `E(ã) = ã/√(|ã|²+ε)`, whose entries are close to 0 or to unit
//! modulus. Working entries whose relaxed modulus² falls to the rounding
//! threshold are set to zero after each sweep. The reported objective is
//! `−κ(R − η·P_tot)` at `(W, E(Ã))`, tracked as a running best; the best
//! iterate is returned.
//!
//! The channel is divided by `σ` internally so that the noise power is 1.

use nalgebra::{DMatrix, DVector};

use crate::error::dim_err;
use crate::model::{
    gca_count, mapping_from_analog, mw_to_w, per_antenna_power, sinrs_from_gains, total_power, transmit_power,
    ChannelMatrix, HybridPrecoder, PowerParams, SystemDims, Tolerances,
};
use crate::qcqp::{solve_qcqp_warm, QcqpError, QcqpProblem};
use crate::{CMat, CVec, Error, Result, C64};

/// Maximum number of sweeps per run.
pub const DEFAULT_MAX_SWEEPS: usize = 200;
const QCQP_TOL: f64 = 1e-7;
const QCQP_MAX_ITER: usize = 60;
const PATIENCE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationWeights {
    pub psi: DMatrix<f64>,
    pub phi: DVector<f64>,
    pub varphi: DVector<f64>,
}

/// Weights `ψ = 1/(|a|²+ε)`, `φ_n = 1/(c_n+ε)`, `ϕ_t = 1/(r_t+ε)` with
/// column sums `c_n` and row sums `r_t` of `|a|²`.
pub fn update_weights(a_prev: &CMat, eps: f64) -> MajorizationWeights {
    let mag = a_prev.map(|z| z.norm_sqr());
    let psi = mag.map(|x| 1.0 / (x + eps));
    let phi = DVector::from_iterator(mag.ncols(), mag.column_iter().map(|c| 1.0 / (c.sum() + eps)));
    let varphi = DVector::from_iterator(mag.nrows(), mag.row_iter().map(|r| 1.0 / (r.sum() + eps)));
    MajorizationWeights { psi, phi, varphi }
}

/// `√Ψ ⊙ Ã`.
pub fn effective_analog(a_work: &CMat, psi: &DMatrix<f64>) -> CMat {
    a_work.zip_map(psi, |z, p| z * p.sqrt())
}

/// Relaxed analog precoder `E(Ã)` of a working matrix.
pub fn relaxed_analog(a_work: &CMat, eps: f64) -> CMat {
    a_work.map(|z| z / (z.norm_sqr() + eps).sqrt())
}

/// Rescales each column of `Ã` to unit peak modulus.
pub fn normalize_columns(a_work: &CMat) -> CMat {
    let mut a = a_work.clone();
    for mut col in a.column_iter_mut() {
        let m = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if m > 0.0 {
            col.unscale_mut(m);
        }
    }
    a
}

/// Per-entry sparsity price `D_t^n` in mW.
pub fn sparsity_prices(weights: &MajorizationWeights, params: &PowerParams, m_gca: u32) -> DMatrix<f64> {
    let p_gca = params.p_gca(m_gca);
    let p_chain = params.p_dac + params.p_rfc;
    DMatrix::from_fn(weights.psi.nrows(), weights.psi.ncols(), |t, n| {
        params.p_ps * weights.psi[(t, n)] + p_gca * weights.varphi[t] + p_chain * weights.phi[n]
    })
}

/// MMSE receive coefficients `δ_k = conj(h_kᴴAw_k) / (Σ_j |h_kᴴAw_j|² + σ²)`.
pub fn update_receivers(h: &ChannelMatrix, w: &CMat, a: &CMat, sigma2: f64) -> Result<CVec> {
    let g = crate::model::gain_matrix(h, w, a)?;
    Ok(receivers_from_gains(&g, sigma2))
}

fn receivers_from_gains(g: &CMat, sigma2: f64) -> CVec {
    CVec::from_iterator(
        g.nrows(),
        (0..g.nrows()).map(|k| {
            let m: f64 = g.row(k).iter().map(|z| z.norm_sqr()).sum::<f64>() + sigma2;
            g[(k, k)].conj() / m
        }),
    )
}

/// MSE weights `ω_k = 1/e_k = 1 + SINR_k` at the MMSE receiver.
pub fn update_mse_weights(h: &ChannelMatrix, w: &CMat, a: &CMat, sigma2: f64) -> Result<DVector<f64>> {
    let g = crate::model::gain_matrix(h, w, a)?;
    Ok(sinrs_from_gains(&g, sigma2).map(|s| 1.0 + s))
}

/// Mean squared error `E|s_k − δ y_k|²` for an arbitrary receive coefficient.
pub fn mse(g: &CMat, k: usize, delta: C64, sigma2: f64) -> f64 {
    let mut e = (C64::new(1.0, 0.0) - delta * g[(k, k)]).norm_sqr();
    for j in 0..g.ncols() {
        if j != k {
            e += (delta * g[(k, j)]).norm_sqr();
        }
    }
    e + delta.norm_sqr() * sigma2
}

/// State of one inner run.
#[derive(Debug, Clone)]
pub struct WsrpState {
    pub w: CMat,
    /// Working analog matrix `Ã` (row `t` is `ã_tᴴ`).
    pub a: CMat,
    pub delta: CVec,
    pub omega: DVector<f64>,
    pub weights: MajorizationWeights,
    /// Price in nats/Hz/W.
    pub eta: f64,
    pub kappa: f64,
    pub eps: f64,
    pub sigma2: f64,
    pub objective_trace: Vec<f64>,
}

impl WsrpState {
    /// Fresh state at `(W, Ã)` with weights, receivers and MSE weights
    /// computed at that point.
    pub fn new(h: &ChannelMatrix, w: CMat, a: CMat, eta: f64, eps: f64, sigma2: f64) -> Result<Self> {
        let weights = update_weights(&a, eps);
        let a_eff = effective_analog(&a, &weights.psi);
        let delta = update_receivers(h, &w, &a_eff, sigma2)?;
        let omega = update_mse_weights(h, &w, &a_eff, sigma2)?;
        Ok(Self {
            w,
            a,
            delta,
            omega,
            weights,
            eta,
            kappa: (1.0 / eps).ln_1p(),
            eps,
            sigma2,
            objective_trace: Vec::new(),
        })
    }

    pub fn effective_analog(&self) -> CMat {
        effective_analog(&self.a, &self.weights.psi)
    }

    fn eta_mw(&self) -> f64 {
        self.eta * 1e-3
    }

    /// Refreshes `δ` and `ω` at the current `(W, √Ψ ⊙ Ã)`.
    pub fn refresh(&mut self, h: &ChannelMatrix) -> Result<()> {
        let a_eff = self.effective_analog();
        self.delta = update_receivers(h, &self.w, &a_eff, self.sigma2)?;
        self.omega = update_mse_weights(h, &self.w, &a_eff, self.sigma2)?;
        Ok(())
    }
}

/// Frozen-weight surrogate minimized by one sweep, evaluated directly:
/// `κΣ(ω_k e_k − ln ω_k − 1) + η_mW[κ(1+1/ρ)P_T(W, Â) + κP_cons + Σ Dψ|ã|²]`.
pub fn surrogate_objective(state: &WsrpState, h: &ChannelMatrix, dims: &SystemDims, params: &PowerParams) -> Result<f64> {
    let a_eff = state.effective_analog();
    let g = crate::model::gain_matrix(h, &state.w, &a_eff)?;
    let mut mse_part = 0.0;
    for k in 0..g.nrows() {
        let om = state.omega[k];
        mse_part += om * mse(&g, k, state.delta[k], state.sigma2) - om.ln() - 1.0;
    }
    let d = sparsity_prices(&state.weights, params, gca_count(dims, params));
    let penalty: f64 = (0..state.a.nrows())
        .flat_map(|t| (0..state.a.ncols()).map(move |n| (t, n)))
        .map(|(t, n)| d[(t, n)] * state.weights.psi[(t, n)] * state.a[(t, n)].norm_sqr())
        .sum();
    let pt = transmit_power(&state.w, &a_eff)?;
    Ok(state.kappa * mse_part
        + state.eta_mw() * (state.kappa * params.pa_factor() * pt + state.kappa * params.p_cons(dims) + penalty))
}

/// Objective `−κ(R − η·P_tot)` at `(W, E(Ã))`, with the connection-dependent
/// power counted on the thresholded pattern of `E(Ã)`.
pub fn merit(
    w: &CMat,
    a_work: &CMat,
    h: &ChannelMatrix,
    dims: &SystemDims,
    params: &PowerParams,
    eta: f64,
    tolerances: &Tolerances,
    sigma2: f64,
) -> Result<f64> {
    let kappa = (1.0 / tolerances.eps_sparsity).ln_1p();
    let a_eff = relaxed_analog(a_work, tolerances.eps_sparsity);
    let (rate, power_mw) = relaxed_rate_power(h, w, &a_eff, dims, params, sigma2, tolerances.zero_thresh)?;
    Ok(-kappa * (rate - eta * mw_to_w(power_mw)))
}

/// Solves one block warm-started at `current`. The candidate replaces
/// `current` only if it is feasible and does not increase the block
/// objective. A block reported unbounded keeps `current`: this happens when
/// analog columns coincide and the quadratic is flat along directions the
/// model cannot see.
fn block_update(p: &QcqpProblem, current: CVec) -> Result<CVec> {
    let sol = match solve_qcqp_warm(p, Some(&current), QCQP_TOL, QCQP_MAX_ITER) {
        Ok(s) => s,
        Err(QcqpError::NotConverged(s)) => *s,
        Err(QcqpError::Unbounded) => return Ok(current),
        Err(e) => return Err(Error::Qcqp(e)),
    };
    if p.objective(&sol.x) <= p.objective(&current) && p.max_violation(&sol.x) <= 0.0 {
        Ok(sol.x)
    } else {
        Ok(current)
    }
}

/// Per-user QCQP of the digital step for user `k` (variable `w_k`).
pub fn digital_subproblem(
    state: &WsrpState,
    h: &ChannelMatrix,
    params: &PowerParams,
    dims: &SystemDims,
    k: usize,
) -> Result<QcqpProblem> {
    let a_eff = state.effective_analog();
    let gr = h.h.adjoint() * &a_eff;
    let n_rf = dims.n_rf;
    let mut q = (&a_eff.adjoint() * &a_eff).scale(state.eta_mw() * state.kappa * params.pa_factor());
    for i in 0..dims.n_users {
        let row = gr.row(i);
        let c = state.kappa * state.omega[i] * state.delta[i].norm_sqr();
        q += (row.adjoint() * row).scale(c);
    }
    let f = gr.row(k).adjoint() * (state.delta[k].conj() * (state.kappa * state.omega[k]));
    let mut p = QcqpProblem::new(q, f);
    let others: CMat = {
        let mut w = state.w.clone();
        w.column_mut(k).fill(C64::new(0.0, 0.0));
        &a_eff * w
    };
    for t in 0..dims.n_tx {
        let m = a_eff.row(t).adjoint();
        let used: f64 = others.row(t).iter().map(|z| z.norm_sqr()).sum();
        let cap = (params.p_max_per_antenna[t] - used).max(0.0);
        p = p.with_constraint(&m * m.adjoint(), cap);
    }
    debug_assert_eq!(p.dim(), n_rf);
    Ok(p)
}

/// Digital step: user-by-user exact minimization of the frozen surrogate
/// under the per-antenna caps. A block update is kept only if it does not
/// increase the block objective.
pub fn solve_digital(state: &WsrpState, h: &ChannelMatrix, params: &PowerParams, dims: &SystemDims) -> Result<CMat> {
    let mut work = state.clone();
    for k in 0..dims.n_users {
        let p = digital_subproblem(&work, h, params, dims, k)?;
        let x = block_update(&p, work.w.column(k).into_owned())?;
        work.w.set_column(k, &x);
    }
    Ok(work.w)
}

/// Per-antenna QCQP of the analog step for antenna `t` (variable `ã_t`,
/// the conjugated row `t` of `Ã`), other rows held fixed.
pub fn analog_subproblem(
    t: usize,
    state: &WsrpState,
    h: &ChannelMatrix,
    params: &PowerParams,
    dims: &SystemDims,
) -> Result<QcqpProblem> {
    let a_eff = state.effective_analog();
    let g = h.h.adjoint() * &a_eff * &state.w;
    let n_rf = dims.n_rf;
    let n_users = dims.n_users;
    let sqrt_psi = DVector::from_iterator(n_rf, (0..n_rf).map(|n| state.weights.psi[(t, n)].sqrt()));
    // v_j = Ψ_t^{1/2} w_j
    let v = CMat::from_fn(n_rf, n_users, |n, j| state.w[(n, j)] * sqrt_psi[n]);
    let vv = &v * v.adjoint();
    let own = CMat::from_fn(n_users, 1, |j, _| {
        (0..n_rf).map(|n| a_eff[(t, n)] * state.w[(n, j)]).sum::<C64>()
    });
    let kappa = state.kappa;
    let eta_mw = state.eta_mw();

    let mut mse_weight = 0.0;
    let mut f = CVec::zeros(n_rf);
    for k in 0..n_users {
        let hkt = h.h[(t, k)];
        let om = state.omega[k];
        let dk = state.delta[k];
        let d2 = dk.norm_sqr();
        mse_weight += om * d2 * hkt.norm_sqr();
        f.axpy(dk * hkt.conj() * (kappa * om), &v.column(k), C64::new(1.0, 0.0));
        for j in 0..n_users {
            // r_kj: amplitude through every antenna except t.
            let r = g[(k, j)] - hkt.conj() * own[j];
            f.axpy(-(r * hkt).conj() * (kappa * om * d2), &v.column(j), C64::new(1.0, 0.0));
        }
    }
    let d = sparsity_prices(&state.weights, params, gca_count(dims, params));
    let mut q = vv.scale(kappa * mse_weight + eta_mw * kappa * params.pa_factor());
    for n in 0..n_rf {
        q[(n, n)] += C64::new(eta_mw * d[(t, n)] * state.weights.psi[(t, n)], 0.0);
    }
    Ok(QcqpProblem::new(q, f)
        .with_constraint(vv, params.p_max_per_antenna[t])
        .with_modulus_caps(vec![1.0; n_rf]))
}

/// Analog step for one antenna; returns the new relaxed row as `ã_t`.
pub fn solve_analog_column(
    t: usize,
    state: &WsrpState,
    h: &ChannelMatrix,
    params: &PowerParams,
    dims: &SystemDims,
) -> Result<CVec> {
    let p = analog_subproblem(t, state, h, params, dims)?;
    let current = CVec::from_iterator(dims.n_rf, state.a.row(t).iter().map(|z| z.conj()));
    block_update(&p, current)
}

/// Rounds `√Ψ ⊙ Ã` to the sparsity-modulus set: entries with
/// `|·|² > zero_thresh` become unit-modulus (phase kept), the rest 0.
pub fn finalize_analog(a_work: &CMat, weights: &MajorizationWeights, zero_thresh: f64) -> CMat {
    let scaled = effective_analog(a_work, &weights.psi);
    scaled.map(|z| {
        if z.norm_sqr() > zero_thresh {
            z / z.norm()
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Largest scalar `s ≤ 1` such that `sW` meets every per-antenna cap.
pub fn feasibility_scale(w: &CMat, a: &CMat, params: &PowerParams) -> Result<f64> {
    let p = per_antenna_power(w, a)?;
    Ok(p.iter()
        .zip(&params.p_max_per_antenna)
        .filter(|(pt, _)| **pt > 0.0)
        .map(|(pt, cap)| (cap / pt).sqrt())
        .fold(1.0, f64::min))
}

/// Sets to zero the working entries whose relaxed modulus² `|ã|²/(|ã|²+ε)`
/// is at most `zero_thresh`.
pub fn prune(a_work: &CMat, eps: f64, zero_thresh: f64) -> CMat {
    let cut = zero_thresh * eps / (1.0 - zero_thresh);
    a_work.map(|z| if z.norm_sqr() <= cut { C64::new(0.0, 0.0) } else { z })
}

/// Rounds a relaxed analog matrix: `|â|² > zero_thresh` becomes unit-modulus,
/// the rest 0.
pub fn round_analog(a_relaxed: &CMat, zero_thresh: f64) -> CMat {
    a_relaxed.map(|z| if z.norm_sqr() > zero_thresh { z / z.norm() } else { C64::new(0.0, 0.0) })
}

/// Finalized precoder: rounded analog part and, if rounding broke a cap,
/// the digital part rescaled by `√(min_t P_t/power_t)`. The rescale is
/// repeated while rounding error in `A W` still leaves a cap exceeded.
pub fn finalize(w: &CMat, a_relaxed: &CMat, params: &PowerParams, zero_thresh: f64) -> Result<HybridPrecoder> {
    let a = round_analog(a_relaxed, zero_thresh);
    let mut w = w.clone();
    for _ in 0..4 {
        let s = feasibility_scale(&w, &a, params)?;
        if s >= 1.0 {
            break;
        }
        w.scale_mut(s * (1.0 - 1e-12));
    }
    HybridPrecoder::new(w, a)
}

/// Default starting point: `Ã` all ones and the matched filter `E(Ã)ᴴh_k`
/// scaled so the tightest antenna meets its cap with equality.
pub fn default_init(h: &ChannelMatrix, dims: &SystemDims, params: &PowerParams, eps: f64) -> Result<HybridPrecoder> {
    let a = CMat::from_element(dims.n_tx, dims.n_rf, C64::new(1.0, 0.0));
    let a_eff = relaxed_analog(&a, eps);
    let w = a_eff.adjoint() * &h.h;
    let p = per_antenna_power(&w, &a_eff)?;
    let s = p
        .iter()
        .zip(&params.p_max_per_antenna)
        .filter(|(pt, _)| **pt > 0.0)
        .map(|(pt, cap)| (cap / pt).sqrt())
        .fold(f64::INFINITY, f64::min);
    let w = if s.is_finite() { w.scale(s) } else { w };
    HybridPrecoder::new(w, a)
}

/// One row of the optional per-sweep trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub sweep: usize,
    /// Objective of the iterate (not of the best point so far).
    pub objective: f64,
    /// Sum rate at `(W, E(Ã))` in nats/s/Hz.
    pub rate: f64,
    /// Total power at `(W, E(Ã))` with the thresholded pattern, in mW.
    pub power_mw: f64,
    pub active_entries: usize,
}

#[derive(Debug, Clone)]
pub struct WsrpOutput {
    pub w: CMat,
    /// Working analog matrix `Ã`.
    pub a_working: CMat,
    /// Relaxed analog precoder `E(Ã)`.
    pub a_relaxed: CMat,
    pub objective_trace: Vec<f64>,
    pub rows: Vec<TraceRow>,
    pub converged: bool,
    pub sweeps: usize,
    /// Sweeps after which the objective of the iterate went up.
    pub ascent_sweeps: usize,
    /// `true` when the run stopped because the best objective had not
    /// improved for several sweeps.
    pub stalled: bool,
}

/// Writes the per-sweep trace as CSV.
pub fn write_trace_csv<W: std::io::Write>(mut out: W, rows: &[TraceRow]) -> Result<()> {
    writeln!(out, "sweep,objective,rate_nats,power_mw,active_entries")?;
    for r in rows {
        writeln!(out, "{},{:.12e},{:.12e},{:.12e},{}", r.sweep, r.objective, r.rate, r.power_mw, r.active_entries)?;
    }
    Ok(())
}

struct Problem<'a> {
    h: ChannelMatrix,
    dims: &'a SystemDims,
    params: &'a PowerParams,
    eta: f64,
    eps: f64,
    zero_thresh: f64,
    tolerances: Tolerances,
}

impl Problem<'_> {
    fn merit(&self, w: &CMat, a: &CMat) -> Result<f64> {
        merit(w, a, &self.h, self.dims, self.params, self.eta, &self.tolerances, 1.0)
    }

    fn trace_row(&self, sweep: usize, objective: f64, w: &CMat, a: &CMat) -> Result<TraceRow> {
        let a_eff = relaxed_analog(a, self.eps);
        let rate = crate::model::sum_rate(&self.h, w, &a_eff, 1.0)?;
        let b = mapping_from_analog(&a_eff, self.zero_thresh);
        let power_mw = total_power(w, &a_eff, self.dims, self.params, Some(&b))?;
        Ok(TraceRow { sweep, objective, rate, power_mw, active_entries: b.active_entries() })
    }

    /// Scales `W` so that `(W, E(Ã))` meets the caps.
    fn make_feasible(&self, w: CMat, a: &CMat) -> Result<CMat> {
        let s = feasibility_scale(&w, &relaxed_analog(a, self.eps), self.params)?;
        Ok(if s < 1.0 { w.scale(s) } else { w })
    }

    /// Analog step at the weights of `Ã`, then the digital step at the
    /// refreshed weights, receivers and MSE weights of the new `Ã`; `W` is
    /// thus always matched to `E(Ã)` when the objective is evaluated.
    fn sweep(&self, w: &CMat, a: &CMat) -> Result<(CMat, CMat)> {
        let mut state = WsrpState::new(&self.h, w.clone(), a.clone(), self.eta, self.eps, 1.0)?;
        for t in 0..self.dims.n_tx {
            let x = solve_analog_column(t, &state, &self.h, self.params, self.dims)?;
            for n in 0..self.dims.n_rf {
                state.a[(t, n)] = x[n].conj();
            }
        }
        let a_new = prune(&normalize_columns(&state.a), self.eps, self.zero_thresh);
        let w_feasible = self.make_feasible(state.w, &a_new)?;
        let mut state = WsrpState::new(&self.h, w_feasible, a_new, self.eta, self.eps, 1.0)?;
        state.w = solve_digital(&state, &self.h, self.params, self.dims)?;
        let w_new = self.make_feasible(state.w, &state.a)?;
        Ok((w_new, state.a))
    }
}

/// Runs sweeps from `init` (`W`, working `Ã`) until the relative objective change
/// is at most `tolerances.tau_in` or `max_iter` sweeps have run. The channel
/// is normalized by `σ` internally.
pub fn run_wsrp(
    eta: f64,
    h: &ChannelMatrix,
    init: &HybridPrecoder,
    dims: &SystemDims,
    params: &PowerParams,
    sigma2: f64,
    tolerances: &Tolerances,
    max_iter: usize,
) -> Result<WsrpOutput> {
    dims.validate()?;
    params.validate(dims)?;
    tolerances.validate()?;
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidInput("noise power must be > 0".into()));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidInput("eta must be finite and >= 0".into()));
    }
    if h.n_tx() != dims.n_tx || h.n_users() != dims.n_users {
        return Err(dim_err("channel shape differs from dims"));
    }
    if init.w.shape() != (dims.n_rf, dims.n_users) || init.a.shape() != (dims.n_tx, dims.n_rf) {
        return Err(dim_err("initial precoder shape differs from dims"));
    }
    let prob = Problem {
        h: h.scaled(sigma2.sqrt()),
        dims,
        params,
        eta,
        eps: tolerances.eps_sparsity,
        zero_thresh: tolerances.zero_thresh,
        tolerances: *tolerances,
    };

    let mut a = normalize_columns(&init.a);
    let mut w = prob.make_feasible(init.w.clone(), &a)?;
    let mut g = prob.merit(&w, &a)?;
    let mut trace = vec![g];
    let mut rows = vec![prob.trace_row(0, g, &w, &a)?];
    let mut best = (w.clone(), a.clone(), g);
    let mut converged = false;
    let mut stalled = false;
    let mut ascent_sweeps = 0;
    let mut since_best = 0;
    let mut sweeps = 0;

    while sweeps < max_iter {
        sweeps += 1;
        let (w_new, a_new) = prob.sweep(&w, &a)?;
        let g_new = prob.merit(&w_new, &a_new)?;
        if !g_new.is_finite() {
            return Err(Error::InvalidInput("non-finite objective".into()));
        }
        let change = (g - g_new).abs();
        ascent_sweeps += usize::from(g_new > g);
        w = w_new;
        a = a_new;
        g = g_new;
        if g < best.2 {
            best = (w.clone(), a.clone(), g);
            since_best = 0;
        } else {
            since_best += 1;
        }
        trace.push(best.2);
        rows.push(prob.trace_row(sweeps, g, &w, &a)?);
        if change <= tolerances.tau_in * g.abs().max(1.0) {
            converged = true;
            break;
        }
        if since_best >= PATIENCE {
            stalled = true;
            break;
        }
    }
    let (w, a, _) = best;
    let a_relaxed = relaxed_analog(&a, prob.eps);
    Ok(WsrpOutput { w, a_working: a, a_relaxed, objective_trace: trace, rows, converged, sweeps, ascent_sweeps, stalled })
}

/// Sum rate and total power (mW) of a relaxed point, using the thresholded
/// connection pattern.
pub fn relaxed_rate_power(
    h: &ChannelMatrix,
    w: &CMat,
    a_relaxed: &CMat,
    dims: &SystemDims,
    params: &PowerParams,
    sigma2: f64,
    zero_thresh: f64,
) -> Result<(f64, f64)> {
    let rate = crate::model::sum_rate(h, w, a_relaxed, sigma2)?;
    let b = mapping_from_analog(a_relaxed, zero_thresh);
    Ok((rate, total_power(w, a_relaxed, dims, params, Some(&b))?))
}

/// Energy efficiency of a relaxed point in nats/Hz/W.
pub fn relaxed_see(
    h: &ChannelMatrix,
    w: &CMat,
    a_relaxed: &CMat,
    dims: &SystemDims,
    params: &PowerParams,
    sigma2: f64,
    zero_thresh: f64,
) -> Result<f64> {
    let (r, p) = relaxed_rate_power(h, w, a_relaxed, dims, params, sigma2, zero_thresh)?;
    Ok(r / mw_to_w(p))
}
