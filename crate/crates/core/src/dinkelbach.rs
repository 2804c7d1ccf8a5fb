//! Dinkelbach outer loop for energy-efficiency maximization.
//!
//! The ratio `R/P` is maximized through the priced problems
//! `max R − η·P`, with `η` updated to the ratio achieved by each inner
//! solution. Each inner solve is warm-started at the previous one.

use crate::model::{mw_to_w, see, sum_rate, total_power, ChannelMatrix, HybridPrecoder, PowerParams, SystemDims, Tolerances};
use crate::wsrp::{default_init, finalize, relaxed_analog, relaxed_rate_power, run_wsrp, DEFAULT_MAX_SWEEPS};
use crate::{CMat, Error, Result};

pub const DEFAULT_MAX_OUTER: usize = 50;

/// `χ̄ = R − η·P_tot` with `η` in nats/Hz/W and the power converted to W.
pub fn chi_bar(
    eta: f64,
    w: &CMat,
    a: &CMat,
    h: &ChannelMatrix,
    dims: &SystemDims,
    params: &PowerParams,
    sigma2: f64,
) -> Result<f64> {
    let r = sum_rate(h, w, a, sigma2)?;
    let p = total_power(w, a, dims, params, None)?;
    Ok(r - eta * mw_to_w(p))
}

/// Result of the generic outer loop.
#[derive(Debug, Clone)]
pub struct DinkelbachRun<T> {
    /// `η⁽⁰⁾ = 0` followed by the ratio achieved by each accepted inner solution.
    pub eta_trace: Vec<f64>,
    /// Last accepted inner solution.
    pub last: Option<T>,
    pub converged: bool,
    pub outer_iterations: usize,
    /// `true` when an inner solution would have lowered `η` and was discarded.
    pub stopped_on_decrease: bool,
}

/// Runs Dinkelbach iterations. `inner(η, previous)` solves the priced problem
/// (warm-started at `previous`) and returns `(rate, power, solution)`.
/// Stops when `|η⁽ᵐ⁺¹⁾ − η⁽ᵐ⁾| ≤ tau_out`, after `max_outer` inner solves, or
/// when a solution would decrease `η` (that solution is dropped).
pub fn dinkelbach<T, F>(mut inner: F, tau_out: f64, max_outer: usize) -> Result<DinkelbachRun<T>>
where
    F: FnMut(f64, Option<&T>) -> Result<(f64, f64, T)>,
{
    let mut eta = 0.0;
    let mut run = DinkelbachRun {
        eta_trace: vec![eta],
        last: None,
        converged: false,
        outer_iterations: 0,
        stopped_on_decrease: false,
    };
    while run.outer_iterations < max_outer {
        run.outer_iterations += 1;
        let (rate, power, sol) = inner(eta, run.last.as_ref())?;
        if !(power > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidInput(format!("inner solve returned rate {rate}, power {power}")));
        }
        let next = rate / power;
        if next < eta {
            run.stopped_on_decrease = true;
            run.converged = run.last.is_some();
            break;
        }
        run.eta_trace.push(next);
        run.last = Some(sol);
        if (next - eta).abs() <= tau_out {
            run.converged = true;
            break;
        }
        eta = next;
    }
    Ok(run)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeemOptions {
    pub max_outer: usize,
    pub max_inner: usize,
}

impl Default for SeemOptions {
    fn default() -> Self {
        Self { max_outer: DEFAULT_MAX_OUTER, max_inner: DEFAULT_MAX_SWEEPS }
    }
}

#[derive(Debug, Clone)]
pub struct SeemResult {
    /// Finalized precoder.
    pub precoder: HybridPrecoder,
    /// `η` per outer iteration, evaluated on the relaxed working point.
    pub eta_trace: Vec<f64>,
    pub converged: bool,
    pub outer_iterations: usize,
    /// Energy efficiency of the last relaxed working point (nats/Hz/W).
    pub see_relaxed: f64,
    /// Energy efficiency of the finalized precoder (nats/Hz/W).
    pub see: f64,
    pub rate: f64,
    pub power_mw: f64,
    /// Inner runs that hit their sweep limit.
    pub inner_nonconverged: usize,
    pub inner_sweeps: usize,
    pub stopped_on_decrease: bool,
}

/// Maximizes energy efficiency from the default starting point.
pub fn run_seem(
    h: &ChannelMatrix,
    dims: &SystemDims,
    params: &PowerParams,
    sigma2: f64,
    tolerances: &Tolerances,
) -> Result<SeemResult> {
    run_seem_with(h, dims, params, sigma2, tolerances, &SeemOptions::default(), None)
}

/// As [`run_seem`], with explicit iteration limits and an optional starting
/// point (`W`, working analog matrix).
pub fn run_seem_with(
    h: &ChannelMatrix,
    dims: &SystemDims,
    params: &PowerParams,
    sigma2: f64,
    tolerances: &Tolerances,
    options: &SeemOptions,
    init: Option<&HybridPrecoder>,
) -> Result<SeemResult> {
    let eps = tolerances.eps_sparsity;
    let start = match init {
        Some(p) => p.clone(),
        None => default_init(&h.scaled(sigma2.sqrt()), dims, params, eps)?,
    };
    let mut inner_nonconverged = 0;
    let mut inner_sweeps = 0;
    let run = dinkelbach(
        |eta, prev: Option<&HybridPrecoder>| {
            let from = prev.unwrap_or(&start);
            let out = run_wsrp(eta, h, from, dims, params, sigma2, tolerances, options.max_inner)?;
            inner_nonconverged += usize::from(!out.converged && !out.stalled);
            inner_sweeps += out.sweeps;
            let (r, p) = relaxed_rate_power(h, &out.w, &out.a_relaxed, dims, params, sigma2, tolerances.zero_thresh)?;
            Ok((r, mw_to_w(p), HybridPrecoder::new(out.w, out.a_working)?))
        },
        tolerances.tau_out,
        options.max_outer,
    )?;
    let working = run.last.unwrap_or(start);
    let see_relaxed = *run.eta_trace.last().unwrap_or(&0.0);
    let precoder = finalize(&working.w, &relaxed_analog(&working.a, eps), params, tolerances.zero_thresh)?;
    let rate = sum_rate(h, &precoder.w, &precoder.a, sigma2)?;
    let power_mw = total_power(&precoder.w, &precoder.a, dims, params, None)?;
    Ok(SeemResult {
        see: see(&precoder.w, &precoder.a, h, dims, params, sigma2)?,
        precoder,
        eta_trace: run.eta_trace,
        converged: run.converged,
        outer_iterations: run.outer_iterations,
        see_relaxed,
        rate,
        power_mw,
        inner_nonconverged,
        inner_sweeps,
        stopped_on_decrease: run.stopped_on_decrease,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_channel, ChannelParams, DEFAULT_NOISE_MW};
    use crate::model::check_feasibility;
    use crate::C64;

    /// Scalar toy: rate ln(1 + g·x), power p0 + x/ρ on x ∈ [0, 10].
    fn toy_grid() -> Vec<f64> {
        (0..=100_000).map(|i| i as f64 * 1e-4).collect()
    }

    fn toy_rate(x: f64) -> f64 {
        (1.0 + 3.0 * x).ln()
    }

    fn toy_power(x: f64) -> f64 {
        0.4 + x / 0.3
    }

    fn toy_chi(eta: f64, grid: &[f64]) -> (f64, f64) {
        grid.iter()
            .map(|&x| (toy_rate(x) - eta * toy_power(x), x))
            .fold((f64::NEG_INFINITY, 0.0), |best, c| if c.0 > best.0 { c } else { best })
    }

    #[test]
    fn toy_dinkelbach_matches_grid_maximum() {
        let grid = toy_grid();
        let best_ratio = grid.iter().map(|&x| toy_rate(x) / toy_power(x)).fold(0.0, f64::max);
        let run = dinkelbach(
            |eta, _: Option<&f64>| {
                let (_, x) = toy_chi(eta, &grid);
                Ok((toy_rate(x), toy_power(x), x))
            },
            1e-9,
            50,
        )
        .unwrap();
        assert!(run.converged);
        let eta = *run.eta_trace.last().unwrap();
        assert!((eta - best_ratio).abs() < 1e-3, "{eta} vs {best_ratio}");
        for w in run.eta_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn toy_chi_properties() {
        let grid = toy_grid();
        let best_ratio = grid.iter().map(|&x| toy_rate(x) / toy_power(x)).fold(0.0, f64::max);
        let etas: Vec<f64> = (0..60).map(|i| i as f64 * 0.05).collect();
        let chis: Vec<f64> = etas.iter().map(|&e| toy_chi(e, &grid).0).collect();
        for w in chis.windows(2) {
            assert!(w[1] < w[0]);
        }
        for (&e, &c) in etas.iter().zip(&chis) {
            if (e - best_ratio).abs() > 1e-3 {
                assert_eq!(c > 0.0, e < best_ratio, "eta {e} chi {c}");
            }
        }
        assert!(toy_chi(best_ratio, &grid).0.abs() < 1e-6);
    }

    #[test]
    fn decrease_is_discarded() {
        let mut calls = 0;
        let run = dinkelbach(
            |_, _: Option<&usize>| {
                calls += 1;
                let rate = if calls == 1 { 2.0 } else { 1.0 };
                Ok((rate, 1.0, calls))
            },
            1e-9,
            10,
        )
        .unwrap();
        assert!(run.stopped_on_decrease);
        assert_eq!(run.last, Some(1));
        assert_eq!(run.eta_trace, vec![0.0, 2.0]);
    }

    #[test]
    fn chi_bar_cases() {
        let dims = SystemDims::new(2, 1, 1).unwrap();
        let params = PowerParams::reference(2);
        let h = ChannelMatrix::new(CMat::from_element(2, 1, C64::new(1.0, 0.0))).unwrap();
        let w = CMat::from_element(1, 1, C64::new(1.0, 0.0));
        let a = CMat::from_element(2, 1, C64::new(1.0, 0.0));
        let r = sum_rate(&h, &w, &a, 1.0).unwrap();
        assert!((chi_bar(0.0, &w, &a, &h, &dims, &params, 1.0).unwrap() - r).abs() < 1e-15);
        let p = mw_to_w(total_power(&w, &a, &dims, &params, None).unwrap());
        assert!(chi_bar(r / p, &w, &a, &h, &dims, &params, 1.0).unwrap().abs() < 1e-12);
        assert!(chi_bar(1e9, &w, &a, &h, &dims, &params, 1.0).unwrap() < 0.0);
    }

    #[test]
    fn small_instances_are_monotone_and_feasible() {
        let dims = SystemDims::new(8, 2, 2).unwrap();
        let params = PowerParams::reference(8);
        let tol = Tolerances::default();
        for seed in 0..3 {
            let h = generate_channel(&dims, &ChannelParams::default(), seed).unwrap();
            let res = run_seem(&h, &dims, &params, DEFAULT_NOISE_MW, &tol).unwrap();
            for w in res.eta_trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-9, "{:?}", res.eta_trace);
            }
            assert!(res.outer_iterations <= DEFAULT_MAX_OUTER);
            assert!(check_feasibility(&res.precoder.w, &res.precoder.a, &params).unwrap().is_feasible());
            assert!(res.see >= 0.0);
        }
    }
}
