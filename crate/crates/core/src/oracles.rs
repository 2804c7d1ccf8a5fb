//! Brute-force reference computations for cross-checking the solvers:
//! dense grids, random search, finite differences and Monte-Carlo averages.
//! Each returns a report with the worst observed discrepancy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::baselines::{eta_tilde, eta_tilde_gradient, run_fdp_upper};
use crate::channel::{generate_channel, path_loss_linear, ChannelParams, DEFAULT_NOISE_MW};
use crate::dinkelbach::dinkelbach;
use crate::harness::activation_metrics;
use crate::model::gain_matrix;
use crate::qcqp::{solve_qcqp, QcqpProblem, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::wsrp::{mse, update_mse_weights, update_receivers};
use crate::linalg::quad_form;
use crate::{CMat, CVec, ChannelMatrix, PowerParams, Result, SystemDims, C64};

pub const NAMES: [&str; 7] =
    ["dinkelbach-toy", "mmse", "qcqp-grid", "fdp-gradient", "fdp-random-search", "channel-norm", "activation"];

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub name: &'static str,
    /// Computed reference values, one per line.
    pub lines: Vec<String>,
    /// Worst discrepancy against the reference.
    pub worst: f64,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

/// Runs an oracle by name with its default sizes.
pub fn run(name: &str) -> Option<Result<OracleReport>> {
    Some(match name {
        "dinkelbach-toy" => Ok(dinkelbach_toy()),
        "mmse" => mmse_random(100, 10_000, 4),
        "qcqp-grid" => qcqp_grid(100, 5),
        "fdp-gradient" => fdp_gradient(20, 6),
        "fdp-random-search" => fdp_random_search(1_000_000, 7),
        "channel-norm" => channel_normalization(10_000, 16, 8),
        "activation" => Ok(activation_example()),
        _ => return None,
    })
}

/// Scalar fractional program: rate `ln(1 + 3x)`, power `0.4 + x/0.3` on
/// `x ∈ [0, 10]`, inner problems solved on a `1e-4` grid.
pub struct ToyFractional {
    pub grid: Vec<f64>,
}

impl Default for ToyFractional {
    fn default() -> Self {
        Self { grid: (0..=100_000).map(|i| i as f64 * 1e-4).collect() }
    }
}

impl ToyFractional {
    pub fn rate(x: f64) -> f64 {
        (1.0 + 3.0 * x).ln()
    }

    pub fn power(x: f64) -> f64 {
        0.4 + x / 0.3
    }

    /// Largest ratio on the grid.
    pub fn best_ratio(&self) -> f64 {
        self.grid.iter().map(|&x| Self::rate(x) / Self::power(x)).fold(0.0, f64::max)
    }

    /// `χ(η) = max_x R(x) − η P(x)` and its maximizer.
    pub fn chi(&self, eta: f64) -> (f64, f64) {
        self.grid
            .iter()
            .map(|&x| (Self::rate(x) - eta * Self::power(x), x))
            .fold((f64::NEG_INFINITY, 0.0), |best, c| if c.0 > best.0 { c } else { best })
    }

    /// Dinkelbach iterations with the grid inner solver; returns the `η` trace.
    pub fn dinkelbach(&self, tau: f64) -> Result<Vec<f64>> {
        let run = dinkelbach(
            |eta, _: Option<&f64>| {
                let (_, x) = self.chi(eta);
                Ok((Self::rate(x), Self::power(x), x))
            },
            tau,
            50,
        )?;
        Ok(run.eta_trace)
    }
}

pub fn dinkelbach_toy() -> OracleReport {
    let toy = ToyFractional::default();
    let best = toy.best_ratio();
    let trace = toy.dinkelbach(1e-9).unwrap_or_default();
    let eta = trace.last().copied().unwrap_or(f64::NAN);
    OracleReport {
        name: "dinkelbach-toy",
        lines: vec![
            format!("grid max R/P = {best:.9}"),
            format!("dinkelbach eta = {eta:.9} after {} updates", trace.len().saturating_sub(1)),
            format!("chi(eta*) = {:.3e}", toy.chi(best).0),
        ],
        worst: (eta - best).abs(),
        tolerance: 1e-3,
    }
}

fn rand_c(rng: &mut ChaCha8Rng, s: f64) -> C64 {
    C64::new(rng.random_range(-s..s), rng.random_range(-s..s))
}

fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize, s: f64) -> CMat {
    CMat::from_fn(r, c, |_, _| rand_c(rng, s))
}

/// Closed-form receivers against random candidates, and `ω·e = 1` at the
/// receiver. `worst` is the larger of the best candidate's advantage and
/// `|ω e − 1|`.
pub fn mmse_random(instances: usize, candidates: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_identity: f64 = 0.0;
    for _ in 0..instances {
        let (n, rf, k) = (rng.random_range(2..5), 2, 2);
        let h = ChannelMatrix::new(rand_mat(&mut rng, n, k, 1.0))?;
        let a = rand_mat(&mut rng, n, rf, 1.0);
        let w = rand_mat(&mut rng, rf, k, 1.0);
        let sigma2 = rng.random_range(0.1..2.0);
        let g = gain_matrix(&h, &w, &a)?;
        let d = update_receivers(&h, &w, &a, sigma2)?;
        let om = update_mse_weights(&h, &w, &a, sigma2)?;
        for u in 0..k {
            let e = mse(&g, u, d[u], sigma2);
            worst_identity = worst_identity.max((om[u] * e - 1.0).abs());
            let span = 2.0 * d[u].norm().max(1.0);
            for _ in 0..candidates {
                let z = rand_c(&mut rng, span);
                worst_gap = worst_gap.max(e - mse(&g, u, z, sigma2));
            }
        }
    }
    Ok(OracleReport {
        name: "mmse",
        lines: vec![
            format!("largest e(closed form) - e(candidate) = {worst_gap:.3e} (must be <= 0)"),
            format!("max |omega*e - 1| = {worst_identity:.3e}"),
        ],
        // Both checks are exact: no candidate may win and the identity holds to 1e-12.
        worst: worst_gap.max(0.0) + if worst_identity > 1e-12 { worst_identity } else { 0.0 },
        tolerance: 0.0,
    })
}

/// Random 2-D complex QCQPs: solver objective against a hierarchical grid
/// over the four real coordinates.
pub fn qcqp_grid(problems: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for i in 0..problems {
        let p = random_qcqp(&mut rng, i);
        let sol = match solve_qcqp(&p, DEFAULT_TOL, DEFAULT_MAX_ITER) {
            Ok(s) => s,
            Err(crate::qcqp::QcqpError::NotConverged(s)) => *s,
            Err(e) => return Err(e.into()),
        };
        let grid = grid_minimum(&p, 2.0);
        let gap = (sol.objective - grid).abs().max(p.max_violation(&sol.x) * 1e3);
        worst = worst.max(gap);
        if i < 5 {
            lines.push(format!("problem {i}: solver {:.8} grid {:.8}", sol.objective, grid));
        }
    }
    lines.push(format!("max |solver - grid| over {problems} problems = {worst:.3e}"));
    Ok(OracleReport { name: "qcqp-grid", lines, worst, tolerance: 1e-4 })
}

fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> CMat {
    let b = rand_mat(rng, n, rank, 1.0);
    &b * b.adjoint()
}

/// Alternates problem shapes: modulus caps only, one quadratic constraint,
/// both, and two constraints with caps. Every shape has a bounded feasible set
/// inside `|x_i| ≤ 2`.
pub fn random_qcqp(rng: &mut ChaCha8Rng, i: usize) -> QcqpProblem {
    let rank = rng.random_range(1..3);
    let q = random_psd(rng, 2, rank);
    let f = CVec::from_fn(2, |_, _| rand_c(rng, 1.5));
    let caps = vec![rng.random_range(0.3..1.5), rng.random_range(0.3..1.5)];
    let bounded_m = |rng: &mut ChaCha8Rng| random_psd(rng, 2, 2) + CMat::identity(2, 2).scale(0.3);
    match i % 4 {
        0 => QcqpProblem::new(q, f).with_modulus_caps(caps),
        1 => {
            let m = bounded_m(rng);
            QcqpProblem::new(q, f).with_constraint(m, rng.random_range(0.1..1.0))
        }
        2 => {
            let m = random_psd(rng, 2, 1);
            QcqpProblem::new(q, f).with_constraint(m, rng.random_range(0.05..0.5)).with_modulus_caps(caps)
        }
        _ => {
            let m1 = random_psd(rng, 2, 1);
            let m2 = bounded_m(rng);
            QcqpProblem::new(q, f)
                .with_constraint(m1, rng.random_range(0.05..0.5))
                .with_constraint(m2, rng.random_range(0.2..1.0))
                .with_modulus_caps(caps)
        }
    }
}

/// Best feasible objective on a grid of `x ∈ ℂ²`. The grid moves to its
/// best point each round and shrinks only when that point is interior,
/// until the spacing is below 1e-9.
pub fn grid_minimum(p: &QcqpProblem, half_width: f64) -> f64 {
    const N: i32 = 6;
    let mut centre = [0.0f64; 4];
    let mut span = half_width;
    let mut best = f64::INFINITY;
    let mut x = CVec::zeros(2);
    for _ in 0..400 {
        if span <= 1e-9 {
            break;
        }
        let step = span / N as f64;
        let mut next = (centre, [0i32; 4]);
        for a in -N..=N {
            for b in -N..=N {
                for c in -N..=N {
                    for d in -N..=N {
                        let idx = [a, b, c, d];
                        let v: [f64; 4] = std::array::from_fn(|r| centre[r] + idx[r] as f64 * step);
                        x[0] = C64::new(v[0], v[1]);
                        x[1] = C64::new(v[2], v[3]);
                        if p.max_violation(&x) > 0.0 {
                            continue;
                        }
                        let o = p.objective(&x);
                        if o < best {
                            best = o;
                            next = (v, idx);
                        }
                    }
                }
            }
        }
        centre = next.0;
        if next.1.iter().all(|i| i.abs() < N) {
            span = 2.0 * step;
        }
    }
    if best.is_finite() {
        best = refine_feasible(p, centre, best, half_width / N as f64);
    }
    best
}

/// Random-direction descent over feasible points. Trial points are pulled back
/// onto the feasible set, so the search can slide along active constraints.
fn refine_feasible(p: &QcqpProblem, mut centre: [f64; 4], mut best: f64, mut radius: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    while radius > 1e-10 {
        let mut improved = false;
        for _ in 0..2000 {
            let mut d: [f64; 4] = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal));
            let n = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            let scale = radius * rng.random::<f64>() / n;
            d.iter_mut().for_each(|v| *v *= scale);
            let x = pull_feasible(p, std::array::from_fn(|r| centre[r] + d[r]));
            if p.max_violation(&x) > 0.0 {
                continue;
            }
            let o = p.objective(&x);
            if o < best {
                best = o;
                centre = [x[0].re, x[0].im, x[1].re, x[1].im];
                improved = true;
            }
        }
        if !improved {
            radius *= 0.5;
        }
    }
    best
}

/// Clips capped moduli, then shrinks towards the origin until every
/// homogeneous quadratic constraint holds.
fn pull_feasible(p: &QcqpProblem, v: [f64; 4]) -> CVec {
    let mut x = CVec::from_vec(vec![C64::new(v[0], v[1]), C64::new(v[2], v[3])]);
    if let Some(caps) = &p.modulus_caps {
        for (z, &c) in x.iter_mut().zip(caps) {
            let r = z.norm();
            if r > c {
                *z *= c / r;
            }
        }
    }
    let t = p
        .quad_constraints
        .iter()
        .map(|c| {
            let q = quad_form(&c.m, &x);
            if q > c.cap { (c.cap / q).sqrt() } else { 1.0 }
        })
        .fold(1.0f64, f64::min);
    x.scale_mut(t * (1.0 - 1e-15));
    x
}

/// Relative error of the analytic `η̃` gradient against central differences
/// with step `1e-6·‖U‖`.
pub fn fdp_gradient(instances: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..instances {
        let dims = SystemDims::new(4 + i % 5, 3, 1 + i % 3)?;
        let h = generate_channel(&dims, &ChannelParams::default(), seed.wrapping_add(i as u64))?;
        let u = rand_mat(&mut rng, dims.n_tx, dims.n_users, 3.0);
        let g = eta_tilde_gradient(&u, &h, DEFAULT_NOISE_MW)?;
        let step = 1e-6 * u.norm();
        let mut fd = CMat::zeros(u.nrows(), u.ncols());
        for r in 0..u.nrows() {
            for k in 0..u.ncols() {
                let mut parts = [0.0; 2];
                for (slot, dir) in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)].into_iter().enumerate() {
                    let mut up = u.clone();
                    let mut dn = u.clone();
                    up[(r, k)] += dir * step;
                    dn[(r, k)] -= dir * step;
                    parts[slot] = (eta_tilde(&up, &h, DEFAULT_NOISE_MW)? - eta_tilde(&dn, &h, DEFAULT_NOISE_MW)?) / (2.0 * step);
                }
                fd[(r, k)] = C64::new(parts[0], parts[1]);
            }
        }
        worst = worst.max((&g - &fd).norm() / fd.norm());
    }
    Ok(OracleReport {
        name: "fdp-gradient",
        lines: vec![format!("max relative gradient error over {instances} instances = {worst:.3e}")],
        worst,
        tolerance: 1e-4,
    })
}

/// Single-user, two-antenna ascent against random feasible points.
/// `worst` is the relative shortfall of the ascent.
pub fn fdp_random_search(samples: usize, seed: u64) -> Result<OracleReport> {
    let dims = SystemDims::new(2, 1, 1)?;
    let params = PowerParams::reference(2);
    let h = generate_channel(&dims, &ChannelParams::default(), seed)?;
    let out = run_fdp_upper(&h, &dims, &params, DEFAULT_NOISE_MW, 1e-4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    let mut u = CMat::zeros(2, 1);
    for _ in 0..samples {
        for t in 0..2 {
            let r = (params.p_max_per_antenna[t] * rng.random::<f64>()).sqrt();
            u[(t, 0)] = C64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
        }
        best = best.max(eta_tilde(&u, &h, DEFAULT_NOISE_MW)?);
    }
    Ok(OracleReport {
        name: "fdp-random-search",
        lines: vec![format!("ascent eta~ = {:.6e}, best of {samples} random points = {best:.6e}", out.eta_tilde)],
        worst: ((best - out.eta_tilde) / best).max(0.0),
        tolerance: 0.01,
    })
}

/// Mean `‖h‖²` over independent draws against `N_T / P_L`.
pub fn channel_normalization(draws: usize, n_tx: usize, seed: u64) -> Result<OracleReport> {
    let params = ChannelParams::default();
    let dims = SystemDims::new(n_tx, 1, 1)?;
    let mut total = 0.0;
    for d in 0..draws {
        let h = generate_channel(&dims, &params, seed.wrapping_mul(1_000_003).wrapping_add(d as u64))?;
        total += h.h.norm_squared();
    }
    let mean = total / draws as f64;
    let expected = n_tx as f64 / path_loss_linear(&params);
    let rel = (mean - expected).abs() / expected;
    Ok(OracleReport {
        name: "channel-norm",
        lines: vec![format!("mean |h|^2 = {mean:.6e}, N_T/P_L = {expected:.6e}, relative deviation {rel:.4}")],
        worst: rel,
        tolerance: 0.03,
    })
}

/// One active connection with `N_T = 4`, `N_RF = 2`.
pub fn activation_example() -> OracleReport {
    let mut a = CMat::zeros(4, 2);
    a[(1, 0)] = C64::new(0.0, 1.0);
    let (ps, rf, ant) = activation_metrics(&a);
    let worst = (ps - 12.5).abs().max((rf - 50.0).abs()).max((ant - 25.0).abs());
    OracleReport {
        name: "activation",
        lines: vec![format!("(pct_ps, pct_rf, pct_ant) = ({ps}, {rf}, {ant}), expected (12.5, 50, 25)")],
        worst,
        tolerance: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_by_name() {
        assert!(run("activation").unwrap().unwrap().passed());
        assert!(run("nope").is_none());
    }

    #[test]
    fn grid_finds_box_corner() {
        let p = QcqpProblem::new(CMat::zeros(2, 2), CVec::from_element(2, C64::new(1.0, 0.0))).with_modulus_caps(vec![0.5, 0.5]);
        assert!((grid_minimum(&p, 1.0) + 2.0).abs() < 1e-6);
    }

    #[test]
    fn small_reports_pass() {
        assert!(dinkelbach_toy().passed());
        assert!(activation_example().passed());
        assert!(mmse_random(5, 500, 1).unwrap().passed());
        assert!(qcqp_grid(4, 2).unwrap().passed());
        assert!(fdp_gradient(3, 3).unwrap().passed());
    }
}
