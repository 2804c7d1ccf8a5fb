//! Domain types and closed-form physical quantities of the hybrid precoding
//! downlink: SINR, sum rate, power consumption and energy efficiency.
//!
//! Conventions: the analog precoder `A` is `N_T × N_RF`, its row `t` is
//! `a_tᴴ`; the digital precoder `W` is `N_RF × K` with columns `w_k`; the
//! channel `H` is `N_T × K` with columns `h_k`. User `k` receives
//! `h_kᴴ A Σ_j w_j s_j + n_k`.

use nalgebra::{DMatrix, DVector};

use crate::error::dim_err;
use crate::{CMat, CVec, Error, Result};

/// Modulus tolerance for a finalized analog entry.
pub const MODULUS_TOL: f64 = 1e-6;
/// Slack allowed on a per-antenna power cap.
pub const POWER_TOL: f64 = 1e-9;

/// Antenna, RF-chain and user counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemDims {
    pub n_tx: usize,
    pub n_rf: usize,
    pub n_users: usize,
}

impl SystemDims {
    pub fn new(n_tx: usize, n_rf: usize, n_users: usize) -> Result<Self> {
        let dims = Self { n_tx, n_rf, n_users };
        dims.validate()?;
        Ok(dims)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tx == 0 || self.n_rf == 0 || self.n_users == 0 {
            return Err(Error::InvalidInput(format!("all dimensions must be >= 1, got {self:?}")));
        }
        if self.n_rf < self.n_users {
            return Err(Error::InvalidInput(format!(
                "n_rf ({}) must be >= n_users ({})",
                self.n_rf, self.n_users
            )));
        }
        Ok(())
    }
}

/// Per-component power constants (mW), gains and losses (dB).
///
/// `l_d` and `l_c` (three-port splitter / combiner losses) default to 1 dB;
/// these are external-source defaults and should be overridden when the
/// hardware figures are known.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerParams {
    pub p_bb: f64,
    pub p_dac: f64,
    pub p_rfc: f64,
    pub p_sw: f64,
    pub p_ps: f64,
    pub p_amp: f64,
    pub g_amp: f64,
    pub rho_pa: f64,
    pub l_d: f64,
    pub l_c: f64,
    pub l_sw: f64,
    pub l_ps: f64,
    pub p_max_per_antenna: Vec<f64>,
}

impl PowerParams {
    /// Reference hardware figures with a uniform 50 mW per-antenna cap.
    pub fn reference(n_tx: usize) -> Self {
        Self {
            p_bb: 300.0,
            p_dac: 200.0,
            p_rfc: 43.0,
            p_sw: 2.0,
            p_ps: 40.0,
            p_amp: 40.0,
            g_amp: 20.0,
            rho_pa: 0.3,
            l_d: 1.0,
            l_c: 1.0,
            l_sw: 2.0,
            l_ps: 2.0,
            p_max_per_antenna: vec![50.0; n_tx],
        }
    }

    /// Same parameters with a uniform per-antenna cap.
    pub fn with_uniform_cap(mut self, n_tx: usize, cap_mw: f64) -> Self {
        self.p_max_per_antenna = vec![cap_mw; n_tx];
        self
    }

    pub fn validate(&self, dims: &SystemDims) -> Result<()> {
        let powers = [self.p_bb, self.p_dac, self.p_rfc, self.p_sw, self.p_ps, self.p_amp];
        if powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidInput("component powers must be finite and >= 0".into()));
        }
        if !(self.g_amp > 0.0) {
            return Err(Error::InvalidInput("g_amp must be > 0".into()));
        }
        if !(self.rho_pa > 0.0 && self.rho_pa <= 1.0) {
            return Err(Error::InvalidInput("rho_pa must lie in (0, 1]".into()));
        }
        let losses = [self.l_d, self.l_c, self.l_sw, self.l_ps];
        if losses.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::InvalidInput("losses must be finite and >= 0".into()));
        }
        if self.p_max_per_antenna.len() != dims.n_tx {
            return Err(dim_err(format!(
                "p_max_per_antenna has length {}, expected n_tx = {}",
                self.p_max_per_antenna.len(),
                dims.n_tx
            )));
        }
        if self.p_max_per_antenna.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvalidInput("per-antenna caps must be > 0".into()));
        }
        Ok(())
    }

    /// `1 + 1/ρ_pa`: radiated power plus PA dissipation per unit radiated power.
    pub fn pa_factor(&self) -> f64 {
        1.0 + 1.0 / self.rho_pa
    }

    /// Fixed consumption `K·P_BB + N_T·N_RF·P_SW`.
    pub fn p_cons(&self, dims: &SystemDims) -> f64 {
        dims.n_users as f64 * self.p_bb + (dims.n_tx * dims.n_rf) as f64 * self.p_sw
    }

    /// Power of the gain-compensation amplifiers behind one active antenna.
    pub fn p_gca(&self, m_gca: u32) -> f64 {
        m_gca as f64 * self.p_amp
    }
}

/// Per-user channel vectors stored as the columns of an `N_T × K` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub h: CMat,
}

impl ChannelMatrix {
    pub fn new(h: CMat) -> Result<Self> {
        if h.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("channel has non-finite entries".into()));
        }
        Ok(Self { h })
    }

    pub fn n_tx(&self) -> usize {
        self.h.nrows()
    }

    pub fn n_users(&self) -> usize {
        self.h.ncols()
    }

    pub fn user(&self, k: usize) -> CVec {
        self.h.column(k).into_owned()
    }

    /// Same channel divided by `scale` (used to normalize the noise power).
    pub fn scaled(&self, scale: f64) -> Self {
        Self { h: self.h.unscale(scale) }
    }
}

/// Digital (`N_RF × K`) and analog (`N_T × N_RF`) precoders.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridPrecoder {
    pub w: CMat,
    pub a: CMat,
}

impl HybridPrecoder {
    pub fn new(w: CMat, a: CMat) -> Result<Self> {
        if a.ncols() != w.nrows() {
            return Err(dim_err(format!(
                "A is {}x{} but W is {}x{}",
                a.nrows(),
                a.ncols(),
                w.nrows(),
                w.ncols()
            )));
        }
        Ok(Self { w, a })
    }

    /// Effective fully-digital precoder `A W` (`N_T × K`).
    pub fn effective(&self) -> CMat {
        &self.a * &self.w
    }
}

/// Binary RF-chain-to-antenna connection pattern (`N_T × N_RF`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingMatrix {
    pub b: DMatrix<bool>,
}

impl MappingMatrix {
    pub fn new(b: DMatrix<bool>) -> Self {
        Self { b }
    }

    pub fn zeros(n_tx: usize, n_rf: usize) -> Self {
        Self { b: DMatrix::from_element(n_tx, n_rf, false) }
    }

    pub fn ones(n_tx: usize, n_rf: usize) -> Self {
        Self { b: DMatrix::from_element(n_tx, n_rf, true) }
    }

    pub fn n_tx(&self) -> usize {
        self.b.nrows()
    }

    pub fn n_rf(&self) -> usize {
        self.b.ncols()
    }

    pub fn get(&self, t: usize, n: usize) -> bool {
        self.b[(t, n)]
    }

    pub fn set(&mut self, t: usize, n: usize, on: bool) {
        self.b[(t, n)] = on;
    }

    /// Number of active connections `‖B‖₀`.
    pub fn active_entries(&self) -> usize {
        self.b.iter().filter(|&&x| x).count()
    }

    /// Number of RF chains with at least one active connection `‖c(B)‖₀`.
    pub fn active_rf_chains(&self) -> usize {
        (0..self.n_rf()).filter(|&n| self.b.column(n).iter().any(|&x| x)).count()
    }

    /// Number of antennas with at least one active connection `‖r(B)‖₀`.
    pub fn active_antennas(&self) -> usize {
        (0..self.n_tx()).filter(|&t| self.b.row(t).iter().any(|&x| x)).count()
    }

    /// `true` when every entry of `self` is at most the matching entry of `other`.
    pub fn is_subset_of(&self, other: &MappingMatrix) -> bool {
        self.b.shape() == other.b.shape() && self.b.iter().zip(other.b.iter()).all(|(&x, &y)| !x || y)
    }

    pub fn as_f64(&self) -> DMatrix<f64> {
        self.b.map(|x| if x { 1.0 } else { 0.0 })
    }
}

/// Convergence tolerances and sparsity constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub tau_out: f64,
    pub tau_in: f64,
    pub tau_up: f64,
    pub eps_sparsity: f64,
    pub zero_thresh: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { tau_out: 1e-4, tau_in: 1e-4, tau_up: 1e-4, eps_sparsity: 1e-8, zero_thresh: 0.5 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_out > 0.0 && self.tau_in > 0.0 && self.tau_up > 0.0) {
            return Err(Error::InvalidInput("convergence tolerances must be > 0".into()));
        }
        if !(self.eps_sparsity > 0.0) {
            return Err(Error::InvalidInput("eps_sparsity must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.zero_thresh) {
            return Err(Error::InvalidInput("zero_thresh must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

fn check_precoder_dims(w: &CMat, a: &CMat) -> Result<()> {
    if a.ncols() != w.nrows() {
        return Err(dim_err(format!(
            "A has {} columns but W has {} rows",
            a.ncols(),
            w.nrows()
        )));
    }
    Ok(())
}

/// Matrix of received amplitudes `G[k, j] = h_kᴴ A w_j`.
pub fn gain_matrix(h: &ChannelMatrix, w: &CMat, a: &CMat) -> Result<CMat> {
    check_precoder_dims(w, a)?;
    if h.n_tx() != a.nrows() {
        return Err(dim_err(format!("H has {} rows but A has {}", h.n_tx(), a.nrows())));
    }
    if h.n_users() != w.ncols() {
        return Err(dim_err(format!("H has {} users but W has {} columns", h.n_users(), w.ncols())));
    }
    Ok(h.h.adjoint() * a * w)
}

/// SINR of user `k` for channel vector `h_k`.
pub fn sinr(h_k: &CVec, w: &CMat, a: &CMat, k: usize, sigma2: f64) -> Result<f64> {
    check_precoder_dims(w, a)?;
    if h_k.len() != a.nrows() {
        return Err(dim_err(format!("h_k has length {} but A has {} rows", h_k.len(), a.nrows())));
    }
    if k >= w.ncols() {
        return Err(dim_err(format!("user index {k} out of range for {} users", w.ncols())));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidInput("noise power must be > 0".into()));
    }
    let row = h_k.adjoint() * a * w;
    let signal = row[(0, k)].norm_sqr();
    let interference: f64 = (0..w.ncols()).filter(|&j| j != k).map(|j| row[(0, j)].norm_sqr()).sum();
    Ok(signal / (interference + sigma2))
}

/// Per-user SINRs from a gain matrix.
pub fn sinrs_from_gains(g: &CMat, sigma2: f64) -> DVector<f64> {
    let k = g.nrows();
    DVector::from_iterator(
        k,
        (0..k).map(|i| {
            let total: f64 = g.row(i).iter().map(|z| z.norm_sqr()).sum();
            let s = g[(i, i)].norm_sqr();
            s / (total - s + sigma2)
        }),
    )
}

/// Sum rate `Σ_k ln(1 + SINR_k)` in nats/s/Hz.
pub fn sum_rate(h: &ChannelMatrix, w: &CMat, a: &CMat, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidInput("noise power must be > 0".into()));
    }
    let g = gain_matrix(h, w, a)?;
    Ok(sinrs_from_gains(&g, sigma2).iter().map(|s| s.ln_1p()).sum())
}

/// Number of gain-compensation amplifiers needed per active antenna.
pub fn gca_count(dims: &SystemDims, params: &PowerParams) -> u32 {
    let log2_ceil = |n: usize| (n as f64).log2().ceil().max(0.0);
    let loss = log2_ceil(dims.n_tx) * params.l_d
        + log2_ceil(dims.n_rf) * params.l_c
        + params.l_sw
        + params.l_ps;
    (loss / params.g_amp).ceil().max(0.0) as u32
}

/// Connection-dependent RF power: DAC/RF-chain power per used chain, phase
/// shifter power per active connection and GCA power per active antenna.
pub fn sparsity_power(b: &MappingMatrix, params: &PowerParams, m_gca: u32) -> f64 {
    (params.p_dac + params.p_rfc) * b.active_rf_chains() as f64
        + params.p_ps * b.active_entries() as f64
        + params.p_gca(m_gca) * b.active_antennas() as f64
}

/// Radiated power `Σ_k ‖A w_k‖²`.
pub fn transmit_power(w: &CMat, a: &CMat) -> Result<f64> {
    check_precoder_dims(w, a)?;
    Ok(crate::linalg::fro2(&(a * w)))
}

/// Radiated power per antenna `Σ_k |a_tᴴ w_k|²`.
pub fn per_antenna_power(w: &CMat, a: &CMat) -> Result<DVector<f64>> {
    check_precoder_dims(w, a)?;
    let u = a * w;
    Ok(DVector::from_iterator(u.nrows(), u.row_iter().map(|r| r.iter().map(|z| z.norm_sqr()).sum())))
}

/// Total consumption in mW. The connection pattern is derived from `A`
/// with the default 0.5 threshold unless supplied.
pub fn total_power(
    w: &CMat,
    a: &CMat,
    dims: &SystemDims,
    params: &PowerParams,
    mapping: Option<&MappingMatrix>,
) -> Result<f64> {
    let pt = transmit_power(w, a)?;
    let derived;
    let b = match mapping {
        Some(b) => b,
        None => {
            derived = mapping_from_analog(a, Tolerances::default().zero_thresh);
            &derived
        }
    };
    if b.n_tx() != a.nrows() || b.n_rf() != a.ncols() {
        return Err(dim_err("mapping matrix shape differs from A"));
    }
    let m_gca = gca_count(dims, params);
    Ok(params.p_cons(dims) + sparsity_power(b, params, m_gca) + params.pa_factor() * pt)
}

/// System energy efficiency in nats/Hz/W (powers are converted from mW).
pub fn see(
    w: &CMat,
    a: &CMat,
    h: &ChannelMatrix,
    dims: &SystemDims,
    params: &PowerParams,
    sigma2: f64,
) -> Result<f64> {
    let rate = sum_rate(h, w, a, sigma2)?;
    let p = total_power(w, a, dims, params, None)?;
    Ok(rate / mw_to_w(p))
}

/// `1 / ln 2`, the nats-to-bits factor.
pub const BITS_PER_NAT: f64 = std::f64::consts::LOG2_E;

pub fn mw_to_w(p_mw: f64) -> f64 {
    p_mw * 1e-3
}

/// Connection pattern: `b = 1` iff `|a|² > zero_thresh`.
pub fn mapping_from_analog(a: &CMat, zero_thresh: f64) -> MappingMatrix {
    MappingMatrix::new(a.map(|z| z.norm_sqr() > zero_thresh))
}

/// A violated constraint of the energy-efficiency problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Analog entry whose modulus is neither 0 nor 1; `excess` is its distance
    /// to the nearer admissible value.
    Modulus { t: usize, n: usize, excess: f64 },
    /// Antenna whose radiated power exceeds its cap by `excess` mW.
    Power { t: usize, excess: f64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the sparsity-modulus condition and the per-antenna power caps.
pub fn check_feasibility(w: &CMat, a: &CMat, params: &PowerParams) -> Result<FeasibilityReport> {
    let powers = per_antenna_power(w, a)?;
    if params.p_max_per_antenna.len() != a.nrows() {
        return Err(dim_err("cap vector length differs from N_T"));
    }
    let mut violations = Vec::new();
    for t in 0..a.nrows() {
        for n in 0..a.ncols() {
            let m = a[(t, n)].norm();
            let excess = (m - 1.0).abs().min(m);
            if excess > MODULUS_TOL {
                violations.push(Violation::Modulus { t, n, excess });
            }
        }
    }
    for (t, (&p, &cap)) in powers.iter().zip(&params.p_max_per_antenna).enumerate() {
        if p > cap + POWER_TOL {
            violations.push(Violation::Power { t, excess: p - cap });
        }
    }
    Ok(FeasibilityReport { violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;
    use approx_eq::close;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    mod approx_eq {
        pub fn close(a: f64, b: f64, tol: f64) -> bool {
            (a - b).abs() <= tol
        }
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_mat(rng: &mut ChaCha8Rng, r: usize, cols: usize) -> CMat {
        CMat::from_fn(r, cols, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn scalar(x: f64) -> CMat {
        CMat::from_element(1, 1, c(x, 0.0))
    }

    #[test]
    fn scalar_sinr() {
        let h = CVec::from_element(1, c(1.0, 0.0));
        assert!(close(sinr(&h, &scalar(2.0), &scalar(1.0), 0, 1.0).unwrap(), 4.0, 1e-15));
        assert_eq!(sinr(&h, &scalar(0.0), &scalar(1.0), 0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn sinr_matches_elementwise_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (nt, nrf, k) = (2, 2, 2);
        let h = rand_mat(&mut rng, nt, k);
        let a = rand_mat(&mut rng, nt, nrf);
        let w = rand_mat(&mut rng, nrf, k);
        let sigma2 = 0.3;
        for user in 0..k {
            // Hand-rolled h_kᴴ A w_j.
            let amp = |j: usize| {
                let mut acc = c(0.0, 0.0);
                for t in 0..nt {
                    for n in 0..nrf {
                        acc += h[(t, user)].conj() * a[(t, n)] * w[(n, j)];
                    }
                }
                acc
            };
            let sig = amp(user).norm_sqr();
            let intf: f64 = (0..k).filter(|&j| j != user).map(|j| amp(j).norm_sqr()).sum();
            let oracle = sig / (intf + sigma2);
            let got = sinr(&h.column(user).into_owned(), &w, &a, user, sigma2).unwrap();
            assert!((got - oracle).abs() <= 1e-12, "{got} vs {oracle}");
        }
    }

    #[test]
    fn sinr_rejects_bad_dims() {
        let h = CVec::from_element(2, c(1.0, 0.0));
        assert!(matches!(sinr(&h, &scalar(1.0), &scalar(1.0), 0, 1.0), Err(Error::Dimension(_))));
        let h1 = CVec::from_element(1, c(1.0, 0.0));
        assert!(sinr(&h1, &scalar(1.0), &scalar(1.0), 3, 1.0).is_err());
    }

    #[test]
    fn sum_rate_cases() {
        let h = ChannelMatrix::new(CMat::from_element(1, 1, c(1.0, 0.0))).unwrap();
        assert!(close(sum_rate(&h, &scalar(2.0), &scalar(1.0), 1.0).unwrap(), 5f64.ln(), 1e-15));
        assert_eq!(sum_rate(&h, &scalar(0.0), &scalar(1.0), 1.0).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let hm = ChannelMatrix::new(rand_mat(&mut rng, 3, 2)).unwrap();
        let a = rand_mat(&mut rng, 3, 2);
        let w = rand_mat(&mut rng, 2, 2);
        let oracle: f64 = (0..2)
            .map(|k| sinr(&hm.user(k), &w, &a, k, 0.5).unwrap().ln_1p())
            .sum();
        assert!(close(sum_rate(&hm, &w, &a, 0.5).unwrap(), oracle, 1e-12));
    }

    #[test]
    fn gca_counts() {
        let dims = SystemDims::new(64, 8, 8).unwrap();
        let mut p = PowerParams::reference(64);
        assert_eq!(gca_count(&dims, &p), 1);
        p.l_d = 3.0;
        p.l_c = 3.0;
        assert_eq!(gca_count(&dims, &p), 2);
        p.l_d = 0.0;
        p.l_c = 0.0;
        p.l_sw = 0.0;
        p.l_ps = 0.0;
        assert_eq!(gca_count(&dims, &p), 0);
    }

    #[test]
    fn sparsity_power_counts() {
        let p = PowerParams::reference(2);
        assert_eq!(sparsity_power(&MappingMatrix::zeros(2, 2), &p, 1), 0.0);
        assert!(close(sparsity_power(&MappingMatrix::ones(2, 2), &p, 1), 726.0, 1e-12));
        let mut b = MappingMatrix::zeros(2, 2);
        b.set(1, 0, true);
        assert!(close(sparsity_power(&b, &p, 1), 323.0, 1e-12));
    }

    #[test]
    fn transmit_power_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = rand_mat(&mut rng, 3, 2);
        assert_eq!(transmit_power(&CMat::zeros(2, 2), &a).unwrap(), 0.0);
        let eye = CMat::identity(3, 3);
        let w = CMat::from_column_slice(3, 1, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert!(close(transmit_power(&w, &eye).unwrap(), 3.0, 1e-15));

        let w = rand_mat(&mut rng, 2, 4);
        let mut oracle = 0.0;
        for t in 0..3 {
            for k in 0..4 {
                let mut s = c(0.0, 0.0);
                for n in 0..2 {
                    s += a[(t, n)] * w[(n, k)];
                }
                oracle += s.norm_sqr();
            }
        }
        assert!(close(transmit_power(&w, &a).unwrap(), oracle, 1e-12));
    }

    #[test]
    fn total_power_composition() {
        let dims = SystemDims::new(2, 2, 2).unwrap();
        let mut p = PowerParams::reference(2);
        let w0 = CMat::zeros(2, 2);
        let a0 = CMat::zeros(2, 2);
        assert!(close(total_power(&w0, &a0, &dims, &p, None).unwrap(), 608.0, 1e-12));
        let ones = MappingMatrix::ones(2, 2);
        assert!(close(total_power(&w0, &a0, &dims, &p, Some(&ones)).unwrap(), 1334.0, 1e-12));
        // Radiated power of 30 mW through an identity analog stage.
        p.rho_pa = 0.3;
        let a = CMat::identity(2, 2);
        let w = CMat::from_column_slice(2, 2, &[c(30f64.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let got = total_power(&w, &a, &dims, &p, Some(&ones)).unwrap();
        assert!(close(got, 1334.0 + (1.0 + 1.0 / 0.3) * 30.0, 1e-9), "{got}");
        assert!(close(got, 1464.0, 1e-9));
    }

    #[test]
    fn see_definition_and_noise_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dims = SystemDims::new(3, 2, 2).unwrap();
        let p = PowerParams::reference(3);
        let h = ChannelMatrix::new(rand_mat(&mut rng, 3, 2)).unwrap();
        let a = CMat::from_fn(3, 2, |t, n| C64::from_polar(1.0, (t * 2 + n) as f64));
        let w = rand_mat(&mut rng, 2, 2);
        assert_eq!(see(&CMat::zeros(2, 2), &a, &h, &dims, &p, 1.0).unwrap(), 0.0);
        let e1 = see(&w, &a, &h, &dims, &p, 0.1).unwrap();
        let r = sum_rate(&h, &w, &a, 0.1).unwrap();
        let tp = total_power(&w, &a, &dims, &p, None).unwrap();
        assert!(close(e1, r / (tp / 1000.0), 1e-12));
        let e2 = see(&w, &a, &h, &dims, &p, 0.2).unwrap();
        assert!(e2 < e1);
    }

    #[test]
    fn mapping_thresholds() {
        let a = CMat::from_fn(2, 2, |t, n| C64::from_polar(1.0, (t + n) as f64));
        assert_eq!(mapping_from_analog(&a, 0.5), MappingMatrix::ones(2, 2));
        assert_eq!(mapping_from_analog(&CMat::zeros(2, 2), 0.5), MappingMatrix::zeros(2, 2));
        let m = CMat::from_row_slice(1, 2, &[c(0.9999999, 0.0), c(1e-9, 0.0)]);
        let b = mapping_from_analog(&m, 0.5);
        assert!(b.get(0, 0) && !b.get(0, 1));
    }

    #[test]
    fn feasibility_reports() {
        let p = PowerParams::reference(2);
        let a = CMat::identity(2, 2);
        let w = CMat::from_element(2, 1, c(1.0, 0.0));
        assert!(check_feasibility(&w, &a, &p).unwrap().is_feasible());

        let mut a_bad = a.clone();
        a_bad[(0, 0)] = c(0.5, 0.0);
        let rep = check_feasibility(&w, &a_bad, &p).unwrap();
        assert_eq!(rep.violations.len(), 1);
        match rep.violations[0] {
            Violation::Modulus { t: 0, n: 0, excess } => assert!(close(excess, 0.5, 1e-15)),
            ref v => panic!("unexpected {v:?}"),
        }

        let w_hot = CMat::from_column_slice(2, 1, &[c(51f64.sqrt(), 0.0), c(0.0, 0.0)]);
        let rep = check_feasibility(&w_hot, &a, &p).unwrap();
        assert_eq!(rep.violations.len(), 1);
        match rep.violations[0] {
            Violation::Power { t: 0, excess } => assert!(close(excess, 1.0, 1e-9)),
            ref v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn dims_validation() {
        assert!(SystemDims::new(4, 1, 2).is_err());
        assert!(SystemDims::new(0, 1, 1).is_err());
        assert!(SystemDims::new(4, 2, 2).is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, Strategy};

        fn arb_case() -> impl Strategy<Value = (u64, f64)> {
            (any::<u64>(), 0.01f64..10.0)
        }

        proptest! {
            #[test]
            fn rate_and_power_invariants((seed, scale) in arb_case()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let dims = SystemDims::new(4, 2, 2).unwrap();
                let p = PowerParams::reference(4);
                let h = ChannelMatrix::new(rand_mat(&mut rng, 4, 2)).unwrap();
                let a = rand_mat(&mut rng, 4, 2);
                let w = rand_mat(&mut rng, 2, 2);
                for k in 0..2 {
                    prop_assert!(sinr(&h.user(k), &w, &a, k, 0.3).unwrap() >= 0.0);
                }
                prop_assert!(sum_rate(&h, &w, &a, 0.3).unwrap() >= 0.0);
                let tp = total_power(&w, &a, &dims, &p, None).unwrap();
                prop_assert!(tp >= p.p_cons(&dims) && p.p_cons(&dims) > 0.0);
                let base = transmit_power(&w, &a).unwrap();
                let scaled = transmit_power(&w.scale(scale), &a).unwrap();
                prop_assert!((scaled - scale * scale * base).abs() <= 1e-9 * (1.0 + scaled));
            }

            #[test]
            fn sparsity_power_is_monotone(bits in proptest::collection::vec(any::<bool>(), 12), extra in 0usize..12) {
                let p = PowerParams::reference(4);
                let b = MappingMatrix::new(DMatrix::from_column_slice(4, 3, &bits));
                let mut bigger = b.clone();
                bigger.b[extra] = true;
                prop_assert!(sparsity_power(&bigger, &p, 1) >= sparsity_power(&b, &p, 1));
            }

            #[test]
            fn finalized_pattern_count_matches(bits in proptest::collection::vec(any::<bool>(), 12), seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = CMat::from_fn(4, 3, |t, n| {
                    if bits[t + 4 * n] { C64::from_polar(1.0, rng.random_range(0.0..6.0)) } else { c(0.0, 0.0) }
                });
                let b = mapping_from_analog(&a, 0.5);
                let l0 = a.iter().filter(|z| z.norm() > 0.5).count();
                prop_assert_eq!(b.active_entries(), l0);
            }
        }
    }
}
