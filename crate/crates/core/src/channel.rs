//! Clustered Saleh-Valenzuela channels for a planar transmit array and
//! single-antenna users, with ABG path loss.
//!
//! Every user draws from its own ChaCha20 stream: the generator is seeded
//! with the realization seed and `set_stream(k)` selects user `k`, so the
//! channel of a user does not depend on how many other users are drawn.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::model::{ChannelMatrix, SystemDims};
use crate::{CMat, CVec, Error, Result, C64};

/// Noise power at each user in mW (1.2e-13 W).
pub const DEFAULT_NOISE_MW: f64 = 1.2e-10;

/// ABG path-loss parameters: `PL[dB] = 10α·log10(d) + β + 10γ·log10(f_GHz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abg {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for Abg {
    /// External-source defaults for a 60 GHz urban micro-cell; override when
    /// a measured fit is available.
    fn default() -> Self {
        Self { alpha: 3.4, beta: 19.2, gamma: 2.3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    pub n_clusters: usize,
    pub n_paths: usize,
    pub alpha_var: f64,
    pub azimuth_range: (f64, f64),
    pub elevation_range: (f64, f64),
    pub carrier_ghz: f64,
    pub distance_m: f64,
    pub abg: Abg,
    /// Explicit `(rows, cols)` array layout; the most-square factorization of
    /// `N_T` is used when absent.
    pub grid: Option<(usize, usize)>,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            n_clusters: 3,
            n_paths: 10,
            alpha_var: 1.0,
            azimuth_range: (0.0, 2.0 * PI),
            elevation_range: (-PI / 2.0, PI / 2.0),
            carrier_ghz: 60.0,
            distance_m: 100.0,
            abg: Abg::default(),
            grid: None,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidInput(s.to_string()));
        if self.n_clusters == 0 || self.n_paths == 0 {
            return bad("n_clusters and n_paths must be >= 1");
        }
        if !(self.alpha_var > 0.0 && self.alpha_var.is_finite()) {
            return bad("alpha_var must be > 0");
        }
        if !(self.distance_m > 0.0 && self.carrier_ghz > 0.0) {
            return bad("distance_m and carrier_ghz must be > 0");
        }
        let (a0, a1) = self.azimuth_range;
        let (e0, e1) = self.elevation_range;
        if !(a0 <= a1 && e0 <= e1 && a0.is_finite() && a1.is_finite() && e0.is_finite() && e1.is_finite()) {
            return bad("angle ranges must be finite and ordered");
        }
        Ok(())
    }

    /// Array layout for `n_tx` antennas.
    pub fn grid_for(&self, n_tx: usize) -> Result<(usize, usize)> {
        match self.grid {
            Some((r, c)) if r * c == n_tx && r > 0 => Ok((r, c)),
            Some((r, c)) => Err(Error::InvalidInput(format!("grid {r}x{c} does not hold {n_tx} antennas"))),
            None => upa_grid(n_tx),
        }
    }
}

/// Most-square factorization `r·c = n` with `r ≤ c`.
pub fn upa_grid(n_tx: usize) -> Result<(usize, usize)> {
    if n_tx == 0 {
        return Err(Error::InvalidInput("n_tx must be >= 1".into()));
    }
    let mut r = (n_tx as f64).sqrt().floor() as usize;
    while r > 1 && n_tx % r != 0 {
        r -= 1;
    }
    let r = r.max(1);
    Ok((r, n_tx / r))
}

/// Unit-norm planar-array response; antenna `t = m·cols + n` has phase
/// `π(m·sinφ·sinθ + n·cosθ)` (half-wavelength spacing).
pub fn array_response_grid(azimuth: f64, elevation: f64, rows: usize, cols: usize) -> CVec {
    let n = rows * cols;
    let norm = 1.0 / (n as f64).sqrt();
    let u = azimuth.sin() * elevation.sin();
    let v = elevation.cos();
    CVec::from_fn(n, |t, _| C64::from_polar(norm, PI * ((t / cols) as f64 * u + (t % cols) as f64 * v)))
}

/// Array response on the most-square grid for `n_tx` antennas.
pub fn array_response_upa(azimuth: f64, elevation: f64, n_tx: usize) -> Result<CVec> {
    let (r, c) = upa_grid(n_tx)?;
    Ok(array_response_grid(azimuth, elevation, r, c))
}

/// Linear ABG path loss (power ratio, ≥ 1 for realistic parameters).
pub fn path_loss_linear(params: &ChannelParams) -> f64 {
    let db = 10.0 * params.abg.alpha * params.distance_m.log10()
        + params.abg.beta
        + 10.0 * params.abg.gamma * params.carrier_ghz.log10();
    10f64.powf(db / 10.0)
}

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    pub gain: C64,
    pub azimuth: f64,
    pub elevation: f64,
}

/// `√(N_T/(P_L·N_paths)) Σ α·a_t(φ, θ)` for an explicit path list.
pub fn channel_from_paths(paths: &[PathComponent], rows: usize, cols: usize, path_loss: f64) -> CVec {
    let n = rows * cols;
    let scale = (n as f64 / (path_loss * paths.len().max(1) as f64)).sqrt();
    let mut h = CVec::zeros(n);
    for p in paths {
        h.axpy(p.gain * scale, &array_response_grid(p.azimuth, p.elevation, rows, cols), C64::new(1.0, 0.0));
    }
    h
}

fn uniform(rng: &mut ChaCha20Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo { rng.random_range(lo..=hi) } else { lo }
}

/// Draws the `N_C·N_L` paths of user `k`.
pub fn draw_paths(params: &ChannelParams, seed: u64, k: usize) -> Vec<PathComponent> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    let normal = Normal::new(0.0, (params.alpha_var / 2.0).sqrt()).expect("alpha_var validated");
    let n = params.n_clusters * params.n_paths;
    (0..n)
        .map(|_| {
            let gain = C64::new(normal.sample(&mut rng), normal.sample(&mut rng));
            let azimuth = uniform(&mut rng, params.azimuth_range);
            let elevation = uniform(&mut rng, params.elevation_range);
            PathComponent { gain, azimuth, elevation }
        })
        .collect()
}

/// Channel realization for all users; a pure function of its arguments.
pub fn generate_channel(dims: &SystemDims, params: &ChannelParams, seed: u64) -> Result<ChannelMatrix> {
    dims.validate()?;
    params.validate()?;
    let (rows, cols) = params.grid_for(dims.n_tx)?;
    let pl = path_loss_linear(params);
    let mut h = CMat::zeros(dims.n_tx, dims.n_users);
    for k in 0..dims.n_users {
        let hk = channel_from_paths(&draw_paths(params, seed, k), rows, cols, pl);
        h.set_column(k, &hk);
    }
    ChannelMatrix::new(h)
}

/// Writes `K N_T seed` then one line of interleaved re/im values per user.
pub fn write_channel<W: Write>(mut out: W, h: &ChannelMatrix, seed: u64) -> Result<()> {
    writeln!(out, "{} {} {}", h.n_users(), h.n_tx(), seed)?;
    for k in 0..h.n_users() {
        let row: Vec<String> = h
            .h
            .column(k)
            .iter()
            .flat_map(|z| [format!("{:.16e}", z.re), format!("{:.16e}", z.im)])
            .collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

/// Reads the format written by [`write_channel`].
pub fn read_channel<R: BufRead>(input: R) -> Result<(ChannelMatrix, u64)> {
    let bad = |s: String| Error::InvalidInput(format!("channel file: {s}"));
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad("empty".into()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(bad(format!("bad header {header:?}")));
    }
    let parse_usize = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("{s:?}: {e}")));
    let k = parse_usize(fields[0])?;
    let n_tx = parse_usize(fields[1])?;
    let seed = fields[2].parse::<u64>().map_err(|e| bad(format!("seed: {e}")))?;
    let mut h = CMat::zeros(n_tx, k);
    for user in 0..k {
        let line = lines.next().ok_or_else(|| bad(format!("missing row {user}")))??;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}"))))
            .collect::<Result<_>>()?;
        if vals.len() != 2 * n_tx {
            return Err(bad(format!("row {user} has {} values, expected {}", vals.len(), 2 * n_tx)));
        }
        for t in 0..n_tx {
            h[(t, user)] = C64::new(vals[2 * t], vals[2 * t + 1]);
        }
    }
    Ok((ChannelMatrix::new(h)?, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_factorization() {
        assert_eq!(upa_grid(16).unwrap(), (4, 4));
        assert_eq!(upa_grid(8).unwrap(), (2, 4));
        assert_eq!(upa_grid(32).unwrap(), (4, 8));
        assert_eq!(upa_grid(7).unwrap(), (1, 7));
        assert_eq!(upa_grid(1).unwrap(), (1, 1));
        assert!(upa_grid(0).is_err());
        let p = ChannelParams { grid: Some((3, 3)), ..Default::default() };
        assert!(p.grid_for(8).is_err());
        assert_eq!(p.grid_for(9).unwrap(), (3, 3));
    }

    #[test]
    fn broadside_response_is_flat() {
        let a = array_response_upa(0.0, PI / 2.0, 16).unwrap();
        for z in a.iter() {
            assert!((z - C64::new(0.25, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn response_is_unit_norm() {
        for (i, n) in [1usize, 4, 8, 12, 64].into_iter().enumerate() {
            let a = array_response_upa(0.37 * i as f64, -0.2 + 0.1 * i as f64, n).unwrap();
            assert!((a.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn response_2x2_expansion() {
        let a = array_response_upa(PI / 2.0, PI / 2.0, 4).unwrap();
        // Grid (m, n) = (0,0), (0,1), (1,0), (1,1): phases π·m.
        let expect = [0.0, 0.0, PI, PI];
        for (t, ph) in expect.iter().enumerate() {
            assert!((a[t] - C64::from_polar(0.5, *ph)).norm() < 1e-12, "entry {t}: {}", a[t]);
        }
    }

    #[test]
    fn path_loss_cases() {
        let mut p = ChannelParams { abg: Abg { alpha: 0.0, beta: 0.0, gamma: 0.0 }, ..Default::default() };
        assert!((path_loss_linear(&p) - 1.0).abs() < 1e-15);
        p.abg.alpha = 2.0;
        p.distance_m = 10.0;
        assert!((path_loss_linear(&p) - 1e2).abs() < 1e-10);
        p.distance_m = 100.0;
        assert!((path_loss_linear(&p) - 1e4).abs() < 1e-8);
        let base = path_loss_linear(&p);
        p.distance_m = 200.0;
        assert!((path_loss_linear(&p) / base - 4.0).abs() < 1e-9);
        let d = ChannelParams::default();
        let db = 10.0 * path_loss_linear(&d).log10();
        assert!((db - (34.0 * 2.0 + 19.2 + 23.0 * 60f64.log10())).abs() < 1e-9);
    }

    #[test]
    fn deterministic_per_seed() {
        let dims = SystemDims::new(16, 4, 4).unwrap();
        let p = ChannelParams::default();
        let a = generate_channel(&dims, &p, 42).unwrap();
        let b = generate_channel(&dims, &p, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_channel(&dims, &p, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn users_are_stable_under_more_users() {
        let p = ChannelParams::default();
        let two = generate_channel(&SystemDims::new(8, 2, 2).unwrap(), &p, 5).unwrap();
        let four = generate_channel(&SystemDims::new(8, 4, 4).unwrap(), &p, 5).unwrap();
        assert_eq!(two.h.column(1), four.h.column(1));
    }

    #[test]
    fn single_path_closed_form() {
        let p = ChannelParams::default();
        let pl = path_loss_linear(&p);
        let (az, el) = (1.1, 0.3);
        let path = PathComponent { gain: C64::new(1.0, 0.0), azimuth: az, elevation: el };
        let h = channel_from_paths(&[path], 4, 4, pl);
        let oracle = array_response_upa(az, el, 16).unwrap() * C64::new((16.0 / pl).sqrt(), 0.0);
        assert!((&h - &oracle).norm() <= 1e-15 * oracle.norm());
    }

    #[test]
    fn normalization_and_independence() {
        let n_tx = 8;
        let dims = SystemDims::new(n_tx, 2, 2).unwrap();
        let p = ChannelParams::default();
        let pl = path_loss_linear(&p);
        let draws = 10_000;
        let mut energy = 0.0;
        let mut cross = C64::new(0.0, 0.0);
        for s in 0..draws {
            let h = generate_channel(&dims, &p, s).unwrap();
            energy += h.h.column(0).norm_squared();
            cross += h.h[(0, 0)] * h.h[(0, 1)].conj();
        }
        let mean = energy / draws as f64;
        let expect = n_tx as f64 / pl;
        assert!((mean / expect - 1.0).abs() < 0.03, "{mean:e} vs {expect:e}");
        let per_entry = expect / n_tx as f64;
        assert!((cross / draws as f64).norm() < 0.05 * per_entry);
    }

    #[test]
    fn dump_round_trip() {
        let dims = SystemDims::new(8, 3, 3).unwrap();
        let h = generate_channel(&dims, &ChannelParams::default(), 77).unwrap();
        let mut buf = Vec::new();
        write_channel(&mut buf, &h, 77).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("3 8 77\n"));
        let (back, seed) = read_channel(buf.as_slice()).unwrap();
        assert_eq!(seed, 77);
        assert_eq!(back, h);
        assert!(read_channel("2 2 1\n1 2 3\n".as_bytes()).is_err());
    }
}
