//! Seeded Monte-Carlo experiments over parameter sweeps, written as CSV.
//!
//! # Config format
//!
//! Plain text, one `key = value` per line under `[section]` headers. `#`
//! starts a comment. Lists are comma separated. Every key is optional and
//! falls back to the [`ExperimentConfig::default`] value.
//!
//! ```text
//! [dims]
//! n_tx = 8, 16, 32
//! n_rf = 2, 4
//! n_users = n_rf        # a list, or `n_rf` to tie K to N_RF
//!
//! [power]
//! p_max = 10, 25, 50, 100   # per-antenna cap sweep (mW)
//! p_bb = 300                # also p_dac p_rfc p_sw p_ps p_amp g_amp rho_pa l_d l_c l_sw l_ps
//!
//! [channel]
//! n_clusters = 3            # also n_paths alpha_var carrier_ghz distance_m
//! noise_mw = 1.2e-10        # abg_alpha abg_beta abg_gamma
//!
//! [solver]
//! tau_out = 1e-4            # also tau_in tau_up eps_sparsity zero_thresh max_outer max_inner
//!
//! [run]
//! realizations = 20
//! seed = 1
//! methods = proposed, heuristic, upper_bound
//! output = results.csv
//! strict = false
//! record_time = false
//! ```
//!
//! Sweep points are the product of the dimension lists and `p_max`; points
//! with `n_rf < n_users` are skipped. The channel of a realization depends
//! on the base seed, the dimensions and the realization index, so every
//! `p_max` value sees the same channels.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::baselines::{heuristic_from, run_fdp_upper, upper_bound_see, FdpUpper};
use crate::channel::{generate_channel, ChannelParams, DEFAULT_NOISE_MW};
use crate::dinkelbach::{run_seem_with, SeemOptions};
use crate::model::{check_feasibility, mapping_from_analog, sum_rate, total_power, BITS_PER_NAT};
use crate::{CMat, Error, HybridPrecoder, MappingMatrix, PowerParams, Result, SystemDims, Tolerances};

/// First line of every results file.
pub const CSV_VERSION_LINE: &str = "# hybrid-ee v1";

pub const CSV_COLUMNS: [&str; 20] = [
    "n_tx",
    "n_rf",
    "n_users",
    "p_max_mw",
    "realization",
    "seed",
    "method",
    "status",
    "see_nats",
    "see_bits",
    "bound_see_nats",
    "sum_rate",
    "total_power_mw",
    "pct_active_ps",
    "pct_active_rf",
    "pct_active_ant",
    "outer_iters",
    "see_relaxed_nats",
    "feasible",
    "wall_ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Proposed,
    Heuristic,
    UpperBound,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Proposed, Method::Heuristic, Method::UpperBound];

    pub fn name(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Heuristic => "heuristic",
            Method::UpperBound => "upper_bound",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "proposed" => Ok(Method::Proposed),
            "heuristic" => Ok(Method::Heuristic),
            "upper_bound" => Ok(Method::UpperBound),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// Parses a comma-separated method list.
pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let mut out: Vec<Method> = s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(Error::Config("method list is empty".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum UsersSweep {
    List(Vec<usize>),
    /// `K = N_RF` at every point.
    MatchRf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_tx: Vec<usize>,
    pub n_rf: Vec<usize>,
    pub n_users: UsersSweep,
    pub p_max: Vec<f64>,
    /// Hardware figures; the cap vector is replaced at every sweep point.
    pub power: PowerParams,
    pub channel: ChannelParams,
    pub noise_mw: f64,
    pub tolerances: Tolerances,
    pub seem: SeemOptions,
    pub n_realizations: usize,
    pub base_seed: u64,
    pub methods: Vec<Method>,
    pub output: Option<PathBuf>,
    /// Solver failures make the run fail instead of only being recorded.
    pub strict: bool,
    /// Fill `wall_ms`; off by default so output is reproducible bit for bit.
    pub record_time: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_tx: vec![16],
            n_rf: vec![4],
            n_users: UsersSweep::List(vec![4]),
            p_max: vec![50.0],
            power: PowerParams::reference(0),
            channel: ChannelParams::default(),
            noise_mw: DEFAULT_NOISE_MW,
            tolerances: Tolerances::default(),
            seem: SeemOptions::default(),
            n_realizations: 1,
            base_seed: 1,
            methods: Method::ALL.to_vec(),
            output: None,
            strict: false,
            record_time: false,
        }
    }
}

/// One point of the parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub dims: SystemDims,
    pub p_max: f64,
}

impl ExperimentConfig {
    /// Small preset: `N_T ∈ {8, 16, 32}`, `N_RF = K ∈ {2, 4}`, 20 realizations.
    pub fn desk_preset() -> Self {
        Self {
            n_tx: vec![8, 16, 32],
            n_rf: vec![2, 4],
            n_users: UsersSweep::MatchRf,
            n_realizations: 20,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.n_tx.is_empty() || self.n_rf.is_empty() || self.p_max.is_empty() {
            return cfg("sweep lists must be nonempty".into());
        }
        if let UsersSweep::List(k) = &self.n_users {
            if k.is_empty() {
                return cfg("n_users must be nonempty".into());
            }
        }
        if self.n_realizations == 0 {
            return cfg("realizations must be >= 1".into());
        }
        if self.methods.is_empty() {
            return cfg("methods must be nonempty".into());
        }
        if !(self.noise_mw > 0.0 && self.noise_mw.is_finite()) {
            return cfg("noise_mw must be > 0".into());
        }
        if self.seem.max_outer == 0 || self.seem.max_inner == 0 {
            return cfg("max_outer and max_inner must be >= 1".into());
        }
        let points = self.sweep_points();
        if points.is_empty() {
            return cfg("no sweep point has n_rf >= n_users".into());
        }
        for p in &points {
            self.params_for(p).validate(&p.dims).map_err(|e| Error::Config(e.to_string()))?;
        }
        self.channel.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.tolerances.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// Sweep points in output order.
    pub fn sweep_points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for &n_tx in &self.n_tx {
            for &n_rf in &self.n_rf {
                let users = match &self.n_users {
                    UsersSweep::List(k) => k.clone(),
                    UsersSweep::MatchRf => vec![n_rf],
                };
                for k in users {
                    let dims = SystemDims { n_tx, n_rf, n_users: k };
                    if dims.validate().is_err() {
                        continue;
                    }
                    for &p_max in &self.p_max {
                        out.push(SweepPoint { dims, p_max });
                    }
                }
            }
        }
        out
    }

    pub fn params_for(&self, point: &SweepPoint) -> PowerParams {
        self.power.clone().with_uniform_cap(point.dims.n_tx, point.p_max)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Channel seed of a realization: `base ⊕ hash(N_T, N_RF, K, index)`.
pub fn realization_seed(base_seed: u64, dims: &SystemDims, realization: usize) -> u64 {
    let h = [dims.n_tx, dims.n_rf, dims.n_users, realization]
        .iter()
        .fold(0u64, |acc, &v| splitmix(acc ^ v as u64));
    base_seed ^ h
}

/// Percentages of active phase shifters, RF chains and antennas of a
/// finalized analog matrix (an entry is active when nonzero).
pub fn activation_metrics(a: &CMat) -> (f64, f64, f64) {
    let b = MappingMatrix::new(a.map(|z| z.norm_sqr() > 0.0));
    mapping_metrics(&b)
}

/// As [`activation_metrics`] for a connection pattern.
pub fn mapping_metrics(b: &MappingMatrix) -> (f64, f64, f64) {
    let (n_tx, n_rf) = (b.n_tx(), b.n_rf());
    if n_tx == 0 || n_rf == 0 {
        return (0.0, 0.0, 0.0);
    }
    (
        100.0 * b.active_entries() as f64 / (n_tx * n_rf) as f64,
        100.0 * b.active_rf_chains() as f64 / n_rf as f64,
        100.0 * b.active_antennas() as f64 / n_tx as f64,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Ok,
    /// Finished, but an iteration limit was hit.
    NotConverged,
    Failed(String),
}

impl Status {
    pub fn label(&self) -> String {
        match self {
            Status::Ok => "ok".into(),
            Status::NotConverged => "not_converged".into(),
            Status::Failed(m) => format!("failed: {}", m.replace([',', '\n'], ";")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub point: SweepPoint,
    pub point_index: usize,
    pub realization: usize,
    pub seed: u64,
    pub method: Method,
    pub status: Status,
    /// nats/Hz/W.
    pub see: f64,
    /// `η̄(U, B)` with `B` the pattern of this record's design (nats/Hz/W).
    pub bound_see: f64,
    pub sum_rate: f64,
    pub total_power_mw: f64,
    pub pct_active_ps: f64,
    pub pct_active_rf: f64,
    pub pct_active_ant: f64,
    pub outer_iters: usize,
    pub see_relaxed: f64,
    pub feasible: bool,
    pub wall_ms: u64,
}

impl ExperimentRecord {
    fn failed(point: SweepPoint, point_index: usize, realization: usize, seed: u64, method: Method, err: &Error) -> Self {
        Self {
            point,
            point_index,
            realization,
            seed,
            method,
            status: Status::Failed(err.to_string()),
            see: f64::NAN,
            bound_see: f64::NAN,
            sum_rate: f64::NAN,
            total_power_mw: f64::NAN,
            pct_active_ps: f64::NAN,
            pct_active_rf: f64::NAN,
            pct_active_ant: f64::NAN,
            outer_iters: 0,
            see_relaxed: f64::NAN,
            feasible: false,
            wall_ms: 0,
        }
    }

    pub fn see_bits(&self) -> f64 {
        self.see * BITS_PER_NAT
    }

    fn csv_line(&self) -> String {
        let mut s = String::new();
        let d = self.point.dims;
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            d.n_tx,
            d.n_rf,
            d.n_users,
            self.point.p_max,
            self.realization,
            self.seed,
            self.method.name(),
            self.status.label(),
            self.see,
            self.see_bits(),
            self.bound_see,
            self.sum_rate,
            self.total_power_mw,
            self.pct_active_ps,
            self.pct_active_rf,
            self.pct_active_ant,
            self.outer_iters,
            self.see_relaxed,
            self.feasible,
            self.wall_ms,
        );
        s
    }
}

/// Runs one realization of one sweep point for every configured method.
fn run_task(cfg: &ExperimentConfig, point_index: usize, point: SweepPoint, realization: usize) -> Vec<ExperimentRecord> {
    let dims = point.dims;
    let params = cfg.params_for(&point);
    let seed = realization_seed(cfg.base_seed, &dims, realization);
    let sigma2 = cfg.noise_mw;
    let tol = &cfg.tolerances;
    let fail_all = |e: &Error| -> Vec<ExperimentRecord> {
        cfg.methods.iter().map(|&m| ExperimentRecord::failed(point, point_index, realization, seed, m, e)).collect()
    };
    let h = match generate_channel(&dims, &cfg.channel, seed) {
        Ok(h) => h,
        Err(e) => return fail_all(&e),
    };
    let clock = |t: Instant| if cfg.record_time { t.elapsed().as_millis() as u64 } else { 0 };

    let t0 = Instant::now();
    let fdp: Option<Result<FdpUpper>> = (cfg.methods.contains(&Method::Heuristic) || cfg.methods.contains(&Method::UpperBound))
        .then(|| run_fdp_upper(&h, &dims, &params, sigma2, tol.tau_up));
    let fdp_ms = clock(t0);
    let bound = |b: &MappingMatrix| -> f64 {
        match &fdp {
            Some(Ok(f)) => upper_bound_see(f, b, &dims, &params).unwrap_or(f64::NAN),
            _ => f64::NAN,
        }
    };

    let design_record = |method: Method, p: &HybridPrecoder, see_relaxed: f64, outer: usize, converged: bool, ms: u64| -> Result<ExperimentRecord> {
        let rate = sum_rate(&h, &p.w, &p.a, sigma2)?;
        let power = total_power(&p.w, &p.a, &dims, &params, None)?;
        let (ps, rf, ant) = activation_metrics(&p.a);
        let feasible = check_feasibility(&p.w, &p.a, &params)?.is_feasible();
        Ok(ExperimentRecord {
            point,
            point_index,
            realization,
            seed,
            method,
            status: if converged { Status::Ok } else { Status::NotConverged },
            see: rate / crate::model::mw_to_w(power),
            bound_see: bound(&mapping_from_analog(&p.a, tol.zero_thresh)),
            sum_rate: rate,
            total_power_mw: power,
            pct_active_ps: ps,
            pct_active_rf: rf,
            pct_active_ant: ant,
            outer_iters: outer,
            see_relaxed,
            feasible,
            wall_ms: ms,
        })
    };

    let mut out = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let t = Instant::now();
        let rec = match method {
            Method::Proposed => run_seem_with(&h, &dims, &params, sigma2, tol, &cfg.seem, None).and_then(|r| {
                let ok = r.converged && r.inner_nonconverged == 0;
                design_record(method, &r.precoder, r.see_relaxed, r.outer_iterations, ok, clock(t))
            }),
            Method::Heuristic => match &fdp {
                Some(Ok(f)) => heuristic_from(f, &h, &dims, &params, sigma2).and_then(|r| {
                    design_record(method, &r.precoder, f64::NAN, r.rounds, f.converged, clock(t) + fdp_ms)
                }),
                Some(Err(e)) => Err(Error::InvalidInput(e.to_string())),
                None => unreachable!("bound is computed when the heuristic runs"),
            },
            Method::UpperBound => match &fdp {
                Some(Ok(f)) => {
                    let ones = MappingMatrix::ones(dims.n_tx, dims.n_rf);
                    let see = bound(&ones);
                    let (ps, rf, ant) = mapping_metrics(&ones);
                    let power = see.recip() * f.sum_rate * 1e3;
                    Ok(ExperimentRecord {
                        point,
                        point_index,
                        realization,
                        seed,
                        method,
                        status: if f.converged { Status::Ok } else { Status::NotConverged },
                        see,
                        bound_see: see,
                        sum_rate: f.sum_rate,
                        total_power_mw: power,
                        pct_active_ps: ps,
                        pct_active_rf: rf,
                        pct_active_ant: ant,
                        outer_iters: f.iterations,
                        see_relaxed: f.eta_tilde,
                        feasible: true,
                        wall_ms: fdp_ms,
                    })
                }
                Some(Err(e)) => Err(Error::InvalidInput(e.to_string())),
                None => unreachable!("bound is computed when requested"),
            },
        };
        out.push(rec.unwrap_or_else(|e| ExperimentRecord::failed(point, point_index, realization, seed, method, &e)));
    }
    out
}

/// Runs every (sweep point, realization) task, in parallel on the current
/// rayon pool. Records come back sorted by sweep point, seed and method.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let points = cfg.sweep_points();
    let tasks: Vec<(usize, SweepPoint, usize)> = points
        .iter()
        .enumerate()
        .flat_map(|(i, p)| (0..cfg.n_realizations).map(move |r| (i, *p, r)))
        .collect();
    let mut records: Vec<ExperimentRecord> = tasks.par_iter().flat_map_iter(|&(i, p, r)| run_task(cfg, i, p, r)).collect();
    records.sort_by(|a, b| (a.point_index, a.seed, a.realization, a.method).cmp(&(b.point_index, b.seed, b.realization, b.method)));
    Ok(records)
}

/// As [`run_experiment`] on a dedicated pool of `jobs` threads.
pub fn run_experiment_with_jobs(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<ExperimentRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    pool.install(|| run_experiment(cfg))
}

pub fn write_csv<W: Write>(mut out: W, records: &[ExperimentRecord]) -> Result<()> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for r in records {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

pub fn write_csv_file(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_csv(&mut w, records)?;
    w.flush()?;
    Ok(())
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| Error::Config(format!("bad value `{}` for `{key}`", p.trim()))))
        .collect()
}

fn scalar<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse::<T>().map_err(|_| Error::Config(format!("bad value `{}` for `{key}`", v.trim())))
}

/// Parses the config text described in the module docs.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |e: Error| match e {
            Error::Config(m) => Error::Config(format!("line {}: {m}", lineno + 1)),
            other => other,
        };
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| at(Error::Config(format!("malformed section `{line}`"))))?;
            section = name.trim().to_string();
            if !["dims", "power", "channel", "solver", "run"].contains(&section.as_str()) {
                return Err(at(Error::Config(format!("unknown section `{section}`"))));
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| at(Error::Config(format!("expected `key = value`, got `{line}`"))))?;
        let (key, value) = (key.trim(), value.trim());
        apply(&mut cfg, &section, key, value).map_err(at)?;
    }
    Ok(cfg)
}

fn apply(cfg: &mut ExperimentConfig, section: &str, key: &str, v: &str) -> Result<()> {
    let p = &mut cfg.power;
    let c = &mut cfg.channel;
    let t = &mut cfg.tolerances;
    match (section, key) {
        ("dims", "n_tx") => cfg.n_tx = list(key, v)?,
        ("dims", "n_rf") => cfg.n_rf = list(key, v)?,
        ("dims", "n_users") if v == "n_rf" => cfg.n_users = UsersSweep::MatchRf,
        ("dims", "n_users") => cfg.n_users = UsersSweep::List(list(key, v)?),
        ("power", "p_max") => cfg.p_max = list(key, v)?,
        ("power", "p_bb") => p.p_bb = scalar(key, v)?,
        ("power", "p_dac") => p.p_dac = scalar(key, v)?,
        ("power", "p_rfc") => p.p_rfc = scalar(key, v)?,
        ("power", "p_sw") => p.p_sw = scalar(key, v)?,
        ("power", "p_ps") => p.p_ps = scalar(key, v)?,
        ("power", "p_amp") => p.p_amp = scalar(key, v)?,
        ("power", "g_amp") => p.g_amp = scalar(key, v)?,
        ("power", "rho_pa") => p.rho_pa = scalar(key, v)?,
        ("power", "l_d") => p.l_d = scalar(key, v)?,
        ("power", "l_c") => p.l_c = scalar(key, v)?,
        ("power", "l_sw") => p.l_sw = scalar(key, v)?,
        ("power", "l_ps") => p.l_ps = scalar(key, v)?,
        ("channel", "n_clusters") => c.n_clusters = scalar(key, v)?,
        ("channel", "n_paths") => c.n_paths = scalar(key, v)?,
        ("channel", "alpha_var") => c.alpha_var = scalar(key, v)?,
        ("channel", "carrier_ghz") => c.carrier_ghz = scalar(key, v)?,
        ("channel", "distance_m") => c.distance_m = scalar(key, v)?,
        ("channel", "abg_alpha") => c.abg.alpha = scalar(key, v)?,
        ("channel", "abg_beta") => c.abg.beta = scalar(key, v)?,
        ("channel", "abg_gamma") => c.abg.gamma = scalar(key, v)?,
        ("channel", "noise_mw") => cfg.noise_mw = scalar(key, v)?,
        ("solver", "tau_out") => t.tau_out = scalar(key, v)?,
        ("solver", "tau_in") => t.tau_in = scalar(key, v)?,
        ("solver", "tau_up") => t.tau_up = scalar(key, v)?,
        ("solver", "eps_sparsity") => t.eps_sparsity = scalar(key, v)?,
        ("solver", "zero_thresh") => t.zero_thresh = scalar(key, v)?,
        ("solver", "max_outer") => cfg.seem.max_outer = scalar(key, v)?,
        ("solver", "max_inner") => cfg.seem.max_inner = scalar(key, v)?,
        ("run", "realizations") => cfg.n_realizations = scalar(key, v)?,
        ("run", "seed") => cfg.base_seed = scalar(key, v)?,
        ("run", "methods") => cfg.methods = parse_methods(v)?,
        ("run", "output") => cfg.output = Some(PathBuf::from(v)),
        ("run", "strict") => cfg.strict = scalar(key, v)?,
        ("run", "record_time") => cfg.record_time = scalar(key, v)?,
        ("", _) => return Err(Error::Config(format!("`{key}` appears before any section"))),
        _ => return Err(Error::Config(format!("unknown key `{key}` in [{section}]"))),
    }
    Ok(())
}

/// Reads, parses and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let cfg = parse_config(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    fn tiny() -> ExperimentConfig {
        ExperimentConfig {
            n_tx: vec![4],
            n_rf: vec![2],
            n_users: UsersSweep::List(vec![2]),
            n_realizations: 2,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn activation_cases() {
        let one = C64::new(1.0, 0.0);
        assert_eq!(activation_metrics(&CMat::from_element(4, 2, one)), (100.0, 100.0, 100.0));
        assert_eq!(activation_metrics(&CMat::zeros(4, 2)), (0.0, 0.0, 0.0));
        let mut a = CMat::zeros(4, 2);
        a[(1, 0)] = one;
        assert_eq!(activation_metrics(&a), (12.5, 50.0, 25.0));
    }

    #[test]
    fn parses_full_config() {
        let text = "
            # desk sweep
            [dims]
            n_tx = 8, 16
            n_rf = 2,4
            n_users = n_rf
            [power]
            p_max = 10, 50   # mW
            p_ps = 30
            [channel]
            noise_mw = 1.2e-11
            [solver]
            tau_out = 1e-3
            max_outer = 7
            [run]
            realizations = 3
            seed = 42
            methods = heuristic, proposed
            output = out.csv
            strict = true
        ";
        let cfg = parse_config(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.n_tx, vec![8, 16]);
        assert_eq!(cfg.n_users, UsersSweep::MatchRf);
        assert_eq!(cfg.p_max, vec![10.0, 50.0]);
        assert_eq!(cfg.power.p_ps, 30.0);
        assert_eq!(cfg.noise_mw, 1.2e-11);
        assert_eq!(cfg.tolerances.tau_out, 1e-3);
        assert_eq!(cfg.seem.max_outer, 7);
        assert_eq!(cfg.n_realizations, 3);
        assert_eq!(cfg.base_seed, 42);
        assert_eq!(cfg.methods, vec![Method::Proposed, Method::Heuristic]);
        assert_eq!(cfg.output, Some(PathBuf::from("out.csv")));
        assert!(cfg.strict);
        assert_eq!(cfg.sweep_points().len(), 8);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "[dims]\nn_tx = eight",
            "[nope]",
            "n_tx = 4",
            "[dims]\nwidth = 3",
            "[run]\nmethods = proposed, magic",
            "[dims\nn_tx = 4",
            "[run]\nrealizations",
        ] {
            assert!(matches!(parse_config(text), Err(Error::Config(_))), "{text}");
        }
        for text in ["[run]\nrealizations = 0", "[dims]\nn_rf = 2\nn_users = 4", "[power]\np_max = -1"] {
            assert!(matches!(parse_config(text).unwrap().validate(), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn sweep_skips_points_with_too_few_chains() {
        let cfg = ExperimentConfig { n_rf: vec![2, 4], n_users: UsersSweep::List(vec![2, 4]), ..tiny() };
        let pts: Vec<(usize, usize)> = cfg.sweep_points().iter().map(|p| (p.dims.n_rf, p.dims.n_users)).collect();
        assert_eq!(pts, vec![(2, 2), (4, 2), (4, 4)]);
    }

    #[test]
    fn seeds_ignore_the_power_cap_and_differ_across_realizations() {
        let cfg = ExperimentConfig { p_max: vec![10.0, 50.0], ..tiny() };
        let pts = cfg.sweep_points();
        assert_eq!(realization_seed(1, &pts[0].dims, 0), realization_seed(1, &pts[1].dims, 0));
        assert_ne!(realization_seed(1, &pts[0].dims, 0), realization_seed(1, &pts[0].dims, 1));
        assert_ne!(realization_seed(1, &pts[0].dims, 0), realization_seed(2, &pts[0].dims, 0));
    }

    #[test]
    fn record_count_and_order() {
        let recs = run_experiment(&ExperimentConfig { n_realizations: 2, ..tiny() }).unwrap();
        assert_eq!(recs.len(), 6);
        let methods: Vec<Method> = recs.iter().map(|r| r.method).collect();
        assert_eq!(&methods[..3], &Method::ALL);
        assert!(recs.windows(2).all(|w| (w[0].seed, w[0].method) <= (w[1].seed, w[1].method)));
        for r in &recs {
            assert!(!matches!(r.status, Status::Failed(_)), "{:?}", r.status);
            assert!(r.feasible);
            assert!(r.see >= 0.0);
            for pct in [r.pct_active_ps, r.pct_active_rf, r.pct_active_ant] {
                assert!((0.0..=100.0).contains(&pct));
            }
        }
    }

    #[test]
    fn csv_is_reproducible_across_pool_sizes() {
        let cfg = tiny();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&mut a, &run_experiment_with_jobs(&cfg, 1).unwrap()).unwrap();
        write_csv(&mut b, &run_experiment_with_jobs(&cfg, 3).unwrap()).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_VERSION_LINE));
        assert_eq!(lines.next().unwrap().split(',').count(), CSV_COLUMNS.len());
        assert!(lines.all(|l| l.split(',').count() == CSV_COLUMNS.len()));
    }
}
