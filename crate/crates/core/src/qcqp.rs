//! Dense convex QCQP over complex vectors:
//!
//! ```text
//! minimize    xᴴQx − fᴴx − xᴴf
//! subject to  xᴴM_i x ≤ c_i       (quadratic constraints)
//!             |x_j| ≤ u_j          (optional modulus caps)
//! ```
//!
//! Quadratic constraints are dualized. Each multiplier is updated by exact
//! coordinate maximization of the dual: in closed form when the constraint
//! matrix has rank one and no modulus caps are present, by bisection
//! otherwise. For fixed multipliers the modulus-capped problem is solved by
//! cyclic exact coordinate descent with a free-set Newton step after every
//! sweep; both moves never increase the objective.

use crate::linalg::{hermitian_eigen, max_abs, psd_repair, psd_solve, quad_form};
use crate::{CMat, CVec, C64};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 5000;
/// Symmetry and eigenvalue-floor tolerance for input validation.
pub const PSD_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadConstraint {
    pub m: CMat,
    pub cap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QcqpProblem {
    pub q: CMat,
    pub f: CVec,
    pub quad_constraints: Vec<QuadConstraint>,
    pub modulus_caps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QcqpSolution {
    pub x: CVec,
    pub objective: f64,
    pub iterations: usize,
    /// Scale-normalized KKT residual: the larger of the box-projected
    /// Lagrangian gradient norm over `max(1, 2‖f‖)` and the largest
    /// complementarity product `λ_i |g_i|` over `max(1, |objective|)`.
    pub kkt_residual: f64,
    pub multipliers: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum QcqpError {
    #[error("invalid QCQP: {0}")]
    InvalidProblem(String),
    #[error("QCQP objective is unbounded below")]
    Unbounded,
    #[error("QCQP did not converge (kkt residual {:.3e} after {} iterations)", .0.kkt_residual, .0.iterations)]
    NotConverged(Box<QcqpSolution>),
}

impl QcqpProblem {
    pub fn new(q: CMat, f: CVec) -> Self {
        Self { q, f, quad_constraints: Vec::new(), modulus_caps: None }
    }

    pub fn with_constraint(mut self, m: CMat, cap: f64) -> Self {
        self.quad_constraints.push(QuadConstraint { m, cap });
        self
    }

    pub fn with_modulus_caps(mut self, caps: Vec<f64>) -> Self {
        self.modulus_caps = Some(caps);
        self
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    pub fn objective(&self, x: &CVec) -> f64 {
        quad_form(&self.q, x) - 2.0 * self.f.dotc(x).re
    }

    /// Largest constraint violation of `x` (0 when feasible).
    pub fn max_violation(&self, x: &CVec) -> f64 {
        let mut v: f64 = 0.0;
        for c in &self.quad_constraints {
            v = v.max(quad_form(&c.m, x) - c.cap);
        }
        if let Some(caps) = &self.modulus_caps {
            for (z, u) in x.iter().zip(caps) {
                v = v.max(z.norm() - u);
            }
        }
        v
    }

    fn validate(&self) -> Result<(), QcqpError> {
        let n = self.dim();
        let bad = |s: String| Err(QcqpError::InvalidProblem(s));
        if self.q.shape() != (n, n) {
            return bad(format!("Q is {:?}, expected {n}x{n}", self.q.shape()));
        }
        if self.f.iter().chain(self.q.iter()).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return bad("non-finite entries in Q or f".into());
        }
        check_hermitian_psd(&self.q, "Q")?;
        for (i, c) in self.quad_constraints.iter().enumerate() {
            if c.m.shape() != (n, n) {
                return bad(format!("M_{i} is {:?}, expected {n}x{n}", c.m.shape()));
            }
            if !(c.cap.is_finite() && c.cap >= 0.0) {
                return bad(format!("cap c_{i} = {} must be finite and >= 0", c.cap));
            }
            check_hermitian_psd(&c.m, &format!("M_{i}"))?;
        }
        if let Some(caps) = &self.modulus_caps {
            if caps.len() != n {
                return bad(format!("{} modulus caps for dimension {n}", caps.len()));
            }
            if caps.iter().any(|u| !(*u >= 0.0) || u.is_nan()) {
                return bad("modulus caps must be >= 0".into());
            }
        }
        Ok(())
    }
}

fn check_hermitian_psd(m: &CMat, name: &str) -> Result<(), QcqpError> {
    let scale = max_abs(m).max(1.0);
    let asym = crate::linalg::asymmetry(m);
    if asym > PSD_CHECK_TOL * scale {
        return Err(QcqpError::InvalidProblem(format!("{name} is not Hermitian (asymmetry {asym:.3e})")));
    }
    let (vals, _) = hermitian_eigen(m);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let top = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if min < -PSD_CHECK_TOL * top {
        return Err(QcqpError::InvalidProblem(format!("{name} is not PSD (eigenvalue {min:.3e})")));
    }
    Ok(())
}

/// Clips each entry's modulus to its cap, keeping the phase.
pub fn project_modulus(v: &CVec, caps: &[f64]) -> CVec {
    assert_eq!(v.len(), caps.len(), "project_modulus: length mismatch");
    CVec::from_iterator(v.len(), v.iter().zip(caps).map(|(&z, &u)| clip(z, u)))
}

fn clip(z: C64, u: f64) -> C64 {
    let r = z.norm();
    if r > u {
        if r.is_finite() {
            z * (u / r)
        } else {
            C64::new(u, 0.0)
        }
    } else {
        z
    }
}

/// Solves the QCQP to `tol` starting from `x = 0`.
pub fn solve_qcqp(p: &QcqpProblem, tol: f64, max_iter: usize) -> Result<QcqpSolution, QcqpError> {
    solve_qcqp_warm(p, None, tol, max_iter)
}

/// As [`solve_qcqp`], starting the modulus-capped inner solves from `x0`.
pub fn solve_qcqp_warm(
    p: &QcqpProblem,
    x0: Option<&CVec>,
    tol: f64,
    max_iter: usize,
) -> Result<QcqpSolution, QcqpError> {
    p.validate()?;
    if let Some(x0) = x0 {
        if x0.len() != p.dim() {
            return Err(QcqpError::InvalidProblem("warm start has wrong length".into()));
        }
    }
    Solver::new(p, tol, max_iter).run(x0)
}

enum ConstraintShape {
    Zero,
    Rank1(CVec),
    Dense,
}

struct Constraint {
    m: CMat,
    cap: f64,
    shape: ConstraintShape,
}

struct Solver<'a> {
    p: &'a QcqpProblem,
    q: CMat,
    cons: Vec<Constraint>,
    caps: Option<Vec<f64>>,
    tol: f64,
    max_iter: usize,
    iterations: usize,
    inner_failed: bool,
}

struct Inner {
    x: CVec,
    converged: bool,
}

impl<'a> Solver<'a> {
    fn new(p: &'a QcqpProblem, tol: f64, max_iter: usize) -> Self {
        let (q, _) = psd_repair(&p.q);
        let cons = p
            .quad_constraints
            .iter()
            .map(|c| {
                let (m, _) = psd_repair(&c.m);
                let (vals, vecs) = hermitian_eigen(&m);
                let (imax, top) = vals
                    .iter()
                    .copied()
                    .enumerate()
                    .fold((0, 0.0f64), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
                let rest: f64 = vals.iter().enumerate().filter(|&(i, _)| i != imax).map(|(_, v)| v.max(0.0)).sum();
                let shape = if top <= 0.0 {
                    ConstraintShape::Zero
                } else if rest <= 1e-12 * top {
                    ConstraintShape::Rank1(vecs.column(imax).scale(top.sqrt()))
                } else {
                    ConstraintShape::Dense
                };
                Constraint { m, cap: c.cap, shape }
            })
            .collect();
        Self {
            p,
            q,
            cons,
            caps: p.modulus_caps.clone(),
            tol,
            max_iter,
            iterations: 0,
            inner_failed: false,
        }
    }

    fn gram(&self, lams: &[f64], skip: Option<usize>) -> CMat {
        let mut g = self.q.clone();
        for (i, (c, &l)) in self.cons.iter().zip(lams).enumerate() {
            if l > 0.0 && Some(i) != skip {
                g += c.m.scale(l);
            }
        }
        g
    }

    /// Minimizer of the Lagrangian for fixed multipliers; `None` if unbounded.
    fn inner(&mut self, g: &CMat, warm: &CVec) -> Option<Inner> {
        match &self.caps {
            None => psd_solve(g, &self.p.f).map(|x| Inner { x, converged: true }),
            Some(caps) => {
                let caps = caps.clone();
                if caps.iter().any(|u| u.is_infinite()) && psd_solve(g, &self.p.f).is_none() {
                    // Unbounded directions may still be cut off by finite caps only.
                    let free: Vec<usize> = (0..caps.len()).filter(|&i| caps[i].is_infinite()).collect();
                    let gf = CMat::from_fn(free.len(), free.len(), |a, b| g[(free[a], free[b])]);
                    let ff = CVec::from_iterator(free.len(), free.iter().map(|&i| self.p.f[i]));
                    if psd_solve(&gf, &ff).is_none() {
                        return None;
                    }
                }
                let res = box_qp(g, &self.p.f, &caps, warm, 1e-2 * self.tol, self.max_iter);
                self.iterations += res.sweeps;
                Some(Inner { x: res.x, converged: res.converged })
            }
        }
    }

    fn constraint_value(&self, i: usize, x: &CVec) -> f64 {
        quad_form(&self.cons[i].m, x) - self.cons[i].cap
    }

    fn run(mut self, x0: Option<&CVec>) -> Result<QcqpSolution, QcqpError> {
        let n = self.p.dim();
        let m = self.cons.len();
        let mut lams = vec![0.0; m];
        let mut x = match (x0, &self.caps) {
            (Some(x0), Some(caps)) => project_modulus(x0, caps),
            (Some(x0), None) => x0.clone(),
            (None, _) => CVec::zeros(n),
        };

        let g0 = self.gram(&lams, None);
        let unconstrained = self.inner(&g0, &x);
        let mut done = false;
        match unconstrained {
            Some(inner) => {
                let feasible = (0..m).all(|i| self.constraint_value(i, &inner.x) <= 0.0);
                x = inner.x;
                self.inner_failed |= !inner.converged;
                done = feasible;
            }
            None if m == 0 => return Err(QcqpError::Unbounded),
            None => {}
        }

        let mut converged = true;
        if !done {
            converged = false;
            let mut cycles = 0;
            while cycles < self.max_iter {
                cycles += 1;
                let newton = if m > 1 && cycles > 1 {
                    self.dual_newton_step(&mut lams, &x)
                } else {
                    None
                };
                match newton {
                    Some(xn) => x = xn,
                    None => {
                        for i in 0..m {
                            x = self.update_multiplier(i, &mut lams, &x)?;
                        }
                    }
                }
                let g = self.gram(&lams, None);
                if let Some(inner) = self.inner(&g, &x) {
                    x = inner.x;
                }
                if m == 1 || self.dual_converged(&lams, &x) {
                    converged = true;
                    break;
                }
            }
            self.iterations += cycles;
        }

        let x = self.restore_feasibility(x);
        let objective = self.p.objective(&x);
        let kkt_residual = self.kkt(&lams, &x, objective);
        let sol = QcqpSolution { x, objective, iterations: self.iterations, kkt_residual, multipliers: lams };
        if !converged || self.inner_failed || !(kkt_residual <= self.tol) {
            return Err(QcqpError::NotConverged(Box::new(sol)));
        }
        Ok(sol)
    }

    fn dual_converged(&self, lams: &[f64], x: &CVec) -> bool {
        let obj_scale = self.p.objective(x).abs().max(1.0);
        self.cons.iter().enumerate().all(|(i, c)| {
            let g = self.constraint_value(i, x);
            g <= 1e-2 * self.tol * c.cap.max(1.0) && lams[i] * g.abs() <= 1e-2 * self.tol * obj_scale
        })
    }

    /// Dual value `min_x L(x, λ)` with the Lagrangian minimizer, or `None`
    /// where the Lagrangian is unbounded below.
    fn dual_value(&mut self, lams: &[f64], warm: &CVec) -> Option<(f64, CVec)> {
        let g = self.gram(lams, None);
        let inner = self.inner(&g, warm)?;
        let x = inner.x;
        let v = quad_form(&g, &x)
            - 2.0 * self.p.f.dotc(&x).re
            - self.cons.iter().zip(lams).map(|(c, l)| l * c.cap).sum::<f64>();
        v.is_finite().then_some((v, x))
    }

    /// One projected Newton ascent step on the dual. The Hessian is taken on
    /// the coordinates of the Lagrangian minimizer that are below their caps.
    fn dual_newton_step(&mut self, lams: &mut [f64], warm: &CVec) -> Option<CVec> {
        self.iterations += 1;
        let (d0, x) = self.dual_value(lams, warm)?;
        let m = lams.len();
        let n = x.len();
        let g: Vec<f64> = (0..m).map(|i| self.constraint_value(i, &x)).collect();
        let active: Vec<usize> = (0..m).filter(|&i| lams[i] > 0.0 || g[i] > 0.0).collect();
        if active.is_empty() {
            return Some(x);
        }
        let coords: Vec<usize> = match &self.caps {
            Some(caps) => (0..n).filter(|&r| x[r].norm() < caps[r] * (1.0 - 1e-9)).collect(),
            None => (0..n).collect(),
        };
        let gram = self.gram(lams, None);
        let gff = CMat::from_fn(coords.len(), coords.len(), |a, b| gram[(coords[a], coords[b])]);
        let mx: Vec<CVec> = active.iter().map(|&i| &self.cons[i].m * &x).collect();
        let p = CMat::from_fn(coords.len(), active.len(), |r, a| mx[a][coords[r]]);
        let mut h = nalgebra::DMatrix::<f64>::zeros(active.len(), active.len());
        if !coords.is_empty() {
            let chol = gff.cholesky()?;
            h = (p.adjoint() * chol.solve(&p)).map(|z| 2.0 * z.re);
        }
        let ridge = 1e-12 * h.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        for a in 0..active.len() {
            h[(a, a)] += ridge;
        }
        let rhs = nalgebra::DVector::from_iterator(active.len(), active.iter().map(|&i| g[i]));
        let step = h.cholesky()?.solve(&rhs);
        let mut t = 1.0;
        for _ in 0..40 {
            let mut trial = lams.to_vec();
            for (a, &i) in active.iter().enumerate() {
                trial[i] = (lams[i] + t * step[a]).max(0.0);
            }
            if let Some((d1, x1)) = self.dual_value(&trial, &x) {
                if d1 >= d0 - 1e-14 * d0.abs() {
                    lams.copy_from_slice(&trial);
                    return Some(x1);
                }
            }
            t *= 0.5;
        }
        None
    }

    fn update_multiplier(&mut self, i: usize, lams: &mut [f64], x: &CVec) -> Result<CVec, QcqpError> {
        if matches!(self.cons[i].shape, ConstraintShape::Zero) {
            lams[i] = 0.0;
            return Ok(x.clone());
        }
        if self.caps.is_none() {
            if let ConstraintShape::Rank1(v) = &self.cons[i].shape {
                let v = v.clone();
                let g0 = self.gram(lams, Some(i));
                if let Some(chol) = g0.clone().cholesky() {
                    return Ok(self.rank1_update(i, lams, &chol, &v));
                }
            }
        }
        self.bisect_multiplier(i, lams, x)
    }

    /// Exact maximization of the dual over `λ_i` for `M_i = v vᴴ`:
    /// `vᴴx(λ) = vᴴx₀ / (1 + λ s)` with `s = vᴴG₀⁻¹v`.
    fn rank1_update(
        &mut self,
        i: usize,
        lams: &mut [f64],
        chol: &nalgebra::Cholesky<C64, nalgebra::Dyn>,
        v: &CVec,
    ) -> CVec {
        self.iterations += 1;
        let x0 = chol.solve(&self.p.f);
        let gv = chol.solve(v);
        let s = v.dotc(&gv).re;
        let t = v.dotc(&x0);
        let cap = self.cons[i].cap.max(1e-24 * t.norm_sqr().max(1.0));
        if t.norm_sqr() <= cap || s <= 0.0 {
            lams[i] = 0.0;
            return x0;
        }
        let lam = (t.norm() / cap.sqrt() - 1.0) / s;
        lams[i] = lam;
        x0 - gv * (t * (lam / (1.0 + lam * s)))
    }

    fn bisect_multiplier(&mut self, i: usize, lams: &mut [f64], x: &CVec) -> Result<CVec, QcqpError> {
        let obj_scale = self.p.objective(x).abs().max(1.0);
        let eval = |s: &mut Self, lam: f64, warm: &CVec| -> Option<(CVec, f64)> {
            let mut trial = lams.to_vec();
            trial[i] = lam;
            let g = s.gram(&trial, None);
            s.iterations += 1;
            s.inner(&g, warm).map(|inner| {
                s.inner_failed |= !inner.converged;
                let val = s.constraint_value(i, &inner.x);
                (inner.x, val)
            })
        };

        if let Some((x_lo, val)) = eval(self, 0.0, x) {
            if val <= 0.0 {
                lams[i] = 0.0;
                return Ok(x_lo);
            }
        }
        let scale = max_abs(&self.q).max(1e-300) / max_abs(&self.cons[i].m).max(1e-300);
        let mut lo = 0.0;
        let mut hi = lams[i].max(scale * 1e-6).max(1e-300);
        let mut best: Option<(CVec, f64)> = None;
        for _ in 0..2100 {
            match eval(self, hi, x) {
                Some((xh, val)) if val <= 0.0 || hi * val <= self.tol * 1e-3 * obj_scale => {
                    best = Some((xh, val));
                    break;
                }
                _ => {
                    lo = hi;
                    hi *= 2.0;
                    if !hi.is_finite() {
                        break;
                    }
                }
            }
        }
        let Some((mut x_hi, mut val_hi)) = best else {
            return Err(QcqpError::Unbounded);
        };
        for _ in 0..200 {
            if hi - lo <= 1e-14 * hi || hi * val_hi.abs() <= self.tol * 1e-3 * obj_scale {
                break;
            }
            let mid = 0.5 * (lo + hi);
            match eval(self, mid, &x_hi) {
                Some((xm, vm)) if vm <= 0.0 => {
                    hi = mid;
                    x_hi = xm;
                    val_hi = vm;
                }
                _ => lo = mid,
            }
        }
        lams[i] = hi;
        Ok(x_hi)
    }

    fn restore_feasibility(&self, x: CVec) -> CVec {
        let mut s: f64 = 1.0;
        for c in &self.cons {
            let v = quad_form(&c.m, &x);
            if v > c.cap && v - c.cap > 1e-12 * (1.0 + c.cap) {
                s = s.min((c.cap / v).sqrt());
            }
        }
        let x = if s < 1.0 { x.scale(s) } else { x };
        match &self.caps {
            Some(caps) => project_modulus(&x, caps),
            None => x,
        }
    }

    fn kkt(&self, lams: &[f64], x: &CVec, objective: f64) -> f64 {
        let g = self.gram(lams, None);
        let stat = match &self.caps {
            Some(caps) => box_residual(&g, &self.p.f, caps, &(&g * x), x),
            None => 2.0 * (&g * x - &self.p.f).norm(),
        };
        let compl = (0..self.cons.len())
            .map(|i| lams[i] * self.constraint_value(i, x).abs())
            .fold(0.0, f64::max);
        (stat / (2.0 * self.p.f.norm()).max(1.0)).max(compl / objective.abs().max(1.0))
    }
}

pub(crate) struct BoxResult {
    pub x: CVec,
    pub sweeps: usize,
    pub converged: bool,
    #[cfg_attr(not(test), allow(dead_code))]
    pub trace: Vec<f64>,
}

fn box_objective(r: &CVec, f: &CVec, x: &CVec) -> f64 {
    x.dotc(r).re - 2.0 * f.dotc(x).re
}

/// Target of an exact coordinate update given `r = Gx`.
fn coordinate_target(g: &CMat, f: &CVec, caps: &[f64], r: &CVec, x: &CVec, i: usize) -> C64 {
    let d = g[(i, i)].re;
    let b = f[i] - (r[i] - g[(i, i)] * x[i]);
    if d > 0.0 {
        clip(b / d, caps[i])
    } else if b.norm() > 0.0 {
        clip(b * (caps[i] / b.norm()), caps[i])
    } else {
        x[i]
    }
}

/// Diagonally scaled projected-gradient residual; zero iff `x` is a KKT point.
fn box_residual(g: &CMat, f: &CVec, caps: &[f64], r: &CVec, x: &CVec) -> f64 {
    let mut acc = 0.0;
    for i in 0..x.len() {
        let d = g[(i, i)].re;
        let target = coordinate_target(g, f, caps, r, x, i);
        let comp = if d > 0.0 {
            2.0 * d * (x[i] - target).norm()
        } else {
            let b = f[i] - r[i];
            if (x[i] - target).norm() > 0.0 { 2.0 * b.norm() } else { 0.0 }
        };
        acc += comp * comp;
    }
    acc.sqrt()
}

/// Minimizes `xᴴGx − 2Re(fᴴx)` subject to `|x_i| ≤ caps_i`.
pub(crate) fn box_qp(g: &CMat, f: &CVec, caps: &[f64], x0: &CVec, tol: f64, max_iter: usize) -> BoxResult {
    let n = f.len();
    let mut x = project_modulus(x0, caps);
    let mut r = g * &x;
    let mut trace = vec![box_objective(&r, f, &x)];
    let scale = (2.0 * f.norm()).max(1.0);
    let mut sweeps = 0;
    let mut converged = false;

    newton_step(g, f, caps, &mut x, &mut r);
    loop {
        let res = box_residual(g, f, caps, &r, &x) / scale;
        if res <= tol {
            converged = true;
            trace.push(box_objective(&r, f, &x));
            break;
        }
        if sweeps >= max_iter {
            break;
        }
        sweeps += 1;
        for i in 0..n {
            let target = coordinate_target(g, f, caps, &r, &x, i);
            let delta = target - x[i];
            if delta != C64::new(0.0, 0.0) {
                r.axpy(delta, &g.column(i), C64::new(1.0, 0.0));
                x[i] = target;
            }
        }
        newton_step(g, f, caps, &mut x, &mut r);
        trace.push(box_objective(&r, f, &x));
    }
    BoxResult { x, sweeps, converged, trace }
}

/// Moves toward the minimizer over the free coordinates (holding the capped
/// ones), truncated at the first cap; accepted only if the objective drops.
fn newton_step(g: &CMat, f: &CVec, caps: &[f64], x: &mut CVec, r: &mut CVec) {
    let free: Vec<usize> = (0..x.len()).filter(|&i| x[i].norm() < caps[i] * (1.0 - 1e-12)).collect();
    if free.is_empty() {
        return;
    }
    let nf = free.len();
    let gff = CMat::from_fn(nf, nf, |a, b| g[(free[a], free[b])]);
    // rhs = f_F − G_FB x_B = f_F − (r_F − G_FF x_F)
    let xf = CVec::from_iterator(nf, free.iter().map(|&i| x[i]));
    let gx = &gff * &xf;
    let rhs = CVec::from_iterator(nf, (0..nf).map(|a| f[free[a]] - r[free[a]] + gx[a]));
    let Some(y) = psd_solve(&gff, &rhs) else { return };
    let d = &y - &xf;
    let mut step: f64 = 1.0;
    for (a, &i) in free.iter().enumerate() {
        let aa = d[a].norm_sqr();
        if aa == 0.0 || caps[i].is_infinite() {
            continue;
        }
        let b = (x[i].conj() * d[a]).re;
        let c = x[i].norm_sqr() - caps[i] * caps[i];
        let disc = (b * b - aa * c).max(0.0);
        let s = (-b + disc.sqrt()) / aa;
        step = step.min(s.max(0.0));
    }
    if step <= 0.0 {
        return;
    }
    let before = box_objective(r, f, x);
    let mut xn = x.clone();
    for (a, &i) in free.iter().enumerate() {
        xn[i] = clip(x[i] + d[a] * step, caps[i]);
    }
    let rn = g * &xn;
    if box_objective(&rn, f, &xn) <= before {
        *x = xn;
        *r = rn;
    }
}
