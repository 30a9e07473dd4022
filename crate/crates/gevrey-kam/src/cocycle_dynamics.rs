//! Quasi-periodic cocycles: iteration, Lyapunov exponent, fibered rotation
//! number, degree, uniform hyperbolicity and frequency arithmetic.
//!
//! Angles of the projective action are measured counter-clockwise; the
//! rotation number is minus the mean angular speed over 2pi, so that the
//! clockwise rotation `R_phi` has rotation number `phi`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gevrey_fourier::{indices_within, Idx, MatSeries};
use crate::lie_algebra::{exp_mat, Mat2};

pub type Real2 = [[f64; 2]; 2];

pub fn mul2(a: &Real2, b: &Real2) -> Real2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Inverse through the adjugate; exact for determinant one.
pub fn inv_sl2(a: &Real2) -> Real2 {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

pub fn identity2() -> Real2 {
    [[1.0, 0.0], [0.0, 1.0]]
}

fn frob(a: &Real2) -> f64 {
    (a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1]).sqrt()
}

fn scale2(a: &Real2, s: f64) -> Real2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

/// Largest singular value.
pub fn op_norm(a: &Real2) -> f64 {
    let (s1, _) = singular_values(a);
    s1
}

fn singular_values(a: &Real2) -> (f64, f64) {
    let f2 = frob(a).powi(2);
    let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).abs();
    let disc = (f2 * f2 - 4.0 * det * det).max(0.0).sqrt();
    let s1 = ((f2 + disc) / 2.0).sqrt();
    let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
    (s1, s2)
}

/// Direction angle of the major axis of the symmetric form (p, q; q, s).
fn major_axis(p: f64, q: f64, s: f64) -> f64 {
    0.5 * (2.0 * q).atan2(p - s)
}

/// Wraps into (-pi, pi].
pub fn wrap_pi(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Lifted angle increment of `m` acting on the direction `beta`, given the
/// lift `omega` of the Iwasawa angle atan2(m21, m11).
pub fn lifted_increment(m: &Real2, omega: f64, beta: f64) -> f64 {
    let w0 = m[1][0].atan2(m[0][0]);
    let (c, s) = (w0.cos(), w0.sin());
    // upper triangular factor K(-w0) m
    let t11 = c * m[0][0] + s * m[1][0];
    let t12 = c * m[0][1] + s * m[1][1];
    let t22 = -s * m[0][1] + c * m[1][1];
    let (cb, sb) = (beta.cos(), beta.sin());
    let b1 = (t22 * sb).atan2(t11 * cb + t12 * sb);
    omega + wrap_pi(b1 - beta)
}

/// Continuous choice of `x + 2 pi m` nearest to `reference`.
pub fn nearest_branch(x: f64, reference: f64) -> f64 {
    x + 2.0 * PI * ((reference - x) / (2.0 * PI)).round()
}

/// A measurable cocycle presented pointwise.
pub trait CocycleMap: Sync {
    fn alpha(&self) -> &[f64];
    /// Period of the base torus in each coordinate.
    fn period(&self) -> f64 {
        1.0
    }
    fn matrix(&self, theta: &[f64]) -> Real2;
    /// Lift of atan2(a21, a11), continuous on the universal cover.
    fn omega(&self, theta: &[f64]) -> f64;
    fn increment(&self, theta: &[f64], beta: f64) -> f64 {
        lifted_increment(&self.matrix(theta), self.omega(theta), beta)
    }
}

/// A conjugacy B(theta) with a continuous angle lift.
pub trait FactorMap: Sync {
    fn period(&self) -> f64;
    fn matrix(&self, theta: &[f64]) -> Real2;
    fn omega(&self, theta: &[f64]) -> f64;
}

#[derive(Clone, Debug)]
pub enum CocycleKind {
    Series(MatSeries),
    /// A(theta) = a0 exp(f(theta))
    Factored { a0: Mat2, f: MatSeries },
}

#[derive(Clone, Debug)]
pub struct Cocycle {
    pub alpha: Vec<f64>,
    pub kind: CocycleKind,
    omega_ref: f64,
}

impl Cocycle {
    pub fn from_series(alpha: Vec<f64>, a: MatSeries) -> Result<Self> {
        if alpha.len() != a.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: alpha.len() });
        }
        let mut c = Cocycle { alpha, kind: CocycleKind::Series(a), omega_ref: 0.0 };
        c.init_ref();
        Ok(c)
    }

    pub fn factored(alpha: Vec<f64>, a0: Mat2, f: MatSeries) -> Result<Self> {
        if alpha.len() != f.dim() {
            return Err(Error::DimensionMismatch { expected: f.dim(), got: alpha.len() });
        }
        let mut c = Cocycle { alpha, kind: CocycleKind::Factored { a0, f }, omega_ref: 0.0 };
        c.init_ref();
        Ok(c)
    }

    pub fn constant(alpha: Vec<f64>, a: Mat2) -> Result<Self> {
        let d = alpha.len();
        let lat = crate::gevrey_fourier::FrequencyLattice::new(d, false)?;
        Cocycle::from_series(alpha, MatSeries::constant(lat, a))
    }

    fn init_ref(&mut self) {
        let z = vec![0.0; self.alpha.len()];
        let m = self.matrix(&z);
        self.omega_ref = m[1][0].atan2(m[0][0]);
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn evaluate(&self, theta: &[f64]) -> Mat2 {
        match &self.kind {
            CocycleKind::Series(a) => a.eval(theta),
            CocycleKind::Factored { a0, f } => *a0 * exp_mat(&f.eval(theta)),
        }
    }

    /// Max |det - 1| over a grid.
    pub fn det_defect(&self, grid: &[Vec<f64>]) -> f64 {
        grid.iter().map(|t| (self.evaluate(t).det() - 1.0).norm()).fold(0.0, f64::max)
    }
}

impl CocycleMap for Cocycle {
    fn alpha(&self) -> &[f64] {
        &self.alpha
    }
    fn period(&self) -> f64 {
        match &self.kind {
            CocycleKind::Series(a) => a.lattice.period(),
            CocycleKind::Factored { f, .. } => f.lattice.period(),
        }
    }
    fn matrix(&self, theta: &[f64]) -> Real2 {
        self.evaluate(theta).re()
    }
    fn omega(&self, theta: &[f64]) -> f64 {
        let m = self.matrix(theta);
        nearest_branch(m[1][0].atan2(m[0][0]), self.omega_ref)
    }
}

/// Matrix series factor on T^d or 2T^d of known degree.
#[derive(Clone, Debug)]
pub struct SeriesFactor {
    pub b: MatSeries,
    pub deg: Vec<i64>,
    omega_ref: f64,
}

impl SeriesFactor {
    pub fn new(b: MatSeries) -> Result<Self> {
        let deg = degree(&b)?;
        let z = vec![0.0; b.dim()];
        let m = b.eval(&z).re();
        Ok(SeriesFactor { b, deg, omega_ref: m[1][0].atan2(m[0][0]) })
    }
}

fn deg_phase(deg: &[i64], theta: &[f64]) -> f64 {
    -PI * deg.iter().zip(theta).map(|(&n, t)| n as f64 * t).sum::<f64>()
}

impl FactorMap for SeriesFactor {
    fn period(&self) -> f64 {
        2.0
    }
    fn matrix(&self, theta: &[f64]) -> Real2 {
        self.b.eval(theta).re()
    }
    fn omega(&self, theta: &[f64]) -> f64 {
        let m = self.matrix(theta);
        let lin = deg_phase(&self.deg, theta);
        lin + nearest_branch(m[1][0].atan2(m[0][0]) - lin, self.omega_ref)
    }
}

/// Z_n(theta) = exp(pi <n,theta> J) = R_{<n,theta>/2}.
#[derive(Clone, Debug)]
pub struct RotationFactor {
    pub n: Vec<i64>,
}

impl FactorMap for RotationFactor {
    fn period(&self) -> f64 {
        2.0
    }
    fn matrix(&self, theta: &[f64]) -> Real2 {
        let ph = -deg_phase(&self.n, theta);
        [[ph.cos(), ph.sin()], [-ph.sin(), ph.cos()]]
    }
    fn omega(&self, theta: &[f64]) -> f64 {
        deg_phase(&self.n, theta)
    }
}

/// theta -> B(theta+alpha)^{-1} A(theta) B(theta)
pub struct Conjugated<'a> {
    pub a: &'a dyn CocycleMap,
    pub b: &'a dyn FactorMap,
}

impl<'a> Conjugated<'a> {
    fn shifted(&self, theta: &[f64]) -> Vec<f64> {
        theta.iter().zip(self.a.alpha()).map(|(t, a)| t + a).collect()
    }
}

impl<'a> CocycleMap for Conjugated<'a> {
    fn alpha(&self) -> &[f64] {
        self.a.alpha()
    }
    fn period(&self) -> f64 {
        self.a.period().max(self.b.period())
    }
    fn matrix(&self, theta: &[f64]) -> Real2 {
        let bp = self.b.matrix(&self.shifted(theta));
        mul2(&inv_sl2(&bp), &mul2(&self.a.matrix(theta), &self.b.matrix(theta)))
    }
    fn omega(&self, theta: &[f64]) -> f64 {
        let m = self.matrix(theta);
        m[1][0].atan2(m[0][0])
    }
    fn increment(&self, theta: &[f64], beta: f64) -> f64 {
        let i1 = lifted_increment(&self.b.matrix(theta), self.b.omega(theta), beta);
        let b1 = beta + i1;
        let i2 = self.a.increment(theta, b1);
        let b2 = b1 + i2;
        let th = self.shifted(theta);
        let bp = self.b.matrix(&th);
        let bi = inv_sl2(&bp);
        let v = (bi[0][0] * b2.cos() + bi[0][1] * b2.sin(), bi[1][0] * b2.cos() + bi[1][1] * b2.sin());
        let b3 = v.1.atan2(v.0);
        let back = lifted_increment(&bp, self.b.omega(&th), b3);
        i1 + i2 - back
    }
}

fn advance(theta: &mut [f64], alpha: &[f64], period: f64) {
    for (t, a) in theta.iter_mut().zip(alpha) {
        *t = (*t + a).rem_euclid(period);
    }
}

/// A_n(theta); negative n gives A_{-n}(theta + n alpha)^{-1}.
pub fn iterate(c: &dyn CocycleMap, theta: &[f64], n: i64) -> Real2 {
    if n < 0 {
        let start: Vec<f64> = theta.iter().zip(c.alpha()).map(|(t, a)| t + n as f64 * a).collect();
        return inv_sl2(&iterate(c, &start, -n));
    }
    let mut th = theta.to_vec();
    let mut m = identity2();
    for _ in 0..n {
        m = mul2(&c.matrix(&th), &m);
        for (t, a) in th.iter_mut().zip(c.alpha()) {
            *t += a;
        }
    }
    m
}

/// log ||A_n(theta)|| with renormalization every 32 steps.
pub fn log_norm_product(c: &dyn CocycleMap, theta: &[f64], n: usize) -> (f64, Real2) {
    let p = c.period();
    let mut th = theta.to_vec();
    let mut m = identity2();
    let mut acc = 0.0;
    for i in 0..n {
        m = mul2(&c.matrix(&th), &m);
        advance(&mut th, c.alpha(), p);
        if (i + 1) % 32 == 0 {
            let s = frob(&m);
            acc += s.ln();
            m = scale2(&m, 1.0 / s);
        }
    }
    (acc + op_norm(&m).ln(), m)
}

/// Low-discrepancy sample points on [0, period)^d.
pub fn kronecker_points(d: usize, n: usize, period: f64) -> Vec<Vec<f64>> {
    // generalized golden ratios
    let phi = match d {
        1 => 1.618_033_988_749_895,
        2 => 1.324_717_957_244_746,
        _ => 1.220_744_084_605_759,
    };
    let g: Vec<f64> = (1..=d).map(|i| 1.0 / f64::powi(phi, i as i32)).collect();
    (0..n)
        .map(|j| g.iter().map(|gi| period * (0.5 + gi * j as f64).fract()).collect())
        .collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

pub fn lyapunov_exponent(c: &dyn CocycleMap, n_iter: usize, n_samples: usize) -> Estimate {
    let n_iter = n_iter.max(1);
    let pts = kronecker_points(c.alpha().len(), n_samples.max(1), c.period());
    let vals: Vec<f64> = pts.par_iter().map(|t| log_norm_product(c, t, n_iter).0 / n_iter as f64).collect();
    mean_stderr(&vals)
}

fn mean_stderr(v: &[f64]) -> Estimate {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return Estimate { value: mean, stderr: 0.0 };
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Estimate { value: mean, stderr: (var / n).sqrt() }
}

/// Raw rotation number in [0,1) with an O(1/n) error estimate.
pub fn rotation_number_map(c: &dyn CocycleMap, n_iter: usize) -> Estimate {
    let n_iter = n_iter.max(1);
    let p = c.period();
    let mut th = vec![0.0; c.alpha().len()];
    let mut beta = 0.0;
    let mut total = 0.0;
    let mut comp = 0.0;
    for _ in 0..n_iter {
        let inc = c.increment(&th, beta);
        // compensated summation
        let y = inc - comp;
        let t = total + y;
        comp = (t - total) - y;
        total = t;
        beta = wrap_pi(beta + inc);
        advance(&mut th, c.alpha(), p);
    }
    let rho = (-total / (2.0 * PI * n_iter as f64)).rem_euclid(1.0);
    Estimate { value: rho, stderr: 1.0 / n_iter as f64 }
}

/// Rotation number of a cocycle homotopic to the identity.
pub fn rotation_number(c: &Cocycle, n_iter: usize) -> Result<Estimate> {
    if let CocycleKind::Series(a) = &c.kind {
        let deg = degree(a)?;
        if deg.iter().any(|&x| x != 0) {
            return Err(Error::NotHomotopic(deg));
        }
    }
    Ok(rotation_number_map(c, n_iter))
}

/// Degree of B on 2T^d: B is homotopic to R_{<deg,theta>/2}.
pub fn degree(b: &MatSeries) -> Result<Vec<i64>> {
    let d = b.dim();
    let samples = 64 * (b.max_l1() as usize + 2);
    let mut out = Vec::with_capacity(d);
    let base: Vec<f64> = (0..d).map(|i| 0.1234 + 0.271 * i as f64).collect();
    for i in 0..d {
        let mut prev: Option<f64> = None;
        let mut wind = 0.0;
        for s in 0..=samples {
            let mut t = base.clone();
            t[i] = 2.0 * s as f64 / samples as f64;
            let m = b.eval(&t).re();
            if m[0][0].hypot(m[1][0]) < 1e-12 {
                return Err(Error::DegenerateColumn);
            }
            let a = m[1][0].atan2(m[0][0]);
            if let Some(p) = prev {
                wind += wrap_pi(a - p);
            }
            prev = Some(a);
        }
        let turns = wind / (2.0 * PI);
        if (turns - turns.round()).abs() > 0.25 {
            return Err(Error::DegenerateColumn);
        }
        out.push(-(turns.round() as i64));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UhVerdict {
    Uh,
    NotUh,
    Undecided,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct UhParams {
    pub cone: f64,
    pub n_win: usize,
    pub growth: f64,
    pub grid: usize,
}

impl Default for UhParams {
    fn default() -> Self {
        UhParams { cone: 0.1, n_win: 200, growth: 0.005, grid: 16 }
    }
}

fn direction_angle(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Finite-window cone criterion: at each grid point the backward-unstable and
/// forward-stable directions are separated and norms grow at the given rate.
pub fn is_uniformly_hyperbolic(c: &dyn CocycleMap, p: &UhParams) -> UhVerdict {
    let n = p.n_win.max(1);
    let pts = kronecker_points(c.alpha().len(), p.grid.max(1), c.period());
    let res: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|t| {
            let (lf, mf) = log_norm_product(c, t, n);
            let start: Vec<f64> = t.iter().zip(c.alpha()).map(|(x, a)| x - n as f64 * a).collect();
            let (lb, mb) = log_norm_product(c, &start, n);
            // image direction of the backward product
            let u = major_axis(
                mb[0][0] * mb[0][0] + mb[0][1] * mb[0][1],
                mb[0][0] * mb[1][0] + mb[0][1] * mb[1][1],
                mb[1][0] * mb[1][0] + mb[1][1] * mb[1][1],
            );
            // most contracted input direction of the forward product
            let v = major_axis(
                mf[0][0] * mf[0][0] + mf[1][0] * mf[1][0],
                mf[0][0] * mf[0][1] + mf[1][0] * mf[1][1],
                mf[0][1] * mf[0][1] + mf[1][1] * mf[1][1],
            ) + PI / 2.0;
            (direction_angle(u, v), lf.min(lb) / n as f64)
        })
        .collect();
    let min_angle = res.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let min_growth = res.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let max_growth = res.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    if min_angle >= p.cone && min_growth >= p.growth {
        UhVerdict::Uh
    } else if max_growth < p.growth {
        UhVerdict::NotUh
    } else {
        UhVerdict::Undecided
    }
}

/// |x|_T = inf_j |x - j|
pub fn torus_distance(x: f64) -> f64 {
    (x - x.round()).abs()
}

pub fn dot(n: &Idx, alpha: &[f64]) -> f64 {
    n.dot(alpha)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum DcResult {
    Pass,
    Fail(Vec<i64>),
    Rational(Vec<i64>),
}

/// Indices 0 < |n|_1 <= n_max with first nonzero coordinate positive, by increasing |n|_1.
fn half_space(d: usize, n_max: i64) -> Vec<Idx> {
    let mut v: Vec<Idx> = indices_within(d, n_max)
        .into_iter()
        .filter(|k| k.0[..d].iter().find(|&&x| x != 0).is_some_and(|&x| x > 0))
        .collect();
    v.sort_by_key(|k| k.l1());
    v
}

pub fn diophantine_check(alpha: &[f64], gamma: f64, tau: f64, n_max: i64) -> DcResult {
    let d = alpha.len();
    for n in half_space(d, n_max) {
        let dist = torus_distance(n.dot(alpha));
        if dist < gamma / (n.l1() as f64).powf(tau) {
            return DcResult::Fail(n.to_vec(d));
        }
    }
    DcResult::Pass
}

/// |2 phi - <m,alpha>|_T >= kappa / (1+|m|)^tau for |m|_1 <= n_max.
pub fn dc_alpha_check(phi: f64, alpha: &[f64], kappa: f64, tau: f64, n_max: i64) -> DcResult {
    let d = alpha.len();
    let mut all = indices_within(d, n_max);
    all.sort_by_key(|k| k.l1());
    for k in all.iter().filter(|k| !k.is_zero()) {
        if torus_distance(2.0 * phi - k.dot(alpha)) <= 1e-12 {
            return DcResult::Rational(k.to_vec(d));
        }
    }
    for m in &all {
        if torus_distance(2.0 * phi - m.dot(alpha)) < kappa / (1.0 + m.l1() as f64).powf(tau) {
            return DcResult::Fail(m.to_vec(d));
        }
    }
    DcResult::Pass
}

pub fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

pub fn silver() -> f64 {
    2f64.sqrt() - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gevrey_fourier::FrequencyLattice;

    #[test]
    fn rotation_of_rotation() {
        let c = Cocycle::constant(vec![golden()], Mat2::rotation(0.3)).unwrap();
        let r = rotation_number(&c, 1000).unwrap();
        assert!((r.value - 0.3).abs() < 1e-10);
        let id = Cocycle::constant(vec![golden()], Mat2::identity()).unwrap();
        assert!(torus_distance(rotation_number(&id, 100).unwrap().value) < 1e-14);
    }

    #[test]
    fn free_schrodinger_rotation() {
        let e = 2.0 * (2.0 * PI * 0.2).cos();
        let c = Cocycle::constant(vec![golden()], Mat2::real(e, -1.0, 1.0, 0.0)).unwrap();
        let r = rotation_number(&c, 200_000).unwrap();
        assert!((torus_distance(r.value) - 0.2).abs() < 1e-5, "{}", r.value);
    }

    #[test]
    fn lyapunov_constants() {
        let h = Cocycle::constant(vec![golden()], Mat2::real(2.0, 0.0, 0.0, 0.5)).unwrap();
        assert!((lyapunov_exponent(&h, 2000, 4).value - 2f64.ln()).abs() < 1e-6);
        let r = Cocycle::constant(vec![golden()], Mat2::rotation(0.17)).unwrap();
        assert!(lyapunov_exponent(&r, 2000, 4).value.abs() < 2e-3);
    }

    #[test]
    fn uh_verdicts() {
        let p = UhParams::default();
        let h = Cocycle::constant(vec![golden()], Mat2::real(2.0, 0.0, 0.0, 0.5)).unwrap();
        assert_eq!(is_uniformly_hyperbolic(&h, &p), UhVerdict::Uh);
        let r = Cocycle::constant(vec![golden()], Mat2::rotation(0.2)).unwrap();
        assert_eq!(is_uniformly_hyperbolic(&r, &p), UhVerdict::NotUh);
        let s = Cocycle::constant(vec![golden()], Mat2::real(3.0, -1.0, 1.0, 0.0)).unwrap();
        assert_eq!(is_uniformly_hyperbolic(&s, &p), UhVerdict::Uh);
    }

    #[test]
    fn degree_of_rotation_factor() {
        let lat = FrequencyLattice::half(1);
        let mut z = MatSeries::zero(lat);
        // R_{theta/2} = cos(pi theta) I + sin(pi theta) J
        let half = num_complex::Complex64::new(0.5, 0.0);
        let mhalf_i = num_complex::Complex64::new(0.0, -0.5);
        z.add_mode(Idx::new(&[1]), Mat2::identity().scale(half) + Mat2::j().scale(mhalf_i));
        z.add_mode(Idx::new(&[-1]), Mat2::identity().scale(half) - Mat2::j().scale(mhalf_i));
        let m = z.eval(&[0.3]);
        assert!(m.dist(&Mat2::rotation(0.15)) < 1e-14);
        assert_eq!(degree(&z).unwrap(), vec![1]);
        let z2 = z.series_product(&z).unwrap();
        assert_eq!(degree(&z2).unwrap(), vec![2]);
        assert_eq!(degree(&MatSeries::constant(lat, Mat2::identity())).unwrap(), vec![0]);
    }

    #[test]
    fn frequency_checks() {
        assert_eq!(torus_distance(0.75), 0.25);
        assert!((torus_distance(1.3) - 0.3).abs() < 1e-15);
        assert_eq!(diophantine_check(&[golden()], 0.2, 1.2, 100), DcResult::Pass);
        assert_eq!(diophantine_check(&[1.0 / 3.0], 0.1, 1.2, 10), DcResult::Fail(vec![3]));
        assert_eq!(diophantine_check(&[2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0], 0.05, 2.5, 50), DcResult::Pass);
        assert_eq!(dc_alpha_check(golden() / 2.0, &[golden()], 0.01, 2.0, 10), DcResult::Rational(vec![1]));
        assert_eq!(dc_alpha_check(0.0, &[golden()], 0.01, 2.0, 10), DcResult::Fail(vec![0]));
    }
}
