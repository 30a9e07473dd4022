//! Quantitative almost reducibility: non-resonant elimination by fixed point,
//! resonant steps with a degree-n rotation, the KAM iteration and the two
//! full-reducibility endgames.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cocycle_dynamics::{
    dc_alpha_check, is_uniformly_hyperbolic, nearest_branch, rotation_number_map, torus_distance, Cocycle,
    DcResult, FactorMap, Real2, UhParams, UhVerdict,
};
use crate::error::{Error, Result};
use crate::gevrey_fourier::{indices_within, sample_grid, FrequencyLattice, GevreyParams, Idx, MatSeries};
use crate::lie_algebra::{
    bch_product, classify, elliptic_normal_form, exp_mat, log_mat, solve_twisted_ad, Mat2, EllipticData,
};
use crate::error::MatrixClass;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Output support cap and coefficient drop tolerance for series arithmetic.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Trunc {
    pub cap: i64,
    pub tol: f64,
}

fn mul(a: &MatSeries, b: &MatSeries, tr: Trunc) -> MatSeries {
    a.product_capped(b, tr.cap, tr.tol)
}

fn add(a: &MatSeries, b: &MatSeries) -> MatSeries {
    a + b
}

/// sum_{m >= start} X^m / m!
pub fn exp_tail(x: &MatSeries, start: usize, tr: Trunc) -> MatSeries {
    let lat = x.lattice;
    let mut term = MatSeries::constant(lat, Mat2::identity());
    let mut sum = MatSeries::zero(lat);
    for m in 1..80 {
        term = mul(&term, x, tr).scale(C64::new(1.0 / m as f64, 0.0));
        if m >= start {
            sum = add(&sum, &term);
        }
        if term.is_zero() || term.l1_norm() < tr.tol {
            break;
        }
    }
    sum
}

pub fn exp_series(x: &MatSeries, tr: Trunc) -> MatSeries {
    let lat = x.lattice;
    add(&MatSeries::constant(lat, Mat2::identity()), &exp_tail(x, 1, tr))
}

/// log(e^{X_1} ... e^{X_k}) with the linear part summed exactly first.
pub fn log_exp_product(xs: &[&MatSeries], tr: Trunc) -> MatSeries {
    let lat = xs[0].lattice;
    let mut linear = MatSeries::zero(lat);
    let mut nonlin = MatSeries::zero(lat);
    let mut q = MatSeries::zero(lat);
    for x in xs {
        let e = exp_tail(x, 2, tr);
        let g = add(x, &e);
        let cross = mul(&q, &g, tr);
        linear = add(&linear, x);
        nonlin = add(&nonlin, &add(&e, &cross));
        q = add(&add(&q, &g), &cross);
    }
    // log(I+Q) - Q
    let mut pw = q.clone();
    for m in 2..80 {
        pw = mul(&pw, &q, tr);
        if pw.is_zero() {
            break;
        }
        let s = if m % 2 == 0 { -1.0 } else { 1.0 } / m as f64;
        nonlin = add(&nonlin, &pw.scale(C64::new(s, 0.0)));
        if pw.l1_norm() < tr.tol {
            break;
        }
    }
    add(&linear, &nonlin).prune(0.0)
}

pub fn resonance_window(eps: f64, r: f64, r_plus: f64, nu: f64) -> f64 {
    (1.0 / (2.0 * PI)) * (2.0 * eps.ln().abs() / (r - r_plus)).powf(1.0 / nu)
}

/// Unique n with 0 < |n|_1 <= N and |2 xi - <n,alpha>|_T < threshold.
pub fn find_resonance(xi: f64, alpha: &[f64], n_window: f64, threshold: f64) -> Result<Option<Vec<i64>>> {
    let d = alpha.len();
    let nmax = n_window.floor().max(0.0) as i64;
    let mut hits: Vec<(f64, Idx)> = indices_within(d, nmax)
        .into_iter()
        .filter(|k| !k.is_zero())
        .map(|k| (torus_distance(2.0 * xi - k.dot(alpha)), k))
        .filter(|(dist, _)| *dist < threshold)
        .collect();
    hits.sort_by(|a, b| a.0.total_cmp(&b.0));
    match hits.len() {
        0 => Ok(None),
        1 => Ok(Some(hits[0].1.to_vec(d))),
        _ => Err(Error::MultipleResonances(hits[0].1.to_vec(d), hits[1].1.to_vec(d))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaPolicy {
    /// 2 ||A||^2 eps^{1/9} (symmetric) or 2 ||A||^2 eps^{1/3} (rotated)
    Floor,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// eta >= ||A||^2 eps^{1/9}
    Symmetric,
    /// eta >= ||A||^2 eps^{1/3}
    Rotated,
}

impl Regime {
    pub fn floor(&self, a_norm: f64, eps: f64) -> f64 {
        match self {
            Regime::Symmetric => a_norm * a_norm * eps.powf(1.0 / 9.0),
            Regime::Rotated => a_norm * a_norm * eps.powf(1.0 / 3.0),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KamControls {
    pub eta: EtaPolicy,
    pub enforce_eta_floor: bool,
    /// resonance threshold eps^sigma
    pub sigma: f64,
    pub n_cap: f64,
    pub min_solve_cap: i64,
    pub fp_rel_tol: f64,
    pub max_iters: usize,
    pub residual_tol: f64,
    pub gate_enabled: bool,
    pub gate_c: f64,
    pub underflow: f64,
    /// coefficients below this are dropped from series products
    pub prune_tol: f64,
    pub best_effort: bool,
    pub seed: u64,
}

impl Default for KamControls {
    fn default() -> Self {
        KamControls {
            eta: EtaPolicy::Floor,
            enforce_eta_floor: true,
            sigma: 1.0 / 20.0,
            n_cap: 24.0,
            min_solve_cap: 4,
            fp_rel_tol: 1e-6,
            max_iters: 60,
            residual_tol: 1e-9,
            gate_enabled: true,
            gate_c: 1e-4,
            underflow: 1e-300,
            prune_tol: 1e-300,
            best_effort: true,
            seed: 7,
        }
    }
}

impl KamControls {
    /// Desk-scale preset: fixed eta, sigma = 1/2, gates recorded but off.
    pub fn desk() -> Self {
        KamControls {
            eta: EtaPolicy::Fixed(1e-3),
            enforce_eta_floor: false,
            sigma: 0.5,
            n_cap: 8.0,
            gate_enabled: false,
            ..Default::default()
        }
    }

    fn eta_for(&self, regime: Regime, a_norm: f64, eps: f64) -> f64 {
        match self.eta {
            EtaPolicy::Floor => 2.0 * regime.floor(a_norm, eps),
            EtaPolicy::Fixed(e) => e,
        }
    }
}

/// eta^3 / (eta^2 + 3||A||^2 eta + 2||A||^4)
pub fn eta_tilde(eta: f64, a_norm: f64) -> f64 {
    let a2 = a_norm * a_norm;
    eta.powi(3) / (eta * eta + 3.0 * a2 * eta + 2.0 * a2 * a2)
}

/// The per-mode linear operator Y -> e^{i omega} A^{-1} Y A - Y restricted to the non-resonant set.
#[derive(Clone, Copy, Debug)]
pub enum Frame {
    /// generic A; mode n is non-resonant iff |e^{i2pi<n,a>} mu - 1| >= eta for mu in {1, l^2, l^-2}
    Symmetric { a: Mat2, lam2: C64 },
    /// A = diag(e^{i phi}, e^{-i phi}); membership per entry
    Rotated { phi: f64 },
}

impl Frame {
    pub fn symmetric(a: &Mat2) -> Frame {
        // eigenvalues t +- sqrt(t^2 - 1)
        let t = a.trace() * 0.5;
        let w = (t * t - 1.0).sqrt();
        let l = t + w;
        Frame::Symmetric { a: *a, lam2: l * l }
    }

    fn matrix(&self) -> Mat2 {
        match self {
            Frame::Symmetric { a, .. } => *a,
            Frame::Rotated { phi } => Mat2::diag(C64::from_polar(1.0, *phi), C64::from_polar(1.0, -*phi)),
        }
    }

    /// Entry mask (11, 12, 21) of non-resonant components at frequency omega = 2 pi s <k, alpha>.
    fn mask(&self, omega: f64, eta: f64) -> [bool; 3] {
        let e = C64::from_polar(1.0, omega);
        match self {
            Frame::Symmetric { lam2, .. } => {
                let ok = (e - 1.0).norm() >= eta && (e * lam2 - 1.0).norm() >= eta && (e / lam2 - 1.0).norm() >= eta;
                [ok; 3]
            }
            Frame::Rotated { phi } => [
                (e - 1.0).norm() >= eta,
                (C64::from_polar(1.0, omega - 2.0 * phi) - 1.0).norm() >= eta,
                (C64::from_polar(1.0, omega + 2.0 * phi) - 1.0).norm() >= eta,
            ],
        }
    }

    fn split(g: &Mat2, mask: [bool; 3], keep_nonres: bool) -> Mat2 {
        let pick = |m: bool, v: C64| if m == keep_nonres { v } else { ZERO };
        Mat2::new(pick(mask[0], g.a11), pick(mask[1], g.a12), pick(mask[2], g.a21), pick(mask[0], g.a22))
    }

    fn solve(&self, omega: f64, g: &Mat2, mask: [bool; 3]) -> Option<Mat2> {
        match self {
            Frame::Symmetric { a, .. } => {
                if !mask[0] {
                    return Some(Mat2::zero());
                }
                solve_twisted_ad(a, omega, g)
            }
            Frame::Rotated { phi } => {
                let d1 = C64::from_polar(1.0, omega) - 1.0;
                let d12 = C64::from_polar(1.0, omega - 2.0 * phi) - 1.0;
                let d21 = C64::from_polar(1.0, omega + 2.0 * phi) - 1.0;
                let y11 = if mask[0] { g.a11 / d1 } else { ZERO };
                let y22 = if mask[0] { g.a22 / d1 } else { ZERO };
                let y12 = if mask[1] { g.a12 / d12 } else { ZERO };
                let y21 = if mask[2] { g.a21 / d21 } else { ZERO };
                Some(Mat2::new(y11, y12, y21, y22))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Elimination {
    #[serde(skip)]
    pub y: MatSeries,
    #[serde(skip)]
    pub f_re: MatSeries,
    pub eps: f64,
    pub eta: f64,
    pub eta_tilde: f64,
    pub iters: usize,
    pub last_update: f64,
    /// non-resonant part left by the fixed point, dropped from f_re
    pub leftover: f64,
    pub y_norm: f64,
    pub f_re_norm: f64,
    pub residual: f64,
    pub solve_cap: i64,
}

struct ElimSetup<'a> {
    frame: Frame,
    alpha: &'a [f64],
    eta: f64,
    solve_cap: i64,
    tr: Trunc,
}

impl<'a> ElimSetup<'a> {
    fn omega(&self, lat: &FrequencyLattice, k: &Idx) -> f64 {
        2.0 * PI * lat.scale() * k.dot(self.alpha)
    }

    fn mask(&self, lat: &FrequencyLattice, k: &Idx) -> [bool; 3] {
        if k.l1() > self.solve_cap {
            return [false; 3];
        }
        self.frame.mask(self.omega(lat, k), self.eta)
    }

    fn project(&self, g: &MatSeries, nonres: bool) -> MatSeries {
        g.map(|k, c| Frame::split(c, self.mask(&g.lattice, k), nonres))
    }

    fn invert(&self, g: &MatSeries) -> Result<MatSeries> {
        let mut out = MatSeries::zero(g.lattice);
        for (k, c) in &g.coeffs {
            let m = self.mask(&g.lattice, k);
            if m == [false; 3] {
                continue;
            }
            let rhs = Frame::split(c, m, true);
            let y = self.frame.solve(self.omega(&g.lattice, k), &rhs, m).ok_or_else(|| Error::SmallDivisor {
                mode: k.to_vec(g.dim()),
                divisor: 0.0,
            })?;
            out.set_mode(*k, y);
        }
        Ok(out)
    }

    /// log(e^{-W} e^f e^Y) - (f + Y - W), W = A^{-1} Y(.+alpha) A
    fn nonlinear(&self, f: &MatSeries, y: &MatSeries) -> (MatSeries, MatSeries) {
        let a = self.frame.matrix();
        let w = y.shift(self.alpha).conjugate_by(&a.inverse());
        let mw = -&w;
        let full = log_exp_product(&[&mw, f, y], self.tr);
        let lin = &(f + y) - &w;
        (&full - &lin, w)
    }
}

fn residual_check(a: &Mat2, f: &MatSeries, y: &MatSeries, f_re: &MatSeries, alpha: &[f64]) -> f64 {
    let grid = sample_grid(f.dim(), 64, f.lattice.period());
    grid.iter()
        .map(|t| {
            let tp: Vec<f64> = t.iter().zip(alpha).map(|(x, a)| x + a).collect();
            let lhs = exp_mat(&-y.eval(&tp)) * *a * exp_mat(&f.eval(t)) * exp_mat(&y.eval(t));
            let rhs = *a * exp_mat(&f_re.eval(t));
            lhs.dist(&rhs)
        })
        .fold(0.0, f64::max)
}

fn elim_core(
    a: &Mat2,
    f: &MatSeries,
    frame: Frame,
    alpha: &[f64],
    eta: f64,
    p: &GevreyParams,
    solve_cap: i64,
    controls: &KamControls,
) -> Result<Elimination> {
    let eps = f.gevrey_norm(p);
    let lat = f.lattice;
    if f.is_zero() {
        return Ok(Elimination {
            y: MatSeries::zero(lat),
            f_re: MatSeries::zero(lat),
            eps,
            eta,
            eta_tilde: eta_tilde(eta, a.norm()),
            iters: 0,
            last_update: 0.0,
            leftover: 0.0,
            y_norm: 0.0,
            f_re_norm: 0.0,
            residual: 0.0,
            solve_cap,
        });
    }
    let scale = f.l1_norm();
    let tr = Trunc { cap: 2 * solve_cap.max(f.max_l1()), tol: controls.prune_tol };
    let setup = ElimSetup { frame, alpha, eta, solve_cap, tr };
    let mut y = setup.invert(&setup.project(f, true))?;
    let fp_tol = (controls.fp_rel_tol * scale * scale).max(1e-13 * y.l1_norm()).max(1e-300);
    let mut iters = 0;
    let mut last = f64::INFINITY;
    while iters < controls.max_iters {
        iters += 1;
        let (r, _) = setup.nonlinear(f, &y);
        let rhs = setup.project(&(f + &r), true);
        let next = setup.invert(&rhs)?;
        last = (&next - &y).l1_norm();
        y = next;
        if last <= fp_tol {
            break;
        }
    }
    if last > fp_tol {
        return Err(Error::NoConvergence { iters, last });
    }
    let (r, w) = setup.nonlinear(f, &y);
    let total = &(f + &r);
    let f_re = setup.project(total, false);
    let leftover = (&setup.project(total, true) - &setup.project(&(&w - &y), true)).l1_norm();
    let frame_a = frame.matrix();
    let residual = residual_check(&frame_a, f, &y, &f_re, alpha);
    Ok(Elimination {
        y_norm: y.gevrey_norm(p),
        f_re_norm: f_re.gevrey_norm(p),
        y,
        f_re,
        eps,
        eta,
        eta_tilde: eta_tilde(eta, a.norm()),
        iters,
        last_update: last,
        leftover,
        residual,
        solve_cap,
    })
}

fn check_contracts(el: &Elimination, controls: &KamControls) -> Result<()> {
    if el.residual > controls.residual_tol {
        return Err(Error::Contract(format!("conjugation residual {} > {}", el.residual, controls.residual_tol)));
    }
    if el.y_norm > el.eps.sqrt() {
        return Err(Error::Contract(format!("|Y|_r = {} > eps^(1/2) = {}", el.y_norm, el.eps.sqrt())));
    }
    if el.f_re_norm > 2.0 * el.eps {
        return Err(Error::Contract(format!("|f_re|_r = {} > 2 eps = {}", el.f_re_norm, 2.0 * el.eps)));
    }
    Ok(())
}

fn is_real_rotation(a: &Mat2) -> bool {
    a.max_imag() == 0.0 && (a.a11 - a.a22).norm() < 1e-14 && (a.a12 + a.a21).norm() < 1e-14 && (a.det() - 1.0).norm() < 1e-12
}

/// Removes the non-resonant modes of f: e^{-Y(.+alpha)} A e^f e^Y = A e^{f_re}.
///
/// A real rotation is handled in the M-frame with per-entry resonant sets;
/// any other A uses the symmetric set.
pub fn eliminate_nonresonant(
    a: &Mat2,
    f: &MatSeries,
    alpha: &[f64],
    eta: f64,
    regime: Regime,
    p: &GevreyParams,
    controls: &KamControls,
) -> Result<Elimination> {
    let eps = f.gevrey_norm(p);
    let floor = regime.floor(a.norm(), eps);
    if controls.enforce_eta_floor && eta < floor {
        return Err(Error::EtaBelowFloor { eta, floor });
    }
    let solve_cap = controls.min_solve_cap.max(2 * f.max_l1());
    let el = if is_real_rotation(a) {
        let phi = a.a12.re.atan2(a.a11.re);
        let fm = f.map(|_, c| crate::lie_algebra::m_conj_raw(c));
        let mut el = elim_core(a, &fm, Frame::Rotated { phi }, alpha, eta, p, solve_cap, controls)?;
        el.y = el.y.map(|_, c| crate::lie_algebra::m_unconj_raw(c));
        el.f_re = el.f_re.map(|_, c| crate::lie_algebra::m_unconj_raw(c));
        el.y_norm = el.y.gevrey_norm(p);
        el.f_re_norm = el.f_re.gevrey_norm(p);
        el.residual = residual_check(a, f, &el.y, &el.f_re, alpha);
        el
    } else {
        elim_core(a, f, Frame::symmetric(a), alpha, eta, p, solve_cap, controls)?
    };
    check_contracts(&el, controls)?;
    Ok(el)
}

/// One factor of a composed conjugacy.
#[derive(Clone, Debug)]
pub enum Factor {
    Const(Mat2),
    /// e^{Y(theta)}
    Exp(MatSeries),
    /// Z_n(theta) = e^{pi <n,theta> J}
    Rot(Vec<i64>),
}

#[derive(Clone, Debug, Default)]
pub struct Conjugacy {
    pub factors: Vec<Factor>,
}

impl Conjugacy {
    pub fn identity() -> Self {
        Conjugacy { factors: Vec::new() }
    }

    pub fn eval(&self, theta: &[f64]) -> Mat2 {
        let mut m = Mat2::identity();
        for f in &self.factors {
            let g = match f {
                Factor::Const(c) => *c,
                Factor::Exp(y) => exp_mat(&y.eval(theta)),
                Factor::Rot(n) => Mat2::rotation(0.5 * n.iter().zip(theta).map(|(&k, t)| k as f64 * t).sum::<f64>()),
            };
            m = m * g;
        }
        m
    }

    pub fn append(&mut self, other: &Conjugacy) {
        self.factors.extend(other.factors.iter().cloned());
    }

    /// Sum of the rotation degrees; the other factors are homotopic to constants.
    pub fn degree(&self, d: usize) -> Vec<i64> {
        let mut deg = vec![0; d];
        for f in &self.factors {
            if let Factor::Rot(n) = f {
                for (a, b) in deg.iter_mut().zip(n) {
                    *a += b;
                }
            }
        }
        deg
    }

    /// Fourier series of the product on the half-period lattice.
    pub fn to_series(&self, d: usize, tr: Trunc) -> MatSeries {
        let lat = FrequencyLattice::half(d);
        let mut acc = MatSeries::constant(lat, Mat2::identity());
        for f in &self.factors {
            let s = match f {
                Factor::Const(c) => MatSeries::constant(lat, *c),
                Factor::Exp(y) => exp_series(y, Trunc { cap: tr.cap, tol: tr.tol }).to_half_period(),
                Factor::Rot(n) => rotation_series(n),
            };
            let s = if s.lattice.half_period { s } else { s.to_half_period() };
            acc = acc.product_capped(&s, 2 * tr.cap, tr.tol);
        }
        acc
    }

    /// Max over the grid of |B(theta+alpha)^{-1} A(theta) B(theta) - target(theta)|.
    pub fn residual(&self, alpha: &[f64], a: impl Fn(&[f64]) -> Mat2, target: impl Fn(&[f64]) -> Mat2, grid: &[Vec<f64>]) -> f64 {
        grid.iter()
            .map(|t| {
                let tp: Vec<f64> = t.iter().zip(alpha).map(|(x, y)| x + y).collect();
                let lhs = self.eval(&tp).inv_sl() * a(t) * self.eval(t);
                lhs.dist(&target(t))
            })
            .fold(0.0, f64::max)
    }
}

/// Z_n as a half-period series: cos(pi<n,theta>) I + sin(pi<n,theta>) J.
pub fn rotation_series(n: &[i64]) -> MatSeries {
    let lat = FrequencyLattice::half(n.len());
    let k = Idx::new(n);
    let mut z = MatSeries::zero(lat);
    let c = Mat2::identity().scale(C64::new(0.5, 0.0));
    let s = Mat2::j().scale(C64::new(0.0, -0.5));
    if k.is_zero() {
        return MatSeries::constant(lat, Mat2::identity());
    }
    z.add_mode(k, c + s);
    z.add_mode(-k, c - s);
    z
}

/// Angle-lift adapter so conjugacies can drive rotation-number estimates.
pub struct ConjugacyMap<'a> {
    pub c: &'a Conjugacy,
    deg: Vec<i64>,
    omega_ref: f64,
}

impl<'a> ConjugacyMap<'a> {
    pub fn new(c: &'a Conjugacy, d: usize) -> Self {
        let deg = c.degree(d);
        let m = c.eval(&vec![0.0; d]).re();
        ConjugacyMap { c, deg, omega_ref: m[1][0].atan2(m[0][0]) }
    }
}

impl<'a> FactorMap for ConjugacyMap<'a> {
    fn period(&self) -> f64 {
        2.0
    }
    fn matrix(&self, theta: &[f64]) -> Real2 {
        self.c.eval(theta).re()
    }
    fn omega(&self, theta: &[f64]) -> f64 {
        let m = self.matrix(theta);
        let lin = -PI * self.deg.iter().zip(theta).map(|(&n, t)| n as f64 * t).sum::<f64>();
        lin + nearest_branch(m[1][0].atan2(m[0][0]) - lin, self.omega_ref)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepCase {
    NonResonant,
    Resonant,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub ok: bool,
}

impl Check {
    fn le(name: &str, value: f64, bound: f64) -> Check {
        Check { name: name.to_string(), value, bound, ok: value <= bound }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StepNorms {
    pub eps: f64,
    pub f_plus: f64,
    pub b: f64,
    pub b_minus_id: f64,
    pub a_shift: f64,
    pub a_plus_alg: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Su11Data {
    pub t: f64,
    pub mu_re: f64,
    pub mu_im: f64,
    pub mu_abs: f64,
    pub bch_remainder: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepResult {
    pub case: StepCase,
    pub n_star: Option<Vec<i64>>,
    #[serde(skip)]
    pub b: Conjugacy,
    pub a_plus: Mat2,
    #[serde(skip)]
    pub f_plus: MatSeries,
    pub norms: StepNorms,
    pub su11: Option<Su11Data>,
    pub degree: Vec<i64>,
    pub residual: f64,
    pub eta: f64,
    pub n_window: f64,
    pub solve_cap: i64,
    pub xi: Option<f64>,
    pub checks: Vec<Check>,
}

impl StepResult {
    pub fn checks_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Dioph {
    pub gamma: f64,
    pub tau: f64,
}

fn step_residual(alpha: &[f64], a: &Mat2, f: &MatSeries, b: &Conjugacy, a_plus: &Mat2, f_plus: &MatSeries) -> f64 {
    let grid = sample_grid(alpha.len(), 64, 2.0);
    b.residual(alpha, |t| *a * exp_mat(&f.eval(t)), |t| *a_plus * exp_mat(&f_plus.eval(t)), &grid)
}


/// One KAM step from (A, f) at width r to width r_plus.
pub fn kam_step(
    a: &Mat2,
    f: &MatSeries,
    alpha: &[f64],
    p: &GevreyParams,
    r_plus: f64,
    dioph: &Dioph,
    controls: &KamControls,
) -> Result<StepResult> {
    let d = alpha.len();
    let pp = p.with_r(r_plus);
    let eps = f.gevrey_norm(p);
    if f.is_zero() {
        return Ok(StepResult {
            case: StepCase::NonResonant,
            n_star: None,
            b: Conjugacy::identity(),
            a_plus: *a,
            f_plus: f.clone(),
            norms: StepNorms::default(),
            su11: None,
            degree: vec![0; d],
            residual: 0.0,
            eta: 0.0,
            n_window: 0.0,
            solve_cap: 0,
            xi: None,
            checks: Vec::new(),
        });
    }
    if controls.gate_enabled {
        let bound = controls.gate_c * a.norm().powi(-4) * (p.r - r_plus).powf(4.0 * p.nu * dioph.tau);
        if eps > bound {
            return Err(Error::Gate(format!("eps = {eps:e} > {bound:e}")));
        }
    }
    let n_window = resonance_window(eps, p.r, r_plus, p.nu).min(controls.n_cap);
    let solve_cap = ((4.0 * n_window).ceil() as i64).max(2 * f.max_l1()).max(controls.min_solve_cap);
    let ell = if classify(a) == MatrixClass::Elliptic { Some(elliptic_normal_form(a)?) } else { None };
    let resonance = match &ell {
        Some(e) => find_resonance(e.signed_xi(), alpha, n_window, eps.powf(controls.sigma))?,
        None => None,
    };
    match (resonance, ell) {
        (Some(n_star), Some(e)) => resonant_step(a, f, alpha, p, r_plus, &e, n_star, n_window, solve_cap, controls),
        (_, e) => {
            let mut s = nonresonant_step(a, f, alpha, p, &pp, n_window, solve_cap, controls)?;
            s.xi = e.map(|e| e.signed_xi());
            Ok(s)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn nonresonant_step(
    a: &Mat2,
    f: &MatSeries,
    alpha: &[f64],
    p: &GevreyParams,
    pp: &GevreyParams,
    n_window: f64,
    solve_cap: i64,
    controls: &KamControls,
) -> Result<StepResult> {
    let d = alpha.len();
    let eps = f.gevrey_norm(p);
    let eta = controls.eta_for(Regime::Symmetric, a.norm(), eps);
    let floor = Regime::Symmetric.floor(a.norm(), eps);
    if controls.enforce_eta_floor && eta < floor {
        return Err(Error::EtaBelowFloor { eta, floor });
    }
    let el = elim_core(a, f, Frame::symmetric(a), alpha, eta, p, solve_cap, controls)?;
    let g0 = el.f_re.get(&Idx::ZERO);
    let a_plus = *a * exp_mat(&g0);
    let tr = Trunc { cap: 2 * solve_cap, tol: controls.prune_tol };
    let mg0 = MatSeries::constant(f.lattice, -g0);
    let f_plus = log_exp_product(&[&mg0, &el.f_re], tr);
    let b = Conjugacy { factors: vec![Factor::Exp(el.y.clone())] };
    let bs = exp_series(&el.y, tr);
    let b_norm = bs.gevrey_norm(pp);
    let b_minus_id = (&bs - &MatSeries::constant(f.lattice, Mat2::identity())).gevrey_norm(pp);
    let f_plus_norm = f_plus.gevrey_norm(pp);
    let a_shift = (a_plus - *a).norm();
    let residual = step_residual(alpha, a, f, &b, &a_plus, &f_plus);
    let checks = vec![
        Check::le("|A+ - A| <= 4|A|eps", a_shift, 4.0 * a.norm() * eps),
        Check::le("|f+|_{r+} <= eps^2", f_plus_norm, eps * eps),
        Check::le("|B - Id|_{r+} <= 2 eps^(1/2)", b_minus_id, 2.0 * eps.sqrt()),
        Check::le("conjugacy residual", residual, controls.residual_tol),
    ];
    Ok(StepResult {
        case: StepCase::NonResonant,
        n_star: None,
        b,
        a_plus,
        f_plus,
        norms: StepNorms { eps, f_plus: f_plus_norm, b: b_norm, b_minus_id, a_shift, a_plus_alg: 0.0 },
        su11: None,
        degree: vec![0; d],
        residual,
        eta,
        n_window,
        solve_cap,
        xi: None,
        checks,
    })
}

/// Shifts the (1,2) entries by -n and the (2,1) entries by +n: D_Z^{-1} g D_Z in the M-frame.
fn z_twist(g: &MatSeries, n: &Idx) -> MatSeries {
    let mut out = MatSeries::zero(g.lattice);
    for (k, c) in &g.coeffs {
        out.add_mode(*k, Mat2::new(c.a11, ZERO, ZERO, c.a22));
        out.add_mode(*k - *n, Mat2::new(ZERO, c.a12, ZERO, ZERO));
        out.add_mode(*k + *n, Mat2::new(ZERO, ZERO, c.a21, ZERO));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn resonant_step(
    a: &Mat2,
    f: &MatSeries,
    alpha: &[f64],
    p: &GevreyParams,
    r_plus: f64,
    e: &EllipticData,
    n_star: Vec<i64>,
    n_window: f64,
    solve_cap: i64,
    controls: &KamControls,
) -> Result<StepResult> {
    use crate::lie_algebra::{m_conj_raw, m_unconj_raw};
    let d = alpha.len();
    let pp = p.with_r(r_plus);
    let eps = f.gevrey_norm(p);
    let pm = e.p;
    let pinv = pm.inverse();
    // rotated perturbation in the M-frame
    let ft = f.conjugate_by(&pm);
    let eps_t = pm.norm().powi(2) * eps;
    let a_t = e.normal_form();
    let eta = controls.eta_for(Regime::Rotated, a_t.norm(), eps_t);
    let floor = Regime::Rotated.floor(a_t.norm(), eps_t);
    if controls.enforce_eta_floor && eta < floor {
        return Err(Error::EtaBelowFloor { eta, floor });
    }
    let xi_s = e.signed_xi();
    let phi = 2.0 * PI * xi_s;
    let fm = ft.map(|_, c| m_conj_raw(c));
    let el = elim_core(&a_t, &fm, Frame::Rotated { phi }, alpha, eta, p, solve_cap, controls)?;
    let nk = Idx::new(&n_star);
    let g = z_twist(&el.f_re, &nk);
    let frak_p = g.get(&Idx::ZERO);
    // new constant: e^{i 2pi xi'} with xi' = xi_s - <n,alpha>/2 = j/2 + small
    let shift = 2.0 * xi_s - nk.dot(alpha);
    let j = shift.round();
    let small = 0.5 * (shift - j);
    let sign = if (j as i64).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    let x0 = Mat2::diag(C64::new(0.0, 2.0 * PI * small), C64::new(0.0, -2.0 * PI * small));
    let (a_alg, bch_rem) = bch_product(&x0, &frak_p, 3)?;
    let a_plus_m = (exp_mat(&x0) * exp_mat(&frak_p)).scale_re(sign);
    let tr = Trunc { cap: 2 * solve_cap, tol: controls.prune_tol };
    let mp = MatSeries::constant(g.lattice, -frak_p);
    let f_plus_m = log_exp_product(&[&mp, &g], tr);
    let a_plus = real_part(&m_unconj_raw(&a_plus_m));
    let f_plus = f_plus_m.map(|_, c| m_unconj_raw(c));
    let y_real = el.y.map(|_, c| m_unconj_raw(c));
    let b = Conjugacy { factors: vec![Factor::Const(pinv), Factor::Exp(y_real), Factor::Rot(n_star.clone())] };
    let bs = b.to_series(d, Trunc { cap: solve_cap + nk.l1(), tol: tr.tol });
    let degree = crate::cocycle_dynamics::degree(&bs)?;
    let b_norm = bs.gevrey_norm(&pp);
    let f_plus_norm = f_plus.gevrey_norm(&pp);
    let residual = step_residual(alpha, a, f, &b, &a_plus, &f_plus);
    let t = a_alg.a11.im;
    let mu = a_alg.a12;
    let sigma = controls.sigma;
    let n_abs = nk.l1() as f64;
    let mu_bound = eps.powf(0.75) * (-p.r * (2.0 * PI * n_abs).powf(p.nu)).exp();
    let checks = vec![
        Check::le("|a+| <= 4 eps^sigma", a_alg.norm(), 4.0 * eps.powf(sigma)),
        Check::le("|t+| <= eps^sigma", t.abs(), eps.powf(sigma)),
        Check::le("|mu+| <= eps^(3/4) e^{-r(2pi|n*|)^nu}", mu.norm(), mu_bound),
        Check::le("|f+|_{r+} <= eps^2", f_plus_norm, eps * eps),
        Check::le("deg B = n*", if degree == n_star { 0.0 } else { 1.0 }, 0.0),
        Check::le("conjugacy residual", residual, controls.residual_tol),
    ];
    Ok(StepResult {
        case: StepCase::Resonant,
        n_star: Some(n_star),
        b,
        a_plus,
        f_plus,
        norms: StepNorms {
            eps,
            f_plus: f_plus_norm,
            b: b_norm,
            b_minus_id: f64::NAN,
            a_shift: (a_plus - *a).norm(),
            a_plus_alg: a_alg.norm(),
        },
        su11: Some(Su11Data { t, mu_re: mu.re, mu_im: mu.im, mu_abs: mu.norm(), bch_remainder: bch_rem }),
        degree,
        residual,
        eta,
        n_window,
        solve_cap,
        xi: Some(xi_s),
        checks,
    })
}

fn real_part(m: &Mat2) -> Mat2 {
    Mat2::real(m.a11.re, m.a12.re, m.a21.re, m.a22.re)
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub j: usize,
    pub r_j: f64,
    pub eps_j: f64,
    #[serde(rename = "N_j")]
    pub n_j: f64,
    pub case: StepCase,
    pub n_star: Option<Vec<i64>>,
    pub norms: StepNorms,
    pub residual: f64,
    pub eta: f64,
    pub solve_cap: i64,
    pub xi: Option<f64>,
    pub su11: Option<Su11Data>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TraceStatus {
    AlmostReduced,
    Converged,
    Aborted { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct KamTrace {
    pub steps: Vec<TraceStep>,
    pub status: TraceStatus,
    pub r0: f64,
    pub r: f64,
    pub r_tilde: f64,
    pub final_eps: f64,
    pub composed_residual: f64,
    pub decay_ok: bool,
    pub separation_log: Vec<String>,
    pub controls: KamControls,
    #[serde(skip)]
    pub conjugacy: Conjugacy,
    pub a_final: Mat2,
    #[serde(skip)]
    pub f_final: MatSeries,
}

impl KamTrace {
    pub fn resonant_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.case == StepCase::Resonant).count()
    }
}

/// r_j with r_j - r_{j+1} = (r0 - r~)/4^{j+1}, r~ = (r0 + r)/2.
pub fn width_schedule(r0: f64, r: f64, j: usize) -> f64 {
    let rt = 0.5 * (r0 + r);
    let mut x = r0;
    for i in 0..j {
        x -= (r0 - rt) / 4f64.powi(i as i32 + 1);
    }
    x
}

#[allow(clippy::too_many_arguments)]
pub fn almost_reduce(
    a0: &Mat2,
    f0: &MatSeries,
    alpha: &[f64],
    nu: f64,
    r0: f64,
    r: f64,
    max_steps: usize,
    dioph: &Dioph,
    controls: &KamControls,
) -> Result<KamTrace> {
    if !(r > 0.0 && r < r0) {
        return Err(Error::InvalidParameter(format!("need 0 < r < r0, got r = {r}, r0 = {r0}")));
    }
    let d = alpha.len();
    let mut a = *a0;
    let mut f = f0.clone();
    let mut conj = Conjugacy::identity();
    let mut steps = Vec::new();
    let mut status = TraceStatus::AlmostReduced;
    let mut decay_ok = true;
    let mut separation_log = Vec::new();
    let mut last_res: Option<(f64, Vec<i64>)> = None;
    let mut j = 0;
    loop {
        let rj = width_schedule(r0, r, j);
        let p = GevreyParams::new(nu, rj)?;
        let eps = f.gevrey_norm(&p);
        if f.is_zero() || eps < controls.underflow {
            status = TraceStatus::Converged;
            break;
        }
        if j >= max_steps {
            break;
        }
        let r_next = width_schedule(r0, r, j + 1);
        let step = match kam_step(&a, &f, alpha, &p, r_next, dioph, controls) {
            Ok(s) => s,
            Err(e) if controls.best_effort => {
                status = TraceStatus::Aborted { reason: e.to_string() };
                break;
            }
            Err(e) => return Err(e),
        };
        let next_eps = step.f_plus.gevrey_norm(&p.with_r(r_next));
        if next_eps > eps.powf(1.5) {
            decay_ok = false;
        }
        if let Some(n) = &step.n_star {
            let nn = Idx::new(n).l1() as f64;
            if let Some((ep, np)) = &last_res {
                let npn = Idx::new(np).l1() as f64;
                let need = ep.powf(-1.0 / (22.0 * dioph.tau)) * npn;
                separation_log.push(format!("step {j}: |n_q| = {nn} vs eps_p^(-1/(22 tau))|n_p| = {need:e}"));
            }
            last_res = Some((eps, n.clone()));
        }
        steps.push(TraceStep {
            j,
            r_j: rj,
            eps_j: eps,
            n_j: step.n_window,
            case: step.case.clone(),
            n_star: step.n_star.clone(),
            norms: step.norms.clone(),
            residual: step.residual,
            eta: step.eta,
            solve_cap: step.solve_cap,
            xi: step.xi,
            su11: step.su11,
            checks: step.checks.clone(),
        });
        conj.append(&step.b);
        a = step.a_plus;
        f = step.f_plus;
        j += 1;
    }
    let final_eps = f.gevrey_norm(&GevreyParams::new(nu, width_schedule(r0, r, j))?);
    let mut rng = ChaCha8Rng::seed_from_u64(controls.seed);
    let grid: Vec<Vec<f64>> = (0..16).map(|_| (0..d).map(|_| rng.gen::<f64>() * 2.0).collect()).collect();
    let composed_residual =
        conj.residual(alpha, |t| *a0 * exp_mat(&f0.eval(t)), |t| a * exp_mat(&f.eval(t)), &grid);
    Ok(KamTrace {
        steps,
        status,
        r0,
        r,
        r_tilde: 0.5 * (r0 + r),
        final_eps,
        composed_residual,
        decay_ok,
        separation_log,
        controls: controls.clone(),
        conjugacy: conj,
        a_final: a,
        f_final: f,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReduceParams {
    pub nu: f64,
    pub r0: f64,
    pub r: f64,
    pub max_steps: usize,
    pub dioph: Dioph,
    pub n_iter: usize,
    pub controls: KamControls,
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalReduction {
    #[serde(skip)]
    pub z_tilde: Conjugacy,
    pub a_final: Mat2,
    pub phi: f64,
    pub theta: f64,
    pub parabolic_defect: f64,
    pub degree: Vec<i64>,
    pub phi_bound: f64,
    pub phi_ok: bool,
    pub residual: f64,
    #[serde(skip)]
    pub trace: Option<KamTrace>,
}

/// Rotation angle (in the R_phi convention) bringing sl(2,R) element a to upper-triangular form.
pub fn parabolic_rotation(a: &Mat2) -> (f64, Mat2) {
    let x = a.a11.re;
    let y = 0.5 * (a.a12.re + a.a21.re);
    let z = 0.5 * (a.a12.re - a.a21.re);
    if x.abs() + y.abs() == 0.0 {
        return (0.0, *a);
    }
    // R_{-t} S R_t rotates (x, y) by angle 4 pi t
    let target = if z >= 0.0 { PI / 2.0 } else { -PI / 2.0 };
    let cur = x.atan2(y).rem_euclid(2.0 * PI);
    let _ = cur;
    let ang = y.atan2(x);
    let t = (target - ang) / (4.0 * PI);
    let r = Mat2::rotation(t);
    let rot = r.inverse() * *a * r;
    (t, rot)
}

fn cocycle_of(a0: &Mat2, f0: &MatSeries, alpha: &[f64]) -> Result<Cocycle> {
    Cocycle::factored(alpha.to_vec(), *a0, f0.clone())
}

/// Reduction at a rational rotation number 2 rho = <k, alpha> to a parabolic constant (1, phi; 0, 1).
pub fn reduce_rational(
    a0: &Mat2,
    f0: &MatSeries,
    alpha: &[f64],
    k: &[i64],
    params: &ReduceParams,
) -> Result<RationalReduction> {
    let c = cocycle_of(a0, f0, alpha)?;
    let rho = rotation_number_map(&c, params.n_iter);
    let target = Idx::new(k).dot(alpha);
    let tol = 20.0 / params.n_iter as f64;
    let mis = torus_distance(2.0 * rho.value - target).min(torus_distance(-2.0 * rho.value - target));
    if mis > tol {
        return Err(Error::RotationMismatch(format!("|2 rho -/+ <k,alpha>|_T = {mis:e} > {tol:e}")));
    }
    let uh = UhParams { cone: 1e-3, n_win: 4000, growth: 1e-3, grid: 8 };
    if is_uniformly_hyperbolic(&c, &uh) == UhVerdict::Uh {
        return Err(Error::UniformlyHyperbolic);
    }
    let trace = almost_reduce(a0, f0, alpha, params.nu, params.r0, params.r, params.max_steps, &params.dioph, &params.controls)?;
    let af = trace.a_final;
    let (afl, sign) = if af.trace().re < 0.0 { (af.scale_re(-1.0), -1.0) } else { (af, 1.0) };
    let la = log_mat(&afl)?;
    let la = real_part(&la);
    let (theta, rot) = parabolic_rotation(&la);
    let phi = la.a12.re - la.a21.re;
    let parabolic_defect = la.det().norm();
    let mut z = trace.conjugacy.clone();
    z.factors.push(Factor::Const(Mat2::rotation(theta)));
    let a_final = exp_mat(&rot).scale_re(sign);
    let eps0 = f0.gevrey_norm(&GevreyParams::new(params.nu, params.r0)?);
    let kk = Idx::new(k).l1() as f64;
    let phi_bound = eps0.powf(0.6) * (-params.r * (2.0 * PI * kk).powf(params.nu)).exp();
    let grid = sample_grid(alpha.len(), 16, 2.0);
    let ff = &trace.f_final;
    let rth = Mat2::rotation(theta);
    let residual = z.residual(
        alpha,
        |t| *a0 * exp_mat(&f0.eval(t)),
        |t| rth.inverse() * af * exp_mat(&ff.eval(t)) * rth,
        &grid,
    );
    Ok(RationalReduction {
        degree: z.degree(alpha.len()),
        z_tilde: z,
        a_final,
        phi,
        theta,
        parabolic_defect,
        phi_bound,
        phi_ok: phi.abs() <= 10.0 * phi_bound,
        residual,
        trace: Some(trace),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiophantineReduction {
    #[serde(skip)]
    pub b: Conjugacy,
    pub a_final: Mat2,
    pub degree: Vec<i64>,
    pub rho: f64,
    pub rho_final: f64,
    pub residual: f64,
    pub steps: usize,
    #[serde(skip)]
    pub trace: Option<KamTrace>,
}

/// Full reduction to a constant elliptic matrix when rho is Diophantine w.r.t. alpha.
pub fn reduce_diophantine(
    a0: &Mat2,
    f0: &MatSeries,
    alpha: &[f64],
    kappa: f64,
    tau: f64,
    params: &ReduceParams,
) -> Result<DiophantineReduction> {
    let c = cocycle_of(a0, f0, alpha)?;
    let rho = rotation_number_map(&c, params.n_iter).value;
    let scan = 200;
    match dc_alpha_check(rho, alpha, kappa, tau, scan) {
        DcResult::Pass => {}
        DcResult::Fail(m) | DcResult::Rational(m) => return Err(Error::DcFailed(m)),
    }
    let trace = almost_reduce(a0, f0, alpha, params.nu, params.r0, params.r, params.max_steps, &params.dioph, &params.controls)?;
    if trace.status != TraceStatus::Converged {
        return Err(Error::Contract(format!("reduction did not converge: {:?}", trace.status)));
    }
    let a_final = trace.a_final;
    let cf = Cocycle::constant(alpha.to_vec(), a_final)?;
    let rho_final = rotation_number_map(&cf, params.n_iter).value;
    let grid = sample_grid(alpha.len(), 64, 2.0);
    let residual = trace.conjugacy.residual(alpha, |t| *a0 * exp_mat(&f0.eval(t)), |_| a_final, &grid);
    Ok(DiophantineReduction {
        b: trace.conjugacy.clone(),
        degree: trace.conjugacy.degree(alpha.len()),
        a_final,
        rho,
        rho_final,
        residual,
        steps: trace.steps.len(),
        trace: Some(trace),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle_dynamics::golden;

    fn single_mode(lat: FrequencyLattice, k: i64, m: Mat2) -> MatSeries {
        let mut s = MatSeries::zero(lat);
        s.add_mode(Idx::new(&[k]), m);
        s.add_mode(Idx::new(&[-k]), m.conj());
        s
    }

    #[test]
    fn window_formula() {
        let n = resonance_window((-2f64).exp(), 5.0, 1.0, 0.5);
        assert!((n - 1.0 / (2.0 * PI)).abs() < 1e-14);
        assert!(resonance_window(1e-8, 5.0, 1.0, 0.5) > resonance_window(1e-4, 5.0, 1.0, 0.5));
    }

    #[test]
    fn resonance_scan() {
        let a = [golden()];
        assert_eq!(find_resonance(golden() / 2.0, &a, 3.0, 1e-6).unwrap(), Some(vec![1]));
        assert_eq!(find_resonance(0.26, &a, 10.0, 1e-6).unwrap(), None);
        let t = 1e-3;
        let al = [1.8 * t];
        let xi = 0.5 * (al[0] + 0.9 * t);
        assert!(matches!(find_resonance(xi, &al, 3.0, t), Err(Error::MultipleResonances(_, _))));
    }

    #[test]
    fn single_mode_elimination() {
        let lat = FrequencyLattice::torus(1);
        let a = Mat2::rotation(0.17);
        let f = single_mode(lat, 1, Mat2::sl2(C64::new(1e-6, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
        let p = GevreyParams::new(0.5, 1.0).unwrap();
        let c = KamControls { enforce_eta_floor: false, ..KamControls::desk() };
        let el = eliminate_nonresonant(&a, &f, &[golden()], 1e-3, Regime::Rotated, &p, &c).unwrap();
        assert!(el.f_re.get(&Idx::new(&[1])).max_abs() < 1e-14);
        assert!(el.residual < 1e-12, "{}", el.residual);
    }

    #[test]
    fn zero_step() {
        let lat = FrequencyLattice::torus(1);
        let p = GevreyParams::new(0.5, 1.0).unwrap();
        let s = kam_step(&Mat2::rotation(0.26), &MatSeries::zero(lat), &[golden()], &p, 0.5, &Dioph { gamma: 0.1, tau: 1.5 }, &KamControls::desk()).unwrap();
        assert_eq!(s.case, StepCase::NonResonant);
        assert_eq!(s.a_plus, Mat2::rotation(0.26));
    }

    #[test]
    fn nonresonant_step_contracts() {
        let lat = FrequencyLattice::torus(1);
        let p = GevreyParams::new(0.5, 1.0).unwrap();
        let m = Mat2::sl2(C64::new(0.3e-8, 0.1e-8), C64::new(0.2e-8, 0.0), C64::new(-0.1e-8, 0.05e-8));
        let raw = single_mode(lat, 1, m);
        let f = raw.scale(C64::new(1e-8 / raw.gevrey_norm(&p), 0.0));
        let a = Mat2::rotation(0.26);
        let s = kam_step(&a, &f, &[golden()], &p, 0.5, &Dioph { gamma: 0.1, tau: 1.5 }, &KamControls::desk()).unwrap();
        assert_eq!(s.case, StepCase::NonResonant);
        assert!(s.checks_ok(), "{:?}", s.checks);
    }

    #[test]
    fn schedule_decreasing() {
        let mut prev = width_schedule(1.0, 0.5, 0);
        assert_eq!(prev, 1.0);
        for j in 1..10 {
            let x = width_schedule(1.0, 0.5, j);
            assert!(x < prev && x > 0.75);
            prev = x;
        }
    }

    #[test]
    fn parabolic_extraction() {
        // a = R_t (0, phi; 0, 0) R_{-t}
        let r = Mat2::rotation(0.11);
        let a = r * Mat2::real(0.0, 0.4, 0.0, 0.0) * r.inverse();
        let (_, rot) = parabolic_rotation(&a);
        assert!(rot.a21.norm() < 1e-12 && rot.a11.norm() < 1e-12);
        assert!((rot.a12.re - 0.4).abs() < 1e-12);
        assert!(((a.a12 - a.a21).re - 0.4).abs() < 1e-12);
    }
}
