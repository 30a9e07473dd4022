//! Schrödinger cocycles: IDS, labelled spectral gaps, the gap decay predicate
//! and one-step averaging at a parabolic gap edge.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle_dynamics::{
    is_uniformly_hyperbolic, rotation_number_map, torus_distance, Cocycle, CocycleMap, Real2, UhParams, UhVerdict,
};
use crate::error::{Error, Result};
use crate::gevrey_fourier::{indices_within, sample_grid, FrequencyLattice, GevreyParams, Idx, MatSeries, ScalarSeries};
use crate::kam_engine::{exp_series, exp_tail, Dioph, Trunc};
use crate::lie_algebra::{exp_mat, solve_twisted_ad, Mat2};

#[derive(Clone, Debug, Serialize)]
pub struct SchrodingerProblem {
    #[serde(skip)]
    pub v: ScalarSeries,
    pub alpha: Vec<f64>,
    pub p: GevreyParams,
    pub lambda: Option<f64>,
    pub eps0: f64,
}

impl SchrodingerProblem {
    pub fn new(v: ScalarSeries, alpha: Vec<f64>, p: GevreyParams) -> Result<Self> {
        if v.dim() != alpha.len() {
            return Err(Error::DimensionMismatch { expected: v.dim(), got: alpha.len() });
        }
        if v.lattice.half_period {
            return Err(Error::LatticeMismatch);
        }
        if !v.is_real(1e-12) {
            return Err(Error::InvalidParameter("potential is not real-valued".into()));
        }
        for k in indices_within(alpha.len(), 50) {
            if !k.is_zero() && torus_distance(k.dot(&alpha)) < 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "frequency is rational: <{:?}, alpha> is an integer",
                    k.to_vec(alpha.len())
                )));
            }
        }
        let eps0 = v.gevrey_norm(&p);
        Ok(SchrodingerProblem { v, alpha, p, lambda: None, eps0 })
    }

    /// v = 2 lambda cos(2 pi theta_1)
    pub fn amo(lambda: f64, alpha: Vec<f64>, p: GevreyParams) -> Result<Self> {
        let lat = FrequencyLattice::torus(alpha.len());
        let v = ScalarSeries::cosine(lat, Idx::unit(0), lambda);
        let mut s = Self::new(v, alpha, p)?;
        s.lambda = Some(lambda);
        Ok(s)
    }

    pub fn potential(&self, theta: &[f64]) -> f64 {
        self.v.eval_re(theta)
    }

    pub fn map(&self, e: f64) -> SchrodingerMap<'_> {
        SchrodingerMap { prob: self, e }
    }

    /// sup |v| bound from the coefficients
    pub fn sup_bound(&self) -> f64 {
        self.v.l1_norm()
    }
}

/// S_E(theta) = (E - v(theta), -1; 1, 0)
pub struct SchrodingerMap<'a> {
    pub prob: &'a SchrodingerProblem,
    pub e: f64,
}

impl<'a> CocycleMap for SchrodingerMap<'a> {
    fn alpha(&self) -> &[f64] {
        &self.prob.alpha
    }
    fn matrix(&self, theta: &[f64]) -> Real2 {
        [[self.e - self.prob.potential(theta), -1.0], [1.0, 0.0]]
    }
    fn omega(&self, theta: &[f64]) -> f64 {
        1f64.atan2(self.e - self.prob.potential(theta))
    }
}

pub fn schrodinger_constant(e: f64) -> Mat2 {
    Mat2::real(e, -1.0, 1.0, 0.0)
}

/// A_E e^f with f = (0, 0; v, 0), exact since A_E^{-1} S_E = (1, 0; v, 1).
pub fn schrodinger_cocycle(prob: &SchrodingerProblem, e: f64) -> Result<Cocycle> {
    let f = prob.v.times_matrix(&Mat2::real(0.0, 0.0, 1.0, 0.0));
    let a = schrodinger_constant(e);
    let c = Cocycle::factored(prob.alpha.clone(), a, f)?;
    let grid = sample_grid(prob.alpha.len(), 64, 1.0);
    let sm = prob.map(e);
    let res = grid
        .iter()
        .map(|t| {
            let m = c.evaluate(t).re();
            let s = sm.matrix(t);
            (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| (m[i][j] - s[i][j]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    if res > 1e-10 {
        return Err(Error::Contract(format!("factorization residual {res:e}")));
    }
    Ok(c)
}

/// rho_S in [0, 1/2]: 1/2 below the spectrum, 0 above.
pub fn schrodinger_rho(prob: &SchrodingerProblem, e: f64, n_iter: usize) -> f64 {
    torus_distance(rotation_number_map(&prob.map(e), n_iter).value)
}

pub fn ids(prob: &SchrodingerProblem, e: f64, n_iter: usize) -> f64 {
    (1.0 - 2.0 * schrodinger_rho(prob, e, n_iter)).clamp(0.0, 1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanControls {
    pub k_max: i64,
    pub label_tol: f64,
    pub edge_tol: f64,
    pub n_iter: usize,
    pub e_range: (f64, f64),
    pub check_uh: bool,
    /// plateaus narrower than this multiple of the tolerance-induced width are dropped
    pub resolution_factor: f64,
}

impl ScanControls {
    pub fn for_problem(prob: &SchrodingerProblem) -> Self {
        let b = 2.0 + prob.sup_bound() + 0.1;
        ScanControls { k_max: 6, label_tol: 1e-5, edge_tol: 1e-8, n_iter: 200_000, e_range: (-b, b), check_uh: true, resolution_factor: 3.0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GapRecord {
    pub k: Vec<i64>,
    pub e_minus: f64,
    pub e_plus: f64,
    pub length: f64,
    /// 2 rho on the plateau and its distance to <k, alpha>
    pub plateau: f64,
    pub label_residual: f64,
    pub uh: Option<UhVerdict>,
}

/// Bisection for the boundary of {E : pred(E)} assuming pred(lo) and !pred(hi).
fn bisect(mut lo: f64, mut hi: f64, tol: f64, pred: impl Fn(f64) -> bool) -> (f64, f64) {
    while hi - lo > tol {
        let m = 0.5 * (lo + hi);
        if pred(m) {
            lo = m;
        } else {
            hi = m;
        }
    }
    (lo, hi)
}

fn locate_gap(prob: &SchrodingerProblem, k: &Idx, sc: &ScanControls) -> Option<GapRecord> {
    let d = prob.alpha.len();
    let target = k.dot(&prob.alpha).rem_euclid(1.0);
    let g = |e: f64| 2.0 * schrodinger_rho(prob, e, sc.n_iter) - target;
    let (mut lo, mut hi) = sc.e_range;
    if g(lo) <= sc.label_tol || g(hi) >= -sc.label_tol {
        return None;
    }
    let mut inside = None;
    while hi - lo > sc.edge_tol {
        let m = 0.5 * (lo + hi);
        let gm = g(m);
        if gm > sc.label_tol {
            lo = m;
        } else if gm < -sc.label_tol {
            hi = m;
        } else {
            inside = Some((m, gm));
            break;
        }
    }
    let (em, gm) = inside?;
    let (_, e_minus) = bisect(lo, em, sc.edge_tol, |e| g(e) > sc.label_tol);
    let (e_plus, _) = bisect(em, hi, sc.edge_tol, |e| g(e) >= -sc.label_tol);
    if e_minus >= e_plus {
        return None;
    }
    // width the tolerance band alone would produce around a collapsed gap
    let h = (e_plus - e_minus).max(1e-6);
    let slope = (g(e_minus - h) - g(e_plus + h)) / (e_plus - e_minus + 2.0 * h);
    let resolution = 2.0 * sc.label_tol / slope.max(1e-300);
    if e_plus - e_minus <= sc.resolution_factor * resolution {
        return None;
    }
    let uh = if sc.check_uh && e_plus > e_minus {
        let width = e_plus - e_minus;
        let n_win = ((20.0 / width) as usize).clamp(200, 1_000_000);
        let p = UhParams { cone: 1e-6, n_win, growth: 1.0 / n_win as f64, grid: 4 };
        Some(is_uniformly_hyperbolic(&prob.map(0.5 * (e_minus + e_plus)), &p))
    } else {
        None
    };
    Some(GapRecord {
        k: k.to_vec(d),
        e_minus,
        e_plus,
        length: e_plus - e_minus,
        plateau: gm + target,
        label_residual: gm.abs(),
        uh,
    })
}

/// Plateaus of 2 rho(E) at <k, alpha> mod 1, 0 < |k|_1 <= k_max.
pub fn find_gaps(prob: &SchrodingerProblem, sc: &ScanControls) -> Vec<GapRecord> {
    let labels: Vec<Idx> = indices_within(prob.alpha.len(), sc.k_max).into_iter().filter(|k| !k.is_zero()).collect();
    let mut gaps: Vec<GapRecord> = labels.par_iter().filter_map(|k| locate_gap(prob, k, sc)).collect();
    gaps.sort_by(|a, b| a.e_minus.total_cmp(&b.e_minus).then(a.k.cmp(&b.k)));
    gaps
}

/// Bottom and top of the spectrum: where rho_S leaves 1/2 and reaches 0.
pub fn spectrum_extremes(prob: &SchrodingerProblem, sc: &ScanControls) -> (f64, f64) {
    let rho = |e: f64| schrodinger_rho(prob, e, sc.n_iter);
    let (lo, hi) = sc.e_range;
    let (_, bottom) = bisect(lo, hi, sc.edge_tol, |e| rho(e) > 0.5 - sc.label_tol);
    let (top, _) = bisect(lo, hi, sc.edge_tol, |e| rho(e) > sc.label_tol);
    (bottom, top)
}

/// [E_min, E_max] minus the detected open gaps.
pub fn spectrum_approximation(prob: &SchrodingerProblem, sc: &ScanControls) -> (Vec<(f64, f64)>, Vec<GapRecord>) {
    let (bottom, top) = spectrum_extremes(prob, sc);
    let gaps = find_gaps(prob, sc);
    let mut out = Vec::new();
    let mut cur = bottom;
    for g in gaps.iter().filter(|g| g.length > 0.0) {
        if g.e_minus > cur && g.e_plus < top {
            out.push((cur, g.e_minus));
            cur = g.e_plus;
        }
    }
    out.push((cur, top));
    (out, gaps)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayCheck {
    pub k: Vec<i64>,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

/// |G_k| <= eps0^{1/2} e^{-r (2 pi |k|)^nu}
pub fn verify_gap_decay(gaps: &[GapRecord], eps0: f64, p: &GevreyParams) -> Vec<DecayCheck> {
    gaps.iter()
        .map(|g| {
            let k = Idx::new(&g.k).l1() as f64;
            let bound = eps0.sqrt() * (-p.r * (2.0 * PI * k).powf(p.nu)).exp();
            DecayCheck { k: g.k.clone(), measured: g.length, bound, pass: g.length <= bound }
        })
        .collect()
}

/// Number of eigenvalues below e of the Dirichlet section with diagonal `diag`.
fn sturm_count(diag: &[f64], e: f64) -> usize {
    let mut q = 1.0f64;
    let mut count = 0;
    for (i, &a) in diag.iter().enumerate() {
        q = if i == 0 { a - e } else { a - e - 1.0 / q };
        if q == 0.0 {
            q = 1e-300;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues of the size x size section u_{n+1} + u_{n-1} + v(theta + n alpha) u_n.
pub fn finite_section_spectrum(prob: &SchrodingerProblem, theta: &[f64], size: usize) -> Result<Vec<f64>> {
    if size == 0 || size > 4096 {
        return Err(Error::InvalidParameter(format!("section size {size} outside 1..=4096")));
    }
    let diag: Vec<f64> = (0..size)
        .map(|n| {
            let t: Vec<f64> = theta.iter().zip(&prob.alpha).map(|(x, a)| x + n as f64 * a).collect();
            prob.potential(&t)
        })
        .collect();
    let lo0 = diag.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0;
    let hi0 = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0;
    let eig: Vec<f64> = (0..size)
        .into_par_iter()
        .map(|j| {
            let (mut lo, mut hi) = (lo0, hi0);
            for _ in 0..200 {
                let m = 0.5 * (lo + hi);
                if hi - lo < 1e-11 {
                    break;
                }
                if sturm_count(&diag, m) > j {
                    hi = m;
                } else {
                    lo = m;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    Ok(eig)
}

/// Union of sections at equispaced phases.
pub fn finite_section_union(prob: &SchrodingerProblem, phases: usize, size: usize) -> Result<Vec<Vec<f64>>> {
    let d = prob.alpha.len();
    (0..phases)
        .map(|i| {
            let th = vec![i as f64 / phases as f64; d];
            finite_section_spectrum(prob, &th, size)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeCrossCheck {
    pub k: Vec<i64>,
    pub edge_distance: f64,
    pub ids_mismatch: f64,
    pub pass: bool,
}

/// Each edge lies near a section eigenvalue and the section IDS in the gap matches the label.
pub fn cross_check_gaps(gaps: &[GapRecord], sections: &[Vec<f64>], alpha: &[f64], tol: f64) -> Vec<EdgeCrossCheck> {
    let nearest = |e: f64| {
        sections
            .iter()
            .map(|s| {
                let i = s.partition_point(|&x| x < e);
                let a = if i > 0 { (e - s[i - 1]).abs() } else { f64::INFINITY };
                let b = if i < s.len() { (s[i] - e).abs() } else { f64::INFINITY };
                a.min(b)
            })
            .fold(f64::INFINITY, f64::min)
    };
    gaps.iter()
        .map(|g| {
            let edge_distance = nearest(g.e_minus).max(nearest(g.e_plus));
            let mid = 0.5 * (g.e_minus + g.e_plus);
            let label = 1.0 - Idx::new(&g.k).dot(alpha).rem_euclid(1.0);
            let ids_mismatch = sections
                .iter()
                .map(|s| (s.partition_point(|&x| x < mid) as f64 / s.len() as f64 - label).abs())
                .fold(0.0, f64::max);
            EdgeCrossCheck { k: g.k.clone(), edge_distance, ids_mismatch, pass: edge_distance <= tol && ids_mismatch <= tol }
        })
        .collect()
}

/// sup_{n != 0} 4 gamma^{-3} |n|^{3 tau} e^{-(R/2)(2 pi |n|)^nu}
pub fn d_r(dioph: &Dioph, nu: f64, big_r: f64) -> f64 {
    let term = |n: f64| 4.0 * dioph.gamma.powi(-3) * n.powf(3.0 * dioph.tau) * (-(big_r / 2.0) * (2.0 * PI * n).powf(nu)).exp();
    // maximizer of n^{3tau} e^{-(R/2)(2pi n)^nu}: n* = (6 tau / (nu R))^{1/nu} / (2 pi)
    let nstar = (6.0 * dioph.tau / (nu * big_r)).powf(1.0 / nu) / (2.0 * PI);
    let last = (2.0 * nstar).ceil().max(1.0) as i64 + 1;
    (1..=last).map(|n| term(n as f64)).fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct Averages {
    pub z11_sq: f64,
    pub z11_z12: f64,
    pub z12_sq: f64,
}

impl Averages {
    pub fn of(z: &MatSeries, tr: Trunc) -> Averages {
        let z11 = z.entry(0, 0);
        let z12 = z.entry(0, 1);
        let m = |a: &ScalarSeries, b: &ScalarSeries| a.product_capped(b, tr.cap, 0.0).get(&Idx::ZERO).re;
        Averages { z11_sq: m(&z11, &z11), z11_z12: m(&z11, &z12), z12_sq: m(&z12, &z12) }
    }

    pub fn b1(&self, c: f64) -> Mat2 {
        Mat2::real(
            self.z11_z12 - c / 2.0 * self.z11_sq,
            -c * self.z11_z12 + self.z12_sq,
            -self.z11_sq,
            -self.z11_z12 + c / 2.0 * self.z11_sq,
        )
    }

    /// d(delta) = d1 delta + d2 delta^2
    pub fn d_coeffs(&self, c: f64) -> (f64, f64) {
        let d1 = -self.z11_sq * c;
        let d2 = self.z11_sq * self.z12_sq - self.z11_z12 * self.z11_z12 - c * c * self.z11_sq * self.z11_sq / 4.0;
        (d1, d2)
    }

    pub fn d(&self, c: f64, delta: f64) -> f64 {
        let (d1, d2) = self.d_coeffs(c);
        d1 * delta + d2 * delta * delta
    }

    pub fn cauchy_schwarz_gap(&self) -> f64 {
        self.z11_sq * self.z12_sq - self.z11_z12 * self.z11_z12
    }
}

/// P(theta) = (z11 z12 - c z11^2, -c z11 z12 + z12^2; -z11^2, -z11 z12)
pub fn moser_poschel_p(z: &MatSeries, c: f64, tr: Trunc) -> MatSeries {
    let z11 = z.entry(0, 0);
    let z12 = z.entry(0, 1);
    let pr = |a: &ScalarSeries, b: &ScalarSeries| a.product_capped(b, tr.cap, tr.tol);
    let a = pr(&z11, &z11);
    let b = pr(&z11, &z12);
    let s = pr(&z12, &z12);
    let cc = C64::new(c, 0.0);
    let e11 = &b - &a.scale(cc);
    let e12 = &s - &b.scale(cc);
    let e21 = -&a;
    let e22 = -&b;
    MatSeries::from_entries([&e11, &e12, &e21, &e22]).expect("same lattice")
}

#[derive(Clone, Debug, Serialize)]
pub struct MoserPoschelData {
    pub c: f64,
    pub delta: f64,
    pub big_r: f64,
    pub averages: Averages,
    pub b0: Mat2,
    pub b1: Mat2,
    pub d_coeffs: (f64, f64),
    pub d_delta: f64,
    pub d_delta_det: f64,
    pub d_r: f64,
    pub gate: f64,
    pub z_norm: f64,
    pub z_tilde_minus_id: f64,
    pub p1_norm: f64,
    pub p1_bound: f64,
    pub identity_residual: f64,
    #[serde(skip)]
    pub y: MatSeries,
    #[serde(skip)]
    pub z_tilde: MatSeries,
    #[serde(skip)]
    pub p1: MatSeries,
}

/// One averaging step for B - delta P(theta), B = (1, c; 0, 1):
/// e^{-Y(.+alpha)} (B - delta P) e^Y = e^{b0 - delta b1} + delta^2 P1.
#[allow(clippy::too_many_arguments)]
pub fn moser_poschel_step(
    z: &MatSeries,
    c: f64,
    delta: f64,
    big_r: f64,
    nu: f64,
    alpha: &[f64],
    dioph: &Dioph,
    divisor_floor: f64,
) -> Result<MoserPoschelData> {
    let lat = z.lattice;
    let pz = GevreyParams::new(nu, big_r)?;
    let ph = pz.with_r(big_r / 2.0);
    let z_norm = z.gevrey_norm(&pz);
    let dr = d_r(dioph, nu, big_r);
    let gate = 1.0 / (4.0 * dr * z_norm * z_norm);
    if !(delta > 0.0 && delta < gate) {
        return Err(Error::Gate(format!("delta = {delta:e} must lie in (0, {gate:e}) = (0, 1/(4 D_R |Z|_R^2))")));
    }
    let cap = 4 * z.max_l1().max(1);
    let tr = Trunc { cap, tol: 0.0 };
    let bm = Mat2::real(1.0, c, 0.0, 1.0);
    let b0 = Mat2::real(0.0, c, 0.0, 0.0);
    let p = moser_poschel_p(z, c, tr);
    let av = Averages::of(z, tr);
    let b1 = av.b1(c);
    let g = p.left_mul(&bm.inverse()).scale(C64::new(-delta, 0.0));
    let mut y = MatSeries::zero(lat);
    for (k, gk) in &g.coeffs {
        if k.is_zero() {
            continue;
        }
        let omega = 2.0 * PI * lat.scale() * k.dot(alpha);
        let div = (C64::from_polar(1.0, omega) - 1.0).norm();
        if div < divisor_floor {
            return Err(Error::SmallDivisor { mode: k.to_vec(lat.dim), divisor: div });
        }
        let yk = solve_twisted_ad(&bm, omega, gk)
            .ok_or(Error::SmallDivisor { mode: k.to_vec(lat.dim), divisor: div })?;
        y.set_mode(*k, yk);
    }
    let z_tilde = exp_series(&y, tr);
    let id = MatSeries::constant(lat, Mat2::identity());
    // P~ assembled from e^X = I + X + T(X) without cancellation
    let a = -&y.shift(alpha);
    let a2 = exp_tail(&a, 2, tr);
    let b2 = exp_tail(&y, 2, tr);
    let mul = |u: &MatSeries, v: &MatSeries| u.product_capped(v, tr.cap, tr.tol);
    let bs = MatSeries::constant(lat, bm);
    let ey = &(&id + &y) + &b2;
    let first = &(&mul(&mul(&a2, &bs), &ey) + &mul(&bs, &b2)) + &mul(&mul(&a, &bs), &(&y + &b2));
    let second = &mul(&(&a + &a2), &mul(&p, &ey)) + &mul(&p, &(&y + &b2));
    let p_tilde = &first - &second.scale(C64::new(delta, 0.0));
    let m = b0 - b1.scale_re(delta);
    let mut s3 = Mat2::zero();
    let mut term = m * m.scale_re(0.5);
    for k in 3..60 {
        term = term * m.scale_re(1.0 / k as f64);
        s3 = s3 + term;
        if term.max_abs() == 0.0 {
            break;
        }
    }
    let mut p1 = p_tilde.scale(C64::new(delta.powi(-2), 0.0));
    p1.add_mode(Idx::ZERO, (b1 * b1).scale_re(-0.5) - s3.scale_re(delta.powi(-2)));
    let p1_norm = p1.gevrey_norm(&ph);
    let p1_bound = 8.0 * (2.0 + dr).powi(2) * z_norm.powi(4) + c * c / delta * z_norm * z_norm;
    let z_tilde_minus_id = (&z_tilde - &id).gevrey_norm(&ph);
    // identity check on a grid
    let grid = sample_grid(lat.dim, 32, lat.period());
    let e_const = exp_mat(&m);
    let identity_residual = grid
        .iter()
        .map(|t| {
            let tp: Vec<f64> = t.iter().zip(alpha).map(|(x, a)| x + a).collect();
            let lhs = exp_mat(&-y.eval(&tp)) * (bm - p.eval(t).scale_re(delta)) * exp_mat(&y.eval(t));
            let rhs = e_const + p1.eval(t).scale_re(delta * delta);
            lhs.dist(&rhs)
        })
        .fold(0.0, f64::max);
    let d_delta = av.d(c, delta);
    Ok(MoserPoschelData {
        c,
        delta,
        big_r,
        d_coeffs: av.d_coeffs(c),
        averages: av,
        b0,
        b1,
        d_delta,
        d_delta_det: m.det().re,
        d_r: dr,
        gate,
        z_norm,
        z_tilde_minus_id,
        p1_norm,
        p1_bound,
        identity_residual,
        y,
        z_tilde,
        p1,
    })
}

impl MoserPoschelData {
    pub fn contracts_ok(&self) -> bool {
        self.z_tilde_minus_id < 1.0 && self.p1_norm <= self.p1_bound
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum EdgeVerdict {
    Open { delta1: f64, rho_lower: f64 },
    Collapsed,
    Inconclusive { failing: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct OpennessParams {
    pub r0: f64,
    pub r: f64,
    pub nu: f64,
    pub dioph: Dioph,
}

#[derive(Clone, Debug, Serialize)]
pub struct OpennessReport {
    pub verdict: EdgeVerdict,
    pub chi: f64,
    pub delta1: f64,
    pub big_r: f64,
    pub d_r: f64,
    pub d_delta1: f64,
    pub claim_bound: f64,
    pub b_norm_bound: f64,
    pub rho_lower: f64,
}

/// Inequality chain at a parabolic edge with constant (1, c; 0, 1) and conjugacy Z.
pub fn gap_edge_openness(c: f64, z: &MatSeries, params: &OpennessParams) -> OpennessReport {
    let rt = 0.5 * (params.r0 + params.r);
    let chi = (rt - params.r) / (6.0 * rt);
    let delta1 = c.abs().powf(1.0 - chi);
    let big_r = chi / (1.0 - chi) * params.r / 8.0;
    let dr = d_r(&params.dioph, params.nu, big_r);
    let tr = Trunc { cap: 4 * z.max_l1().max(1), tol: 0.0 };
    let av = Averages::of(z, tr);
    let z_norm = GevreyParams::new(params.nu, big_r).map(|p| z.gevrey_norm(&p)).unwrap_or(f64::INFINITY);
    let d1 = av.d(c.abs(), delta1);
    let claim = 9.0 / 4.0 * c * c;
    let b_bound = c.abs() + delta1 * (1.0 + c.abs()) * z_norm * z_norm;
    let pert = 32.0 * (2.0 + dr).powi(2) * c.abs().powf(2.0 - 3.0 * chi) * z_norm.powi(6)
        + 4.0 * c.abs().powf(3.0 - 2.0 * chi) * z_norm * z_norm;
    let rho_lower = d1.max(0.0).sqrt() - pert;
    let mut report = OpennessReport {
        verdict: EdgeVerdict::Collapsed,
        chi,
        delta1,
        big_r,
        d_r: dr,
        d_delta1: d1,
        claim_bound: claim,
        b_norm_bound: b_bound,
        rho_lower,
    };
    if c.abs() <= 1e-14 {
        return report;
    }
    let gate = 1.0 / (4.0 * dr * z_norm * z_norm);
    report.verdict = if delta1 >= gate {
        EdgeVerdict::Inconclusive { failing: format!("delta1 = {delta1:e} >= 1/(4 D_R |Z|_R^2) = {gate:e}") }
    } else if d1 < claim {
        EdgeVerdict::Inconclusive { failing: format!("d(delta1) = {d1:e} < 9/4 c^2 = {claim:e}") }
    } else if rho_lower <= 0.0 {
        EdgeVerdict::Inconclusive { failing: format!("rotation lower bound {rho_lower:e} <= 0") }
    } else {
        EdgeVerdict::Open { delta1, rho_lower }
    };
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle_dynamics::golden;

    fn params() -> GevreyParams {
        GevreyParams::new(0.5, 1.0).unwrap()
    }

    #[test]
    fn cocycle_entries() {
        let prob = SchrodingerProblem::amo(0.1, vec![golden()], params()).unwrap();
        let c = schrodinger_cocycle(&prob, 0.0).unwrap();
        let m = c.evaluate(&[0.0]).re();
        assert!((m[0][0] + 0.2).abs() < 1e-12 && m[0][1] == -1.0 && m[1][0] == 1.0 && m[1][1].abs() < 1e-12);
        let prob = SchrodingerProblem::amo(1e-3, vec![golden()], params()).unwrap();
        assert!(schrodinger_cocycle(&prob, 1.0).is_ok());
    }

    #[test]
    fn ids_limits() {
        let prob = SchrodingerProblem::amo(0.01, vec![golden()], params()).unwrap();
        assert!(ids(&prob, -10.0, 10_000) < 1e-3);
        assert!(ids(&prob, 10.0, 10_000) > 1.0 - 1e-3);
        let free = SchrodingerProblem::amo(0.0, vec![golden()], params()).unwrap();
        let e = 2.0 * (2.0 * PI * 0.2).cos();
        assert!((ids(&free, e, 100_000) - 0.6).abs() < 1e-4);
    }

    #[test]
    fn free_has_no_gaps() {
        let free = SchrodingerProblem::amo(0.0, vec![golden()], params()).unwrap();
        let sc = ScanControls { k_max: 3, n_iter: 20_000, ..ScanControls::for_problem(&free) };
        assert!(find_gaps(&free, &sc).is_empty());
    }

    #[test]
    fn rational_frequency_rejected() {
        assert!(SchrodingerProblem::amo(0.1, vec![0.5], params()).is_err());
    }

    #[test]
    fn free_section() {
        let free = SchrodingerProblem::amo(0.0, vec![golden()], params()).unwrap();
        let n = 50;
        let eig = finite_section_spectrum(&free, &[0.0], n).unwrap();
        for (j, e) in eig.iter().enumerate() {
            let exact = 2.0 * (PI * (n - j) as f64 / (n + 1) as f64).cos();
            assert!((e - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn decay_predicate() {
        let g = |len: f64| GapRecord {
            k: vec![1],
            e_minus: 0.0,
            e_plus: len,
            length: len,
            plateau: 0.0,
            label_residual: 0.0,
            uh: None,
        };
        let p = params();
        let bound = 1e-3f64.sqrt() * (-(2.0 * PI).sqrt()).exp();
        assert!(verify_gap_decay(&[g(0.0)], 1e-3, &p)[0].pass);
        assert!(verify_gap_decay(&[g(0.5 * bound)], 1e-3, &p)[0].pass);
        assert!(!verify_gap_decay(&[g(2.0 * bound)], 1e-3, &p)[0].pass);
    }

    #[test]
    fn moser_poschel_identity_z() {
        let lat = FrequencyLattice::torus(1);
        let z = MatSeries::constant(lat, Mat2::identity());
        let dioph = Dioph { gamma: 0.3, tau: 1.5 };
        let c = 0.01;
        let delta = 1e-8;
        let mp = moser_poschel_step(&z, c, delta, 1.0, 0.5, &[golden()], &dioph, 1e-12).unwrap();
        assert!(mp.y.is_zero());
        let b1 = Mat2::real(-c / 2.0, 0.0, -1.0, c / 2.0);
        assert!(mp.b1.dist(&b1) < 1e-14);
        let d = -delta * c - delta * delta * c * c / 4.0;
        assert!((mp.d_delta - d).abs() < 1e-14 * d.abs());
        assert!((mp.d_delta_det - d).abs() < 1e-12 * d.abs());
        assert!(mp.identity_residual < 1e-12, "{}", mp.identity_residual);
        assert!(moser_poschel_step(&z, c, 1.0, 1.0, 0.5, &[golden()], &dioph, 1e-12).is_err());
    }

    #[test]
    fn openness_trivial() {
        let lat = FrequencyLattice::half(1);
        let z = MatSeries::constant(lat, Mat2::identity());
        let op = OpennessParams { r0: 1.0, r: 0.5, nu: 0.5, dioph: Dioph { gamma: 0.3, tau: 1.5 } };
        assert_eq!(gap_edge_openness(0.0, &z, &op).verdict, EdgeVerdict::Collapsed);
        assert!(matches!(gap_edge_openness(0.9, &z, &op).verdict, EdgeVerdict::Inconclusive { .. }));
    }
}
