//! The dual long-range operator, eigenfunctions built from reducing
//! conjugacies, and the sub-exponential goodness test.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gevrey_fourier::{Idx, ScalarSeries};
use crate::kam_engine::{Conjugacy, Trunc};
use crate::lie_algebra::{elliptic_normal_form, Mat2};

/// Sites allowed in any lattice vector.
pub const MAX_SITES: usize = 4_000_000;

#[derive(Clone, Debug)]
pub struct LongRangeOperator {
    pub v_hat: BTreeMap<Idx, C64>,
    pub lambda: f64,
    pub alpha: Vec<f64>,
    pub phi: f64,
}

impl LongRangeOperator {
    pub fn new(v: &ScalarSeries, lambda: f64, alpha: Vec<f64>, phi: f64) -> Result<Self> {
        if v.lattice.half_period || v.dim() != alpha.len() {
            return Err(Error::LatticeMismatch);
        }
        if !v.is_real(1e-12) {
            return Err(Error::InvalidParameter("v_hat is not conjugate-symmetric".into()));
        }
        if lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!("coupling must be positive, got {lambda}")));
        }
        Ok(LongRangeOperator { v_hat: v.coeffs.clone(), lambda, alpha, phi })
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn diagonal(&self, n: &Idx) -> f64 {
        2.0 * self.lambda * (2.0 * PI * (self.phi + n.dot(&self.alpha))).cos()
    }

    fn reach(&self) -> i64 {
        self.v_hat.keys().map(|k| k.0.iter().map(|x| x.abs()).max().unwrap_or(0)).max().unwrap_or(0)
    }
}

/// Finitely supported vector on Z^d inside the box |n|_inf <= window.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeVector {
    pub dim: usize,
    pub window: i64,
    pub entries: BTreeMap<Idx, C64>,
}

fn sites(d: usize, w: i64) -> usize {
    ((2 * w + 1) as usize).saturating_pow(d as u32)
}

impl LatticeVector {
    pub fn new(dim: usize, window: i64) -> Result<Self> {
        if sites(dim, window) > MAX_SITES {
            return Err(Error::WindowOverflow(format!("window {window} in dimension {dim}")));
        }
        Ok(LatticeVector { dim, window, entries: BTreeMap::new() })
    }

    pub fn delta(dim: usize, n: Idx) -> Self {
        let w = n.0.iter().map(|x| x.abs()).max().unwrap_or(0);
        let mut v = LatticeVector { dim, window: w, entries: BTreeMap::new() };
        v.entries.insert(n, C64::new(1.0, 0.0));
        v
    }

    pub fn get(&self, n: &Idx) -> C64 {
        self.entries.get(n).copied().unwrap_or_default()
    }

    pub fn set(&mut self, n: Idx, z: C64) {
        if n.0.iter().any(|x| x.abs() > self.window) {
            return;
        }
        if z == C64::default() {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, z);
        }
    }

    pub fn norm(&self) -> f64 {
        self.entries.values().map(|z| z.norm_sqr()).fold(0.0, |a, b| a + b).sqrt()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.entries.iter().map(|(k, z)| z.conj() * other.get(k)).fold(C64::default(), |a, b| a + b)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for z in out.entries.values_mut() {
            *z *= s;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = LatticeVector { dim: self.dim, window: self.window.max(other.window), entries: self.entries.clone() };
        for (k, z) in &other.entries {
            let v = out.get(k) - z;
            out.set(*k, v);
        }
        out
    }

    /// (S_m u)(n) = u(n - m)
    pub fn shift(&self, m: &Idx) -> Self {
        let w = self.window + m.0.iter().map(|x| x.abs()).max().unwrap_or(0);
        let mut out = LatticeVector { dim: self.dim, window: w, entries: BTreeMap::new() };
        for (k, z) in &self.entries {
            out.entries.insert(*k + *m, *z);
        }
        out
    }

    /// Rows `n..., re, im` sorted by n.
    pub fn to_rows(&self) -> Vec<(Vec<i64>, f64, f64)> {
        self.entries.iter().map(|(k, z)| (k.to_vec(self.dim), z.re, z.im)).collect()
    }
}

/// (Lu)_n = sum_k v_hat(n - k) u_k + 2 lambda cos 2pi(phi + <n, alpha>) u_n
pub fn long_range_apply(op: &LongRangeOperator, u: &LatticeVector) -> Result<LatticeVector> {
    if u.dim != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: u.dim });
    }
    let mut out = LatticeVector::new(u.dim, u.window + op.reach())?;
    for (k, z) in &u.entries {
        for (m, c) in &op.v_hat {
            let n = *k + *m;
            let v = out.get(&n) + c * z;
            out.entries.insert(n, v);
        }
        let v = out.get(k) + z * op.diagonal(k);
        out.entries.insert(*k, v);
    }
    out.entries.retain(|_, z| *z != C64::default());
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct DualEigen {
    #[serde(skip)]
    pub u: LatticeVector,
    pub phi: f64,
    pub e_scaled: f64,
    pub residual: f64,
    pub window: i64,
    /// lower bound on ||z_11||_2 from the conjugacy sup norm, logged only
    pub norm_bound: f64,
    pub z_norm: f64,
    pub used_column: usize,
}

/// Eigenfunction of the long-range operator from a reducing conjugacy of the
/// dual Schrödinger cocycle with potential lambda^{-1} v.
///
/// `b` satisfies B(.+alpha)^{-1} S_E B = a_final with a_final elliptic.
#[allow(clippy::too_many_arguments)]
pub fn dual_eigenfunction(
    b: &Conjugacy,
    a_final: &Mat2,
    v: &ScalarSeries,
    lambda: f64,
    alpha: &[f64],
    m_prime: &[i64],
    e: f64,
    cap: i64,
    max_window: i64,
) -> Result<(DualEigen, LongRangeOperator)> {
    let d = alpha.len();
    let ell = elliptic_normal_form(a_final)?;
    // S_E W = W(.+alpha) diag(e^{i2pi xi}, e^{-i2pi xi}) with W = B P^{-1} M^{-1}
    let w_right = ell.p.inverse() * Mat2::m_inv();
    let bs = b.to_series(d, Trunc { cap, tol: 0.0 }).right_mul(&w_right);
    let sup = b.to_series(d, Trunc { cap, tol: 0.0 }).l1_norm();
    let (col, used_column) = {
        let c0 = bs.entry(0, 0);
        if c0.l1_norm() > 1e-12 {
            (c0, 0)
        } else {
            let c1 = bs.entry(0, 1);
            if c1.l1_norm() <= 1e-12 {
                return Err(Error::DegenerateEigenfunction);
            }
            (c1, 1)
        }
    };
    let xi = if used_column == 0 { ell.signed_xi() } else { -ell.signed_xi() };
    // half-lattice modes share a parity class; shift onto the integer lattice
    let first = *col.coeffs.keys().next().ok_or(Error::DegenerateEigenfunction)?;
    let parity = Idx::new(&first.0[..d].iter().map(|x| x.rem_euclid(2)).collect::<Vec<_>>());
    for k in col.coeffs.keys() {
        let p: Vec<i64> = k.0[..d].iter().map(|x| x.rem_euclid(2)).collect();
        if Idx::new(&p) != parity {
            return Err(Error::Contract("conjugacy column mixes half-lattice parity classes".into()));
        }
    }
    let mp = Idx::new(m_prime);
    let mut z: BTreeMap<Idx, C64> = BTreeMap::new();
    for (k, c) in &col.coeffs {
        let mut n = [0i64; 3];
        for i in 0..d {
            n[i] = (k.0[i] - parity.0[i]) / 2;
        }
        z.insert(Idx(n) + mp, *c);
    }
    let phi = xi + 0.5 * parity.dot(alpha) - mp.dot(alpha);
    let peak = z.values().map(|c| c.norm()).fold(0.0, f64::max);
    let kept: BTreeMap<Idx, C64> = z.into_iter().filter(|(_, c)| c.norm() >= 1e-16 * peak).collect();
    let window = kept.keys().map(|k| k.0.iter().map(|x| x.abs()).max().unwrap_or(0)).max().unwrap_or(0);
    if window > max_window {
        return Err(Error::WindowOverflow(format!("eigenfunction reaches |n| = {window}, window is {max_window}")));
    }
    let mut u = LatticeVector::new(d, window)?;
    u.entries = kept;
    let z_norm = u.norm();
    u = u.scale(C64::new(1.0 / z_norm, 0.0));
    let op = LongRangeOperator::new(v, lambda, alpha.to_vec(), phi.rem_euclid(1.0))?;
    let lu = long_range_apply(&op, &u)?;
    let e_scaled = lambda * e;
    let residual = lu.sub(&u.scale(C64::new(e_scaled, 0.0))).norm();
    Ok((
        DualEigen { u, phi: op.phi, e_scaled, residual, window, norm_bound: 0.5 / sup.max(1e-300), z_norm, used_column },
        op,
    ))
}

/// || L_{phi - <m,alpha>} S_m u - S_m L_phi u ||
pub fn covariance_defect(op: &LongRangeOperator, u: &LatticeVector, m: &[i64]) -> Result<f64> {
    let m = Idx::new(m);
    let moved = LongRangeOperator { phi: (op.phi - m.dot(&op.alpha)).rem_euclid(1.0), ..op.clone() };
    let lhs = long_range_apply(&moved, &u.shift(&m))?;
    let rhs = long_range_apply(op, u)?.shift(&m);
    Ok(lhs.sub(&rhs).norm())
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodnessReport {
    pub pass: bool,
    pub worst_ratio: f64,
    pub witness: Option<Vec<i64>>,
    pub checked: usize,
}

/// |u(n)| <= e^{-C eps |n|^nu} for |n| >= (1 - eps) N
pub fn good_eigenfunction_test(u: &LatticeVector, nu: f64, n_big: f64, c: f64, eps: f64) -> GoodnessReport {
    let mut worst = 0.0;
    let mut witness = None;
    let mut checked = 0;
    for (k, z) in &u.entries {
        let n = k.l1() as f64;
        if n < (1.0 - eps) * n_big {
            continue;
        }
        checked += 1;
        let ratio = z.norm() / (-c * eps * n.powf(nu)).exp();
        if ratio > worst {
            worst = ratio;
            witness = Some(k.to_vec(u.dim));
        }
    }
    GoodnessReport { pass: worst <= 1.0, worst_ratio: worst, witness, checked }
}
