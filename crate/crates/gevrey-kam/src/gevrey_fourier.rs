//! Finitely supported Fourier series on T^d and 2T^d with Gevrey norms.
//!
//! A series on the half-period lattice stores index `k` for frequency `k/2`,
//! so `e^{pi <n,theta> J}` is exactly representable.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_algebra::Mat2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Idx(pub [i64; 3]);

impl Idx {
    pub const ZERO: Idx = Idx([0; 3]);

    pub fn new(k: &[i64]) -> Idx {
        let mut a = [0; 3];
        a[..k.len()].copy_from_slice(k);
        Idx(a)
    }

    pub fn unit(i: usize) -> Idx {
        let mut a = [0; 3];
        a[i] = 1;
        Idx(a)
    }

    pub fn l1(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        x.iter().zip(self.0.iter()).map(|(a, &k)| a * k as f64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; 3]
    }

    pub fn to_vec(&self, d: usize) -> Vec<i64> {
        self.0[..d].to_vec()
    }

    pub fn scaled(&self, s: i64) -> Idx {
        Idx([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Add for Idx {
    type Output = Idx;
    fn add(self, o: Idx) -> Idx {
        Idx([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Idx {
    type Output = Idx;
    fn sub(self, o: Idx) -> Idx {
        Idx([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Idx {
    type Output = Idx;
    fn neg(self) -> Idx {
        self.scaled(-1)
    }
}

/// Enumerates all k in Z^d with |k|_1 <= n in lexicographic order.
pub fn indices_within(d: usize, n: i64) -> Vec<Idx> {
    let mut out = Vec::new();
    let mut cur = [0i64; 3];
    fn rec(d: usize, pos: usize, left: i64, cur: &mut [i64; 3], out: &mut Vec<Idx>) {
        if pos == d {
            out.push(Idx(*cur));
            return;
        }
        for v in -left..=left {
            cur[pos] = v;
            rec(d, pos + 1, left - v.abs(), cur, out);
        }
        cur[pos] = 0;
    }
    rec(d, 0, n.max(0), &mut cur, &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyLattice {
    pub dim: usize,
    pub half_period: bool,
}

impl FrequencyLattice {
    pub fn new(dim: usize, half_period: bool) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(FrequencyLattice { dim, half_period })
    }

    pub fn torus(dim: usize) -> Self {
        FrequencyLattice::new(dim, false).expect("dimension 1..=3")
    }

    pub fn half(dim: usize) -> Self {
        FrequencyLattice::new(dim, true).expect("dimension 1..=3")
    }

    /// Frequency of index k is `scale * k`.
    pub fn scale(&self) -> f64 {
        if self.half_period {
            0.5
        } else {
            1.0
        }
    }

    /// Period of the underlying torus in each coordinate.
    pub fn period(&self) -> f64 {
        if self.half_period {
            2.0
        } else {
            1.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GevreyParams {
    pub nu: f64,
    pub r: f64,
}

impl GevreyParams {
    pub fn new(nu: f64, r: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::InvalidParameter(format!("nu = {nu} not in (0,1)")));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("r = {r} not positive")));
        }
        Ok(GevreyParams { nu, r })
    }

    pub fn with_r(&self, r: f64) -> GevreyParams {
        GevreyParams { nu: self.nu, r }
    }

    /// e^{r (2 pi s |k|)^nu} with s = 1 or 1/2.
    pub fn weight(&self, lattice: &FrequencyLattice, k: &Idx) -> f64 {
        let l = k.l1() as f64 * lattice.scale();
        (self.r * (2.0 * PI * l).powf(self.nu)).exp()
    }
}

pub trait Coeff:
    Copy + Debug + PartialEq + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> + Mul<Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn one() -> Self;
    fn scale_c(self, z: C64) -> Self;
    /// |c| for scalars, canonical 2*max|entry| for matrices.
    fn magnitude(&self) -> f64;
}

impl Coeff for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn scale_c(self, z: C64) -> Self {
        self * z
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Coeff for Mat2 {
    fn zero() -> Self {
        Mat2::zero()
    }
    fn one() -> Self {
        Mat2::identity()
    }
    fn scale_c(self, z: C64) -> Self {
        self.scale(z)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries<T: Coeff> {
    pub lattice: FrequencyLattice,
    pub coeffs: BTreeMap<Idx, T>,
}

pub type ScalarSeries = FourierSeries<C64>;
pub type MatSeries = FourierSeries<Mat2>;

impl<T: Coeff> FourierSeries<T> {
    pub fn zero(lattice: FrequencyLattice) -> Self {
        FourierSeries { lattice, coeffs: BTreeMap::new() }
    }

    pub fn constant(lattice: FrequencyLattice, c: T) -> Self {
        let mut s = Self::zero(lattice);
        s.add_mode(Idx::ZERO, c);
        s
    }

    pub fn single(lattice: FrequencyLattice, k: Idx, c: T) -> Self {
        let mut s = Self::zero(lattice);
        s.add_mode(k, c);
        s
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim
    }

    pub fn get(&self, k: &Idx) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }

    pub fn add_mode(&mut self, k: Idx, c: T) {
        let e = self.coeffs.entry(k).or_insert_with(T::zero);
        *e = *e + c;
        if *e == T::zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn set_mode(&mut self, k: Idx, c: T) {
        if c == T::zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_l1(&self) -> i64 {
        self.coeffs.keys().map(|k| k.l1()).max().unwrap_or(0)
    }

    pub fn gevrey_norm(&self, p: &GevreyParams) -> f64 {
        self.coeffs.iter().map(|(k, c)| c.magnitude() * p.weight(&self.lattice, k)).fold(0.0, |a, b| a + b)
    }

    /// Sum of coefficient magnitudes; bounds the sup norm.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.magnitude()).fold(0.0, |a, b| a + b)
    }

    pub fn truncate(&self, n: f64) -> Self {
        self.project(|k| (k.l1() as f64) <= n)
    }

    pub fn project(&self, pred: impl Fn(&Idx) -> bool) -> Self {
        FourierSeries {
            lattice: self.lattice,
            coeffs: self.coeffs.iter().filter(|(k, _)| pred(k)).map(|(k, c)| (*k, *c)).collect(),
        }
    }

    pub fn prune(&self, tol: f64) -> Self {
        FourierSeries {
            lattice: self.lattice,
            coeffs: self.coeffs.iter().filter(|(_, c)| c.magnitude() > tol).map(|(k, c)| (*k, *c)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Idx, &T) -> T) -> Self {
        let mut out = Self::zero(self.lattice);
        for (k, c) in &self.coeffs {
            out.set_mode(*k, f(k, c));
        }
        out
    }

    pub fn scale(&self, z: C64) -> Self {
        self.map(|_, c| c.scale_c(z))
    }

    fn phase(&self, k: &Idx, theta: &[f64]) -> C64 {
        C64::from_polar(1.0, 2.0 * PI * self.lattice.scale() * k.dot(theta))
    }

    pub fn evaluate(&self, theta: &[f64]) -> Result<T> {
        if theta.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: theta.len() });
        }
        Ok(self.eval(theta))
    }

    /// Evaluation without the dimension check.
    pub fn eval(&self, theta: &[f64]) -> T {
        let mut acc = T::zero();
        for (k, c) in &self.coeffs {
            acc = acc + c.scale_c(self.phase(k, theta));
        }
        acc
    }

    /// theta -> f(theta + alpha)
    pub fn shift(&self, alpha: &[f64]) -> Self {
        let s = self.lattice.scale();
        self.map(|k, c| c.scale_c(C64::from_polar(1.0, 2.0 * PI * s * k.dot(alpha))))
    }

    /// Reinterprets a T^d series on the half-period lattice (indices doubled).
    pub fn to_half_period(&self) -> Self {
        if self.lattice.half_period {
            return self.clone();
        }
        FourierSeries {
            lattice: FrequencyLattice { dim: self.dim(), half_period: true },
            coeffs: self.coeffs.iter().map(|(k, c)| (k.scaled(2), *c)).collect(),
        }
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        Ok(())
    }

    /// Aligns two series onto a common lattice (half-period wins).
    pub fn align(&self, other: &Self) -> Result<(Self, Self)> {
        if self.dim() != other.dim() {
            return Err(Error::LatticeMismatch);
        }
        if self.lattice.half_period == other.lattice.half_period {
            return Ok((self.clone(), other.clone()));
        }
        Ok((self.to_half_period(), other.to_half_period()))
    }

    pub fn series_product(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.product_capped(other, i64::MAX, 0.0))
    }

    /// Convolution keeping output modes with |k|_1 <= cap and dropping magnitudes <= tol.
    pub fn product_capped(&self, other: &Self, cap: i64, tol: f64) -> Self {
        let mut acc: BTreeMap<Idx, T> = BTreeMap::new();
        for (k1, c1) in &self.coeffs {
            for (k2, c2) in &other.coeffs {
                let k = *k1 + *k2;
                if k.l1() > cap {
                    continue;
                }
                let e = acc.entry(k).or_insert_with(T::zero);
                *e = *e + *c1 * *c2;
            }
        }
        FourierSeries {
            lattice: self.lattice,
            coeffs: acc.into_iter().filter(|(_, c)| c.magnitude() > tol && *c != T::zero()).collect(),
        }
    }

    pub fn sample_max_diff(&self, other: &Self, grid: &[Vec<f64>]) -> f64
    where
        T: Coeff,
    {
        grid.iter().map(|t| (self.eval(t) - other.eval(t)).magnitude()).fold(0.0, f64::max)
    }
}

impl<T: Coeff> Add for &FourierSeries<T> {
    type Output = FourierSeries<T>;
    fn add(self, o: &FourierSeries<T>) -> FourierSeries<T> {
        assert_eq!(self.lattice, o.lattice, "lattice mismatch");
        let mut out = self.clone();
        for (k, c) in &o.coeffs {
            out.add_mode(*k, *c);
        }
        out
    }
}

impl<T: Coeff> Sub for &FourierSeries<T> {
    type Output = FourierSeries<T>;
    fn sub(self, o: &FourierSeries<T>) -> FourierSeries<T> {
        assert_eq!(self.lattice, o.lattice, "lattice mismatch");
        let mut out = self.clone();
        for (k, c) in &o.coeffs {
            out.add_mode(*k, -*c);
        }
        out
    }
}

impl<T: Coeff> Neg for &FourierSeries<T> {
    type Output = FourierSeries<T>;
    fn neg(self) -> FourierSeries<T> {
        self.map(|_, c| -*c)
    }
}

impl ScalarSeries {
    /// Conjugate symmetry c(-k) = conj(c(k)).
    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|(k, c)| (self.get(&-*k) - c.conj()).norm() <= tol)
    }

    pub fn eval_re(&self, theta: &[f64]) -> f64 {
        self.eval(theta).re
    }

    /// 2 a cos(2 pi <k, theta>)
    pub fn cosine(lattice: FrequencyLattice, k: Idx, a: f64) -> Self {
        let mut s = Self::zero(lattice);
        s.add_mode(k, C64::new(a, 0.0));
        s.add_mode(-k, C64::new(a, 0.0));
        s
    }

    /// Parses literal rows `[k_1..k_d, re, im]`.
    pub fn from_rows(lattice: FrequencyLattice, rows: &[Vec<f64>]) -> Result<Self> {
        let d = lattice.dim;
        let mut s = Self::zero(lattice);
        for row in rows {
            if row.len() != d + 2 {
                return Err(Error::DimensionMismatch { expected: d + 2, got: row.len() });
            }
            let mut k = [0i64; 3];
            for i in 0..d {
                if row[i].fract() != 0.0 {
                    return Err(Error::InvalidParameter(format!("non-integer index {}", row[i])));
                }
                k[i] = row[i] as i64;
            }
            s.add_mode(Idx(k), C64::new(row[d], row[d + 1]));
        }
        Ok(s)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let mut r: Vec<f64> = k.0[..d].iter().map(|&x| x as f64).collect();
                r.push(c.re);
                r.push(c.im);
                r
            })
            .collect()
    }

    /// Mean value, the zero mode.
    pub fn mean(&self) -> C64 {
        self.get(&Idx::ZERO)
    }

    pub fn times_matrix(&self, m: &Mat2) -> MatSeries {
        let mut out = MatSeries::zero(self.lattice);
        for (k, c) in &self.coeffs {
            out.set_mode(*k, m.scale(*c));
        }
        out
    }
}

impl MatSeries {
    pub fn entry(&self, i: usize, j: usize) -> ScalarSeries {
        let mut out = ScalarSeries::zero(self.lattice);
        for (k, m) in &self.coeffs {
            let v = match (i, j) {
                (0, 0) => m.a11,
                (0, 1) => m.a12,
                (1, 0) => m.a21,
                _ => m.a22,
            };
            out.set_mode(*k, v);
        }
        out
    }

    pub fn from_entries(e: [&ScalarSeries; 4]) -> Result<Self> {
        let lat = e[0].lattice;
        if e.iter().any(|s| s.lattice != lat) {
            return Err(Error::LatticeMismatch);
        }
        let mut out = MatSeries::zero(lat);
        let z = C64::new(0.0, 0.0);
        let mut keys: Vec<Idx> = e.iter().flat_map(|s| s.coeffs.keys().copied()).collect();
        keys.sort();
        keys.dedup();
        for k in keys {
            let _ = z;
            out.set_mode(k, Mat2::new(e[0].get(&k), e[1].get(&k), e[2].get(&k), e[3].get(&k)));
        }
        Ok(out)
    }

    pub fn left_mul(&self, m: &Mat2) -> Self {
        self.map(|_, c| *m * *c)
    }

    pub fn right_mul(&self, m: &Mat2) -> Self {
        self.map(|_, c| *c * *m)
    }

    /// Coefficient-wise similarity transform P X P^{-1}.
    pub fn conjugate_by(&self, p: &Mat2) -> Self {
        let pi = p.inverse();
        self.map(|_, c| *p * *c * pi)
    }

    /// The series takes real sl(2,R) values: traceless, conjugate-symmetric.
    pub fn is_sl2r(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|(k, c)| {
            let m = self.get(&-*k);
            c.trace().norm() <= tol && (m - c.conj()).max_abs() <= tol
        })
    }

    pub fn eval_re(&self, theta: &[f64]) -> [[f64; 2]; 2] {
        self.eval(theta).re()
    }
}

/// Sample grid on [0, period)^d with about `n` points (n^{1/d} per axis).
pub fn sample_grid(d: usize, n: usize, period: f64) -> Vec<Vec<f64>> {
    let per = ((n as f64).powf(1.0 / d as f64).round() as usize).max(1);
    let mut out = Vec::new();
    let total = per.pow(d as u32);
    for idx in 0..total {
        let mut t = Vec::with_capacity(d);
        let mut rem = idx;
        for _ in 0..d {
            t.push(period * (rem % per) as f64 / per as f64 + 0.013 * period / per as f64);
            rem /= per;
        }
        out.push(t);
    }
    out
}
