//! Constant 2x2 matrix algebra: SL(2,R), sl(2,R), su(1,1).
//!
//! Norms are the canonical `2 * max|a_ij|`, which is submultiplicative.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, MatrixClass, Result};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a11: C64,
    pub a12: C64,
    pub a21: C64,
    pub a22: C64,
}

/// Classification tags; computed from entries rather than stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatTag {
    Sl2r,
    Su11,
    Sl2c,
    GroupElement,
}

impl Mat2 {
    pub const fn new(a11: C64, a12: C64, a21: C64, a22: C64) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2::new(a11.into(), a12.into(), a21.into(), a22.into())
    }

    pub fn zero() -> Self {
        Mat2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    /// J = (0, 1; -1, 0)
    pub fn j() -> Self {
        Mat2::real(0.0, 1.0, -1.0, 0.0)
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2::new(a, ZERO, ZERO, d)
    }

    /// R_phi = exp(2 pi phi J) = (cos, sin; -sin, cos).
    pub fn rotation(phi: f64) -> Self {
        let (s, c) = (2.0 * PI * phi).sin_cos();
        Mat2::real(c, s, -s, c)
    }

    /// sl(2) element from coordinates (x, y, z) in the basis H, E, F.
    pub fn sl2(x: C64, y: C64, z: C64) -> Self {
        Mat2::new(x, y, z, -x)
    }

    pub fn m() -> Self {
        let f = ONE / C64::new(1.0, 1.0);
        Mat2::new(f, -I * f, f, I * f)
    }

    pub fn m_inv() -> Self {
        Mat2::m().inverse()
    }

    pub fn trace(&self) -> C64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> C64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat2::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Mat2::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn conj(&self) -> Self {
        Mat2::new(self.a11.conj(), self.a12.conj(), self.a21.conj(), self.a22.conj())
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a11, self.a21, self.a12, self.a22)
    }

    /// Canonical norm 2 * max|a_ij|.
    pub fn norm(&self) -> f64 {
        2.0 * self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.entries().iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn re(&self) -> [[f64; 2]; 2] {
        [[self.a11.re, self.a12.re], [self.a21.re, self.a22.re]]
    }

    pub fn from_re(m: [[f64; 2]; 2]) -> Self {
        Mat2::real(m[0][0], m[0][1], m[1][0], m[1][1])
    }

    /// General inverse.
    pub fn inverse(&self) -> Self {
        let d = self.det();
        Mat2::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d)
    }

    /// Adjugate; equals the inverse when det = 1.
    pub fn inv_sl(&self) -> Self {
        Mat2::new(self.a22, -self.a12, -self.a21, self.a11)
    }

    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        *self * *other - *other * *self
    }

    pub fn dist(&self, other: &Mat2) -> f64 {
        (*self - *other).norm()
    }

    /// Coordinates (x, y, z) of the traceless part in the basis H, E, F.
    pub fn sl2_coords(&self) -> [C64; 3] {
        [(self.a11 - self.a22) * 0.5, self.a12, self.a21]
    }

    pub fn tag_check(&self, tag: MatTag, tol: f64) -> bool {
        match tag {
            MatTag::Sl2r => self.max_imag() <= tol && self.trace().norm() <= tol,
            MatTag::Sl2c => self.trace().norm() <= tol,
            MatTag::GroupElement => (self.det() - ONE).norm() <= tol,
            MatTag::Su11 => {
                self.a11.re.abs() <= tol
                    && (self.a11 + self.a22).norm() <= tol
                    && (self.a12 - self.a21.conj()).norm() <= tol
            }
        }
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a11, -self.a12, -self.a21, -self.a22)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

/// B -> M B M^{-1}; maps (x, y+z; y-z, -x) to (iz, x-iy; x+iy, -iz).
pub fn m_conjugate(b: &Mat2) -> Result<Mat2> {
    if !b.tag_check(MatTag::Sl2r, 1e-12 * b.norm().max(1.0)) {
        return Err(Error::NotSl2r(format!("{:?}", b)));
    }
    Ok(m_conj_raw(b))
}

/// Inverse of [`m_conjugate`], su(1,1) back to sl(2,R).
pub fn m_conjugate_inverse(s: &Mat2) -> Mat2 {
    Mat2::m_inv() * *s * Mat2::m()
}

/// M B M^{-1} without the sl(2,R) check, for complex coefficients of series.
pub fn m_conj_raw(b: &Mat2) -> Mat2 {
    // closed form of M B M^{-1} for B = (x, y+z; y-z, -x) extended linearly
    let x = (b.a11 - b.a22) * 0.5;
    let t = (b.a11 + b.a22) * 0.5;
    let y = (b.a12 + b.a21) * 0.5;
    let z = (b.a12 - b.a21) * 0.5;
    Mat2::new(t + I * z, x - I * y, x + I * y, t - I * z)
}

/// Inverse of [`m_conj_raw`].
pub fn m_unconj_raw(s: &Mat2) -> Mat2 {
    let t = (s.a11 + s.a22) * 0.5;
    let z = (s.a11 - s.a22) * 0.5 / I;
    let x = (s.a12 + s.a21) * 0.5;
    let y = (s.a21 - s.a12) * 0.5 / I;
    Mat2::new(t + x, y + z, y - z, t - x)
}

fn cosh_sinhc(s2: C64) -> (C64, C64) {
    // cosh(s), sinh(s)/s as entire functions of s^2
    if s2.norm() < 1.0 {
        let mut c = ONE;
        let mut sh = ONE;
        let mut tc = ONE;
        let mut ts = ONE;
        for k in 1..30 {
            let kf = k as f64;
            tc = tc * s2 / ((2.0 * kf - 1.0) * (2.0 * kf));
            ts = ts * s2 / ((2.0 * kf) * (2.0 * kf + 1.0));
            c += tc;
            sh += ts;
            if tc.norm() < 1e-18 * c.norm() && ts.norm() < 1e-18 * sh.norm() {
                break;
            }
        }
        (c, sh)
    } else {
        let s = s2.sqrt();
        (s.cosh(), s.sinh() / s)
    }
}

pub fn exp_mat(x: &Mat2) -> Mat2 {
    let t = x.trace() * 0.5;
    let x0 = *x - Mat2::identity().scale(t);
    let s2 = -x0.det();
    let (c, sh) = cosh_sinhc(s2);
    let et = t.exp();
    (Mat2::identity().scale(c) + x0.scale(sh)).scale(et)
}

fn on_negative_axis(l: C64) -> bool {
    l.re <= 0.0 && l.im.abs() <= 1e-14 * l.norm().max(1e-300)
}

/// Principal logarithm.
pub fn log_mat(a: &Mat2) -> Result<Mat2> {
    let t = a.trace() * 0.5;
    let a0 = *a - Mat2::identity().scale(t);
    let w2 = -a0.det();
    let w = w2.sqrt();
    let l1 = t + w;
    let l2 = t - w;
    if on_negative_axis(l1) || on_negative_axis(l2) {
        return Err(Error::PrincipalBranch);
    }
    let scalar = (l1.ln() + l2.ln()) * 0.5;
    let x = w / t;
    let coef = if t.norm() > 0.0 && x.norm() < 0.5 {
        // atanh(x)/x series
        let x2 = x * x;
        let mut sum = ONE;
        let mut p = ONE;
        for k in 1..60 {
            p *= x2;
            let term = p / (2.0 * k as f64 + 1.0);
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        sum / t
    } else {
        (l1.ln() - l2.ln()) / (l1 - l2)
    };
    Ok(Mat2::identity().scale(scalar) + a0.scale(coef))
}

pub fn classify(a: &Mat2) -> MatrixClass {
    let t = a.trace().re.abs();
    if (t - 2.0).abs() <= 1e-10 {
        MatrixClass::Parabolic
    } else if t < 2.0 {
        MatrixClass::Elliptic
    } else {
        MatrixClass::Hyperbolic
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EllipticData {
    /// Eigen-angle reduced to (0, 1/2).
    pub xi: f64,
    /// +1 if P A P^{-1} = R_xi, -1 if P A P^{-1} = R_{-xi}.
    pub orientation: f64,
    pub p: Mat2,
}

impl EllipticData {
    pub fn signed_xi(&self) -> f64 {
        self.orientation * self.xi
    }

    pub fn norm_bound(a: &Mat2, xi: f64) -> f64 {
        16.0 * f64::max(0.5, (a.norm() / (2.0 * (2.0 * PI * xi).sin().abs())).sqrt())
    }

    /// Normal form M^{-1} diag(e^{i2pi xi}, e^{-i2pi xi}) M = R_{signed xi}.
    pub fn normal_form(&self) -> Mat2 {
        Mat2::rotation(self.signed_xi())
    }
}

pub fn elliptic_normal_form(a: &Mat2) -> Result<EllipticData> {
    let class = classify(a);
    if class != MatrixClass::Elliptic {
        return Err(Error::NotElliptic(class));
    }
    let m = a.re();
    let c = 0.5 * (m[0][0] + m[1][1]);
    let s = (1.0 - c * c).max(0.0).sqrt();
    let xi = c.clamp(-1.0, 1.0).acos() / (2.0 * PI);
    let mut k11 = (m[0][0] - c) / s;
    let mut k12 = m[0][1] / s;
    let orientation = if k12 > 0.0 { 1.0 } else { -1.0 };
    if orientation < 0.0 {
        k11 = -k11;
        k12 = -k12;
    }
    // P K P^{-1} = J for K = (k11, k12; k21, -k11)
    let sq = k12.sqrt();
    let p0 = [[1.0 / sq, 0.0], [k11 / sq, sq]];
    // polar factor sqrt(P^T P) removes the rotational freedom
    let mm = [
        [p0[0][0] * p0[0][0] + p0[1][0] * p0[1][0], p0[0][0] * p0[0][1] + p0[1][0] * p0[1][1]],
        [p0[0][1] * p0[0][0] + p0[1][1] * p0[1][0], p0[0][1] * p0[0][1] + p0[1][1] * p0[1][1]],
    ];
    let nrm = (mm[0][0] + mm[1][1] + 2.0).sqrt();
    let p = Mat2::real((mm[0][0] + 1.0) / nrm, mm[0][1] / nrm, mm[1][0] / nrm, (mm[1][1] + 1.0) / nrm);
    Ok(EllipticData { xi, orientation, p })
}

fn bch_majorant_coeffs() -> Vec<f64> {
    // coefficients of -ln(2 - e^t)
    const N: usize = 64;
    let mut q = vec![0.0; N + 1];
    let mut f = 1.0;
    for (k, qk) in q.iter_mut().enumerate().skip(1) {
        f *= k as f64;
        *qk = 1.0 / f;
    }
    let mut out = vec![0.0; N + 1];
    let mut pw = q.clone();
    for m in 1..=N {
        for n in 0..=N {
            out[n] += pw[n] / m as f64;
        }
        let mut next = vec![0.0; N + 1];
        for i in 0..=N {
            if pw[i] == 0.0 {
                continue;
            }
            for j in 1..=(N - i) {
                next[i + j] += pw[i] * q[j];
            }
        }
        pw = next;
    }
    out
}

/// Truncated BCH series with a rigorous remainder bound from the majorant -ln(2 - e^{st}).
pub fn bch_product(x: &Mat2, y: &Mat2, order: u8) -> Result<(Mat2, f64)> {
    let s = x.norm() + y.norm();
    if s > 0.25 {
        return Err(Error::BchNorm(s));
    }
    if !(2..=3).contains(&order) {
        return Err(Error::InvalidParameter(format!("BCH order {order}")));
    }
    let xy = x.commutator(y);
    let mut z = *x + *y + xy.scale_re(0.5);
    if order == 3 {
        let t = x.commutator(&xy) + y.commutator(&y.commutator(x));
        z = z + t.scale_re(1.0 / 12.0);
    }
    if s == 0.0 || xy.max_abs() == 0.0 {
        return Ok((z, 0.0));
    }
    let c = bch_majorant_coeffs();
    let mut rem = 0.0;
    for (n, cn) in c.iter().enumerate().skip(order as usize + 1) {
        rem += cn * s.powi(n as i32);
    }
    rem += (s / std::f64::consts::LN_2).powi(c.len() as i32);
    Ok((z, rem))
}

/// Solves e^{i omega} A^{-1} X A - X = G on sl(2,C) in the basis H, E, F.
pub fn solve_twisted_ad(a: &Mat2, omega: f64, g: &Mat2) -> Option<Mat2> {
    let ph = C64::from_polar(1.0, omega);
    let ai = a.inverse();
    let basis = [
        Mat2::sl2(ONE, ZERO, ZERO),
        Mat2::sl2(ZERO, ONE, ZERO),
        Mat2::sl2(ZERO, ZERO, ONE),
    ];
    let mut m = [[ZERO; 3]; 3];
    for (col, b) in basis.iter().enumerate() {
        let img = (ai * *b * *a).scale(ph) - *b;
        let c = img.sl2_coords();
        for row in 0..3 {
            m[row][col] = c[row];
        }
    }
    let rhs = g.sl2_coords();
    let sol = solve3(m, rhs)?;
    Some(Mat2::sl2(sol[0], sol[1], sol[2]))
}

/// Gaussian elimination with partial pivoting.
pub fn solve3(mut m: [[C64; 3]; 3], mut b: [C64; 3]) -> Option<[C64; 3]> {
    let scale = m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))?;
        if m[piv][col].norm() <= 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
            let bv = b[col];
            b[row] -= f * bv;
        }
    }
    let mut x = [ZERO; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in (row + 1)..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}
