//! Finite unions of closed intervals: gaps, bridges, thickness, the Newhouse
//! sum condition and Minkowski sums.

use std::f64::consts::PI;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kam_engine::Dioph;
use crate::spectral_analysis::{ids, spectrum_approximation, GapRecord, ScanControls, SchrodingerProblem};

/// Sorted, merged, disjoint closed intervals.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct IntervalUnion {
    intervals: Vec<[f64; 2]>,
}

impl IntervalUnion {
    pub fn canonicalize(raw: &[(f64, f64)]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut v: Vec<[f64; 2]> = Vec::with_capacity(raw.len());
        for &(a, b) in raw {
            if !(a.is_finite() && b.is_finite()) || a > b {
                return Err(Error::InvalidParameter(format!("bad interval [{a}, {b}]")));
            }
            v.push([a, b]);
        }
        v.sort_by(|x, y| x[0].total_cmp(&y[0]).then(x[1].total_cmp(&y[1])));
        let mut out: Vec<[f64; 2]> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if iv[0] <= last[1] => last[1] = last[1].max(iv[1]),
                _ => out.push(iv),
            }
        }
        Ok(IntervalUnion { intervals: out })
    }

    pub fn interval(a: f64, b: f64) -> Self {
        IntervalUnion { intervals: vec![[a, b]] }
    }

    pub fn intervals(&self) -> &[[f64; 2]] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_interval(&self) -> bool {
        self.intervals.len() == 1
    }

    pub fn min(&self) -> f64 {
        self.intervals[0][0]
    }

    pub fn max(&self) -> f64 {
        self.intervals[self.intervals.len() - 1][1]
    }

    pub fn diam(&self) -> f64 {
        self.max() - self.min()
    }

    /// x -> a x + b
    pub fn affine(&self, a: f64, b: f64) -> Self {
        let raw: Vec<(f64, f64)> = self
            .intervals
            .iter()
            .map(|iv| {
                let (x, y) = (a * iv[0] + b, a * iv[1] + b);
                (x.min(y), x.max(y))
            })
            .collect();
        Self::canonicalize(&raw).expect("nonempty")
    }

    /// Merges gaps shorter than eps.
    pub fn coarsen(&self, eps: f64) -> Self {
        let mut out: Vec<[f64; 2]> = Vec::new();
        for iv in &self.intervals {
            match out.last_mut() {
                Some(last) if iv[0] - last[1] < eps => last[1] = iv[1],
                _ => out.push(*iv),
            }
        }
        IntervalUnion { intervals: out }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv[0] <= x && x <= iv[1])
    }
}

/// Open intervals between consecutive components.
pub fn bounded_gaps(k: &IntervalUnion) -> Vec<(f64, f64)> {
    k.intervals.windows(2).map(|w| (w[0][1], w[1][0])).collect()
}

fn gap_len(k: &IntervalUnion, i: usize) -> f64 {
    k.intervals[i + 1][0] - k.intervals[i][1]
}

/// Bridge at the endpoint of gap i on the given side.
fn bridge_at(k: &IntervalUnion, i: usize, left_side: bool) -> (f64, f64) {
    let l = gap_len(k, i);
    let n = k.intervals.len();
    if left_side {
        let u = k.intervals[i][1];
        let mut x = k.min();
        for j in (0..i).rev() {
            if gap_len(k, j) >= l {
                x = k.intervals[j + 1][0];
                break;
            }
        }
        (x, u)
    } else {
        let u = k.intervals[i + 1][0];
        let mut x = k.max();
        for j in i + 1..n - 1 {
            if gap_len(k, j) >= l {
                x = k.intervals[j][1];
                break;
            }
        }
        (u, x)
    }
}

/// The maximal interval C with u on its boundary meeting only gaps shorter than the one at u.
pub fn bridge(k: &IntervalUnion, u: f64) -> Result<(f64, f64)> {
    for i in 0..k.intervals.len().saturating_sub(1) {
        if k.intervals[i][1] == u {
            return Ok(bridge_at(k, i, true));
        }
        if k.intervals[i + 1][0] == u {
            return Ok(bridge_at(k, i, false));
        }
    }
    Err(Error::NotGapEndpoint(u))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Thickness {
    Finite(f64),
    Infinite,
}

impl Thickness {
    pub fn value(&self) -> f64 {
        match self {
            Thickness::Finite(t) => *t,
            Thickness::Infinite => f64::INFINITY,
        }
    }

    /// tau / (tau + 1), equal to 1 at infinity
    pub fn ratio(&self) -> f64 {
        match self {
            Thickness::Finite(t) => t / (t + 1.0),
            Thickness::Infinite => 1.0,
        }
    }
}

impl Serialize for Thickness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Thickness::Finite(t) => s.serialize_f64(*t),
            Thickness::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub u: f64,
    pub bridge: [f64; 2],
    pub gap: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct ThicknessReport {
    pub tau: Thickness,
    pub witness: Option<Witness>,
}

/// Infimum of l(C)/l(U) over all gap endpoints.
pub fn thickness(k: &IntervalUnion) -> ThicknessReport {
    let mut best: Option<(f64, Witness)> = None;
    for i in 0..k.intervals.len().saturating_sub(1) {
        let l = gap_len(k, i);
        let gap = [k.intervals[i][1], k.intervals[i + 1][0]];
        for left in [true, false] {
            let c = bridge_at(k, i, left);
            let t = (c.1 - c.0) / l;
            if best.as_ref().map_or(true, |b| t < b.0) {
                let u = if left { gap[0] } else { gap[1] };
                best = Some((t, Witness { u, bridge: [c.0, c.1], gap }));
            }
        }
    }
    match best {
        None => ThicknessReport { tau: Thickness::Infinite, witness: None },
        Some((t, w)) => ThicknessReport { tau: Thickness::Finite(t), witness: Some(w) },
    }
}

/// Largest bounded gap, 0 for an interval.
pub fn gamma(k: &IntervalUnion) -> f64 {
    (0..k.intervals.len().saturating_sub(1)).map(|i| gap_len(k, i)).fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct NewhouseReport {
    pub pass: bool,
    /// order of the inputs in which the conditions were met (or the first one tried)
    pub order: Vec<usize>,
    pub ratio_sum: f64,
    pub violations: Vec<String>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn newhouse_order(ks: &[&IntervalUnion], order: &[usize]) -> Vec<String> {
    let mut v = Vec::new();
    let g: Vec<f64> = order.iter().map(|&i| gamma(ks[i])).collect();
    let d: Vec<f64> = order.iter().map(|&i| ks[i].diam()).collect();
    for i in 0..order.len() {
        for j in 0..i {
            if g[j] > d[i] {
                v.push(format!("Gamma(K{}) = {} > diam(K{}) = {}", order[j] + 1, g[j], order[i] + 1, d[i]));
            }
        }
        if i > 0 {
            let s: f64 = d[..i].iter().sum();
            if g[i] > s {
                v.push(format!("Gamma(K{}) = {} > sum of preceding diameters = {}", order[i] + 1, g[i], s));
            }
        }
    }
    v
}

/// Sufficient condition for K_1 + ... + K_m to be an interval. The gap/diameter
/// inequalities are tried over all orderings when m <= 6.
pub fn newhouse_check(ks: &[&IntervalUnion]) -> Result<NewhouseReport> {
    if ks.len() < 2 {
        return Err(Error::InvalidParameter("newhouse_check needs at least two sets".into()));
    }
    let ratio_sum: f64 = ks.iter().map(|k| thickness(k).tau.ratio()).sum();
    let mut violations = Vec::new();
    if ratio_sum < 1.0 {
        violations.push(format!("sum tau/(tau+1) = {ratio_sum} < 1"));
    }
    let orders = if ks.len() <= 6 { permutations(ks.len()) } else { vec![(0..ks.len()).collect()] };
    let mut first: Option<(Vec<usize>, Vec<String>)> = None;
    for o in orders {
        let v = newhouse_order(ks, &o);
        if v.is_empty() {
            let pass = violations.is_empty();
            return Ok(NewhouseReport { pass, order: o, ratio_sum, violations });
        }
        if first.is_none() {
            first = Some((o, v));
        }
    }
    let (order, v) = first.expect("at least one ordering");
    violations.extend(v);
    Ok(NewhouseReport { pass: false, order, ratio_sum, violations })
}

pub const SUMSET_CAP: usize = 1_000_000;

fn sum2(a: &IntervalUnion, b: &IntervalUnion) -> Result<IntervalUnion> {
    let n = a.len() * b.len();
    if n > SUMSET_CAP {
        return Err(Error::SumsetBlowup(n));
    }
    let mut raw = Vec::with_capacity(n);
    for x in &a.intervals {
        for y in &b.intervals {
            raw.push((x[0] + y[0], x[1] + y[1]));
        }
    }
    IntervalUnion::canonicalize(&raw)
}

/// Minkowski sum.
pub fn sumset(ks: &[&IntervalUnion]) -> Result<IntervalUnion> {
    let (first, rest) = ks.split_first().ok_or(Error::EmptyInput)?;
    let mut acc = (*first).clone();
    for k in rest {
        acc = sum2(&acc, k)?;
    }
    Ok(acc)
}

/// Level-n middle-thirds set in integer coordinates on [0, 3^n].
pub fn middle_thirds_integer(level: u32) -> IntervalUnion {
    let mut iv: Vec<(f64, f64)> = vec![(0.0, 3f64.powi(level as i32))];
    for _ in 0..level {
        iv = iv
            .into_iter()
            .flat_map(|(a, b)| {
                let t = (b - a) / 3.0;
                [(a, a + t), (b - t, b)]
            })
            .collect();
    }
    IntervalUnion::canonicalize(&iv).expect("nonempty")
}

/// Level-n middle-thirds set on [0, 1].
pub fn middle_thirds(level: u32) -> IntervalUnion {
    middle_thirds_integer(level).affine(3f64.powi(-(level as i32)), 0.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct GapDiagnostic {
    pub k: Vec<i64>,
    pub length: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentReport {
    pub eps0: f64,
    pub spectrum: IntervalUnion,
    pub thickness: ThicknessReport,
    pub gamma: f64,
    pub diam: f64,
    pub gaps: Vec<GapRecord>,
    /// measured 1/2-Holder constant of the IDS, used in place of C0
    pub holder_constant: f64,
    pub diagnostics: Vec<GapDiagnostic>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub components: Vec<ComponentReport>,
    pub newhouse: NewhouseReport,
    pub sum: Option<IntervalUnion>,
    pub single_interval: Option<bool>,
    pub consistent: bool,
}

fn holder_constant(prob: &SchrodingerProblem, lo: f64, hi: f64, n_iter: usize) -> f64 {
    let n = 33;
    let es: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let ns: Vec<f64> = es.iter().map(|&e| ids(prob, e, n_iter)).collect();
    let mut c: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            c = c.max((ns[j] - ns[i]).abs() / (es[j] - es[i]).sqrt());
        }
    }
    c
}

/// Spectrum approximation, thickness and gap diagnostics of one operator.
pub fn component_report(prob: &SchrodingerProblem, sc: &ScanControls, dioph: &Dioph) -> Result<ComponentReport> {
    let (ivs, gaps) = spectrum_approximation(prob, sc);
    let spectrum = IntervalUnion::canonicalize(&ivs)?;
    let hc = holder_constant(prob, spectrum.min(), spectrum.max(), sc.n_iter.min(20_000));
    let diagnostics = gaps
        .iter()
        .map(|g| {
            let k = g.k.iter().map(|x| x.unsigned_abs()).sum::<u64>() as f64;
            let decay = (-prob.p.r * (2.0 * PI * k).powf(prob.p.nu)).exp() * k.powf(2.0 * dioph.tau);
            let ratio = dioph.gamma.powi(2) / (hc * hc * prob.eps0.sqrt()) / decay;
            GapDiagnostic { k: g.k.clone(), length: g.length, ratio }
        })
        .collect();
    Ok(ComponentReport {
        eps0: prob.eps0,
        thickness: thickness(&spectrum),
        gamma: gamma(&spectrum),
        diam: spectrum.diam(),
        spectrum,
        gaps,
        holder_constant: hc,
        diagnostics,
    })
}

/// A component given directly as a set rather than through an operator.
pub fn set_component(spectrum: IntervalUnion) -> ComponentReport {
    ComponentReport {
        eps0: 0.0,
        thickness: thickness(&spectrum),
        gamma: gamma(&spectrum),
        diam: spectrum.diam(),
        spectrum,
        gaps: Vec::new(),
        holder_constant: 0.0,
        diagnostics: Vec::new(),
    }
}

/// Newhouse condition on the components and, when it holds, their sum.
pub fn pipeline_verdict(components: Vec<ComponentReport>) -> Result<PipelineReport> {
    let refs: Vec<&IntervalUnion> = components.iter().map(|c| &c.spectrum).collect();
    let newhouse = newhouse_check(&refs)?;
    let (sum, single) = if newhouse.pass {
        let s = sumset(&refs)?;
        let one = s.is_interval();
        (Some(s), Some(one))
    } else {
        (None, None)
    };
    let consistent = single != Some(false);
    Ok(PipelineReport { components, newhouse, sum, single_interval: single, consistent })
}

/// Spectrum approximations, thickness, Newhouse condition and their sum.
pub fn interval_spectrum_pipeline(
    problems: &[SchrodingerProblem],
    controls: &[ScanControls],
    dioph: &Dioph,
) -> Result<PipelineReport> {
    if problems.len() != controls.len() {
        return Err(Error::DimensionMismatch { expected: problems.len(), got: controls.len() });
    }
    let comps = problems.iter().zip(controls).map(|(p, sc)| component_report(p, sc, dioph)).collect::<Result<Vec<_>>>()?;
    pipeline_verdict(comps)
}
