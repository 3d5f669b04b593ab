//! Explicit Lagrangian immersions of the round sphere.
//!
//! * the Whitney sphere in `ℂⁿ`,
//! * Castro's one-parameter family `Φ_q` in `ℂⁿ` (with `Φ₂` the Whitney sphere),
//! * the Whitney spheres `φ̄_θ` in `ℂPⁿ(4)`, given in homogeneous coordinates
//!   and pushed to an affine chart,
//! * the totally geodesic plane `ℝⁿ ⊂ ℂⁿ` as a trivial reference.
//!
//! The sphere is covered by two stereographic charts; every map here is
//! written against [`Real`] so it can be differentiated by [`eval_jet`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::ambient::{AmbientKind, AmbientSpace};
use crate::error::{Error, Result};
use crate::jets::{eval_jet, ChartMap, Jet2, Real};

/// Castro maps need `|x_{n+1}| < 1 − CASTRO_POLE_MARGIN`.
pub const CASTRO_POLE_MARGIN: f64 = 1e-9;
/// Sampled points with `|x_{n+1}|` above this are redrawn.
pub const SAMPLER_POLE_CUTOFF: f64 = 0.999;
/// Minimum modulus gap between the dehomogenization pivot and the runner-up.
pub const PIVOT_GAP: f64 = 1e-6;

/// A point on the unit sphere `𝕊ⁿ ⊂ ℝⁿ⁺¹`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    x: Vec<f64>,
}

impl SpherePoint {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if x.len() < 2 || !((norm - 1.0).abs() <= 1e-12) {
            return Err(Error::Domain {
                what: "sphere point norm",
                value: norm,
            });
        }
        Ok(Self { x })
    }

    /// Normalizes a nonzero vector onto the sphere.
    pub fn from_direction(v: &[f64]) -> Result<Self> {
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain {
                what: "sphere direction norm",
                value: norm,
            });
        }
        Ok(Self {
            x: v.iter().map(|a| a / norm).collect(),
        })
    }

    pub fn coords(&self) -> &[f64] {
        &self.x
    }

    /// Sphere dimension `n` (the point lives in `ℝⁿ⁺¹`).
    pub fn dim(&self) -> usize {
        self.x.len() - 1
    }

    /// The last coordinate `x_{n+1}`.
    pub fn height(&self) -> f64 {
        self.x[self.x.len() - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pole {
    North,
    South,
}

/// Inverse stereographic projection `ℝⁿ → 𝕊ⁿ` from the excluded `pole`
/// (`x_{n+1} = +1` for north, `−1` for south).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereChart {
    pub pole: Pole,
}

impl SphereChart {
    pub const NORTH: SphereChart = SphereChart { pole: Pole::North };
    pub const SOUTH: SphereChart = SphereChart { pole: Pole::South };

    /// The chart whose excluded pole is farther from `x`.
    pub fn for_point(x: &SpherePoint) -> Self {
        if x.height() <= 0.0 {
            Self::NORTH
        } else {
            Self::SOUTH
        }
    }

    pub fn to_sphere<T: Real>(&self, u: &[T]) -> Vec<T> {
        let r2 = u.iter().fold(u[0].lift(0.0), |acc, a| acc + a.square());
        let inv = (r2.clone() + 1.0).recip();
        let mut x: Vec<T> = u.iter().map(|a| a.clone() * inv.clone() * 2.0).collect();
        let last = match self.pole {
            Pole::North => (r2 - 1.0) * inv,
            Pole::South => -(r2 - 1.0) * inv,
        };
        x.push(last);
        x
    }

    /// Stereographic coordinates of `x`; fails at the excluded pole.
    pub fn from_sphere(&self, x: &SpherePoint) -> Result<Vec<f64>> {
        let t = x.height();
        let denom = match self.pole {
            Pole::North => 1.0 - t,
            Pole::South => 1.0 + t,
        };
        if denom < 1e-12 {
            return Err(Error::Domain {
                what: "stereographic chart denominator",
                value: denom,
            });
        }
        Ok(x.coords()[..x.dim()].iter().map(|a| a / denom).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    WhitneyC,
    Castro { q: f64 },
    WhitneyCp { theta: f64 },
    TotallyGeodesicPlane,
}

/// A validated immersion: family, sphere dimension `n` and its ambient space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImmersionSpec {
    family: Family,
    n: usize,
    ambient: AmbientSpace,
}

impl ImmersionSpec {
    pub fn new(family: Family, n: usize, ambient: AmbientSpace) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSpec(format!("dimension n = {n} must be at least 3")));
        }
        if ambient.n() != n {
            return Err(Error::InvalidSpec(format!(
                "ambient complex dimension {} differs from n = {n}",
                ambient.n()
            )));
        }
        match family {
            Family::Castro { q } if !(q > 1.0 && q.is_finite()) => {
                return Err(Error::InvalidSpec(format!("Castro family needs q > 1, got {q}")))
            }
            Family::WhitneyCp { theta } => {
                if !(theta >= 0.0 && theta.is_finite()) {
                    return Err(Error::InvalidSpec(format!(
                        "Whitney sphere in CP^n needs theta >= 0, got {theta}"
                    )));
                }
                if ambient.kind() != AmbientKind::FubiniStudyChart || ambient.c() != 1.0 {
                    return Err(Error::InvalidSpec(
                        "Whitney sphere in CP^n lives in the Fubini-Study chart with c = 1".into(),
                    ));
                }
            }
            _ => {
                if ambient.kind() != AmbientKind::FlatComplex {
                    return Err(Error::InvalidSpec(
                        "flat-space immersions need a FlatComplex ambient".into(),
                    ));
                }
            }
        }
        Ok(Self { family, n, ambient })
    }

    pub fn whitney(n: usize) -> Result<Self> {
        Self::new(Family::WhitneyC, n, AmbientSpace::flat(n)?)
    }

    pub fn castro(n: usize, q: f64) -> Result<Self> {
        Self::new(Family::Castro { q }, n, AmbientSpace::flat(n)?)
    }

    pub fn whitney_cp(n: usize, theta: f64) -> Result<Self> {
        Self::new(Family::WhitneyCp { theta }, n, AmbientSpace::fubini_study(n, 1.0)?)
    }

    pub fn geodesic_plane(n: usize) -> Result<Self> {
        Self::new(Family::TotallyGeodesicPlane, n, AmbientSpace::flat(n)?)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ambient(&self) -> &AmbientSpace {
        &self.ambient
    }
}

fn zero_like<T: Real>(x: &[T]) -> T {
    x[0].lift(0.0)
}

fn whitney_map<T: Real>(x: &[T]) -> Vec<T> {
    let n = x.len() - 1;
    let t = &x[n];
    let inv = (t.square() + 1.0).recip();
    let re = inv.clone();
    let im = t.clone() * inv;
    let mut out = Vec::with_capacity(2 * n);
    for xa in &x[..n] {
        out.push(xa.clone() * re.clone());
        out.push(xa.clone() * im.clone());
    }
    out
}

fn castro_check(t: f64) -> Result<()> {
    if t.abs() < 1.0 - CASTRO_POLE_MARGIN {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "Castro map height |x_{n+1}|",
            value: t,
        })
    }
}

fn castro_beta<T: Real>(t: &T, q: f64) -> Result<T> {
    let p = (t.clone() + 1.0).powf(q / 2.0)?;
    let m = (-t.clone() + 1.0).powf(q / 2.0)?;
    Ok(((p.clone() - m.clone()) / (p + m)).atan() * (2.0 / q))
}

fn castro_map<T: Real>(x: &[T], q: f64) -> Result<Vec<T>> {
    let n = x.len() - 1;
    let t = &x[n];
    castro_check(t.value())?;
    let bracket = (t.clone() + 1.0).powf(q)? + (-t.clone() + 1.0).powf(q)?;
    let modulus = bracket.powf(-1.0 / q)? * 2f64.powf(1.0 / q);
    let beta = castro_beta(t, q)?;
    let re = modulus.clone() * beta.cos();
    let im = modulus * beta.sin();
    let mut out = Vec::with_capacity(2 * n);
    for xa in &x[..n] {
        out.push(xa.clone() * re.clone());
        out.push(xa.clone() * im.clone());
    }
    Ok(out)
}

/// Homogeneous coordinates in `ℂⁿ⁺¹` (interleaved) of `φ̄_θ(x)`.
fn whitneycp_map<T: Real>(x: &[T], theta: f64) -> Vec<T> {
    let n = x.len() - 1;
    let (ch, sh) = (theta.cosh(), theta.sinh());
    let t = &x[n];
    let t2 = t.square();
    // 1/(c + i s t) = (c − i s t)/(c² + s² t²)
    let denom = (t2.clone() * (sh * sh) + ch * ch).recip();
    let re = denom.clone() * ch;
    let im = -(t.clone() * denom.clone() * sh);
    let mut out = Vec::with_capacity(2 * n + 2);
    for xa in &x[..n] {
        out.push(xa.clone() * re.clone());
        out.push(xa.clone() * im.clone());
    }
    out.push((t2 + 1.0) * denom.clone() * (sh * ch));
    out.push(t.clone() * denom);
    out
}

/// `z_a / z_p` for interleaved complex `z`, omitting the pivot slot.
fn divide_by_pivot<T: Real>(z: &[T], pivot: usize) -> Vec<T> {
    let slots = z.len() / 2;
    let (pr, pi) = (&z[2 * pivot], &z[2 * pivot + 1]);
    let inv = (pr.square() + pi.square()).recip();
    let mut out = Vec::with_capacity(z.len() - 2);
    for k in (0..slots).filter(|&k| k != pivot) {
        let (zr, zi) = (&z[2 * k], &z[2 * k + 1]);
        out.push((zr.clone() * pr.clone() + zi.clone() * pi.clone()) * inv.clone());
        out.push((zi.clone() * pr.clone() - zr.clone() * pi.clone()) * inv.clone());
    }
    out
}

/// The Whitney sphere `x ↦ ((1 + i x_{n+1}) / (1 + x_{n+1}²)) (x₁, …, x_n)`.
pub fn whitney_eval(x: &SpherePoint) -> Vec<f64> {
    whitney_map(x.coords())
}

/// Castro's `Φ_q`.
pub fn castro_eval(x: &SpherePoint, q: f64) -> Result<Vec<f64>> {
    if !(q > 1.0) {
        return Err(Error::Domain {
            what: "Castro exponent q",
            value: q,
        });
    }
    castro_map(x.coords(), q)
}

/// The Castro phase `β_q(t)`.
pub fn castro_phase(t: f64, q: f64) -> Result<f64> {
    castro_check(t)?;
    castro_beta(&t, q)
}

/// Homogeneous coordinates of `φ̄_θ(x)` before the Hopf projection.
pub fn whitneycp_homogeneous_eval(x: &SpherePoint, theta: f64) -> Vec<f64> {
    whitneycp_map(x.coords(), theta)
}

/// Affine chart of a projective point: pivot on the largest modulus (lowest
/// index on ties) and divide it out. The returned index is zero-based.
pub fn dehomogenize(z: &[f64]) -> Result<(usize, Vec<f64>)> {
    let (pivot, _) = pivot_and_gap(z)?;
    Ok((pivot, divide_by_pivot(z, pivot)))
}

/// Pivot index and its modulus lead over the runner-up.
fn pivot_and_gap(z: &[f64]) -> Result<(usize, f64)> {
    if z.len() < 2 || !z.len().is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "homogeneous vector has odd or short length {}",
            z.len()
        )));
    }
    let moduli: Vec<f64> = z.chunks(2).map(|c| c[0].hypot(c[1])).collect();
    let mut pivot = 0;
    for (k, &m) in moduli.iter().enumerate() {
        if m > moduli[pivot] {
            pivot = k;
        }
    }
    if moduli[pivot] == 0.0 {
        return Err(Error::Domain {
            what: "homogeneous vector modulus",
            value: 0.0,
        });
    }
    let runner_up = moduli
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != pivot)
        .map(|(_, &m)| m)
        .fold(0.0, f64::max);
    Ok((pivot, moduli[pivot] - runner_up))
}

/// The composed map `chart → 𝕊ⁿ → ambient chart` of one immersion.
#[derive(Debug, Clone, Copy)]
pub struct ImmersionMap {
    spec: ImmersionSpec,
    chart: SphereChart,
    pivot: usize,
}

impl ImmersionMap {
    /// For the Whitney sphere in `ℂPⁿ`, `pivot` fixes the affine chart; it is
    /// ignored for the flat families.
    pub fn new(spec: ImmersionSpec, chart: SphereChart, pivot: usize) -> Self {
        Self { spec, chart, pivot }
    }
}

impl ChartMap for ImmersionMap {
    fn chart_dim(&self) -> usize {
        self.spec.n
    }

    fn ambient_dim(&self) -> usize {
        2 * self.spec.n
    }

    fn eval<T: Real>(&self, u: &[T]) -> Result<Vec<T>> {
        if u.len() != self.spec.n {
            return Err(Error::Dimension(format!(
                "chart point has length {}, expected {}",
                u.len(),
                self.spec.n
            )));
        }
        match self.spec.family {
            Family::TotallyGeodesicPlane => {
                let zero = zero_like(u);
                Ok(u.iter().flat_map(|a| [a.clone(), zero.clone()]).collect())
            }
            Family::WhitneyC => Ok(whitney_map(&self.chart.to_sphere(u))),
            Family::Castro { q } => castro_map(&self.chart.to_sphere(u), q),
            Family::WhitneyCp { theta } => {
                let z = whitneycp_map(&self.chart.to_sphere(u), theta);
                Ok(divide_by_pivot(&z, self.pivot))
            }
        }
    }
}

/// The map used by [`immersion_jet`] at `u`, with the affine pivot resolved.
pub fn immersion_map(spec: &ImmersionSpec, u: &[f64], chart: SphereChart) -> Result<ImmersionMap> {
    let pivot = match spec.family {
        Family::WhitneyCp { theta } => {
            let z = whitneycp_map(&chart.to_sphere(u), theta);
            let (pivot, gap) = pivot_and_gap(&z)?;
            if gap < PIVOT_GAP {
                return Err(Error::PivotUnstable { gap });
            }
            pivot
        }
        _ => 0,
    };
    Ok(ImmersionMap::new(*spec, chart, pivot))
}

/// Second-order jet of the full composed immersion at chart point `u`.
pub fn immersion_jet(spec: &ImmersionSpec, u: &[f64], chart: SphereChart) -> Result<Jet2> {
    let map = immersion_map(spec, u, chart)?;
    eval_jet(&map, u)
}

/// The `attempt`-th accepted draw for sample `index`.
///
/// Each index owns its own ChaCha20 stream, so the result depends only on
/// `(n, seed, index, attempt)`.
pub fn sample_sphere_point(n: usize, seed: u64, index: u64, attempt: u32) -> SpherePoint {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut accepted = 0;
    loop {
        let v: Vec<f64> = (0..=n).map(|_| rng.sample(StandardNormal)).collect();
        let Ok(p) = SpherePoint::from_direction(&v) else {
            continue;
        };
        if p.height().abs() > SAMPLER_POLE_CUTOFF {
            continue;
        }
        if accepted == attempt {
            return p;
        }
        accepted += 1;
    }
}

/// `count` deterministic, quasi-uniform points on `𝕊ⁿ`.
pub fn sample_sphere_points(n: usize, count: usize, seed: u64) -> Vec<SpherePoint> {
    (0..count as u64)
        .map(|i| sample_sphere_point(n, seed, i, 0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, k: usize) -> SpherePoint {
        let mut x = vec![0.0; n + 1];
        x[k] = 1.0;
        SpherePoint::new(x).unwrap()
    }

    #[test]
    fn whitney_at_equator_and_pole() {
        assert_eq!(whitney_eval(&e(3, 0)), vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(whitney_eval(&e(3, 3)).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn whitney_modulus() {
        for p in sample_sphere_points(4, 50, 11) {
            let phi = whitney_eval(&p);
            let t = p.height();
            let lhs: f64 = phi.iter().map(|v| v * v).sum();
            let rhs: f64 = p.coords()[..4].iter().map(|v| v * v).sum::<f64>() / (1.0 + t * t);
            assert!((lhs - rhs).abs() < 1e-15);
        }
    }

    #[test]
    fn castro_on_equator_is_identity_slot() {
        let x = SpherePoint::from_direction(&[0.3, -0.5, 0.8, 0.0]).unwrap();
        let phi = castro_eval(&x, 3.7).unwrap();
        for a in 0..3 {
            assert!((phi[2 * a] - x.coords()[a]).abs() < 1e-15);
            assert_eq!(phi[2 * a + 1], 0.0);
        }
        assert_eq!(castro_phase(0.0, 3.7).unwrap(), 0.0);
    }

    #[test]
    fn castro_two_is_whitney() {
        for p in sample_sphere_points(3, 100, 4) {
            let a = castro_eval(&p, 2.0).unwrap();
            let b = whitney_eval(&p);
            let d = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(d <= 1e-12, "{d}");
        }
    }

    #[test]
    fn castro_phase_value() {
        // β₃(0.5) = (2/3)·atan((1.5^1.5 − 0.5^1.5)/(1.5^1.5 + 0.5^1.5)); the
        // ratio simplifies to (3√3 − 1)/(3√3 + 1). Reference value from a
        // 40-digit evaluation.
        let s = 27f64.sqrt();
        let expected = 2.0 / 3.0 * ((s - 1.0) / (s + 1.0)).atan();
        assert!((castro_phase(0.5, 3.0).unwrap() - expected).abs() < 1e-15);
        assert!((castro_phase(0.5, 3.0).unwrap() - 0.39684837336732103).abs() < 1e-15);
    }

    #[test]
    fn castro_rejects_near_poles() {
        let x = SpherePoint::from_direction(&[1e-6, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(castro_eval(&x, 3.0), Err(Error::Domain { .. })));
        assert!(castro_eval(&e(3, 0), 1.0).is_err());
    }

    #[test]
    fn whitneycp_reference_points() {
        let z = whitneycp_homogeneous_eval(&e(3, 0), 0.0);
        assert_eq!(z, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let z = whitneycp_homogeneous_eval(&e(3, 3), 0.0);
        assert_eq!(&z[..6], &[0.0; 6]);
        assert_eq!(&z[6..], &[0.0, 1.0]);
    }

    #[test]
    fn whitneycp_lands_on_unit_sphere() {
        for (i, p) in sample_sphere_points(3, 100, 8).iter().enumerate() {
            let theta = 0.05 * i as f64;
            let z = whitneycp_homogeneous_eval(p, theta);
            let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn dehomogenize_pivots() {
        let (k, w) = dehomogenize(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(k, 3);
        assert!(w.iter().all(|&v| v == 0.0));

        let r = 0.5f64.sqrt();
        let (k, w) = dehomogenize(&[r, 0.0, 0.0, 0.0, 0.0, 0.0, r, 0.0]).unwrap();
        assert_eq!(k, 0);
        assert_eq!(w, vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);

        assert!(dehomogenize(&[0.0; 4]).is_err());
    }

    #[test]
    fn dehomogenize_is_projectively_invariant() {
        for (i, p) in sample_sphere_points(3, 30, 2).iter().enumerate() {
            let z = whitneycp_homogeneous_eval(p, 0.4);
            let (c, s) = (i as f64 * 0.7).sin_cos();
            let rotated: Vec<f64> = z
                .chunks(2)
                .flat_map(|v| [c * v[0] - s * v[1], s * v[0] + c * v[1]])
                .collect();
            let (k1, w1) = dehomogenize(&z).unwrap();
            let (k2, w2) = dehomogenize(&rotated).unwrap();
            assert_eq!(k1, k2);
            assert!(w1.iter().zip(&w2).all(|(a, b)| (a - b).abs() < 1e-14));
        }
    }

    #[test]
    fn stereographic_charts_round_trip() {
        for p in sample_sphere_points(4, 40, 21) {
            let chart = SphereChart::for_point(&p);
            let u = chart.from_sphere(&p).unwrap();
            assert!(u.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12);
            let back = chart.to_sphere(&u);
            assert!(back.iter().zip(p.coords()).all(|(a, b)| (a - b).abs() < 1e-14));
        }
        assert!(SphereChart::NORTH.from_sphere(&e(3, 3)).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(ImmersionSpec::castro(3, 1.0).is_err());
        assert!(ImmersionSpec::castro(3, 1.5).is_ok());
        assert!(ImmersionSpec::whitney(2).is_err());
        assert!(ImmersionSpec::whitney_cp(3, -0.1).is_err());
        let fs = AmbientSpace::fubini_study(3, 2.0).unwrap();
        assert!(ImmersionSpec::new(Family::WhitneyCp { theta: 0.3 }, 3, fs).is_err());
        assert!(ImmersionSpec::new(Family::WhitneyC, 3, fs).is_err());
        let flat4 = AmbientSpace::flat(4).unwrap();
        assert!(ImmersionSpec::new(Family::WhitneyC, 3, flat4).is_err());
    }

    #[test]
    fn geodesic_plane_jet_is_linear() {
        let spec = ImmersionSpec::geodesic_plane(3).unwrap();
        let jet = immersion_jet(&spec, &[0.2, -0.1, 0.7], SphereChart::NORTH).unwrap();
        for i in 0..3 {
            for a in 0..6 {
                let expected = if a == 2 * i { 1.0 } else { 0.0 };
                assert_eq!(jet.first[(a, i)], expected);
            }
        }
        assert!(jet.second.iter().all(|h| h.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn sampler_points_are_unit_and_deterministic() {
        let a = sample_sphere_points(3, 64, 42);
        let b = sample_sphere_points(3, 64, 42);
        assert_eq!(a, b);
        for p in &a {
            let norm = p.coords().iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() <= 1e-14);
            assert!(p.height().abs() <= SAMPLER_POLE_CUTOFF);
        }
        assert_ne!(a, sample_sphere_points(3, 64, 43));
    }

    #[test]
    fn sampler_is_roughly_centered() {
        let pts = sample_sphere_points(3, 1000, 42);
        for k in 0..4 {
            let mean = pts.iter().map(|p| p.coords()[k]).sum::<f64>() / 1000.0;
            assert!(mean.abs() < 0.1, "component {k} mean {mean}");
        }
    }

    #[test]
    fn later_attempts_differ() {
        let a = sample_sphere_point(3, 9, 5, 0);
        let b = sample_sphere_point(3, 9, 5, 1);
        assert_ne!(a, b);
        assert_eq!(b, sample_sphere_point(3, 9, 5, 1));
    }
}
