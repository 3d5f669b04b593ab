//! Ambient complex space forms: flat `ℂⁿ` and an affine chart of `ℂPⁿ(4c)`.
//!
//! Complex coordinates are stored as interleaved real pairs
//! `(re₁, im₁, re₂, im₂, …)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::{eval_jet, ChartMap, Real};

/// Chart points beyond this modulus are rejected.
pub const MAX_CHART_MODULUS: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmbientKind {
    FlatComplex,
    FubiniStudyChart,
}

/// `ℂⁿ` (c = 0) or the Fubini–Study chart of `ℂPⁿ` with holomorphic
/// sectional curvature `4c` (c > 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientSpace {
    kind: AmbientKind,
    n: usize,
    c: f64,
}

/// Christoffel symbols `Γ^a_{bc}` of the ambient metric at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    fn set(&mut self, a: usize, b: usize, c: usize, x: f64) {
        let d = self.dim;
        self.data[(a * d + b) * d + c] = x;
    }

    /// `Γ(u, v)^a = Γ^a_{bc} u^b v^c`.
    pub fn contract(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|a| {
                let mut s = 0.0;
                for b in 0..d {
                    if u[b] == 0.0 {
                        continue;
                    }
                    for c in 0..d {
                        s += self.get(a, b, c) * u[b] * v[c];
                    }
                }
                s
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// The Fubini–Study metric entries as a map from the real chart to `(2n)²`
/// coordinates, so metric derivatives come from [`eval_jet`].
struct MetricMap {
    n: usize,
    c: f64,
}

impl ChartMap for MetricMap {
    fn chart_dim(&self) -> usize {
        2 * self.n
    }

    fn ambient_dim(&self) -> usize {
        4 * self.n * self.n
    }

    fn eval<T: Real>(&self, w: &[T]) -> Result<Vec<T>> {
        let d = 2 * self.n;
        let rho = w.iter().fold(w[0].lift(0.0), |acc, x| acc + x.square());
        let one_plus = rho + 1.0;
        // (1/c) / (1+|w|²)²
        let scale = (one_plus.square() * self.c).recip();
        let mut out = vec![w[0].lift(0.0); d * d];
        for a in 0..self.n {
            let (xa, ya) = (&w[2 * a], &w[2 * a + 1]);
            for b in 0..self.n {
                let (xb, yb) = (&w[2 * b], &w[2 * b + 1]);
                // conj(w_a)·w_b = (xa xb + ya yb) + i (xa yb − ya xb)
                let re = xa.clone() * xb.clone() + ya.clone() * yb.clone();
                let im = xa.clone() * yb.clone() - ya.clone() * xb.clone();
                let mut re_g = -re;
                if a == b {
                    re_g = re_g + one_plus.clone();
                }
                let re_g = re_g * scale.clone();
                let im_g = -im * scale.clone();
                out[(2 * a) * d + 2 * b] = re_g.clone();
                out[(2 * a + 1) * d + 2 * b + 1] = re_g;
                out[(2 * a) * d + 2 * b + 1] = im_g.clone();
                out[(2 * a + 1) * d + 2 * b] = -im_g;
            }
        }
        Ok(out)
    }
}

impl AmbientSpace {
    pub fn flat(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("complex dimension must be positive".into()));
        }
        Ok(Self {
            kind: AmbientKind::FlatComplex,
            n,
            c: 0.0,
        })
    }

    pub fn fubini_study(n: usize, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("complex dimension must be positive".into()));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "Fubini-Study chart needs c > 0, got {c}"
            )));
        }
        Ok(Self {
            kind: AmbientKind::FubiniStudyChart,
            n,
            c,
        })
    }

    pub fn kind(&self) -> AmbientKind {
        self.kind
    }

    /// Complex dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Holomorphic sectional curvature is `4c`.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    fn check_point(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.real_dim() {
            return Err(Error::Dimension(format!(
                "ambient point has length {}, expected {}",
                w.len(),
                self.real_dim()
            )));
        }
        let modulus = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(modulus <= MAX_CHART_MODULUS) {
            return Err(Error::Domain {
                what: "ambient chart modulus",
                value: modulus,
            });
        }
        Ok(())
    }

    pub fn metric_at(&self, w: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(w)?;
        match self.kind {
            AmbientKind::FlatComplex => Ok(DMatrix::identity(self.real_dim(), self.real_dim())),
            AmbientKind::FubiniStudyChart => {
                let d = self.real_dim();
                let entries = MetricMap { n: self.n, c: self.c }.eval(w)?;
                Ok(DMatrix::from_row_slice(d, d, &entries))
            }
        }
    }

    /// Exact partial derivatives `∂_e G` of the metric, one matrix per real coordinate.
    pub fn metric_derivatives(&self, w: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        self.check_point(w)?;
        let d = self.real_dim();
        if self.kind == AmbientKind::FlatComplex {
            return Ok(vec![DMatrix::zeros(d, d); d]);
        }
        let jet = eval_jet(&MetricMap { n: self.n, c: self.c }, w)?;
        Ok((0..d)
            .map(|e| DMatrix::from_fn(d, d, |b, c| jet.first[(b * d + c, e)]))
            .collect())
    }

    /// Levi-Civita symbols of the ambient metric, from its exact first derivatives.
    pub fn christoffel_at(&self, w: &[f64]) -> Result<Christoffel> {
        self.check_point(w)?;
        let d = self.real_dim();
        if self.kind == AmbientKind::FlatComplex {
            return Ok(Christoffel::zeros(d));
        }
        let jet = eval_jet(&MetricMap { n: self.n, c: self.c }, w)?;
        let g = DMatrix::from_row_slice(d, d, &jet.value);
        let ginv = g
            .cholesky()
            .ok_or(Error::RankDeficient {
                min_eigenvalue: f64::NAN,
            })?
            .inverse();
        // dg(e, b, c) = ∂_e g_bc
        let dg = |e: usize, b: usize, c: usize| jet.first[(b * d + c, e)];
        let mut gamma = Christoffel::zeros(d);
        let mut lowered = vec![0.0; d];
        for b in 0..d {
            for c in b..d {
                for (e, slot) in lowered.iter_mut().enumerate() {
                    *slot = 0.5 * (dg(b, e, c) + dg(c, e, b) - dg(e, b, c));
                }
                for a in 0..d {
                    let x: f64 = (0..d).map(|e| ginv[(a, e)] * lowered[e]).sum();
                    gamma.set(a, b, c, x);
                    gamma.set(a, c, b, x);
                }
            }
        }
        Ok(gamma)
    }

    /// Multiplication by `i`: `(re, im) ↦ (−im, re)` in every complex slot.
    pub fn complex_structure_apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for k in 0..v.len() / 2 {
            out[2 * k] = -v[2 * k + 1];
            out[2 * k + 1] = v[2 * k];
        }
        out
    }

    pub fn inner(&self, w: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
        let g = self.metric_at(w)?;
        Ok(bilinear(&g, u, v))
    }

    /// `ω(u, v) = G(Ju, v)`.
    pub fn symplectic_form(&self, w: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
        self.inner(w, &self.complex_structure_apply(u), v)
    }

    /// Minimum and maximum sectional curvature over planes `u ∧ v` with
    /// `⟨u, Jv⟩ = 0`. In a complex space form every such plane has curvature `c`.
    pub fn totally_real_curvature_range(&self) -> (f64, f64) {
        (self.c, self.c)
    }

    /// Berger-type bound `(2/3)(Δ − δ)` on mixed ambient curvature components
    /// over totally real frames; identically zero for space forms.
    pub fn berger_bound(&self) -> f64 {
        let (delta, big_delta) = self.totally_real_curvature_range();
        2.0 / 3.0 * (big_delta - delta)
    }
}

/// `uᵀ G v`.
pub fn bilinear(g: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    let u = DVector::from_column_slice(u);
    let v = DVector::from_column_slice(v);
    u.dot(&(g * v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> Vec<f64> {
        (0..len).map(|_| rng.random_range(-scale..scale)).collect()
    }

    #[test]
    fn flat_metric_is_identity() {
        let s = AmbientSpace::flat(3).unwrap();
        let g = s.metric_at(&[0.3, 1.0, -2.0, 0.0, 5.0, 1.0]).unwrap();
        assert_eq!(g, DMatrix::identity(6, 6));
        assert_eq!(s.christoffel_at(&[0.0; 6]).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn fubini_study_metric_at_origin_is_identity() {
        let s = AmbientSpace::fubini_study(3, 1.0).unwrap();
        let g = s.metric_at(&[0.0; 6]).unwrap();
        assert!((g - DMatrix::identity(6, 6)).abs().max() < 1e-15);
    }

    #[test]
    fn fubini_study_metric_on_unit_circle_n1() {
        let s = AmbientSpace::fubini_study(1, 1.0).unwrap();
        let g = s.metric_at(&[1.0, 0.0]).unwrap();
        assert!((g - DMatrix::identity(2, 2) * 0.25).abs().max() < 1e-15);
    }

    #[test]
    fn metric_scales_inversely_with_c() {
        let w = [0.2, -0.4, 0.1, 0.3];
        let g1 = AmbientSpace::fubini_study(2, 1.0).unwrap().metric_at(&w).unwrap();
        let g4 = AmbientSpace::fubini_study(2, 4.0).unwrap().metric_at(&w).unwrap();
        assert!((g1 * 0.25 - g4).abs().max() < 1e-15);
    }

    #[test]
    fn christoffels_vanish_at_origin() {
        let s = AmbientSpace::fubini_study(3, 1.0).unwrap();
        assert!(s.christoffel_at(&[0.0; 6]).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn rejects_far_points_and_bad_c() {
        let s = AmbientSpace::fubini_study(1, 1.0).unwrap();
        assert!(matches!(s.metric_at(&[2e8, 0.0]), Err(Error::Domain { .. })));
        assert!(AmbientSpace::fubini_study(3, 0.0).is_err());
        assert!(AmbientSpace::fubini_study(3, -1.0).is_err());
        assert!(s.metric_at(&[1.0]).is_err());
    }

    #[test]
    fn complex_structure_squares_to_minus_identity() {
        let s = AmbientSpace::flat(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_vec(&mut rng, 6, 1.0);
        let jjv = s.complex_structure_apply(&s.complex_structure_apply(&v));
        assert!(v.iter().zip(&jjv).all(|(a, b)| *a == -*b));
        let e1 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(s.complex_structure_apply(&e1), vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn complex_structure_is_fubini_study_isometry() {
        let s = AmbientSpace::fubini_study(3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let w = random_vec(&mut rng, 6, 2.0);
            let g = s.metric_at(&w).unwrap();
            let mut jm = DMatrix::zeros(6, 6);
            for k in 0..6 {
                let mut e = vec![0.0; 6];
                e[k] = 1.0;
                jm.set_column(k, &DVector::from_vec(s.complex_structure_apply(&e)));
            }
            assert!((&g - jm.transpose() * &g * &jm).abs().max() <= 1e-10);
            let u = random_vec(&mut rng, 6, 1.0);
            let v = random_vec(&mut rng, 6, 1.0);
            let lhs = bilinear(&g, &s.complex_structure_apply(&u), &s.complex_structure_apply(&v));
            assert!((lhs - bilinear(&g, &u, &v)).abs() <= 1e-12);
        }
    }

    #[test]
    fn symplectic_form_is_antisymmetric() {
        let flat = AmbientSpace::flat(3).unwrap();
        let e1 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let je1 = flat.complex_structure_apply(&e1);
        assert_eq!(flat.symplectic_form(&[0.0; 6], &e1, &je1).unwrap(), 1.0);

        let s = AmbientSpace::fubini_study(3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let w = random_vec(&mut rng, 6, 1.5);
            let u = random_vec(&mut rng, 6, 1.0);
            let v = random_vec(&mut rng, 6, 1.0);
            assert!(s.symplectic_form(&w, &v, &v).unwrap().abs() <= 1e-15);
            let a = s.symplectic_form(&w, &u, &v).unwrap();
            let b = s.symplectic_form(&w, &v, &u).unwrap();
            assert!((a + b).abs() <= 1e-14);
        }
    }

    #[test]
    fn berger_bound_vanishes_for_space_forms() {
        assert_eq!(AmbientSpace::flat(3).unwrap().berger_bound(), 0.0);
        let s = AmbientSpace::fubini_study(4, 2.5).unwrap();
        assert_eq!(s.totally_real_curvature_range(), (2.5, 2.5));
        assert_eq!(s.berger_bound(), 0.0);
    }
}
