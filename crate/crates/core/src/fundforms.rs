//! First and second fundamental forms in an adapted Lagrangian frame.
//!
//! The tangent frame `e₁ … e_n` is Gram–Schmidt of the coordinate vectors
//! `∂_a φ` under the ambient metric; the normal frame is `e_{k*} = J e_k`.
//! The second fundamental form is read off from the ambient covariant
//! derivative `D_{∂a} ∂b φ = ∂²_{ab} φ + Γ(∂_a φ, ∂_b φ)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::ambient::{bilinear, AmbientSpace};
use crate::error::{Error, Result};
use crate::jets::Jet2;

/// Smallest admissible eigenvalue of the induced metric.
pub const RANK_FLOOR: f64 = 1e-12;
/// Relative total-symmetry residual above which the pipeline is considered broken.
pub const SYMMETRY_HARD_LIMIT: f64 = 1e-6;

/// Orthonormal tangent frame at one point together with its `J`-image.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFrame {
    pub base: Vec<f64>,
    /// `e_i = Σ_a coeffs[(a, i)] ∂_a φ`.
    pub coeffs: DMatrix<f64>,
    pub tangent: Vec<Vec<f64>>,
    pub normal: Vec<Vec<f64>>,
}

/// Pointwise second-fundamental-form data in an adapted frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalData {
    n: usize,
    /// `h[(i·n + j)·n + k] = h_{ij}^{k*}`.
    h: Vec<f64>,
    /// `H_r = (1/n) Σ_j h_{jj}^{r*}`; also the components of the mean curvature vector on `J e_r`.
    hr: Vec<f64>,
    mean_curvature: f64,
    s: f64,
    c: f64,
    symmetry_residual: f64,
}

impl FundamentalData {
    /// Builds the data from a full `n³` coefficient array (`h[(i·n + j)·n + k]`).
    pub fn from_tensor(n: usize, h: Vec<f64>, c: f64) -> Result<Self> {
        if h.len() != n * n * n {
            return Err(Error::Dimension(format!(
                "tensor has {} entries, expected {}",
                h.len(),
                n * n * n
            )));
        }
        let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
        let hr: Vec<f64> = (0..n)
            .map(|r| (0..n).map(|j| h[idx(j, j, r)]).sum::<f64>() / n as f64)
            .collect();
        let mean_curvature = hr.iter().map(|x| x * x).sum::<f64>().sqrt();
        let s = h.iter().map(|x| x * x).sum();
        let scale = h.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let x = h[idx(i, j, k)];
                    worst = worst
                        .max((x - h[idx(k, j, i)]).abs())
                        .max((x - h[idx(i, k, j)]).abs())
                        .max((x - h[idx(j, i, k)]).abs());
                }
            }
        }
        Ok(Self {
            n,
            h,
            hr,
            mean_curvature,
            s,
            c,
            symmetry_residual: worst / scale,
        })
    }

    /// Totally symmetric data from a generator over sorted index triples.
    pub fn symmetric_from_fn(n: usize, c: f64, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut h = vec![0.0; n * n * n];
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let x = f(i, j, k);
                    for (a, b, cc) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                        h[(a * n + b) * n + cc] = x;
                    }
                }
            }
        }
        Self::from_tensor(n, h, c).expect("length is n³ by construction")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `h_{ij}^{k*}`.
    pub fn h(&self, i: usize, j: usize, k: usize) -> f64 {
        self.h[(i * self.n + j) * self.n + k]
    }

    pub fn tensor(&self) -> &[f64] {
        &self.h
    }

    pub fn hr(&self) -> &[f64] {
        &self.hr
    }

    /// Components of the mean curvature vector on `J e_1 … J e_n` (equal to `H_r`).
    pub fn h_vec(&self) -> &[f64] {
        &self.hr
    }

    /// `H = |H⃗|`.
    pub fn mean_curvature(&self) -> f64 {
        self.mean_curvature
    }

    /// `n² H²`.
    pub fn n2h2(&self) -> f64 {
        let n = self.n as f64;
        n * n * self.mean_curvature * self.mean_curvature
    }

    /// `S = Σ (h_{ij}^{k*})²`.
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Largest total-symmetry defect relative to `max(1, max |h|)`.
    pub fn symmetry_residual(&self) -> f64 {
        self.symmetry_residual
    }

    /// Same data expressed in the frame `e'_a = Σ_i q[(i, a)] e_i` (normals follow via `J`).
    pub fn rotated(&self, q: &DMatrix<f64>) -> Self {
        let n = self.n;
        let mut h = vec![0.0; n * n * n];
        // Contract one index at a time.
        let mut tmp = self.h.clone();
        for axis in 0..3 {
            for (slot, out) in h.iter_mut().enumerate() {
                let (i, j, k) = (slot / (n * n), (slot / n) % n, slot % n);
                let mut acc = 0.0;
                for m in 0..n {
                    let src = match axis {
                        0 => (m * n + j) * n + k,
                        1 => (i * n + m) * n + k,
                        _ => (i * n + j) * n + m,
                    };
                    let a = [i, j, k][axis];
                    acc += q[(m, a)] * tmp[src];
                }
                *out = acc;
            }
            tmp.copy_from_slice(&h);
        }
        Self::from_tensor(n, h, self.c).expect("length preserved")
    }
}

/// `g_ij = G(∂_i φ, ∂_j φ)`.
pub fn induced_metric(jet: &Jet2, space: &AmbientSpace) -> Result<DMatrix<f64>> {
    let big_g = space.metric_at(&jet.value)?;
    let g = jet.first.transpose() * &big_g * &jet.first;
    let g = (&g + g.transpose()) * 0.5;
    let min_eigenvalue = g.clone().symmetric_eigen().eigenvalues.min();
    if !(min_eigenvalue >= RANK_FLOOR) {
        return Err(Error::RankDeficient { min_eigenvalue });
    }
    Ok(g)
}

/// Adapted frame from Gram–Schmidt in coordinate order `∂₁, …, ∂_n`.
pub fn adapted_frame(jet: &Jet2, space: &AmbientSpace) -> Result<PointFrame> {
    let order: Vec<usize> = (0..jet.chart_dim()).collect();
    adapted_frame_ordered(jet, space, &order)
}

/// Adapted frame from Gram–Schmidt of `∂_{order[0]}, ∂_{order[1]}, …`.
pub fn adapted_frame_ordered(jet: &Jet2, space: &AmbientSpace, order: &[usize]) -> Result<PointFrame> {
    let n = jet.chart_dim();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::Dimension(format!("{order:?} is not a permutation of 0..{n}")));
    }
    induced_metric(jet, space)?;
    let big_g = space.metric_at(&jet.value)?;
    let mut coeffs = DMatrix::zeros(n, n);
    let mut tangent: Vec<DVector<f64>> = Vec::with_capacity(n);
    for (slot, &a) in order.iter().enumerate() {
        let mut v = jet.first.column(a).into_owned();
        let mut c = DVector::zeros(n);
        c[a] = 1.0;
        // modified Gram-Schmidt, two passes
        for _ in 0..2 {
            for (k, e) in tangent.iter().enumerate() {
                let p = e.dot(&(&big_g * &v));
                v -= e * p;
                c -= coeffs.column(k) * p;
            }
        }
        let norm = v.dot(&(&big_g * &v)).sqrt();
        if !(norm > RANK_FLOOR.sqrt()) {
            return Err(Error::RankDeficient {
                min_eigenvalue: norm * norm,
            });
        }
        coeffs.set_column(slot, &(c / norm));
        tangent.push(v / norm);
    }
    let tangent: Vec<Vec<f64>> = tangent.into_iter().map(|v| v.as_slice().to_vec()).collect();
    let normal = tangent
        .iter()
        .map(|e| space.complex_structure_apply(e))
        .collect();
    Ok(PointFrame {
        base: jet.value.clone(),
        coeffs,
        tangent,
        normal,
    })
}

/// Orthonormality and Lagrangian defects of a frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameResiduals {
    /// `max |G(e_i, e_j) − δ_ij|` together with the same for `J e_i`.
    pub orthonormality: f64,
    /// `max |G(e_i, J e_j)|`.
    pub lagrangian: f64,
}

pub fn frame_residuals(frame: &PointFrame, space: &AmbientSpace) -> Result<FrameResiduals> {
    let g = space.metric_at(&frame.base)?;
    let n = frame.tangent.len();
    let mut orthonormality = 0.0f64;
    let mut lagrangian = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            let tt = bilinear(&g, &frame.tangent[i], &frame.tangent[j]);
            let nn = bilinear(&g, &frame.normal[i], &frame.normal[j]);
            let tn = bilinear(&g, &frame.tangent[i], &frame.normal[j]);
            orthonormality = orthonormality.max((tt - delta).abs()).max((nn - delta).abs());
            lagrangian = lagrangian.max(tn.abs());
        }
    }
    Ok(FrameResiduals {
        orthonormality,
        lagrangian,
    })
}

/// `D_{∂a} ∂b φ` for all `a ≤ b`, mirrored.
fn ambient_second_derivatives(jet: &Jet2, space: &AmbientSpace) -> Result<Vec<Vec<DVector<f64>>>> {
    let n = jet.chart_dim();
    let gamma = space.christoffel_at(&jet.value)?;
    let cols: Vec<Vec<f64>> = (0..n).map(|a| jet.partial(a)).collect();
    let mut out = vec![vec![DVector::zeros(jet.ambient_dim()); n]; n];
    for a in 0..n {
        for b in a..n {
            let corr = gamma.contract(&cols[a], &cols[b]);
            let v = DVector::from_vec(jet.second_partial(a, b)) + DVector::from_vec(corr);
            out[a][b] = v.clone();
            out[b][a] = v;
        }
    }
    Ok(out)
}

/// `Σ_ab C_ai C_bj V_ab`.
fn to_frame(coeffs: &DMatrix<f64>, v: &[Vec<DVector<f64>>], i: usize, j: usize) -> DVector<f64> {
    let n = coeffs.nrows();
    let mut out = DVector::zeros(v[0][0].len());
    for a in 0..n {
        for b in 0..n {
            let w = coeffs[(a, i)] * coeffs[(b, j)];
            if w != 0.0 {
                out.axpy(w, &v[a][b], 1.0);
            }
        }
    }
    out
}

/// Component of `y` orthogonal to the tangent space, from the Gram system of
/// the coordinate tangent vectors.
pub fn normal_part(jet: &Jet2, big_g: &DMatrix<f64>, g: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let rhs = jet.first.transpose() * (big_g * y);
    let x = g
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .unwrap_or_else(|| g.clone().lu().solve(&rhs).unwrap_or(rhs.clone() * 0.0));
    y - &jet.first * x
}

/// Coefficients `h_{ij}^{k*}` of the normal part of `D_{e_i} e_j` on `J e_k`.
pub fn second_fundamental_tensor(jet: &Jet2, space: &AmbientSpace, frame: &PointFrame) -> Result<FundamentalData> {
    let n = jet.chart_dim();
    let big_g = space.metric_at(&jet.value)?;
    let g = induced_metric(jet, space)?;
    let v = ambient_second_derivatives(jet, space)?;
    let normals: Vec<DVector<f64>> = frame
        .normal
        .iter()
        .map(|x| DVector::from_column_slice(x))
        .collect();
    let mut h = vec![0.0; n * n * n];
    for i in 0..n {
        for j in i..n {
            let w = to_frame(&frame.coeffs, &v, i, j);
            let perp = normal_part(jet, &big_g, &g, &w);
            let gp = &big_g * perp;
            for k in 0..n {
                let x = normals[k].dot(&gp);
                h[(i * n + j) * n + k] = x;
                h[(j * n + i) * n + k] = x;
            }
        }
    }
    let data = FundamentalData::from_tensor(n, h, space.c())?;
    if data.symmetry_residual > SYMMETRY_HARD_LIMIT {
        return Err(Error::SymmetryViolation {
            residual: data.symmetry_residual,
        });
    }
    Ok(data)
}

/// Checks `A_{JX}Y = −J h(X, Y) = A_{JY}X` on the frame and returns the largest defect.
///
/// `A_{Je_i} e_j` is the negative tangential part of `D_{e_j}(J e_i)`, taken
/// as `J ∂_{e_j} e_i + Γ(e_j, J e_i)`. The derivative of the frame
/// coefficients only contributes `J` of a tangent vector, which is normal and
/// has no tangential part.
pub fn check_shape_operator_identity(
    jet: &Jet2,
    space: &AmbientSpace,
    frame: &PointFrame,
    fund: &FundamentalData,
) -> Result<f64> {
    let n = jet.chart_dim();
    let big_g = space.metric_at(&jet.value)?;
    let gamma = space.christoffel_at(&jet.value)?;
    let second: Vec<Vec<DVector<f64>>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| DVector::from_vec(jet.second_partial(a, b)))
                .collect()
        })
        .collect();
    let tangents: Vec<DVector<f64>> = frame
        .tangent
        .iter()
        .map(|x| DVector::from_column_slice(x))
        .collect();
    // shape[i][j][k] = G(A_{Je_i} e_j, e_k)
    let mut shape = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let flat = to_frame(&frame.coeffs, &second, j, i);
            let mut d = DVector::from_vec(space.complex_structure_apply(flat.as_slice()));
            d += DVector::from_vec(gamma.contract(&frame.tangent[j], &frame.normal[i]));
            let gd = &big_g * d;
            for k in 0..n {
                shape[(i * n + j) * n + k] = -tangents[k].dot(&gd);
            }
        }
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let a = shape[(i * n + j) * n + k];
                // −J h(e_i, e_j) = Σ_k h_{ij}^{k*} e_k
                worst = worst
                    .max((a - fund.h(i, j, k)).abs())
                    .max((a - shape[(j * n + i) * n + k]).abs());
            }
        }
    }
    Ok(worst)
}

/// Everything the curvature and pinching checks need at one sampled point.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub frame: PointFrame,
    pub metric: DMatrix<f64>,
    pub fund: FundamentalData,
}

pub fn point_geometry(jet: &Jet2, space: &AmbientSpace) -> Result<PointGeometry> {
    let metric = induced_metric(jet, space)?;
    let frame = adapted_frame(jet, space)?;
    let fund = second_fundamental_tensor(jet, space, &frame)?;
    Ok(PointGeometry { frame, metric, fund })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersions::{immersion_jet, ImmersionSpec, SphereChart};

    #[test]
    fn geodesic_plane_is_flat_and_totally_geodesic() {
        let spec = ImmersionSpec::geodesic_plane(3).unwrap();
        let jet = immersion_jet(&spec, &[0.4, -0.2, 0.9], SphereChart::NORTH).unwrap();
        let g = induced_metric(&jet, spec.ambient()).unwrap();
        assert_eq!(g, DMatrix::identity(3, 3));
        let frame = adapted_frame(&jet, spec.ambient()).unwrap();
        for i in 0..3 {
            let mut e = vec![0.0; 6];
            e[2 * i] = 1.0;
            assert_eq!(frame.tangent[i], e);
            let mut je = vec![0.0; 6];
            je[2 * i + 1] = 1.0;
            assert_eq!(frame.normal[i], je);
        }
        let fund = second_fundamental_tensor(&jet, spec.ambient(), &frame).unwrap();
        assert_eq!((fund.s(), fund.mean_curvature()), (0.0, 0.0));
        let r = check_shape_operator_identity(&jet, spec.ambient(), &frame, &fund).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn from_tensor_rejects_bad_length() {
        assert!(FundamentalData::from_tensor(3, vec![0.0; 26], 0.0).is_err());
    }

    #[test]
    fn asymmetric_tensor_is_flagged() {
        let mut h = vec![0.0; 27];
        h[1] = 1.0; // h_{00}^{1*} without its partners
        let d = FundamentalData::from_tensor(3, h, 0.0).unwrap();
        assert!(d.symmetry_residual() >= 1.0);
    }

    #[test]
    fn mean_curvature_and_norm() {
        // h_{00}^{0*} = 3, h_{11}^{0*} = h_{01}^{1*} = 1
        let d = FundamentalData::symmetric_from_fn(2, 0.0, |i, j, k| match (i, j, k) {
            (0, 0, 0) => 3.0,
            (0, 1, 1) => 1.0,
            _ => 0.0,
        });
        assert_eq!(d.hr(), &[2.0, 0.0]);
        assert_eq!(d.mean_curvature(), 2.0);
        assert_eq!(d.s(), 9.0 + 3.0);
        assert_eq!(d.symmetry_residual(), 0.0);
    }

    #[test]
    fn rotation_preserves_invariants() {
        let d = FundamentalData::symmetric_from_fn(3, 0.0, |i, j, k| (i + 2 * j + 3 * k) as f64 - 2.5);
        let (c, s) = 0.3f64.sin_cos();
        let q = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        let r = d.rotated(&q);
        assert!((r.s() - d.s()).abs() < 1e-12);
        assert!((r.mean_curvature() - d.mean_curvature()).abs() < 1e-12);
        assert!(r.symmetry_residual() < 1e-14);
    }
}
