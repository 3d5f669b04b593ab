//! Derivative-free local search and orthonormal-frame charts.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    pub max_evals: usize,
    /// Stop once the spread of simplex values drops below this.
    pub f_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.25,
            max_evals: 2000,
            f_tol: 1e-13,
        }
    }
}

/// Minimizes `f` from `x0` with the standard reflection/expansion/contraction/shrink
/// coefficients (1, 2, ½, ½). Returns the best point and value seen.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> (Vec<f64>, f64) {
    let dim = x0.len();
    if dim == 0 {
        let v = f(x0);
        return (Vec::new(), v);
    }
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut evals = dim + 1;

    while evals < opts.max_evals {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if values[dim] - values[0] <= opts.f_tol {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|p| p[k]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = along(-1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                simplex[dim] = expanded;
                values[dim] = fe;
            } else {
                simplex[dim] = reflected;
                values[dim] = fr;
            }
            continue;
        }
        if fr < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[dim] {
            let p = along(-0.5);
            let v = f(&p);
            (p, v)
        } else {
            let p = along(0.5);
            let v = f(&p);
            (p, v)
        };
        evals += 1;
        if fc < values[dim].min(fr) {
            simplex[dim] = contracted;
            values[dim] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=dim {
            simplex[i] = best
                .iter()
                .zip(&simplex[i])
                .map(|(b, p)| b + 0.5 * (p - b))
                .collect();
            values[i] = f(&simplex[i]);
        }
        evals += dim;
    }
    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    (simplex[best].clone(), values[best])
}

/// Orthonormalizes the columns of `m` (modified Gram–Schmidt, two passes).
/// Returns `None` if the columns are numerically dependent.
pub fn orthonormalize_columns(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for _ in 0..2 {
            for k in 0..j {
                let p = q.column(k).dot(&q.column(j));
                let qk = q.column(k).into_owned();
                q.column_mut(j).axpy(-p, &qk, 1.0);
            }
        }
        let norm = q.column(j).norm();
        if norm < 1e-10 {
            return None;
        }
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    Some(q)
}

/// A uniformly random orthonormal `k`-frame in `ℝⁿ` (orthonormalized Gaussian matrix).
pub fn random_frame<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(n, k, |_, _| rng.sample::<f64, _>(StandardNormal));
        if let Some(q) = orthonormalize_columns(&m) {
            return q;
        }
    }
}

/// A random unit vector in `ℝⁿ`.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    random_frame(rng, n, 1).column(0).iter().copied().collect()
}

/// Local chart of the Stiefel manifold of orthonormal `k`-frames around a base frame.
///
/// Parameters fill a skew matrix `K` whose lower-right `(n−k)×(n−k)` block is
/// zero, giving `k(k−1)/2 + k(n−k)` coordinates; the frame is the first `k`
/// columns of `Q · cayley(K)`, where `Q` completes the base frame to an
/// orthonormal basis.
#[derive(Debug, Clone)]
pub struct FrameChart {
    basis: DMatrix<f64>,
    k: usize,
}

impl FrameChart {
    pub fn new(base: &DMatrix<f64>) -> Self {
        let (n, k) = base.shape();
        let mut cols: Vec<nalgebra::DVector<f64>> = base.column_iter().map(|c| c.into_owned()).collect();
        for e in 0..n {
            if cols.len() == n {
                break;
            }
            let mut v = nalgebra::DVector::zeros(n);
            v[e] = 1.0;
            for _ in 0..2 {
                for c in &cols {
                    let p = c.dot(&v);
                    v.axpy(-p, c, 1.0);
                }
            }
            let norm = v.norm();
            if norm > 1e-6 {
                cols.push(v / norm);
            }
        }
        Self {
            basis: DMatrix::from_columns(&cols),
            k,
        }
    }

    pub fn dim(&self) -> usize {
        let n = self.basis.nrows();
        self.k * (self.k - 1) / 2 + self.k * (n - self.k)
    }

    pub fn frame(&self, params: &[f64]) -> DMatrix<f64> {
        let n = self.basis.nrows();
        let k = self.k;
        let mut skew = DMatrix::zeros(n, n);
        let mut it = params.iter();
        for i in 0..k {
            for j in (i + 1)..k {
                let p = *it.next().expect("parameter count");
                skew[(i, j)] = p;
                skew[(j, i)] = -p;
            }
        }
        for r in k..n {
            for c in 0..k {
                let p = *it.next().expect("parameter count");
                skew[(r, c)] = p;
                skew[(c, r)] = -p;
            }
        }
        let eye = DMatrix::<f64>::identity(n, n);
        let lhs = &eye - &skew * 0.5;
        let rhs = &eye + &skew * 0.5;
        let cayley = lhs.lu().solve(&rhs).expect("I − K/2 is invertible for skew K");
        let full = &self.basis * cayley;
        full.columns(0, k).into_owned()
    }
}
