//! Second-order forward-mode differentiation of chart-to-ambient maps.
//!
//! Maps are written once against the [`Real`] trait and evaluated either on
//! plain `f64` (for values and the finite-difference oracle) or on [`Dual2`],
//! a truncated second-order Taylor number carrying a value, gradient and
//! Hessian with respect to the chart variables.

use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Smallest admissible argument for `sqrt` and real powers.
pub const POWER_DOMAIN_FLOOR: f64 = 1e-12;

/// Scalar arithmetic shared by `f64` and [`Dual2`].
pub trait Real:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// A constant with the same shape as `self`.
    fn lift(&self, c: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan(&self) -> Self;
    fn recip(&self) -> Self;
    fn sqrt(&self) -> Result<Self>;
    /// `self^p`, defined only for arguments at or above [`POWER_DOMAIN_FLOOR`].
    fn powf(&self, p: f64) -> Result<Self>;

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

fn check_positive(what: &'static str, x: f64) -> Result<()> {
    if x >= POWER_DOMAIN_FLOOR && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what, value: x })
    }
}

impl Real for f64 {
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn atan(&self) -> Self {
        f64::atan(*self)
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }
    fn sqrt(&self) -> Result<Self> {
        check_positive("sqrt", *self)?;
        Ok(f64::sqrt(*self))
    }
    fn powf(&self, p: f64) -> Result<Self> {
        check_positive("powf", *self)?;
        Ok(f64::powf(*self, p))
    }
}

/// Value, gradient and Hessian of a scalar with respect to `dim` chart variables.
///
/// The Hessian is stored row-major; every operation writes the upper triangle
/// and mirrors it, so it is symmetric bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual2 {
    v: f64,
    g: Vec<f64>,
    h: Vec<f64>,
}

impl Dual2 {
    pub fn constant(dim: usize, v: f64) -> Self {
        Self {
            v,
            g: vec![0.0; dim],
            h: vec![0.0; dim * dim],
        }
    }

    /// The `index`-th independent variable evaluated at `v`.
    pub fn variable(dim: usize, index: usize, v: f64) -> Self {
        let mut d = Self::constant(dim, v);
        d.g[index] = 1.0;
        d
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn grad(&self) -> &[f64] {
        &self.g
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.h[i * self.dim() + j]
    }

    /// Applies a scalar function with derivatives `(f, f', f'')` at `self.v`.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.dim();
        let g: Vec<f64> = self.g.iter().map(|gi| f1 * gi).collect();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let x = f1 * self.h[i * n + j] + f2 * self.g[i] * self.g[j];
                h[i * n + j] = x;
                h[j * n + i] = x;
            }
        }
        Self { v: f0, g, h }
    }
}

impl Add for Dual2 {
    type Output = Dual2;
    fn add(mut self, rhs: Dual2) -> Dual2 {
        self.v += rhs.v;
        self.g.iter_mut().zip(&rhs.g).for_each(|(a, b)| *a += b);
        self.h.iter_mut().zip(&rhs.h).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for Dual2 {
    type Output = Dual2;
    fn sub(mut self, rhs: Dual2) -> Dual2 {
        self.v -= rhs.v;
        self.g.iter_mut().zip(&rhs.g).for_each(|(a, b)| *a -= b);
        self.h.iter_mut().zip(&rhs.h).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Mul for Dual2 {
    type Output = Dual2;
    fn mul(self, rhs: Dual2) -> Dual2 {
        let n = self.dim();
        let g: Vec<f64> = self
            .g
            .iter()
            .zip(&rhs.g)
            .map(|(a, b)| self.v * b + rhs.v * a)
            .collect();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let x = self.v * rhs.h[i * n + j]
                    + rhs.v * self.h[i * n + j]
                    + (self.g[i] * rhs.g[j] + self.g[j] * rhs.g[i]);
                h[i * n + j] = x;
                h[j * n + i] = x;
            }
        }
        Dual2 {
            v: self.v * rhs.v,
            g,
            h,
        }
    }
}

impl Div for Dual2 {
    type Output = Dual2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Dual2) -> Dual2 {
        self * rhs.recip()
    }
}

impl Neg for Dual2 {
    type Output = Dual2;
    fn neg(mut self) -> Dual2 {
        self.v = -self.v;
        self.g.iter_mut().for_each(|a| *a = -*a);
        self.h.iter_mut().for_each(|a| *a = -*a);
        self
    }
}

impl Add<f64> for Dual2 {
    type Output = Dual2;
    fn add(mut self, rhs: f64) -> Dual2 {
        self.v += rhs;
        self
    }
}

impl Sub<f64> for Dual2 {
    type Output = Dual2;
    fn sub(mut self, rhs: f64) -> Dual2 {
        self.v -= rhs;
        self
    }
}

impl Mul<f64> for Dual2 {
    type Output = Dual2;
    fn mul(mut self, rhs: f64) -> Dual2 {
        self.v *= rhs;
        self.g.iter_mut().for_each(|a| *a *= rhs);
        self.h.iter_mut().for_each(|a| *a *= rhs);
        self
    }
}

impl Div<f64> for Dual2 {
    type Output = Dual2;
    fn div(mut self, rhs: f64) -> Dual2 {
        self.v /= rhs;
        self.g.iter_mut().for_each(|a| *a /= rhs);
        self.h.iter_mut().for_each(|a| *a /= rhs);
        self
    }
}

impl Real for Dual2 {
    fn lift(&self, c: f64) -> Self {
        Dual2::constant(self.dim(), c)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn sin(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn atan(&self) -> Self {
        let d = 1.0 + self.v * self.v;
        self.chain(self.v.atan(), 1.0 / d, -2.0 * self.v / (d * d))
    }
    fn recip(&self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
    fn sqrt(&self) -> Result<Self> {
        check_positive("sqrt", self.v)?;
        let s = self.v.sqrt();
        Ok(self.chain(s, 0.5 / s, -0.25 / (s * self.v)))
    }
    fn powf(&self, p: f64) -> Result<Self> {
        check_positive("powf", self.v)?;
        let x = self.v;
        Ok(self.chain(
            x.powf(p),
            p * x.powf(p - 1.0),
            p * (p - 1.0) * x.powf(p - 2.0),
        ))
    }
}

/// A map from an `n`-dimensional chart into `m` real ambient coordinates.
pub trait ChartMap {
    fn chart_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn eval<T: Real>(&self, u: &[T]) -> Result<Vec<T>>;
}

/// Value, first and second partial derivatives of a chart map at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub point: Vec<f64>,
    pub value: Vec<f64>,
    /// `m × n`, `first[(a, i)] = ∂_i φ^a`.
    pub first: DMatrix<f64>,
    /// One symmetric `n × n` Hessian per ambient coordinate.
    pub second: Vec<DMatrix<f64>>,
}

impl Jet2 {
    pub fn chart_dim(&self) -> usize {
        self.point.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.value.len()
    }

    /// Column `i` of the first-derivative matrix as a vector.
    pub fn partial(&self, i: usize) -> Vec<f64> {
        self.first.column(i).iter().copied().collect()
    }

    /// `∂_i ∂_j φ` as an ambient vector.
    pub fn second_partial(&self, i: usize, j: usize) -> Vec<f64> {
        self.second.iter().map(|h| h[(i, j)]).collect()
    }

    /// Chain rule: the jet of `outer ∘ inner`, where `outer` was taken at
    /// `inner.value`.
    pub fn compose(outer: &Jet2, inner: &Jet2) -> Result<Jet2> {
        if outer.chart_dim() != inner.ambient_dim() {
            return Err(Error::Dimension(format!(
                "outer jet expects {} inputs, inner jet produces {}",
                outer.chart_dim(),
                inner.ambient_dim()
            )));
        }
        let n = inner.chart_dim();
        let first = &outer.first * &inner.first;
        let second = outer
            .second
            .iter()
            .enumerate()
            .map(|(a, ho)| {
                let mut out = inner.first.transpose() * ho * &inner.first;
                for (b, hi) in inner.second.iter().enumerate() {
                    out += hi * outer.first[(a, b)];
                }
                symmetrize(&mut out, n);
                out
            })
            .collect();
        Ok(Jet2 {
            point: inner.point.clone(),
            value: outer.value.clone(),
            first,
            second,
        })
    }

    /// Largest absolute difference over value, first and second derivatives.
    pub fn max_abs_diff(&self, other: &Jet2) -> f64 {
        let v = self
            .value
            .iter()
            .zip(&other.value)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let f = (&self.first - &other.first).abs().max();
        let s = self
            .second
            .iter()
            .zip(&other.second)
            .map(|(a, b)| (a - b).abs().max())
            .fold(0.0, f64::max);
        v.max(f).max(s)
    }

    /// Largest `|second[a][i][j] - second[a][j][i]|`.
    pub fn hessian_asymmetry(&self) -> f64 {
        self.second
            .iter()
            .map(|h| (h - h.transpose()).abs().max())
            .fold(0.0, f64::max)
    }
}

fn symmetrize(m: &mut DMatrix<f64>, n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            let x = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
}

/// Exact (to rounding) value, gradient and Hessian of every ambient coordinate.
pub fn eval_jet<M: ChartMap>(map: &M, point: &[f64]) -> Result<Jet2> {
    let n = map.chart_dim();
    if point.len() != n {
        return Err(Error::Dimension(format!(
            "chart point has length {}, map expects {}",
            point.len(),
            n
        )));
    }
    let vars: Vec<Dual2> = point
        .iter()
        .enumerate()
        .map(|(i, &x)| Dual2::variable(n, i, x))
        .collect();
    let out = map.eval(&vars)?;
    let m = out.len();
    let mut first = DMatrix::zeros(m, n);
    let mut second = Vec::with_capacity(m);
    for (a, d) in out.iter().enumerate() {
        for i in 0..n {
            first[(a, i)] = d.g[i];
        }
        second.push(DMatrix::from_row_slice(n, n, &d.h));
    }
    Ok(Jet2 {
        point: point.to_vec(),
        value: out.iter().map(|d| d.v).collect(),
        first,
        second,
    })
}

/// Central-difference jet, `O(step²)` truncation error.
///
/// Test oracle only: roundoff in the second differences grows like
/// `ε·|φ| / step²`.
pub fn finite_difference_jet<M: ChartMap>(map: &M, point: &[f64], step: f64) -> Result<Jet2> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Domain {
            what: "finite difference step",
            value: step,
        });
    }
    let n = map.chart_dim();
    if point.len() != n {
        return Err(Error::Dimension(format!(
            "chart point has length {}, map expects {}",
            point.len(),
            n
        )));
    }
    let at = |offsets: &[(usize, f64)]| -> Result<Vec<f64>> {
        let mut p = point.to_vec();
        for &(i, d) in offsets {
            p[i] += d;
        }
        map.eval(&p)
    };
    let center = at(&[])?;
    let m = center.len();
    let plus: Vec<Vec<f64>> = (0..n).map(|i| at(&[(i, step)])).collect::<Result<_>>()?;
    let minus: Vec<Vec<f64>> = (0..n).map(|i| at(&[(i, -step)])).collect::<Result<_>>()?;

    let mut first = DMatrix::zeros(m, n);
    let mut second = vec![DMatrix::zeros(n, n); m];
    for i in 0..n {
        for a in 0..m {
            first[(a, i)] = (plus[i][a] - minus[i][a]) / (2.0 * step);
            second[a][(i, i)] = (plus[i][a] - 2.0 * center[a] + minus[i][a]) / (step * step);
        }
        for j in (i + 1)..n {
            let pp = at(&[(i, step), (j, step)])?;
            let pm = at(&[(i, step), (j, -step)])?;
            let mp = at(&[(i, -step), (j, step)])?;
            let mm = at(&[(i, -step), (j, -step)])?;
            for a in 0..m {
                let x = (pp[a] - pm[a] - mp[a] + mm[a]) / (4.0 * step * step);
                second[a][(i, j)] = x;
                second[a][(j, i)] = x;
            }
        }
    }
    Ok(Jet2 {
        point: point.to_vec(),
        value: center,
        first,
        second,
    })
}
