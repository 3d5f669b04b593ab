//! Pointwise pinching verdicts and the closed-form Castro family ratios.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fundforms::FundamentalData;

/// Predicted `S / (n²H²)` for the Castro sphere `Φ_q`: `(3n + q² + 2q − 2)/(n + q)²`.
pub fn castro_ratio(n: usize, q: f64) -> Result<f64> {
    if !(q > 1.0) {
        return Err(Error::Domain { what: "castro q", value: q });
    }
    if n < 3 {
        return Err(Error::Dimension(format!("castro family needs n ≥ 3, got {n}")));
    }
    let n = n as f64;
    Ok((3.0 * n + q * q + 2.0 * q - 2.0) / ((n + q) * (n + q)))
}

/// Largest `q` for which `Φ_q` satisfies `S ≤ 3n²H²/(n + 3/2)`:
/// `2 + (3 + √(3(2n² + n − 3)))/(2n − 3)`.
pub fn castro_q_bound(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain {
            what: "castro bound dimension",
            value: n as f64,
        });
    }
    let n = n as f64;
    Ok(2.0 + (3.0 + (3.0 * (2.0 * n * n + n - 3.0)).sqrt()) / (2.0 * n - 3.0))
}

/// `3/(n + 3/2)`, the pinching threshold for `S/(n²H²)` in flat ambient space.
pub fn pinching_ratio_threshold(n: usize) -> f64 {
    3.0 / (n as f64 + 1.5)
}

/// `3/(n + 2)`, the lower bound for `S/(n²H²)`.
pub fn lower_ratio_threshold(n: usize) -> f64 {
    3.0 / (n as f64 + 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinchVerdict {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub c: f64,
    pub n: usize,
    /// `S − 3n²H²/(n+2)`.
    pub lower_gap: f64,
    /// `3n²H²/(n+3/2) + 2c − S`.
    pub upper_gap: f64,
    pub satisfies_1_4: bool,
    pub satisfies_1_5: bool,
}

pub fn verdict(fund: &FundamentalData, n: usize, c: f64, tol: f64) -> PinchVerdict {
    let s = fund.s();
    let n2h2 = fund.n2h2();
    let nf = n as f64;
    let lower_gap = s - 3.0 * n2h2 / (nf + 2.0);
    let upper_gap = 3.0 * n2h2 / (nf + 1.5) + 2.0 * c - s;
    let slack = tol * (1.0 + s);
    PinchVerdict {
        s,
        h: fund.mean_curvature(),
        c,
        n,
        lower_gap,
        upper_gap,
        satisfies_1_4: lower_gap >= -slack,
        satisfies_1_5: upper_gap >= -slack,
    }
}
