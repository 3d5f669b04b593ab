//! Batch drivers: sample points on a family, run every check, and reduce the
//! results into a [`Report`].

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::curvature::{
    gauss_curvature, intrinsic_curvature_oracle, min_isotropic_excess, pinching_slack, ricci,
    CurvatureTensor, IsotropicCoefficients,
};
use crate::error::{Error, Result};
use crate::fundforms::{
    adapted_frame_ordered, check_shape_operator_identity, frame_residuals, point_geometry,
    second_fundamental_tensor, FundamentalData,
};
use crate::identities::{check_identities, IdentityCheck};
use crate::immersions::{immersion_jet, sample_sphere_point, Family, ImmersionSpec, Pole, SphereChart};
use crate::optimize::{random_frame, random_unit};
use crate::pinching::{castro_q_bound, castro_ratio, pinching_ratio_threshold, verdict, PinchVerdict};
use crate::report::{records_to_csv, to_canonical_json};

pub const SCHEMA_VERSION: u32 = 1;
pub const SYMMETRY_TOL: f64 = 1e-9;
pub const FRAME_TOL: f64 = 1e-9;
pub const SHAPE_OPERATOR_TOL: f64 = 1e-6;
pub const CURVATURE_ALGEBRA_TOL: f64 = 1e-10;
pub const FRAME_INDEPENDENCE_TOL: f64 = 1e-8;
/// Inequalities are checked as `gap ≥ −INEQUALITY_TOL·(1 + S)`.
pub const INEQUALITY_TOL: f64 = 1e-9;
pub const ISOTROPIC_MIN_TOL: f64 = 1e-8;
pub const OPTIMIZER_BOUND_TOL: f64 = 1e-12;
/// Below this `n²H²` the ratio `S/(n²H²)` is not reported.
pub const MINIMAL_N2H2: f64 = 1e-12;
pub const MAX_RESAMPLES: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Whitney,
    Castro,
    WhitneyCp,
    GeodesicPlane,
    Identities,
    Frames,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Index-based parameter grid `min + i·step` for `i = 0, 1, …` up to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.min + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub target: Target,
    /// `None` means the target's default dimension(s).
    pub n: Option<usize>,
    pub q: f64,
    pub theta: f64,
    pub samples: usize,
    pub seed: u64,
    /// Overrides the family tolerance (and the verdict tolerance).
    pub tol: Option<f64>,
    pub oracle_tol: f64,
    /// Number of leading sample points that also run the finite-difference curvature oracle.
    pub oracle_points: usize,
    /// Random probes per point for the frame-wise inequalities.
    pub frames: usize,
    /// Optimizer restarts for the isotropic minimum; 0 disables it.
    pub restarts: usize,
    pub trials: usize,
    pub grid: Option<Grid>,
    /// Worker threads; not part of the report because results do not depend on it.
    #[serde(skip)]
    pub threads: Option<usize>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            target: Target::Whitney,
            n: None,
            q: 3.0,
            theta: 0.5,
            samples: 100,
            seed: 42,
            tol: None,
            oracle_tol: 1e-4,
            oracle_points: 20,
            frames: 8,
            restarts: 4,
            trials: 1000,
            grid: None,
            threads: None,
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn for_target(target: Target) -> Self {
        Self {
            target,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if let Some(n) = self.n {
            if n < 3 {
                return bad(format!("--n must be at least 3 (got {n})"));
            }
        }
        if self.samples == 0 {
            return bad("--samples must be at least 1".into());
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("--tol must be a positive number (got {t})"));
            }
        }
        if !(self.oracle_tol > 0.0) {
            return bad(format!("oracle tolerance must be positive (got {})", self.oracle_tol));
        }
        if self.target == Target::Castro && self.grid.is_none() && !(self.q > 1.0 && self.q.is_finite()) {
            return bad(format!("--q must be greater than 1 for the Castro family (got {})", self.q));
        }
        if self.target == Target::WhitneyCp && self.grid.is_none() && !(self.theta >= 0.0 && self.theta.is_finite()) {
            return bad(format!("--theta must be nonnegative (got {})", self.theta));
        }
        if matches!(self.target, Target::Identities | Target::Frames) && self.trials == 0 {
            return bad("--trials must be at least 1".into());
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return bad("--threads must be at least 1".into());
            }
        }
        if let Some(g) = self.grid {
            if !(g.step > 0.0 && g.step.is_finite()) {
                return bad(format!("grid step must be positive (got {})", g.step));
            }
            if !(g.max >= g.min) || !g.min.is_finite() || !g.max.is_finite() {
                return bad(format!("grid needs finite min ≤ max (got {} .. {})", g.min, g.max));
            }
            match self.target {
                Target::Castro if g.min <= 1.0 => {
                    return bad(format!("--q-min must be greater than 1 (got {})", g.min))
                }
                Target::WhitneyCp if g.min < 0.0 => {
                    return bad(format!("--theta-min must be nonnegative (got {})", g.min))
                }
                Target::Castro | Target::WhitneyCp => {}
                other => return bad(format!("no parameter scan for {other:?}")),
            }
        }
        Ok(())
    }

    fn dimension(&self) -> usize {
        self.n.unwrap_or(3)
    }

    fn family_tol(&self) -> f64 {
        self.tol.unwrap_or(match self.target {
            Target::WhitneyCp => 1e-6,
            _ => 1e-8,
        })
    }

    fn spec_for(&self, param: Option<f64>) -> Result<ImmersionSpec> {
        let n = self.dimension();
        match self.target {
            Target::Whitney => ImmersionSpec::whitney(n),
            Target::Castro => ImmersionSpec::castro(n, param.unwrap_or(self.q)),
            Target::WhitneyCp => ImmersionSpec::whitney_cp(n, param.unwrap_or(self.theta)),
            Target::GeodesicPlane => ImmersionSpec::geodesic_plane(n),
            other => Err(Error::Config(format!("{other:?} is not an immersion family"))),
        }
    }
}

/// Everything measured at one sampled point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    /// Rejected draws before this point was accepted.
    pub resamples: u32,
    pub point: Vec<f64>,
    pub chart: Pole,
    pub verdict: PinchVerdict,
    pub n2h2: f64,
    /// `S/(n²H²)`, absent when `n²H²` is negligible.
    pub ratio: Option<f64>,
    /// `|S(n+2)/(3n²H²) − 1|` for the Whitney families.
    pub equality_residual: Option<f64>,
    /// `|S/(n²H²) − castro_ratio(n, q)|` for the Castro family.
    pub castro_residual: Option<f64>,
    pub symmetry_residual: f64,
    pub orthonormality_residual: f64,
    pub lagrangian_residual: f64,
    pub shape_operator_residual: f64,
    pub frame_independence_residual: f64,
    /// Curvature symmetry and Bianchi defects relative to `1 + max |R|`.
    pub curvature_symmetry_residual: f64,
    pub bianchi_residual: f64,
    pub oracle_residual: Option<f64>,
    /// `6n²H²/(2n+3) + 2c − S`.
    pub pinching_slack: f64,
    /// Smallest `(R(u,v,u,v) − slack/2)/(1+S)` over frame pairs and random pairs.
    pub r1212_gap: f64,
    /// Smallest `(Ric(u) − (n−1)·slack/2)/(1+S)`.
    pub ricci_gap: f64,
    /// Smallest `(excess − (1+λ²+μ²+λ²μ²)·slack/2)/(1+S)` over random probes.
    pub isotropic_frame_gap: Option<f64>,
    /// Smallest isotropic excess among the random probes.
    pub probe_min_excess: Option<f64>,
    pub min_isotropic_excess: Option<f64>,
}

fn relative_to(x: f64, scale: f64) -> f64 {
    x / (1.0 + scale)
}

fn probe_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f00d_cafe_d00d);
    rng.set_stream(stream);
    rng
}

/// Frame-wise inequality residuals of a curvature tensor built from `fund`.
struct FrameGaps {
    r1212: f64,
    ricci: f64,
    isotropic: Option<f64>,
    probe_min: Option<f64>,
}

fn frame_gaps(rt: &CurvatureTensor, fund: &FundamentalData, c: f64, probes: usize, rng: &mut ChaCha8Rng) -> FrameGaps {
    let n = fund.n();
    let s = fund.s();
    let slack = pinching_slack(fund, c);
    let mut r1212 = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            r1212 = r1212.min(rt.get(i, j, i, j) - 0.5 * slack);
        }
    }
    let mut ric = f64::INFINITY;
    let ricci_floor = 0.5 * (n as f64 - 1.0) * slack;
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        ric = ric.min(ricci(rt, &e) - ricci_floor);
    }
    let mut isotropic = None;
    let mut probe_min = None;
    for _ in 0..probes {
        let pair = random_frame(rng, n, 2);
        let (u, v): (Vec<f64>, Vec<f64>) = (
            pair.column(0).iter().copied().collect(),
            pair.column(1).iter().copied().collect(),
        );
        r1212 = r1212.min(rt.contract(&u, &v, &u, &v) - 0.5 * slack);
        ric = ric.min(ricci(rt, &random_unit(rng, n)) - ricci_floor);
        if n >= 4 {
            let frame = random_frame(rng, n, 4);
            let lambda: f64 = rng.random_range(-1.0..=1.0);
            let mu: f64 = rng.random_range(-1.0..=1.0);
            let excess = IsotropicCoefficients::on_frame(rt, &frame).excess(lambda, mu);
            let weight = (1.0 + lambda * lambda) * (1.0 + mu * mu);
            let gap = excess - 0.5 * weight * slack;
            isotropic = Some(isotropic.map_or(gap, |g: f64| g.min(gap)));
            probe_min = Some(probe_min.map_or(excess, |g: f64| g.min(excess)));
        }
    }
    FrameGaps {
        r1212: relative_to(r1212, s),
        ricci: relative_to(ric, s),
        isotropic: isotropic.map(|g| relative_to(g, s)),
        probe_min,
    }
}

fn recoverable(e: &Error) -> bool {
    matches!(
        e,
        Error::Domain { .. } | Error::PivotUnstable { .. } | Error::RankDeficient { .. }
    )
}

/// Evaluates every pointwise check of `spec` at sample `index`, resampling
/// the point on recoverable domain errors.
pub fn evaluate_point(spec: &ImmersionSpec, cfg: &RunConfig, index: usize) -> Result<PointRecord> {
    let mut last = None;
    for attempt in 0..MAX_RESAMPLES {
        let x = sample_sphere_point(spec.n(), cfg.seed, index as u64, attempt);
        match evaluate_at(spec, cfg, index, x.coords(), SphereChart::for_point(&x)) {
            Ok(mut rec) => {
                rec.resamples = attempt;
                return Ok(rec);
            }
            Err(e) if recoverable(&e) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn evaluate_at(spec: &ImmersionSpec, cfg: &RunConfig, index: usize, x: &[f64], chart: SphereChart) -> Result<PointRecord> {
    let n = spec.n();
    let space = spec.ambient();
    let c = space.c();
    let sphere = crate::immersions::SpherePoint::new(x.to_vec())?;
    let u = chart.from_sphere(&sphere)?;
    let jet = immersion_jet(spec, &u, chart)?;
    let geo = point_geometry(&jet, space)?;
    let fund = &geo.fund;
    let tol = cfg.family_tol();

    let residuals = frame_residuals(&geo.frame, space)?;
    let shape = check_shape_operator_identity(&jet, space, &geo.frame, fund)?;
    let reversed: Vec<usize> = (0..n).rev().collect();
    let alt_frame = adapted_frame_ordered(&jet, space, &reversed)?;
    let alt = second_fundamental_tensor(&jet, space, &alt_frame)?;
    let frame_independence = relative_to(
        (alt.s() - fund.s())
            .abs()
            .max((alt.mean_curvature() - fund.mean_curvature()).abs()),
        fund.s(),
    );

    let rt = gauss_curvature(fund, c);
    let rscale = rt.max_abs();
    let oracle_residual = if index < cfg.oracle_points {
        let oracle = intrinsic_curvature_oracle(spec, &u, chart)?;
        Some(relative_to(oracle.max_abs_diff(&rt), rscale))
    } else {
        None
    };

    let n2h2 = fund.n2h2();
    let s = fund.s();
    let ratio = (n2h2 > MINIMAL_N2H2).then(|| s / n2h2);
    let equality_residual = match spec.family() {
        Family::WhitneyC | Family::WhitneyCp { .. } => {
            ratio.map(|r| (r * (n as f64 + 2.0) / 3.0 - 1.0).abs())
        }
        _ => None,
    };
    let castro_residual = match spec.family() {
        Family::Castro { q } => match ratio {
            Some(r) => Some((r - castro_ratio(n, q)?).abs()),
            None => None,
        },
        _ => None,
    };

    let mut rng = probe_rng(cfg.seed, index as u64);
    let gaps = frame_gaps(&rt, fund, c, cfg.frames, &mut rng);
    let min_excess = if n >= 4 && cfg.restarts > 0 {
        let seed = cfg.seed.wrapping_add(index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        Some(min_isotropic_excess(&rt, cfg.restarts, seed)?.0)
    } else {
        None
    };

    Ok(PointRecord {
        index,
        resamples: 0,
        point: x.to_vec(),
        chart: chart.pole,
        verdict: verdict(fund, n, c, tol),
        n2h2,
        ratio,
        equality_residual,
        castro_residual,
        symmetry_residual: fund.symmetry_residual(),
        orthonormality_residual: residuals.orthonormality,
        lagrangian_residual: residuals.lagrangian,
        shape_operator_residual: shape,
        frame_independence_residual: frame_independence,
        curvature_symmetry_residual: relative_to(rt.symmetry_residual(), rscale),
        bianchi_residual: relative_to(rt.bianchi_residual(), rscale),
        oracle_residual,
        pinching_slack: pinching_slack(fund, c),
        r1212_gap: gaps.r1212,
        ricci_gap: gaps.ricci,
        isotropic_frame_gap: gaps.isotropic,
        probe_min_excess: gaps.probe_min,
        min_isotropic_excess: min_excess,
    })
}

/// Random-tensor record for the unconditional frame inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameTrialRecord {
    pub n: usize,
    pub trial: usize,
    pub c: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub n2h2: f64,
    pub pinching_slack: f64,
    pub r1212_gap: f64,
    pub ricci_gap: f64,
    pub isotropic_frame_gap: Option<f64>,
}

/// A random totally symmetric tensor in a random frame, checked against the
/// `R₁₂₁₂`, Ricci and isotropic frame inequalities.
pub fn frame_trial(n: usize, seed: u64, trial: usize, probes: usize) -> FrameTrialRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | trial as u64);
    let scale: f64 = rng.random_range(0.1..3.0);
    let c: f64 = rng.random_range(0.0..1.0);
    let mut values = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let v: f64 = rng.sample(StandardNormal);
                values.insert((i, j, k), scale * v);
            }
        }
    }
    let base = FundamentalData::symmetric_from_fn(n, c, |i, j, k| values[&(i, j, k)]);
    let q: DMatrix<f64> = random_frame(&mut rng, n, n);
    let fund = base.rotated(&q);
    let rt = gauss_curvature(&fund, c);
    let gaps = frame_gaps(&rt, &fund, c, probes.max(1), &mut rng);
    FrameTrialRecord {
        n,
        trial,
        c,
        s: fund.s(),
        n2h2: fund.n2h2(),
        pinching_slack: pinching_slack(&fund, c),
        r1212_gap: gaps.r1212,
        ricci_gap: gaps.ricci,
        isotropic_frame_gap: gaps.isotropic,
    }
}

/// Outcome of one check over all records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    /// `"max"`: the worst value must not exceed `tolerance`;
    /// `"min"`: the worst value must not fall below `−tolerance`.
    pub kind: String,
    pub worst: f64,
    pub tolerance: f64,
    pub count: usize,
    pub passed: bool,
}

fn max_check(values: impl IntoIterator<Item = f64>, tolerance: f64) -> Option<CheckSummary> {
    let (mut worst, mut count) = (f64::NEG_INFINITY, 0);
    let mut nan = false;
    for v in values {
        nan |= v.is_nan();
        worst = worst.max(v);
        count += 1;
    }
    (count > 0).then(|| CheckSummary {
        kind: "max".into(),
        worst,
        tolerance,
        count,
        passed: !nan && worst <= tolerance,
    })
}

fn min_check(values: impl IntoIterator<Item = f64>, tolerance: f64) -> Option<CheckSummary> {
    let (mut worst, mut count) = (f64::INFINITY, 0);
    let mut nan = false;
    for v in values {
        nan |= v.is_nan();
        worst = worst.min(v);
        count += 1;
    }
    (count > 0).then(|| CheckSummary {
        kind: "min".into(),
        worst,
        tolerance,
        count,
        passed: !nan && worst >= -tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: BTreeMap<String, CheckSummary>,
    /// Scalar reductions (min/max gaps, counts).
    pub stats: BTreeMap<String, f64>,
    pub passed: bool,
}

impl Summary {
    fn new(checks: BTreeMap<String, Option<CheckSummary>>, stats: BTreeMap<String, f64>) -> Self {
        let checks: BTreeMap<String, CheckSummary> =
            checks.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect();
        let passed = checks.values().all(|c| c.passed);
        Self { checks, stats, passed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub provenance: Provenance,
    pub records: Vec<Value>,
    pub summary: Summary,
}

impl Report {
    fn new<T: Serialize>(command: &str, cfg: &RunConfig, records: &[T], summary: Summary) -> Result<Self> {
        let records = records
            .iter()
            .map(|r| serde_json::to_value(r).map_err(|e| Error::Io(e.to_string())))
            .collect::<Result<_>>()?;
        Ok(Self {
            schema: SCHEMA_VERSION,
            provenance: Provenance {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: command.into(),
                seed: cfg.seed,
                config: cfg.clone(),
            },
            records,
            summary,
        })
    }

    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    /// 0 when every enabled check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Result<String> {
        to_canonical_json(self)
    }

    pub fn to_csv(&self) -> Result<String> {
        records_to_csv(&self.records)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn point_records(spec: &ImmersionSpec, cfg: &RunConfig) -> Result<Vec<PointRecord>> {
    (0..cfg.samples)
        .into_par_iter()
        .map(|i| evaluate_point(spec, cfg, i))
        .collect()
}

fn opt<'a>(records: &'a [PointRecord], f: impl Fn(&PointRecord) -> Option<f64> + 'a) -> impl Iterator<Item = f64> + 'a {
    records.iter().filter_map(f)
}

/// Checks and statistics over per-point records.
pub fn summarize_points(spec: &ImmersionSpec, cfg: &RunConfig, records: &[PointRecord]) -> Summary {
    let tol = cfg.family_tol();
    let mut checks = BTreeMap::new();
    let mut add = |name: &str, c: Option<CheckSummary>| {
        checks.insert(name.to_string(), c);
    };
    let scaled = |r: &PointRecord, x: f64| x / (1.0 + r.verdict.s);
    add(
        "lower_bound",
        min_check(records.iter().map(|r| scaled(r, r.verdict.lower_gap)), INEQUALITY_TOL),
    );
    match spec.family() {
        Family::WhitneyC | Family::WhitneyCp { .. } => {
            add("whitney_equality", max_check(opt(records, |r| r.equality_residual), tol));
        }
        Family::Castro { .. } => {
            add("castro_ratio", max_check(opt(records, |r| r.castro_residual), tol));
        }
        Family::TotallyGeodesicPlane => {
            add("totally_geodesic", max_check(records.iter().map(|r| r.verdict.s), tol));
        }
    }
    add("symmetry", max_check(records.iter().map(|r| r.symmetry_residual), SYMMETRY_TOL));
    add("orthonormality", max_check(records.iter().map(|r| r.orthonormality_residual), FRAME_TOL));
    add("lagrangian", max_check(records.iter().map(|r| r.lagrangian_residual), FRAME_TOL));
    add(
        "shape_operator",
        max_check(records.iter().map(|r| r.shape_operator_residual), SHAPE_OPERATOR_TOL),
    );
    add(
        "frame_independence",
        max_check(records.iter().map(|r| r.frame_independence_residual), FRAME_INDEPENDENCE_TOL),
    );
    add(
        "curvature_symmetries",
        max_check(records.iter().map(|r| r.curvature_symmetry_residual), CURVATURE_ALGEBRA_TOL),
    );
    add("bianchi", max_check(records.iter().map(|r| r.bianchi_residual), CURVATURE_ALGEBRA_TOL));
    add("curvature_oracle", max_check(opt(records, |r| r.oracle_residual), cfg.oracle_tol));
    add("r1212_bound", min_check(records.iter().map(|r| r.r1212_gap), INEQUALITY_TOL));
    add("ricci_bound", min_check(records.iter().map(|r| r.ricci_gap), INEQUALITY_TOL));
    add("isotropic_frame_bound", min_check(opt(records, |r| r.isotropic_frame_gap), INEQUALITY_TOL));
    // the isotropic minimum is only forced nonnegative where the pinching slack is
    add(
        "isotropic_nonnegative",
        min_check(
            opt(records, |r| r.min_isotropic_excess.filter(|_| r.pinching_slack >= 0.0)),
            ISOTROPIC_MIN_TOL,
        ),
    );
    add(
        "optimizer_upper_bound",
        max_check(
            opt(records, |r| match (r.min_isotropic_excess, r.probe_min_excess) {
                (Some(m), Some(p)) => Some(m - p),
                _ => None,
            }),
            OPTIMIZER_BOUND_TOL,
        ),
    );

    let mut stats = BTreeMap::new();
    let fold = |f: &dyn Fn(&PointRecord) -> f64, min: bool| {
        records
            .iter()
            .map(f)
            .fold(if min { f64::INFINITY } else { f64::NEG_INFINITY }, |a, b| if min { a.min(b) } else { a.max(b) })
    };
    stats.insert("points".into(), records.len() as f64);
    stats.insert("resamples".into(), records.iter().map(|r| r.resamples as f64).sum());
    stats.insert("min_lower_gap".into(), fold(&|r| r.verdict.lower_gap, true));
    stats.insert("max_lower_gap".into(), fold(&|r| r.verdict.lower_gap, false));
    stats.insert("min_upper_gap".into(), fold(&|r| r.verdict.upper_gap, true));
    stats.insert("max_upper_gap".into(), fold(&|r| r.verdict.upper_gap, false));
    stats.insert("min_S".into(), fold(&|r| r.verdict.s, true));
    stats.insert("max_S".into(), fold(&|r| r.verdict.s, false));
    stats.insert("min_pinching_slack".into(), fold(&|r| r.pinching_slack, true));
    stats.insert(
        "points_satisfying_1_4".into(),
        records.iter().filter(|r| r.verdict.satisfies_1_4).count() as f64,
    );
    stats.insert(
        "points_satisfying_1_5".into(),
        records.iter().filter(|r| r.verdict.satisfies_1_5).count() as f64,
    );
    if let Some(m) = opt(records, |r| r.min_isotropic_excess).reduce(f64::min) {
        stats.insert("min_isotropic_excess".into(), m);
    }
    Summary::new(checks, stats)
}

/// Runs the pointwise verification of one family, the exact identity suite,
/// or the random frame-inequality suite, according to `cfg.target`.
pub fn run_verify(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    if cfg.grid.is_some() {
        return Err(Error::Config("grid parameters belong to `scan`, not `verify`".into()));
    }
    with_threads(cfg.threads, || match cfg.target {
        Target::Identities => verify_identities(cfg),
        Target::Frames => verify_frames(cfg),
        _ => {
            let spec = cfg.spec_for(None)?;
            let records = point_records(&spec, cfg)?;
            let summary = summarize_points(&spec, cfg, &records);
            Report::new("verify", cfg, &records, summary)
        }
    })?
}

fn verify_identities(cfg: &RunConfig) -> Result<Report> {
    let dims: Vec<usize> = match cfg.n {
        Some(n) => vec![n],
        None => (3..=7).collect(),
    };
    let records: Vec<IdentityCheck> = dims
        .iter()
        .map(|&n| check_identities(n, cfg.trials, cfg.seed))
        .collect::<Result<_>>()?;
    let mut checks = BTreeMap::new();
    checks.insert(
        "exact_identities".to_string(),
        max_check(records.iter().map(|r| r.failures() as f64), 0.0),
    );
    let mut stats = BTreeMap::new();
    stats.insert("trials".into(), (cfg.trials * dims.len()) as f64);
    stats.insert("failures".into(), records.iter().map(|r| r.failures() as f64).sum());
    Report::new("verify", cfg, &records, Summary::new(checks, stats))
}

fn verify_frames(cfg: &RunConfig) -> Result<Report> {
    let dims: Vec<usize> = match cfg.n {
        Some(n) => vec![n],
        None => (3..=5).collect(),
    };
    let jobs: Vec<(usize, usize)> = dims
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let records: Vec<FrameTrialRecord> = jobs
        .par_iter()
        .map(|&(n, t)| frame_trial(n, cfg.seed, t, cfg.frames))
        .collect();
    let mut checks = BTreeMap::new();
    checks.insert("r1212_bound".to_string(), min_check(records.iter().map(|r| r.r1212_gap), INEQUALITY_TOL));
    checks.insert("ricci_bound".to_string(), min_check(records.iter().map(|r| r.ricci_gap), INEQUALITY_TOL));
    checks.insert(
        "isotropic_frame_bound".to_string(),
        min_check(records.iter().filter_map(|r| r.isotropic_frame_gap), INEQUALITY_TOL),
    );
    let mut stats = BTreeMap::new();
    stats.insert("trials".into(), records.len() as f64);
    Report::new("verify", cfg, &records, Summary::new(checks, stats))
}

/// One grid point of a parameter scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub index: usize,
    pub parameter: String,
    pub value: f64,
    /// Predicted `S/(n²H²)` (Castro only).
    pub ratio: Option<f64>,
    /// `3/(n + 3/2)` for flat ambient space.
    pub threshold: Option<f64>,
    /// Predicted pinching verdict (Castro only).
    pub admissible: Option<bool>,
    pub q_bound: Option<f64>,
    pub points: usize,
    pub resamples: u32,
    pub measured_ratio_min: Option<f64>,
    pub measured_ratio_max: Option<f64>,
    pub max_ratio_residual: Option<f64>,
    pub max_equality_residual: Option<f64>,
    pub measured_admissible: bool,
    pub min_upper_gap: f64,
    pub min_lower_gap: f64,
    pub max_s: f64,
    pub max_mean_curvature: f64,
}

/// Sweeps `q` (Castro) or `θ` (Whitney in `ℂPⁿ`) over `cfg.grid`.
pub fn run_scan(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let grid = cfg
        .grid
        .ok_or_else(|| Error::Config("scan needs a parameter grid".into()))?;
    if !matches!(cfg.target, Target::Castro | Target::WhitneyCp) {
        return Err(Error::Config("scan supports castro and whitney-cp".into()));
    }
    let n = cfg.dimension();
    let values = grid.points();
    with_threads(cfg.threads, || -> Result<Report> {
        let per_value: Vec<(ScanRecord, Vec<PointRecord>)> = values
            .par_iter()
            .enumerate()
            .map(|(index, &value)| {
                let spec = cfg.spec_for(Some(value))?;
                let pts = point_records(&spec, cfg)?;
                let ratios: Vec<f64> = pts.iter().filter_map(|r| r.ratio).collect();
                let castro = cfg.target == Target::Castro;
                let predicted = if castro { Some(castro_ratio(n, value)?) } else { None };
                let threshold = castro.then(|| pinching_ratio_threshold(n));
                let max_f = |it: &mut dyn Iterator<Item = f64>| it.reduce(f64::max);
                let record = ScanRecord {
                    index,
                    parameter: if castro { "q" } else { "theta" }.into(),
                    value,
                    ratio: predicted,
                    threshold,
                    admissible: predicted.zip(threshold).map(|(r, t)| r <= t),
                    q_bound: if castro { Some(castro_q_bound(n)?) } else { None },
                    points: pts.len(),
                    resamples: pts.iter().map(|r| r.resamples).sum(),
                    measured_ratio_min: ratios.iter().copied().reduce(f64::min),
                    measured_ratio_max: ratios.iter().copied().reduce(f64::max),
                    max_ratio_residual: max_f(&mut pts.iter().filter_map(|r| r.castro_residual)),
                    max_equality_residual: max_f(&mut pts.iter().filter_map(|r| r.equality_residual)),
                    measured_admissible: pts.iter().all(|r| r.verdict.satisfies_1_5),
                    min_upper_gap: pts.iter().map(|r| r.verdict.upper_gap).fold(f64::INFINITY, f64::min),
                    min_lower_gap: pts.iter().map(|r| r.verdict.lower_gap).fold(f64::INFINITY, f64::min),
                    max_s: pts.iter().map(|r| r.verdict.s).fold(0.0, f64::max),
                    max_mean_curvature: pts.iter().map(|r| r.verdict.h).fold(0.0, f64::max),
                };
                Ok((record, pts))
            })
            .collect::<Result<_>>()?;

        let tol = cfg.family_tol();
        let records: Vec<ScanRecord> = per_value.iter().map(|(r, _)| r.clone()).collect();
        let all_points: Vec<&PointRecord> = per_value.iter().flat_map(|(_, p)| p).collect();
        let mut checks = BTreeMap::new();
        checks.insert(
            "lower_bound".to_string(),
            min_check(
                all_points.iter().map(|r| r.verdict.lower_gap / (1.0 + r.verdict.s)),
                INEQUALITY_TOL,
            ),
        );
        checks.insert(
            "symmetry".to_string(),
            max_check(all_points.iter().map(|r| r.symmetry_residual), SYMMETRY_TOL),
        );
        if cfg.target == Target::Castro {
            checks.insert(
                "castro_ratio".to_string(),
                max_check(records.iter().filter_map(|r| r.max_ratio_residual), tol),
            );
            checks.insert(
                "verdict_consistency".to_string(),
                max_check(
                    records
                        .iter()
                        .map(|r| (r.admissible != Some(r.measured_admissible)) as u8 as f64),
                    0.0,
                ),
            );
        } else {
            checks.insert(
                "whitney_equality".to_string(),
                max_check(records.iter().filter_map(|r| r.max_equality_residual), tol),
            );
        }
        let mut stats = BTreeMap::new();
        stats.insert("grid_points".into(), records.len() as f64);
        if let Some(flip) = records
            .windows(2)
            .find(|w| w[0].admissible == Some(true) && w[1].admissible == Some(false))
        {
            stats.insert("flip_lower".into(), flip[0].value);
            stats.insert("flip_upper".into(), flip[1].value);
        }
        Report::new("scan", cfg, &records, Summary::new(checks, stats))
    })?
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(target: Target) -> RunConfig {
        RunConfig {
            samples: 4,
            oracle_points: 2,
            restarts: 1,
            frames: 4,
            trials: 20,
            ..RunConfig::for_target(target)
        }
    }

    #[test]
    fn grid_is_index_based() {
        let g = Grid {
            min: 1.1,
            max: 6.0,
            step: 0.1,
        };
        let pts = g.points();
        assert_eq!(pts.len(), 50);
        assert_eq!(pts[43], 1.1 + 43.0 * 0.1);
        assert!((pts[49] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig { samples: 0, ..small(Target::Whitney) }.validate().is_err());
        assert!(RunConfig { q: 1.0, ..small(Target::Castro) }.validate().is_err());
        assert!(RunConfig { tol: Some(0.0), ..small(Target::Whitney) }.validate().is_err());
        assert!(RunConfig { n: Some(2), ..small(Target::Whitney) }.validate().is_err());
        assert!(RunConfig { theta: -0.1, ..small(Target::WhitneyCp) }.validate().is_err());
        let g = Some(Grid { min: 0.5, max: 2.0, step: 0.1 });
        assert!(RunConfig { grid: g, ..small(Target::Castro) }.validate().is_err());
        assert!(RunConfig { grid: g, ..small(Target::Whitney) }.validate().is_err());
        assert!(small(Target::Whitney).validate().is_ok());
    }

    #[test]
    fn whitney_small_run_passes() {
        let report = run_verify(&small(Target::Whitney)).unwrap();
        assert!(report.passed(), "{:#?}", report.summary);
        assert_eq!(report.records.len(), 4);
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn geodesic_plane_is_flat() {
        let report = run_verify(&small(Target::GeodesicPlane)).unwrap();
        assert!(report.passed(), "{:#?}", report.summary);
        assert_eq!(report.summary.checks["totally_geodesic"].worst, 0.0);
    }

    #[test]
    fn summary_matches_records() {
        let cfg = small(Target::Castro);
        let report = run_verify(&cfg).unwrap();
        let worst = report
            .records
            .iter()
            .map(|r| r["castro_residual"].as_f64().unwrap())
            .fold(0.0, f64::max);
        assert_eq!(report.summary.checks["castro_ratio"].worst, worst);
    }

    #[test]
    fn failing_tolerance_fails_report() {
        let cfg = RunConfig {
            tol: Some(1e-300),
            ..small(Target::Castro)
        };
        let report = run_verify(&cfg).unwrap();
        assert!(!report.passed());
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn identities_and_frames_small() {
        let report = run_verify(&RunConfig { n: Some(4), ..small(Target::Identities) }).unwrap();
        assert!(report.passed());
        let report = run_verify(&small(Target::Frames)).unwrap();
        assert!(report.passed(), "{:#?}", report.summary);
        assert_eq!(report.records.len(), 60);
    }
}
