//! Experiment drivers behind the `qharm` commands.
//!
//! Each command reads a JSON config and produces a JSON report. Random
//! ensembles are drawn sequentially from a seeded ChaCha8 stream and then
//! evaluated in parallel, so reports depend only on the config. Exit codes:
//! 0 when every check passed, 1 when a check failed or a precondition was
//! violated, 2 when the config could not be parsed or describes an invalid
//! domain.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::axial::{algebra_mul, AxialElement, AxialValidation, GeneratorSpec};
use crate::calculus::{f1_residuals, Residual, F1_NAMES};
use crate::domain::{Domain, DomainSpec, Shape};
use crate::ensemble::{
    prng, random_harmonic, random_interior_point, random_planar_element, random_quaternion_field, random_scalar,
    random_vector,
};
use crate::error::{Error, Result};
use crate::fields::{Backend, QuaternionField, ScalarField, VectorField};
use crate::harmonic::{
    classify, default_tolerance, direct_product_residual, max_modulus_check, pure_forms, residual_product_general,
    residual_product_harmonic, subharmonic_mismatch_tolerance, subharmonicity, Classification, SubharmonicReport,
};
use crate::poly::Poly;
use crate::quaternion::{exact, ExactQuaternion};
use crate::spectrum::{scan_functionals, DiracFunctional, Functional, GeneratorPanel, ScanEntry};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Residuals below this count as exact when forming grid convergence ratios.
pub const EXACT_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyIdentities,
    BuildAlgebra,
    MaxPrinciple,
    Recover,
}

impl Command {
    pub const ALL: [Command; 4] =
        [Command::VerifyIdentities, Command::BuildAlgebra, Command::MaxPrinciple, Command::Recover];

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyIdentities => "verify-identities",
            Command::BuildAlgebra => "build-algebra",
            Command::MaxPrinciple => "max-principle",
            Command::Recover => "recover",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown command {s:?}")))
    }
}

/// Result of running a command: exit code, report text and diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Option<String>,
    pub message: Option<String>,
}

trait Verdict: Serialize {
    fn pass(&self) -> bool;
}

pub fn run(command: Command, config: &str) -> Outcome {
    match command {
        Command::VerifyIdentities => execute(config, verify_identities),
        Command::BuildAlgebra => execute(config, build_algebra),
        Command::MaxPrinciple => execute(config, max_principle),
        Command::Recover => execute(config, recover),
    }
}

fn execute<C: DeserializeOwned, R: Verdict>(config: &str, f: impl Fn(&C) -> Result<R>) -> Outcome {
    let failure = |exit_code, message: String| Outcome { exit_code, report: None, message: Some(message) };
    let cfg: C = match serde_json::from_str(config) {
        Ok(c) => c,
        Err(e) => return failure(EXIT_CONFIG, format!("config parse error: {e}")),
    };
    match f(&cfg) {
        Ok(report) => match serde_json::to_string_pretty(&report) {
            Ok(text) => Outcome {
                exit_code: if report.pass() { EXIT_PASS } else { EXIT_FAIL },
                report: Some(text + "\n"),
                message: None,
            },
            Err(e) => failure(EXIT_FAIL, e.to_string()),
        },
        Err(e @ (Error::InvalidDomain(_) | Error::Parse(_))) => failure(EXIT_CONFIG, format!("invalid config: {e}")),
        Err(e) => failure(EXIT_FAIL, e.to_string()),
    }
}

fn default_seed() -> u64 {
    1
}

fn default_degree() -> u32 {
    3
}

fn unit_ball_01() -> DomainSpec {
    DomainSpec::unit_ball(0.1)
}

fn unit_ball_005() -> DomainSpec {
    DomainSpec::unit_ball(0.05)
}

fn domain(spec: &DomainSpec) -> Result<Arc<Domain>> {
    Ok(Arc::new(Domain::new(spec.clone())?))
}

// ---------------------------------------------------------------------------
// verify-identities

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "unit_ball_01")]
    pub domain: DomainSpec,
    #[serde(default)]
    pub backend: Option<Backend>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Tuples per family; defaults to 200 (polynomial) or 4 (grid).
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default = "default_degree")]
    pub degree: u32,
    /// Polynomial backend: residual bound (default: exact zero).
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Grid backend: accepted band for the h / (h/2) residual ratio.
    #[serde(default = "default_ratio_band")]
    pub ratio_band: [f64; 2],
}

fn default_ratio_band() -> [f64; 2] {
    [3.0, 5.0]
}

pub const PRODUCT_NAMES: [&str; 6] = [
    "product_eps_general",
    "product_div_general",
    "product_eps_harmonic",
    "product_div_harmonic",
    "product_eps_pure",
    "product_div_pure",
];

/// One random tuple of the identity ensemble.
#[derive(Clone, Debug)]
pub enum IdentityTuple {
    /// `(u, v, a, b)` for the product rules.
    F1(VectorField, VectorField, ScalarField, ScalarField),
    /// `(p, q)` arbitrary, checked against the general formulas.
    General(QuaternionField, QuaternionField),
    /// Harmonic pair, checked against the harmonic-factor forms.
    Harmonic(QuaternionField, QuaternionField),
    /// Pure harmonic pair, checked against the pure forms.
    Pure(QuaternionField, QuaternionField),
}

impl IdentityTuple {
    pub fn sample_on(&self, d: &Arc<Domain>) -> Result<Self> {
        Ok(match self {
            IdentityTuple::F1(u, v, a, b) => {
                IdentityTuple::F1(u.sample_on(d)?, v.sample_on(d)?, a.sample_on(d)?, b.sample_on(d)?)
            }
            IdentityTuple::General(p, q) => IdentityTuple::General(p.sample_on(d)?, q.sample_on(d)?),
            IdentityTuple::Harmonic(p, q) => IdentityTuple::Harmonic(p.sample_on(d)?, q.sample_on(d)?),
            IdentityTuple::Pure(p, q) => IdentityTuple::Pure(p.sample_on(d)?, q.sample_on(d)?),
        })
    }

    /// Named `lhs - rhs` residual fields.
    pub fn residuals(&self) -> Result<Vec<(&'static str, Residual)>> {
        let product = |names: [&'static str; 2], p: &QuaternionField, q: &QuaternionField, rhs: (VectorField, ScalarField)| {
            let (eps, dv) = direct_product_residual(p, q)?;
            Ok(vec![
                (names[0], Residual::Vector(rhs.0.try_sub(&eps)?)),
                (names[1], Residual::Scalar(rhs.1.try_sub(&dv)?)),
            ])
        };
        match self {
            IdentityTuple::F1(u, v, a, b) => f1_residuals(u, v, a, b),
            IdentityTuple::General(p, q) => {
                product([PRODUCT_NAMES[0], PRODUCT_NAMES[1]], p, q, residual_product_general(p, q)?)
            }
            IdentityTuple::Harmonic(p, q) => {
                product([PRODUCT_NAMES[2], PRODUCT_NAMES[3]], p, q, residual_product_harmonic(p, q)?)
            }
            IdentityTuple::Pure(p, q) => product([PRODUCT_NAMES[4], PRODUCT_NAMES[5]], p, q, pure_forms(p, q)),
        }
    }
}

/// Seeded identity ensemble: `samples` tuples of each family, drawn in a
/// fixed order from one stream.
pub fn identity_ensemble(seed: u64, samples: usize, degree: u32, d: &Arc<Domain>) -> Result<Vec<IdentityTuple>> {
    let mut rng = prng(seed);
    let mut out = Vec::with_capacity(4 * samples);
    for _ in 0..samples {
        let (u, v) = (random_vector(&mut rng, d, degree)?, random_vector(&mut rng, d, degree)?);
        let (a, b) = (random_scalar(&mut rng, d, degree)?, random_scalar(&mut rng, d, degree)?);
        out.push(IdentityTuple::F1(u, v, a, b));
        let (p, q) = (random_quaternion_field(&mut rng, d, degree)?, random_quaternion_field(&mut rng, d, degree)?);
        out.push(IdentityTuple::General(p, q));
        out.push(IdentityTuple::Harmonic(random_harmonic(&mut rng, d, false)?, random_harmonic(&mut rng, d, false)?));
        out.push(IdentityTuple::Pure(random_harmonic(&mut rng, d, true)?, random_harmonic(&mut rng, d, true)?));
    }
    Ok(out)
}

fn identity_names() -> impl Iterator<Item = &'static str> {
    F1_NAMES.into_iter().chain(PRODUCT_NAMES)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactIdentity {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub exact: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSample {
    pub coarse: f64,
    pub fine: f64,
    /// `coarse / fine`, absent when the coarse residual is below the exact floor.
    pub ratio: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridIdentity {
    pub name: String,
    pub samples: Vec<RatioSample>,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "backend", rename_all = "lowercase")]
pub enum IdentityResults {
    Polynomial { identities: Vec<ExactIdentity> },
    Grid { h_coarse: f64, h_fine: f64, ratio_band: [f64; 2], identities: Vec<GridIdentity> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub command: Command,
    pub seed: u64,
    pub degree: u32,
    pub domain: DomainSpec,
    #[serde(flatten)]
    pub results: IdentityResults,
    pub pass: bool,
}

impl Verdict for VerifyReport {
    fn pass(&self) -> bool {
        self.pass
    }
}

pub fn verify_identities(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let d = domain(&cfg.domain)?;
    let backend = cfg.backend.unwrap_or(Backend::Polynomial);
    let samples = cfg.samples.unwrap_or(match backend {
        Backend::Polynomial => 200,
        Backend::Grid => 4,
    });
    let tuples = identity_ensemble(cfg.seed, samples, cfg.degree, &d)?;
    let results = match backend {
        Backend::Polynomial => verify_polynomial(&tuples, &d, cfg.tolerance)?,
        Backend::Grid => verify_grid(&tuples, &d, cfg.ratio_band)?,
    };
    let pass = match &results {
        IdentityResults::Polynomial { identities } => identities.iter().all(|i| i.pass),
        IdentityResults::Grid { identities, .. } => identities.iter().all(|i| i.pass),
    };
    Ok(VerifyReport { command: Command::VerifyIdentities, seed: cfg.seed, degree: cfg.degree, domain: cfg.domain.clone(), results, pass })
}

fn verify_polynomial(tuples: &[IdentityTuple], d: &Arc<Domain>, tol: Option<f64>) -> Result<IdentityResults> {
    let nodes = d.evaluation_nodes();
    let measured: Vec<Vec<(&str, f64, bool)>> = tuples
        .par_iter()
        .map(|t| {
            Ok(t.residuals()?
                .into_iter()
                .map(|(name, r)| {
                    let exact = r.is_identically_zero();
                    (name, if exact { 0.0 } else { r.max_on(&nodes) }, exact)
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let identities = identity_names()
        .map(|name| {
            let hits: Vec<_> = measured.iter().flatten().filter(|(n, ..)| *n == name).collect();
            let max_residual = hits.iter().map(|h| h.1).fold(0.0, f64::max);
            let exact = hits.iter().all(|h| h.2);
            ExactIdentity {
                name: name.to_string(),
                samples: hits.len(),
                max_residual,
                exact,
                pass: match tol {
                    None => exact,
                    Some(t) => max_residual <= t,
                },
            }
        })
        .collect();
    Ok(IdentityResults::Polynomial { identities })
}

/// Residual maxima at spacing `h` and `h/2`, both over nodes at depth `>= 2h`.
fn verify_grid(tuples: &[IdentityTuple], d: &Arc<Domain>, band: [f64; 2]) -> Result<IdentityResults> {
    let h = d.h();
    let fine = domain(&d.spec().with_h(h / 2.0))?;
    let coarse = domain(&d.spec().clone())?;
    let coarse_nodes = coarse.nodes_at_depth(2.0 * h);
    let fine_nodes = fine.nodes_at_depth(2.0 * h);
    let measured: Vec<Vec<(&str, f64, f64)>> = tuples
        .par_iter()
        .map(|t| {
            let rc = t.sample_on(&coarse)?.residuals()?;
            let rf = t.sample_on(&fine)?.residuals()?;
            Ok(rc
                .into_iter()
                .zip(rf)
                .map(|((name, c), (_, f))| (name, c.max_on(&coarse_nodes), f.max_on(&fine_nodes)))
                .collect())
        })
        .collect::<Result<_>>()?;
    let identities = identity_names()
        .map(|name| {
            let samples: Vec<RatioSample> = measured
                .iter()
                .flatten()
                .filter(|(n, ..)| *n == name)
                .map(|&(_, coarse, fine)| ratio_sample(coarse, fine, band))
                .collect();
            let ratios = samples.iter().filter_map(|s| s.ratio);
            let min_ratio = ratios.clone().reduce(f64::min);
            let max_ratio = ratios.reduce(f64::max);
            let pass = samples.iter().all(|s| s.pass);
            GridIdentity { name: name.to_string(), samples, min_ratio, max_ratio, pass }
        })
        .collect();
    Ok(IdentityResults::Grid { h_coarse: h, h_fine: h / 2.0, ratio_band: band, identities })
}

/// Convergence verdict for one residual measured at `h` and `h/2`.
pub fn ratio_sample(coarse: f64, fine: f64, band: [f64; 2]) -> RatioSample {
    if coarse <= EXACT_FLOOR {
        return RatioSample { coarse, fine, ratio: None, pass: fine <= EXACT_FLOOR };
    }
    let ratio = coarse / fine;
    RatioSample { coarse, fine, ratio: Some(ratio), pass: ratio >= band[0] && ratio <= band[1] }
}

// ---------------------------------------------------------------------------
// build-algebra

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildAlgebraConfig {
    #[serde(default = "unit_ball_01")]
    pub domain: DomainSpec,
    /// Planar elements are sampled onto the grid when `grid`; radial
    /// elements always live on the grid and force the same for all.
    #[serde(default)]
    pub backend: Option<Backend>,
    pub elements: Vec<GeneratorSpec>,
    /// Index pairs to multiply; defaults to every pair `i <= j`.
    #[serde(default)]
    pub products: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Directory receiving `element_<i>.csv` and `product_<i>_<j>.csv`.
    #[serde(default)]
    pub csv_dir: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElementRecord {
    pub index: usize,
    pub kind: String,
    pub generator: Vec<[f64; 2]>,
    pub validation: AxialValidation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductRecord {
    pub pair: [usize; 2],
    pub same_axis: bool,
    pub classification: Classification,
    pub epsilon_max: f64,
    pub div_max: f64,
    /// Same-axis products: the algebra product validates and equals the
    /// pointwise product. Absent for mixed-axis products, which are
    /// reported for information only.
    pub closure: Option<bool>,
    pub pointwise_mismatch: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BuildAlgebraReport {
    pub command: Command,
    pub backend: Backend,
    pub domain: DomainSpec,
    pub elements: Vec<ElementRecord>,
    pub products: Vec<ProductRecord>,
    pub pass: bool,
}

impl Verdict for BuildAlgebraReport {
    fn pass(&self) -> bool {
        self.pass
    }
}

pub fn build_algebra(cfg: &BuildAlgebraConfig) -> Result<BuildAlgebraReport> {
    let d = domain(&cfg.domain)?;
    let built = cfg.elements.iter().map(|s| s.build(&d)).collect::<Result<Vec<_>>>()?;
    let to_grid = cfg.backend == Some(Backend::Grid) || built.iter().any(|e| e.backend() == Backend::Grid);
    let elements: Vec<AxialElement> =
        built.into_iter().map(|e| if to_grid && e.backend() == Backend::Polynomial { e.sample() } else { e }).collect();
    let backend = if to_grid { Backend::Grid } else { Backend::Polynomial };

    let pairs = match &cfg.products {
        Some(p) => p.clone(),
        None => (0..elements.len()).flat_map(|i| (i..elements.len()).map(move |j| [i, j])).collect(),
    };
    if let Some(bad) = pairs.iter().flatten().find(|&&i| i >= elements.len()) {
        return Err(Error::Parse(format!("product index {bad} out of range")));
    }
    let tol_for = |p: &QuaternionField| cfg.tolerance.unwrap_or_else(|| default_tolerance(p));

    let records: Vec<ElementRecord> = elements
        .par_iter()
        .enumerate()
        .map(|(index, e)| ElementRecord {
            index,
            kind: e.axis().kind().to_string(),
            generator: e.generator().coeffs_f64(),
            validation: e.validate(tol_for(e.field())),
        })
        .collect();

    let products: Vec<(ProductRecord, QuaternionField)> = pairs
        .par_iter()
        .map(|&[i, j]| product_record(&elements[i], &elements[j], [i, j], &tol_for))
        .collect::<Result<_>>()?;

    if let Some(dir) = &cfg.csv_dir {
        let dir = Path::new(dir);
        std::fs::create_dir_all(dir)?;
        for (i, e) in elements.iter().enumerate() {
            e.field().write_csv(std::fs::File::create(dir.join(format!("element_{i}.csv")))?)?;
        }
        for (r, f) in &products {
            let [i, j] = r.pair;
            f.write_csv(std::fs::File::create(dir.join(format!("product_{i}_{j}.csv")))?)?;
        }
    }

    let pass = records.iter().all(|r| r.validation.pass) && products.iter().all(|(r, _)| r.closure != Some(false));
    Ok(BuildAlgebraReport {
        command: Command::BuildAlgebra,
        backend,
        domain: cfg.domain.clone(),
        elements: records,
        products: products.into_iter().map(|(r, _)| r).collect(),
        pass,
    })
}

fn product_record(
    p: &AxialElement,
    q: &AxialElement,
    pair: [usize; 2],
    tol_for: &(impl Fn(&QuaternionField) -> f64 + Sync),
) -> Result<(ProductRecord, QuaternionField)> {
    let pointwise = p.field().pointwise_product(q.field())?;
    let same_axis = p.axis() == q.axis();
    let tol = tol_for(&pointwise);
    let report = classify(&pointwise, tol);
    let (closure, pointwise_mismatch) = if same_axis {
        let prod = algebra_mul(p, q)?;
        let diff = prod.field().try_sub(&pointwise)?;
        let mismatch = if diff.is_identically_zero() {
            0.0
        } else {
            let nodes: Vec<usize> = (0..p.domain().node_count()).collect();
            diff.scalar().max_abs_on(&nodes).max(diff.vector().max_norm_on(&nodes))
        };
        let valid = prod.validate(tol_for(prod.field())).pass;
        (Some(valid && mismatch <= tol), Some(mismatch))
    } else {
        (None, None)
    };
    let record = ProductRecord {
        pair,
        same_axis,
        classification: report.classification,
        epsilon_max: report.epsilon_max,
        div_max: report.div_max,
        closure,
        pointwise_mismatch,
    };
    Ok((record, pointwise))
}

// ---------------------------------------------------------------------------
// max-principle

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxPrincipleConfig {
    #[serde(default = "unit_ball_005")]
    pub domain: DomainSpec,
    /// Backend for the subharmonicity check; default grid.
    #[serde(default)]
    pub backend: Option<Backend>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_count")]
    pub count: usize,
    /// Generator degree of the random planar elements.
    #[serde(default = "default_generator_degree")]
    pub degree: usize,
    /// Slack in `M_int <= M_bd + slack`; default `10 h`.
    #[serde(default)]
    pub slack: Option<f64>,
    /// Lower bound tolerance for `laplacian(|p|^2) >= -tol`.
    #[serde(default = "default_subharmonic_tol")]
    pub subharmonic_tolerance: f64,
    #[serde(default = "yes")]
    pub include_bump: bool,
    #[serde(default = "yes")]
    pub include_constant: bool,
}

fn default_count() -> usize {
    50
}

fn default_generator_degree() -> usize {
    2
}

fn default_subharmonic_tol() -> f64 {
    1e-8
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxPrincipleRecord {
    pub index: usize,
    pub label: String,
    pub expected_pass: bool,
    pub m_interior: f64,
    pub m_boundary: f64,
    pub slack: f64,
    /// Outcome of `M_int <= M_bd + slack`.
    pub max_principle: bool,
    pub subharmonic: Option<SubharmonicReport>,
    /// Every check matched its expectation.
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxPrincipleReport {
    pub command: Command,
    pub seed: u64,
    pub domain: DomainSpec,
    pub backend: Backend,
    pub records: Vec<MaxPrincipleRecord>,
    pub pass: bool,
}

impl Verdict for MaxPrincipleReport {
    fn pass(&self) -> bool {
        self.pass
    }
}

/// `{1 - |x - c|^2 / R^2, 0}` on a ball, or its analogue about the centre of
/// a box: a non-harmonic field with an interior maximum.
pub fn bump_fixture(d: &Arc<Domain>) -> Result<QuaternionField> {
    let c = d.center();
    let r2 = match d.shape() {
        Shape::Ball { radius, .. } => radius * radius,
        Shape::Box { .. } => d.max_distance_from(&c).powi(2),
    };
    let mut s = Poly::one();
    let inv = exact(1.0 / r2);
    for (i, ci) in c.iter().enumerate() {
        let t = &Poly::var(i) - &Poly::constant(exact(*ci));
        s = &s - &(&t * &t).scale(&inv);
    }
    QuaternionField::from_polys(d, s, [Poly::zero(), Poly::zero(), Poly::zero()])
}

pub fn max_principle(cfg: &MaxPrincipleConfig) -> Result<MaxPrincipleReport> {
    let d = domain(&cfg.domain)?;
    let backend = cfg.backend.unwrap_or(Backend::Grid);
    let slack = cfg.slack.unwrap_or(10.0 * d.h());
    let mut rng = prng(cfg.seed);
    let mut elements = Vec::with_capacity(cfg.count);
    for _ in 0..cfg.count {
        elements.push(random_planar_element(&mut rng, &d, cfg.degree)?);
    }
    let mut records: Vec<MaxPrincipleRecord> = elements
        .par_iter()
        .enumerate()
        .map(|(index, e)| {
            let e = match backend {
                Backend::Grid => e.sample(),
                Backend::Polynomial => e.clone(),
            };
            let m = max_modulus_check(e.field(), slack);
            let sub = subharmonicity(&e, cfg.subharmonic_tolerance, subharmonic_mismatch_tolerance(&e)?)?;
            Ok(MaxPrincipleRecord {
                index,
                label: format!("planar {:?} f={:?}", axis_of(&e), e.generator().coeffs_f64()),
                expected_pass: true,
                m_interior: m.m_interior,
                m_boundary: m.m_boundary,
                slack,
                max_principle: m.pass,
                pass: m.pass && sub.pass,
                subharmonic: Some(sub),
            })
        })
        .collect::<Result<_>>()?;

    let mut fixtures = Vec::new();
    if cfg.include_constant {
        let one = QuaternionField::constant_poly(&d, &ExactQuaternion::one());
        fixtures.push(("constant {1, 0}".to_string(), true, one));
    }
    if cfg.include_bump {
        fixtures.push(("bump {1 - |x - c|^2 / R^2, 0} (non-harmonic, expected to fail)".to_string(), false, bump_fixture(&d)?));
    }
    for (label, expected_pass, p) in fixtures {
        let p = match backend {
            Backend::Grid => p.sample(),
            Backend::Polynomial => p,
        };
        let m = max_modulus_check(&p, slack);
        records.push(MaxPrincipleRecord {
            index: records.len(),
            label,
            expected_pass,
            m_interior: m.m_interior,
            m_boundary: m.m_boundary,
            slack,
            max_principle: m.pass,
            subharmonic: None,
            pass: m.pass == expected_pass,
        });
    }
    let pass = records.iter().all(|r| r.pass);
    Ok(MaxPrincipleReport { command: Command::MaxPrinciple, seed: cfg.seed, domain: cfg.domain.clone(), backend, records, pass })
}

fn axis_of(e: &AxialElement) -> [f64; 3] {
    match e.axis() {
        crate::axial::AxisDescriptor::Planar(f) => f.omega(),
        crate::axial::AxisDescriptor::Radial { pole, .. } => *pole,
    }
}

// ---------------------------------------------------------------------------
// recover

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverConfig {
    #[serde(default = "unit_ball_01")]
    pub domain: DomainSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Number of seeded interior points when `points` is absent.
    #[serde(default = "default_point_count")]
    pub count: usize,
    #[serde(default)]
    pub points: Option<Vec<[f64; 3]>>,
    /// Extra candidate functionals; rejected ones produce warnings.
    #[serde(default)]
    pub functionals: Vec<Functional>,
    /// Panel axes; default the standard basis.
    #[serde(default)]
    pub axes: Option<[[f64; 3]; 3]>,
    #[serde(default = "default_recover_tol")]
    pub tolerance: f64,
    /// Also scan the Dirac functional of every domain node.
    #[serde(default)]
    pub scan: bool,
}

fn default_point_count() -> usize {
    100
}

fn default_recover_tol() -> f64 {
    1e-12
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoverEntry {
    /// `point`, `functional` or `node`.
    pub source: String,
    pub index: usize,
    #[serde(flatten)]
    pub scan: ScanEntry,
    pub recovery_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Warning {
    pub index: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoverReport {
    pub command: Command,
    pub seed: u64,
    pub domain: DomainSpec,
    pub tolerance: f64,
    pub entries: Vec<RecoverEntry>,
    pub max_recovery_error: f64,
    pub max_inconsistency: f64,
    pub warnings: Vec<Warning>,
    pub pass: bool,
}

impl Verdict for RecoverReport {
    fn pass(&self) -> bool {
        self.pass
    }
}

pub fn recover(cfg: &RecoverConfig) -> Result<RecoverReport> {
    let d = domain(&cfg.domain)?;
    let panel = match cfg.axes {
        Some(axes) => GeneratorPanel::new(axes, &d)?,
        None => GeneratorPanel::standard(&d)?,
    };
    let points = match &cfg.points {
        Some(p) => p.clone(),
        None => {
            let mut rng = prng(cfg.seed);
            (0..cfg.count).map(|_| random_interior_point(&mut rng, &d)).collect()
        }
    };
    let mut candidates: Vec<(&str, usize, Functional)> =
        points.iter().enumerate().map(|(i, m)| ("point", i, Functional::Dirac(DiracFunctional::at(*m)))).collect();
    candidates.extend(cfg.functionals.iter().cloned().enumerate().map(|(i, f)| ("functional", i, f)));
    if cfg.scan {
        candidates.extend(d.points().iter().enumerate().map(|(i, m)| ("node", i, Functional::Dirac(DiracFunctional::at(*m)))));
    }
    let functionals: Vec<Functional> = candidates.iter().map(|c| c.2.clone()).collect();
    let scanned = scan_functionals(&panel, &functionals, cfg.tolerance)?;

    let mut entries = Vec::with_capacity(scanned.len());
    let mut warnings = Vec::new();
    let mut pass = true;
    for ((source, index, theta), scan) in candidates.into_iter().zip(scanned) {
        let recovery_error = match &theta {
            Functional::Dirac(t) => {
                Some((0..3).map(|i| (scan.recovered_point[i] - t.m[i]).abs()).fold(0.0, f64::max))
            }
            Functional::Mixture(_) => None,
        };
        let ok = scan.passed
            && scan.inconsistency <= cfg.tolerance
            && recovery_error.is_none_or(|e| e <= cfg.tolerance);
        if source == "functional" {
            if !ok {
                warnings.push(Warning {
                    index,
                    message: format!(
                        "functional {index} is not in the spectrum: norm {:e}, multiplicativity residual {:e}, inconsistency {:e}",
                        scan.norm, scan.max_mult_residual, scan.inconsistency
                    ),
                });
            }
        } else {
            pass &= ok;
        }
        entries.push(RecoverEntry { source: source.to_string(), index, scan, recovery_error });
    }
    let dirac = entries.iter().filter(|e| e.source != "functional");
    let max_recovery_error = dirac.clone().filter_map(|e| e.recovery_error).fold(0.0, f64::max);
    let max_inconsistency = dirac.map(|e| e.scan.inconsistency).fold(0.0, f64::max);
    Ok(RecoverReport {
        command: Command::Recover,
        seed: cfg.seed,
        domain: cfg.domain.clone(),
        tolerance: cfg.tolerance,
        entries,
        max_recovery_error,
        max_inconsistency,
        warnings,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("nope".parse::<Command>().is_err());
    }

    #[test]
    fn malformed_config_exits_2() {
        for c in Command::ALL {
            let o = run(c, "{not json");
            assert_eq!(o.exit_code, EXIT_CONFIG);
            assert!(o.message.unwrap().contains("parse"));
        }
        let o = run(Command::Recover, r#"{"domain":{"shape":"ball","center":[0,0,0],"radius":-1,"h":0.1}}"#);
        assert_eq!(o.exit_code, EXIT_CONFIG);
        let o = run(Command::Recover, r#"{"unknown_field":1}"#);
        assert_eq!(o.exit_code, EXIT_CONFIG);
    }

    #[test]
    fn ratio_verdicts() {
        assert!(ratio_sample(4e-3, 1e-3, [3.0, 5.0]).pass);
        assert!(!ratio_sample(2e-3, 1e-3, [3.0, 5.0]).pass);
        let exact = ratio_sample(1e-13, 2e-13, [3.0, 5.0]);
        assert!(exact.pass && exact.ratio.is_none());
    }

    #[test]
    fn polynomial_identities_small() {
        let cfg: VerifyConfig = serde_json::from_str(r#"{"samples": 5}"#).unwrap();
        let r = verify_identities(&cfg).unwrap();
        assert!(r.pass);
        match r.results {
            IdentityResults::Polynomial { identities } => {
                assert_eq!(identities.len(), 12);
                assert!(identities.iter().all(|i| i.exact && i.samples == 5));
            }
            IdentityResults::Grid { .. } => unreachable!(),
        }
    }

    #[test]
    fn build_algebra_examples() {
        let cfg: BuildAlgebraConfig = serde_json::from_str(
            r#"{"elements":[
                {"kind":"planar","omega":[0,0,1],"coeffs":[[0,0],[1,0]]},
                {"kind":"planar","omega":[0,0,1],"coeffs":[[0,0],[0,0],[1,0]]},
                {"kind":"planar","omega":[0,0,1],"coeffs":[[0,0],[0,0],[0,0],[1,0]]}]}"#,
        )
        .unwrap();
        let r = build_algebra(&cfg).unwrap();
        assert!(r.pass);
        assert_eq!(r.products.len(), 6);
        assert!(r.products.iter().all(|p| p.closure == Some(true) && p.classification == Classification::PureHarmonic));

        let mixed: BuildAlgebraConfig = serde_json::from_str(
            r#"{"elements":[
                {"kind":"planar","omega":[0,0,1],"coeffs":[[0,0],[0,0],[1,0]]},
                {"kind":"planar","omega":[1,0,0],"coeffs":[[0,0],[1,0]]}],
                "products":[[0,1]]}"#,
        )
        .unwrap();
        let r = build_algebra(&mixed).unwrap();
        assert!(r.pass);
        assert_eq!(r.products[0].classification, Classification::NotHarmonic);
        assert!(r.products[0].epsilon_max > 0.0 && r.products[0].closure.is_none());

        let inside = r#"{"elements":[{"kind":"radial","pole":[0,0,0],"coeffs":[[0,0],[1,0]]}]}"#;
        let o = run(Command::BuildAlgebra, inside);
        assert_eq!(o.exit_code, EXIT_FAIL);
        assert!(o.message.unwrap().contains("pole"));
    }

    #[test]
    fn max_principle_fixtures() {
        let cfg: MaxPrincipleConfig =
            serde_json::from_str(r#"{"count":3}"#).unwrap();
        let r = max_principle(&cfg).unwrap();
        assert!(r.pass, "{r:#?}");
        let constant = r.records.iter().find(|r| r.label.starts_with("constant")).unwrap();
        assert_eq!(constant.m_interior, constant.m_boundary);
        let bump = r.records.iter().find(|r| r.label.starts_with("bump")).unwrap();
        assert!(!bump.max_principle && bump.pass);
    }

    #[test]
    fn recover_examples() {
        let r = recover(&serde_json::from_str(r#"{"count": 20}"#).unwrap()).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_recovery_error, 0.0);
        assert_eq!(r.entries.len(), 20);

        let r = recover(&serde_json::from_str(r#"{"points": []}"#).unwrap()).unwrap();
        assert!(r.pass && r.entries.is_empty());

        let adversarial = r#"{"points": [], "functionals": [
            {"kind":"mixture","points":[[0.5,0,0],[0,0.5,0]],"weights":[0.5,0.5]}]}"#;
        let o = run(Command::Recover, adversarial);
        assert_eq!(o.exit_code, EXIT_PASS);
        let report: serde_json::Value = serde_json::from_str(&o.report.unwrap()).unwrap();
        assert_eq!(report["warnings"].as_array().unwrap().len(), 1);
        assert_eq!(report["entries"][0]["passed"], false);
    }
}
