//! End-to-end pipelines and the serializable reports they produce.

use std::path::Path;

use num_rational::Ratio;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{tau_both, DirectionRate, DomainDescription};
use crate::error::{Error, Result};
use crate::geometry::{Classification, ExtremePoints, GeometrySummary};
use crate::model::{check_conditions, drift_vectors, Condition, ConditionReport, DriftVectors, ModelSpec};
use crate::network::{build_model, drift_inner_products, mt_bound, utilizations, MtBound, NetworkSpec};
use crate::stability::{assess, GeometricStability, StabilityVerdict};
use crate::verify::{
    fit_decay_with, fit_tail, simulate_with_burn_in, solve_truncated, FitMode, FitModel, FitOptions, SimResult,
    SlopeFit, TailSource, TruncatedChain,
};

/// Significant digits kept for every real in a report.
pub const SIG_DIGITS: usize = 12;
pub const COORDINATE_TOL: f64 = 0.03;
pub const DIRECTION_TOL: f64 = 0.05;
pub const MONTE_CARLO_TOL: f64 = 0.10;
/// Monte Carlo and truncated-chain marginal slopes must agree this closely.
pub const AGREEMENT_TOL: f64 = 0.05;
/// Monte Carlo levels enter a fit only while their tail count reaches this.
pub const MC_MIN_COUNT: u64 = 1000;
/// Denominator used when a decimal direction component is made rational.
pub const DECIMAL_DENOMINATOR: i64 = 1_000_000;

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_value(v: &mut serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// `value` with every real rounded to [`SIG_DIGITS`] significant digits.
pub fn rounded<T: Serialize + DeserializeOwned>(value: &T) -> Result<T> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(serde_json::from_value(v)?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Model(ModelSpec),
    Network(NetworkSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Model,
    Network,
}

impl Input {
    /// Network files are recognised by their `lambda` field, model files by `interior`.
    pub fn parse(text: &str, normalize: bool) -> Result<Input> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        match v.as_object() {
            Some(o) if o.contains_key("lambda") => Ok(Input::Network(NetworkSpec::from_file(
                serde_json::from_value(v)?,
                normalize,
            )?)),
            Some(o) if o.contains_key("interior") => Ok(Input::Model(ModelSpec::from_json(text)?)),
            _ => Err(Error::Parse(
                "expected a model file (interior, face1, face2, origin) or a network file (lambda, mu1, mu2, ...)"
                    .into(),
            )),
        }
    }

    pub fn load(path: impl AsRef<Path>, normalize: bool) -> Result<Input> {
        Input::parse(&std::fs::read_to_string(path)?, normalize)
    }

    pub fn kind(&self) -> InputKind {
        match self {
            Input::Model(_) => InputKind::Model,
            Input::Network(_) => InputKind::Network,
        }
    }

    pub fn model(&self) -> Result<ModelSpec> {
        match self {
            Input::Model(m) => Ok(m.clone()),
            Input::Network(n) => build_model(n),
        }
    }
}

/// A direction as given by the user, with exact components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionSpec {
    pub text: String,
    pub numer: [i64; 2],
    pub denom: [i64; 2],
    /// A decimal component was rounded to a multiple of `1 / DECIMAL_DENOMINATOR`.
    pub approximate: bool,
}

impl DirectionSpec {
    pub fn ratios(&self) -> [Ratio<i64>; 2] {
        [
            Ratio::new(self.numer[0], self.denom[0]),
            Ratio::new(self.numer[1], self.denom[1]),
        ]
    }

    pub fn integer(a: i64, b: i64) -> DirectionSpec {
        DirectionSpec {
            text: format!("{a},{b}"),
            numer: [a, b],
            denom: [1, 1],
            approximate: false,
        }
    }
}

fn parse_component(s: &str) -> Result<(Ratio<i64>, bool)> {
    let bad = || Error::Parse(format!("invalid direction component {s:?}"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok((Ratio::new(p, q), false));
    }
    if let Ok(n) = s.parse::<i64>() {
        return Ok((Ratio::from_integer(n), false));
    }
    let x: f64 = s.parse().map_err(|_| bad())?;
    if !x.is_finite() {
        return Err(bad());
    }
    let r = Ratio::new((x * DECIMAL_DENOMINATOR as f64).round() as i64, DECIMAL_DENOMINATOR);
    Ok((r, true))
}

/// Parses `"1,0;0,1;1/2,3"`. Decimal components become rationals over 10^6.
pub fn parse_directions(s: &str) -> Result<Vec<DirectionSpec>> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (a, b) = t
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("direction {t:?} must have two components")))?;
            let (ra, xa) = parse_component(a)?;
            let (rb, xb) = parse_component(b)?;
            let zero = Ratio::from_integer(0);
            if ra < zero || rb < zero || (ra == zero && rb == zero) {
                return Err(Error::Parse(format!(
                    "direction {t:?} must be non-negative and non-zero"
                )));
            }
            Ok(DirectionSpec {
                text: t.trim().to_string(),
                numer: [*ra.numer(), *rb.numer()],
                denom: [*ra.denom(), *rb.denom()],
                approximate: xa || xb,
            })
        })
        .collect()
}

pub fn default_directions() -> Vec<DirectionSpec> {
    vec![
        DirectionSpec::integer(1, 0),
        DirectionSpec::integer(0, 1),
        DirectionSpec::integer(1, 1),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Stable,
    Unstable,
    ConditionFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Stable => 0,
            Status::Unstable => 2,
            Status::ConditionFailure => 3,
        }
    }
}

/// Exit code for a pipeline error.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::SimultaneousArrivals => 4,
        Error::Unstable => 2,
        _ => 1,
    }
}

/// Machine-readable error written to stderr by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorPayload {
    pub error: String,
    pub message: String,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<String>,
}

impl ErrorPayload {
    pub fn from_error(e: &Error) -> ErrorPayload {
        let kind = format!("{e:?}");
        let kind = kind
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or("Error")
            .to_string();
        ErrorPayload {
            error: kind,
            message: e.to_string(),
            exit_code: error_exit_code(e),
            conditions: Vec::new(),
        }
    }

    pub fn from_report(r: &DecayReport) -> Option<ErrorPayload> {
        match r.status {
            Status::Stable => None,
            Status::Unstable => Some(ErrorPayload {
                error: "Unstable".into(),
                message: "the stability criterion fails; no stationary distribution".into(),
                exit_code: 2,
                conditions: Vec::new(),
            }),
            Status::ConditionFailure => {
                let conditions: Vec<String> = r.conditions.failures().iter().map(|c| condition_name(*c)).collect();
                Some(ErrorPayload {
                    error: "ConditionFailure".into(),
                    message: format!("standing condition(s) {} fail", conditions.join(", ")),
                    exit_code: 3,
                    conditions,
                })
            }
        }
    }
}

fn condition_name(c: Condition) -> String {
    let what = match c {
        Condition::WalkIrreducibleAperiodic => "interior walk irreducible and aperiodic",
        Condition::ReflectedIrreducibleAperiodic => "reflected walk irreducible and aperiodic",
        Condition::LightTails => "light-tailed jumps",
        Condition::NonZeroDrift => "non-zero interior drift",
    };
    format!("{} {what}", c.label())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub points: ExtremePoints,
    pub classification: Classification,
    pub center: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauReport {
    pub direct: [f64; 2],
    pub iteration: [f64; 2],
    pub classification: Option<Classification>,
    pub iterations: usize,
    pub max_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionReport {
    pub direction: DirectionSpec,
    pub rate: DirectionRate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkReport {
    pub utilizations: [f64; 2],
    pub inner_products: [f64; 2],
    /// A routing probability is zero.
    pub boundary_routing: bool,
    pub simultaneous_arrivals: bool,
    pub mt_bound: Option<MtBound>,
    pub mt_note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RowStatus {
    Pass,
    Fail,
    WindowTooNoisy,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub label: String,
    pub source: TailSource,
    /// The rate the fitted slope is compared with.
    pub reference: Option<f64>,
    pub fit: Option<SlopeFit>,
    pub relative_error: Option<f64>,
    pub tolerance: f64,
    pub status: RowStatus,
    pub detail: Option<String>,
}

impl OracleRow {
    fn from_fit(
        label: String,
        source: TailSource,
        reference: Option<f64>,
        tolerance: f64,
        fit: Result<SlopeFit>,
    ) -> OracleRow {
        let mut row = OracleRow {
            label,
            source,
            reference,
            fit: None,
            relative_error: None,
            tolerance,
            status: RowStatus::Error,
            detail: None,
        };
        match fit {
            Ok(f) => {
                if let Some(r) = reference {
                    let e = f.relative_error(r);
                    row.relative_error = Some(e);
                    row.status = if e <= tolerance {
                        RowStatus::Pass
                    } else {
                        RowStatus::Fail
                    };
                } else {
                    row.status = RowStatus::Pass;
                }
                row.fit = Some(f);
            }
            Err(Error::WindowTooNoisy { r_squared }) => {
                row.status = RowStatus::WindowTooNoisy;
                row.detail = Some(if r_squared.is_finite() {
                    format!(
                        "r^2 = {r_squared:.6} or fewer than {} window points",
                        crate::verify::MIN_POINTS
                    )
                } else {
                    "window too short to fit".into()
                });
            }
            Err(e) => row.detail = Some(e.to_string()),
        }
        row
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleTable {
    pub truncation: usize,
    pub solver_residual: f64,
    pub replications: usize,
    pub horizon: u64,
    pub seed: u64,
    pub rows: Vec<OracleRow>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub input: InputKind,
    pub status: Status,
    pub conditions: ConditionReport,
    pub drift: DriftVectors,
    pub stability: Option<StabilityVerdict>,
    pub geometric_stability: Option<GeometricStability>,
    pub geometry: Option<GeometryReport>,
    pub tau: Option<TauReport>,
    /// Coordinate decay rates `α_1`, `α_2`.
    pub alpha: Option<[f64; 2]>,
    pub directions: Vec<DirectionReport>,
    pub network: Option<NetworkReport>,
    pub oracle: Option<OracleTable>,
}

impl DecayReport {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<DecayReport> {
        Ok(serde_json::from_str(text)?)
    }
}

fn network_report(ns: &NetworkSpec, stable: bool) -> NetworkReport {
    let (r1, r2) = utilizations(ns);
    let mut out = NetworkReport {
        utilizations: [r1, r2],
        inner_products: drift_inner_products(ns),
        boundary_routing: ns.boundary_routing(),
        simultaneous_arrivals: ns.has_simultaneous_arrivals(),
        mt_bound: None,
        mt_note: None,
    };
    if !stable {
        out.mt_note = Some("network is unstable".into());
    } else {
        match mt_bound(ns) {
            Ok(b) => out.mt_bound = Some(b),
            Err(e) => out.mt_note = Some(e.to_string()),
        }
    }
    out
}

/// Conditions, stability, geometry, `τ`, coordinate and directional rates, and
/// for networks the geometric product-form bound.
pub fn analyze(input: &Input, directions: &[DirectionSpec]) -> Result<DecayReport> {
    Ok(analyze_model(input, directions)?.0)
}

fn analyze_model(
    input: &Input,
    directions: &[DirectionSpec],
) -> Result<(DecayReport, Option<ModelSpec>, Option<DomainDescription>)> {
    let model = input.model()?;
    let conditions = check_conditions(&model);
    let mut report = DecayReport {
        input: input.kind(),
        status: Status::ConditionFailure,
        drift: drift_vectors(&model),
        conditions,
        stability: None,
        geometric_stability: None,
        geometry: None,
        tau: None,
        alpha: None,
        directions: Vec::new(),
        network: None,
        oracle: None,
    };
    if !report.conditions.all_hold() {
        return Ok((rounded(&report)?, None, None));
    }
    let (verdict, geo) = assess(&model)?;
    let stable = verdict.stable;
    report.stability = Some(verdict);
    report.geometric_stability = Some(geo);
    if let Input::Network(ns) = input {
        report.network = Some(network_report(ns, stable));
    }
    if !stable {
        report.status = Status::Unstable;
        return Ok((rounded(&report)?, None, None));
    }
    report.status = Status::Stable;
    let g = GeometrySummary::compute(&model.surfaces())?;
    let (direct, iteration) = tau_both(&g)?;
    report.geometry = Some(GeometryReport {
        points: g.points.clone(),
        classification: g.classification,
        center: g.center,
    });
    report.tau = Some(TauReport {
        direct: direct.tau,
        iteration: iteration.tau,
        classification: direct.classification,
        iterations: iteration.iteration_trace.len(),
        max_difference: (direct.tau[0] - iteration.tau[0])
            .abs()
            .max((direct.tau[1] - iteration.tau[1]).abs()),
    });
    let dom = DomainDescription {
        geometry: g,
        tau: direct,
    };
    report.alpha = Some([dom.alpha_coordinate(1)?, dom.alpha_coordinate(2)?]);
    for d in directions {
        report.directions.push(DirectionReport {
            direction: d.clone(),
            rate: dom.alpha_rational(d.ratios())?,
        });
    }
    Ok((rounded(&report)?, Some(model), Some(dom)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub truncation: usize,
    pub replications: usize,
    pub horizon: u64,
    pub seed: u64,
    pub burn_in_fraction: f64,
    pub fit: FitOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            truncation: 80,
            replications: 200,
            horizon: 1_000_000,
            seed: 1,
            burn_in_fraction: crate::verify::BURN_IN_FRACTION,
            fit: FitOptions::default(),
        }
    }
}

/// Fit of an empirical marginal tail over levels `1..=` the last reliable level.
pub fn fit_monte_carlo(sim: &SimResult, k: usize) -> Result<SlopeFit> {
    let top = sim.reliable_level(k, MC_MIN_COUNT);
    let p = sim.tail_probability(k);
    let levels: Vec<f64> = (1..=top).map(|n| n as f64).collect();
    let tails: Vec<f64> = (1..=top).map(|n| p[n]).collect();
    let c = if k == 1 { [1.0, 0.0] } else { [0.0, 1.0] };
    fit_tail(
        FitMode::Direction { c, delta: Some(1.0) },
        &levels,
        &tails,
        FitModel::Linear,
    )
}

fn oracle_rows(
    chain: &TruncatedChain,
    sim: Option<&SimResult>,
    dom: &DomainDescription,
    report: &DecayReport,
    fit: &FitOptions,
) -> Vec<OracleRow> {
    let tau = dom.tau();
    let mut rows = Vec::new();
    for k in 1..=2 {
        for fixed in 0..3 {
            rows.push(OracleRow::from_fit(
                format!("tau_{k} | L_{}={fixed}", 3 - k),
                TailSource::Truncated,
                Some(tau[k - 1]),
                COORDINATE_TOL,
                fit_decay_with(chain, FitMode::Coordinate { k, fixed }, fit),
            ));
        }
    }
    for d in &report.directions {
        let r = &d.rate;
        rows.push(OracleRow::from_fit(
            format!("alpha_c c=({})", d.direction.text),
            TailSource::Truncated,
            Some(r.alpha),
            DIRECTION_TOL,
            fit_decay_with(
                chain,
                FitMode::Direction {
                    c: r.c,
                    delta: r.unit_delta,
                },
                fit,
            ),
        ));
    }
    if let (Some(sim), Some(alpha)) = (sim, report.alpha) {
        for k in 1..=2 {
            let mc = fit_monte_carlo(sim, k);
            rows.push(OracleRow::from_fit(
                format!("alpha_{k} marginal"),
                TailSource::Montecarlo,
                Some(alpha[k - 1]),
                MONTE_CARLO_TOL,
                mc.clone(),
            ));
            let c = if k == 1 { [1.0, 0.0] } else { [0.0, 1.0] };
            let truncated = fit_decay_with(chain, FitMode::Direction { c, delta: Some(1.0) }, fit);
            let row = match (mc, truncated) {
                (Ok(m), Ok(t)) => OracleRow::from_fit(
                    format!("alpha_{k} marginal, montecarlo vs truncated slope"),
                    TailSource::Montecarlo,
                    Some(-t.slope),
                    AGREEMENT_TOL,
                    Ok(m),
                ),
                (m, t) => OracleRow::from_fit(
                    format!("alpha_{k} marginal, montecarlo vs truncated slope"),
                    TailSource::Montecarlo,
                    None,
                    AGREEMENT_TOL,
                    m.and(t),
                ),
            };
            rows.push(row);
        }
    }
    rows
}

/// Oracle outputs behind a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRuns {
    pub chain: TruncatedChain,
    pub sim: Option<SimResult>,
}

/// [`analyze`] followed by both oracles and the comparison table.
pub fn verify(input: &Input, directions: &[DirectionSpec], opts: &VerifyOptions) -> Result<DecayReport> {
    Ok(verify_with_runs(input, directions, opts)?.0)
}

/// [`verify`], also returning the oracle outputs when the model is stable.
pub fn verify_with_runs(
    input: &Input,
    directions: &[DirectionSpec],
    opts: &VerifyOptions,
) -> Result<(DecayReport, Option<OracleRuns>)> {
    let (mut report, model, dom) = analyze_model(input, directions)?;
    let (Some(model), Some(dom)) = (model, dom) else {
        return Ok((report, None));
    };
    let chain = solve_truncated(&model, opts.truncation)?;
    let sim = (opts.replications > 0 && opts.horizon > 0).then(|| {
        simulate_with_burn_in(
            &model,
            opts.replications,
            opts.horizon,
            opts.seed,
            opts.burn_in_fraction,
        )
    });
    let rows = oracle_rows(&chain, sim.as_ref(), &dom, &report, &opts.fit);
    report.oracle = Some(OracleTable {
        truncation: opts.truncation,
        solver_residual: chain.residual,
        replications: if sim.is_some() { opts.replications } else { 0 },
        horizon: opts.horizon,
        seed: opts.seed,
        all_pass: rows.iter().all(|r| r.status == RowStatus::Pass),
        rows,
    });
    Ok((rounded(&report)?, Some(OracleRuns { chain, sim })))
}

/// Bound and tightness for a network file.
pub fn mtbound(ns: &NetworkSpec) -> Result<NetworkReport> {
    if ns.has_simultaneous_arrivals() {
        return Err(Error::SimultaneousArrivals);
    }
    let model = build_model(ns)?;
    let stable = crate::stability::drift_stability(&drift_vectors(&model))?.stable;
    if !stable {
        return Err(Error::Unstable);
    }
    let mut r = network_report(ns, true);
    if let Some(note) = &r.mt_note {
        return Err(Error::Numeric(note.clone()));
    }
    r.mt_note = None;
    rounded(&r)
}

/// SVG of the domain with rays for `directions`; the model must be stable.
pub fn plot_input(input: &Input, directions: &[DirectionSpec]) -> Result<String> {
    let (report, _, dom) = analyze_model(input, directions)?;
    let Some(dom) = dom else {
        return Err(match report.status {
            Status::Unstable => Error::Unstable,
            _ => Error::InvalidModel("standing conditions fail".into()),
        });
    };
    let rays: Vec<(String, DirectionRate)> = report
        .directions
        .iter()
        .map(|d| (d.direction.text.clone(), d.rate.clone()))
        .collect();
    crate::plot::render_svg(&dom, &rays)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub result: SimResult,
    pub rows: Vec<OracleRow>,
}

/// Monte Carlo run with marginal slope fits, compared with `α_k` when the model is stable.
pub fn simulation(
    input: &Input,
    replications: usize,
    horizon: u64,
    seed: u64,
    burn_in_fraction: f64,
) -> Result<SimulationReport> {
    let (report, model, _) = analyze_model(input, &[])?;
    let Some(model) = model else {
        return Err(match report.status {
            Status::Unstable => Error::Unstable,
            _ => Error::InvalidModel("standing conditions fail".into()),
        });
    };
    let result = simulate_with_burn_in(&model, replications, horizon, seed, burn_in_fraction);
    let rows = (1..=2)
        .map(|k| {
            OracleRow::from_fit(
                format!("alpha_{k} marginal"),
                TailSource::Montecarlo,
                report.alpha.map(|a| a[k - 1]),
                MONTE_CARLO_TOL,
                fit_monte_carlo(&result, k),
            )
        })
        .collect();
    rounded(&SimulationReport { result, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{e1, symmetric_zero_drift};

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(1.234567890123456), 1.23456789012);
        assert_eq!(round_sig(-1.23456789012345e-7), -1.23456789012e-7);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn directions_parse_exactly_or_approximately() {
        let d = parse_directions("1,0; 1/2,3 ;0.25,1").unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!((d[1].numer, d[1].denom), ([1, 3], [2, 1]));
        assert!(!d[1].approximate && d[2].approximate);
        assert_eq!((d[2].numer, d[2].denom), ([1, 1], [4, 1]));
        assert!(parse_directions("0,0").is_err());
        assert!(parse_directions("-1,2").is_err());
        assert!(parse_directions("1").is_err());
    }

    #[test]
    fn e1_analysis() {
        let r = analyze(&Input::Model(e1()), &default_directions()).unwrap();
        assert_eq!(r.status, Status::Stable);
        let tau = r.tau.as_ref().unwrap();
        assert!((tau.direct[0] - 2.5f64.ln()).abs() < 1e-10);
        assert!((tau.direct[1] - 3f64.ln()).abs() < 1e-10);
        assert_eq!(r.directions.len(), 3);
        let back = DecayReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn zero_drift_is_a_condition_failure() {
        let r = analyze(&Input::Model(symmetric_zero_drift()), &[]).unwrap();
        assert_eq!(r.exit_code(), 3);
        let p = ErrorPayload::from_report(&r).unwrap();
        assert!(p.conditions.iter().any(|c| c.starts_with("(iv)")));
    }

    #[test]
    fn input_kind_is_detected() {
        let net = r#"{"lambda":0.2,"mu1":0.5,"mu2":0.3,"p12":0.5,"p21":0.0,"batch":[[1,0,1.0]]}"#;
        assert_eq!(Input::parse(net, false).unwrap().kind(), InputKind::Network);
        let model = serde_json::to_string(&e1().to_file()).unwrap();
        assert_eq!(Input::parse(&model, false).unwrap().kind(), InputKind::Model);
        assert!(matches!(Input::parse("{\"x\":1}", false), Err(Error::Parse(_))));
        assert!(matches!(Input::parse("{", false), Err(Error::Parse(_))));
    }

    #[test]
    fn short_truncation_flags_rows() {
        let opts = VerifyOptions {
            truncation: 10,
            replications: 0,
            ..Default::default()
        };
        let r = verify(&Input::Model(e1()), &default_directions(), &opts).unwrap();
        let table = r.oracle.unwrap();
        assert!(table.rows.iter().any(|r| r.status == RowStatus::WindowTooNoisy));
        assert!(!table.all_pass);
    }
}
