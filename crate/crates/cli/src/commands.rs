use std::fs;
use std::path::Path;

use bdiv::circum::{certificate, circumradius, verify_certificate, CERTIFICATE_TOL, CONTACT_TOL};
use bdiv::diversity::{check_axioms_with, AxiomCheck, DiversityJson, DiversityTable, D2_SAMPLES};
use bdiv::embed3::{self, measure_triangle, reference_triangle, ThreePointDiversity};
use bdiv::embed4::{self, FourPointRadii};
use bdiv::geom::{PointSetJson, PolytopeJson, SymmetricPolytope};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::json::{compact, pretty, to_value};
use crate::{
    CheckArgs, CircumArgs, Command, Embed3Command, Embed4Command, PairArgs, ProbeArgs, RadiiArgs, RunConfig,
    EXIT_NEGATIVE, EXIT_OK,
};

/// Largest absolute error accepted by [`roundtrip_verify`].
pub const ROUNDTRIP_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bdiv::Error),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        use bdiv::Error as E;
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Core(e) => match e {
                E::DegenerateInput(_) => "degenerate_input",
                E::DimensionMismatch { .. } => "dimension_mismatch",
                E::InvalidInput(_) => "invalid_input",
                E::NumericalFailure(_) => "numerical_failure",
                E::CertificateNotFound(_) => "certificate_not_found",
                E::IncompleteTable(_) => "incomplete_table",
                E::NotAMetric { .. } => "not_a_metric",
                E::InvalidDiversity(_) => "invalid_diversity",
                E::NotThreePoints(_) => "not_three_points",
                E::DegenerateQuadratic(_) => "degenerate_quadratic",
                E::PreconditionViolated(_) => "precondition_violated",
                E::TargetOutOfRange { .. } => "target_out_of_range",
                E::BisectionStalled { .. } => "bisection_stalled",
                E::DegenerateBody(_) => "degenerate_body",
                E::SingularSystem { .. } => "singular_system",
                E::ZeroDenominator(_) => "zero_denominator",
            },
        }
    }
}

type Outcome = Result<(Value, i32), CliError>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTripEntry {
    pub name: &'static str,
    pub target: f64,
    pub measured: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTripReport {
    pub entries: Vec<RoundTripEntry>,
    pub tolerance: f64,
    pub max_error: f64,
    pub pass: bool,
}

/// Re-measures `(d12, d13, d23, d123)` of the reference triangle in `body`
/// and compares with `targets`; passes iff every absolute error is at most
/// `tolerance`.
pub fn roundtrip_verify(body: &SymmetricPolytope, targets: [f64; 4], tolerance: f64) -> bdiv::Result<RoundTripReport> {
    let measured = measure_triangle(&reference_triangle(), body)?;
    let entries: Vec<RoundTripEntry> = ["d12", "d13", "d23", "d123"]
        .into_iter()
        .zip(targets.into_iter().zip(measured))
        .map(|(name, (target, measured))| RoundTripEntry { name, target, measured, error: (measured - target).abs() })
        .collect();
    let max_error = entries.iter().fold(0.0_f64, |m, e| m.max(e.error));
    let pass = entries.iter().all(|e| e.error <= tolerance);
    Ok(RoundTripReport { entries, tolerance, max_error, pass })
}

pub fn run(config: &RunConfig) -> Outcome {
    match &config.command {
        Command::Circumradius(a) => circumradius_cmd(a),
        Command::CheckDiversity(a) => check_diversity(a),
        Command::Embed3(Embed3Command::Decide { pairs, d123, tolerance }) => decide(pairs, *d123, *tolerance),
        Command::Embed3(Embed3Command::Witness { pairs, target, out }) => witness(pairs, *target, out.as_deref()),
        Command::Embed3(Embed3Command::Verify { witness, pairs, d123, tolerance }) => {
            verify(witness, pairs, *d123, *tolerance)
        }
        Command::Embed4(Embed4Command::Bound { radii }) => bound(radii),
        Command::Embed4(Embed4Command::Sample { count, seed, out }) => sample(*count, *seed, out.as_deref()),
        Command::ProbeDim3(a) => probe(a),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: name.clone(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse { path: name, message: e.to_string() })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn read_body(path: &Path) -> Result<SymmetricPolytope, CliError> {
    Ok(SymmetricPolytope::from_json(&read_json::<PolytopeJson>(path)?)?)
}

fn with_config(mut doc: Value, config: Value) -> Value {
    if let Value::Object(map) = &mut doc {
        map.insert("config".into(), config);
    }
    doc
}

fn display(path: Option<&Path>) -> Value {
    path.map_or(Value::Null, |p| Value::String(p.display().to_string()))
}

/// Value or `null`, and the error message or `null`.
fn split<T: Serialize>(r: bdiv::Result<T>) -> (Value, Value) {
    match r {
        Ok(v) => (to_value(&v), Value::Null),
        Err(e) => (Value::Null, Value::String(e.to_string())),
    }
}

fn circumradius_cmd(a: &CircumArgs) -> Outcome {
    let (points, labels) = read_json::<PointSetJson>(&a.points)?.into_points()?;
    let body = read_body(&a.body)?;
    let res = circumradius(&points, &body)?;
    let contacts: Vec<Value> =
        res.contacts.iter().map(|c| json!({"index": c.index, "label": labels[c.index], "gauge": c.gauge})).collect();
    let mut doc = json!({"radius": res.radius, "center": res.center, "contacts": contacts});
    if a.certificate {
        let cert = certificate(&points, &body, &res)?;
        let verified = verify_certificate(&cert, &points, &body, res.radius);
        let mut c = to_value(&cert);
        c["verified"] = json!(verified);
        doc["certificate"] = c;
    }
    let config = json!({
        "command": "circumradius",
        "points": display(Some(&a.points)),
        "body": display(Some(&a.body)),
        "certificate": a.certificate,
        "contact_tolerance": CONTACT_TOL,
        "certificate_tolerance": CERTIFICATE_TOL,
    });
    Ok((with_config(doc, config), EXIT_OK))
}

fn check_diversity(a: &CheckArgs) -> Outcome {
    let table = DiversityTable::from_json(&read_json::<DiversityJson>(&a.table)?)?;
    let opts = AxiomCheck { tolerance: a.tolerance, samples: D2_SAMPLES, seed: a.seed };
    let report = check_axioms_with(&table, &opts);
    let code = if report.ok { EXIT_OK } else { EXIT_NEGATIVE };
    let config = json!({
        "command": "check-diversity",
        "table": display(Some(&a.table)),
        "tolerance": a.tolerance,
        "seed": a.seed,
        "samples": D2_SAMPLES,
    });
    Ok((with_config(to_value(&report), config), code))
}

fn input(p: &PairArgs, d123: f64) -> Value {
    json!({"d12": p.d12, "d13": p.d13, "d23": p.d23, "d123": d123})
}

fn decide(p: &PairArgs, d123: f64, tolerance: f64) -> Outcome {
    let d = ThreePointDiversity::new(p.d12, p.d13, p.d23, d123)?;
    let decision = embed3::decide_with(&d, tolerance);
    let code = if decision.banach { EXIT_OK } else { EXIT_NEGATIVE };
    let mut doc = to_value(&decision);
    doc["input"] = input(p, d123);
    let config = json!({"command": "embed3 decide", "tolerance": tolerance});
    Ok((with_config(doc, config), code))
}

fn witness(p: &PairArgs, target: f64, out: Option<&Path>) -> Outcome {
    let d = ThreePointDiversity::new(p.d12, p.d13, p.d23, target)?;
    let decision = embed3::decide(&d);
    let config = json!({
        "command": "embed3 witness",
        "out": display(out),
        "tolerance": embed3::DECISION_SLACK,
        "witness_tolerance": embed3::WITNESS_TOL,
    });
    if !decision.banach {
        let doc = json!({"embeddable": false, "decision": decision, "input": input(p, target)});
        return Ok((with_config(doc, config), EXIT_NEGATIVE));
    }
    let e = embed3::embed(&d)?;
    let [d12, d13, d23, d123] = measure_triangle(&e.points, &e.body)?;
    let body = to_value(&e.body.to_json());
    if let Some(path) = out {
        write_text(path, &format!("{}\n", pretty(&body)))?;
    }
    let doc = json!({
        "embeddable": true,
        "input": input(p, target),
        "body": body,
        "points": e.points,
        "s": e.s,
        "parallelogram": e.parallelogram,
        "measured": {"d12": d12, "d13": d13, "d23": d23, "d123": d123},
    });
    Ok((with_config(doc, config), EXIT_OK))
}

fn verify(path: &Path, p: &PairArgs, d123: f64, tolerance: f64) -> Outcome {
    let body = read_body(path)?;
    let report = roundtrip_verify(&body, [p.d12, p.d13, p.d23, d123], tolerance)?;
    let code = if report.pass { EXIT_OK } else { EXIT_NEGATIVE };
    let config = json!({"command": "embed3 verify", "witness": display(Some(path)), "tolerance": tolerance});
    Ok((with_config(to_value(&report), config), code))
}

fn bound(a: &RadiiArgs) -> Outcome {
    let r = FourPointRadii::new([a.r12, a.r13, a.r14, a.r23, a.r24, a.r34])?;
    let failures = embed4::pairwise_failures4(&r);
    let feasible = failures.is_empty();
    let printed_a = embed4::coefficient_a(&r);
    let system = embed4::solve_face_system(&r);
    let a_matches = match (&printed_a, &system) {
        (Ok(pa), Ok(s)) => Some(embed4::coefficient_a_matches(*pa, s.a())),
        _ => None,
    };
    let coefficients_valid = system.as_ref().is_ok_and(|s| s.valid);
    let (printed_bound, printed_bound_error) = split(embed4::r1234_bound(&r));
    let (printed_a, printed_a_error) = split(printed_a);
    let (system, system_error) = split(system);
    let (triple_bounds, _) = split(embed4::triple_bounds(&r));
    let (trial, trial_error) = if feasible { split(embed4::conjecture_trial(&r)) } else { (Value::Null, Value::Null) };
    let doc = json!({
        "radii": r,
        "pairwise_feasible": feasible,
        "pairwise_failures": failures,
        "printed_bound": printed_bound,
        "printed_bound_error": printed_bound_error,
        "printed_a": printed_a,
        "printed_a_error": printed_a_error,
        "a_matches_system": a_matches,
        "system": system,
        "system_error": system_error,
        "coefficients_valid": coefficients_valid,
        "triple_bounds": triple_bounds,
        "trial": trial,
        "trial_error": trial_error,
    });
    let config = json!({
        "command": "embed4 bound",
        "verdict_tolerance": embed4::VERDICT_TOL,
        "coefficient_tolerance": embed4::COEFFICIENT_TOL,
        "a_match_tolerance": embed4::A_MATCH_TOL,
    });
    let code = if feasible { EXIT_OK } else { EXIT_NEGATIVE };
    Ok((with_config(doc, config), code))
}

fn sample(count: usize, seed: u64, out: Option<&Path>) -> Outcome {
    let (summary, trials) = embed4::conjecture_sample(count, seed)?;
    if let Some(path) = out {
        let mut text = String::new();
        for (index, trial) in trials.iter().enumerate() {
            let mut line = to_value(trial);
            line["index"] = json!(index);
            text.push_str(&compact(&line));
            text.push('\n');
        }
        write_text(path, &text)?;
    }
    let config = json!({
        "command": "embed4 sample",
        "count": count,
        "seed": seed,
        "out": display(out),
        "sample_range": [embed4::SAMPLE_RANGE.0, embed4::SAMPLE_RANGE.1],
        "verdict_tolerance": embed4::VERDICT_TOL,
        "coefficient_tolerance": embed4::COEFFICIENT_TOL,
        "a_match_tolerance": embed4::A_MATCH_TOL,
    });
    Ok((with_config(to_value(&summary), config), EXIT_OK))
}

fn probe(a: &ProbeArgs) -> Outcome {
    let report = embed3::higher_dim_probe(a.trials, a.seed)?;
    let code = if report.violations.is_empty() { EXIT_OK } else { EXIT_NEGATIVE };
    let config = json!({"command": "probe-dim3", "trials": a.trials, "seed": a.seed, "tolerance": embed3::PROBE_TOL});
    Ok((with_config(to_value(&report), config), code))
}
