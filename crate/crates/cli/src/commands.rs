use std::fmt::Write as _;
use std::fs;

use serde::Serialize;
use serde_json::{json, Value};

use nadyn::arith::Prime;
use nadyn::entropy::{
    compare_entropies, fekete_estimate, measure_entropy_sequence, topological_entropy_sequence, Cover, EntropySequence,
    Partition,
};
use nadyn::integrate::{check_spectral_conditions, LinearOnSteps, StepFunction};
use nadyn::measure::{verify_measure_axioms, AnyMeasure, MeasureContext, MeasureSpec};
use nadyn::pathology::{decay_sequence, DigitStream};
use nadyn::report::Report;
use nadyn::selftest;
use nadyn::shift::{parse_set_expr, Alphabet, PointWord};
use nadyn::transform::{
    check_conjugacy, check_iso_of_systems, check_measure_preserving, iso_from_permutation, point_map_from_iso,
    MeasureAlgebraIso, TransformSpec, Transformation,
};

use crate::args::*;
use crate::error::{CliError, CliResult};

/// What a command emits; `failure` holds witnesses when a verification
/// came out negative.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub failure: Option<String>,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, failure: None }
    }

    fn json(value: &impl Serialize) -> Self {
        Output::ok(pretty(value))
    }

    /// JSON of `report` (with any extra fields), failing when it fails.
    fn report(report: &Report, extra: Value) -> Self {
        let mut value = serde_json::to_value(report).expect("report serializes");
        if let (Value::Object(map), Value::Object(more)) = (&mut value, extra) {
            map.insert("passed".into(), report.passed().into());
            map.extend(more);
        }
        let failure = report.first_failure().map(|c| {
            format!("check {} failed in {} of {} cases: {}", c.name, c.failures, c.cases, c.witnesses.join("; "))
        });
        Output { text: pretty(&value), failure }
    }
}

fn pretty(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

/// Inline JSON when the argument starts with `{`, a file path otherwise.
fn load(arg: &str) -> CliResult<String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|source| CliError::Read { path: arg.to_string(), source })
}

fn any_measure(arg: &str) -> CliResult<AnyMeasure> {
    Ok(MeasureSpec::from_json(&load(arg)?)?.build()?)
}

fn shift_measure(arg: &str) -> CliResult<MeasureContext> {
    Ok(MeasureSpec::from_json(&load(arg)?)?.build_shift()?)
}

fn transformation(text: &str, alphabet: Alphabet) -> CliResult<Transformation> {
    Ok(TransformSpec::parse(text)?.build(alphabet)?)
}

fn iso(arg: &str) -> CliResult<MeasureAlgebraIso> {
    Ok(MeasureAlgebraIso::from_json(&load(arg)?)?)
}

pub fn run(command: Command) -> CliResult<Output> {
    match command {
        Command::Measure(c) => measure(c),
        Command::Integrate(a) => {
            let m = shift_measure(&a.spec.spec)?;
            let f = StepFunction::from_json(&load(&a.function)?, m.alphabet())?;
            Ok(Output::json(&json!({ "function": f.to_string(), "integral": f.integrate(&m)? })))
        }
        Command::Stepnorm(a) => {
            let m = shift_measure(&a.spec.spec)?;
            let f = StepFunction::from_json(&load(&a.function)?, m.alphabet())?;
            Ok(Output::json(&f.step_norm(&m)?))
        }
        Command::SpectralCheck(a) => spectral(a),
        Command::Dynamics(c) => dynamics(c),
        Command::Entropy(c) => entropy(c),
        Command::Pathology(PathologyCommand::Upsilon(a)) => upsilon(a),
        Command::Selftest(a) => Ok(self_test(a)),
    }
}

fn measure(command: MeasureCommand) -> CliResult<Output> {
    match command {
        MeasureCommand::Eval(a) => {
            let value = match any_measure(&a.spec.spec)? {
                AnyMeasure::Shift(m) => m.measure_of(&parse_set_expr(&a.set, m.alphabet())?)?,
                AnyMeasure::Counting(m) => m.measure_of(m.parse_set(&a.set)?)?,
            };
            Ok(Output::json(&json!({ "set": a.set, "measure": value })))
        }
        MeasureCommand::Norm(a) => {
            let norm = match any_measure(&a.spec.spec)? {
                AnyMeasure::Shift(m) => m.norm_of(&parse_set_expr(&a.set, m.alphabet())?)?,
                AnyMeasure::Counting(m) => m.norm_of(m.parse_set(&a.set)?)?,
            };
            Ok(Output::json(&norm))
        }
        MeasureCommand::Nmu(a) => {
            let norm = match any_measure(&a.spec.spec)? {
                AnyMeasure::Shift(m) => m.point_norm(&PointWord::parse(m.alphabet(), &a.point)?)?,
                AnyMeasure::Counting(m) => {
                    let i = m
                        .labels()
                        .iter()
                        .position(|l| *l == a.point)
                        .ok_or_else(|| CliError::Usage(format!("unknown label {:?}", a.point)))?;
                    m.point_norm(i)?
                }
            };
            Ok(Output::json(&norm))
        }
        MeasureCommand::Verify(a) => {
            let m = shift_measure(&a.spec.spec)?;
            let report = verify_measure_axioms(&m, a.depth, a.seed)?;
            Ok(Output::report(&report, json!({ "depth": a.depth, "seed": a.seed })))
        }
    }
}

fn spectral(a: SpectralArgs) -> CliResult<Output> {
    let mu = shift_measure(&a.spec)?;
    let nu = match &a.target_spec {
        Some(s) => shift_measure(s)?,
        None => mu.clone(),
    };
    let w = LinearOnSteps::from_json(&load(&a.operator)?)?;
    let verdict = check_spectral_conditions(&mu, &nu, &w)?;
    let iso = match &verdict.iso {
        Some(phi) => serde_json::from_str(&phi.to_json()).expect("iso json"),
        None => Value::Null,
    };
    Ok(Output::report(&verdict.report, json!({ "iso": iso })))
}

fn dynamics(command: DynamicsCommand) -> CliResult<Output> {
    match command {
        DynamicsCommand::CheckPreserving(a) => {
            let m = shift_measure(&a.spec.spec)?;
            let t = transformation(&a.transform, m.alphabet())?;
            let report = check_measure_preserving(&m, &t, a.depth, a.seed)?;
            Ok(Output::report(&report, json!({ "transform": t.to_string(), "depth": a.depth, "seed": a.seed })))
        }
        DynamicsCommand::CheckConjugacy(a) => {
            let phi = iso(&a.iso)?;
            let t = transformation(&a.transform, phi.source())?;
            let s = transformation(a.target_transform.as_deref().unwrap_or(&a.transform), phi.target())?;
            let report = check_conjugacy(&phi, &t, &s, a.depth)?;
            Ok(Output::report(&report, json!({ "depth": a.depth })))
        }
        DynamicsCommand::PointMap(a) => {
            let phi = iso(&a.iso)?;
            let m = shift_measure(&a.spec)?;
            let x = PointWord::parse(m.alphabet(), &a.point)?;
            let prefix = point_map_from_iso(&phi, &m, &x, a.depth)?;
            Ok(Output::json(&json!({ "point": x.to_string(), "prefix": prefix.to_digits(phi.target()) })))
        }
        DynamicsCommand::CheckIso(a) => {
            let mu = shift_measure(&a.spec)?;
            let nu = match &a.target_spec {
                Some(s) => shift_measure(s)?,
                None => mu.clone(),
            };
            let alphabet = mu.alphabet();
            let phi = transformation(&a.phi, alphabet)?;
            let t = transformation(&a.transform, alphabet)?;
            let s = transformation(a.target_transform.as_deref().unwrap_or(&a.transform), alphabet)?;
            let report = check_iso_of_systems(&phi, &t, &s, &mu, &nu, a.depth)?;
            Ok(Output::report(&report, json!({ "depth": a.depth })))
        }
        DynamicsCommand::IsoFromPerm(a) => {
            let phi = iso_from_permutation(Alphabet::new(a.p)?, &a.pi, a.depth)?;
            Ok(Output::ok(phi.to_json() + "\n"))
        }
        DynamicsCommand::CompositionOperator(a) => {
            let alphabet = Alphabet::new(a.p)?;
            let w = LinearOnSteps::composition(&transformation(&a.phi, alphabet)?, a.depth)?;
            Ok(Output::ok(w.to_json() + "\n"))
        }
    }
}

/// The CSV table followed by a one-line JSON summary, or one JSON document.
fn sequence_output(seq: &EntropySequence, format: Format) -> CliResult<Output> {
    let estimate = fekete_estimate(seq)?;
    Ok(Output::ok(match format {
        Format::Csv => format!("{}{}\n", seq.to_csv(), serde_json::to_string(&estimate).expect("estimate serializes")),
        Format::Json => pretty(&json!({ "sequence": seq, "summary": estimate })),
    }))
}

fn entropy(command: EntropyCommand) -> CliResult<Output> {
    match command {
        EntropyCommand::Measure(a) => {
            let m = shift_measure(&a.spec.spec)?;
            let alpha = Partition::parse(m.alphabet(), &a.partition)?;
            let t = transformation(&a.transform, m.alphabet())?;
            sequence_output(&measure_entropy_sequence(&m, &t, &alpha, a.n)?, a.format)
        }
        EntropyCommand::Top(a) => {
            let alphabet = Alphabet::new(a.p)?;
            let cover = Cover::parse(alphabet, &a.cover)?;
            let t = transformation(&a.transform, alphabet)?;
            sequence_output(&topological_entropy_sequence(&t, &cover, a.n)?, a.format)
        }
        EntropyCommand::Compare(a) => {
            let m = shift_measure(&a.spec.spec)?;
            let alpha = Partition::parse(m.alphabet(), &a.partition)?;
            let t = transformation(&a.transform, m.alphabet())?;
            let cmp = compare_entropies(&m, &t, &alpha, a.n)?;
            let summary = json!({
                "measure": fekete_estimate(&cmp.measure)?,
                "topological": fekete_estimate(&cmp.topological)?,
                "unit_norm": cmp.unit_norm,
            });
            match a.format {
                Format::Json => Ok(Output::report(
                    &cmp.report,
                    json!({ "measure": cmp.measure, "topological": cmp.topological, "summary": summary }),
                )),
                Format::Csv => {
                    let mut text = String::from("n,a_n_decimal,b_n_decimal\n");
                    for (i, (x, y)) in cmp.measure.terms().iter().zip(cmp.topological.terms()).enumerate() {
                        let _ = writeln!(text, "{},{},{}", i + 1, x.decimal(), y.decimal());
                    }
                    let _ = writeln!(text, "{summary}");
                    let mut out = Output::report(&cmp.report, json!({}));
                    out.text = text;
                    Ok(out)
                }
            }
        }
    }
}

fn upsilon(a: UpsilonArgs) -> CliResult<Output> {
    let prime = Prime::new(a.p)?;
    let x = DigitStream::parse(prime, &a.digits)?;
    let report = decay_sequence(&x, a.n as usize)?;
    let verdict = if report.continuity_violated { "yes" } else { "no" };
    Ok(Output::ok(match a.format {
        Format::Csv => format!("{}continuity violated: {verdict}\n", report.to_csv()),
        Format::Json => pretty(&report),
    }))
}

fn self_test(a: SelftestArgs) -> Output {
    let results = match a.criterion {
        Some(id) => selftest::run_criterion(id, a.seed).into_iter().collect(),
        None => selftest::run_all(a.seed),
    };
    let mut text = format!("seed: {}\n", a.seed);
    for r in &results {
        let _ = writeln!(text, "{r}");
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    let _ = writeln!(text, "{} of {} criteria passed", results.len() - failed.len(), results.len());
    let failure = (!failed.is_empty()).then(|| format!("failed criteria: {}", failed.join(", ")));
    Output { text, failure }
}
