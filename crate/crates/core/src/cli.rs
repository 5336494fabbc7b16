//! Command-line driver: argument parsing, scenario dispatch, and report
//! rendering.
//!
//! Exit statuses: 0 when every check passes, 1 when any check fails,
//! 2 for usage errors (reported by clap before any scenario runs).

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::Result;
use crate::numfmt::{raw, raw_complex, raw_sig12, sig12};
use crate::qstate::BlochVector;
use crate::scenarios::{self, Check, Param, ScenarioReport, Value};
use crate::tensor::{ComplexMatrix, DEFAULT_TOL};
use crate::vernam::{
    eve_marginal, eve_measure_stats, otp_decrypt, otp_encrypt, run_session, two_time_pad_leak,
    BitString, Photon, PrepMode,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Maximum deviation from unit norm accepted before renormalizing a direction.
const DIRECTION_NORM_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioName {
    Parapositronium,
    Teleportation,
    FourPhotonPairs,
    VernamClassical,
    VernamQuantum,
    EveStats,
    All,
}

impl ScenarioName {
    const EACH: [ScenarioName; 6] = [
        ScenarioName::Parapositronium,
        ScenarioName::Teleportation,
        ScenarioName::FourPhotonPairs,
        ScenarioName::VernamClassical,
        ScenarioName::VernamQuantum,
        ScenarioName::EveStats,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Parapositronium => "parapositronium",
            Self::Teleportation => "teleportation",
            Self::FourPhotonPairs => "four-photon-pairs",
            Self::VernamClassical => "vernam-classical",
            Self::VernamQuantum => "vernam-quantum",
            Self::EveStats => "eve-stats",
            Self::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Structured,
}

#[derive(Debug, Parser)]
#[command(
    name = "cdm",
    version,
    about = "Conditional density matrix scenarios and photon-pair one-time pad"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a named scenario and print its report
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    scenario: ScenarioName,
    /// Filter / message polarization direction
    #[arg(long, value_parser = parse_direction, default_value = "1,0,0")]
    m: BlochVector,
    /// Singlet axis
    #[arg(long, value_parser = parse_direction, default_value = "0,0,1")]
    n: BlochVector,
    /// Second pair's filter direction
    #[arg(long, value_parser = parse_direction, default_value = "0,0,1")]
    s: BlochVector,
    /// Shared encoding basis for the one-time pad
    #[arg(long, value_parser = parse_direction, default_value = "0,0,1")]
    basis: BlochVector,
    #[arg(long, value_parser = parse_message, default_value = "1011")]
    message: BitString,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_tolerance, default_value = "1e-10")]
    tol: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioName,
    pub tolerance: f64,
    pub seed: u64,
    pub format: OutputFormat,
    pub m: BlochVector,
    pub n: BlochVector,
    pub s: BlochVector,
    pub basis: BlochVector,
    pub message: BitString,
    pub trials: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioName::All,
            tolerance: DEFAULT_TOL,
            seed: 0,
            format: OutputFormat::Text,
            m: BlochVector::X,
            n: BlochVector::Z,
            s: BlochVector::Z,
            basis: BlochVector::Z,
            message: "1011".parse().expect("literal bits"),
            trials: 10_000,
        }
    }
}

fn parse_direction(s: &str) -> std::result::Result<BlochVector, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    let [x, y, z] = parts[..] else {
        return Err(format!(
            "expected three comma-separated components, got {}",
            parts.len()
        ));
    };
    let norm = (x * x + y * y + z * z).sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > DIRECTION_NORM_SLACK {
        return Err(format!("direction norm {norm} is not 1"));
    }
    BlochVector::normalized(x, y, z).map_err(|e| e.to_string())
}

fn parse_message(s: &str) -> std::result::Result<BitString, String> {
    let bits: BitString = s.parse().map_err(|e: crate::Error| e.to_string())?;
    if bits.is_empty() {
        return Err("message is empty".to_owned());
    }
    Ok(bits)
}

fn parse_tolerance(s: &str) -> std::result::Result<f64, String> {
    let tol: f64 = s.parse().map_err(|e| format!("{s:?}: {e}"))?;
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(format!("tolerance must be positive, got {s}"))
    }
}

/// Parses a full argument vector (including the program name).
pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let Command::Run(args) = Cli::try_parse_from(argv)?.command;
    Ok(RunConfig {
        scenario: args.scenario,
        tolerance: args.tol,
        seed: args.seed,
        format: args.format,
        m: args.m,
        n: args.n,
        s: args.s,
        basis: args.basis,
        message: args.message,
        trials: args.trials,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit: u8,
    pub reports: Vec<ScenarioReport>,
    pub document: String,
}

/// Runs the configured scenario(s) and renders the report document.
pub fn run(config: &RunConfig) -> RunOutcome {
    let names: Vec<ScenarioName> = match config.scenario {
        ScenarioName::All => ScenarioName::EACH.to_vec(),
        one => vec![one],
    };
    // scenarios are independent; results are merged in fixed order
    let reports: Vec<ScenarioReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = names
            .iter()
            .map(|&name| scope.spawn(move || build_report(name, config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    });
    let exit = if reports.iter().all(ScenarioReport::all_passed) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    let document = match config.format {
        OutputFormat::Text => render_text(&reports, exit),
        OutputFormat::Structured => render_structured(config, &reports, exit),
    };
    RunOutcome {
        exit,
        reports,
        document,
    }
}

fn build_report(name: ScenarioName, config: &RunConfig) -> ScenarioReport {
    let built = match name {
        ScenarioName::Parapositronium => scenarios::parapositronium(&config.n, &config.m),
        ScenarioName::Teleportation => scenarios::teleportation(&config.m, &config.n),
        ScenarioName::FourPhotonPairs => scenarios::four_photon_pairs(&config.m, &config.s),
        ScenarioName::VernamClassical => vernam_classical(&config.message, config.seed),
        ScenarioName::VernamQuantum => vernam_quantum(config),
        ScenarioName::EveStats => eve_stats(config),
        ScenarioName::All => unreachable!("expanded by run"),
    };
    match built {
        Ok(report) => report.with_tolerance(config.tolerance),
        Err(e) => {
            let mut report = ScenarioReport::new(name.as_str());
            report.check(Check::exact(
                format!("scenario completed ({e})"),
                f64::INFINITY,
                config.tolerance,
            ));
            report
        }
    }
}

fn hamming(a: &BitString, b: &BitString) -> Result<f64> {
    Ok(a.xor(b)?.count_ones() as f64)
}

fn vernam_classical(message: &BitString, seed: u64) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new("vernam-classical");
    report.input("message", Param::Bits(message.to_string()));
    report.input("seed", Param::Count(seed));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let key = BitString::random(&mut rng, message.len());
    let cipher = otp_encrypt(message, &key)?;
    let decrypted = otp_decrypt(&cipher, &key)?;
    report.check(Check::exact(
        "decrypt(encrypt(m, k), k) = m (bit errors)",
        hamming(&decrypted, message)?,
        DEFAULT_TOL,
    ));

    let second = BitString::random(&mut rng, message.len());
    let cipher2 = otp_encrypt(&second, &key)?;
    let leak = two_time_pad_leak(&cipher, &cipher2)?;
    report.check(Check::exact(
        "reused key: s1 xor s2 = m1 xor m2 (bit errors)",
        hamming(&leak, &message.xor(&second)?)?,
        DEFAULT_TOL,
    ));

    let fresh = BitString::random(&mut rng, message.len());
    let fresh_leak = two_time_pad_leak(&cipher, &otp_encrypt(&second, &fresh)?)?;

    report.output("key", Value::Bits(key.to_string()));
    report.output("cipher", Value::Bits(cipher.to_string()));
    report.output("decrypted", Value::Bits(decrypted.to_string()));
    report.output("second_message", Value::Bits(second.to_string()));
    report.output("second_cipher", Value::Bits(cipher2.to_string()));
    report.output("reused_key_leak", Value::Bits(leak.to_string()));
    report.output(
        "fresh_key_leak_distance",
        Value::Scalar(hamming(&fresh_leak, &message.xor(&second)?)?),
    );
    Ok(report)
}

fn vernam_quantum(config: &RunConfig) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new("vernam-quantum");
    report.input("message", Param::Bits(config.message.to_string()));
    report.input("seed", Param::Count(config.seed));
    report.input("basis", Param::Direction(config.basis));

    let mut physical = run_session(
        &config.message,
        config.seed,
        &config.basis,
        PrepMode::Physical,
    )?;
    let direct = run_session(
        &config.message,
        config.seed,
        &config.basis,
        PrepMode::Direct,
    )?;
    report.check(Check::exact(
        "Bob decodes the message (bit errors)",
        hamming(&physical.decoded, &config.message)?,
        DEFAULT_TOL,
    ));
    let mut mismatch = 0.0f64;
    for (a, b) in physical.records.iter().zip(&direct.records) {
        for (x, y) in [(&a.photon1, &b.photon1), (&a.photon3, &b.photon3)] {
            mismatch = mismatch.max(1.0 - x.inner(y)?.norm());
        }
    }
    report.check(Check::exact(
        "pair-conditioned photons equal directly prepared photons",
        mismatch,
        DEFAULT_TOL,
    ));
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    for (which, label) in [(Photon::One, "photon 1"), (Photon::Three, "photon 3")] {
        for m in [false, true] {
            let rho = eve_marginal(which, m, &config.basis)?;
            report.check(Check::exact(
                format!("{label} alone is E/2 for message bit {}", u8::from(m)),
                rho.matrix().distance(&half),
                DEFAULT_TOL,
            ));
        }
    }

    physical.eve = Some(eve_measure_stats(
        config.trials,
        config.seed,
        &config.basis,
        &config.basis,
    )?);
    report.output("key", Value::Bits(physical.key.to_string()));
    report.output("decoded", Value::Bits(physical.decoded.to_string()));
    report.output("transcript", Value::Document(physical.to_json()));
    Ok(report)
}

fn eve_stats(config: &RunConfig) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new("eve-stats");
    report.input("trials", Param::Count(config.trials));
    report.input("seed", Param::Count(config.seed));
    report.input("basis", Param::Direction(config.basis));

    let bases = [
        ("z", BlochVector::Z),
        ("x", BlochVector::X),
        ("y", BlochVector::Y),
    ];
    for (offset, (label, eve_basis)) in bases.iter().enumerate() {
        let stats = eve_measure_stats(
            config.trials,
            config.seed.wrapping_add(offset as u64),
            eve_basis,
            &config.basis,
        )?;
        let freq = stats.frequencies();
        report.check(Check::statistical(
            format!("outcome 0 frequency within 3 sigma of 1/2 (Eve basis {label})"),
            freq[0] - 0.5,
            3.0 * stats.sigma(),
        ));
        report.output(
            &format!("counts_{label}"),
            Value::Counts(stats.counts.to_vec()),
        );
        report.output(&format!("frequency0_{label}"), Value::Scalar(freq[0]));
        for m in 0..2 {
            let row = stats.counts_by_message[m];
            let n = (row[0] + row[1]).max(1) as f64;
            report.output(
                &format!("frequency0_{label}_given_m{m}"),
                Value::Scalar(row[0] as f64 / n),
            );
        }
    }
    Ok(report)
}

fn format_complex(z: num_complex::Complex64) -> String {
    format!("({}, {})", sig12(z.re), sig12(z.im))
}

fn format_param(p: &Param) -> String {
    match p {
        Param::Direction(v) => format!("({}, {}, {})", sig12(v.x), sig12(v.y), sig12(v.z)),
        Param::Bits(b) => b.clone(),
        Param::Count(n) => n.to_string(),
        Param::Real(x) => sig12(*x),
    }
}

fn render_text(reports: &[ScenarioReport], exit: u8) -> String {
    let mut out = String::new();
    for report in reports {
        let _ = writeln!(out, "== {} ==", report.name);
        for (name, p) in &report.inputs {
            let _ = writeln!(out, "param {name} = {}", format_param(p));
        }
        for (name, value) in &report.outputs {
            match value {
                Value::Matrix(m) => {
                    let _ = writeln!(out, "output {name} ({}x{}) =", m.rows(), m.cols());
                    for r in 0..m.rows() {
                        let row: Vec<String> =
                            m.row(r).iter().map(|&z| format_complex(z)).collect();
                        let _ = writeln!(out, "  [{}]", row.join(", "));
                    }
                }
                Value::Vector(v) => {
                    let entries: Vec<String> = v.iter().map(|&z| format_complex(z)).collect();
                    let _ = writeln!(out, "output {name} = [{}]", entries.join(", "));
                }
                Value::Scalar(x) => {
                    let _ = writeln!(out, "output {name} = {}", sig12(*x));
                }
                Value::Bits(b) => {
                    let _ = writeln!(out, "output {name} = {b}");
                }
                Value::Counts(c) => {
                    let c: Vec<String> = c.iter().map(u64::to_string).collect();
                    let _ = writeln!(out, "output {name} = [{}]", c.join(", "));
                }
                Value::Document(doc) => {
                    let _ = writeln!(out, "output {name} = {doc}");
                }
            }
        }
        for check in &report.checks {
            let _ = writeln!(
                out,
                "check [{}] {}: residual={} tol={}",
                if check.pass { "PASS" } else { "FAIL" },
                check.description,
                sig12(check.residual),
                sig12(check.tolerance),
            );
        }
        let passed = report.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(
            out,
            "summary {}/{} checks passed",
            passed,
            report.checks.len()
        );
        out.push('\n');
    }
    let _ = writeln!(out, "exit {exit}");
    out
}

/// Serializes `(name, value)` pairs as a JSON object in insertion order.
struct Ordered<T>(Vec<(String, T)>);

impl<T: Serialize> Serialize for Ordered<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_map(self.0.iter().map(|(k, v)| (k, v)))
    }
}

#[derive(serde::Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum OutputDoc {
    Matrix {
        rows: usize,
        cols: usize,
        entries: Vec<[Box<RawValue>; 2]>,
    },
    Vector {
        entries: Vec<[Box<RawValue>; 2]>,
    },
    Scalar {
        value: Box<RawValue>,
    },
    Bits {
        value: String,
    },
    Counts {
        value: Vec<u64>,
    },
    Document {
        value: Box<RawValue>,
    },
}

#[derive(serde::Serialize)]
struct CheckDoc {
    description: String,
    residual: Box<RawValue>,
    tolerance: Box<RawValue>,
    pass: bool,
}

#[derive(serde::Serialize)]
struct ReportDoc {
    scenario: String,
    params: Ordered<Box<RawValue>>,
    outputs: Ordered<OutputDoc>,
    checks: Vec<CheckDoc>,
}

#[derive(serde::Serialize)]
struct RunDoc {
    scenario: &'static str,
    params: Ordered<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outputs: Option<Ordered<OutputDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checks: Option<Vec<CheckDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reports: Option<Vec<ReportDoc>>,
    exit: u8,
}

fn raw_param(p: &Param) -> Box<RawValue> {
    match p {
        Param::Direction(v) => raw(format!("[{},{},{}]", sig12(v.x), sig12(v.y), sig12(v.z))),
        Param::Bits(b) => raw(serde_json::to_string(b).expect("string serializes")),
        Param::Count(n) => raw(n.to_string()),
        Param::Real(x) => raw_sig12(*x),
    }
}

fn output_doc(value: &Value) -> OutputDoc {
    match value {
        Value::Matrix(m) => OutputDoc::Matrix {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|&z| raw_complex(z)).collect(),
        },
        Value::Vector(v) => OutputDoc::Vector {
            entries: v.iter().map(|&z| raw_complex(z)).collect(),
        },
        Value::Scalar(x) => OutputDoc::Scalar {
            value: raw_sig12(*x),
        },
        Value::Bits(b) => OutputDoc::Bits { value: b.clone() },
        Value::Counts(c) => OutputDoc::Counts { value: c.clone() },
        Value::Document(d) => OutputDoc::Document {
            value: raw(d.clone()),
        },
    }
}

fn report_doc(report: &ScenarioReport) -> ReportDoc {
    ReportDoc {
        scenario: report.name.clone(),
        params: Ordered(
            report
                .inputs
                .iter()
                .map(|(k, p)| (k.clone(), raw_param(p)))
                .collect(),
        ),
        outputs: Ordered(
            report
                .outputs
                .iter()
                .map(|(k, v)| (k.clone(), output_doc(v)))
                .collect(),
        ),
        checks: report
            .checks
            .iter()
            .map(|c| CheckDoc {
                description: c.description.clone(),
                residual: raw_sig12(c.residual),
                tolerance: raw_sig12(c.tolerance),
                pass: c.pass,
            })
            .collect(),
    }
}

fn render_structured(config: &RunConfig, reports: &[ScenarioReport], exit: u8) -> String {
    let params = Ordered(vec![
        ("tol".to_owned(), raw_sig12(config.tolerance)),
        ("seed".to_owned(), raw(config.seed.to_string())),
    ]);
    let doc = match (config.scenario, reports) {
        (ScenarioName::All, _) => RunDoc {
            scenario: "all",
            params,
            outputs: None,
            checks: None,
            reports: Some(reports.iter().map(report_doc).collect()),
            exit,
        },
        (name, [report]) => {
            let ReportDoc {
                params: report_params,
                outputs,
                checks,
                ..
            } = report_doc(report);
            let mut merged = report_params.0;
            for (key, value) in params.0 {
                if !merged.iter().any(|(k, _)| *k == key) {
                    merged.push((key, value));
                }
            }
            RunDoc {
                scenario: name.as_str(),
                params: Ordered(merged),
                outputs: Some(outputs),
                checks: Some(checks),
                reports: None,
                exit,
            }
        }
        _ => unreachable!("single scenario yields one report"),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}
