use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use kwise_core::binomial::BinomialSpec;
use kwise_core::extremal::{verify_certificate, ExtremalCertificate, Method};
use kwise_core::kwise::{lift_to_joint, Sampler};
use kwise_core::rational::{format_decimal, uint, Rational};
use kwise_core::relaxed::{sandwich_from, tilde_m, Regime};
use kwise_core::suites::{
    ChebyshevSuite, CheckRecord, DualitySuite, ExpectationSuite, KwiseSuite, PerturbationSuite, ProbShiftSuite,
    SandwichSuite,
};
use kwise_core::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::{
    parse_p_list, parse_u64_list, Cli, Command, ComputeArgs, Format, MethodArg, PolyArgs, SampleArgs, ScanArgs,
    SuiteName, VerifyArgs,
};
use crate::error::CliError;
use crate::parallel::{compute_max, dual_search, run_suite, search_target, with_threads};
use crate::report::{to_json, CertificateJson, DualSearchJson, RecordJson};

/// Runs one parsed invocation and returns the exit code. Output goes to
/// `stdout` unless the subcommand has `--out`.
pub fn run(cli: Cli, stdout: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    let threads = cli.threads;
    with_threads(threads, move || dispatch(cli.command, stdout))?
}

fn dispatch(command: Command, stdout: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    match command {
        Command::Compute(a) => {
            let out = a.out.clone();
            emit(out.as_deref(), stdout, |w| compute(&a, w))
        }
        Command::Scan(a) => {
            let out = a.out.clone();
            emit(out.as_deref(), stdout, |w| scan(&a, w))
        }
        Command::Poly(a) => {
            let out = a.out.clone();
            emit(out.as_deref(), stdout, |w| poly(&a, w))
        }
        Command::Verify(a) => {
            let out = a.out.clone();
            emit(out.as_deref(), stdout, |w| verify(&a, w))
        }
        Command::Sample(a) => {
            let out = a.out.clone();
            emit(out.as_deref(), stdout, |w| sample(&a, w))
        }
    }
}

fn emit(
    path: Option<&Path>,
    stdout: &mut (dyn Write + Send),
    body: impl FnOnce(&mut dyn Write) -> Result<i32, CliError>,
) -> Result<i32, CliError> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            let code = body(&mut w)?;
            w.flush()?;
            Ok(code)
        }
        None => {
            let code = body(stdout)?;
            stdout.flush()?;
            Ok(code)
        }
    }
}

fn spec(n: u64, p: &Rational) -> Result<BinomialSpec, CliError> {
    Ok(BinomialSpec::new(n, p.clone())?)
}

fn internal_failure(cert: &ExtremalCertificate) -> Option<String> {
    let report = verify_certificate(cert);
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    (!failed.is_empty()).then(|| format!("certificate checks failed: {}", failed.join(", ")))
}

pub fn compute(a: &ComputeArgs, w: &mut dyn Write) -> Result<i32, CliError> {
    let s = spec(a.n, &a.p)?;
    let budget = a.budget.max_candidates;
    let cert = compute_max(&s, a.k, a.method.single(), budget)?;
    let mut json = CertificateJson::new(&cert, a.method.as_str());
    let mut failure = internal_failure(&cert);
    if a.method == MethodArg::Both {
        if let Some((inner_spec, inner_k)) = search_target(&s, a.k) {
            let searched = dual_search(&inner_spec, inner_k, budget)?;
            let dual_value = if a.k % 2 == 1 { s.p() * &searched.value } else { searched.value.clone() };
            if dual_value != cert.value {
                return Err(CliError::Internal(format!(
                    "primal gives {}, dual search gives {dual_value}",
                    cert.value
                )));
            }
            failure = failure.or_else(|| internal_failure(&searched));
            json.dual_search = Some(DualSearchJson::new(&searched));
        }
    }
    w.write_all(to_json(&json)?.as_bytes())?;
    match failure {
        Some(msg) => {
            eprintln!("kwise: {msg}");
            Ok(2)
        }
        None => Ok(0),
    }
}

const SCAN_HEADER: [&str; 9] = ["n", "k", "p", "M", "M_tilde", "ratio", "degenerate", "regime", "status"];

struct ScanRow {
    fields: Vec<String>,
    decimals: [String; 3],
    disagreement: bool,
}

fn scan_row(n: u64, k: u64, p: &Rational, a: &ScanArgs) -> ScanRow {
    let mut fields = vec![n.to_string(), k.to_string(), p.to_string()];
    let blank = |fields: &mut Vec<String>, status: String| {
        fields.extend(std::iter::repeat_n(String::new(), 5));
        fields.push(status);
    };
    let s = match BinomialSpec::new(n, p.clone()) {
        Ok(s) => s,
        Err(e) => {
            blank(&mut fields, format!("error: {e}"));
            return ScanRow { fields, decimals: Default::default(), disagreement: false };
        }
    };
    let budget = a.budget.max_candidates;
    let mut disagreement = false;
    let result = compute_max(&s, k, a.method.single(), budget).and_then(|c| {
        if a.method == MethodArg::Both {
            let d = compute_max(&s, k, Method::DualSearch, budget)?;
            if d.value != c.value {
                return Err(Error::Disagreement(format!("primal {} vs dual {}", c.value, d.value)));
            }
        }
        Ok(c)
    });
    let cert = match result {
        Ok(c) => c,
        Err(e) => {
            disagreement = matches!(e, Error::Disagreement(_));
            blank(&mut fields, format!("error: {e}"));
            return ScanRow { fields, decimals: Default::default(), disagreement };
        }
    };
    let regime = Regime::classify(&s, k, a.precision).as_str().to_string();
    let (tilde, ratio) = if k % 2 == 0 {
        match sandwich_from(&cert, a.precision) {
            Ok(r) => (Some(r.m_tilde), Some(r.ratio)),
            Err(_) => (tilde_m(&s, k).ok(), None),
        }
    } else {
        (None, None)
    };
    let opt = |v: &Option<Rational>| v.as_ref().map(ToString::to_string).unwrap_or_default();
    let dec = |v: &Option<Rational>| v.as_ref().map(|x| format_decimal(x, 15)).unwrap_or_default();
    fields.push(cert.value.to_string());
    fields.push(opt(&tilde));
    fields.push(opt(&ratio));
    fields.push(cert.degenerate.to_string());
    fields.push(regime);
    fields.push(if internal_failure(&cert).is_some() { "certificate-failed".into() } else { "ok".into() });
    let decimals = [format_decimal(&cert.value, 15), dec(&tilde), dec(&ratio)];
    ScanRow { fields, decimals, disagreement }
}

pub fn scan(a: &ScanArgs, w: &mut dyn Write) -> Result<i32, CliError> {
    let ns = parse_u64_list(&a.n).map_err(CliError::Input)?;
    let ks = parse_u64_list(&a.k).map_err(CliError::Input)?;
    let ps = parse_p_list(&a.p).map_err(CliError::Input)?;
    for (name, empty) in [("n", ns.is_empty()), ("k", ks.is_empty()), ("p", ps.is_empty())] {
        if empty {
            return Err(CliError::Input(format!("empty {name} range")));
        }
    }
    let mut cells = Vec::new();
    for &n in &ns {
        for &k in &ks {
            for p in &ps {
                cells.push((n, k, p.clone()));
            }
        }
    }
    let rows: Vec<ScanRow> = cells.par_iter().map(|(n, k, p)| scan_row(*n, *k, p, a)).collect();
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = SCAN_HEADER.to_vec();
    if a.decimal {
        header.extend(["M_decimal", "M_tilde_decimal", "ratio_decimal"]);
    }
    out.write_record(&header)?;
    let mut code = 0;
    for row in rows {
        let mut record = row.fields;
        if a.decimal {
            record.extend(row.decimals);
        }
        out.write_record(&record)?;
        if row.disagreement {
            code = 2;
        }
    }
    out.flush()?;
    Ok(code)
}

#[derive(Serialize)]
struct PolyPoint {
    x: String,
    value: String,
    zero: bool,
}

#[derive(Serialize)]
struct PolyJson {
    n: u64,
    k: u64,
    p: String,
    #[serde(rename = "M")]
    m: String,
    dual_zeros: Vec<u64>,
    dual_coeffs: Vec<String>,
    samples: Vec<PolyPoint>,
}

pub fn poly(a: &PolyArgs, w: &mut dyn Write) -> Result<i32, CliError> {
    if a.k % 2 == 1 {
        return Err(CliError::Input(format!("the dual polynomial is tabulated for even k only, got k = {}", a.k)));
    }
    if a.samples < 2 {
        return Err(CliError::Input("need at least 2 samples".into()));
    }
    let s = spec(a.n, &a.p)?;
    let cert = compute_max(&s, a.k, Method::DualSearch, a.budget.max_candidates)?;
    let step = uint(a.n) / uint(a.samples - 1);
    let points: Vec<PolyPoint> = (0..a.samples)
        .map(|j| {
            let x = &step * uint(j);
            let value = cert.dual.eval(&x);
            let zero = x.is_integer() && value == Rational::from_integer(0.into());
            PolyPoint { x: x.to_string(), value: value.to_string(), zero }
        })
        .collect();
    match a.format {
        Format::Json => {
            let json = PolyJson {
                n: a.n,
                k: a.k,
                p: a.p.to_string(),
                m: cert.value.to_string(),
                dual_zeros: cert.dual_zeros.clone(),
                dual_coeffs: cert.dual.coeffs().iter().map(ToString::to_string).collect(),
                samples: points,
            };
            w.write_all(to_json(&json)?.as_bytes())?;
        }
        Format::Csv => {
            let mut out = csv::Writer::from_writer(w);
            if a.decimal {
                out.write_record(["x", "value", "zero", "x_decimal", "value_decimal"])?;
            } else {
                out.write_record(["x", "value", "zero"])?;
            }
            for pt in points {
                let zero = pt.zero.to_string();
                if a.decimal {
                    let xd = format_decimal(&kwise_core::rational::parse_rational(&pt.x)?, 15);
                    let vd = format_decimal(&kwise_core::rational::parse_rational(&pt.value)?, 15);
                    out.write_record([pt.x, pt.value, zero, xd, vd])?;
                } else {
                    out.write_record([pt.x, pt.value, zero])?;
                }
            }
            out.flush()?;
        }
    }
    Ok(0)
}

fn default_ps(suite: SuiteName) -> &'static str {
    match suite {
        SuiteName::Probshift => "1/2,1/3,3/10,1/10",
        SuiteName::Perturbation => "1/2,1/3,3/10",
        _ => "1/2,1/3,3/10,2/3",
    }
}

/// The records of the selected suite, in a fixed order.
pub fn suite_records(a: &VerifyArgs) -> Result<Vec<CheckRecord>, CliError> {
    let ks = parse_u64_list(&a.ks).map_err(CliError::Input)?;
    let ps = parse_p_list(a.ps.as_deref().unwrap_or(default_ps(a.suite))).map_err(CliError::Input)?;
    let prec = a.precision;
    let budget = a.budget.max_candidates;
    Ok(match a.suite {
        SuiteName::Chebyshev => run_suite(&ChebyshevSuite {
            max_m: a.max_m,
            max_d: a.max_d,
            max_sup_m: a.max_sup_m,
            samples: a.monic_samples,
            seed: a.seed,
            prec,
        }),
        SuiteName::Perturbation => run_suite(&PerturbationSuite {
            max_n: a.max_n.unwrap_or(60),
            ks,
            ps,
            configs_per_cell: a.configs_per_cell,
            seed: a.seed,
            prec,
            witness_configs: a.witness_configs,
            witness_max_n: 50,
        }),
        SuiteName::Probshift => {
            let max_n = a.max_n.unwrap_or(200);
            let ns = [10, 20, 50, 100, 200].into_iter().filter(|&n| n <= max_n).collect();
            run_suite(&ProbShiftSuite { ns, ps, prec })
        }
        SuiteName::Duality => run_suite(&DualitySuite { max_n: a.max_n.unwrap_or(14), ks, ps, budget }),
        SuiteName::Sandwich => run_suite(&SandwichSuite {
            max_n: a.max_n.unwrap_or(14),
            ks,
            ps,
            budget,
            prec,
            slack: uint(5),
        }),
        SuiteName::Kwise => run_suite(&KwiseSuite { max_n: a.max_n.unwrap_or(14), ks, ps }),
        SuiteName::Expectation => run_suite(&ExpectationSuite {
            cases: a.cases,
            max_n: a.max_n.unwrap_or(25),
            max_degree: 12,
            seed: a.seed,
        }),
    })
}

pub fn verify(a: &VerifyArgs, w: &mut dyn Write) -> Result<i32, CliError> {
    let records = suite_records(a)?;
    let json: Vec<RecordJson> = records.iter().map(RecordJson).collect();
    w.write_all(to_json(&json)?.as_bytes())?;
    let failed = records.iter().filter(|r| !r.pass).count();
    eprintln!("kwise: {} checks, {failed} failed", records.len());
    Ok(if failed == 0 { 0 } else { 2 })
}

pub fn sample(a: &SampleArgs, w: &mut dyn Write) -> Result<i32, CliError> {
    if a.count == 0 {
        return Err(CliError::Input("count must be positive".into()));
    }
    let s = spec(a.n, &a.p)?;
    let cert = compute_max(&s, a.k, a.method.single(), a.budget.max_candidates)?;
    let joint = lift_to_joint(cert.distribution);
    let mut sampler = Sampler::new(&joint, a.seed);
    let mut line = Vec::with_capacity(a.n as usize + 1);
    for _ in 0..a.count {
        line.clear();
        line.extend(sampler.next_bits());
        line.push(b'\n');
        w.write_all(&line)?;
    }
    Ok(0)
}

/// Entry point shared by the binary and the tests: parses `args`, runs,
/// reports errors on stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kwise: {e}");
            e.exit_code()
        }
    }
}

/// Stdout wrapper used by `main`.
pub fn stdout() -> BufWriter<io::Stdout> {
    BufWriter::new(io::stdout())
}
