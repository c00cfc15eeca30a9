//! Command implementations. Each returns the text to print and an exit code
//! so that tests can drive them without a subprocess.

use manin_core::cone::{alpha, ConeRationalFunction};
use manin_core::counter::{self, asymptotic_report, CountReport, CountRow, Interval, Strategy};
use manin_core::fan::{validate_fan, CheckResult};
use manin_core::local::{
    characters_from, cyclic_decompositions, diagonal_factorization, local_integral, point_count_fp, qsigma,
    twisted_lattice_sum, unramified_character_transform,
};
use manin_core::rational::to_f64;
use manin_core::tamagawa::{euler_factor_coefficients, theta, EulerProduct};
use manin_core::{Error, Execution};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::fanfile::{FanFile, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    pub fn fail(code: i32, stderr: String) -> Self {
        Outcome { code, stdout: String::new(), stderr }
    }
}

fn from_core(e: Error) -> Outcome {
    match e {
        Error::BudgetExceeded { estimate, budget } => Outcome::fail(
            EXIT_BUDGET,
            format!("refused: search space estimate {estimate:.3e} exceeds budget {budget:.3e}\n"),
        ),
        e => Outcome::fail(EXIT_FAILED, format!("error: {e}\n")),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ValidateOutput {
    pub schema_version: u32,
    pub fan: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

pub fn validate(file: &FanFile, as_json: bool) -> Outcome {
    let report = validate_fan(&file.fan);
    let passed = report.all_passed();
    let stdout = if as_json {
        json(&ValidateOutput { schema_version: SCHEMA_VERSION, fan: file.name.clone(), passed, checks: report.checks })
    } else {
        let mut s = String::new();
        for c in &report.checks {
            let name = serde_json::to_value(c.check).expect("check kinds serialize");
            let name = name.as_str().unwrap_or_default();
            s.push_str(&format!("{name}: {}\n", if c.passed { "ok" } else { "FAILED" }));
            for w in &c.witnesses {
                s.push_str(&format!("  witness {}\n", serde_json::to_string(w).expect("witnesses serialize")));
            }
        }
        s.push_str(&format!("{}: {}\n", file.name, if passed { "valid" } else { "invalid" }));
        s
    };
    Outcome { code: if passed { EXIT_OK } else { EXIT_FAILED }, stdout, stderr: String::new() }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ConstantsOutput {
    pub schema_version: u32,
    pub fan: String,
    pub cutoff: u64,
    #[serde(with = "manin_core::rational")]
    pub alpha: BigRational,
    pub beta: u64,
    pub h_t: u64,
    pub k: usize,
    pub tau: Option<EulerProduct>,
    pub theta: Option<Interval>,
    pub provenance: Vec<String>,
}

pub fn constants(file: &FanFile, cutoff: u64, exec: Execution, as_json: bool) -> Outcome {
    let report = match theta(&file.fan, cutoff, exec) {
        Ok(r) => r,
        Err(e) => return from_core(e),
    };
    let out = ConstantsOutput {
        schema_version: SCHEMA_VERSION,
        fan: file.name.clone(),
        cutoff,
        alpha: report.alpha,
        beta: report.beta,
        h_t: report.h_t,
        k: report.k,
        tau: report.tau,
        theta: report.theta,
        provenance: report.provenance,
    };
    if as_json {
        return Outcome::ok(json(&out));
    }
    let mut s = format!(
        "fan   {}\nalpha {} ({:.6})\nbeta  {}\nh(T)  {}\nk     {}\n",
        out.fan,
        out.alpha,
        to_f64(&out.alpha),
        out.beta,
        out.h_t,
        out.k
    );
    match (&out.tau, &out.theta) {
        (Some(t), Some(th)) => {
            s.push_str(&format!("tau   [{:.10}, {:.10}] (primes ≤ {})\n", t.value.lo, t.value.hi, t.cutoff));
            s.push_str(&format!("Theta [{:.10}, {:.10}]\n", th.lo, th.hi));
        }
        _ => s.push_str("tau   refused: the fan carries a Galois action (nonsplit torus)\n"),
    }
    for p in &out.provenance {
        s.push_str(&format!("note: {p}\n"));
    }
    Outcome::ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountFormat {
    Csv,
    Json,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CountOutput {
    pub schema_version: u32,
    pub execution: Execution,
    pub budget: f64,
    pub theta_cutoff: u64,
    #[serde(flatten)]
    pub report: CountReport,
    pub notes: Vec<String>,
}

pub struct CountArgs {
    pub schedule: Vec<u64>,
    pub strategy: Strategy,
    pub format: CountFormat,
    pub budget: f64,
    pub cutoff: u64,
    pub exec: Execution,
}

pub fn count(file: &FanFile, args: &CountArgs) -> Outcome {
    if !file.fan.is_split() {
        return Outcome::fail(EXIT_FAILED, "error: counting is only implemented for split fans\n".into());
    }
    if args.schedule.is_empty() || args.schedule.contains(&0) {
        return Outcome::fail(EXIT_INPUT, "error: the schedule needs positive bounds\n".into());
    }
    let th = match theta(&file.fan, args.cutoff, args.exec) {
        Ok(r) => r,
        Err(e) => return from_core(e),
    };
    let theta_iv = th.theta.expect("split fans have Θ");
    let mut counts = Vec::with_capacity(args.schedule.len());
    for &b in &args.schedule {
        match counter::count(&file.fan, b, args.strategy, args.budget, args.exec) {
            Ok(n) => counts.push((b, n)),
            Err(e) => return from_core(e),
        }
    }
    let mut notes = Vec::new();
    let report = match asymptotic_report(&file.name, args.strategy, th.k, theta_iv, &counts) {
        Ok(r) => r,
        Err(Error::InsufficientSchedule(msg)) => {
            notes.push(format!("no two-term fit: {msg}"));
            let rows = counts
                .iter()
                .map(|&(b, n)| {
                    let p = counter::predicted(theta_iv.center(), th.k, b);
                    CountRow { bound: b, count: n, predicted: p, ratio: n as f64 / p }
                })
                .collect();
            CountReport { fan: file.name.clone(), strategy: args.strategy, k: th.k, theta: theta_iv, rows, fit: None }
        }
        Err(e) => return from_core(e),
    };
    let out = CountOutput {
        schema_version: SCHEMA_VERSION,
        execution: args.exec,
        budget: args.budget,
        theta_cutoff: args.cutoff,
        report,
        notes,
    };
    match args.format {
        CountFormat::Csv => {
            let mut o = Outcome::ok(out.report.to_csv());
            o.stderr = out.notes.iter().map(|n| format!("note: {n}\n")).collect();
            o
        }
        CountFormat::Json => Outcome::ok(json(&out)),
    }
}

pub fn xfunction(file: &FanFile) -> Outcome {
    match alpha(&file.fan) {
        Ok(a) => Outcome::ok(json::<ConeRationalFunction>(&a.xfunction)),
        Err(e) => from_core(e),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LocalCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LocalCheckOutput {
    pub schema_version: u32,
    pub fan: String,
    pub prime: u64,
    pub radius: u32,
    pub passed: bool,
    pub checks: Vec<LocalCheck>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|i| i * i <= p).all(|i| !p.is_multiple_of(i))
}

fn check(name: &str, r: manin_core::Result<(bool, String)>) -> LocalCheck {
    match r {
        Ok((passed, detail)) => LocalCheck { name: name.into(), passed, detail },
        Err(e) => LocalCheck { name: name.into(), passed: false, detail: format!("error: {e}") },
    }
}

fn local_checks(file: &FanFile, p: u64, r: u32) -> Vec<LocalCheck> {
    let fan = &file.fan;
    let mut out = vec![check("qsigma_degree", (|| {
        let decs = cyclic_decompositions(fan)?;
        let mut ok = true;
        for dec in &decs {
            let q = qsigma(fan, dec)?;
            ok &= q.constant_term() == 1.into() && q.has_degree_two_property();
        }
        Ok((ok, format!("{} cyclic decompositions, constant term 1, no linear monomials: {ok}", decs.len())))
    })())];
    if !fan.is_split() {
        out.push(LocalCheck {
            name: "split_identities".into(),
            passed: true,
            detail: "skipped: lattice sums and point counts need a split fan".into(),
        });
        return out;
    }
    let n = fan.n_rays();
    for w in [1u32, 2] {
        let s = vec![w; n];
        out.push(check(&format!("lattice_sum_s{w}"), (|| {
            let li = local_integral(fan, p, &s, r)?;
            let gap = to_f64(&(&li.closed_form - &li.partial));
            let ok = gap >= 0.0 && gap <= li.tail_bound;
            Ok((ok, format!("closed form minus partial sum {gap:.3e}, tail bound {:.3e}", li.tail_bound)))
        })()));
        out.push(check(&format!("diagonal_factorization_s{w}"), (|| {
            let (lhs, rhs) = diagonal_factorization(fan, p, w)?;
            Ok((lhs == rhs, format!("exact equality: {}", lhs == rhs)))
        })()));
    }
    out.push(check("twisted_transform", (|| {
        let s = vec![1u32; n];
        let y: Vec<f64> = (0..fan.dim()).map(|i| 0.37 + 0.61 * i as f64).collect();
        let theta = characters_from(fan, &y);
        let closed = unramified_character_transform(fan, p, &s, &theta)?;
        let sum = twisted_lattice_sum(fan, p, &s, &y, r)?;
        let tail = local_integral(fan, p, &s, r)?.tail_bound;
        let err = (closed - sum).norm();
        Ok((err <= tail + 1e-9, format!("|closed - sum| = {err:.3e}, allowed {:.3e}", tail + 1e-9)))
    })()));
    out.push(check("euler_factor", (|| {
        let coeffs = euler_factor_coefficients(fan)?;
        let pr = BigRational::from_integer(p.into());
        let mut series = BigRational::zero();
        for (i, &a) in coeffs.iter().enumerate() {
            series += BigRational::from_integer(a.into()) / num_traits::pow(pr.clone(), i);
        }
        let local = point_count_fp(fan, p)?;
        let ok = series == local.factor();
        Ok((ok, format!("{} points over F_{p}; factor {} matches series: {ok}", local.point_count, local.factor())))
    })()));
    out
}

pub fn localcheck(file: &FanFile, p: u64, r: u32, as_json: bool) -> Outcome {
    if !is_prime(p) {
        return Outcome::fail(EXIT_INPUT, format!("error: {p} is not prime\n"));
    }
    if r == 0 {
        return Outcome::fail(EXIT_INPUT, "error: radius must be positive\n".into());
    }
    let checks = local_checks(file, p, r);
    let passed = checks.iter().all(|c| c.passed);
    let out = LocalCheckOutput { schema_version: SCHEMA_VERSION, fan: file.name.clone(), prime: p, radius: r, passed, checks };
    let stdout = if as_json {
        json(&out)
    } else {
        out.checks
            .iter()
            .map(|c| format!("{}: {} ({})\n", c.name, if c.passed { "ok" } else { "FAILED" }, c.detail))
            .collect()
    };
    Outcome { code: if passed { EXIT_OK } else { EXIT_FAILED }, stdout, stderr: String::new() }
}
