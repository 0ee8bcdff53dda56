//! Configuration, suite orchestration and report rendering for the
//! `towercf` binary.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use towercf::analytic::{verify_analytic, DEFAULT_TOLERANCE};
use towercf::cfrac::{expand, expected_quotient, verify_convergence, verify_convergent_identities, verify_period_shape};
use towercf::embedding::PrecisionPolicy;
use towercf::field::{make_level, TowerPair};
use towercf::parse::parse_elem;
use towercf::units::{log_embedding_determinant, product_identities, verify_an_generation, verify_pell};
use towercf::{CheckRecord, Error, Result, Verdict};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const LEVEL_CEILING: u32 = 10;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub max_level: u32,
    pub precision_bits: u32,
    pub max_bits: u32,
    pub max_terms: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub fail_fast: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_level: 6,
            precision_bits: 256,
            max_bits: 8192,
            max_terms: 64,
            format: Format::Text,
            output: None,
            fail_fast: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=LEVEL_CEILING).contains(&self.max_level) {
            return Err(Error::Usage(format!("--max-level must be in 1..={LEVEL_CEILING}, got {}", self.max_level)));
        }
        if self.precision_bits < 32 {
            return Err(Error::Usage("--precision must be at least 32 bits".into()));
        }
        if self.precision_bits > self.max_bits {
            return Err(Error::Usage(format!(
                "--precision {} exceeds the ceiling --max-bits {}",
                self.precision_bits, self.max_bits
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::Usage("--max-terms must be at least 1".into()));
        }
        Ok(())
    }

    pub fn policy(&self) -> PrecisionPolicy {
        PrecisionPolicy { start_bits: 64.min(self.precision_bits), max_bits: self.max_bits }
    }

    fn snapshot(&self) -> Value {
        json!({
            "max_level": self.max_level,
            "precision_bits": self.precision_bits,
            "max_bits": self.max_bits,
            "max_terms": self.max_terms,
        })
    }
}

/// One check as it appears in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub id: String,
    pub paper_anchor: String,
    pub verdict: Verdict,
    pub data: Value,
    pub elapsed_ms: u64,
}

impl CheckEntry {
    fn from_record(r: CheckRecord, elapsed_ms: u64) -> Self {
        CheckEntry { id: r.id, paper_anchor: r.anchor, verdict: r.verdict, data: r.data, elapsed_ms }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub checks: Vec<CheckEntry>,
    pub overall: Verdict,
    pub version: String,
}

impl Report {
    pub fn new(command: impl Into<String>, cfg: &RunConfig, checks: Vec<CheckEntry>) -> Self {
        let overall = checks.iter().fold(Verdict::Pass, |acc, c| acc.and(c.verdict));
        Report { command: command.into(), config: cfg.snapshot(), checks, overall, version: VERSION.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.overall {
            Verdict::Pass => EXIT_PASS,
            Verdict::Fail => EXIT_FAIL,
            Verdict::Undecided => EXIT_UNDECIDED,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Undecided => "UNDECIDED",
            };
            out.push_str(&format!("{tag:<9} {}  ({} ms)\n", c.id, c.elapsed_ms));
            if let Some(text) = c.data.get("text").and_then(Value::as_str) {
                out.push_str(text);
            } else if c.verdict != Verdict::Pass {
                out.push_str(&format!("          {}\n          {}\n", c.paper_anchor, c.data));
            }
        }
        out.push_str(&format!("overall: {}\n", verdict_word(self.overall)));
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Undecided => "undecided",
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Pell,
    Kernel,
    Products,
    Analytic,
    Convergence,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pell" => Suite::Pell,
            "kernel" => Suite::Kernel,
            "products" => Suite::Products,
            "analytic" => Suite::Analytic,
            "convergence" => Suite::Convergence,
            "all" => Suite::All,
            _ => return Err(Error::Usage(format!("unknown suite {s}"))),
        })
    }
}

type Job = Box<dyn Fn() -> Result<Vec<CheckRecord>> + Send + Sync>;

struct Task {
    id: String,
    anchor: &'static str,
    job: Job,
}

fn task(id: String, anchor: &'static str, job: impl Fn() -> Result<CheckRecord> + Send + Sync + 'static) -> Task {
    Task { id, anchor, job: Box::new(move || job().map(|r| vec![r])) }
}

fn periods_for(n: u32) -> usize {
    match n {
        0..=4 => 10,
        5..=6 => 3,
        _ => 1,
    }
}

fn tasks(suite: Suite, cfg: &RunConfig) -> Vec<Task> {
    let levels = 1..=cfg.max_level;
    let policy = cfg.policy();
    let mut out = vec![];
    let all = suite == Suite::All;
    if all || suite == Suite::Pell {
        for n in levels.clone() {
            out.push(task(format!("pell-unit-n{n}"), "p_1 + q_1 X_n = (X_n+1)/(X_n-1) with relative norm 1", move || {
                verify_pell(n, &policy)
            }));
        }
    }
    if all || suite == Suite::Kernel {
        for n in levels.clone() {
            out.push(task(
                format!("relative-circular-units-n{n}"),
                "the module generated by -1 and (X_n+1)/(X_n-1) is the kernel of the norm on C_n",
                move || verify_an_generation(n),
            ));
        }
        let prec = cfg.precision_bits;
        for n in 1..=cfg.max_level.min(3) {
            out.push(task(
                format!("log-embedding-independence-n{n}"),
                "the logarithmic embedding of the basis sigma^i(1 + X_n) has nonzero determinant",
                move || {
                    let det = log_embedding_determinant(n, prec)?;
                    Ok(CheckRecord::new(
                        format!("log-embedding-independence-n{n}"),
                        "the logarithmic embedding of the basis sigma^i(1 + X_n) has nonzero determinant",
                        Verdict::from_bool(!det.contains_zero()),
                        json!({ "n": n, "determinant": towercf::analytic::interval_json(&det) }),
                    ))
                },
            ));
        }
    }
    if all || suite == Suite::Products {
        for n in levels.clone() {
            out.push(task(
                format!("product-identities-n{n}"),
                "exact product identities among conjugates of 1 + X_n, X_n - 1 and eps",
                move || product_identities(n),
            ));
        }
    }
    if all || suite == Suite::Convergence {
        for n in levels.clone() {
            out.push(task(
                format!("expansion-pattern-n{n}"),
                "nearest-point expansion of X_n: a_0 = 1, a_(2k-1) = 2(1+X_(n-1))^(-1), a_(2k) = 2",
                move || verify_period_shape(n, periods_for(n), &policy),
            ));
            let k = if n <= 4 { 50 } else { 20 };
            out.push(task(
                format!("convergent-identities-n{n}"),
                "p_k q_(k-1) - p_(k-1) q_k = (-1)^(k-1) and p_k q_(k-2) - p_(k-2) q_k = (-1)^k a_k",
                move || verify_convergent_identities(n, k, &policy),
            ));
        }
        for n in 2..=cfg.max_level.min(3) {
            out.push(task(
                format!("convergence-n{n}"),
                "convergents of X_n converge to sqrt(2 + tau(X_(n-1))) in every real embedding",
                move || verify_convergence(n, 40, &policy),
            ));
        }
    }
    if all || suite == Suite::Analytic {
        let (max_level, prec) = (cfg.max_level, cfg.precision_bits);
        out.push(Task {
            id: "analytic".into(),
            anchor: "certified numerics for the quotient pattern, minimality of eps and the level-two class number",
            job: Box::new(move || verify_analytic(max_level.max(2), prec, DEFAULT_TOLERANCE)),
        });
    }
    out
}

fn run_task(t: &Task) -> Vec<CheckEntry> {
    let start = Instant::now();
    let result = (t.job)();
    let ms = start.elapsed().as_millis() as u64;
    match result {
        Ok(records) => {
            let each = ms / records.len().max(1) as u64;
            records.into_iter().map(|r| CheckEntry::from_record(r, each)).collect()
        }
        Err(e) => vec![CheckEntry::from_record(CheckRecord::from_error(t.id.clone(), t.anchor, &e), ms)],
    }
}

/// Run a suite. Checks run in parallel unless `fail_fast` is set, in which
/// case they run in order and stop at the first check that does not pass.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Report {
    let list = tasks(suite, cfg);
    let checks: Vec<CheckEntry> = if cfg.fail_fast {
        let mut out = vec![];
        for t in &list {
            let entries = run_task(t);
            let stop = entries.iter().any(|e| e.verdict != Verdict::Pass);
            out.extend(entries);
            if stop {
                break;
            }
        }
        out
    } else {
        list.par_iter().map(run_task).collect::<Vec<_>>().into_iter().flatten().collect()
    };
    let name = match suite {
        Suite::Pell => "verify-pell",
        Suite::Kernel => "verify-kernel",
        Suite::Products => "verify-products",
        Suite::Analytic => "verify-analytic",
        Suite::Convergence => "verify-convergence",
        Suite::All => "verify",
    };
    Report::new(name, cfg, checks)
}

/// Render a purely periodic tail with an overline: `1; 2̄` or
/// `1; overline(2*X1 - 2, 2)`.
pub fn render_pattern(quotients: &[String], preperiod: usize, period: usize) -> String {
    if period == 0 {
        return quotients.join(", ");
    }
    let head = quotients[..preperiod].join(", ");
    let cycle = &quotients[preperiod..preperiod + period];
    let tail = if cycle.len() == 1 && cycle[0].chars().count() == 1 {
        format!("{}\u{0304}", cycle[0])
    } else {
        format!("overline({})", cycle.join(", "))
    };
    if head.is_empty() {
        tail
    } else {
        format!("{head}; {tail}")
    }
}

/// Expand `alpha` (default `X_n`) and compare with the closed-form pattern.
pub fn run_expand(n: u32, alpha: Option<&str>, cfg: &RunConfig) -> Result<Report> {
    if n == 0 {
        return Err(Error::Usage("--n must be at least 1: B_0 = Q has no expansion target".into()));
    }
    if n > LEVEL_CEILING {
        return Err(Error::Usage(format!("--n must be at most {LEVEL_CEILING}")));
    }
    let start = Instant::now();
    let generator = make_level(n)?.generator();
    let elem = match alpha {
        Some(s) => parse_elem(s, n)?,
        None => generator.clone(),
    };
    let pair = TowerPair::from_elem(&elem)?;
    let exp = expand(&pair, cfg.max_terms, &cfg.policy())?;
    let quotients: Vec<String> = exp.quotients.iter().map(|q| q.to_string()).collect();
    let is_generator = elem == generator;
    let matches = if is_generator {
        let mut ok = true;
        for (k, q) in exp.quotients.iter().enumerate() {
            ok &= *q == expected_quotient(n, k)?;
        }
        Some(ok)
    } else {
        None
    };
    let pattern = render_pattern(&quotients, exp.preperiod, exp.period);
    let mut text = format!(
        "          alpha: {}\n          quotients: {}\n          preperiod: {}  period: {}\n          pattern: {}\n",
        elem,
        quotients.join(", "),
        exp.preperiod,
        exp.period,
        pattern
    );
    if let Some(m) = matches {
        text.push_str(&format!("          matches 1; overline(2(1+X_(n-1))^(-1), 2): {}\n", if m { "yes" } else { "no" }));
    }
    let verdict = match matches {
        Some(false) => Verdict::Fail,
        _ => Verdict::Pass,
    };
    let record = CheckEntry {
        id: format!("expansion-n{n}"),
        paper_anchor: "nearest-point continued fraction with a_0 = 1".into(),
        verdict,
        data: json!({
            "n": n,
            "alpha": elem.to_string(),
            "quotients": quotients,
            "preperiod": exp.preperiod,
            "period": exp.period,
            "finite": exp.finite,
            "pattern": pattern,
            "matches_closed_form": matches,
            "text": text,
        }),
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    Ok(Report::new("expand", cfg, vec![record]))
}

/// Exit code for an error that stopped a command before a report existed.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::LevelLimit { .. } => EXIT_USAGE,
        Error::Undecided { .. } => EXIT_UNDECIDED,
        _ => EXIT_FAIL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_rendering() {
        assert_eq!(render_pattern(&["1".into(), "2".into()], 1, 1), "1; 2\u{0304}");
        let q = vec!["1".to_string(), "2*X1 - 2".into(), "2".into()];
        assert_eq!(render_pattern(&q, 1, 2), "1; overline(2*X1 - 2, 2)");
        assert_eq!(render_pattern(&["7".into()], 0, 0), "7");
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_ok());
        c.max_level = 11;
        assert!(c.validate().is_err());
        c.max_level = 0;
        assert!(c.validate().is_err());
        let c = RunConfig { precision_bits: 9000, ..RunConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn report_round_trips_through_json() {
        let cfg = RunConfig { max_level: 2, ..RunConfig::default() };
        let r = run_suite(Suite::Pell, &cfg);
        assert_eq!(r.overall, Verdict::Pass);
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn expand_level_two() {
        let cfg = RunConfig::default();
        let r = run_expand(2, None, &cfg).unwrap();
        let d = &r.checks[0].data;
        assert_eq!(d["period"], 2);
        assert_eq!(d["quotients"][1], "2*X1 - 2");
        assert_eq!(d["matches_closed_form"], true);
        assert!(matches!(run_expand(0, None, &cfg), Err(Error::Usage(_))));
    }
}
