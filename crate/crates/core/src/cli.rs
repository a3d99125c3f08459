//! Command-line front end. Every command yields a [`CommandResult`] whose
//! payload is deterministic; wall time goes to stderr only.
//!
//! Exit codes: 0 pass or value, 1 verified false or budget exceeded,
//! 2 usage error.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::exact::rational::{self, Rational};
use crate::exact::RatFunc;
use crate::partitions::han_corollary_check;
use crate::qcurve::{self, TodaVariant};
use crate::toprec::form::PoleSum;
use crate::toprec::recursion::{pole_bound, toprec_wgn_bounded};
use crate::toprec::{self, s_matrix};
use crate::wavefunction as wf;
use crate::wedge::stationary_invariant;

/// Environment variable naming a directory for cached `W_{g,n}` forms.
pub const CACHE_ENV: &str = "P1CURVE_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(name = "p1curve", version, about = "Exact checks for the quantum curve of the projective line")]
pub struct Cli {
    /// Cap on every truncation order used by the command.
    #[arg(long, global = true, default_value_t = 12)]
    pub budget: i64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum XForm {
    Partition,
    Laguerre,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Recursion,
    Ydzero,
    Han,
    Toda,
    Theta,
    Ns,
    Qce,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Form,
    Expansion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Invariants,
    Xd,
    Smatrix,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The partition function X_d as a rational function of u = x/ħ.
    Xd {
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = XForm::Partition)]
        form: XForm,
        /// Also print X_d with u written as x/h.
        #[arg(long)]
        inflate: bool,
    },
    /// Runs an invariant suite; exit 0 iff every check passes.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Upper end of the suite's range; each suite has its own default.
        #[arg(long)]
        max: Option<usize>,
    },
    /// One stationary invariant <prod τ_b(ω)>_{g,n}^d.
    Gw {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Comma-separated descendant exponents.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// The correlation form W_{g,n} or its expansion at x = ∞.
    Wgn {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Emit::Form)]
        emit: Emit,
        /// Bound on the sum of descendant exponents in the expansion.
        #[arg(long)]
        order: Option<i64>,
        /// Comma-separated rational points z_1,…,z_n at which to evaluate.
        #[arg(long)]
        at: Option<String>,
    },
    /// Bulk tables; ranges are inclusive, written a..b.
    Table {
        #[arg(long, value_enum)]
        what: TableKind,
        #[arg(long, default_value = "0..4")]
        range: String,
        /// Number of insertions for the invariants table.
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// The skew primitive F_{g,n}: its conditions and expansion.
    Fgn {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        order: Option<i64>,
    },
    /// Wave-function identities: Bernoulli operator, S_0 and S_1,
    /// semi-classical limit, unit-insertion resummation, conjugation.
    PsiCheck {
        #[arg(long, default_value_t = 6)]
        order: i64,
    },
    /// The q = 0 Toda remnant and the quadratic relations for X_d.
    TodaCheck {
        #[arg(long, default_value_t = 8)]
        order: i64,
        #[arg(long, default_value_t = 4)]
        max: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Value,
}

/// `{check, params, pass, witness?}`.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub check: String,
    pub params: Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Verdict {
    fn new(check: &str, params: Value, pass: bool, witness: impl FnOnce() -> String) -> Verdict {
        Verdict {
            check: check.into(),
            params,
            pass,
            witness: if pass { None } else { Some(witness()) },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CommandResult {
    pub command: String,
    pub params: Value,
    pub status: Status,
    pub budget_used: i64,
    pub payload: Value,
    /// CSV view; absent for commands without a tabular form.
    #[serde(skip)]
    pub rows: Option<(Vec<String>, Vec<Vec<String>>)>,
}

impl CommandResult {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Fail => 1,
            _ => 0,
        }
    }
}

/// A failure that maps to an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Invalid(m) => CliError::Usage(m),
            e => CliError::Compute(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("usage error: {m}"),
            CliError::Compute(e) => e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

fn within_budget(what: &str, required: i64, budget: i64) -> CliResult<()> {
    if required > budget {
        return Err(CliError::Compute(Error::Budget {
            what: what.into(),
            required,
            budget,
        }));
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| usage(format!("cannot parse {what} entry {t:?}"))))
        .collect()
}

fn parse_range(s: &str) -> CliResult<(usize, usize)> {
    let (a, b) = s.split_once("..").ok_or_else(|| usage(format!("range {s:?} is not of the form a..b")))?;
    let a: usize = a.trim().parse().map_err(|_| usage(format!("bad range start in {s:?}")))?;
    let b: usize = b.trim().parse().map_err(|_| usage(format!("bad range end in {s:?}")))?;
    if a > b {
        return Err(usage(format!("empty range {s:?}")));
    }
    Ok((a, b))
}

fn text(r: &Rational) -> String {
    rational::to_text(r)
}

fn ratfunc_json(f: &RatFunc) -> Value {
    serde_json::to_value(f).expect("rational functions serialize")
}

fn verdict_rows(v: &[Verdict]) -> (Vec<String>, Vec<Vec<String>>) {
    let header = ["check", "params", "pass", "witness"].map(String::from).to_vec();
    let rows = v
        .iter()
        .map(|v| {
            vec![
                v.check.clone(),
                v.params.to_string(),
                v.pass.to_string(),
                v.witness.clone().unwrap_or_default(),
            ]
        })
        .collect();
    (header, rows)
}

fn verdicts_result(command: &str, params: Value, budget_used: i64, verdicts: Vec<Verdict>) -> CommandResult {
    let pass = verdicts.iter().all(|v| v.pass);
    CommandResult {
        command: command.into(),
        params,
        status: if pass { Status::Pass } else { Status::Fail },
        budget_used,
        rows: Some(verdict_rows(&verdicts)),
        payload: serde_json::to_value(&verdicts).expect("verdicts serialize"),
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> CliResult<CommandResult> {
    let budget = cli.budget;
    if budget < 0 {
        return Err(usage("budget must be non-negative"));
    }
    match &cli.command {
        Command::Xd { d, form, inflate } => cmd_xd(*d, *form, *inflate),
        Command::Verify { suite, max } => cmd_verify(*suite, *max, budget),
        Command::Gw { g, n, d, b } => cmd_gw(*g, *n, *d, b, budget),
        Command::Wgn { g, n, emit, order, at } => cmd_wgn(*g, *n, *emit, order.unwrap_or(budget.min(6)), at.as_deref(), budget),
        Command::Table { what, range, n } => cmd_table(*what, range, *n, budget),
        Command::Fgn { g, n, order } => cmd_fgn(*g, *n, order.unwrap_or(budget.min(6)), budget),
        Command::PsiCheck { order } => cmd_psi_check(*order, budget),
        Command::TodaCheck { order, max } => cmd_toda_check(*order, *max, budget),
    }
}

fn cmd_xd(d: usize, form: XForm, inflate: bool) -> CliResult<CommandResult> {
    let partition = qcurve::x_partition(d).value;
    let (value, equal) = match form {
        XForm::Partition => (partition, None),
        XForm::Laguerre => (qcurve::x_laguerre(d)?.value, None),
        XForm::Both => {
            let poles = qcurve::x_laguerre_poles(d);
            let ratio = qcurve::x_laguerre_ratio(d);
            let eq = partition == poles && partition == ratio;
            (partition, Some(eq))
        }
    };
    let mut payload = json!({ "d": d, "var": "u", "value": ratfunc_json(&value), "text": value.to_text("u") });
    if inflate {
        payload["inflated"] = json!(value.to_text("(x/h)"));
    }
    if let Some(eq) = equal {
        payload["forms_agree"] = json!(eq);
    }
    let status = match equal {
        Some(false) => Status::Fail,
        Some(true) => Status::Pass,
        None => Status::Value,
    };
    Ok(CommandResult {
        command: "xd".into(),
        params: json!({ "d": d, "form": format!("{form:?}").to_lowercase() }),
        status,
        budget_used: 0,
        rows: Some((
            vec!["d".into(), "num".into(), "den".into()],
            vec![vec![d.to_string(), value.num().to_text("u"), value.den().to_text("u")]],
        )),
        payload,
    })
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Recursion => "recursion",
        Suite::Ydzero => "ydzero",
        Suite::Han => "han",
        Suite::Toda => "toda",
        Suite::Theta => "theta",
        Suite::Ns => "ns",
        Suite::Qce => "qce",
        Suite::All => "all",
    }
}

fn default_max(s: Suite) -> usize {
    match s {
        Suite::Recursion | Suite::Ydzero => 20,
        Suite::Han => 12,
        Suite::Toda => 8,
        Suite::Theta => 4,
        Suite::Ns | Suite::Qce => 10,
        Suite::All => 0,
    }
}

const STABLE: [(usize, usize); 5] = [(0, 3), (1, 1), (0, 4), (1, 2), (2, 1)];

/// Verdicts of one suite and the largest order it used.
fn run_suite(s: Suite, max: usize, budget: i64) -> CliResult<(Vec<Verdict>, i64)> {
    let mut out = Vec::new();
    let mut used = 0;
    match s {
        Suite::Recursion => {
            for d in 1..=max {
                out.push(Verdict::new("xd-recursion", json!({ "d": d }), qcurve::verify_xd_recursion(d), || {
                    format!("defect {}", qcurve::xd_recursion_defect(d).to_text("u"))
                }));
            }
        }
        Suite::Ydzero => {
            for d in 1..=max {
                let y = qcurve::y_polynomial(d);
                out.push(Verdict::new("y-zero", json!({ "d": d }), y.is_zero(), || y.to_text("y")));
                out.push(Verdict::new("y-inductive-step", json!({ "d": d }), qcurve::y_inductive_step(d), || {
                    "Y_d(y) != Y_{d+1}(y+1) - Y_{d+1}(y)".into()
                }));
            }
        }
        Suite::Han => {
            for d in 1..=max {
                let r = han_corollary_check(d);
                out.push(Verdict::new("han", json!({ "d": d }), r.pass, || r.witness.clone().unwrap_or_default()));
            }
        }
        Suite::Toda => {
            for d in 0..=max {
                for v in [TodaVariant::Full, TodaVariant::OneLevel] {
                    let name = if v == TodaVariant::Full { "full" } else { "one-level" };
                    out.push(Verdict::new(
                        "toda-quadratic",
                        json!({ "d": d, "variant": name }),
                        qcurve::toda_quadratic_check(d, v),
                        || format!("quadratic relation fails at d={d}"),
                    ));
                }
            }
            let order = budget.min(8);
            used = order;
            let r = wf::toda_specialization_check(order, 0)?;
            out.push(Verdict::new("toda-remnant", json!({ "order": order }), r.remnant && r.kernel, || format!("{r:?}")));
        }
        Suite::Theta => {
            let order = budget;
            used = order;
            for mu in 1..=2 {
                for d in 0..=max {
                    let r = toprec::theta_expansion_check(mu, d, order)?;
                    out.push(Verdict::new("theta", json!({ "mu": mu, "d": d, "order": order }), r.pass, || {
                        format!("{:?}", r.first_mismatch)
                    }));
                }
            }
        }
        Suite::Ns => {
            let total = max as i64;
            within_budget("ns total order", total, budget)?;
            used = total;
            for (g, n) in STABLE {
                let r = toprec::ns_check(g, n, total)?;
                out.push(Verdict::new("ns", json!({ "g": g, "n": n, "total": total }), r.pass, || {
                    format!("{:?}", r.first_mismatch)
                }));
            }
        }
        Suite::Qce => {
            within_budget("qce degree-graded X order", 12, budget)?;
            used = 12;
            let r = wf::qce_verification(max)?;
            out.push(Verdict::new("qce-recursion", json!({ "d_max": max }), r.recursion, || {
                r.failing_link.clone().unwrap_or_default()
            }));
            out.push(Verdict::new("qce-conjugation", json!({ "k_max": 6, "order": 8 }), r.conjugation, || {
                "conjugation identities fail".into()
            }));
            out.push(Verdict::new("qce-degree-graded-x", json!({ "d_max": max.min(4), "order": 12 }), r.degree_graded, || {
                "wedge and partition sides of X_d disagree".into()
            }));
        }
        Suite::All => unreachable!("expanded by the caller"),
    }
    Ok((out, used))
}

fn cmd_verify(suite: Suite, max: Option<usize>, budget: i64) -> CliResult<CommandResult> {
    if max == Some(0) {
        return Err(usage("--max 0 gives an empty range"));
    }
    let suites: Vec<Suite> = if suite == Suite::All {
        vec![Suite::Recursion, Suite::Ydzero, Suite::Han, Suite::Toda, Suite::Theta, Suite::Ns, Suite::Qce]
    } else {
        vec![suite]
    };
    let mut verdicts = Vec::new();
    let mut used = 0;
    for s in suites {
        let mut m = max.unwrap_or_else(|| default_max(s));
        if s == Suite::Ns {
            m = m.min(budget as usize);
        }
        let (v, u) = run_suite(s, m, budget)?;
        verdicts.extend(v);
        used = used.max(u);
    }
    Ok(verdicts_result("verify", json!({ "suite": suite_name(suite), "max": max }), used, verdicts))
}

fn cmd_gw(g: usize, n: usize, d: usize, b: &str, budget: i64) -> CliResult<CommandResult> {
    let b: Vec<i64> = parse_list(b, "--b")?;
    if b.len() != n {
        return Err(usage(format!("--n {n} but {} exponents given", b.len())));
    }
    let required: i64 = b.iter().map(|x| x + 1).sum::<i64>().max(0);
    within_budget("invariant order", required, budget)?;
    let v = stationary_invariant(g, d, &b)?;
    let mut payload = json!({ "g": g, "n": n, "d": d, "b": b, "value": text(&v.value) });
    if v.dimension_violation {
        payload["warning"] = json!("exponents violate the dimension constraint; the invariant is 0");
    }
    Ok(CommandResult {
        command: "gw".into(),
        params: json!({ "g": g, "n": n, "d": d, "b": b }),
        status: Status::Value,
        budget_used: required,
        rows: Some((
            ["g", "n", "d", "b", "value"].map(String::from).to_vec(),
            vec![vec![g.to_string(), n.to_string(), d.to_string(), join(&b), text(&v.value)]],
        )),
        payload,
    })
}

fn join(b: &[i64]) -> String {
    b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// `W_{g,n}`, read from the cache directory when one is configured.
fn load_wgn(g: usize, n: usize, budget: i64) -> CliResult<PoleSum> {
    within_budget(&format!("pole order of W_{{{g},{n}}}"), pole_bound(g, n) as i64, budget)?;
    let chi = (2 * g + n).saturating_sub(2);
    let path = std::env::var_os(CACHE_ENV).map(|d| PathBuf::from(d).join(format!("w_{g}_{n}.json")));
    if let Some(p) = &path {
        if let Ok(s) = fs::read_to_string(p) {
            if let Ok(w) = serde_json::from_str::<PoleSum>(&s) {
                return Ok(w);
            }
        }
    }
    let w = (*toprec_wgn_bounded(g, n, chi)?).clone();
    if let Some(p) = path {
        // A cache that cannot be written is not an error.
        let _ = fs::create_dir_all(p.parent().expect("joined path")).and_then(|_| fs::write(&p, serde_json::to_string(&w).expect("forms serialize")));
    }
    Ok(w)
}

fn expansion_rows(exp: &BTreeMap<Vec<i64>, Rational>) -> (Value, (Vec<String>, Vec<Vec<String>>)) {
    let records: Vec<Value> = exp
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| json!({ "exponents": e, "value": text(c) }))
        .collect();
    let rows = exp
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| vec![join(e), text(c)])
        .collect();
    (Value::Array(records), (vec!["exponents".into(), "value".into()], rows))
}

fn cmd_wgn(g: usize, n: usize, emit: Emit, order: i64, at: Option<&str>, budget: i64) -> CliResult<CommandResult> {
    if n == 0 || 2 * g + n <= 2 {
        return Err(usage(format!("W_{{{g},{n}}} is unstable")));
    }
    let w = load_wgn(g, n, budget)?;
    let mut used = pole_bound(g, n) as i64;
    let (mut payload, rows) = match emit {
        Emit::Form => {
            let terms: Vec<Value> = w
                .terms()
                .iter()
                .map(|(k, c)| json!({ "coeff": text(c), "factors": k.iter().map(|p| ratfunc_json(&p.ratfunc())).collect::<Vec<_>>() }))
                .collect();
            (json!({ "g": g, "n": n, "var": "z", "terms": terms, "text": w.to_text() }), None)
        }
        Emit::Expansion => {
            within_budget("expansion order", order, budget)?;
            used = used.max(order);
            let exp = toprec::expansion::form_x_expansion(&w, order)?;
            let (records, rows) = expansion_rows(&exp);
            (json!({ "g": g, "n": n, "total": order, "coefficients": records }), Some(rows))
        }
    };
    if let Some(at) = at {
        let z: Vec<Rational> = parse_list::<String>(at, "--at")?
            .iter()
            .map(|s| rational::from_text(s).map_err(|_| usage(format!("bad rational {s:?}"))))
            .collect::<CliResult<_>>()?;
        if z.len() != n {
            return Err(usage(format!("{} points for {n} slots", z.len())));
        }
        payload["at"] = json!(z.iter().map(text).collect::<Vec<_>>());
        payload["value_at"] = json!(text(&w.eval(&z)?));
    }
    Ok(CommandResult {
        command: "wgn".into(),
        params: json!({ "g": g, "n": n, "emit": format!("{emit:?}").to_lowercase(), "order": order }),
        status: Status::Value,
        budget_used: used,
        rows,
        payload,
    })
}

fn cmd_table(what: TableKind, range: &str, n: usize, budget: i64) -> CliResult<CommandResult> {
    let (a, b) = parse_range(range)?;
    let (records, header, rows): (Vec<Value>, Vec<&str>, Vec<Vec<String>>) = match what {
        TableKind::Smatrix => {
            let ms: Vec<_> = (a..=b).map(s_matrix).collect();
            let rows = ms
                .iter()
                .map(|m| {
                    let mut r = vec![m.k.to_string()];
                    for mu in 1..=2 {
                        for nu in 1..=2 {
                            r.push(text(m.entry(mu, nu)));
                        }
                    }
                    r
                })
                .collect();
            let recs = ms.iter().map(|m| serde_json::to_value(m).expect("serializes")).collect();
            (recs, vec!["k", "s11", "s12", "s21", "s22"], rows)
        }
        TableKind::Xd => {
            let mut recs = Vec::new();
            let mut rows = Vec::new();
            for d in a..=b {
                let v = qcurve::x_partition(d).value;
                rows.push(vec![d.to_string(), v.num().to_text("u"), v.den().to_text("u")]);
                recs.push(json!({ "d": d, "value": ratfunc_json(&v) }));
            }
            (recs, vec!["d", "num", "den"], rows)
        }
        TableKind::Invariants => {
            if n == 0 {
                return Err(usage("--n must be positive"));
            }
            let mut recs = Vec::new();
            let mut rows = Vec::new();
            for d in a..=b {
                // sum (b_i + 1) = 2g - 2 + 2d + n stays within the budget.
                let mut g = 0;
                loop {
                    let s = 2 * g as i64 - 2 + 2 * d as i64;
                    if s + n as i64 > budget {
                        break;
                    }
                    if s >= 0 || (n == 1 && s == -2) {
                        for bs in sorted_tuples(n, s) {
                            let v = stationary_invariant(g, d, &bs)?.value;
                            rows.push(vec![g.to_string(), n.to_string(), d.to_string(), join(&bs), text(&v)]);
                            recs.push(json!({ "g": g, "n": n, "d": d, "b": bs, "value": text(&v) }));
                        }
                    }
                    g += 1;
                }
            }
            (recs, vec!["g", "n", "d", "b", "value"], rows)
        }
    };
    let kind = match what {
        TableKind::Invariants => "invariants",
        TableKind::Xd => "xd",
        TableKind::Smatrix => "smatrix",
    };
    Ok(CommandResult {
        command: "table".into(),
        params: json!({ "what": kind, "range": [a, b], "n": n }),
        status: Status::Value,
        budget_used: if what == TableKind::Invariants { budget } else { 0 },
        rows: Some((header.into_iter().map(String::from).collect(), rows)),
        payload: Value::Array(records),
    })
}

/// Non-decreasing tuples of length `n` with entries `>= 0` and sum `s`; the
/// single tuple `[-2]` when `n = 1`, `s = -2`.
fn sorted_tuples(n: usize, s: i64) -> Vec<Vec<i64>> {
    if s == -2 && n == 1 {
        return vec![vec![-2]];
    }
    fn rec(n: usize, s: i64, lo: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if n == 0 {
            if s == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut x = lo;
        while x * n as i64 <= s {
            cur.push(x);
            rec(n - 1, s - x, x, cur, out);
            cur.pop();
            x += 1;
        }
    }
    let mut out = Vec::new();
    rec(n, s, 0, &mut Vec::new(), &mut out);
    out
}

fn cmd_fgn(g: usize, n: usize, order: i64, budget: i64) -> CliResult<CommandResult> {
    if n == 0 || 2 * g + n <= 2 {
        return Err(usage(format!("F_{{{g},{n}}} is unstable")));
    }
    within_budget(&format!("pole order of W_{{{g},{n}}}"), pole_bound(g, n) as i64, budget)?;
    within_budget("expansion order", order, budget)?;
    let r = toprec::fgn_check(g, n, order)?;
    let exp = toprec::fgn_x_expansion(g, n, order)?;
    let (records, rows) = expansion_rows(&exp);
    Ok(CommandResult {
        command: "fgn".into(),
        params: json!({ "g": g, "n": n, "order": order }),
        status: if r.pass { Status::Pass } else { Status::Fail },
        budget_used: order.max(pole_bound(g, n) as i64),
        rows: Some(rows),
        payload: json!({
            "conditions": r.conditions,
            "first_mismatch": r.first_mismatch,
            "coefficients": records,
            "form": toprec::primitive_fgn(g, n)?.to_text(),
        }),
    })
}

fn cmd_psi_check(order: i64, budget: i64) -> CliResult<CommandResult> {
    if order < 1 {
        return Err(usage("--order must be positive"));
    }
    within_budget("ħ order", order, budget)?;
    let mut v = Vec::new();
    let a = wf::bernoulli_operator(order.max(2));
    let low = a.entropy_coeff() == rational::q(1)
        && a.coeff(0, 0, 1) == rational::qf(-1, 2)
        && a.coeff(1, -1, 0) == rational::qf(-1, 12);
    v.push(Verdict::new("bernoulli-operator", json!({ "order": order }), low, || a.to_text()));
    let s = toprec::s0_s1_closed_forms(2 * order + 1)?;
    v.push(Verdict::new("s0-s1-closed-forms", json!({ "order": 2 * order + 1 }), s.pass(), || format!("{s:?}")));
    let sc = wf::semiclassical_check()?;
    v.push(Verdict::new("semiclassical", json!({}), sc.pass, || format!("{sc:?}")));
    for (g, n, d) in [(0, 1, 0), (1, 1, 0), (0, 1, 1), (0, 2, 1)] {
        let r = wf::theta_resummation_check(g, n, d, order)?;
        v.push(Verdict::new("theta-resummation", json!({ "g": g, "n": n, "d": d, "order": order }), r.pass, || {
            format!("{:?}", r.first_mismatch)
        }));
    }
    let c = wf::conjugation_check(6, order)?;
    v.push(Verdict::new("conjugation", json!({ "k_max": 6, "order": order }), c.pass, || format!("{c:?}")));
    let graded = wf::log_psi_stable(2, order.min(8));
    v.push(Verdict::new("log-psi-grading", json!({ "levels": 2, "total": order.min(8) }), graded.is_ok(), || {
        graded.as_ref().err().map(|e| e.to_string()).unwrap_or_default()
    }));
    Ok(verdicts_result("psi-check", json!({ "order": order }), 2 * order + 1, v))
}

fn cmd_toda_check(order: i64, max: usize, budget: i64) -> CliResult<CommandResult> {
    within_budget("ħ order", order, budget)?;
    let r = wf::toda_specialization_check(order, max)?;
    let v = vec![
        Verdict::new("toda-remnant", json!({ "order": order }), r.remnant, || "exp of the second difference is not x/(x+h)".into()),
        Verdict::new("toda-kernel", json!({ "order": order }), r.kernel, || "kernel series differ".into()),
        Verdict::new("toda-quadratic-full", json!({ "d_max": max }), r.quadratic_full, || "full relation fails".into()),
        Verdict::new("toda-quadratic-one-level", json!({ "d_max": max }), r.quadratic_one_level, || {
            "one-level relation fails".into()
        }),
    ];
    Ok(verdicts_result("toda-check", json!({ "order": order, "max": max }), order, v))
}

/// Renders a result in the requested format.
pub fn render(r: &CommandResult, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(r).expect("results serialize") + "\n"),
        Format::Csv => {
            let (header, rows) = r.rows.as_ref().ok_or_else(|| usage(format!("{} has no CSV form", r.command)))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).map_err(|e| usage(e.to_string()))?;
            for row in rows {
                w.write_record(row).map_err(|e| usage(e.to_string()))?;
            }
            Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8"))
        }
        Format::Pretty => {
            let mut s = format!("{} {}: {:?}\n", r.command, r.params, r.status);
            if let Some((header, rows)) = &r.rows {
                s += &header.join("\t");
                s.push('\n');
                for row in rows {
                    s += &row.join("\t");
                    s.push('\n');
                }
            } else {
                s += &serde_json::to_string_pretty(&r.payload).expect("payload serializes");
                s.push('\n');
            }
            Ok(s)
        }
    }
}

/// Parses `args`, runs the command and returns `(exit code, stdout, stderr)`.
pub fn main_with_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, if code == 0 { e.to_string() } else { String::new() }, if code == 0 { String::new() } else { e.to_string() });
        }
    };
    let start = Instant::now();
    let outcome = run(&cli).and_then(|r| render(&r, cli.format).map(|s| (r.exit_code(), s)));
    let wall = format!("wall time {:.3}s\n", start.elapsed().as_secs_f64());
    match outcome {
        Ok((code, out)) => (code, out, wall),
        Err(e) => (e.exit_code(), String::new(), format!("{}\n{wall}", e.message())),
    }
}
