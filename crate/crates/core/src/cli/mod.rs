//! The `qzeta` command line: expansions, relation checks, the rank table
//! and relation mining, with an optional on-disk expansion cache.
//!
//! Exit codes: 0 success, 1 nonzero residual, 2 usage or domain error,
//! 3 mined relation failed re-verification, 4 IO error.

pub mod cache;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::Error;
use crate::expander::{Expander, Kind};
use crate::genfun::{self, TSeries, WPoly};
use crate::index::Index;
use crate::qseries::QSeries;
use crate::ranklab::{self, MiningResult, Relation};
use crate::relations::{self, VerificationReport};

pub use cache::{CacheEntry, DiskCache, ENGINE_VERSION};

pub const DEFAULT_EXPAND_ORDER: usize = 13;
pub const DEFAULT_VERIFY_ORDER: usize = 40;

#[derive(Debug, Parser)]
#[command(name = "qzeta", version, about = "Exact q-series computations for q-multiple zeta values")]
pub struct Cli {
    /// Directory of the persistent expansion cache.
    #[arg(long, global = true, env = "QZETA_CACHE")]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the coefficients a_1..a_N of an expansion.
    Expand(ExpandArgs),
    /// Check an identity order by order.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Print a statistics table.
    #[command(subcommand)]
    Table(TableCommand),
    /// Find and certify linear relations among expansions of one weight.
    Mine(MineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// Index such as "(3,1)".
    #[arg(long)]
    pub index: String,
    #[arg(long, default_value_t = DEFAULT_EXPAND_ORDER)]
    pub order: usize,
    /// The q-series itself rather than the modified normalization.
    #[arg(long)]
    pub raw: bool,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct IndexOrder {
    #[arg(long)]
    pub index: String,
    #[arg(long, default_value_t = DEFAULT_VERIFY_ORDER)]
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Raw,
    Modified,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Cyclic sum formula for an index with a part >= 2.
    Cyclic(IndexOrder),
    /// The per-rotation lemma behind the cyclic sum formula.
    Lemma(IndexOrder),
    /// Ohno relation of height l.
    Ohno {
        #[command(flatten)]
        io: IndexOrder,
        #[arg(long, default_value_t = 0)]
        l: u32,
    },
    /// Duality zeta(k) = zeta(k^dagger).
    Duality(IndexOrder),
    /// The generating-function identity through weighted degree K.
    OhnoZagier {
        #[arg(long)]
        weight: usize,
        #[arg(long, default_value_t = DEFAULT_VERIFY_ORDER)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Form::Both)]
        form: Form,
    },
    /// q-difference recurrences of the one-variable polylogarithm.
    Qdiff {
        #[command(flatten)]
        io: IndexOrder,
        /// t-truncation.
        #[arg(long, default_value_t = 8)]
        terms: usize,
    },
    /// Second-order q-difference equation of the generating function.
    Qhyp {
        #[arg(long)]
        weight: usize,
        #[arg(long, default_value_t = 8)]
        terms: usize,
        #[arg(long, default_value_t = DEFAULT_VERIFY_ORDER)]
        order: usize,
    },
    /// Product formula for the logarithmic generating series.
    LogProduct {
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long, default_value_t = DEFAULT_VERIFY_ORDER)]
        order: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum TableCommand {
    /// Ranks of the coefficient matrices and the proved upper bound, as TSV.
    Rank {
        #[arg(long, default_value_t = 8)]
        max_weight: usize,
        /// Allow weights 9 and 10.
        #[arg(long)]
        extended: bool,
    },
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long)]
    pub weight: usize,
    /// Re-verify every relation with fresh expansions through this order
    /// (default: last matrix row + 50).
    #[arg(long)]
    pub verify_order: Option<usize>,
    /// Matrix rows (default: columns + max(20, columns)).
    #[arg(long)]
    pub rows: Option<usize>,
    /// Use every admissible index of weight 2..=k.
    #[arg(long)]
    pub mixed: bool,
    /// JSON-lines certificate file; a `.txt` mirror is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Residual(String),
    Usage(String),
    Reverification(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Residual(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Reverification(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Residual(m) | CliError::Usage(m) | CliError::Reverification(m) | CliError::Io(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_index(s: &str) -> CliResult<Index> {
    s.parse::<Index>().map_err(CliError::from)
}

fn admissible(s: &str) -> CliResult<Index> {
    let k = parse_index(s)?;
    if !k.is_admissible() {
        return Err(Error::NotAdmissible(k).into());
    }
    Ok(k)
}

/// Runs a parsed command, loading and saving the disk cache around it.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let disk = cli.cache_dir.as_deref().map(DiskCache::new);
    if let Some(d) = &disk {
        d.load_into(Expander::global())
            .map_err(|e| CliError::Io(format!("reading cache {}: {e}", d.dir().display())))?;
    }
    let result = dispatch(cli.command, out);
    if let Some(d) = &disk {
        d.store_from(Expander::global())
            .map_err(|e| CliError::Io(format!("writing cache {}: {e}", d.dir().display())))?;
    }
    result
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CliResult<()> {
    match cmd {
        Command::Expand(a) => cmd_expand(&a, out),
        Command::Verify(v) => cmd_verify(v, out),
        Command::Table(TableCommand::Rank { max_weight, extended }) => cmd_table_rank(max_weight, extended, out),
        Command::Mine(a) => cmd_mine(&a, out),
    }
}

// ---------------------------------------------------------------------------
// expand

pub fn cmd_expand(a: &ExpandArgs, out: &mut dyn Write) -> CliResult<()> {
    let k = admissible(&a.index)?;
    if a.order == 0 {
        return Err(CliError::Usage("--order must be at least 1".into()));
    }
    let kind = if a.raw { Kind::Raw } else { Kind::Modified };
    let s = Expander::global().get(&k, kind, a.order)?;
    let coeffs: Vec<String> = s.coeffs()[1..].iter().map(ToString::to_string).collect();
    let text = match a.format {
        Format::Plain => coeffs.join(" ") + "\n",
        Format::Table => {
            let mut t = String::from("index");
            for n in 1..=a.order {
                write!(t, "\t{n}").unwrap();
            }
            writeln!(t, "\n{k}\t{}", coeffs.join("\t")).unwrap();
            t
        }
        Format::Json => {
            let v = json!({
                "index": k.parts(),
                "kind": kind,
                "order": a.order,
                "coeffs": coeffs,
            });
            v.to_string() + "\n"
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// verify

fn first_nonzero_q(s: &QSeries) -> Option<usize> {
    s.first_nonzero().map(|(n, _)| n)
}

fn first_failure_wpoly(p: &WPoly) -> Option<usize> {
    p.terms().values().filter_map(first_nonzero_q).min()
}

fn first_failure_tseries<'a>(ts: impl IntoIterator<Item = &'a TSeries>) -> Option<usize> {
    ts.into_iter()
        .flat_map(|t| t.coeffs().iter().filter_map(first_nonzero_q))
        .min()
}

fn report_line(out: &mut dyn Write, label: &str, order: usize, failure: Option<String>) -> CliResult<()> {
    match failure {
        None => {
            writeln!(out, "PASS {label} through q^{order}")?;
            Ok(())
        }
        Some(detail) => {
            writeln!(out, "FAIL {label}: {detail}")?;
            Err(CliError::Residual(format!("{label}: {detail}")))
        }
    }
}

fn relation_report(out: &mut dyn Write, label: &str, r: &VerificationReport) -> CliResult<()> {
    let failure = r
        .first_failure()
        .map(|(n, c)| format!("residual first nonzero at q^{n} (coefficient {c})"));
    report_line(out, label, r.trunc, failure)
}

fn at_order(n: Option<usize>) -> Option<String> {
    n.map(|n| format!("residual first nonzero at q^{n}"))
}

pub fn cmd_verify(v: VerifyCommand, out: &mut dyn Write) -> CliResult<()> {
    match v {
        VerifyCommand::Cyclic(io) => {
            let k = parse_index(&io.index)?;
            let r = relations::verify_cyclic(&k, io.order)?;
            relation_report(out, &format!("cyclic {k}"), &r)
        }
        VerifyCommand::Lemma(io) => {
            let k = parse_index(&io.index)?;
            let r = relations::verify_cyclic_lemma(&k, io.order)?;
            relation_report(out, &format!("lemma {k}"), &r)
        }
        VerifyCommand::Ohno { io, l } => {
            let k = parse_index(&io.index)?;
            let r = relations::verify_ohno(&k, l, io.order)?;
            relation_report(out, &format!("ohno {k} l={l}"), &r)
        }
        VerifyCommand::Duality(io) => {
            let k = parse_index(&io.index)?;
            let r = relations::verify_duality(&k, io.order)?;
            relation_report(out, &format!("duality {k}"), &r)
        }
        VerifyCommand::OhnoZagier { weight, order, form } => {
            if weight < 2 {
                return Err(Error::WeightTooSmall(weight).into());
            }
            let kinds: &[Kind] = match form {
                Form::Raw => &[Kind::Raw],
                Form::Modified => &[Kind::Modified],
                Form::Both => &[Kind::Raw, Kind::Modified],
            };
            let mut failed = None;
            for &kind in kinds {
                let lhs = genfun::ohno_zagier_lhs(weight, order, kind)?;
                let rhs = genfun::ohno_zagier_rhs(weight, order, kind)?;
                let label = format!("ohno-zagier K={weight} {}", kind_name(kind));
                if let Err(e) = report_line(out, &label, order, at_order(first_failure_wpoly(&(&lhs - &rhs)))) {
                    failed.get_or_insert(e);
                }
            }
            failed.map_or(Ok(()), Err)
        }
        VerifyCommand::Qdiff { io, terms } => {
            let k = admissible(&io.index)?;
            let ok = genfun::verify_qdiff_recurrences(&k, terms, io.order);
            let failure = (!ok).then(|| "recurrence residual nonzero".to_string());
            report_line(out, &format!("qdiff {k} t^{terms}"), io.order, failure)
        }
        VerifyCommand::Qhyp { weight, terms, order } => {
            if weight < 2 || terms < 2 {
                return Err(CliError::Usage("qhyp needs --weight >= 2 and --terms >= 2".into()));
            }
            let phi = genfun::phi0_t(weight, terms, order)?;
            let res = genfun::qhyp_residual(&phi, weight, terms, order);
            let label = format!("qhyp K={weight} t^{}", terms - 1);
            report_line(out, &label, order, at_order(first_failure_tseries(res.values())))
        }
        VerifyCommand::LogProduct { degree, order } => {
            let (lhs, rhs) = genfun::log_product_sides(degree, order)?;
            let diff = &lhs - &rhs;
            report_line(out, &format!("log-product s^{degree}"), order, at_order(first_failure_tseries([&diff])))
        }
    }
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Raw => "raw",
        Kind::Modified => "modified",
    }
}

// ---------------------------------------------------------------------------
// table

pub const TABLE_MAX_WEIGHT: usize = 8;
pub const TABLE_MAX_WEIGHT_EXTENDED: usize = 10;

pub fn cmd_table_rank(max_weight: usize, extended: bool, out: &mut dyn Write) -> CliResult<()> {
    let limit = if extended { TABLE_MAX_WEIGHT_EXTENDED } else { TABLE_MAX_WEIGHT };
    if max_weight < 2 {
        return Err(CliError::Usage("--max-weight must be at least 2".into()));
    }
    if max_weight > limit {
        let hint = if extended { "" } else { " (pass --extended for 9 and 10)" };
        return Err(CliError::Usage(format!("--max-weight is at most {limit}{hint}")));
    }
    let ks: Vec<usize> = (2..=max_weight).collect();
    let mut d = Vec::new();
    let mut ak = Vec::new();
    let mut ub = Vec::new();
    let mut ale = Vec::new();
    for &k in &ks {
        d.push(ranklab::d_k(k).expect("weights 2..=10 are tabulated"));
        ak.push(ranklab::rank_exact(&ranklab::build_ak(k, 0)?));
        ub.push(ranklab::upper_bound_from_relations(k)?);
        ale.push(ranklab::rank_exact(&ranklab::build_a_le_k(k)?));
    }
    let cumulative = |v: &[usize]| -> Vec<usize> {
        v.iter().scan(0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
    };
    let rows: [(&str, Vec<usize>); 7] = [
        ("weight", ks.clone()),
        ("d_k", d.clone()),
        ("rank A_k", ak.clone()),
        ("By cyclic and Ohno", ub),
        ("sum_{j<=k} d_j", cumulative(&d)),
        ("rank A_{<=k}", ale),
        ("sum_{j<=k} rank A_j", cumulative(&ak)),
    ];
    let mut text = String::new();
    for (label, vals) in rows {
        text.push_str(label);
        for v in vals {
            write!(text, "\t{v}").unwrap();
        }
        text.push('\n');
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// mine

fn coeff_json(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(v) => json!(v),
        None => json!(c.to_string()),
    }
}

/// `{"terms":[{"index":[7,2],"coeff":4},…],"verified_to":269}`
pub fn certificate_json(r: &Relation) -> Value {
    let terms: Vec<Value> = r
        .terms
        .iter()
        .map(|(k, c)| json!({"index": k.parts(), "coeff": coeff_json(c)}))
        .collect();
    json!({"terms": terms, "verified_to": r.verified_to})
}

/// `weight(s) | [(index, coeff), …] | verified_to=N`
pub fn certificate_line(r: &Relation) -> String {
    let weights: Vec<String> = r.weights().iter().map(ToString::to_string).collect();
    let terms: Vec<String> = r.terms.iter().map(|(k, c)| format!("({k}, {c})")).collect();
    format!("{} | [{}] | verified_to={}", weights.join(","), terms.join(", "), r.verified_to)
}

fn txt_mirror(path: &Path) -> PathBuf {
    path.with_extension("txt")
}

pub fn cmd_mine(a: &MineArgs, out: &mut dyn Write) -> CliResult<()> {
    if a.weight < 2 {
        return Err(Error::WeightTooSmall(a.weight).into());
    }
    let (n_cols, first_row) = if a.mixed {
        ((1usize << (a.weight - 1)) - 1, 1)
    } else {
        (1usize << (a.weight - 2), a.weight - 1)
    };
    let rows = a.rows.unwrap_or_else(|| ranklab::default_rows(n_cols));
    if rows == 0 {
        return Err(CliError::Usage("--rows must be positive".into()));
    }
    let verify = a.verify_order.unwrap_or(first_row + rows - 1 + 50);
    let res: MiningResult = if a.mixed {
        ranklab::mine_mixed_weight(a.weight, rows, verify)?
    } else {
        ranklab::mine_relations(a.weight, rows, verify)?
    };

    let mut jsonl = String::new();
    let mut txt = String::new();
    for r in &res.relations {
        jsonl.push_str(&certificate_json(r).to_string());
        jsonl.push('\n');
        txt.push_str(&certificate_line(r));
        txt.push('\n');
    }
    writeln!(out, "columns: {}", res.columns.len())?;
    writeln!(out, "rows: q^{}..q^{}", first_row, first_row + res.rows_used - 1)?;
    writeln!(out, "rank: {}", res.rank)?;
    writeln!(out, "kernel dimension: {}", res.kernel_dimension)?;
    match &a.out {
        Some(path) => {
            cache::write_atomic(path, jsonl.as_bytes())
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mirror = txt_mirror(path);
            cache::write_atomic(&mirror, txt.as_bytes())
                .map_err(|e| CliError::Io(format!("{}: {e}", mirror.display())))?;
        }
        None => out.write_all(txt.as_bytes())?,
    }
    let failed = res.relations.iter().filter(|r| r.verified_to == 0).count();
    if failed > 0 {
        return Err(CliError::Reverification(format!(
            "{failed} of {} relations failed re-verification through q^{verify}",
            res.relations.len()
        )));
    }
    Ok(())
}
