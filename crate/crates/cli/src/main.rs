use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use gapfactor::algebra::local::{factor_in_d, normalize_to_D, DFactorization};
use gapfactor::dvr::{ContextJson, DvrContext};
use gapfactor::gadgets::construct::default_separation;
use gapfactor::gadgets::hypotheses::check_atomic_hypotheses;
use gapfactor::gadgets::intr::{factorization_intr, length_set_intr};
use gapfactor::gadgets::{gadget_psi_s, gadget_stone_weierstrass, gadget_zigzag_shifted, Base, IntRElement};
use gapfactor::monoid::length_set_closed_form;
use gapfactor::par::Mode;
use gapfactor::parse::parse_field_element;
use gapfactor::tables::{catenary_table, lengths_table, Table};
use gapfactor::verify::{run_suite, SuiteReport, VerifyConfig, SUITES};
use gapfactor::{CoeffField, Group, GroupElement, MonoidSpec};

#[derive(Parser, Debug)]
#[command(
    name = "gapfactor",
    version,
    about = "Factorization invariants of localized gap-monoid domains and their IntR rings"
)]
struct Cli {
    /// Monoid, e.g. "Q: 0 u [1,inf)" or "Q: 0 u [2,3] u [4,inf)".
    #[arg(long, global = true, default_value = "Q: 0 u [1,inf)")]
    monoid: String,
    /// Coefficient field: Q or F<p>.
    #[arg(long, global = true, default_value = "Q")]
    field: String,
    #[arg(long, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Compute rows on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the hypotheses under which IntR(K, D) is local and atomic.
    Analyze,
    /// Length sets in D and IntR(K, D) over a grid of values.
    Lengths(Range),
    /// Catenary degrees and constructed chain step sizes over a grid.
    Catenary(Range),
    /// Build a gadget and print its profile and membership certificate.
    Gadget {
        #[command(subcommand)]
        kind: GadgetKind,
    },
    /// Factor an element of D, or with --context an element of IntR(E, V).
    Factor {
        element: String,
        /// A length, or "all".
        #[arg(default_value = "all")]
        length: String,
        /// DVR context JSON file: {field, points, N}.
        #[arg(long)]
        context: Option<PathBuf>,
    },
    /// Run verification suites: a number 1-9, a name, or "all".
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = VerifyConfig::default().seed)]
        seed: u64,
    },
}

#[derive(clap::Args, Debug)]
struct Range {
    #[arg(long, default_value = "1")]
    from: String,
    #[arg(long, default_value = "12")]
    to: String,
    /// Grid denominator.
    #[arg(long = "grid-q", default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    grid_q: u64,
}

#[derive(Subcommand, Debug)]
enum GadgetKind {
    /// φ_{α, α′, ε}: value α below the window, α′ above it.
    Zigzag {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        alpha_prime: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value = "0")]
        shift: String,
    },
    /// The Stone-Weierstrass gadget at b.
    Sw {
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "1")]
        t_exp: String,
    },
    /// ψ_s for a finite point set over Γ = Z.
    Psi {
        #[arg(long)]
        s: String,
        /// Comma-separated points of E, including s.
        #[arg(long, value_delimiter = ',')]
        points: Vec<String>,
    },
}

/// Input problems exit with 2, failed verification with 1.
enum Outcome {
    Ok,
    Failed,
}

struct Env {
    spec: MonoidSpec,
    field: CoeffField,
    format: Format,
    mode: Mode,
}

fn ge(s: &str) -> Result<GroupElement> {
    s.parse().map_err(|e| anyhow::anyhow!("bad value '{s}': {e}"))
}

fn pretty<T: Serialize>(x: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(x)? + "\n")
}

fn emit_table<R>(t: &Table<R>, format: Format) -> Result<String>
where
    R: Serialize + serde::de::DeserializeOwned,
{
    Ok(match format {
        Format::Json => t.to_json()? + "\n",
        Format::Csv => t.to_csv()?,
    })
}

fn gadget(kind: &GadgetKind, env: &Env) -> Result<String> {
    let group = env.spec.group();
    let (elem, base) = match kind {
        GadgetKind::Zigzag {
            alpha,
            alpha_prime,
            eps,
            shift,
        } => {
            let e = gadget_zigzag_shifted(
                &ge(alpha)?,
                &ge(alpha_prime)?,
                &ge(eps)?,
                &ge(shift)?,
                &group,
                env.field,
            )?;
            (e, Base::Monoid(env.spec.clone()))
        }
        GadgetKind::Sw { b, t_exp } => {
            let b = parse_field_element(env.field, b)?;
            (
                gadget_stone_weierstrass(&b, &ge(t_exp)?, &group)?,
                Base::Valuation(group),
            )
        }
        GadgetKind::Psi { s, points } => {
            let s = parse_field_element(env.field, s)?;
            let points = points
                .iter()
                .map(|p| parse_field_element(env.field, p))
                .collect::<Result<Vec<_>, _>>()?;
            if !points.contains(&s) {
                bail!("s must be one of the points");
            }
            let c = default_separation(&s, &points)?;
            let e = gadget_psi_s(&s, &c, &GroupElement::one(), &Group::Integers, &points)?;
            (e, Base::Valuation(Group::Integers))
        }
    };
    let e = elem.certify(&base)?;
    pretty(&json!({ "schema": "1", "base": base.to_string(), "gadget": e.to_json() }))
}

fn d_entry(z: &DFactorization) -> Value {
    json!({
        "length": z.len(),
        "factors": z.factors.iter().map(|f| f.element.to_string()).collect::<Vec<_>>(),
        "values": z.factors.iter().map(|f| f.value.to_string()).collect::<Vec<_>>(),
    })
}

fn intr_entry(z: &[IntRElement]) -> Value {
    json!({
        "length": z.len(),
        "factors": z.iter().map(|f| f.func.to_string()).collect::<Vec<_>>(),
        "alphas": z.iter().map(|f| f.alpha.value.as_ref().map(|a| a.to_string())).collect::<Vec<_>>(),
    })
}

fn factor(element: &str, length: &str, env: &Env) -> Result<String> {
    let wanted: Option<u64> = match length {
        "all" => None,
        n => Some(
            n.parse()
                .with_context(|| format!("length must be a number or \"all\", got '{n}'"))?,
        ),
    };
    let x = parse_field_element(env.field, element)?;
    let cert = normalize_to_D(&x, &env.spec)?;
    let d = cert
        .certificate()
        .with_context(|| format!("{element} is not certified to lie in D"))?;
    let v = d.value.clone();
    if !env.spec.is_one_gap() {
        bail!("factorizations are constructed on the one-gap monoid only");
    }
    let d_lengths = length_set_closed_form(&env.spec, &v)?;
    let pick = |all: Vec<u64>| -> Vec<u64> { all.into_iter().filter(|l| wanted.is_none_or(|w| w == *l)).collect() };
    let d_facts = pick(d_lengths.to_set().into_iter().collect())
        .into_iter()
        .map(|l| Ok(d_entry(&factor_in_d(&x, &env.spec, l)?)))
        .collect::<Result<Vec<_>>>()?;
    let phi = IntRElement::constant(x, env.spec.group())?.certify(&Base::Monoid(env.spec.clone()))?;
    let intr_lengths = length_set_intr(&phi, &env.spec)?;
    let intr_facts = pick(intr_lengths.to_set().into_iter().collect())
        .into_iter()
        .map(|l| Ok(intr_entry(&factorization_intr(&phi, l, &env.spec)?)))
        .collect::<Result<Vec<_>>>()?;
    if let Some(w) = wanted {
        if d_facts.is_empty() && intr_facts.is_empty() {
            bail!("no factorization of length {w}: L_D = {d_lengths}, L_IntR = {intr_lengths}");
        }
    }
    pretty(&json!({
        "schema": "1",
        "element": element,
        "monoid": env.spec.to_string(),
        "field": env.field.to_string(),
        "value": v.to_string(),
        "d": { "lengths": d_lengths.to_string(), "factorizations": d_facts },
        "intr": { "lengths": intr_lengths.to_string(), "factorizations": intr_facts },
    }))
}

fn factor_dvr(element: &str, context: &PathBuf) -> Result<String> {
    let text = fs::read_to_string(context).with_context(|| format!("reading {}", context.display()))?;
    let j: ContextJson = serde_json::from_str(&text).context("context JSON")?;
    let ctx = DvrContext::from_json(&j)?;
    let phi = ctx.parse(element)?;
    let z = ctx.factor_into_atoms(&phi)?;
    pretty(&json!({
        "schema": "1",
        "context": ctx.to_json(),
        "value_vector": ctx.value_vector(&phi)?,
        "factorization": z.to_json(),
    }))
}

fn suite_ids(sel: &str) -> Result<Vec<u8>> {
    if sel == "all" {
        return Ok(SUITES.iter().map(|s| s.0).collect());
    }
    if let Ok(n) = sel.parse::<u8>() {
        if SUITES.iter().any(|s| s.0 == n) {
            return Ok(vec![n]);
        }
    }
    let key = sel.to_lowercase().replace(['-', '_'], " ");
    match SUITES.iter().find(|s| s.1.to_lowercase() == key) {
        Some(s) => Ok(vec![s.0]),
        None => bail!(
            "unknown suite '{sel}'; choose all, 1-9 or one of: {}",
            SUITES.iter().map(|s| s.1).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn verify(sel: &str, seed: u64, env: &Env) -> Result<(String, Outcome)> {
    let cfg = VerifyConfig { seed, mode: env.mode };
    let reports: Vec<SuiteReport> = suite_ids(sel)?.into_iter().map(|id| run_suite(id, &cfg)).collect();
    let ok = reports.iter().all(SuiteReport::passed);
    let text = match env.format {
        Format::Json => pretty(&json!({ "schema": "1", "seed": seed, "passed": ok, "suites": reports }))?,
        Format::Csv => {
            let mut s = String::new();
            for r in &reports {
                s.push_str(&format!("{r}\n"));
            }
            s.push_str(if ok { "all passed\n" } else { "FAILED\n" });
            s
        }
    };
    Ok((text, if ok { Outcome::Ok } else { Outcome::Failed }))
}

fn run(cli: &Cli) -> Result<(String, Outcome)> {
    let spec: MonoidSpec = cli.monoid.parse().with_context(|| format!("monoid '{}'", cli.monoid))?;
    let field: CoeffField = cli.field.parse().map_err(anyhow::Error::msg)?;
    let env = Env {
        spec,
        field,
        format: cli.format,
        mode: if cli.sequential {
            Mode::Sequential
        } else {
            Mode::Parallel
        },
    };
    let text = match &cli.cmd {
        Cmd::Analyze => pretty(&check_atomic_hypotheses(&env.spec, env.field))?,
        Cmd::Lengths(r) => emit_table(
            &lengths_table(&env.spec, env.field, &ge(&r.from)?, &ge(&r.to)?, r.grid_q, env.mode)?,
            env.format,
        )?,
        Cmd::Catenary(r) => emit_table(
            &catenary_table(&env.spec, env.field, &ge(&r.from)?, &ge(&r.to)?, r.grid_q, env.mode)?,
            env.format,
        )?,
        Cmd::Gadget { kind } => gadget(kind, &env)?,
        Cmd::Factor {
            element,
            length,
            context: Some(c),
        } => {
            if length != "all" {
                bail!("factorization in IntR(E, V) is unique; omit the length");
            }
            factor_dvr(element, c)?
        }
        Cmd::Factor {
            element,
            length,
            context: None,
        } => factor(element, length, &env)?,
        Cmd::Verify { suite, seed } => return verify(suite, *seed, &env),
    };
    Ok((text, Outcome::Ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(text, outcome)| {
        match &cli.out {
            Some(p) => fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
            None => print!("{text}"),
        }
        Ok(outcome)
    });
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
