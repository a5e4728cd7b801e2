//! `kmx`: classification, root systems, affinization, weights, Gram blocks,
//! unitarity sweeps and twisted decompositions from the command line.
//!
//! Exit status is 0 on success, 1 when an input is rejected and 2 when a
//! resource limit (block cap) is hit.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kmx_core::affine::{affine_matrix, delta_and_lambda0, fundamental_weights_affine, twisted_decomposition, AffineAlgebra};
use kmx_core::cartan::{classify, principal_minors, Gcm};
use kmx_core::catalog::{resolve, CatalogEntry};
use kmx_core::finite_lie::automorphism::diagram_automorphism;
use kmx_core::finite_lie::{fundamental_weights_finite, FiniteAlgebra};
use kmx_core::reps::{
    block_text, build_module, consistency_check, threads_from_env, verify_unitarity, BlockRecord,
    FunctionalSpec, Overall,
};
use kmx_core::scalar::{format_rational, DEFAULT_EPSILON};
use kmx_core::verma::{BlockLabel, DEFAULT_BLOCK_CAP};
use kmx_core::{KmxError, Result};

#[derive(Parser, Debug)]
#[command(name = "kmx", version, about = "Kac-Moody algebras and unitarity of highest-weight modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a generalized Cartan matrix as Finite, Affine or Indefinite.
    Classify(Common),
    /// Positive roots of a finite algebra.
    Roots(Common),
    /// Untwisted affine extension of a finite algebra.
    Affinize(Common),
    /// Fundamental weights (finite, and affine with delta and mu_j).
    Weights(Common),
    /// A single Gram block.
    Gram(GramArgs),
    /// Gram blocks up to a depth, with an overall verdict.
    Unitarity(UnitarityArgs),
    /// Eigenspaces of a diagram automorphism.
    Twist(TwistArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Debug)]
struct Common {
    /// Catalog name such as A2, G2, A1~ or su(2,1).
    #[arg(long)]
    algebra: Option<String>,
    /// Cartan matrix as JSON, or a path to a JSON file.
    #[arg(long)]
    matrix: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModuleArgs {
    #[command(flatten)]
    common: Common,
    /// Functional spec file (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Per-token degree window M for the parabolic modes.
    #[arg(long)]
    window: Option<i64>,
    /// Maximum number of words in one block.
    #[arg(long, default_value_t = DEFAULT_BLOCK_CAP)]
    cap: usize,
    /// Tolerance for approximate scalars.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Args, Debug)]
struct GramArgs {
    #[command(flatten)]
    module: ModuleArgs,
    /// Weight drop, comma separated (e.g. 1,1).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    drop: Vec<i64>,
}

#[derive(Args, Debug)]
struct UnitarityArgs {
    #[command(flatten)]
    module: ModuleArgs,
    /// Largest total weight drop sum_i k_i.
    #[arg(long)]
    depth: i64,
    /// Random products used for the consistency check.
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Args, Debug)]
struct TwistArgs {
    #[command(flatten)]
    common: Common,
    /// Node permutation, 1-based and comma separated (e.g. 3,2,4,1).
    #[arg(long, value_delimiter = ',')]
    perm: Vec<usize>,
    /// Order q of the automorphism.
    #[arg(long)]
    order: usize,
}

enum Source {
    Catalog(CatalogEntry),
    Matrix(Gcm),
}

fn read_json_arg(s: &str) -> Result<Value> {
    if let Ok(v) = serde_json::from_str::<Value>(s) {
        return Ok(v);
    }
    let text = std::fs::read_to_string(s)
        .map_err(|e| KmxError::Parse(format!("{s} is neither JSON nor a readable file: {e}")))?;
    serde_json::from_str(&text).map_err(|e| KmxError::Parse(format!("{s}: {e}")))
}

fn read_json_file(p: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(p)
        .map_err(|e| KmxError::Parse(format!("cannot read {}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| KmxError::Parse(format!("{}: {e}", p.display())))
}

fn parse_matrix(v: &Value) -> Result<Vec<Vec<i64>>> {
    let bad = || KmxError::Parse("matrix must be a JSON array of integer rows".into());
    v.as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|row| row.as_array().ok_or_else(bad)?.iter().map(|x| x.as_i64().ok_or_else(bad)).collect())
        .collect()
}

impl Common {
    fn source(&self) -> Result<Source> {
        match (&self.algebra, &self.matrix) {
            (Some(name), None) => Ok(Source::Catalog(resolve(name)?)),
            (None, Some(m)) => Ok(Source::Matrix(Gcm::new(parse_matrix(&read_json_arg(m)?)?)?)),
            (None, None) => Err(KmxError::Rejected("give --algebra or --matrix".into())),
            (Some(_), Some(_)) => Err(KmxError::Rejected("give only one of --algebra and --matrix".into())),
        }
    }

    fn optional_source(&self) -> Result<Option<Source>> {
        if self.algebra.is_none() && self.matrix.is_none() {
            Ok(None)
        } else {
            self.source().map(Some)
        }
    }

    fn emit(&self, json: &Value, text: impl FnOnce() -> String) -> Result<()> {
        let body = match self.format {
            Format::Json => serde_json::to_string_pretty(json).map_err(|e| KmxError::Internal(e.to_string()))?,
            Format::Table => text(),
        };
        emit_string(self.out.as_deref(), &body)
    }
}

fn emit_string(out: Option<&Path>, body: &str) -> Result<()> {
    let body = if body.ends_with('\n') { body.to_string() } else { format!("{body}\n") };
    match out {
        Some(p) => std::fs::write(p, body)
            .map_err(|e| KmxError::Internal(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

impl Source {
    fn name(&self) -> String {
        match self {
            Source::Catalog(CatalogEntry::Finite { name, .. } | CatalogEntry::Affine { name, .. }) => name.clone(),
            Source::Catalog(CatalogEntry::SuN1 { n, .. }) => format!("su({n},1)"),
            Source::Matrix(g) => g.to_string(),
        }
    }

    /// The matrix the command acts on; affine catalog names give the extension.
    fn gcm(&self) -> Result<Gcm> {
        match self {
            Source::Catalog(CatalogEntry::Affine { finite, .. }) => {
                let alg = FiniteAlgebra::new(finite)?;
                Ok(Gcm::new(affine_matrix(&alg))?)
            }
            Source::Catalog(e) => Ok(e.finite_gcm().clone()),
            Source::Matrix(g) => Ok(g.clone()),
        }
    }

    /// A finite algebra; affine names are rejected.
    fn finite(&self) -> Result<FiniteAlgebra> {
        match self {
            Source::Catalog(CatalogEntry::Affine { name, .. }) => Err(KmxError::Rejected(format!(
                "{name} is affine; this command needs a finite algebra"
            ))),
            _ => FiniteAlgebra::new(&self.gcm()?),
        }
    }
}

fn rationals(v: &[kmx_core::Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn matrix_text(m: &[Vec<i64>]) -> String {
    m.iter().map(|r| format!("{r:?}")).collect::<Vec<_>>().join("\n")
}

fn cmd_classify(a: &Common) -> Result<()> {
    let gcm = a.source()?.gcm()?;
    let class = classify(&gcm);
    let minors: Vec<String> = rationals(&principal_minors(&gcm));
    a.emit(
        &json!({"matrix": gcm.entries(), "class": class.to_string(), "leadingMinors": minors}),
        || class.to_string(),
    )
}

fn cmd_roots(a: &Common) -> Result<()> {
    let src = a.source()?;
    let alg = src.finite()?;
    let labels: Vec<String> = alg.positive_roots().iter().map(|r| r.label()).collect();
    let json = json!({
        "algebra": src.name(),
        "rank": alg.rank(),
        "dim": alg.dim(),
        "positiveRoots": labels,
        "rootCount": 2 * alg.num_positive(),
        "highestRoot": alg.highest_root().label(),
    });
    a.emit(&json, || {
        let mut s = format!(
            "{}: rank {}, dim {}, {} roots, highest root {}\n",
            src.name(),
            alg.rank(),
            alg.dim(),
            2 * alg.num_positive(),
            alg.highest_root().label()
        );
        for l in &labels {
            s.push_str(l);
            s.push('\n');
        }
        s
    })
}

fn cmd_affinize(a: &Common) -> Result<()> {
    let src = a.source()?;
    let alg = src.finite()?;
    let aff = AffineAlgebra::new(alg.clone())?;
    let g = aff.gcm();
    let gens = |v: &[kmx_core::affine::LoopElement]| -> Vec<Value> { v.iter().map(|x| x.to_json(&alg)).collect() };
    let json = json!({
        "finite": src.name(),
        "matrix": g.entries(),
        "class": classify(g).to_string(),
        "marks": aff.marks(),
        "comarks": aff.comarks(),
        "generators": {
            "e": gens(&aff.generators().e),
            "f": gens(&aff.generators().f),
            "h": gens(&aff.generators().h),
        },
    });
    a.emit(&json, || {
        format!(
            "{}\nclass {}\nmarks {:?}\ncomarks {:?}",
            matrix_text(g.entries()),
            classify(g),
            aff.marks(),
            aff.comarks()
        )
    })
}

fn cmd_weights(a: &Common) -> Result<()> {
    let src = a.source()?;
    match &src {
        Source::Catalog(CatalogEntry::Affine { finite, .. }) => {
            let alg = FiniteAlgebra::new(finite)?;
            let am = affine_matrix(&alg);
            let gcm = Gcm::new(am.clone())?;
            let (delta, lambda0) = delta_and_lambda0(&gcm)?;
            let fws = fundamental_weights_affine(finite, &am[0][1..])?;
            let json = json!({
                "algebra": src.name(),
                "delta": delta,
                "lambda0": lambda0,
                "fundamental": fws,
            });
            a.emit(&json, || {
                let mut s = format!("delta marks {:?}\nLambda_0 hValues {:?}\n", delta.marks, rationals(&lambda0.h_values));
                for f in &fws {
                    s.push_str(&format!(
                        "Lambda_{} = L_{} + {} Lambda_0, hValues {:?}, L_{} = {:?}\n",
                        f.node,
                        f.node,
                        format_rational(&f.mu),
                        rationals(&f.weight.h_values),
                        f.node,
                        rationals(&f.finite_coords)
                    ));
                }
                s
            })
        }
        _ => {
            let gcm = src.finite()?.gcm().clone();
            let fw = fundamental_weights_finite(&gcm)?;
            let rows: Vec<Vec<String>> = fw.iter().map(|r| rationals(r)).collect();
            a.emit(&json!({"algebra": src.name(), "fundamental": rows}), || {
                rows.iter()
                    .enumerate()
                    .map(|(j, r)| format!("L_{} = {:?}", j + 1, r))
                    .collect::<Vec<_>>()
                    .join("\n")
            })
        }
    }
}

fn load_module(m: &ModuleArgs) -> Result<kmx_core::reps::HighestWeightModule> {
    let spec = FunctionalSpec::from_json(&read_json_file(&m.spec)?, m.epsilon)?;
    let src = m.common.optional_source()?;
    let algebra = match &src {
        Some(s) => Some((s.name(), s.gcm()?)),
        None => None,
    };
    let mut module = build_module(&spec, algebra.as_ref().map(|(n, g)| (n.as_str(), g)))?;
    module.context = module.context.clone().with_cap(m.cap);
    Ok(module)
}

fn check_nonneg(name: &str, v: Option<i64>) -> Result<()> {
    match v {
        Some(x) if x < 0 => Err(KmxError::Rejected(format!("--{name} must be nonnegative"))),
        _ => Ok(()),
    }
}

fn cmd_gram(a: &GramArgs) -> Result<()> {
    check_nonneg("window", a.module.window)?;
    let module = load_module(&a.module)?;
    let ctx = &module.context;
    let window = match ctx.mode() {
        kmx_core::verma::Mode::StandardBorel => None,
        _ => Some(a.module.window.ok_or_else(|| KmxError::Rejected("parabolic modules need --window".into()))?),
    };
    let block = ctx.gram_block(&BlockLabel { drop: a.drop.clone(), window })?;
    module.check_degrees()?;
    let rec = BlockRecord::from_block(ctx, &block);
    let body = match a.module.common.format {
        Format::Json => rec.to_json_string()?,
        Format::Table => {
            let mut s = String::new();
            block_text(&rec, &mut s);
            s
        }
    };
    emit_string(a.module.common.out.as_deref(), &body)
}

fn cmd_unitarity(a: &UnitarityArgs) -> Result<i32> {
    check_nonneg("depth", Some(a.depth))?;
    check_nonneg("window", a.module.window)?;
    let module = load_module(&a.module)?;
    let mut report = verify_unitarity(&module, a.depth, a.module.window, threads_from_env())?;
    if a.samples > 0 {
        report.consistency = Some(consistency_check(&module, a.samples, 1)?);
    }
    let body = match a.module.common.format {
        Format::Json => report.to_json_string()?,
        Format::Table => report.to_text(),
    };
    emit_string(a.module.common.out.as_deref(), &body)?;
    Ok(match report.overall {
        Overall::Inconclusive { reason } => {
            eprintln!("kmx: {reason}");
            2
        }
        _ if report.consistency.as_ref().is_some_and(|c| !c.passed) => 1,
        _ => 0,
    })
}

fn cmd_twist(a: &TwistArgs) -> Result<()> {
    let src = a.common.source()?;
    let alg = src.finite()?;
    if a.perm.contains(&0) {
        return Err(KmxError::Rejected("--perm nodes are numbered from 1".into()));
    }
    let perm: Vec<usize> = a.perm.iter().map(|p| p - 1).collect();
    let psi = diagram_automorphism(&alg, &perm, a.order)?;
    let dec = twisted_decomposition(&alg, &psi)?;
    let closed = dec.check_closure(&alg, &psi)?;
    let bases: Vec<Vec<Value>> = dec
        .named_bases(&alg)
        .into_iter()
        .map(|basis| {
            basis
                .into_iter()
                .map(|v| Value::Object(v.into_iter().map(|(k, c)| (k, Value::String(c))).collect()))
                .collect()
        })
        .collect();
    let json = json!({
        "algebra": src.name(),
        "perm": a.perm,
        "order": dec.q,
        "dims": dec.dims,
        "closure": closed,
        "bases": bases,
    });
    a.common.emit(&json, || format!("dims {:?}\nclosure {}", dec.dims, if closed { "ok" } else { "FAILED" }))
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Classify(a) => cmd_classify(a).map(|_| 0),
        Command::Roots(a) => cmd_roots(a).map(|_| 0),
        Command::Affinize(a) => cmd_affinize(a).map(|_| 0),
        Command::Weights(a) => cmd_weights(a).map(|_| 0),
        Command::Gram(a) => cmd_gram(a).map(|_| 0),
        Command::Unitarity(a) => cmd_unitarity(a),
        Command::Twist(a) => cmd_twist(a).map(|_| 0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("kmx: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
