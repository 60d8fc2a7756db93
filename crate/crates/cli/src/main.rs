//! `catmig`: validate `.cat` documents, migrate instances along
//! translations, check adjunctions, export triples and render tables.
//!
//! Exit codes: 0 success, 1 validation failure or mismatch, 2 parse error or
//! unknown name, 3 bound or enumeration cap exceeded.

mod render;
mod report;

use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use catmig::dsl::{self, Decl, Document, Env, Item};
use catmig::migration::{
    check_translation, hom_counts, run_pipeline, triangle_identities, Stage, Step,
};
use catmig::model::{count_homs, validate_instance, RewriteBudget};
use catmig::rdf::{export_triples, grothendieck};
use catmig::typing::{validate_typed, TypedInstance};
use catmig::{Bounds, Error, Instance, Translation};

use report::{table_counts, RunReport};

#[derive(Parser)]
#[command(name = "catmig", version, about = "Functorial data migration on categorical schemas")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Longest path explored when enumerating morphisms out of a vertex.
    #[arg(long, global = true, default_value_t = 16)]
    path_bound: usize,
    /// Largest number of elements a chase or a table may reach.
    #[arg(long, global = true, default_value_t = 1000)]
    saturation_bound: usize,
    /// Rewrite steps allowed when proving two paths equivalent.
    #[arg(long, global = true, default_value_t = 64)]
    rewrite_budget: usize,
    /// Print a JSON run report on standard output.
    #[arg(long, global = true)]
    json: bool,
    /// Leave wall time out of the report so output is byte-stable.
    #[arg(long, global = true)]
    stable: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check every instance, translation and typed instance in the files.
    Validate { files: Vec<PathBuf> },
    /// Apply one migration functor to a named instance.
    Migrate {
        kind: Kind,
        translation: String,
        instance: String,
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Name of the output instance.
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sequence of migrations, e.g. `--step sigma:F --step delta:G`.
    Pipeline {
        /// An instance or typed instance.
        start: String,
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// `KIND:NAME` with KIND one of delta, sigma, pi, sigma-hat, delta-hat, pi-hat.
        #[arg(long = "step")]
        steps: Vec<String>,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare hom-set sizes on both sides of both adjunctions.
    CheckAdjunction {
        translation: String,
        /// Instance on the source schema.
        source_instance: String,
        /// Instance on the target schema.
        target_instance: String,
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Largest hom-set to enumerate.
        #[arg(long, default_value_t = 100_000)]
        max_homs: usize,
        /// Replace the left pushforward by the empty instance.
        #[arg(long)]
        mutate_sigma: bool,
    },
    /// Write an instance as N-Triples-style lines.
    ExportRdf {
        instance: String,
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value = "http://example.org/catmig")]
        base: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the tables of an instance.
    Render {
        instance: String,
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
        /// Render only this table.
        #[arg(long)]
        table: Option<String>,
        /// File, or for CSV of several tables a directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Delta,
    Sigma,
    Pi,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    Csv,
}

enum Failure {
    Invalid(String),
    Input(String),
    Bound(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Input(_) => 2,
            Failure::Bound(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Input(m) | Failure::Bound(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SaturationBound { .. }
            | Error::BoundInstability { .. }
            | Error::EnumerationCap { .. } => Failure::Bound(e.to_string()),
            Error::Parse(_) | Error::UnknownVertex(_) | Error::UnknownArrow(_) => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

struct Loaded {
    docs: Vec<(String, Document)>,
    env: Env,
}

fn load(files: &[PathBuf]) -> Outcome<Loaded> {
    let mut env = Env::new();
    let mut docs = Vec::new();
    for f in files {
        let shown = f.display().to_string();
        let text = fs::read_to_string(f)
            .map_err(|e| Failure::Input(format!("{shown}: {e}")))?;
        let doc = dsl::parse_with(&text, &env)
            .map_err(|e| Failure::Input(format!("{shown}:{e}")))?;
        env.extend(&doc);
        docs.push((shown, doc));
    }
    Ok(Loaded { docs, env })
}

fn lookup<T: Clone>(
    map: &std::collections::HashMap<String, T>,
    kind: &str,
    name: &str,
) -> Outcome<T> {
    map.get(name)
        .cloned()
        .ok_or_else(|| Failure::Input(format!("no {kind} named `{name}`")))
}

fn unverified(f: &Translation, name: &str, budget: &RewriteBudget) -> Vec<String> {
    check_translation(f, budget)
        .issues
        .iter()
        .map(|i| format!("translation `{name}`: {i}"))
        .collect()
}

fn write_out(out: Option<&FsPath>, text: &str) -> Outcome<()> {
    match out {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// A document holding `i` and its schema, so it reads back on its own.
fn instance_document(name: &str, i: &Instance) -> Document {
    let schema = i.schema().clone();
    Document {
        decls: vec![
            Decl {
                name: schema.name().to_string(),
                item: Item::Schema(schema.clone()),
            },
            Decl {
                name: name.to_string(),
                item: Item::Instance {
                    schema: schema.name().to_string(),
                    instance: Arc::new(i.clone()),
                },
            },
        ],
    }
}

fn typed_document(name: &str, t: &TypedInstance) -> Document {
    let over = format!("{name}_type");
    let mut doc = instance_document(name, t.instance());
    doc.decls.push(Decl {
        name: over.clone(),
        item: Item::Instance {
            schema: t.over().schema().name().to_string(),
            instance: t.over().clone(),
        },
    });
    doc.decls.push(Decl {
        name: format!("{name}_typed"),
        item: Item::Typed {
            instance: name.to_string(),
            typing: over,
            typed: Arc::new(t.clone()),
        },
    });
    doc
}

struct Run {
    common: Common,
    bounds: Bounds,
    started: Instant,
}

impl Run {
    /// Sends `text` to `out` or standard output, and the report to standard
    /// output under `--json`. With `--json` and no `--out` the text travels
    /// inside the report.
    fn finish(&self, mut report: RunReport, text: Option<String>, out: Option<&FsPath>) -> Outcome<()> {
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        if !self.common.stable {
            report.wall_time_ms = Some(self.started.elapsed().as_secs_f64() * 1000.0);
        }
        if self.common.json {
            if let Some(t) = text {
                match out {
                    Some(_) => write_out(out, &t)?,
                    None => report.output = Some(t),
                }
            }
            let s = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{s}");
        } else if let Some(t) = text {
            write_out(out, &t)?;
        }
        Ok(())
    }
}

fn validate(run: &Run, files: &[PathBuf]) -> Outcome<()> {
    let inputs: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
    let mut report = RunReport::new("validate", &inputs, &run.bounds);
    let mut problems = Vec::new();
    // Each file is checked on its own.
    let mut docs = Vec::new();
    for f in files {
        docs.extend(load(std::slice::from_ref(f))?.docs);
    }
    for (file, doc) in &docs {
        for d in &doc.decls {
            let at = format!("{file}: {} `{}`", d.item.kind(), d.name);
            match &d.item {
                Item::Instance { instance, .. } => {
                    for v in validate_instance(instance).violations {
                        problems.push(format!("{at}: {v}"));
                    }
                }
                Item::Translation { translation, .. } => {
                    // An unproved equation is not a disproof, but it is not valid either.
                    for issue in check_translation(translation, &run.bounds.rewrite).issues {
                        problems.push(format!("{at}: {issue}"));
                    }
                }
                Item::Typed { typed, .. } => {
                    for f in validate_typed(typed).failures {
                        problems.push(format!("{at}: {f}"));
                    }
                }
                Item::Schema(_) | Item::Morphism { .. } => {}
            }
        }
    }
    for p in &problems {
        eprintln!("{p}");
    }
    report.result = json!({ "violations": problems });
    run.finish(report, None, None)?;
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("{} violation(s)", problems.len())))
    }
}

#[allow(clippy::too_many_arguments)]
fn migrate(
    run: &Run,
    kind: Kind,
    translation: &str,
    instance: &str,
    files: &[PathBuf],
    name: Option<&str>,
    out: Option<&FsPath>,
) -> Outcome<()> {
    let inputs: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
    let loaded = load(files)?;
    let f = lookup(&loaded.env.translations, "translation", translation)?;
    let i = lookup(&loaded.env.instances, "instance", instance)?;
    let (label, step) = match kind {
        Kind::Delta => ("delta", Step::Delta(f.clone())),
        Kind::Sigma => ("sigma", Step::Sigma(f.clone())),
        Kind::Pi => ("pi", Step::Pi(f.clone())),
    };
    let mut report = RunReport::new(&format!("migrate {label}"), &inputs, &run.bounds);
    report.warnings = unverified(&f, translation, &run.bounds.rewrite);
    let (stage, _) = run_pipeline(&[step], Stage::Plain((*i).clone()), &run.bounds)?;
    let result = stage.instance();
    let default = format!("{label}_{translation}_{instance}");
    let text = dsl::print(&instance_document(name.unwrap_or(&default), result));
    report.tables = table_counts(result);
    if !run.common.json {
        for t in &report.tables {
            eprintln!("{}: {} rows", t.table, t.rows);
        }
    }
    run.finish(report, Some(text), out)
}

fn parse_step(step_text: &str, env: &Env) -> Outcome<Step> {
    let (kind, name) = step_text
        .split_once(':')
        .ok_or_else(|| Failure::Input(format!("step `{step_text}` is not of the form KIND:NAME")))?;
    let tr = || lookup(&env.translations, "translation", name);
    let mo = || lookup(&env.morphisms, "morphism", name);
    Ok(match kind {
        "delta" => Step::Delta(tr()?),
        "sigma" => Step::Sigma(tr()?),
        "pi" => Step::Pi(tr()?),
        "sigma-hat" => Step::SigmaHat(mo()?),
        "delta-hat" => Step::DeltaHat(mo()?),
        "pi-hat" => Step::PiHat(mo()?),
        _ => return Err(Failure::Input(format!("unknown step kind `{kind}`"))),
    })
}

fn pipeline(
    run: &Run,
    start: &str,
    files: &[PathBuf],
    steps: &[String],
    name: Option<&str>,
    out: Option<&FsPath>,
) -> Outcome<()> {
    let inputs: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
    let loaded = load(files)?;
    let env = &loaded.env;
    let begin = if let Some(t) = env.typed.get(start) {
        Stage::Typed((**t).clone())
    } else {
        Stage::Plain((*lookup(&env.instances, "instance", start)?).clone())
    };
    let parsed = steps
        .iter()
        .map(|s| parse_step(s, env))
        .collect::<Outcome<Vec<_>>>()?;
    let mut report = RunReport::new("pipeline", &inputs, &run.bounds);
    for (step_text, step) in steps.iter().zip(&parsed) {
        if let Step::Delta(f) | Step::Sigma(f) | Step::Pi(f) = step {
            let n = step_text.split_once(':').map_or("", |p| p.1);
            report.warnings.extend(unverified(f, n, &run.bounds.rewrite));
        }
    }
    let (stage, steps_report) = run_pipeline(&parsed, begin, &run.bounds)?;
    let out_name = name.unwrap_or("result");
    let text = match &stage {
        Stage::Plain(i) => dsl::print(&instance_document(out_name, i)),
        Stage::Typed(t) => dsl::print(&typed_document(out_name, t)),
    };
    report.tables = table_counts(stage.instance());
    report.result = json!({
        "steps": steps_report
            .steps
            .iter()
            .map(|s| json!({ "kind": s.kind, "rows": s.rows }))
            .collect::<Vec<_>>()
    });
    if !run.common.json {
        for t in &report.tables {
            eprintln!("{}: {} rows", t.table, t.rows);
        }
    }
    run.finish(report, Some(text), out)
}

fn check_adjunction(
    run: &Run,
    translation: &str,
    source: &str,
    target: &str,
    files: &[PathBuf],
    max_homs: usize,
    mutate_sigma: bool,
) -> Outcome<()> {
    let inputs: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
    let loaded = load(files)?;
    let f = lookup(&loaded.env.translations, "translation", translation)?;
    let i = lookup(&loaded.env.instances, "instance", source)?;
    let j = lookup(&loaded.env.instances, "instance", target)?;
    f.require_source(i.schema())?;
    f.require_target(j.schema())?;
    let mut report = RunReport::new("check-adjunction", &inputs, &run.bounds);
    report.warnings = unverified(&f, translation, &run.bounds.rewrite);
    let mut counts = hom_counts(&f, &i, &j, &run.bounds, Some(max_homs))?;
    if mutate_sigma {
        let empty = Instance::empty(f.target().clone());
        counts.sigma_to_j = count_homs(&empty, &j, Some(max_homs))?;
    }
    let triangles = triangle_identities(&f, &i, &j, &run.bounds)?;
    let verdict = |ok: bool| if ok { "equal" } else { "MISMATCH" };
    let text = format!(
        "|Hom(Sigma {source}, {target})| = {}\n|Hom({source}, Delta {target})| = {}\nleft adjunction: {}\n\
         |Hom(Delta {target}, {source})| = {}\n|Hom({target}, Pi {source})| = {}\nright adjunction: {}\n\
         triangle identities: {}\n",
        counts.sigma_to_j,
        counts.i_to_delta,
        verdict(counts.sigma_holds()),
        counts.delta_to_i,
        counts.j_to_pi,
        verdict(counts.pi_holds()),
        if triangles.all() { "hold" } else { "FAIL" },
    );
    report.result = json!({
        "sigma_to_j": counts.sigma_to_j,
        "i_to_delta_j": counts.i_to_delta,
        "delta_j_to_i": counts.delta_to_i,
        "j_to_pi": counts.j_to_pi,
        "sigma_holds": counts.sigma_holds(),
        "pi_holds": counts.pi_holds(),
        "triangles": triangles.all(),
        "mutated": mutate_sigma,
    });
    run.finish(report, Some(text), None)?;
    if counts.sigma_holds() && counts.pi_holds() && triangles.all() {
        Ok(())
    } else {
        Err(Failure::Invalid("adjunction check failed".into()))
    }
}

fn export_rdf(
    run: &Run,
    instance: &str,
    files: &[PathBuf],
    base: &str,
    out: Option<&FsPath>,
) -> Outcome<()> {
    let inputs: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
    let loaded = load(files)?;
    let i = lookup(&loaded.env.instances, "instance", instance)?;
    let store = grothendieck(&i);
    let mut report = RunReport::new("export-rdf", &inputs, &run.bounds);
    report.tables = table_counts(&i);
    report.result = json!({ "triples": store.len() });
    run.finish(report, Some(export_triples(&store, base)), out)
}

fn render_cmd(
    run: &Run,
    instance: &str,
    files: &[PathBuf],
    format: Format,
    table: Option<&str>,
    out: Option<&FsPath>,
) -> Outcome<()> {
    let inputs: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
    let loaded = load(files)?;
    let i = lookup(&loaded.env.instances, "instance", instance)?;
    let schema = i.schema().clone();
    let only = table
        .map(|t| {
            schema
                .graph()
                .vertex(t)
                .ok_or_else(|| Failure::Input(format!("no table named `{t}`")))
        })
        .transpose()?;
    let mut report = RunReport::new("render", &inputs, &run.bounds);
    report.tables = table_counts(&i);
    let csv_err = |e: csv::Error| Failure::Input(e.to_string());
    let text = match (format, only) {
        (Format::Ascii, _) => render::ascii(&i, only),
        (Format::Csv, Some(v)) => render::csv(&i, v).map_err(csv_err)?,
        (Format::Csv, None) if schema.graph().vertex_count() == 1 => {
            render::csv(&i, catmig::model::VertexId(0)).map_err(csv_err)?
        }
        (Format::Csv, None) => {
            let Some(dir) = out.filter(|d| d.is_dir()) else {
                return Err(Failure::Input(
                    "CSV of several tables needs --table or --out DIR".into(),
                ));
            };
            for v in schema.graph().vertices() {
                let path = dir.join(format!("{}.csv", schema.vertex_name(v)));
                write_out(Some(&path), &render::csv(&i, v).map_err(csv_err)?)?;
            }
            return run.finish(report, None, None);
        }
    };
    run.finish(report, Some(text), out)
}

fn dispatch(cli: Cli) -> Outcome<()> {
    let c = &cli.common;
    let bounds = Bounds {
        saturation: c.saturation_bound,
        path: c.path_bound,
        rewrite: RewriteBudget::with_steps(c.rewrite_budget),
    };
    let run = Run {
        common: cli.common,
        bounds,
        started: Instant::now(),
    };
    match &cli.command {
        Command::Validate { files } => validate(&run, files),
        Command::Migrate {
            kind,
            translation,
            instance,
            files,
            name,
            out,
        } => migrate(
            &run,
            *kind,
            translation,
            instance,
            files,
            name.as_deref(),
            out.as_deref(),
        ),
        Command::Pipeline {
            start,
            files,
            steps,
            name,
            out,
        } => pipeline(&run, start, files, steps, name.as_deref(), out.as_deref()),
        Command::CheckAdjunction {
            translation,
            source_instance,
            target_instance,
            files,
            max_homs,
            mutate_sigma,
        } => check_adjunction(
            &run,
            translation,
            source_instance,
            target_instance,
            files,
            *max_homs,
            *mutate_sigma,
        ),
        Command::ExportRdf {
            instance,
            files,
            base,
            out,
        } => export_rdf(&run, instance, files, base, out.as_deref()),
        Command::Render {
            instance,
            files,
            format,
            table,
            out,
        } => render_cmd(&run, instance, files, *format, table.as_deref(), out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
