//! The `tm` command line. Exit codes: 0 success, 1 validation or model
//! errors, 2 usage and I/O errors.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::document::ModelDocument;
use crate::dsl::{parse, serialize};
use crate::error::Error;
use crate::guard::Value;
use crate::normalize::normalize;
use crate::render::{render, RenderInput, RenderView};
use crate::report::{Diagnostic, Severity};
use crate::sim::{simulate, SimLimits, Stimulus};
use crate::transform::{
    lift_with_containment, query_neighbors, reduce_dynamic, simplify_static, to_property_graph, Direction,
    PropertyGraph,
};

#[derive(Debug, Parser)]
#[command(
    name = "tm",
    version,
    about = "Thing-machine models: validate, simulate, transform, render"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a model, printing every diagnostic.
    Validate { file: PathBuf },
    /// Run the behavior model and print the trace.
    Simulate {
        file: PathBuf,
        /// JSON list of stimuli.
        #[arg(long)]
        stimuli: Option<PathBuf>,
        #[arg(long, default_value_t = SimLimits::default().max_ticks)]
        max_ticks: u64,
        /// Override a parameter, as `name=value`.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// Print the simplified static model.
    Simplify { file: PathBuf },
    /// Print the full-form static model.
    Normalize { file: PathBuf },
    /// Print the reduced skeleton of the dynamic model as graph JSON.
    Reduce { file: PathBuf },
    /// Write the property graph of a model.
    ExportPg {
        file: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Lift a property graph to a model.
    Lift {
        graph: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
        /// Relationship type to lift as nesting.
        #[arg(long)]
        containment: Vec<String>,
    },
    /// List neighbors of a node in a property graph.
    Query {
        graph: PathBuf,
        #[arg(long)]
        node: String,
        #[arg(long)]
        rel: String,
        #[arg(long, default_value = "both")]
        dir: String,
    },
    /// Render a model or graph as DOT.
    Render {
        file: PathBuf,
        #[arg(long, default_value = "static-full")]
        view: String,
        #[arg(short)]
        o: Option<PathBuf>,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    color: bool,
}

impl Io<'_> {
    fn diag(&mut self, to_err: bool, prefix: &str, d: &Diagnostic) {
        let line = if self.color {
            let c = match d.severity {
                Severity::Error => "31",
                Severity::Warning => "33",
            };
            let text = d.to_string();
            let (head, rest) = text.split_once(':').unwrap_or((&text, ""));
            format!("{prefix}\x1b[{c}m{head}\x1b[0m:{rest}")
        } else {
            format!("{prefix}{d}")
        };
        let w: &mut dyn Write = if to_err { self.err } else { self.out };
        let _ = writeln!(w, "{line}");
    }

    fn fail(&mut self, e: &Error) -> i32 {
        match e {
            Error::NotValid(r) => {
                for d in &r.diagnostics {
                    self.diag(true, "", d);
                }
            }
            Error::Parse(p) => {
                for pe in &p.0 {
                    let _ = writeln!(self.err, "syntax error at {pe}");
                }
            }
            e => {
                let _ = writeln!(self.err, "{}: {e}", e.code());
            }
        }
        exit_code(e)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Json(_) | Error::BadStimulus(_) | Error::NoSuchNode(_) | Error::InvalidViewInput(_) => 2,
        _ => 1,
    }
}

/// Runs the command line with explicit output streams; returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let color = match std::env::var("TM_COLOR").as_deref() {
        Ok("0") => false,
        Ok(_) => true,
        Err(_) => std::io::stderr().is_terminal(),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let w: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(
                w,
                "{}",
                if color {
                    e.render().ansi().to_string()
                } else {
                    e.render().to_string()
                }
            );
            return code;
        }
    };
    let mut io = Io { out, err, color };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(e) => io.fail(&e),
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write_out(io: &mut Io, o: Option<&Path>, text: &str) -> Result<(), Error> {
    match o {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))),
        None => io.out.write_all(text.as_bytes()).map_err(Error::Io),
    }
}

/// Parses a model, failing on syntax or validation errors. Warnings go to
/// standard error.
fn load(path: &Path, io: &mut Io) -> Result<ModelDocument, Error> {
    let parsed = parse(&read(path)?)?;
    if !parsed.report.ok {
        return Err(Error::NotValid(Box::new(parsed.report)));
    }
    let prefix = format!("{}: ", path.display());
    for d in parsed.report.warnings() {
        io.diag(true, &prefix, d);
    }
    Ok(parsed.document)
}

fn static_only(doc: &ModelDocument, model: crate::model::StaticModel) -> ModelDocument {
    ModelDocument {
        static_model: model,
        events: Vec::new(),
        behavior: None,
        params: doc.params.clone(),
    }
}

fn dispatch(cmd: Command, io: &mut Io) -> Result<i32, Error> {
    match cmd {
        Command::Validate { file } => {
            let parsed = parse(&read(&file)?)?;
            let prefix = format!("{}: ", file.display());
            for d in &parsed.report.diagnostics {
                io.diag(false, &prefix, d);
            }
            let errors = parsed.report.errors().count();
            let warnings = parsed.report.warnings().count();
            let _ = writeln!(io.out, "{errors} error(s), {warnings} warning(s)");
            Ok(if parsed.report.ok { 0 } else { 1 })
        }
        Command::Simulate {
            file,
            stimuli,
            max_ticks,
            params,
            format,
        } => {
            let mut doc = load(&file, io)?;
            for p in &params {
                let Some((k, v)) = p.split_once('=') else {
                    let _ = writeln!(io.err, "--param expects NAME=VALUE, got `{p}`");
                    return Ok(2);
                };
                doc.params.insert(k.trim().to_string(), Value::parse_loose(v.trim()));
            }
            let stimuli = match stimuli {
                Some(p) => Stimulus::list_from_json(&read(&p)?)
                    .map_err(|e| Error::BadStimulus(format!("{}: {e}", p.display())))?,
                None => Vec::new(),
            };
            let print = |io: &mut Io, t: &crate::sim::Trace| {
                let text = match format {
                    Format::Tsv => t.to_tsv(),
                    Format::Json => t.to_json() + "\n",
                };
                let _ = io.out.write_all(text.as_bytes());
            };
            match simulate(&doc, &stimuli, SimLimits { max_ticks }) {
                Ok(t) => {
                    print(io, &t);
                    Ok(0)
                }
                Err(Error::TickLimit(t)) => {
                    print(io, &t);
                    let _ = writeln!(io.err, "E_TICK_LIMIT: no quiescence within {max_ticks} ticks");
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }
        Command::Simplify { file } => {
            let doc = load(&file, io)?;
            let s = simplify_static(&doc.static_model)?;
            write_out(io, None, &serialize(&static_only(&doc, s))?)?;
            Ok(0)
        }
        Command::Normalize { file } => {
            let doc = load(&file, io)?;
            let n = normalize(&doc.static_model)?;
            write_out(io, None, &serialize(&static_only(&doc, n))?)?;
            Ok(0)
        }
        Command::Reduce { file } => {
            let doc = load(&file, io)?;
            let sk = reduce_dynamic(&doc.static_model, &doc.events);
            let prefix = format!("{}: ", file.display());
            for d in &sk.diagnostics.diagnostics {
                io.diag(true, &prefix, d);
            }
            write_out(io, None, &sk.graph.to_json())?;
            Ok(if sk.diagnostics.ok { 0 } else { 1 })
        }
        Command::ExportPg { file, o } => {
            let doc = load(&file, io)?;
            let sk = reduce_dynamic(&doc.static_model, &doc.events);
            let g = to_property_graph(&sk)?;
            write_out(io, o.as_deref(), &g.to_json())?;
            Ok(0)
        }
        Command::Lift { graph, o, containment } => {
            let g = PropertyGraph::from_json(&read(&graph)?)?;
            let set: BTreeSet<String> = containment.into_iter().collect();
            let lifted = lift_with_containment(&g, &set)?;
            let text = serialize(&lifted.to_document())?;
            let to_err = o.is_none();
            write_out(io, o.as_deref(), &text)?;
            for d in &lifted.mixing_diagnostics {
                io.diag(to_err, "", d);
            }
            Ok(0)
        }
        Command::Query { graph, node, rel, dir } => {
            let dir: Direction = match dir.parse() {
                Ok(d) => d,
                Err(e) => {
                    let _ = writeln!(io.err, "{e}");
                    return Ok(2);
                }
            };
            let g = PropertyGraph::from_json(&read(&graph)?)?;
            for name in query_neighbors(&g, &node, &rel, dir)? {
                let _ = writeln!(io.out, "{name}");
            }
            Ok(0)
        }
        Command::Render { file, view, o } => {
            let view: RenderView = match view.parse() {
                Ok(v) => v,
                Err(e) => {
                    let _ = writeln!(io.err, "{e}");
                    return Ok(2);
                }
            };
            let text = read(&file)?;
            let dot = if file.extension().is_some_and(|e| e == "json") {
                let g = PropertyGraph::from_json(&text)?;
                render(RenderInput::Graph(&g), view)?
            } else {
                let doc = load(&file, io)?;
                render(RenderInput::Document(&doc), view)?
            };
            write_out(io, o.as_deref(), &dot)?;
            Ok(0)
        }
    }
}
