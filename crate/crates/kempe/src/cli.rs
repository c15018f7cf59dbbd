//! The `kempe` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use kempe_core::compiler::{compile_complex, compile_real, curve_linkage, realize_set, Compiled, CompiledSet};
use kempe_core::placement::branch_from_index;
use kempe_core::solve::{forward_place, trace_curve, verify_functional, TraceOptions, VerifyTolerances};
use kempe_core::{Field, Point};

use crate::json::{from_json, to_json, LinkageDoc};
use crate::parse::{format_complex, parse_expr, parse_points};
use crate::svg::{render_polyline, render_realization};

#[derive(Debug, Parser)]
#[command(name = "kempe", version, about = "Compile polynomial maps into planar linkages")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile an expression into a linkage document.
    Compile(CompileArgs),
    /// Place a linkage at an input and print its outputs.
    Eval(EvalArgs),
    /// Sample the certified ball and compare outputs with the expression.
    Verify(VerifyArgs),
    /// Trace the input curve of a closed linkage.
    Trace(TraceArgs),
    /// Draw one realization as SVG.
    Render(RenderArgs),
    /// Print a summary of a linkage document.
    Info(InfoArgs),
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub expr: String,
    /// Ball center: one value for every variable, or one per variable.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub center: String,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Real inputs held on the real axis.
    #[arg(long, conflicts_with_all = ["set", "curve"])]
    pub real: bool,
    /// Closed linkage of the real zero set of the outputs.
    #[arg(long, conflicts_with = "curve")]
    pub set: bool,
    /// Closed linkage drawing the curve `expr(z, conj z) = 0`.
    #[arg(long)]
    pub curve: bool,
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub file: PathBuf,
    /// Comma-separated input values such as `1,0.5-2i`.
    #[arg(long, allow_hyphen_values = true)]
    pub input: String,
    /// Branch index; bit k selects the side of branch choice k.
    #[arg(long, default_value_t = 0)]
    pub branch: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    pub file: PathBuf,
    /// Starting input, comma-separated for several inputs.
    #[arg(long, allow_hyphen_values = true)]
    pub seed: String,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long = "max-steps", default_value_t = 2000)]
    pub max_steps: usize,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Table destination (standard output when absent).
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub file: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub input: String,
    #[arg(long, default_value_t = 0)]
    pub branch: u64,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    pub file: PathBuf,
}

/// Failure of a command; `code` is the process exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

fn load(path: &Path) -> Result<LinkageDoc> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    from_json(&text).with_context(|| format!("loading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn centers(src: &str, arity: usize) -> Result<Vec<Point>> {
    let c = parse_points(src)?;
    match (c.len(), arity) {
        (_, 0) => Ok(Vec::new()),
        (1, n) => Ok(vec![c[0]; n]),
        (k, n) if k == n => Ok(c),
        (k, n) => bail!("{k} center values for {n} variables"),
    }
}

fn real_centers(c: &[Point]) -> Result<Vec<f64>> {
    c.iter().map(|z| if z.im == 0.0 { Ok(z.re) } else { Err(anyhow!("center {} is not real", format_complex(*z))) }).collect()
}

pub fn info_line(doc: &LinkageDoc) -> String {
    let f = &doc.linkage;
    let order = f.sym_order().map_or_else(|| format!("2^{}", f.sym_bits()), |o| o.to_string());
    let ball: Vec<String> = f.certified_ball.iter().map(|d| format!("D({}, {})", format_complex(d.center), d.radius)).collect();
    format!(
        "vertices {} edges {} collinear {} inputs {} outputs {} field {} sym_order {} ball [{}]{}",
        f.linkage.vertex_count(),
        f.linkage.edges().len(),
        f.linkage.collinear().len(),
        f.inputs.len(),
        f.outputs.len(),
        match f.field {
            Field::Real => "real",
            Field::Complex => "complex",
        },
        order,
        ball.join(", "),
        if doc.closure.is_some() { " closed" } else { "" }
    )
}

fn compile(a: &CompileArgs, out: &mut dyn Write) -> Result<()> {
    let f = parse_expr(&a.expr)?;
    let c = centers(&a.center, f.arity())?;
    let set = |s: CompiledSet, mode: &str| {
        let mut doc = LinkageDoc::new(s.closed.open);
        doc.closure = Some(s.closed.targets);
        doc.mode = Some(mode.to_string());
        doc.report = Some(s.report);
        doc
    };
    let open = |c: Compiled, mode: &str| {
        let mut doc = LinkageDoc::new(c.linkage);
        doc.mode = Some(mode.to_string());
        doc.report = Some(c.report);
        doc
    };
    let mut doc = if a.curve {
        let center = *c.first().ok_or_else(|| anyhow!("a curve needs one variable"))?;
        set(curve_linkage(&f, center, a.radius)?, "curve")
    } else if a.set {
        set(realize_set(&f, &real_centers(&c)?, a.radius)?, "set")
    } else if a.real {
        open(compile_real(&f, &real_centers(&c)?, a.radius)?, "real")
    } else {
        open(compile_complex(&f, &c, a.radius)?, "complex")
    };
    doc.expr = Some(a.expr.clone());
    write(&a.output, &to_json(&doc))?;
    writeln!(out, "wrote {}", a.output.display())?;
    writeln!(out, "{}", info_line(&doc))?;
    Ok(())
}

fn place(doc: &LinkageDoc, input: &str, branch: u64) -> Result<kempe_core::Realization> {
    let f = &doc.linkage;
    let x = parse_points(input)?;
    let bits = branch_from_index(branch, f.sym_bits());
    if f.sym_bits() < 64 && branch >> f.sym_bits() != 0 {
        bail!("branch {branch} exceeds the {} branch bits", f.sym_bits());
    }
    Ok(forward_place(f, &x, &bits)?)
}

fn eval(a: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let doc = load(&a.file)?;
    let phi = place(&doc, &a.input, a.branch)?;
    for o in &doc.linkage.outputs {
        writeln!(out, "{}", format_complex(phi.at(*o)))?;
    }
    Ok(())
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<bool> {
    let doc = load(&a.file)?;
    let src = doc.expr.as_deref().ok_or_else(|| anyhow!("{} records no expression to verify against", a.file.display()))?;
    let f = parse_expr(src)?;
    let r = verify_functional(&doc.linkage, &f, a.samples, a.seed, &VerifyTolerances::default());
    writeln!(out, "samples {} failures {}", r.samples, r.failures)?;
    writeln!(out, "max residual {:.3e}", r.max_residual)?;
    writeln!(out, "max relative error {:.3e}", r.max_relative_error)?;
    writeln!(out, "max branch spread {:.3e}", r.max_branch_spread)?;
    for (found, want) in &r.branch_counts {
        writeln!(out, "realizations {found} of {want}")?;
    }
    writeln!(out, "{}", if r.pass { "PASS" } else { "FAIL" })?;
    Ok(r.pass)
}

fn trace(a: &TraceArgs, out: &mut dyn Write) -> Result<()> {
    let doc = load(&a.file)?;
    let closed = doc.closed().ok_or_else(|| anyhow!("{} is not a closed linkage", a.file.display()))??;
    let seed = parse_points(&a.seed)?;
    let opts = TraceOptions { step: a.step, max_steps: a.max_steps, ..TraceOptions::default() };
    let t = trace_curve(&closed, &seed, &opts)?;
    let mut table = String::from("# step");
    for k in 0..closed.inputs.len() {
        let s = if closed.inputs.len() == 1 { String::new() } else { (k + 1).to_string() };
        table.push_str(&format!(" re{s} im{s}"));
    }
    table.push_str(" |f| residual\n");
    for (k, p) in t.points.iter().enumerate() {
        table.push_str(&k.to_string());
        for z in &p.inputs {
            table.push_str(&format!(" {:.15e} {:.15e}", z.re, z.im));
        }
        table.push_str(&format!(" {:.3e} {:.3e}\n", p.value, p.residual));
    }
    table.push_str(&format!("# {} points, exit {:?}, closed {}\n", t.points.len(), t.exit, t.closed));
    match &a.output {
        Some(p) => write(p, &table)?,
        None => out.write_all(table.as_bytes())?,
    }
    if let Some(path) = &a.svg {
        // Planar picture: the complex input, or the first two real ones.
        let pts: Vec<Point> = t
            .points
            .iter()
            .map(|p| match (closed.field(), p.inputs.as_slice()) {
                (Field::Real, [x, y, ..]) => Point::new(x.re, y.re),
                (_, [z, ..]) => *z,
                _ => Point::new(0.0, 0.0),
            })
            .collect();
        write(path, &render_polyline(&pts, t.closed))?;
    }
    Ok(())
}

fn render(a: &RenderArgs, out: &mut dyn Write) -> Result<()> {
    let doc = load(&a.file)?;
    let phi = place(&doc, &a.input, a.branch)?;
    let svg = render_realization(&doc.linkage.linkage, &phi);
    match a.svg.as_ref().or(a.output.as_ref()) {
        Some(p) => write(p, &svg),
        None => Ok(out.write_all(svg.as_bytes())?),
    }
}

/// Runs one parsed command, writing its report to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let usage = |error| Failure { code: 2, error };
    match &cli.command {
        Command::Compile(a) => compile(a, out).map_err(usage),
        Command::Eval(a) => eval(a, out).map_err(usage),
        Command::Verify(a) => match verify(a, out) {
            Ok(true) => Ok(()),
            Ok(false) => Err(Failure { code: 1, error: anyhow!("verification failed") }),
            Err(e) => Err(usage(e)),
        },
        Command::Trace(a) => trace(a, out).map_err(usage),
        Command::Render(a) => render(a, out).map_err(usage),
        Command::Info(a) => {
            let doc = load(&a.file).map_err(usage)?;
            writeln!(out, "{}", info_line(&doc)).map_err(|e| usage(e.into()))
        }
    }
}

/// Parses `argv` and runs it. Returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {:#}", f.error);
            f.code
        }
    }
}
