//! `psido`: command-line front end for the symbol calculus.
//!
//! Exit codes: 0 success, 1 validation failure, 2 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use psido::calculus::{self, Direction, EllipticityOptions};
use psido::hamilton::{self, HamiltonError, PhasePoint};
use psido::hodge::{self, FormField};
use psido::quantize::{
    self, Amplitude, CutoffProfile, OscMethod, OscOptions, QuantizeError, TestFunction,
};
use psido::symbolic::{ClassicalSymbol, Expr};
use psido::{io, syntax};

#[derive(Parser)]
#[command(
    name = "psido",
    version,
    about = "Classical pseudo-differential symbol calculus"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SymbolOut {
    /// Write the result as a symbol document.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a JSON object mapping each degree to its expression.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum MethodArg {
    Both,
    Epsilon,
    Parts,
    Direct,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Exp,
    TanhTan,
}

#[derive(Subcommand)]
enum Command {
    /// Symbol of the composition A∘B.
    Compose {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: SymbolOut,
    },
    /// Symbol of the adjoint of A.
    Adjoint {
        a: PathBuf,
        #[command(flatten)]
        out: SymbolOut,
    },
    /// Converts a left symbol to a right symbol or back.
    Convert {
        a: PathBuf,
        #[arg(long, value_enum)]
        to: Side,
        #[command(flatten)]
        out: SymbolOut,
    },
    /// Parametrix of an elliptic symbol with N terms.
    Parametrix {
        a: PathBuf,
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        out: SymbolOut,
    },
    /// Approximate square root with N terms.
    Sqrt {
        a: PathBuf,
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        out: SymbolOut,
    },
    /// Symbol of [A, B].
    Commutator {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: SymbolOut,
    },
    /// Scans the principal symbol for zeros on the cosphere bundle.
    Ellipticity {
        a: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
        #[arg(long, default_value_t = 16)]
        x_per_axis: usize,
        #[arg(long, default_value_t = 64)]
        directions: usize,
    },
    /// Principal symbol after a change of coordinates.
    Pullback {
        a: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        out: SymbolOut,
    },
    /// Integral curve of the Hamiltonian field of the principal symbol.
    Flow {
        a: PathBuf,
        /// Comma-separated `x1,..,xn,xi1,..,xin`.
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, allow_hyphen_values = true)]
        time: f64,
        #[arg(long, default_value_t = hamilton::DEFAULT_FLOW_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Flows a set of characteristic points.
    Wavefront {
        a: PathBuf,
        #[arg(long)]
        init: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        time: f64,
        #[arg(long, default_value_t = hamilton::DEFAULT_FLOW_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Applies the quantized operator to a grid function.
    Apply {
        a: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sobolev norm of a grid function.
    Sobolev {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
    },
    /// Regularized oscillatory integral with phase x·θ.
    Oscint {
        /// Amplitude in x1 and xi1 (θ).
        #[arg(long, allow_hyphen_values = true)]
        amp: String,
        /// Symbol order of the amplitude.
        #[arg(long, allow_hyphen_values = true)]
        order: f64,
        /// Multiply the amplitude by the excision profile.
        #[arg(long)]
        excise: bool,
        /// Test function in x1, or `bump(c,r)`.
        #[arg(long)]
        test: String,
        /// Support `lo,hi` of a test function given as an expression.
        #[arg(long, allow_hyphen_values = true)]
        support: Option<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = ProfileArg::Exp)]
        profile: ProfileArg,
        #[arg(long, default_value_t = 1e-6)]
        cauchy_tol: f64,
        #[arg(long, default_value_t = 1e-13)]
        tail_tol: f64,
    },
    /// Index of a₊Π₊ + a₋Π₋ on the circle.
    Index {
        #[arg(long, allow_hyphen_values = true)]
        aplus: String,
        #[arg(long, allow_hyphen_values = true)]
        aminus: String,
        #[arg(long = "K", default_value_t = 32)]
        k: usize,
    },
    /// Exterior calculus on the flat torus.
    Hodge {
        #[command(subcommand)]
        op: HodgeCommand,
    },
}

#[derive(Args)]
struct FormInput {
    /// Form header file written by `--out`.
    #[arg(long, conflicts_with = "coeff")]
    form: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    degree: usize,
    #[arg(long, default_value_t = 16)]
    m: usize,
    /// One coefficient expression per basis form, in lexicographic order.
    #[arg(long, allow_hyphen_values = true)]
    coeff: Vec<String>,
    /// Output stem: writes `<stem>.form.csv` and one CSV per coefficient.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum HodgeCommand {
    D(FormInput),
    Star(FormInput),
    Delta(FormInput),
    Laplacian(FormInput),
    Decompose(FormInput),
    Betti {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: usize,
        /// Defaults to C(n, j) + 4.
        #[arg(long)]
        probes: Option<usize>,
    },
    ParametrixCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 16)]
        m: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

/// Failure of a numerical procedure rather than of the input.
#[derive(Debug)]
struct NumericalFailure(String);

impl std::fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalFailure {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<NumericalFailure>() {
            return 2;
        }
        if let Some(QuantizeError::NonConvergent { .. } | QuantizeError::Unstable { .. }) =
            cause.downcast_ref()
        {
            return 2;
        }
        if let Some(HamiltonError::StepFailure { .. }) = cause.downcast_ref() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_symbol(path: &Path) -> Result<(String, ClassicalSymbol)> {
    let doc = syntax::parse_symbol_document(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok((doc.name, doc.symbol))
}

fn emit_symbol(name: &str, p: &ClassicalSymbol, out: &SymbolOut) -> Result<()> {
    print!("{}", syntax::report_text(p));
    if let Some(path) = &out.out {
        write(path, &syntax::symbol_text(name, p))?;
    }
    if let Some(path) = &out.report {
        let map: serde_json::Map<String, serde_json::Value> = p
            .terms()
            .iter()
            .map(|t| {
                (
                    t.degree().to_string(),
                    serde_json::Value::String(t.expr().to_string()),
                )
            })
            .collect();
        write(
            path,
            &serde_json::to_string_pretty(&serde_json::Value::Object(map))?,
        )?;
    }
    Ok(())
}

/// Writes `artifact` to `out`, or to stdout when no path is given; the
/// summary goes to stdout only when the artifact does not.
fn emit_artifact(out: &Option<PathBuf>, artifact: &str, summary: &str) -> Result<()> {
    match out {
        Some(path) => {
            write(path, artifact)?;
            print!("{summary}");
        }
        None => {
            print!("{artifact}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("not a number: '{s}'"))
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compose { a, b, out } => {
            let (na, pa) = load_symbol(&a)?;
            let (nb, pb) = load_symbol(&b)?;
            emit_symbol(&format!("{na}{nb}"), &calculus::compose(&pa, &pb)?, &out)
        }
        Command::Adjoint { a, out } => {
            let (name, p) = load_symbol(&a)?;
            emit_symbol(&format!("{name}_adj"), &calculus::adjoint(&p), &out)
        }
        Command::Convert { a, to, out } => {
            let (name, p) = load_symbol(&a)?;
            let dir = match to {
                Side::Right => Direction::LeftToRight,
                Side::Left => Direction::RightToLeft,
            };
            emit_symbol(&name, &calculus::convert_left_right(&p, dir), &out)
        }
        Command::Parametrix { a, order, out } => {
            let (name, p) = load_symbol(&a)?;
            emit_symbol(
                &format!("{name}_inv"),
                &calculus::parametrix(&p, order)?,
                &out,
            )
        }
        Command::Sqrt { a, order, out } => {
            let (name, p) = load_symbol(&a)?;
            emit_symbol(
                &format!("{name}_sqrt"),
                &calculus::sqrt_approx(&p, order)?,
                &out,
            )
        }
        Command::Commutator { a, b, out } => {
            let (na, pa) = load_symbol(&a)?;
            let (nb, pb) = load_symbol(&b)?;
            emit_symbol(
                &format!("{na}_{nb}_comm"),
                &calculus::commutator(&pa, &pb)?,
                &out,
            )
        }
        Command::Ellipticity {
            a,
            threshold,
            x_per_axis,
            directions,
        } => {
            let (_, p) = load_symbol(&a)?;
            let opts = EllipticityOptions {
                x_per_axis,
                directions,
                threshold,
            };
            let r = calculus::is_elliptic(&p, &opts)?;
            println!("elliptic: {}", r.elliptic);
            println!("min |p_m| on |xi| = 1: {:e}", r.min_modulus);
            println!("attained at x = {:?}, xi = {:?}", r.argmin_x, r.argmin_xi);
            if !r.elliptic {
                bail!("principal symbol falls below {threshold:e}");
            }
            Ok(())
        }
        Command::Pullback { a, map, out } => {
            let (name, p) = load_symbol(&a)?;
            let chi = syntax::parse_map_text(&read(&map)?)
                .with_context(|| format!("parsing {}", map.display()))?;
            let term = calculus::pullback_principal(&calculus::principal(&p), &chi)?;
            let sym = ClassicalSymbol::from_term(term, 1);
            emit_symbol(&format!("{name}_pulled"), &sym, &out)
        }
        Command::Flow {
            a,
            start,
            time,
            tol,
            out,
        } => {
            let (_, p) = load_symbol(&a)?;
            let v = parse_list(&start)?;
            if v.len() != 2 * p.dim() {
                bail!("--start needs {} numbers, got {}", 2 * p.dim(), v.len());
            }
            let b = hamilton::flow(
                &calculus::principal(&p),
                &PhasePoint::from_slice(&v),
                time,
                tol,
            )?;
            let summary = format!(
                "steps: {} accepted, {} rejected\nfinal point: x = {:?}, xi = {:?}\nmax |p - p0|: {:e}\n",
                b.stats.accepted,
                b.stats.rejected,
                b.end().x,
                b.end().xi,
                b.max_drift()
            );
            emit_artifact(&out, &io::trajectory_to_csv(&b), &summary)
        }
        Command::Wavefront {
            a,
            init,
            time,
            tol,
            out,
        } => {
            let (_, p) = load_symbol(&a)?;
            let pts = io::points_from_csv(&read(&init)?)?;
            let moved = hamilton::propagate_wavefront(&calculus::principal(&p), &pts, time, tol)?;
            emit_artifact(
                &out,
                &io::points_to_csv(&moved),
                &format!("{} points propagated\n", moved.len()),
            )
        }
        Command::Apply { a, grid, out } => {
            let (_, p) = load_symbol(&a)?;
            let u: quantize::GridFunction<f64> = io::grid_from_csv(&read(&grid)?)?;
            let (v, report) = quantize::op_apply_with_report(&p, &u)?;
            let mut summary = String::new();
            for t in &report.terms {
                let how = match t.separable_products {
                    Some(k) => format!("{k} separable products"),
                    None => "dense sum".into(),
                };
                summary.push_str(&format!(
                    "degree {}: {how}, k = 0 {}\n",
                    t.degree,
                    t.zero_mode.describe()
                ));
            }
            emit_artifact(&out, &io::grid_to_csv(&v), &summary)
        }
        Command::Sobolev { grid, s } => {
            let u: quantize::GridFunction<f64> = io::grid_from_csv(&read(&grid)?)?;
            println!(
                "sobolev norm (s = {s}): {:e}",
                quantize::sobolev_norm(&u, s)
            );
            Ok(())
        }
        Command::Oscint {
            amp,
            order,
            excise,
            test,
            support,
            method,
            profile,
            cauchy_tol,
            tail_tol,
        } => {
            let a = Amplitude::new(syntax::parse_expr(&amp, 1)?, order, excise)?;
            let psi = test_function(&test, support.as_deref())?;
            let opts = OscOptions {
                profile: match profile {
                    ProfileArg::Exp => CutoffProfile::Exponential,
                    ProfileArg::TanhTan => CutoffProfile::TanhTan,
                },
                cauchy_tol,
                tail_tol,
                ..OscOptions::default()
            };
            oscint(&a, &psi, method, &opts)
        }
        Command::Index { aplus, aminus, k } => {
            let r = quantize::circle_index(
                &syntax::parse_expr(&aplus, 1)?,
                &syntax::parse_expr(&aminus, 1)?,
                k,
            )?;
            println!("wind(a+): {}", r.wind_plus);
            println!("wind(a-): {}", r.wind_minus);
            println!("index: {}", r.index);
            for s in &r.sections {
                println!(
                    "K = {}: dim ker = {}, dim coker = {}, small singular values = {:?}",
                    s.k, s.dim_ker, s.dim_coker, s.small_singular_values
                );
            }
            println!("rank threshold: {:e} * largest singular value", r.rank_tol);
            Ok(())
        }
        Command::Hodge { op } => run_hodge(op, cli.seed),
    }
}

fn test_function(text: &str, support: Option<&str>) -> Result<TestFunction> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(args) = compact
        .strip_prefix("bump(")
        .and_then(|s| s.strip_suffix(')'))
    {
        let v = parse_list(args)?;
        if v.len() != 2 || v[1] <= 0.0 {
            bail!("bump takes a center and a positive radius");
        }
        return Ok(TestFunction::bump(v[0], v[1]));
    }
    let support = support
        .ok_or_else(|| anyhow!("--support lo,hi is required for a test-function expression"))?;
    let v = parse_list(support)?;
    if v.len() != 2 {
        bail!("--support takes two numbers");
    }
    Ok(TestFunction::new(syntax::parse_expr(text, 1)?, v[0], v[1])?)
}

fn oscint(a: &Amplitude, psi: &TestFunction, method: MethodArg, opts: &OscOptions) -> Result<()> {
    let methods: Vec<OscMethod> = match method {
        MethodArg::Both => vec![OscMethod::EpsilonCutoff, OscMethod::Parts],
        MethodArg::Epsilon => vec![OscMethod::EpsilonCutoff],
        MethodArg::Parts => vec![OscMethod::Parts],
        MethodArg::Direct => vec![OscMethod::Direct],
    };
    let mut values = Vec::new();
    for m in methods {
        let r = quantize::oscint_eval(a, psi, m, opts)?;
        let label = match m {
            OscMethod::EpsilonCutoff => "epsilon-cutoff",
            OscMethod::Parts => "parts",
            OscMethod::Direct => "direct",
        };
        println!("{label}: {:e} {:+e}i", r.value.re, r.value.im);
        if m == OscMethod::EpsilonCutoff {
            for (eps, v) in r.epsilons.iter().zip(&r.sequence) {
                println!("  eps = {eps:e}: {:e} {:+e}i", v.re, v.im);
            }
        } else {
            println!("  integrations by parts: {}", r.parts_order);
        }
        println!("  theta cutoff: {}", r.theta_max);
        values.push(r.value);
    }
    if let [e, p] = values[..] {
        let rel = (e - p).norm() / p.norm().max(f64::MIN_POSITIVE);
        println!("relative difference: {rel:e}");
        if rel > opts.cauchy_tol {
            return Err(
                NumericalFailure(format!("methods disagree: relative difference {rel:e}")).into(),
            );
        }
    }
    Ok(())
}

fn load_form(input: &FormInput) -> Result<FormField<f64>> {
    if let Some(path) = &input.form {
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        return Ok(io::form_from_csv(&read(path)?, |name| {
            fs::read_to_string(dir.join(name)).map_err(|e| io::IoError::Parse {
                line: 0,
                message: format!("{name}: {e}"),
            })
        })?);
    }
    let exprs = input
        .coeff
        .iter()
        .map(|s| syntax::parse_expr(s, input.n))
        .collect::<Result<Vec<Expr>, _>>()?;
    Ok(FormField::from_exprs(
        input.n,
        input.degree,
        input.m,
        &exprs,
    )?)
}

fn save_form(w: &FormField<f64>, stem: &Path) -> Result<()> {
    let dir = stem.parent().map(Path::to_path_buf).unwrap_or_default();
    let base = stem
        .file_name()
        .and_then(|s| s.to_str())
        .ok_or_else(|| anyhow!("bad output stem {}", stem.display()))?;
    let (header, files) = io::form_to_csv(w, base);
    write(&dir.join(format!("{base}.form.csv")), &header)?;
    for (name, text) in files {
        write(&dir.join(name), &text)?;
    }
    Ok(())
}

fn describe_form(label: &str, w: &FormField<f64>) {
    println!(
        "{label}: degree {} on T^{}, M = {}",
        w.degree(),
        w.dim(),
        w.points_per_axis()
    );
    for (alpha, c) in w.basis().iter().zip(w.coeffs()) {
        println!("  {}: max |f| = {:e}", io::basis_label(alpha), c.max_abs());
    }
}

fn finish_form(label: &str, w: &FormField<f64>, out: &Option<PathBuf>) -> Result<()> {
    describe_form(label, w);
    if let Some(stem) = out {
        save_form(w, stem)?;
    }
    Ok(())
}

fn run_hodge(op: HodgeCommand, seed: u64) -> Result<()> {
    let mut rng = psido::seeded_rng(seed);
    match op {
        HodgeCommand::D(input) => finish_form("d", &hodge::ext_d(&load_form(&input)?)?, &input.out),
        HodgeCommand::Star(input) => {
            finish_form("star", &hodge::hodge_star(&load_form(&input)?), &input.out)
        }
        HodgeCommand::Delta(input) => finish_form(
            "delta",
            &hodge::codifferential(&load_form(&input)?)?,
            &input.out,
        ),
        HodgeCommand::Laplacian(input) => finish_form(
            "laplacian",
            &hodge::laplacian(&load_form(&input)?)?,
            &input.out,
        ),
        HodgeCommand::Decompose(input) => {
            let parts = hodge::hodge_decompose(&load_form(&input)?)?;
            for (label, w) in [
                ("harmonic", &parts.harmonic),
                ("exact", &parts.exact),
                ("coexact", &parts.coexact),
            ] {
                let out = input.out.as_ref().map(|s| {
                    let mut p = s.clone().into_os_string();
                    p.push(format!("_{label}"));
                    PathBuf::from(p)
                });
                finish_form(label, w, &out)?;
            }
            Ok(())
        }
        HodgeCommand::Betti { n, degree, probes } => {
            let probes = probes.unwrap_or(hodge::binomial(n, degree) + 4);
            let r = hodge::betti(n, degree, probes, &mut rng)?;
            println!("betti({n}, {degree}) = {}", r.rank);
            println!("C({n}, {degree}) = {}", r.combinatorial);
            if !r.consistent() {
                return Err(NumericalFailure(
                    "probe rank differs from the combinatorial count".into(),
                )
                .into());
            }
            Ok(())
        }
        HodgeCommand::ParametrixCheck {
            n,
            degree,
            trials,
            m,
            tol,
        } => {
            let r = hodge::complex_parametrix_check(n, degree, trials, m, &mut rng)?;
            println!(
                "max residual over {} fields: {:e}",
                r.trials, r.max_residual
            );
            if r.max_residual > tol {
                return Err(NumericalFailure(format!("residual exceeds {tol:e}")).into());
            }
            Ok(())
        }
    }
}
