//! `loopbracket`: batch computation and verification runs.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad input or usage,
//! 3 loops could not be realized or a representation could not be sampled,
//! 4 the representation does not satisfy the surface relation.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{Map, Value};

use loopbracket::chen::{perturbed_holonomy, perturbed_holonomy_rk4, TransportSign};
use loopbracket::dgla::{self, CyclicDgla};
use loopbracket::goldman::{self, BracketKind};
use loopbracket::io::{self, num, SurfaceInput};
use loopbracket::surface::{sample_representation_reseeding, SurfacePresentation, Word, WordKind};
use loopbracket::tolerance::{DEFAULT_GRID, DEFAULT_ORDER, TAU_NUM, TAU_REP};
use loopbracket::verify::{self, Config, Suite};
use loopbracket::{Error, GroupSpec};

#[derive(Parser)]
#[command(name = "loopbracket", version, about = "Goldman brackets, trace functions and their numerical checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Overrides the tolerance of the command.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    genus: Option<usize>,
    /// Group such as GL_R:2, O_pq:1,1, U_pq:2 or Sp_R:2.
    #[arg(long, global = true)]
    group: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket of two curves, as a list of {"coef", "word"} terms.
    Bracket {
        /// {"genus": g, "curves": {"name": "a1 b1 A1 B1", ...}}. Without it,
        /// --genus is used and --gamma/--lambda are words.
        input: Option<PathBuf>,
        /// First curve (name in the input, or a word). Defaults to the first curve.
        #[arg(long)]
        gamma: Option<String>,
        /// Second curve. Defaults to the second curve.
        #[arg(long)]
        lambda: Option<String>,
        /// The unoriented bracket, for groups other than GL.
        #[arg(long)]
        unoriented: bool,
    },
    /// Holonomy and trace of a word, optionally for a perturbed connection.
    Holonomy {
        /// {"group": spec, "images": {"a1": matrix, ...}}.
        rep: PathBuf,
        /// Word such as "a1 B2"; empty for the constant loop.
        #[arg(long, default_value = "")]
        word: String,
        /// {"a1": matrix, ...}: integral of the perturbing 1-form over each arc.
        #[arg(long)]
        perturbation: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Sign::Negative)]
        sign: Sign,
    },
    /// Runs a battery of seeded checks and prints one JSON line per trial.
    Verify {
        /// goldman-gl, goldman-unoriented, jacobi, chen, dgla, variation,
        /// torus, independence or perturbed.
        suite: String,
        #[arg(long)]
        trials: Option<usize>,
        /// Worker threads; the output does not depend on it.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
    /// Samples a representation of the surface group.
    SampleRep,
    /// Checks the cyclic DGLA axioms of an instance.
    DglaCheck {
        /// Dense JSON instance. Without it, the surface cohomology instance
        /// for --genus (default 1) and --group (default GL_R:1).
        input: Option<PathBuf>,
        /// Twist the built-in instance by a random Maurer-Cartan element.
        #[arg(long)]
        twist: bool,
        /// Print the instance instead of checking it.
        #[arg(long)]
        emit: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Sign {
    Negative,
    Positive,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Realization { .. } | Error::SamplingFailure { .. } => 3,
            Error::NewtonFailure { .. } | Error::Singular(_) | Error::NonFinite(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Output text and whether the command's checks passed.
type Outcome = Result<(String, bool), Failure>;

fn group(global: &Global) -> Result<Option<GroupSpec>, Failure> {
    global.group.as_deref().map(GroupSpec::parse).transpose().map_err(Failure::from)
}

fn bracket(global: &Global, input: Option<&PathBuf>, gamma: Option<&str>, lambda: Option<&str>, unoriented: bool) -> Outcome {
    let surface = match input {
        Some(path) => SurfaceInput::from_json(&read(path)?)?,
        None => SurfaceInput {
            presentation: SurfacePresentation::new(global.genus.unwrap_or(1))?,
            curves: Vec::new(),
        },
    };
    let pick = |arg: Option<&str>, index: usize| -> Result<Word, Failure> {
        match arg {
            Some(s) => match surface.curve(s) {
                Ok(w) => Ok(w.clone()),
                Err(_) => Ok(surface.presentation.parse_word(s, WordKind::Cyclic)?.reduce()),
            },
            None => surface
                .curves
                .get(index)
                .map(|(_, w)| w.clone())
                .ok_or_else(|| usage("two curves are needed")),
        }
    };
    let g = pick(gamma, 0)?;
    let l = pick(lambda, 1)?;
    let kind = if unoriented { BracketKind::Unoriented } else { BracketKind::Oriented };
    let sum = goldman::bracket(kind, &g, &l, &surface.presentation, global.seed)?;
    Ok((io::json_line(&sum) + "\n", true))
}

fn holonomy(global: &Global, rep: &PathBuf, word: &str, perturbation: Option<&PathBuf>, order: usize, grid: usize, sign: Sign) -> Outcome {
    let rho = io::representation_from_json(&read(rep)?)?;
    let residual = rho.relator_residual();
    let tol = global.tol.unwrap_or(TAU_REP);
    if !(residual <= tol) {
        return Err(Failure {
            code: 4,
            message: format!("relator residual {residual:.3e} exceeds {tol:.1e}"),
        });
    }
    let w = rho.presentation().parse_word(word, WordKind::Based)?;
    let hol = rho.holonomy(&w);
    let mut out = Map::new();
    out.insert("word".into(), w.to_string().into());
    out.insert("relator_residual".into(), num(residual));
    out.insert("holonomy".into(), io::matrix_to_json(hol.matrix()));
    out.insert("trace".into(), num(rho.trace_function(&w)));
    if let Some(path) = perturbation {
        let theta = io::perturbation_from_json(&read(path)?, &rho)?;
        let sign = match sign {
            Sign::Negative => TransportSign::Negative,
            Sign::Positive => TransportSign::Positive,
        };
        let ph = perturbed_holonomy(&rho, &w, &theta, order, grid, sign)?;
        let direct = perturbed_holonomy_rk4(&rho, &w, &theta, grid, sign)?;
        let mut p = Map::new();
        p.insert("holonomy".into(), io::matrix_to_json(&ph.matrix));
        p.insert("trace".into(), num(ph.trace()));
        p.insert("order".into(), order.into());
        p.insert("grid".into(), grid.into());
        p.insert("R".into(), num(ph.series.r));
        p.insert("remainder_bound".into(), num(ph.series.remainder));
        p.insert("rk4_delta".into(), num((&ph.matrix - &direct).norm()));
        out.insert("perturbed".into(), Value::Object(p));
    }
    Ok((Value::Object(out).to_string() + "\n", true))
}

fn run_verify(global: &Global, suite: &str, trials: Option<usize>, parallel: usize) -> Outcome {
    let suite = Suite::parse(suite)?;
    let cfg = Config {
        seed: global.seed,
        trials,
        genus: global.genus,
        group: group(global)?,
        tol: global.tol,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel.max(1))
        .build()
        .map_err(|e| usage(e.to_string()))?;
    let reports = pool.install(|| {
        (0..cfg.trials(suite))
            .into_par_iter()
            .map(|i| verify::run_trial(suite, &cfg, i))
            .collect::<Vec<_>>()
    });
    let report = verify::assemble(suite, reports);
    Ok((report.to_json_lines(), report.pass()))
}

fn sample_rep(global: &Global) -> Outcome {
    let spec = group(global)?.unwrap_or(GroupSpec::gl_r(2));
    let pres = SurfacePresentation::new(global.genus.unwrap_or(1))?;
    let rho = sample_representation_reseeding(&spec, &pres, global.seed, 8)?;
    Ok((io::representation_to_json(&rho).to_string() + "\n", true))
}

fn dgla_check(global: &Global, input: Option<&PathBuf>, twist: bool, emit: bool) -> Outcome {
    let instance: CyclicDgla = match input {
        Some(path) => serde_json::from_str(&read(path)?).map_err(|e| usage(format!("instance: {e}")))?,
        None => {
            let spec = group(global)?.unwrap_or(GroupSpec::gl_r(1));
            let genus = global.genus.unwrap_or(1);
            if twist {
                dgla::twisted_toy_instance(genus, &spec, global.seed)?
            } else {
                dgla::surface_toy_instance(genus, &spec)?
            }
        }
    };
    if emit {
        return Ok((io::json_line(&instance) + "\n", true));
    }
    let tol = global.tol.unwrap_or(TAU_NUM);
    let report = instance.axioms_residual();
    let pass = report.passes(tol);
    let mut out = Map::new();
    let (d0, d1) = instance.dims();
    out.insert("d0".into(), d0.into());
    out.insert("d1".into(), d1.into());
    let residuals = serde_json::to_value(&report).expect("report serializes");
    let rounded: Map<String, Value> = residuals
        .as_object()
        .expect("report is an object")
        .iter()
        .map(|(k, v)| (k.clone(), num(v.as_f64().unwrap_or(f64::NAN))))
        .collect();
    out.insert("residuals".into(), Value::Object(rounded));
    out.insert("tol".into(), num(tol));
    out.insert("pass".into(), pass.into());
    Ok((Value::Object(out).to_string() + "\n", pass))
}

fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Bracket {
            input,
            gamma,
            lambda,
            unoriented,
        } => bracket(g, input.as_ref(), gamma.as_deref(), lambda.as_deref(), *unoriented),
        Command::Holonomy {
            rep,
            word,
            perturbation,
            order,
            grid,
            sign,
        } => holonomy(g, rep, word, perturbation.as_ref(), *order, *grid, *sign),
        Command::Verify { suite, trials, parallel } => run_verify(g, suite, *trials, *parallel),
        Command::SampleRep => sample_rep(g),
        Command::DglaCheck { input, twist, emit } => dgla_check(g, input.as_ref(), *twist, *emit),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, pass)) => {
            let written = match &cli.global.out {
                Some(path) => fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
