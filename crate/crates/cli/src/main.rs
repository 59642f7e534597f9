//! `cmvkit`: generate test matrices, reduce unitaries to CMV-like form, compute
//! eigenvalues and polynomial roots, check profiles and draw spy masks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use cmv_core::cmv::{
    unitary_cmv_reduction_with, verify_cmv_like, verify_rank_pattern, CmvLikeForm, CmvProfile,
};
use cmv_core::cmv::{ReductionOptions, Violation};
use cmv_core::generate::GeneratorSpec;
use cmv_core::linalg::io::{read_cmtx, write_cmtx};
use cmv_core::linalg::UNIT_ROUNDOFF;
use cmv_core::qriter::{eigensolve_unitary, ShiftStrategy};
use cmv_core::report::CmvReportJson;
use cmv_core::rng::{SeededRng, DEFAULT_SEED};
use cmv_core::rootfind::{roots_with, MonicPolynomial, RootOptions};
use cmv_core::spy::SpyImage;
use cmv_core::ComplexMatrix;

const EXIT_INPUT: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cmvkit",
    version,
    about = "CMV-like reduction and structured QR for unitary matrices"
)]
struct Cli {
    /// Seed for generators and restart vectors.
    #[arg(long, global = true, env = "CMV_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated test matrix as CMTX.
    Gen {
        #[arg(long = "gen", value_name = "SPEC")]
        spec: GeneratorSpec,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Reduce a unitary matrix to CMV-like form.
    Reduce {
        #[command(flatten)]
        source: Source,
        /// Where to write T (CMTX).
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Where to write Q (CMTX).
        #[arg(long)]
        q_output: Option<PathBuf>,
        /// Where to write the JSON reduction report.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        spy: SpyArgs,
        #[arg(long, default_value_t = 10.0)]
        tol_scale: f64,
    },
    /// Eigenvalues of a unitary matrix through its CMV-like form.
    Eig {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "wilkinson")]
        shift: ShiftStrategy,
        /// Defaults to 100·n.
        #[arg(long)]
        max_steps: Option<usize>,
        /// Where to write the JSON eigensolve report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Roots of a monic polynomial.
    Roots {
        /// Coefficients from the leading one down, e.g. `1,0,-1` for z² − 1.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            conflicts_with = "input"
        )]
        coeffs: Option<Vec<f64>>,
        /// Polynomial text file (`poly <n>` header, then a₀ … aₙ₋₁).
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "wilkinson")]
        shift: ShiftStrategy,
        /// Defaults to 100·degree.
        #[arg(long)]
        max_steps: Option<usize>,
        /// Rescale so that |a₀| = 1 before iterating.
        #[arg(long)]
        balance: bool,
    },
    /// Check a matrix against a CMV-like profile and the rank pattern.
    Check {
        #[arg(long, short)]
        input: PathBuf,
        /// Segment sizes of the expected direct sum; one segment by default.
        #[arg(long, value_delimiter = ',')]
        segments: Option<Vec<usize>>,
        #[arg(long, default_value_t = 10.0)]
        tol_scale: f64,
    },
    /// Time reduction and eigensolve on Haar-random unitaries; CSV on stdout.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
        sizes: Vec<usize>,
        /// Each timing is the fastest of this many runs.
        #[arg(long, default_value_t = 3)]
        repeat: usize,
    },
    /// Draw the zero pattern of a matrix.
    Spy {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SpyFormat::Text)]
        format: SpyFormat,
        #[arg(long, default_value_t = 10.0)]
        tol_scale: f64,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Generator spec such as `fourier:32`, `circulant:16`, `haar:12` or `direct:4,4`.
    #[arg(long = "gen", value_name = "SPEC")]
    spec: Option<GeneratorSpec>,
    /// CMTX file.
    #[arg(long, short)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct SpyArgs {
    /// Write the spy mask of T here.
    #[arg(long = "spy")]
    path: Option<PathBuf>,
    /// Inferred from the extension (`.pgm` or text) when omitted.
    #[arg(long = "spy-format", value_enum)]
    format: Option<SpyFormat>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpyFormat {
    Text,
    Pgm,
}

/// Failure with a specific exit code.
#[derive(Debug)]
struct Exit(u8, String);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors are input errors; --help and --version are not errors
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Exit>() {
                Some(Exit(code, _)) => ExitCode::from(*code),
                None => ExitCode::from(EXIT_INPUT),
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let seed = cli.seed;
    match cli.command {
        Command::Gen { spec, output } => {
            let u = spec.with_seed(seed).generate()?;
            emit(output.as_deref(), write_cmtx(&u).as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce {
            source,
            output,
            q_output,
            report,
            spy,
            tol_scale,
        } => {
            let u = load(&source, seed)?;
            let form = reduce(&u, seed)?;
            if let Some(path) = &output {
                write_file(path, write_cmtx(&form.t).as_bytes())?;
            }
            if let Some(path) = &q_output {
                write_file(path, write_cmtx(&form.q).as_bytes())?;
            }
            if let Some(path) = &report {
                let json = CmvReportJson::new(&form.profile, &form.report);
                write_file(path, to_json(&json)?.as_bytes())?;
            }
            let threshold = tol_scale * form.report.deflation_threshold;
            if let Some(path) = &spy.path {
                let format = spy.format.unwrap_or_else(|| format_for(path));
                write_spy(path, &SpyImage::new(&form.t, threshold), format)?;
            }
            let sizes: Vec<String> = form
                .profile
                .segments()
                .iter()
                .map(|s| s.len().to_string())
                .collect();
            println!(
                "n={} segments={} sizes={}",
                form.profile.n,
                sizes.len(),
                sizes.join(",")
            );
            println!(
                "residual={:e} unitarity={:e}",
                form.report.residual, form.report.unitarity
            );
            let check = verify_cmv_like(&form.t, &form.profile, threshold);
            if !check.passed() {
                print_violations(&check.violations);
                return Err(Exit(EXIT_VERIFY, "reduced matrix is not CMV-like".into()).into());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eig {
            source,
            shift,
            max_steps,
            report,
        } => {
            let u = load(&source, seed)?;
            let form = reduce(&u, seed)?;
            let n = u.rows();
            let result =
                eigensolve_unitary(&form.t, &form.profile, shift, max_steps.unwrap_or(100 * n))?;
            for z in &result.eigenvalues {
                println!("{}", format_complex(*z));
            }
            if let Some(path) = &report {
                write_file(path, to_json(&result.to_json())?.as_bytes())?;
            }
            eprintln!(
                "steps={} converged={}",
                result.steps_total, result.converged
            );
            if !result.converged {
                return Err(
                    Exit(EXIT_NO_CONVERGENCE, "eigensolver did not converge".into()).into(),
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Roots {
            coeffs,
            input,
            shift,
            max_steps,
            balance,
        } => {
            let p = match (coeffs, input) {
                (Some(c), _) => {
                    let c: Vec<Complex64> = c.into_iter().map(Complex64::from).collect();
                    MonicPolynomial::from_high_order(&c)?
                }
                (None, Some(path)) => read(&path)?.parse()?,
                (None, None) => bail!("give --coeffs or --input"),
            };
            let result = roots_with(
                &p,
                &RootOptions {
                    shift,
                    max_steps,
                    balance,
                },
            )?;
            for z in &result.roots {
                println!("{}", format_complex(*z));
            }
            eprintln!("steps={} converged={}", result.steps, result.converged);
            if !result.converged {
                return Err(Exit(EXIT_NO_CONVERGENCE, "rootfinder did not converge".into()).into());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            input,
            segments,
            tol_scale,
        } => {
            let t = read_cmtx(&read(&input)?)
                .with_context(|| format!("reading {}", input.display()))?;
            let n = t.require_square()?;
            let profile = match segments {
                Some(s) if s.iter().sum::<usize>() != n => {
                    bail!("segment sizes do not add up to {n}")
                }
                Some(s) => CmvProfile::from_segment_sizes(&s),
                None => CmvProfile::single(n),
            };
            let threshold = tol_scale * default_threshold(&t);
            let check = verify_cmv_like(&t, &profile, threshold);
            print_violations(&check.violations);
            println!(
                "max_off_profile={:e} max_coupling_sigma2={:e}",
                check.max_off_profile, check.max_coupling_sigma2
            );
            let mut ok = check.passed();
            if n % 2 == 0 && profile.segments().len() == 1 {
                let pattern = verify_rank_pattern(&t, threshold);
                println!(
                    "rank_pattern={} skipped={}",
                    if pattern.passed() { "ok" } else { "failed" },
                    pattern.skipped()
                );
                ok &= pattern.passed();
            }
            if !ok {
                return Err(Exit(EXIT_VERIFY, "matrix is not CMV-like".into()).into());
            }
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { sizes, repeat } => {
            println!("n,ms_reduce,ms_eig,residual");
            for n in sizes {
                let u = cmv_core::generate::haar_unitary(n, seed);
                let (mut ms_reduce, mut ms_eig) = (f64::INFINITY, f64::INFINITY);
                let mut residual = 0.0;
                for _ in 0..repeat.max(1) {
                    let start = Instant::now();
                    let form = reduce(&u, seed)?;
                    ms_reduce = ms_reduce.min(start.elapsed().as_secs_f64() * 1e3);
                    let start = Instant::now();
                    eigensolve_unitary(&form.t, &form.profile, ShiftStrategy::Wilkinson, 100 * n)?;
                    ms_eig = ms_eig.min(start.elapsed().as_secs_f64() * 1e3);
                    residual = form.report.residual;
                }
                println!("{n},{ms_reduce:.3},{ms_eig:.3},{residual:e}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Spy {
            input,
            output,
            format,
            tol_scale,
        } => {
            let t = read_cmtx(&read(&input)?)
                .with_context(|| format!("reading {}", input.display()))?;
            let image = SpyImage::new(&t, tol_scale * default_threshold(&t));
            match &output {
                Some(path) => write_spy(path, &image, format)?,
                None => emit(None, &spy_bytes(&image, format))?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load(source: &Source, seed: u64) -> anyhow::Result<ComplexMatrix> {
    match (&source.spec, &source.input) {
        (Some(spec), _) => Ok(spec.clone().with_seed(seed).generate()?),
        (None, Some(path)) => {
            read_cmtx(&read(path)?).with_context(|| format!("reading {}", path.display()))
        }
        (None, None) => bail!("give --gen or --input"),
    }
}

fn reduce(u: &ComplexMatrix, seed: u64) -> anyhow::Result<CmvLikeForm> {
    let n = u.require_square()?;
    let z = SeededRng::new(seed).unit_vector(n);
    let options = ReductionOptions {
        seed,
        ..ReductionOptions::default()
    };
    Ok(unitary_cmv_reduction_with(u, &z, &options)?)
}

/// `n·u·‖T‖_F`.
fn default_threshold(t: &ComplexMatrix) -> f64 {
    t.rows() as f64 * UNIT_ROUNDOFF * t.frobenius_norm()
}

fn format_complex(z: Complex64) -> String {
    format!("{:.16e} {:.16e}", z.re, z.im)
}

fn print_violations(violations: &[Violation]) {
    for v in violations {
        match v {
            Violation::OffProfile {
                row,
                col,
                magnitude,
            } => {
                println!("off-profile entry ({row}, {col}) magnitude {magnitude:e}")
            }
            Violation::CouplingRank {
                block_row,
                block_col,
                sigma2,
            } => {
                println!("coupling block ({block_row}, {block_col}) sigma2 {sigma2:e}")
            }
            Violation::NotUnitary {
                residual,
                tolerance,
            } => {
                println!("not unitary: residual {residual:e} > {tolerance:e}")
            }
            Violation::DimensionMismatch { matrix, profile } => {
                println!("matrix order {matrix} does not match profile order {profile}")
            }
        }
    }
}

fn format_for(path: &Path) -> SpyFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("pgm") => SpyFormat::Pgm,
        _ => SpyFormat::Text,
    }
}

fn spy_bytes(image: &SpyImage, format: SpyFormat) -> Vec<u8> {
    match format {
        SpyFormat::Text => image.to_text().into_bytes(),
        SpyFormat::Pgm => image.to_pgm(),
    }
}

fn write_spy(path: &Path, image: &SpyImage, format: SpyFormat) -> anyhow::Result<()> {
    write_file(path, &spy_bytes(image, format))
}

fn to_json<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    use std::io::Write;
    match path {
        Some(p) => write_file(p, bytes),
        None => Ok(std::io::stdout().write_all(bytes)?),
    }
}
