use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use iwa_core::character::{eval_char, CharacterSpec};
use iwa_core::error::Error;
use iwa_core::group_ring::{GroupRingElem, Level};
use iwa_core::half_logs::{log_trunc, vanishing_locus, Sign};
use iwa_core::json::{self, GroupRingJson, PairJson, PmJson};
use iwa_core::padic::{PadicCtx, PadicScalar};
use iwa_core::pollack::{check_admissible, compose, decompose, DecomposeOptions};
use iwa_core::qpn::dim_table;
use iwa_core::quad::{QuadCtx, QuadExtScalar};
use iwa_core::rng::{stream, stream_id};
use iwa_core::scalar::RingTag;
use iwa_core::verify::{SuiteRegistry, VerifyConfig};
use serde::de::DeserializeOwned;
use serde::Serialize;

const EXIT_NOT_DIVISIBLE: u8 = 2;
const EXIT_UNBOUNDED: u8 = 3;
const EXIT_MALFORMED: u8 = 64;
const EXIT_INTERNAL: u8 = 70;
const EXIT_CHECK_FAILED: u8 = 1;

/// Finite-level plus/minus Iwasawa arithmetic at supersingular primes.
#[derive(Parser)]
#[command(name = "iwa", version)]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Odd prime p [default: 3].
    #[arg(long, global = true)]
    p: Option<u64>,

    /// Weight k >= 2 [default: 2].
    #[arg(long, global = true)]
    k: Option<u32>,

    /// Level n: elements live in O[G_n] with γ of order p^(n-1) [default: 3].
    #[arg(long, global = true)]
    n: Option<u32>,

    /// Relative p-adic precision [default: 40].
    #[arg(long = "N", global = true)]
    precision: Option<u32>,

    /// ε(p) as a residue mod p.
    #[arg(long, global = true, default_value_t = -1, allow_hyphen_values = true)]
    eps: i64,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Input JSON file (stdin when absent).
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,

    /// Output file (stdout when absent).
    #[arg(long = "out", global = true)]
    output: Option<PathBuf>,
}

impl Global {
    fn p(&self) -> u64 {
        self.p.unwrap_or(3)
    }

    fn k(&self) -> u32 {
        self.k.unwrap_or(2)
    }

    fn n(&self) -> u32 {
        self.n.unwrap_or(3)
    }

    fn cap(&self) -> u32 {
        self.precision.unwrap_or(40)
    }

    fn level(&self) -> Result<Arc<Level>, Failure> {
        Ok(Level::new(&PadicCtx::new(self.p(), self.cap())?, self.n())?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Split an admissible pair (pair.json) into (L+, L-) (pm.json).
    Decompose {
        /// Least allowed coefficient valuation of L+ and L-.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        floor: i64,
    },
    /// Build the pair (L1, L2) from (L+, L-).
    Compose {
        /// Use seeded random integral (L+, L-) at --p --n --k --eps instead of --in.
        #[arg(long)]
        random: bool,
    },
    /// Check the admissibility law of a pair.
    Admissible {
        /// Smallest conductor index that counts towards the verdict.
        #[arg(long, default_value_t = 2)]
        s_min: u32,
    },
    /// Divide an element by Φ_m(γ).
    Divide {
        #[arg(long)]
        m: u32,
    },
    /// Evaluate an element at a character given as {"d","m","e","r"}.
    Eval {
        #[arg(long = "char")]
        character: String,
    },
    /// Emit the truncated half-logarithm log^± at level n.
    Halflog {
        #[arg(long, default_value = "plus")]
        sign: Sign,
    },
    /// List the characters χ^rθ, r <= k-2, at which log^± vanishes.
    HalflogZeros {
        #[arg(long, default_value = "plus")]
        sign: Sign,
    },
    /// Linear algebra in Q(ζ_{p^n}).
    Qpn {
        #[command(subcommand)]
        action: QpnAction,
    },
    /// Run a verification suite by name, or "all".
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        /// Overrides each suite's sample count.
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Subcommand)]
enum QpnAction {
    /// Dimensions of Q^±, R^± and U_n with the closed forms.
    Dims,
    /// Run the subspace invariants at the given p and n.
    Verify,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotDivisible(_) | Error::NotDecomposable(_) => EXIT_NOT_DIVISIBLE,
            Error::UnboundedResult(_) => EXIT_UNBOUNDED,
            Error::DivideByZero | Error::PrecisionExhausted(_) | Error::NotAUnit(_) => EXIT_INTERNAL,
            _ => EXIT_MALFORMED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn malformed(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_MALFORMED,
        message: message.into(),
    }
}

fn read_input<T: DeserializeOwned>(g: &Global) -> Result<T, Failure> {
    let text = match &g.input {
        Some(path) => fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?,
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| malformed(format!("stdin: {e}")))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| malformed(format!("invalid JSON: {e}")))
}

fn write_output<T: Serialize>(g: &Global, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: e.to_string(),
    })?;
    text.push('\n');
    let io_err = |e: io::Error| Failure {
        code: EXIT_INTERNAL,
        message: e.to_string(),
    };
    match &g.output {
        Some(path) => fs::write(path, text).map_err(io_err),
        None => io::stdout().write_all(text.as_bytes()).map_err(io_err),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let g = &cli.global;
    match cli.command {
        Command::Decompose { floor } => {
            let pair: PairJson = read_input(g)?;
            let pair = json::pair_from_json(&pair, g.precision)?;
            let pm = decompose(&pair, &DecomposeOptions { floor })?;
            write_output(g, &json::pm_to_json(&pm, &pair.quad))?;
        }
        Command::Compose { random } => {
            let (quad, plus, minus) = if random {
                let level = g.level()?;
                let quad = QuadCtx::new(level.ctx(), g.k(), g.eps)?;
                let mut rng = stream(g.seed, stream_id(&[g.p(), g.n() as u64, g.k() as u64]));
                let plus = GroupRingElem::random_integral(&level, &mut rng);
                let minus = GroupRingElem::random_integral(&level, &mut rng);
                (quad, plus, minus)
            } else {
                let pm: PmJson = read_input(g)?;
                json::pm_from_json(&pm, g.precision)?
            };
            write_output(g, &json::pair_to_json(&compose(&plus, &minus, &quad)?))?;
        }
        Command::Admissible { s_min } => {
            let pair: PairJson = read_input(g)?;
            let report = check_admissible(&json::pair_from_json(&pair, g.precision)?, s_min)?;
            write_output(g, &report)?;
            if !report.passed {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::Divide { m } => {
            let f: GroupRingJson = read_input(g)?;
            if f.ring != RingTag::Base {
                return Err(malformed("divide expects a base-ring element"));
            }
            let level = json::level_for(&f, g.precision)?;
            let f = json::elem_from_json::<PadicScalar>(&f, &level, level.ctx())?;
            write_output(g, &json::elem_to_json(&f.divide_exact(m)?))?;
        }
        Command::Eval { character } => {
            let chi: CharacterSpec =
                serde_json::from_str(&character).map_err(|e| malformed(format!("invalid character: {e}")))?;
            let f: GroupRingJson = read_input(g)?;
            let level = json::level_for(&f, g.precision)?;
            let chi = chi.normalized(level.p(), level.n())?;
            match f.ring {
                RingTag::Base => {
                    let f = json::elem_from_json::<PadicScalar>(&f, &level, level.ctx())?;
                    write_output(g, &json::cyclotomic_to_json(&eval_char(&f, &chi)?))?;
                }
                RingTag::Quad => {
                    let quad = QuadCtx::new(level.ctx(), g.k(), g.eps)?;
                    let f = json::elem_from_json::<QuadExtScalar>(&f, &level, &quad)?;
                    write_output(g, &json::cyclotomic_to_json(&eval_char(&f, &chi)?))?;
                }
            }
        }
        Command::Halflog { sign } => {
            write_output(g, &json::elem_to_json(&log_trunc(&g.level()?, g.k(), sign)?))?;
        }
        Command::HalflogZeros { sign } => {
            write_output(g, &vanishing_locus(&g.level()?, g.k(), sign)?)?;
        }
        Command::Qpn { action } => match action {
            QpnAction::Dims => write_output(g, &dim_table(g.p(), g.n())?)?,
            QpnAction::Verify => {
                let cfg = verify_config(g, None, true);
                let registry = SuiteRegistry::with_builtin();
                let reports = ["dims", "coincide", "spanning"]
                    .iter()
                    .map(|name| registry.run(name, &cfg))
                    .collect::<Result<Vec<_>, _>>()?;
                let passed = reports.iter().all(|r| r.passed);
                write_output(g, &reports)?;
                if !passed {
                    return Ok(EXIT_CHECK_FAILED);
                }
            }
        },
        Command::Verify { suite, samples } => {
            let registry = SuiteRegistry::with_builtin();
            let report = registry.run(&suite, &verify_config(g, samples, false))?;
            for s in &report.suites {
                eprintln!("{s}");
            }
            write_output(g, &report)?;
            if !report.passed {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
    }
    Ok(0)
}

/// `pin_level` fixes p and n to their defaults when absent.
fn verify_config(g: &Global, samples: Option<usize>, pin_level: bool) -> VerifyConfig {
    VerifyConfig {
        p: if pin_level { Some(g.p()) } else { g.p },
        n: if pin_level { Some(g.n()) } else { g.n },
        k: g.k,
        eps: g.eps,
        cap: g.cap(),
        seed: g.seed,
        samples,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = std::env::var("IWA_THREADS").ok().and_then(|t| t.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("iwa: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
