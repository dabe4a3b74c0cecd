//! The `thompson` command line.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_rational::Ratio;

use thompson_core::certificate::VerifyMode;
use thompson_core::io::{self as formats, ConstantsOverrides, ParseError};
use thompson_core::oracle::{self, OracleError, ProfileOptions, DEFAULT_NODE_CAP};
use thompson_core::witness::{ConstantsError, WitnessError, WitnessOptions};
use thompson_core::{connect, verify, witness, Alphabet, Element, WitnessConstants};

#[derive(Debug, Parser)]
#[command(name = "thompson", version, about = "Tree-pair diagrams and ball-avoiding path certificates for Thompson's groups")]
pub struct CommandConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Generating set: A = {x0, x1}, B adds c1, C adds pi0. Defaults to A;
    /// `eval` infers it from the word.
    #[arg(long, global = true, value_parser = parse_alphabet)]
    pub alphabet: Option<Alphabet>,
    /// Ball radius (ball, constants, profile, strict witness).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub radius: Option<u32>,
    /// Search cap for word lengths and geodesic synthesis.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub cap: Option<u32>,
    /// Node budget for ball enumeration.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..), default_value_t = DEFAULT_NODE_CAP as u64)]
    pub node_cap: u64,
    /// Constant overrides, e.g. `c=1/4,C=3,M=4,Q=8`.
    #[arg(long, global = true, value_parser = parse_constants)]
    pub constants: Option<ConstantsOverrides>,
    /// Derive M and Q from c and C by the strict rules.
    #[arg(long, global = true)]
    pub strict: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_parser = parse_mode, default_value = "lemmas")]
    pub mode: VerifyMode,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce a diagram file.
    Reduce { diagram: PathBuf },
    /// Multiply elements left to right.
    Mul {
        #[arg(required = true, num_args = 2..)]
        elements: Vec<PathBuf>,
    },
    /// Invert an element.
    Inv { element: PathBuf },
    /// Evaluate a word, given inline or as `@path`.
    Eval { word: String },
    /// Word length of an element, exact up to the cap.
    Len { element: PathBuf },
    /// Enumerate a ball of the Cayley graph.
    Ball,
    /// Estimate c and C from a ball.
    Constants,
    /// Divergence profile as CSV.
    Profile {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n_max: u32,
        /// Spheres larger than this are sampled.
        #[arg(long, default_value_t = 2000)]
        sphere_threshold: usize,
        #[arg(long, default_value_t = 2000)]
        sample_pairs: usize,
    },
    /// Build a witness certificate for an element.
    Witness { element: PathBuf },
    /// Build a connection certificate between two elements.
    Connect { first: PathBuf, second: PathBuf },
    /// Check a certificate and print the report.
    Verify { certificate: PathBuf },
}

fn parse_alphabet(s: &str) -> Result<Alphabet, String> {
    Alphabet::from_name(s).ok_or_else(|| format!("unknown alphabet {s:?}; expected A, B or C"))
}

fn parse_constants(s: &str) -> Result<ConstantsOverrides, String> {
    formats::parse_constants(s).map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> Result<VerifyMode, String> {
    VerifyMode::from_name(s).ok_or_else(|| format!("unknown mode {s:?}; expected exact, leafbound or lemmas"))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("ParseError in {path}: {source}")]
    Parse { path: String, source: Box<ParseError> },
    #[error("ConstantsError: {0}")]
    Constants(#[from] ConstantsError),
    #[error("WitnessError: {0}")]
    Witness(#[from] WitnessError),
    #[error("OracleError: {0}")]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0} check(s) did not pass")]
    Verification(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Oracle(OracleError::ResourceLimit { .. }) => 3,
            CliError::Witness(WitnessError::Audit(_) | WitnessError::Endpoint) => 1,
            _ => 2,
        }
    }
}

const DEFAULT_CAP: u32 = 12;
const DEFAULT_SCALED: (i64, i64, i64, u64, u64) = (1, 4, 3, 4, 8);

fn read_input(path: &Path) -> Result<String, CliError> {
    let io_err = |source| CliError::Io { path: path.display().to_string(), source };
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

fn parse_at<T>(path: &Path, f: impl FnOnce(&str) -> Result<T, ParseError>) -> Result<T, CliError> {
    let text = read_input(path)?;
    f(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source: Box::new(source) })
}

fn load_element(path: &Path) -> Result<Element, CliError> {
    parse_at(path, |t| formats::parse_element(t).map(|(e, _)| e))
}

impl CommandConfig {
    fn alphabet(&self) -> Alphabet {
        self.alphabet.unwrap_or(Alphabet::A)
    }

    fn cap(&self) -> u32 {
        self.cap.unwrap_or(DEFAULT_CAP)
    }

    fn radius(&self) -> u32 {
        self.radius.unwrap_or_else(|| oracle::default_radius(self.alphabet()))
    }

    /// Strict constants take c and C from the overrides or, failing that,
    /// from a ball estimate; scaled constants default to c=1/4, C=3, M=4, Q=8.
    fn witness_constants(&self, diag: &mut dyn Write) -> Result<WitnessConstants, CliError> {
        let o = self.constants.unwrap_or_default();
        if self.strict {
            if o.m.is_some() || o.q.is_some() {
                return Err(CliError::Usage("--strict derives M and Q; do not override them".into()));
            }
            let (c, big_c) = match (o.c, o.big_c) {
                (Some(c), Some(big_c)) => (c, big_c),
                _ => {
                    let est = oracle::estimate_constants(self.alphabet(), self.radius(), self.node_cap as usize)?;
                    writeln!(diag, "estimated c={} C={} from radius {}", est.c_hat, est.big_c_hat, est.radius).ok();
                    (o.c.unwrap_or(est.c_hat), o.big_c.unwrap_or(est.big_c_hat))
                }
            };
            Ok(WitnessConstants::strict(c, big_c)?)
        } else {
            let (cn, cd, big_c, m, q) = DEFAULT_SCALED;
            Ok(WitnessConstants::scaled(
                o.c.unwrap_or(Ratio::new(cn, cd)),
                o.big_c.unwrap_or(Ratio::from_integer(big_c)),
                o.m.unwrap_or(m),
                o.q.unwrap_or(q),
            )?)
        }
    }

    fn witness_options(&self) -> WitnessOptions {
        WitnessOptions { bfs_cap: self.cap(), ..WitnessOptions::default() }
    }
}

fn emit(config: &CommandConfig, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

/// Runs one command; artifacts go to `--out` or `stdout`, notes to `diag`.
pub fn run(config: &CommandConfig, stdout: &mut dyn Write, diag: &mut dyn Write) -> Result<(), CliError> {
    let text = match &config.command {
        Command::Reduce { diagram } => {
            let (e, reduced) = parse_at(diagram, formats::parse_element)?;
            if !reduced {
                writeln!(diag, "input was not reduced").ok();
            }
            formats::serialize_element(&e)
        }
        Command::Mul { elements } => {
            let mut acc = Element::identity();
            for p in elements {
                acc = acc.multiply(&load_element(p)?);
            }
            formats::serialize_element(&acc)
        }
        Command::Inv { element } => formats::serialize_element(&load_element(element)?.invert()),
        Command::Eval { word } => {
            let w = match word.strip_prefix('@') {
                Some(path) => parse_at(Path::new(path), |t| formats::parse_word(t, config.alphabet))?,
                None => formats::parse_word(word, config.alphabet).map_err(|source| CliError::Parse { path: "<argument>".into(), source: Box::new(source) })?,
            };
            formats::serialize_element(&w.eval())
        }
        Command::Len { element } => {
            let g = load_element(element)?;
            if !config.alphabet().generates(g.classify()) {
                return Err(CliError::Usage(format!("element is not generated by alphabet {}", config.alphabet())));
            }
            let cap = config.cap();
            match oracle::geodesic(&g, config.alphabet(), cap) {
                Some(w) => format!("{}\n{}\n", w.length(), w),
                None => {
                    let bound = oracle::leaf_count_length_bound(&g, config.alphabet()).max(cap + 1);
                    format!(">={bound}\n")
                }
            }
        }
        Command::Ball => {
            let ball = oracle::BallIndex::enumerate(config.alphabet(), config.radius(), config.node_cap as usize)?;
            formats::serialize_ball(&ball)
        }
        Command::Constants => {
            let est = oracle::estimate_constants(config.alphabet(), config.radius(), config.node_cap as usize)?;
            format!("c={},C={}\nradius {}\nsample {}\n", est.c_hat, est.big_c_hat, est.radius, est.sample_size)
        }
        Command::Profile { n_max, sphere_threshold, sample_pairs } => {
            let opts = ProfileOptions {
                sphere_threshold: *sphere_threshold,
                sample_pairs: *sample_pairs,
                ball_radius: config.radius,
                seed: config.seed,
                node_cap: config.node_cap as usize,
            };
            let cap = config.cap.unwrap_or(4 * n_max + 8);
            let rows = oracle::divergence_profile(config.alphabet(), *n_max, cap, &opts)?;
            for r in &rows {
                writeln!(diag, "n={} sphere={} pairs={} escalated={}", r.n, r.sphere_size, r.pairs, r.escalated).ok();
            }
            formats::serialize_profile(&rows)
        }
        Command::Witness { element } => {
            let g = load_element(element)?;
            let k = config.witness_constants(diag)?;
            let cert = witness(&g, &k, config.alphabet(), &config.witness_options())?;
            writeln!(diag, "lambda {} ({}), length {}", cert.lambda.value, cert.lambda.source.name(), cert.length()).ok();
            formats::serialize_certificate(&cert)
        }
        Command::Connect { first, second } => {
            let (a, b) = (load_element(first)?, load_element(second)?);
            let k = config.witness_constants(diag)?;
            let cert = connect(&a, &b, &k, config.alphabet(), &config.witness_options())?;
            writeln!(diag, "length {}", cert.length()).ok();
            formats::serialize_certificate(&cert)
        }
        Command::Verify { certificate } => {
            let cert = parse_at(certificate, formats::parse_certificate)?;
            let report = verify(&cert, config.mode, config.cap());
            emit(config, stdout, &format!("{report}\n"))?;
            let failed = report.failures().count();
            return if failed == 0 { Ok(()) } else { Err(CliError::Verification(failed)) };
        }
    };
    emit(config, stdout, &text)
}
