//! The `latcode` command line. Every command prints one JSON document.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::arith::{add, format_rational, parse_rational, Integer};
use crate::builders::{
    construction_a, construction_a_check, construction_d, conv_lattice, kronecker_columns, BuiltLattice,
};
use crate::config::{parse_integer_list, parse_rational_list, PairConfig, SchemeDoc};
use crate::encoder::{Encoder, EncoderChoice};
use crate::error::{Error, Result};
use crate::full::{build_scheme, cyclic_generator};
use crate::lattice::{
    enumerate_codebook, is_sublattice, message_count, search_factorizations, verify_rectangular, Ranges,
    Rate, DEFAULT_CODEBOOK_CAP, DEFAULT_SEARCH_CAP,
};
use crate::quantizer::QuantizerSpec;
use crate::serial::{integers_to_value, matrix_to_value, vector_to_value};
use crate::shaping::{hom_check, shaping_gain_mc, HOM_EXHAUSTIVE_CAP};
use crate::triangular::derive_ranges;

#[derive(Debug, Parser)]
#[command(name = "latcode", version, about = "Encode and index nested lattice codes exactly")]
pub struct Cli {
    /// Print compact single-line JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Lattice-pair JSON document.
    #[arg(long)]
    pub config: PathBuf,
    /// Column (1-based) to replace in the full-matrix basis change.
    #[arg(long)]
    pub t: Option<usize>,
    /// Comma-separated message ranges for the coding basis.
    #[arg(long)]
    pub ranges: Option<String>,
    /// Scheme file written by `prepare`.
    #[arg(long)]
    pub scheme: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Which {
    Coding,
    Shaping,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sublattice test, message count, rate and encoder choice.
    Info(PairArgs),
    /// Map a message vector to its codeword.
    Encode {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        b: String,
    },
    /// Map any coding-lattice point to the message of its coset.
    Index {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Build a full-matrix scheme and print it for reuse.
    Prepare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        t: Option<usize>,
    },
    /// List every range factorization that encodes with the coding generator.
    Factorize {
        #[arg(long)]
        config: PathBuf,
    },
    /// Dump the codebook; with an encoder, also the message of each point.
    Codebook {
        #[command(flatten)]
        pair: PairArgs,
        /// Include `{b, x}` entries in message order.
        #[arg(long)]
        messages: bool,
    },
    /// Divisibility condition and exact homomorphism check.
    Homcheck(PairArgs),
    /// A codeword generating the whole code, if the code is cyclic.
    Cyclic {
        #[arg(long)]
        config: PathBuf,
    },
    /// Monte Carlo shaping gain of one lattice of the pair.
    Shapegain {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "shaping")]
        lattice: Which,
    },
    /// Check bijectivity, round trips and coset-shift invariance.
    Selftest {
        #[command(flatten)]
        pair: PairArgs,
        /// Check this many random messages instead of all of them.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Construct lattices from codes.
    #[command(subcommand)]
    Build(BuildCommand),
}

#[derive(Debug, Subcommand)]
pub enum BuildCommand {
    /// `C + pZ^n` from code basis vectors (JSON array of 0..p-1 arrays).
    ConstrA {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        basis: String,
    },
    /// Check matrix from parity rows (JSON array of arrays).
    ConstrACheck {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        parity: String,
    },
    /// `D2 + 2·D1 + 4Z^n` from explicit bases or Kronecker columns.
    ConstrD {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d1: Option<String>,
        #[arg(long)]
        d2: Option<String>,
        /// Use columns of the Kronecker power of [1 0; 1 1] with this many factors.
        #[arg(long)]
        kronecker: Option<u32>,
        #[arg(long)]
        d1_cols: Option<String>,
        #[arg(long)]
        d2_cols: Option<String>,
    },
    /// Terminated convolutional code lattice with its trellis quantizer.
    Conv {
        /// Octal generator polynomials, comma separated.
        #[arg(long)]
        polys: String,
        #[arg(long)]
        blocklen: usize,
        /// Scale the lattice by K.
        #[arg(long)]
        scale: Option<String>,
    },
}

/// Exit status and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome { code, stdout: if code == 0 { e.to_string() } else { String::new() }, stderr: if code == 0 { String::new() } else { e.to_string() } };
        }
    };
    let render = |v: &Value| {
        if cli.json {
            serde_json::to_string(v).expect("serializable")
        } else {
            serde_json::to_string_pretty(v).expect("serializable")
        }
    };
    match execute(&cli.command) {
        Ok((value, code)) => Outcome { code, stdout: render(&value) + "\n", stderr: String::new() },
        Err(e) => {
            let value = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
            Outcome { code: e.exit_code(), stdout: String::new(), stderr: render(&value) + "\n" }
        }
    }
}

fn load(config: &Path) -> Result<PairConfig> {
    PairConfig::from_path(config)
}

fn encoder(args: &PairArgs, cfg: &PairConfig) -> Result<Encoder> {
    let pair = cfg.pair()?;
    if let Some(path) = &args.scheme {
        return Ok(Encoder::Full(SchemeDoc::from_path(path)?.rebuild(&pair)?));
    }
    let choice = EncoderChoice {
        t: args.t,
        ranges: args
            .ranges
            .as_deref()
            .map(|s| Ranges::new(parse_integer_list(s)?).map_err(|e| Error::Config(e.to_string())))
            .transpose()?,
    };
    Encoder::select(&pair, cfg.encoding.as_ref(), &choice)
}

fn rate_value(rate: &Rate) -> Value {
    let bits = rate.bits_per_dim();
    json!({
        "M": integers_to_value(std::slice::from_ref(&rate.messages))[0],
        "n": rate.n,
        "bits_per_dim": (bits * 1e4).round() / 1e4,
    })
}

fn execute(command: &Command) -> Result<(Value, i32)> {
    match command {
        Command::Info(args) => info(args),
        Command::Encode { pair, b } => {
            let cfg = load(&pair.config)?;
            let enc = encoder(pair, &cfg)?;
            let b = parse_integer_list(b)?;
            let x = enc.encode(&b)?;
            Ok((json!({"b": integers_to_value(&b), "x": vector_to_value(&x)}), 0))
        }
        Command::Index { pair, x } => {
            let cfg = load(&pair.config)?;
            let enc = encoder(pair, &cfg)?;
            let x = parse_rational_list(x)?;
            let b = enc.index(&x)?;
            Ok((json!({"b": integers_to_value(&b), "x": vector_to_value(&x)}), 0))
        }
        Command::Prepare { config, t } => {
            let pair = load(config)?.pair()?;
            let t = match t {
                Some(0) => return Err(Error::Config("t is 1-based".into())),
                Some(t) => Some(t - 1),
                None => None,
            };
            let doc = SchemeDoc::from_scheme(&build_scheme(&pair, t)?)?;
            Ok((serde_json::to_value(doc).expect("serializable"), 0))
        }
        Command::Factorize { config } => {
            let pair = load(config)?.pair()?;
            let found = search_factorizations(&pair, DEFAULT_SEARCH_CAP)?;
            let list: Vec<Value> = found.iter().map(|r| integers_to_value(r.as_slice())).collect();
            Ok((json!({"M": integers_to_value(std::slice::from_ref(pair.message_count()))[0], "factorizations": list}), 0))
        }
        Command::Codebook { pair: args, messages } => {
            let cfg = load(&args.config)?;
            let pair = cfg.pair()?;
            let points = enumerate_codebook(&pair, DEFAULT_CODEBOOK_CAP)?;
            let mut out = json!({
                "M": integers_to_value(std::slice::from_ref(pair.message_count()))[0],
                "points": points.iter().map(|p| vector_to_value(p)).collect::<Vec<_>>(),
            });
            if *messages {
                let enc = encoder(args, &cfg)?;
                let entries = enc
                    .ranges()
                    .iter()
                    .map(|b| Ok(json!({"b": integers_to_value(&b), "x": vector_to_value(&enc.encode(&b)?)})))
                    .collect::<Result<Vec<_>>>()?;
                out["encoder"] = json!(enc.kind());
                out["ranges"] = integers_to_value(enc.ranges().as_slice());
                out["entries"] = Value::Array(entries);
            }
            Ok((out, 0))
        }
        Command::Homcheck(args) => {
            let cfg = load(&args.config)?;
            let enc = encoder(args, &cfg)?;
            let r = hom_check(enc.pair(), enc.basis(), enc.ranges(), HOM_EXHAUSTIVE_CAP)?;
            let failing: Vec<Value> = r
                .failing_rows
                .iter()
                .map(|(i, v)| json!({"row": i + 1, "entry": format_rational(v)}))
                .collect();
            Ok((
                json!({
                    "encoder": enc.kind(),
                    "ranges": integers_to_value(enc.ranges().as_slice()),
                    "condition_holds": r.condition_holds,
                    "failing_rows": failing,
                    "verified": r.verified,
                    "counterexample": r.counterexample.map(|(a, b)| json!({"b1": integers_to_value(&a), "b2": integers_to_value(&b)})),
                }),
                0,
            ))
        }
        Command::Cyclic { config } => {
            let pair = load(config)?.pair()?;
            let g = cyclic_generator(&pair, DEFAULT_CODEBOOK_CAP)?;
            Ok((json!({"cyclic": g.is_some(), "generator": g.map(|g| vector_to_value(&g))}), 0))
        }
        Command::Shapegain { config, samples, seed, lattice } => {
            let cfg = load(config)?;
            let lat = match lattice {
                Which::Coding => cfg.coding_lattice()?,
                Which::Shaping => cfg.shaping_lattice()?,
            };
            let est = shaping_gain_mc(&lat, *samples, *seed)?;
            Ok((
                json!({
                    "gain_db": est.gain_db,
                    "half_width_db": est.half_width_db,
                    "normalized_second_moment": est.normalized_second_moment,
                    "samples": est.samples,
                    "seed": seed,
                }),
                0,
            ))
        }
        Command::Selftest { pair, samples, seed } => selftest(pair, *samples, *seed),
        Command::Build(b) => build(b),
    }
}

fn info(args: &PairArgs) -> Result<(Value, i32)> {
    let cfg = load(&args.config)?;
    let coding = cfg.coding_lattice()?;
    let shaping = cfg.shaping_lattice()?;
    let sub = is_sublattice(&coding, &shaping)?;
    let mut out = json!({
        "n": cfg.n,
        "sublattice": sub,
        "coding_volume": format_rational(&coding.volume()),
        "shaping_volume": format_rational(&shaping.volume()),
    });
    if !sub {
        return Ok((out, 3));
    }
    let m = message_count(&coding, &shaping)?;
    let rate = Rate { messages: m.clone(), n: cfg.n };
    out["M"] = integers_to_value(std::slice::from_ref(&m))[0].clone();
    out["rate_bits_per_dim"] = rate_value(&rate)["bits_per_dim"].clone();
    let pair = cfg.pair()?;
    out["triangular"] = json!(derive_ranges(&pair).is_ok());
    match encoder(args, &cfg) {
        Ok(enc) => {
            out["encoder"] = json!(enc.kind());
            out["ranges"] = integers_to_value(enc.ranges().as_slice());
        }
        Err(Error::BasisChange(_)) => out["encoder"] = Value::Null,
        Err(e) => return Err(e),
    }
    Ok((out, 0))
}

fn check(name: &str, pass: bool, detail: Value) -> Value {
    json!({"name": name, "pass": pass, "detail": detail})
}

fn selftest(args: &PairArgs, samples: Option<u64>, seed: u64) -> Result<(Value, i32)> {
    let cfg = load(&args.config)?;
    let enc = encoder(args, &cfg)?;
    let pair = enc.pair().clone();
    let m = pair.message_count().clone();
    let exhaustive = samples.is_none();
    if exhaustive && m > Integer::from(DEFAULT_CODEBOOK_CAP) {
        return Err(Error::Resource(format!(
            "{m} messages exceed the exhaustive cap of {DEFAULT_CODEBOOK_CAP}; pass --samples"
        )));
    }
    let mut checks = vec![
        check("sublattice", true, json!(null)),
        check("ranges_product", enc.ranges().product() == m, integers_to_value(enc.ranges().as_slice())),
    ];

    if exhaustive {
        let r = verify_rectangular(&pair, enc.basis(), enc.ranges(), DEFAULT_CODEBOOK_CAP)?;
        let mut collisions = Vec::new();
        if !r.is_rectangular() {
            collisions = collision_list(&enc, 16)?;
        }
        checks.push(check(
            "rectangular",
            r.is_rectangular(),
            json!({
                "distinct": r.distinct,
                "total": r.total,
                "witness": r.collision.as_ref().map(|(a, b)| json!([integers_to_value(a), integers_to_value(b)])),
                "collisions": collisions,
            }),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let messages: Vec<Vec<Integer>> = match samples {
        None => enc.ranges().iter().collect(),
        Some(k) => (0..k).map(|_| enc.ranges().sample(&mut rng)).collect::<Result<_>>()?,
    };
    let mut roundtrip_failure: Option<Value> = None;
    let mut shift_failure: Option<Value> = None;
    let gs = pair.shaping().generator().clone();
    for (i, b) in messages.iter().enumerate() {
        let x = enc.encode(b)?;
        match enc.index(&x) {
            Ok(back) if &back == b => {}
            Ok(back) => {
                roundtrip_failure.get_or_insert(json!({"b": integers_to_value(b), "index": integers_to_value(&back)}));
            }
            Err(e) => {
                roundtrip_failure.get_or_insert(json!({"b": integers_to_value(b), "error": e.to_string()}));
            }
        }
        if i < 64 {
            let c: Vec<Integer> = (0..pair.n()).map(|_| Integer::from(rng.gen_range(-3i64..=3))).collect();
            let shifted = add(&x, &gs.mul_int_vec(&c)?);
            if enc.index(&shifted).ok().as_ref() != enc.index(&x).ok().as_ref() {
                shift_failure.get_or_insert(json!({"b": integers_to_value(b), "c": integers_to_value(&c)}));
            }
        }
    }
    checks.push(check(
        "roundtrip",
        roundtrip_failure.is_none(),
        json!({"messages": messages.len(), "exhaustive": exhaustive, "failure": roundtrip_failure}),
    ));
    checks.push(check("coset_shift", shift_failure.is_none(), json!({"failure": shift_failure})));

    if m <= Integer::from(HOM_EXHAUSTIVE_CAP) {
        let r = hom_check(&pair, enc.basis(), enc.ranges(), HOM_EXHAUSTIVE_CAP)?;
        // informational: a code need not be homomorphic to be valid
        checks.push(json!({
            "name": "homomorphism",
            "informational": true,
            "detail": {"condition_holds": r.condition_holds, "verified": r.verified},
        }));
    }

    let pass = checks.iter().all(|c| c.get("pass").and_then(Value::as_bool).unwrap_or(true));
    let out = json!({
        "encoder": enc.kind(),
        "M": integers_to_value(std::slice::from_ref(&m))[0],
        "ranges": integers_to_value(enc.ranges().as_slice()),
        "checks": checks,
        "pass": pass,
    });
    Ok((out, if pass { 0 } else { 1 }))
}

/// Up to `limit` pairs of messages sharing a codeword, in message order.
fn collision_list(enc: &Encoder, limit: usize) -> Result<Vec<Value>> {
    let mut seen: std::collections::HashMap<Vec<crate::arith::Rational>, Vec<Integer>> =
        std::collections::HashMap::new();
    let mut out = Vec::new();
    for b in enc.ranges().iter() {
        let x = enc.encode(&b)?;
        if let Some(first) = seen.get(&x) {
            out.push(json!([integers_to_value(first), integers_to_value(&b)]));
            if out.len() == limit {
                break;
            }
        } else {
            seen.insert(x, b);
        }
    }
    Ok(out)
}

fn parse_code(s: &str) -> Result<Vec<Vec<u64>>> {
    serde_json::from_str(s).map_err(|e| Error::Config(format!("code matrix must be a JSON array of arrays: {e}")))
}

fn parse_columns(s: &str) -> Result<Vec<usize>> {
    parse_integer_list(s)?
        .iter()
        .map(|v| v.to_usize().ok_or_else(|| Error::Config(format!("bad column index {v}"))))
        .collect()
}

fn built_value(built: &BuiltLattice) -> Value {
    json!({
        "n": built.lattice.n(),
        "generator": matrix_to_value(built.lattice.generator()),
        "check": matrix_to_value(built.lattice.check()),
        "quantizer": serde_json::to_value(built.lattice.quantizer()).expect("serializable"),
        "triangular": built.triangular,
        "order": built.order,
        "volume": format_rational(&built.lattice.volume()),
    })
}

fn build(cmd: &BuildCommand) -> Result<(Value, i32)> {
    let built = match cmd {
        BuildCommand::ConstrA { p, n, basis } => construction_a(*p, &parse_code(basis)?, *n)?,
        BuildCommand::ConstrACheck { p, n, parity } => construction_a_check(*p, &parse_code(parity)?, *n)?,
        BuildCommand::ConstrD { n, d1, d2, kronecker, d1_cols, d2_cols } => {
            let (n, d1, d2) = match kronecker {
                Some(levels) => {
                    let cols = |c: &Option<String>| match c {
                        Some(s) if !s.trim().is_empty() => kronecker_columns(*levels, &parse_columns(s)?),
                        _ => Ok(Vec::new()),
                    };
                    (1usize << levels, cols(d1_cols)?, cols(d2_cols)?)
                }
                None => {
                    let n = n.ok_or_else(|| Error::Config("--n or --kronecker is required".into()))?;
                    let code = |c: &Option<String>| c.as_deref().map(parse_code).unwrap_or(Ok(Vec::new()));
                    (n, code(d1)?, code(d2)?)
                }
            };
            construction_d(n, &d1, &d2)?
        }
        BuildCommand::Conv { polys, blocklen, scale } => {
            let polys: Vec<String> = polys.split(',').map(|s| s.trim().to_string()).collect();
            let (built, _) = conv_lattice(&polys, *blocklen)?;
            match scale {
                None => built,
                Some(k) => {
                    let k = parse_rational(k)?;
                    if k <= crate::arith::Rational::zero() {
                        return Err(Error::Config("scale must be positive".into()));
                    }
                    let lattice = crate::lattice::Lattice::from_generator(
                        built.lattice.generator().scale(&k),
                        QuantizerSpec::scaled(built.lattice.quantizer().clone(), k),
                    )?;
                    BuiltLattice { lattice, ..built }
                }
            }
        }
    };
    Ok((built_value(&built), 0))
}
