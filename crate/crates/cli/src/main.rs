//! `qtilt`: decompositions, characters, presentation checks and cached
//! structure-constant tables for quantum `GL_2` twisted tilting modules.
//!
//! Exit status: 0 success, 1 a reported check failed, 2 malformed input or
//! parameters, 3 internal consistency failure, 4 cache path not writable.

mod table;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use qtilt_core::charring::{
    simple_character, tilting_character, twisted_tilting_character, weyl_character, weyl_expansion,
};
use qtilt_core::fusion::decompose_report;
use qtilt_core::lattice::{is_prime, Params, TwistLabel, Weight};
use qtilt_core::presentation::{radical_evidence, verify_identities, verify_kernel};
use qtilt_core::{Character, Error, Exec};

#[derive(Parser, Debug)]
#[command(
    name = "qtilt",
    version,
    about = "Fusion rules and ring presentation for quantum GL2 tilting modules"
)]
struct Cli {
    /// Order of the quantum parameter.
    #[arg(long = "l", global = true, default_value_t = 3)]
    l: i64,
    /// Characteristic; defaults to the smallest prime not dividing l.
    #[arg(long = "p", global = true)]
    p: Option<i64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Simple,
    Weyl,
    Tilting,
    Label,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decompose L(w1) ⊗ L(w2) into twisted tilting modules.
    Decompose {
        #[arg(allow_hyphen_values = true)]
        w1: String,
        #[arg(allow_hyphen_values = true)]
        w2: String,
        /// Skip the character-conservation self-check.
        #[arg(long)]
        no_verify: bool,
    },
    /// Print a character: `weight` is `a,b`, or `a,b;a0,b0;...` for `label`.
    Character {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(allow_hyphen_values = true)]
        arg: String,
    },
    /// Check that the kernel generators vanish in the label basis.
    Relations {
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Reducedness evidence for n = 0 (exact) or n = 1 (sampled).
    Reduced {
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Derivative and product identities between g, h, P and Q.
    Identities,
    /// Write or refresh the cached multiplication table.
    Table {
        #[arg(long)]
        max: i64,
        /// Cache directory; QTILT_CACHE takes precedence when set.
        #[arg(long, default_value = ".qtilt-cache")]
        cache: PathBuf,
    },
}

/// A failure mapped to an exit status.
struct Exit(u8, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        match e {
            Error::NotTilting(_) => Exit(3, e.to_string()),
            _ => Exit(2, e.to_string()),
        }
    }
}

#[derive(Debug, PartialEq, Eq, Serialize, Deserialize)]
struct CharacterReport {
    kind: Kind,
    input: String,
    character: Character,
    weyl: Vec<WeylTerm>,
    #[serde(with = "int")]
    dimension: BigInt,
}

#[derive(Debug, PartialEq, Eq, Serialize, Deserialize)]
struct WeylTerm {
    weight: Weight,
    #[serde(with = "int")]
    mult: BigInt,
}

mod int {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Small(i64),
        Big(String),
    }

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(v) {
            Ok(x) => Repr::Small(x).serialize(s),
            Err(_) => Repr::Big(v.to_string()).serialize(s),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Small(x) => Ok(x.into()),
            Repr::Big(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn default_p(l: i64) -> i64 {
    (2..).find(|&p| is_prime(p) && l % p != 0).unwrap()
}

fn parse_weight(s: &str) -> Result<Weight, Exit> {
    Ok(s.parse::<Weight>()?.check_dominant()?)
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string(value).expect("reports serialize")
        ),
        Format::Text => print!("{}", text()),
    }
}

fn fmt_weyl(terms: &[WeylTerm]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|WeylTerm { weight: w, mult: c }| {
            if *c == BigInt::from(1) {
                format!("χ({w})")
            } else {
                format!("{c}·χ({w})")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn run(cli: Cli) -> Result<u8, Exit> {
    let p = cli.p.unwrap_or_else(|| default_p(cli.l));
    let params = Params::new(cli.l, p)?;
    let fmt = cli.format;
    let exec = Exec::default();
    match cli.cmd {
        Cmd::Decompose { w1, w2, no_verify } => {
            let (x, y) = (parse_weight(&w1)?, parse_weight(&w2)?);
            let t = Instant::now();
            let r = decompose_report(x, y, params, !no_verify)?;
            log::info!("decompose finished in {:?}", t.elapsed());
            emit(fmt, &r, || {
                let mut s = format!(
                    "L({x}) ⊗ L({y}) at l={} p={}: dimension {}\n",
                    params.ell(),
                    params.p(),
                    r.dimension
                );
                for m in &r.summands {
                    let mut flags = Vec::new();
                    if m.tilting {
                        flags.push("tilting");
                    }
                    if m.simple {
                        flags.push("simple");
                    }
                    s += &format!(
                        "  {} x T({})  dim {}  [{}]\n",
                        m.mult,
                        m.label,
                        m.dimension,
                        flags.join(",")
                    );
                }
                match r.conserved {
                    Some(c) => s += &format!("conservation: {}\n", if c { "ok" } else { "FAILED" }),
                    None => s += "conservation: skipped\n",
                }
                s
            });
            if r.conserved == Some(false) {
                return Err(Exit(3, "character conservation failed".into()));
            }
            Ok(0)
        }
        Cmd::Character { kind, arg } => {
            let c = match kind {
                Kind::Weyl => weyl_character(parse_weight(&arg)?)?,
                Kind::Simple => simple_character(parse_weight(&arg)?, params)?,
                Kind::Tilting => tilting_character(parse_weight(&arg)?, params.quantum())?,
                Kind::Label => {
                    let lbl: TwistLabel = arg.parse()?;
                    lbl.check_dominant()?;
                    twisted_tilting_character(&lbl, params)?
                }
            };
            let r = CharacterReport {
                kind,
                input: arg,
                weyl: weyl_expansion(&c)?
                    .into_iter()
                    .map(|(weight, mult)| WeylTerm { weight, mult })
                    .collect(),
                dimension: c.dimension(),
                character: c,
            };
            emit(fmt, &r, || {
                format!("{}\ndim {}\n", fmt_weyl(&r.weyl), r.dimension)
            });
            Ok(0)
        }
        Cmd::Relations { n } => {
            let t = Instant::now();
            let r = verify_kernel(params, n)?;
            log::info!("relations finished in {:?}", t.elapsed());
            emit(fmt, &r, || {
                let mut s = String::new();
                for g in &r.generators {
                    s += &format!(
                        "{}: {}\n",
                        g.name,
                        if g.vanishes { "vanishes" } else { "NONZERO" }
                    );
                }
                s += &format!(
                    "literal variant {}: {}\n",
                    r.literal_variant.name,
                    if r.literal_variant.vanishes {
                        "vanishes"
                    } else {
                        "nonzero"
                    }
                );
                s += &format!("kernel check: {}\n", if r.pass { "pass" } else { "FAIL" });
                s
            });
            for g in r.generators.iter().filter(|g| !g.vanishes) {
                log::error!("generator {} does not vanish", g.name);
            }
            Ok(if r.pass { 0 } else { 1 })
        }
        Cmd::Reduced { n, seed } => {
            let r = radical_evidence(params, n, seed)?;
            emit(fmt, &r, || {
                let mut s = format!("P_(l-1) squarefree: {}\n", r.p_squarefree);
                if let Some(q) = r.q_squarefree {
                    s += &format!("Q_(p-1) squarefree: {q}\n");
                }
                for c in &r.components {
                    s += &format!(
                        "  {}: {}/{} full rank\n",
                        c.component, c.full_rank, c.samples
                    );
                }
                s += &format!("negative control radical: {}\n", r.negative_control);
                s += &format!(
                    "radical: {}{}\n",
                    r.radical,
                    if r.exact { "" } else { " (sampled evidence)" }
                );
                s
            });
            if !r.radical {
                log::error!("reducedness evidence failed");
            }
            Ok(if r.radical { 0 } else { 1 })
        }
        Cmd::Identities => {
            let r = verify_identities(params.ell() as u32, params.p() as u32);
            emit(fmt, &r, || {
                let mut s = String::new();
                for c in &r.checks {
                    s += &format!("{}: {}\n", c.name, if c.pass { "pass" } else { "FAIL" });
                }
                s += &format!(
                    "{}/{} identities pass\n",
                    r.checks.iter().filter(|c| c.pass).count(),
                    r.checks.len()
                );
                s
            });
            for c in r.checks.iter().filter(|c| !c.pass) {
                log::error!("identity {} failed", c.name);
            }
            Ok(if r.pass { 0 } else { 1 })
        }
        Cmd::Table { max, cache } => {
            let dir = std::env::var_os("QTILT_CACHE")
                .map(PathBuf::from)
                .unwrap_or(cache);
            let t = Instant::now();
            let r = table::build(&dir, params, max, exec).map_err(|e| match e {
                table::TableError::Io(path, err) => Exit(4, format!("{}: {err}", path.display())),
                table::TableError::Math(err) => Exit::from(err),
            })?;
            log::info!("table finished in {:?}", t.elapsed());
            emit(fmt, &r, || {
                let mut s = String::new();
                for rec in &r.records {
                    let terms: Vec<String> = rec
                        .product
                        .iter()
                        .map(|(l, c)| {
                            if *c == BigInt::from(1) {
                                format!("t({l})")
                            } else {
                                format!("{c}·t({l})")
                            }
                        })
                        .collect();
                    s += &format!(
                        "t({}) * t({}) = {}\n",
                        rec.left,
                        rec.right,
                        terms.join(" + ")
                    );
                }
                s += &format!(
                    "{} records ({} recomputed) in {}\n",
                    r.records.len(),
                    r.recomputed,
                    r.path.display()
                );
                s
            });
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
