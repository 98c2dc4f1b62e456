//! Command-line surface: encode, crypto, discover, verify, stats.
//!
//! Machine-readable JSON goes to stdout (or the requested files); progress
//! and diagnostics go to stderr. Exit codes: 0 success, 1 verification or
//! discovery failure, 2 usage/input errors.

use crate::circuit::{apply_xor_reuse, flatten, parse_bristol, parse_sexpr};
use crate::compile::{lower, CompileOptions, OutputSpec};
use crate::crypto::aes::{build_aes, AesJob};
use crate::crypto::build::CryptoInstance;
use crate::crypto::hashes::{build_md5, build_sha1, build_sha256, HashOptions};
use crate::crypto::reference::AesVariant;
use crate::error::{Error, Result};
use crate::qubo::{read_qubo, write_qubo, QuboInstance, VarId, VarRegistry};
use crate::search::discover::{discover, DiscoverOptions, DiscoverOutcome};
use crate::search::ilp::{add_symmetry_breaking, build_ilp, export_lp, Layout, TruthSpec};
use crate::verify::{brute_force_zero_set, sample_nonnegativity};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "quboc", version, about = "QUBO compiler for boolean and cryptographic circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a boolean circuit file to a QUBO instance.
    Encode(EncodeArgs),
    /// Build a cryptographic key/message-recovery instance.
    Crypto(CryptoArgs),
    /// Search for a minimal-substitution encoding of a truth table.
    Discover(DiscoverArgs),
    /// Check an instance exhaustively, against a witness, or by sampling.
    Verify(VerifyArgs),
    /// Print the statistics of a stored instance.
    Stats(StatsArgs),
}

#[derive(Args)]
struct EncodeArgs {
    /// Circuit file.
    #[arg(long)]
    circuit: PathBuf,
    /// Circuit file format.
    #[arg(long, value_parser = ["bristol", "sexpr"])]
    format: String,
    /// Maximum literals per emitted clause (result bit included).
    #[arg(long)]
    xor_limit: Option<usize>,
    /// Disable the greedy shared-XOR extraction pass.
    #[arg(long)]
    no_xor_reuse: bool,
    /// Per-output constraints, one char each: '0', '1' or 'x' (free).
    #[arg(long)]
    fix_outputs: Option<String>,
    /// Output path prefix (writes PREFIX.qubo and PREFIX.meta.json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CryptoArgs {
    /// One of: aes128e aes128d aes192e aes192d aes256e aes256d md5 sha1 sha256.
    #[arg(long)]
    alg: String,
    /// Reduced AES round count (default: full).
    #[arg(long)]
    rounds: Option<usize>,
    /// Adder block size in bits (hash builds).
    #[arg(long, default_value_t = 6)]
    block_size: usize,
    /// Maximum literals per emitted clause.
    #[arg(long)]
    clause_limit: Option<usize>,
    /// Known constants as hex: AES takes the known block then the target
    /// block; hashes take the one-block digest.
    #[arg(long, num_args = 1..=2, required = true)]
    known: Vec<String>,
    /// Output path prefix.
    #[arg(long)]
    out: PathBuf,
    /// Unknown-input hex (AES key / 64-byte message block); derives a
    /// zero-energy witness and embeds it in the metadata.
    #[arg(long)]
    emit_witness: Option<String>,
}

#[derive(Args)]
struct DiscoverArgs {
    /// Truth specification JSON: {"n": int, "min_terms": ["0101", ...]}.
    #[arg(long)]
    truth: PathBuf,
    /// Largest substitution count to try.
    #[arg(long)]
    max_subs: usize,
    /// Starting coefficient bound (doubles up to 4x on failure).
    #[arg(long, default_value_t = 100)]
    coeff_bound: i64,
    /// Require a unique zero-energy substitution string per min-term.
    #[arg(long)]
    strong: bool,
    /// Grow min-term constraint blocks on demand (counterexample-guided).
    #[arg(long)]
    cegar: bool,
    /// Also write the full ILP at --max-subs in CPLEX-LP format.
    #[arg(long)]
    export_lp: Option<PathBuf>,
    /// Certificate output file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance file (.qubo; the .meta.json sidecar is used when present).
    #[arg(long)]
    qubo: PathBuf,
    /// Enumerate all assignments (requires --primary).
    #[arg(long)]
    exhaustive: bool,
    /// Primary variables: comma-separated names, ranges like x0..x5 allowed.
    #[arg(long)]
    primary: Option<String>,
    /// Witness JSON file: an array of 0/1 per variable, or an object with a
    /// "witness" index map as written in the metadata sidecar.
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Number of random assignments to sample.
    #[arg(long)]
    sample: Option<usize>,
    /// Sampling seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct StatsArgs {
    /// Instance file.
    #[arg(long)]
    qubo: PathBuf,
}

/// Parses arguments and runs one command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap uses exit code 2 for usage errors and 0 for --help/--version
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Encode(a) => cmd_encode(&a),
        Command::Crypto(a) => cmd_crypto(&a),
        Command::Discover(a) => cmd_discover(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Stats(a) => cmd_stats(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn emit_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn cmd_encode(a: &EncodeArgs) -> Result<i32> {
    let src = std::fs::read_to_string(&a.circuit)?;
    let circuit = match a.format.as_str() {
        "bristol" => parse_bristol(&a.circuit)?,
        "sexpr" => parse_sexpr(&src)?,
        other => return Err(Error::Contract(format!("unknown format `{other}`"))),
    };
    let mut flat = flatten(&circuit)?;
    if !a.no_xor_reuse {
        flat = apply_xor_reuse(&flat, 3);
    }
    let outputs: Vec<OutputSpec> = match &a.fix_outputs {
        None => vec![OutputSpec::Free; flat.outputs.len()],
        Some(s) => {
            if s.len() != flat.outputs.len() {
                return Err(Error::Contract(format!(
                    "--fix-outputs has {} entries, circuit has {} outputs",
                    s.len(),
                    flat.outputs.len()
                )));
            }
            s.chars()
                .map(|c| match c {
                    '0' => Ok(OutputSpec::Fixed(false)),
                    '1' => Ok(OutputSpec::Fixed(true)),
                    'x' => Ok(OutputSpec::Free),
                    other => Err(Error::Contract(format!(
                        "bad --fix-outputs char `{other}`"
                    ))),
                })
                .collect::<Result<_>>()?
        }
    };
    let opts = CompileOptions {
        clause_length_limit: a.xor_limit,
        and_low_coeff: false,
    };
    let compiled = lower(&flat, &outputs, &opts)?;
    write_qubo(&a.out, &compiled.qubo, &compiled.registry, None)?;
    let stats = compiled.qubo.stats();
    eprintln!(
        "encoded {} -> {} variables, offset {}",
        a.circuit.display(),
        stats.num_vars,
        stats.offset
    );
    emit_json(&stats)?;
    Ok(0)
}

fn parse_hex(s: &str, expect_len: usize, what: &str) -> Result<Vec<u8>> {
    let s = s.trim();
    if s.len() != expect_len * 2 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::Contract(format!(
            "{what} must be {expect_len} bytes of hex, got `{s}`"
        )));
    }
    Ok((0..expect_len)
        .map(|i| u8::from_str_radix(&s[2 * i..2 * i + 2], 16).expect("checked hex"))
        .collect())
}

fn words_from_bytes<const W: usize>(bytes: &[u8], little_endian: bool) -> [u32; W] {
    let mut out = [0u32; W];
    for (w, chunk) in bytes.chunks_exact(4).enumerate() {
        let arr: [u8; 4] = chunk.try_into().expect("4-byte chunk");
        out[w] = if little_endian {
            u32::from_le_bytes(arr)
        } else {
            u32::from_be_bytes(arr)
        };
    }
    out
}

fn byte_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|&b| (0..8).map(move |i| b >> i & 1 == 1))
        .collect()
}

/// Message-block bits in build order: word-major, each word LSB-first.
fn block_bits(block: &[u8], little_endian: bool) -> Vec<bool> {
    block
        .chunks_exact(4)
        .flat_map(|chunk| {
            let arr: [u8; 4] = chunk.try_into().expect("4-byte chunk");
            let v = if little_endian {
                u32::from_le_bytes(arr)
            } else {
                u32::from_be_bytes(arr)
            };
            (0..32).map(move |i| v >> i & 1 == 1)
        })
        .collect()
}

fn cmd_crypto(a: &CryptoArgs) -> Result<i32> {
    let aes_variant = match a.alg.as_str() {
        "aes128e" | "aes128d" => Some((AesVariant::Aes128, a.alg.ends_with('d'))),
        "aes192e" | "aes192d" => Some((AesVariant::Aes192, a.alg.ends_with('d'))),
        "aes256e" | "aes256d" => Some((AesVariant::Aes256, a.alg.ends_with('d'))),
        "md5" | "sha1" | "sha256" => None,
        other => return Err(Error::Contract(format!("unknown algorithm `{other}`"))),
    };

    let (instance, witness_inputs): (CryptoInstance, Option<Vec<bool>>) = match aes_variant {
        Some((variant, decrypt)) => {
            if a.known.len() != 2 {
                return Err(Error::Contract(
                    "AES needs two --known values: the known block and the target block".into(),
                ));
            }
            let known = parse_hex(&a.known[0], 16, "known block")?;
            let target = parse_hex(&a.known[1], 16, "target block")?;
            let job = AesJob {
                variant,
                decrypt,
                rounds: a.rounds.unwrap_or_else(|| variant.rounds()),
                known_block: known.try_into().expect("16 bytes"),
                target: target.try_into().expect("16 bytes"),
                clause_limit: a.clause_limit,
            };
            let inst = build_aes(&job)?;
            let w = a
                .emit_witness
                .as_deref()
                .map(|h| parse_hex(h, variant.key_bytes(), "key").map(|k| byte_bits(&k)))
                .transpose()?;
            (inst, w)
        }
        None => {
            if a.known.len() != 1 {
                return Err(Error::Contract(
                    "hash algorithms take one --known value: the one-block digest".into(),
                ));
            }
            let opts = HashOptions {
                block_size: a.block_size,
                clause_limit: a.clause_limit,
            };
            if a.rounds.is_some() {
                return Err(Error::Contract(
                    "--rounds applies to AES algorithms only".into(),
                ));
            }
            let (inst, little_endian) = match a.alg.as_str() {
                "md5" => {
                    let d = parse_hex(&a.known[0], 16, "digest")?;
                    (build_md5(words_from_bytes::<4>(&d, true), opts)?, true)
                }
                "sha1" => {
                    let d = parse_hex(&a.known[0], 20, "digest")?;
                    (build_sha1(words_from_bytes::<5>(&d, false), opts)?, false)
                }
                _ => {
                    let d = parse_hex(&a.known[0], 32, "digest")?;
                    (build_sha256(words_from_bytes::<8>(&d, false), opts)?, false)
                }
            };
            let w = a
                .emit_witness
                .as_deref()
                .map(|h| {
                    parse_hex(h, 64, "message block").map(|m| block_bits(&m, little_endian))
                })
                .transpose()?;
            (inst, w)
        }
    };

    let witness = witness_inputs
        .map(|bits| instance.witness(&bits))
        .transpose()?;
    if let Some(w) = &witness {
        let e = instance.energy_of(w);
        eprintln!("witness energy: {e}");
    }
    write_qubo(&a.out, &instance.qubo, &instance.registry, witness.as_deref())?;
    let report = instance.report();
    eprintln!(
        "{}: {} variables, density {:.3}%, max |coeff| {}",
        report.algorithm, report.num_vars, report.density_percent, report.max_abs_coeff
    );
    emit_json(&report)?;
    Ok(0)
}

fn cmd_discover(a: &DiscoverArgs) -> Result<i32> {
    let spec: TruthSpec = serde_json::from_str(&std::fs::read_to_string(&a.truth)?)?;
    spec.masks()?;
    if let Some(path) = &a.export_lp {
        let mut p = build_ilp(&spec, a.max_subs, a.coeff_bound, a.strong)?;
        if a.max_subs >= 2 {
            p = add_symmetry_breaking(
                p,
                &Layout {
                    n: spec.n,
                    k: a.max_subs,
                },
            );
        }
        std::fs::write(path, export_lp(&p))?;
        eprintln!("wrote LP export to {}", path.display());
    }
    let opts = DiscoverOptions {
        max_subs: a.max_subs,
        coeff_bound: a.coeff_bound,
        max_coeff_bound: a.coeff_bound * 4,
        strong: a.strong,
        cegar: a.cegar,
        ..DiscoverOptions::default()
    };
    let outcome = discover(&spec, &opts)?;
    let json = serde_json::to_string_pretty(&outcome)?;
    std::fs::write(&a.out, &json)?;
    println!("{json}");
    match outcome {
        DiscoverOutcome::Found(c) => {
            eprintln!(
                "found encoding with {} substitution bit(s), strength {:?}",
                c.n_subs, c.strength
            );
            Ok(0)
        }
        DiscoverOutcome::NotFound(_) => {
            eprintln!("no encoding found within the search space");
            Ok(1)
        }
    }
}

/// Expands "a,b,c" with "x0..x5" ranges into variable ids by registry name.
fn parse_primary(spec: &str, reg: &VarRegistry) -> Result<Vec<VarId>> {
    let by_name = |name: &str| -> Result<VarId> {
        reg.iter()
            .find(|(_, e)| e.name == name)
            .map(|(id, _)| id)
            .ok_or_else(|| Error::Contract(format!("no variable named `{name}`")))
    };
    let mut out = Vec::new();
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token.split_once("..") {
            None => out.push(by_name(token)?),
            Some((start, end)) => {
                let split = |s: &str| -> Result<(String, u64)> {
                    let digits = s.len() - s.bytes().rev().take_while(u8::is_ascii_digit).count();
                    let (prefix, num) = s.split_at(digits);
                    let n = num.parse().map_err(|_| {
                        Error::Contract(format!("range endpoint `{s}` has no trailing number"))
                    })?;
                    Ok((prefix.to_string(), n))
                };
                let (p1, lo) = split(start)?;
                let (p2, hi) = split(end)?;
                if p1 != p2 || lo > hi {
                    return Err(Error::Contract(format!("bad range `{token}`")));
                }
                for i in lo..=hi {
                    out.push(by_name(&format!("{p1}{i}"))?);
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Contract("empty --primary list".into()));
    }
    Ok(out)
}

#[derive(Serialize)]
struct VerifyReport {
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<serde_json::Value>,
    min_energy: i64,
    zero_set_size: usize,
}

fn read_witness(path: &std::path::Path, q: &QuboInstance) -> Result<Vec<bool>> {
    let text = std::fs::read_to_string(path)?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let mut bits = vec![false; q.num_vars()];
    match &v {
        serde_json::Value::Array(items) => {
            if items.len() != q.num_vars() {
                return Err(Error::Dimension {
                    expected: q.num_vars(),
                    got: items.len(),
                });
            }
            for (i, it) in items.iter().enumerate() {
                bits[i] = it.as_u64().ok_or_else(|| {
                    Error::Contract("witness array entries must be 0 or 1".into())
                })? != 0;
            }
        }
        serde_json::Value::Object(map) => {
            let entries = map
                .get("witness")
                .and_then(|w| w.as_object())
                .ok_or_else(|| Error::Contract("expected a \"witness\" index map".into()))?;
            for (k, val) in entries {
                let idx: usize = k
                    .parse()
                    .map_err(|_| Error::Contract(format!("bad witness index `{k}`")))?;
                if idx >= bits.len() {
                    return Err(Error::UnknownVar(idx));
                }
                bits[idx] = val.as_u64().unwrap_or(0) != 0;
            }
        }
        _ => return Err(Error::Contract("unsupported witness JSON shape".into())),
    }
    Ok(bits)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let (q, reg, _meta) = read_qubo(&a.qubo)?;
    let modes =
        a.exhaustive as usize + a.witness.is_some() as usize + a.sample.is_some() as usize;
    if modes != 1 {
        return Err(Error::Contract(
            "pick exactly one of --exhaustive, --witness, --sample".into(),
        ));
    }
    let report = if a.exhaustive {
        let primary = parse_primary(
            a.primary
                .as_deref()
                .ok_or_else(|| Error::Contract("--exhaustive requires --primary".into()))?,
            &reg,
        )?;
        let r = brute_force_zero_set(&q, &primary)?;
        VerifyReport {
            status: if r.has_negative { "fail" } else { "pass" }.into(),
            counterexample: None,
            min_energy: r.min_energy,
            zero_set_size: r.zero_set.len(),
        }
    } else if let Some(path) = &a.witness {
        let bits = read_witness(path, &q)?;
        let e = q.energy(&bits)?;
        VerifyReport {
            status: if e == 0 { "pass" } else { "fail" }.into(),
            counterexample: (e != 0).then(|| {
                serde_json::json!({ "witness_energy": e })
            }),
            min_energy: e,
            zero_set_size: usize::from(e == 0),
        }
    } else {
        let n = a.sample.expect("mode checked");
        let min = sample_nonnegativity(&q, n, a.seed);
        VerifyReport {
            status: if min >= 0 { "pass" } else { "fail" }.into(),
            counterexample: None,
            min_energy: min,
            zero_set_size: 0,
        }
    };
    let code = if report.status == "pass" { 0 } else { 1 };
    emit_json(&report)?;
    Ok(code)
}

fn cmd_stats(a: &StatsArgs) -> Result<i32> {
    let (q, _, _) = read_qubo(&a.qubo)?;
    emit_json(&q.stats())?;
    Ok(0)
}
