//! `qlin` — command-line experiments around the CHSH-boosted linear
//! approximation of SIMON.
//!
//! Every subcommand runs one named experiment and emits a machine-readable
//! report: JSON to standard output by default, or CSV when `--format csv`
//! and an `--output` path are given. All randomized experiments take a
//! `--seed` and are byte-identical across repeated invocations.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qlin_core::analysis::{
    estimate_bias, generate_pairs, piling_up, piling_up_oracle, random_round_keys, recover_key_bit,
    sample_complexity, KeyBitVerdict, LinearFilter,
};
use qlin_core::chsh::{
    best_classical_strategy, build_classical_chsh_circuit, build_quantum_chsh_circuit,
    ClassicalStrategy, QUBIT_F,
};
use qlin_core::qlinapprox::{
    build_linear_approx_circuit, build_modified_circuit, build_quantum_round_circuit, sweep_to_csv,
    theta_sweep, ROUND_OUTPUT_QUBIT, STATISTIC_QUBIT,
};
use qlin_core::qsim::run_circuit;
use qlin_core::simon::{
    bit, encrypt, format_block_hex, key_schedule, parse_block_hex, parse_key_hex, SimonState,
    SimonVariant,
};

#[derive(Parser)]
#[command(
    name = "qlin",
    version,
    about = "CHSH-game and linear-approximation experiments on the SIMON cipher"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Brute-force the classical CHSH game and simulate its Boolean circuit
    ChshClassical {
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulate the entangled CHSH strategy circuit
    ChshQuantum {
        /// Bob's rotation angle in radians; accepts forms like 0.785 or pi/4
        #[arg(long, value_parser = parse_theta, default_value = "pi/4")]
        theta: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Encrypt one block under a SIMON variant
    SimonEncrypt {
        /// Variant selector block/key, e.g. 32/64 or 128/256
        #[arg(long, value_parser = parse_variant)]
        variant: SimonVariant,
        /// Master key, 0x-prefixed hex, most significant word first
        #[arg(long)]
        key: String,
        /// Plaintext block, 0x-prefixed hex, left word first
        #[arg(long)]
        plaintext: String,
        /// Rounds to run (defaults to the variant's full count)
        #[arg(long)]
        rounds: Option<u32>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulate the quantum SIMON round update on one bit position
    QuantumRound {
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulate the constrained linear-approximation circuit
    LinearApprox {
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulate the CHSH-modified linear-approximation circuit
    ModifiedApprox {
        /// Rotation angle in radians; accepts forms like 0.785 or pi/4
        #[arg(long, value_parser = parse_theta, default_value = "pi/4")]
        theta: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sweep theta and write per-branch and aggregate probabilities as CSV
    ThetaSweep {
        /// Lower end of the angle grid (radians, pi-forms accepted)
        #[arg(long, value_parser = parse_theta)]
        from: f64,
        /// Upper end of the angle grid (radians, pi-forms accepted)
        #[arg(long, value_parser = parse_theta)]
        to: f64,
        /// Number of grid points including both ends
        #[arg(long)]
        steps: usize,
        /// Destination CSV file
        #[arg(long)]
        output: PathBuf,
    },
    /// Monte-Carlo estimate of the one-round linear-approximation bias
    BiasEmpirical {
        /// Variant selector block/key, e.g. 32/64 or 128/256
        #[arg(long, value_parser = parse_variant)]
        variant: SimonVariant,
        /// Bit position j of the approximation
        #[arg(long)]
        bit: u32,
        /// Number of plaintext samples to draw
        #[arg(long)]
        samples: u64,
        /// RNG seed; also derives the round keys
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Plant a key, generate two-round pairs and recover one key bit
    KeyRecover {
        /// Variant selector block/key, e.g. 32/64 or 128/256
        #[arg(long, value_parser = parse_variant)]
        variant: SimonVariant,
        /// Bit position j to recover
        #[arg(long)]
        bit: u32,
        /// Number of plaintext/ciphertext pairs to generate
        #[arg(long)]
        samples: u64,
        /// RNG seed; also derives the planted key
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Combine per-round biases with the piling-up lemma
    PilingUp {
        /// Comma-separated biases, e.g. 0.25,0.25
        #[arg(long, value_delimiter = ',', required = true)]
        biases: Vec<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Samples needed to distinguish the distributions {p,1-p} and {q,1-q}
    SampleComplexity {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to a file instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_variant(s: &str) -> Result<SimonVariant, String> {
    SimonVariant::from_name(s).map_err(|e| e.to_string())
}

/// Radians as a plain float or as `pi`, `pi/4`, `3pi/8`, `-pi/2`, ...
fn parse_theta(s: &str) -> Result<f64, String> {
    let text = s.trim();
    if let Ok(v) = text.parse::<f64>() {
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("angle must be finite, got '{text}'"))
        };
    }
    let (sign, rest) = match text.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, text),
    };
    let Some(pi_at) = rest.find("pi") else {
        return Err(format!(
            "expected radians or a pi-form like pi/4, got '{text}'"
        ));
    };
    let coefficient = match &rest[..pi_at] {
        "" => 1.0,
        c => c
            .parse::<f64>()
            .map_err(|_| format!("bad multiplier in '{text}'"))?,
    };
    let denominator = match &rest[pi_at + 2..] {
        "" => 1.0,
        tail => tail
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|&d| d != 0.0)
            .ok_or_else(|| format!("bad denominator in '{text}'"))?,
    };
    Ok(sign * coefficient * std::f64::consts::PI / denominator)
}

/// A report that can be rendered as JSON or as a one-row CSV table.
trait Report: Serialize {
    fn csv_columns(&self) -> Vec<(&'static str, String)>;
}

fn emit<R: Report>(report: &R, out: &OutputArgs) -> Result<()> {
    let text = match out.format {
        Format::Json => {
            let mut body = serde_json::to_string_pretty(report)?;
            body.push('\n');
            body
        }
        Format::Csv => {
            if out.output.is_none() {
                bail!("--format csv requires --output PATH");
            }
            let columns = report.csv_columns();
            let header: Vec<&str> = columns.iter().map(|(name, _)| *name).collect();
            let row: Vec<&str> = columns.iter().map(|(_, value)| value.as_str()).collect();
            format!("{}\n{}\n", header.join(","), row.join(","))
        }
    };
    match &out.output {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write --output {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.12}")
}

fn main() -> Result<()> {
    if let Ok(raw) = std::env::var("QLIN_THREADS") {
        let threads: usize = raw
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .with_context(|| format!("QLIN_THREADS must be a positive integer, got '{raw}'"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("failed to configure the sampler thread pool")?;
    }
    match Cli::parse().command {
        Command::ChshClassical { out } => chsh_classical(&out),
        Command::ChshQuantum { theta, out } => chsh_quantum(theta, &out),
        Command::SimonEncrypt {
            variant,
            key,
            plaintext,
            rounds,
            out,
        } => simon_encrypt(variant, &key, &plaintext, rounds, &out),
        Command::QuantumRound { out } => quantum_round(&out),
        Command::LinearApprox { out } => linear_approx(&out),
        Command::ModifiedApprox { theta, out } => modified_approx(theta, &out),
        Command::ThetaSweep {
            from,
            to,
            steps,
            output,
        } => run_theta_sweep(from, to, steps, &output),
        Command::BiasEmpirical {
            variant,
            bit,
            samples,
            seed,
            out,
        } => bias_empirical(variant, bit, samples, seed, &out),
        Command::KeyRecover {
            variant,
            bit,
            samples,
            seed,
            out,
        } => key_recover(variant, bit, samples, seed, &out),
        Command::PilingUp { biases, out } => piling_up_cmd(&biases, &out),
        Command::SampleComplexity { p, q, out } => sample_complexity_cmd(p, q, &out),
    }
}

#[derive(Serialize)]
struct ChshClassicalReport {
    experiment: &'static str,
    best_win_probability: f64,
    optimal_strategy_count: usize,
    circuit_p0: f64,
    circuit_p1: f64,
}

impl Report for ChshClassicalReport {
    fn csv_columns(&self) -> Vec<(&'static str, String)> {
        vec![
            ("experiment", self.experiment.to_string()),
            ("best_win_probability", fmt_f64(self.best_win_probability)),
            (
                "optimal_strategy_count",
                self.optimal_strategy_count.to_string(),
            ),
            ("circuit_p0", fmt_f64(self.circuit_p0)),
            ("circuit_p1", fmt_f64(self.circuit_p1)),
        ]
    }
}

fn chsh_classical(out: &OutputArgs) -> Result<()> {
    let (_, best) = best_classical_strategy();
    let optimal = ClassicalStrategy::all()
        .into_iter()
        .filter(|s| s.win_probability() == best)
        .count();
    let state = run_circuit(&build_classical_chsh_circuit())?;
    let (p0, p1) = state.qubit_probabilities(QUBIT_F)?;
    emit(
        &ChshClassicalReport {
            experiment: "chsh-classical",
            best_win_probability: best,
            optimal_strategy_count: optimal,
            circuit_p0: p0,
            circuit_p1: p1,
        },
        out,
    )
}

#[derive(Serialize)]
struct MarginalReport {
    experiment: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    p0: f64,
    p1: f64,
    bias: f64,
}

impl Report for MarginalReport {
    fn csv_columns(&self) -> Vec<(&'static str, String)> {
        let mut columns = vec![("experiment", self.experiment.to_string())];
        if let Some(theta) = self.theta {
            columns.push(("theta", fmt_f64(theta)));
        }
        columns.push(("p0", fmt_f64(self.p0)));
        columns.push(("p1", fmt_f64(self.p1)));
        columns.push(("bias", fmt_f64(self.bias)));
        columns
    }
}

fn marginal_report(
    experiment: &'static str,
    theta: Option<f64>,
    p0: f64,
    p1: f64,
) -> MarginalReport {
    MarginalReport {
        experiment,
        theta,
        p0,
        p1,
        bias: p0 - 0.5,
    }
}

fn chsh_quantum(theta: f64, out: &OutputArgs) -> Result<()> {
    let state = run_circuit(&build_quantum_chsh_circuit(theta))?;
    let (p0, p1) = state.qubit_probabilities(QUBIT_F)?;
    emit(&marginal_report("chsh-quantum", Some(theta), p0, p1), out)
}

fn quantum_round(out: &OutputArgs) -> Result<()> {
    let state = run_circuit(&build_quantum_round_circuit())?;
    let (p0, p1) = state.qubit_probabilities(ROUND_OUTPUT_QUBIT)?;
    emit(&marginal_report("quantum-round", None, p0, p1), out)
}

fn linear_approx(out: &OutputArgs) -> Result<()> {
    let state = run_circuit(&build_linear_approx_circuit())?;
    let (p0, p1) = state.qubit_probabilities(STATISTIC_QUBIT)?;
    emit(&marginal_report("linear-approx", None, p0, p1), out)
}

fn modified_approx(theta: f64, out: &OutputArgs) -> Result<()> {
    let state = run_circuit(&build_modified_circuit(theta)?)?;
    let (p0, p1) = state.qubit_probabilities(STATISTIC_QUBIT)?;
    emit(
        &marginal_report("modified-approx", Some(theta), p0, p1),
        out,
    )
}

#[derive(Serialize)]
struct SimonEncryptReport {
    experiment: &'static str,
    variant: String,
    rounds: u32,
    plaintext: String,
    ciphertext: String,
}

impl Report for SimonEncryptReport {
    fn csv_columns(&self) -> Vec<(&'static str, String)> {
        vec![
            ("experiment", self.experiment.to_string()),
            ("variant", self.variant.clone()),
            ("rounds", self.rounds.to_string()),
            ("plaintext", self.plaintext.clone()),
            ("ciphertext", self.ciphertext.clone()),
        ]
    }
}

fn simon_encrypt(
    variant: SimonVariant,
    key_hex: &str,
    plaintext_hex: &str,
    rounds: Option<u32>,
    out: &OutputArgs,
) -> Result<()> {
    let n = variant.word_size();
    let master = parse_key_hex(key_hex, variant).context("invalid --key")?;
    let keys = key_schedule(&master, variant).context("invalid --key")?;
    let (left, right) = parse_block_hex(plaintext_hex, n).context("invalid --plaintext")?;
    let plaintext = SimonState::new(left, right, n).context("invalid --plaintext")?;
    let rounds = rounds.unwrap_or_else(|| variant.rounds());
    if rounds > variant.rounds() {
        bail!(
            "--rounds {rounds} exceeds the variant's {} rounds",
            variant.rounds()
        );
    }
    let ciphertext = encrypt(plaintext, &keys, rounds as usize)?;
    emit(
        &SimonEncryptReport {
            experiment: "simon-encrypt",
            variant: variant.name(),
            rounds,
            plaintext: format_block_hex(left, right, n),
            ciphertext: format_block_hex(ciphertext.left, ciphertext.right, n),
        },
        out,
    )
}

fn run_theta_sweep(from: f64, to: f64, steps: usize, output: &PathBuf) -> Result<()> {
    let rows = theta_sweep(from, to, steps)?;
    fs::write(output, sweep_to_csv(&rows))
        .with_context(|| format!("cannot write --output {}", output.display()))?;
    Ok(())
}

#[derive(Serialize)]
struct BiasReport {
    experiment: &'static str,
    variant: String,
    bit_j: u32,
    samples: u64,
    seed: u64,
    p0: f64,
    bias: f64,
    std_error: f64,
}

impl Report for BiasReport {
    fn csv_columns(&self) -> Vec<(&'static str, String)> {
        vec![
            ("experiment", self.experiment.to_string()),
            ("variant", self.variant.clone()),
            ("bit_j", self.bit_j.to_string()),
            ("samples", self.samples.to_string()),
            ("seed", self.seed.to_string()),
            ("p0", fmt_f64(self.p0)),
            ("bias", fmt_f64(self.bias)),
            ("std_error", fmt_f64(self.std_error)),
        ]
    }
}

fn bias_empirical(
    variant: SimonVariant,
    bit_j: u32,
    samples: u64,
    seed: u64,
    out: &OutputArgs,
) -> Result<()> {
    let keys = random_round_keys(variant, seed)?;
    let estimate = estimate_bias(variant, &keys, bit_j, samples, seed)?;
    emit(
        &BiasReport {
            experiment: "bias-empirical",
            variant: variant.name(),
            bit_j,
            samples,
            seed,
            p0: estimate.p0,
            bias: estimate.bias,
            std_error: estimate.std_error,
        },
        out,
    )
}

#[derive(Serialize)]
struct KeyRecoverReport {
    experiment: &'static str,
    variant: String,
    bit_j: u32,
    samples: u64,
    seed: u64,
    decided: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    inferred_key_bit: Option<u8>,
    planted_key_bit: u8,
    matches_plant: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    confidence: Option<f64>,
    group_freq_r0: Option<f64>,
    group_freq_r1: Option<f64>,
    group_count_r0: u64,
    group_count_r1: u64,
}

impl Report for KeyRecoverReport {
    fn csv_columns(&self) -> Vec<(&'static str, String)> {
        let opt_f = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        vec![
            ("experiment", self.experiment.to_string()),
            ("variant", self.variant.clone()),
            ("bit_j", self.bit_j.to_string()),
            ("samples", self.samples.to_string()),
            ("seed", self.seed.to_string()),
            ("decided", self.decided.to_string()),
            (
                "inferred_key_bit",
                self.inferred_key_bit
                    .map(|b| b.to_string())
                    .unwrap_or_default(),
            ),
            ("planted_key_bit", self.planted_key_bit.to_string()),
            (
                "matches_plant",
                self.matches_plant
                    .map(|b| b.to_string())
                    .unwrap_or_default(),
            ),
            ("confidence", opt_f(self.confidence)),
            ("group_freq_r0", opt_f(self.group_freq_r0)),
            ("group_freq_r1", opt_f(self.group_freq_r1)),
            ("group_count_r0", self.group_count_r0.to_string()),
            ("group_count_r1", self.group_count_r1.to_string()),
        ]
    }
}

fn key_recover(
    variant: SimonVariant,
    bit_j: u32,
    samples: u64,
    seed: u64,
    out: &OutputArgs,
) -> Result<()> {
    let n = variant.word_size();
    let keys = random_round_keys(variant, seed)?;
    let pairs = generate_pairs(&keys, samples as usize, seed)?;
    let planted = bit(keys.keys()[0], bit_j % n, n);
    let verdict = recover_key_bit(&pairs, bit_j, n, LinearFilter::PlaintextEquality)?;
    let report = match verdict {
        KeyBitVerdict::Decided {
            inferred_key_bit,
            confidence,
            group_freq,
            group_counts,
            ..
        } => KeyRecoverReport {
            experiment: "key-recover",
            variant: variant.name(),
            bit_j,
            samples,
            seed,
            decided: true,
            inferred_key_bit: Some(inferred_key_bit as u8),
            planted_key_bit: planted as u8,
            matches_plant: Some(inferred_key_bit == planted),
            confidence: Some(confidence),
            group_freq_r0: Some(group_freq[0]),
            group_freq_r1: Some(group_freq[1]),
            group_count_r0: group_counts[0],
            group_count_r1: group_counts[1],
        },
        KeyBitVerdict::Abstained { group_counts, .. } => KeyRecoverReport {
            experiment: "key-recover",
            variant: variant.name(),
            bit_j,
            samples,
            seed,
            decided: false,
            inferred_key_bit: None,
            planted_key_bit: planted as u8,
            matches_plant: None,
            confidence: None,
            group_freq_r0: None,
            group_freq_r1: None,
            group_count_r0: group_counts[0],
            group_count_r1: group_counts[1],
        },
    };
    emit(&report, out)
}

#[derive(Serialize)]
struct PilingUpReport {
    experiment: &'static str,
    biases: Vec<f64>,
    combined_bias: f64,
    oracle_bias: f64,
}

impl Report for PilingUpReport {
    fn csv_columns(&self) -> Vec<(&'static str, String)> {
        let list = self
            .biases
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(";");
        vec![
            ("experiment", self.experiment.to_string()),
            ("biases", list),
            ("combined_bias", fmt_f64(self.combined_bias)),
            ("oracle_bias", fmt_f64(self.oracle_bias)),
        ]
    }
}

fn piling_up_cmd(biases: &[f64], out: &OutputArgs) -> Result<()> {
    let combined = piling_up(biases).context("invalid --biases")?;
    let probabilities: Vec<f64> = biases.iter().map(|e| 0.5 + e).collect();
    let oracle = piling_up_oracle(&probabilities).context("invalid --biases")?;
    emit(
        &PilingUpReport {
            experiment: "piling-up",
            biases: biases.to_vec(),
            combined_bias: combined,
            oracle_bias: oracle,
        },
        out,
    )
}

#[derive(Serialize)]
struct SampleComplexityReport {
    experiment: &'static str,
    p: f64,
    q: f64,
    samples_per_pq: u64,
    /// ceil(1/(4 eps^2)); absent when the distributions coincide.
    samples_per_bias: Option<u64>,
    bias_gap: f64,
}

impl Report for SampleComplexityReport {
    fn csv_columns(&self) -> Vec<(&'static str, String)> {
        vec![
            ("experiment", self.experiment.to_string()),
            ("p", fmt_f64(self.p)),
            ("q", fmt_f64(self.q)),
            ("samples_per_pq", self.samples_per_pq.to_string()),
            (
                "samples_per_bias",
                self.samples_per_bias
                    .map(|v| v.to_string())
                    .unwrap_or_else(|| "indistinguishable".to_string()),
            ),
            ("bias_gap", fmt_f64(self.bias_gap)),
        ]
    }
}

fn sample_complexity_cmd(p: f64, q: f64, out: &OutputArgs) -> Result<()> {
    let sc = sample_complexity(p, q).context("invalid --p/--q")?;
    emit(
        &SampleComplexityReport {
            experiment: "sample-complexity",
            p,
            q,
            samples_per_pq: sc.per_pq_formula,
            samples_per_bias: sc.per_bias_formula,
            bias_gap: sc.bias_gap,
        },
        out,
    )
}
