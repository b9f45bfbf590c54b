//! Command-line front end: builds gates, synthesizes circuits over the fixed
//! generator libraries, verifies circuits against claimed gates, and runs
//! the analysis, group, and transfer oracles on text-format files.
//!
//! Exit codes: 0 success, 1 semantic negative (failed verification, class
//! membership, or group membership), 2 malformed input or exceeded budget.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use revgate::analysis::{self, Partition};
use revgate::error::Error;
use revgate::files;
use revgate::group::{closure_bfs, group_membership, PlacementGroup};
use revgate::lattice;
use revgate::synth;
use revgate::{Gate, Word};

#[derive(Parser)]
#[command(name = "revgate", about = "reversible gate synthesis and analysis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a builtin gate as a gate file.
    Gen {
        /// Alphabet size.
        #[arg(long)]
        k: u32,
        /// Descriptor: `tau U V | swap U V | ctrl W <spec> | perm P.. | cc M | t J | id N`.
        #[arg(trailing_var_arg = true, required = true)]
        spec: Vec<String>,
    },
    /// Synthesize a circuit for a gate over a fixed library.
    Synth {
        /// Target library: all | cons | lambda | mod.
        #[arg(long)]
        library: String,
        /// Partition blocks for the lambda library, e.g. 12/3.
        #[arg(long)]
        blocks: Option<String>,
        /// Modulus for the mod library.
        #[arg(long)]
        modulus: Option<u32>,
        /// Target gate file (stdin when omitted).
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Check that a circuit computes a claimed gate, ancillas included.
    Verify {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        claimed: PathBuf,
    },
    /// Report arity, bijectivity, conservativity, and the mod profile.
    Analyze {
        #[arg(long)]
        gate: PathBuf,
        /// Partition blocks to test, e.g. 12/3.
        #[arg(long)]
        partition: Option<String>,
        /// Marked symbol for the count profile (1-based; default largest).
        #[arg(long)]
        marked: Option<u32>,
    },
    /// Classify the class generated above the count-preserving gates.
    Classify {
        /// Gate files; the gcd of their invariants indexes the class.
        gates: Vec<PathBuf>,
        /// Alphabet size when no gate files are given.
        #[arg(long)]
        k: Option<u32>,
        /// Also print a DOT fragment of the divisibility lattice this deep.
        #[arg(long)]
        lattice_depth: Option<u32>,
    },
    /// Breadth-first closure order of placed generators.
    Closure {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        wires: usize,
        /// Generator descriptors (repeatable), e.g. --gen "tau 1 2" or tau12.
        #[arg(long = "gen", required = true)]
        gens: Vec<String>,
        /// Element cap for the closure scan.
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Stabilizer-chain membership of a full-width candidate gate.
    Member {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        wires: usize,
        #[arg(long = "gen", required = true)]
        gens: Vec<String>,
        /// Candidate gate file of arity equal to the wire count.
        #[arg(long)]
        candidate: PathBuf,
    },
    /// Parity certificate that the transposition family needs every member.
    Nonfingen {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
    },
    /// Lift a gate to the alphabet with one more symbol.
    Lift {
        #[arg(long)]
        gate: PathBuf,
    },
    /// Conjugate a gate by a symbol permutation.
    Act {
        #[arg(long)]
        gate: PathBuf,
        /// Permutation as a word of 1-based images, e.g. 213.
        #[arg(long)]
        sigma: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn semantic(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::NotConservative { .. }
            | Error::NotLambdaConservative { .. }
            | Error::NotModPreserving { .. }
            | Error::NoTensorWitness
            | Error::NoFixedPoint { .. }
            | Error::AncillaViolation { .. }
            | Error::Disconnected { .. } => 1,
            _ => 2,
        };
        Failure { code, message: err.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("revgate: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn read_gate_file(path: &Path) -> Result<Gate, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    Ok(files::parse_gate(&text)?)
}

fn parse_partition(k: u32, spec: &str) -> Result<Partition, Failure> {
    let blocks: Vec<Vec<u32>> = spec
        .split('/')
        .map(|part| Word::parse(k, part).map(|w| w.symbols().to_vec()))
        .collect::<Result<_, _>>()?;
    Ok(Partition::new(k, blocks)?)
}

/// Accept both quoted descriptors ("tau 1 2") and the compact digit form
/// (tau12) for single-symbol words over small alphabets.
fn expand_generator_spec(spec: &str) -> Vec<String> {
    if spec.contains(char::is_whitespace) {
        return spec.split_whitespace().map(str::to_string).collect();
    }
    let head_len = spec.chars().take_while(|c| c.is_ascii_alphabetic()).count();
    let (head, digits) = spec.split_at(head_len);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return vec![spec.to_string()];
    }
    match head {
        "tau" | "swap" if digits.len() == 2 => {
            let mut out = vec![head.to_string()];
            out.extend(digits.chars().map(|c| c.to_string()));
            out
        }
        "cc" | "t" | "id" => vec![head.to_string(), digits.to_string()],
        _ => vec![spec.to_string()],
    }
}

fn build_group(k: u32, wires: usize, gens: &[String]) -> Result<PlacementGroup, Failure> {
    let mut placements = Vec::new();
    for spec in gens {
        let tokens = expand_generator_spec(spec);
        let refs: Vec<&str> = tokens.iter().map(String::as_str).collect();
        let gate = files::parse_gate_spec(k, &refs)?;
        if gate.arity() > wires {
            return Err(Failure::input(format!(
                "generator '{spec}' needs {} wires but only {wires} exist",
                gate.arity()
            )));
        }
        let at: Vec<usize> = (0..gate.arity()).collect();
        placements.push((gate.shared(), at));
    }
    Ok(PlacementGroup::new(k, wires, placements)?)
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen { k, spec } => {
            let tokens: Vec<&str> = spec.iter().map(String::as_str).collect();
            let gate = files::parse_gate_spec(k, &tokens)?;
            print!("{}", files::serialize_gate(&gate));
            Ok(())
        }

        Command::Synth { library, blocks, modulus, target } => {
            let text = match &target {
                Some(path) => std::fs::read_to_string(path)
                    .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?,
                None => {
                    let mut buf = String::new();
                    std::io::stdin()
                        .read_to_string(&mut buf)
                        .map_err(|e| Failure::input(format!("cannot read stdin: {e}")))?;
                    buf
                }
            };
            let gate = files::parse_gate(&text)?;
            let circuit = match library.as_str() {
                "all" => synth::synth_all(&gate)?,
                "cons" => synth::synth_cons(&gate)?,
                "lambda" => {
                    let spec = blocks
                        .ok_or_else(|| Failure::input("--blocks is required for lambda"))?;
                    let partition = parse_partition(gate.k(), &spec)?;
                    synth::synth_cons_lambda(&gate, &partition)?
                }
                "mod" => {
                    let m = modulus.ok_or_else(|| Failure::input("--modulus is required for mod"))?;
                    synth::synth_mod_preserving(&gate, m)?
                }
                other => return Err(Failure::input(format!("unknown library '{other}'"))),
            };
            print!("{}", files::serialize_circuit(&circuit));
            Ok(())
        }

        Command::Verify { circuit, claimed } => {
            let circuit_text = std::fs::read_to_string(&circuit)
                .map_err(|e| Failure::input(format!("cannot read {}: {e}", circuit.display())))?;
            let base = circuit.parent().map(Path::to_path_buf).unwrap_or_default();
            let loader = move |rel: &str| std::fs::read_to_string(base.join(rel));
            let parsed = files::parse_circuit(&circuit_text, Some(&loader))?;
            let claimed_gate = read_gate_file(&claimed)?;
            let extracted = parsed.extract_gate()?;
            if extracted == claimed_gate {
                println!("verified");
                Ok(())
            } else {
                let witness = extracted
                    .entries()
                    .zip(claimed_gate.entries())
                    .find(|((_, a), (_, b))| a != b)
                    .map(|((i, _), _)| Word::from_index(extracted.k(), extracted.arity(), i))
                    .transpose()?
                    .expect("tables differ somewhere");
                Err(Failure::semantic(format!("mismatch on input {witness}")))
            }
        }

        Command::Analyze { gate, partition, marked } => {
            let gate = read_gate_file(&gate)?;
            println!("k {} arity {}", gate.k(), gate.arity());
            println!("bijective yes");
            let marked = match marked {
                Some(s) => s
                    .checked_sub(1)
                    .ok_or_else(|| Failure::input("symbols are written 1-based"))?,
                None => gate.k() - 1,
            };
            let profile = analysis::mod_profile_with_marked(&gate, marked)?;
            let diffs: Vec<String> = profile.diffs.iter().map(|d| d.to_string()).collect();
            println!("diffs {}", diffs.join(" "));
            println!("m {}", profile.gcd_value);
            let singles = Partition::singletons(gate.k())?;
            match analysis::lambda_violation(&gate, &singles)? {
                None => println!("conservative for every partition"),
                Some(witness) => println!("conservative no witness {witness}"),
            }
            if let Some(spec) = partition {
                let partition = parse_partition(gate.k(), &spec)?;
                match analysis::lambda_violation(&gate, &partition)? {
                    None => println!("partition {} yes", partition.display()),
                    Some(witness) => {
                        println!("partition {} no witness {witness}", partition.display())
                    }
                }
            }
            Ok(())
        }

        Command::Classify { gates, k, lattice_depth } => {
            let loaded: Vec<Gate> = gates
                .iter()
                .map(|p| read_gate_file(p))
                .collect::<Result<_, _>>()?;
            if loaded.is_empty() && k.is_none() {
                return Err(Failure::input("need gate files or --k"));
            }
            let m = analysis::classify_above_cons(&loaded)?;
            println!("{m} {}", class_label(m));
            if let Some(depth) = lattice_depth {
                print!("{}", lattice_dot(m, depth));
            }
            Ok(())
        }

        Command::Closure { k, wires, gens, cap } => {
            let group = build_group(k, wires, &gens)?;
            let report = closure_bfs(&group, cap)?;
            println!("order {}", report.order());
            Ok(())
        }

        Command::Member { k, wires, gens, candidate } => {
            let group = build_group(k, wires, &gens)?;
            let gate = read_gate_file(&candidate)?;
            if gate.arity() != wires {
                return Err(Failure::input(format!(
                    "candidate arity {} does not match {wires} wires",
                    gate.arity()
                )));
            }
            let expanded = group.expand_gate(&gate)?;
            match group_membership(&group, &expanded)? {
                Some(witness) => {
                    let names: Vec<&str> = witness
                        .word
                        .iter()
                        .map(|&i| group.generators()[i].name.as_str())
                        .collect();
                    println!("member witness {}", if names.is_empty() { "-".to_string() } else { names.join(" ") });
                    Ok(())
                }
                None => Err(Failure::semantic("not a member")),
            }
        }

        Command::Nonfingen { k, n } => {
            let report = lattice::nonfingen_certificate(n, k)?;
            for assumption in &report.assumptions {
                println!("assume {assumption}");
            }
            for i in 0..=n {
                let counts: Vec<u64> = report
                    .even_counts
                    .iter()
                    .filter(|c| c.gate_index == i)
                    .map(|c| c.flip_count)
                    .collect();
                println!(
                    "T_{i}: {} placements, counts even (max {})",
                    counts.len(),
                    counts.iter().max().unwrap_or(&0)
                );
            }
            println!(
                "all T_i even; T_{} count {}; {}",
                n + 1,
                report.extremal.flip_count,
                report.conclusion
            );
            Ok(())
        }

        Command::Lift { gate } => {
            let gate = read_gate_file(&gate)?;
            print!("{}", files::serialize_gate(&lattice::base_change(&gate)?));
            Ok(())
        }

        Command::Act { gate, sigma } => {
            let gate = read_gate_file(&gate)?;
            let sigma_word = Word::parse(gate.k(), &sigma)?;
            if sigma_word.len() != gate.k() as usize {
                return Err(Failure::input(format!(
                    "sigma must list all {} symbols",
                    gate.k()
                )));
            }
            print!(
                "{}",
                files::serialize_gate(&lattice::act_sigma(&gate, sigma_word.symbols())?)
            );
            Ok(())
        }
    }
}

fn class_label(m: u32) -> String {
    match m {
        0 => "CONS_{k-1,1}".to_string(),
        1 => "ALL".to_string(),
        m => format!("⟨CONS_{{k-1,1}}, CC_{m}⟩"),
    }
}

/// DOT fragment of the divisibility lattice below the computed class:
/// covering edges step by one prime factor.
fn lattice_dot(m: u32, depth: u32) -> String {
    let mut out = String::from("digraph classes {\n");
    if m == 0 {
        out.push_str("  \"CONS_{k-1,1}\";\n}\n");
        return out;
    }
    let nodes: Vec<u32> = (1..=depth.max(1)).map(|t| m * t).collect();
    for &a in &nodes {
        out.push_str(&format!("  \"{}\";\n", class_label(a)));
    }
    for &a in &nodes {
        for &b in &nodes {
            if b > a && b % a == 0 && is_prime(b / a) {
                out.push_str(&format!("  \"{}\" -> \"{}\";\n", class_label(a), class_label(b)));
            }
        }
    }
    out.push_str("}\n");
    out
}

fn is_prime(x: u32) -> bool {
    x >= 2 && (2..x).take_while(|d| d * d <= x).all(|d| x % d != 0)
}
