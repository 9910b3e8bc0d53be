use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

mod commands;

/// Reproducible experiments over maximal subfamilies, closure operators and
/// stage constructions. Every command reads a JSON document and writes one.
#[derive(Debug, Parser)]
#[command(name = "choicelab", version)]
pub struct Cli {
    #[command(subcommand)]
    group: Group,
    /// Input document (defaults to standard input).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output document (defaults to standard output).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Second document for verify and decode-paths.
    #[arg(long, global = true)]
    artifact: Option<PathBuf>,
    /// JSONL transcript destination for stage constructions.
    #[arg(long, global = true)]
    transcript: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    horizon: Option<u64>,
    #[arg(long, global = true)]
    stages: Option<u64>,
    #[arg(long, global = true)]
    steps: Option<u64>,
    /// Print the input schema of the command instead of running it.
    #[arg(long, global = true)]
    schema: bool,
}

#[derive(Debug, Subcommand)]
enum Group {
    Family {
        #[command(subcommand)]
        cmd: FamilyCmd,
    },
    Poset {
        #[command(subcommand)]
        cmd: PosetCmd,
    },
    Fcp {
        #[command(subcommand)]
        cmd: FcpCmd,
    },
    Closure {
        #[command(subcommand)]
        cmd: ClosureCmd,
    },
    Nce {
        #[command(subcommand)]
        cmd: NceCmd,
    },
    Construct {
        #[command(subcommand)]
        cmd: ConstructCmd,
    },
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Seeded random instances.
    Gen {
        #[command(subcommand)]
        cmd: GenCmd,
    },
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum FamilyCmd {
    Check,
    Greedy,
    Tilde,
    EncodeRange,
    DecodeRange,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum PosetCmd {
    Zl1,
    Maximals,
    Assign,
    Reversal,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum FcpCmd {
    Max,
    Sigma1,
    Sequential,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum ClosureCmd {
    Cl,
    Closed,
    CeMax,
    PrimeGadget,
    Semilattice,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum NceCmd {
    Check,
    Max,
    IdealEncode,
    TreeEncode,
    DecodePaths,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum ConstructCmd {
    Adversary,
    Permit,
    Escape,
    Forcing,
    Pi01g,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum VerifyCmd {
    /// Runs the brute-force oracle matching `kind` on --input and --artifact.
    Oracle { kind: OracleKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    FamilyMax,
    FcpMax,
    CeMax,
    NceMax,
    Ideals,
    TreePaths,
    Permit,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum GenCmd {
    Family {
        #[arg(long, default_value_t = 6)]
        members: usize,
    },
    Poset {
        #[arg(long, default_value_t = 6)]
        size: usize,
    },
    Closure {
        #[arg(long, default_value_t = 6)]
        rules: usize,
        #[arg(long, default_value_t = 8)]
        universe: u64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Schema(String),
    Domain(choicelab::Error),
    /// A verification ran and rejected the artifact.
    Rejected(Value),
}

impl From<choicelab::Error> for CliError {
    fn from(e: choicelab::Error) -> Self {
        CliError::Domain(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

impl Cli {
    fn read(path: Option<&PathBuf>, what: &str) -> CliResult<String> {
        match path {
            Some(p) if p.as_os_str() != "-" => {
                fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {what} {}: {e}", p.display())))
            }
            _ => {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s).map_err(|e| CliError::Usage(format!("cannot read {what}: {e}")))?;
                Ok(s)
            }
        }
    }

    pub fn doc<T: DeserializeOwned>(&self) -> CliResult<T> {
        let text = Cli::read(self.input.as_ref(), "input")?;
        serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("input: {e}")))
    }

    pub fn artifact_text(&self) -> CliResult<String> {
        match &self.artifact {
            Some(_) => Cli::read(self.artifact.as_ref(), "artifact"),
            None => Err(CliError::Usage("--artifact is required".into())),
        }
    }

    pub fn artifact<T: DeserializeOwned>(&self) -> CliResult<T> {
        serde_json::from_str(&self.artifact_text()?).map_err(|e| CliError::Schema(format!("artifact: {e}")))
    }

    pub fn need(&self, flag: Option<u64>, name: &str) -> CliResult<u64> {
        flag.ok_or_else(|| CliError::Usage(format!("--{name} is required")))
    }

    pub fn write_transcript(&self, jsonl: &str) -> CliResult<()> {
        if let Some(p) = &self.transcript {
            fs::write(p, jsonl).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display())))?;
        }
        Ok(())
    }

    fn command_name(&self) -> String {
        let (g, c) = match &self.group {
            Group::Family { cmd } => ("family", format!("{cmd:?}")),
            Group::Poset { cmd } => ("poset", format!("{cmd:?}")),
            Group::Fcp { cmd } => ("fcp", format!("{cmd:?}")),
            Group::Closure { cmd } => ("closure", format!("{cmd:?}")),
            Group::Nce { cmd } => ("nce", format!("{cmd:?}")),
            Group::Construct { cmd } => ("construct", format!("{cmd:?}")),
            Group::Verify { cmd: VerifyCmd::Oracle { kind } } => {
                ("verify", format!("oracle {}", kind.to_possible_value().expect("named").get_name()))
            }
            Group::Gen { cmd } => ("gen", format!("{cmd:?}").split_whitespace().next().unwrap_or("").to_string()),
        };
        format!("{g} {}", kebab(&c))
    }

    fn run(&self) -> CliResult<Value> {
        if self.schema {
            return commands::schema(&self.command_name());
        }
        match &self.group {
            Group::Family { cmd } => match cmd {
                FamilyCmd::Check => commands::family_check(self),
                FamilyCmd::Greedy => commands::family_greedy(self),
                FamilyCmd::Tilde => commands::family_tilde(self),
                FamilyCmd::EncodeRange => commands::family_encode_range(self),
                FamilyCmd::DecodeRange => commands::family_decode_range(self),
            },
            Group::Poset { cmd } => match cmd {
                PosetCmd::Zl1 => commands::poset_zl1(self),
                PosetCmd::Maximals => commands::poset_maximals(self),
                PosetCmd::Assign => commands::poset_assign(self),
                PosetCmd::Reversal => commands::poset_reversal(self),
            },
            Group::Fcp { cmd } => match cmd {
                FcpCmd::Max => commands::fcp_max(self),
                FcpCmd::Sigma1 => commands::fcp_sigma1(self),
                FcpCmd::Sequential => commands::fcp_sequential(self),
            },
            Group::Closure { cmd } => match cmd {
                ClosureCmd::Cl => commands::closure_cl(self),
                ClosureCmd::Closed => commands::closure_closed(self),
                ClosureCmd::CeMax => commands::closure_ce_max(self),
                ClosureCmd::PrimeGadget => commands::closure_prime_gadget(self),
                ClosureCmd::Semilattice => commands::closure_semilattice(self),
            },
            Group::Nce { cmd } => match cmd {
                NceCmd::Check => commands::nce_check(self),
                NceCmd::Max => commands::nce_max(self),
                NceCmd::IdealEncode => commands::nce_ideal_encode(self),
                NceCmd::TreeEncode => commands::nce_tree_encode(self),
                NceCmd::DecodePaths => commands::nce_decode_paths(self),
            },
            Group::Construct { cmd } => match cmd {
                ConstructCmd::Adversary => commands::construct_adversary(self),
                ConstructCmd::Permit => commands::construct_permit(self),
                ConstructCmd::Escape => commands::construct_escape(self),
                ConstructCmd::Forcing => commands::construct_forcing(self),
                ConstructCmd::Pi01g => commands::construct_pi01g(self),
            },
            Group::Verify { cmd: VerifyCmd::Oracle { kind } } => commands::verify(self, *kind),
            Group::Gen { cmd } => {
                let seed = self.need(self.seed, "seed")?;
                match *cmd {
                    GenCmd::Family { members } => commands::gen_family(seed, members, self.horizon.unwrap_or(16)),
                    GenCmd::Poset { size } => commands::gen_poset(seed, size),
                    GenCmd::Closure { rules, universe } => commands::gen_closure(seed, rules, universe),
                }
            }
        }
    }
}

fn kebab(camel: &str) -> String {
    let mut out = String::new();
    for (i, ch) in camel.char_indices() {
        if ch.is_uppercase() && i > 0 && !camel[..i].ends_with(' ') {
            out.push('-');
        }
        out.extend(ch.to_lowercase());
    }
    out
}

fn emit(cli: &Cli, value: &Value) -> io::Result<()> {
    let text = serde_json::to_string(value).expect("values serialize") + "\n";
    match &cli.output {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn fail(code: u8, doc: Value) -> ExitCode {
    eprintln!("{doc}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(2, json!({"error": "usage", "message": e.to_string().trim()})),
    };
    let result = cli.run();
    match result {
        Ok(value) => match emit(&cli, &value) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(2, json!({"error": "usage", "message": format!("cannot write output: {e}")})),
        },
        Err(CliError::Usage(m)) => fail(2, json!({"error": "usage", "message": m})),
        Err(CliError::Schema(m)) => fail(2, json!({"error": "schema", "message": m})),
        Err(CliError::Domain(e)) => fail(1, json!({"error": e.name(), "message": e.to_string()})),
        Err(CliError::Rejected(value)) => {
            let _ = emit(&cli, &value);
            ExitCode::from(1)
        }
    }
}
