//! Command-line front end: harmony checking, rule-set completion,
//! derivation verification and the built-in library.
//!
//! Exit codes: 0 success / harmonious / valid; 1 violation or invalid
//! derivation; 2 usage, parse or IO error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bilharm_core::check_harmony;
use bilharm_core::conversion::{complete, FamilyDescriptor, Verdict};
use bilharm_core::inversion::{classify_family, ClassificationResult};
use bilharm_core::kernel::{check_derivation, parse_derivation, CheckOutcome};
use bilharm_core::library;
use bilharm_core::parser::parse_specs;
use bilharm_core::printer::{spec_to_dsl, specs_to_dsl};
use bilharm_core::syntax::{ConnectiveSpec, FamilyKey, RuleType};

#[derive(Parser)]
#[command(name = "bilharm", version, about = "Bilateral harmony workbench")]
struct Cli {
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Suppress report output; exit codes still carry the result.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check connective specifications for harmony.
    Check(CheckArgs),
    /// Derive all four rule families of a connective from one family.
    Complete(CompleteArgs),
    /// Verify derivation files against a rule library.
    Verify(VerifyArgs),
    /// Print the built-in connective library in DSL form.
    Library(LibraryArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// DSL files to check.
    paths: Vec<PathBuf>,
    /// Built-in connectives to check.
    #[arg(long = "builtin", num_args = 1..)]
    builtins: Vec<String>,
}

#[derive(Args)]
struct CompleteArgs {
    /// DSL file containing the connective (alternative to --builtin).
    path: Option<PathBuf>,
    /// Built-in connective to complete from.
    #[arg(long)]
    builtin: Option<String>,
    /// Family to start from: assertive-intro, assertive-elim,
    /// rejective-intro or rejective-elim.
    #[arg(long)]
    from: String,
    /// Rule type override when the family fits both shapes.
    #[arg(long = "type", value_parser = ["1", "2"])]
    rule_type: Option<String>,
    /// Write the completed specification to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Derivation files to verify.
    paths: Vec<PathBuf>,
    /// Library sources: file paths or built-in connective names.
    #[arg(long = "lib", num_args = 1..)]
    lib: Vec<String>,
}

#[derive(Args)]
struct LibraryArgs {
    /// Print one connective instead of the whole library.
    #[arg(long)]
    name: Option<String>,
}

fn fail_usage(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn load_spec_file(path: &PathBuf) -> Result<Vec<ConnectiveSpec>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_specs(&text).map_err(|e| format!("{}:{e}", path.display()))
}

fn cmd_check(cli: &Cli, args: &CheckArgs) -> ExitCode {
    let mut targets: Vec<ConnectiveSpec> = Vec::new();
    for path in &args.paths {
        match load_spec_file(path) {
            Ok(specs) => targets.extend(specs),
            Err(e) => return fail_usage(e),
        }
    }
    for name in &args.builtins {
        match library::builtin(name) {
            Some(spec) => targets.push(spec.clone()),
            None => return fail_usage(format!("unknown builtin `{name}`")),
        }
    }
    if targets.is_empty() {
        return fail_usage("nothing to check; give DSL files or --builtin names");
    }

    let reports: Vec<_> = targets.iter().map(check_harmony).collect();
    if cli.json {
        let doc: Vec<_> = reports.iter().map(|r| r.to_json()).collect();
        if !cli.quiet {
            println!("{}", serde_json::Value::Array(doc));
        }
    } else if !cli.quiet {
        for r in &reports {
            print!("{}", r.render_text());
        }
    }
    if reports.iter().all(|r| r.verdict == Verdict::Harmonious) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_complete(cli: &Cli, args: &CompleteArgs) -> ExitCode {
    let spec: ConnectiveSpec = match (&args.path, &args.builtin) {
        (Some(path), None) => match load_spec_file(path) {
            Ok(mut specs) => {
                if specs.len() != 1 {
                    return fail_usage(format!(
                        "{} declares {} connectives; complete takes exactly one",
                        path.display(),
                        specs.len()
                    ));
                }
                specs.remove(0)
            }
            Err(e) => return fail_usage(e),
        },
        (None, Some(name)) => match library::builtin(name) {
            Some(s) => s.clone(),
            None => return fail_usage(format!("unknown builtin `{name}`")),
        },
        _ => return fail_usage("give exactly one of a DSL file or --builtin NAME"),
    };

    let Some(key) = FamilyKey::parse(&args.from) else {
        return fail_usage(format!(
            "unknown family `{}`; expected assertive-intro, assertive-elim, rejective-intro or rejective-elim",
            args.from
        ));
    };
    let rules = spec.family(key);
    let override_type = args.rule_type.as_deref().map(|t| match t {
        "1" => RuleType::Type1,
        _ => RuleType::Type2,
    });
    let rule_type = match override_type {
        Some(t) => t,
        None => match classify_family(rules, key, &spec) {
            ClassificationResult::Definitely(t) => t,
            ClassificationResult::Ambiguous => {
                eprintln!(
                    "error: family {key} of `{}` fits both types; pass --type 1 or --type 2",
                    spec.name
                );
                return ExitCode::from(1);
            }
            ClassificationResult::IllFormed(reason) => {
                eprintln!(
                    "error: family {key} of `{}` is ill-formed: {reason}",
                    spec.name
                );
                return ExitCode::from(1);
            }
        },
    };

    let descriptor = FamilyDescriptor::new(key.polarity, key.role, rule_type);
    match complete(&spec.name, spec.arity, descriptor, rules) {
        Ok(completed) => {
            let dsl = spec_to_dsl(&completed);
            let output = if cli.json {
                serde_json::json!({
                    "connective": completed.name,
                    "arity": completed.arity,
                    "from": key.label(),
                    "dsl": dsl,
                })
                .to_string()
            } else {
                dsl
            };
            if let Some(out) = &args.out {
                if let Err(e) = fs::write(out, output + "\n") {
                    return fail_usage(format!("{}: {e}", out.display()));
                }
            } else if !cli.quiet {
                println!("{output}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: completion from {key} failed: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> ExitCode {
    let mut lib: Vec<ConnectiveSpec> = Vec::new();
    for source in &args.lib {
        let path = PathBuf::from(source);
        if path.exists() {
            match load_spec_file(&path) {
                Ok(specs) => lib.extend(specs),
                Err(e) => return fail_usage(e),
            }
        } else if let Some(spec) = library::builtin(source) {
            lib.push(spec.clone());
        } else {
            return fail_usage(format!("`{source}` is neither a file nor a builtin"));
        }
    }
    if args.paths.is_empty() {
        return fail_usage("no derivation files given");
    }

    let mut all_valid = true;
    let mut json_results = Vec::new();
    for path in &args.paths {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail_usage(format!("{}: {e}", path.display())),
        };
        let derivation = match parse_derivation(&text) {
            Ok(d) => d,
            Err(e) => return fail_usage(format!("{}:{e}", path.display())),
        };
        match check_derivation(&derivation, &lib) {
            CheckOutcome::Valid { conclusion, open } => {
                if cli.json {
                    json_results.push(serde_json::json!({
                        "file": path.display().to_string(),
                        "status": "valid",
                        "conclusion": conclusion.concrete(),
                        "open": open.iter().map(|sf| sf.concrete()).collect::<Vec<_>>(),
                    }));
                } else if !cli.quiet {
                    let open_text = if open.is_empty() {
                        "(none)".to_string()
                    } else {
                        open.iter()
                            .map(|sf| sf.concrete())
                            .collect::<Vec<_>>()
                            .join(", ")
                    };
                    println!(
                        "{}: valid, concludes {}, open assumptions: {}",
                        path.display(),
                        conclusion.concrete(),
                        open_text
                    );
                }
            }
            CheckOutcome::Invalid(failure) => {
                all_valid = false;
                if cli.json {
                    json_results.push(serde_json::json!({
                        "file": path.display().to_string(),
                        "status": "invalid",
                        "path": failure.path,
                        "reason": failure.to_string(),
                    }));
                } else if !cli.quiet {
                    println!("{}: invalid, {}", path.display(), failure);
                }
            }
        }
    }
    if cli.json && !cli.quiet {
        println!("{}", serde_json::Value::Array(json_results));
    }
    if all_valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_library(cli: &Cli, args: &LibraryArgs) -> ExitCode {
    let specs: Vec<&ConnectiveSpec> = match &args.name {
        Some(name) => match library::builtin(name) {
            Some(s) => vec![s],
            None => return fail_usage(format!("unknown builtin `{name}`")),
        },
        None => library::builtins().iter().collect(),
    };
    if cli.quiet {
        return ExitCode::SUCCESS;
    }
    if cli.json {
        let doc: Vec<_> = specs
            .iter()
            .map(|s| {
                serde_json::json!({
                    "connective": s.name,
                    "arity": s.arity,
                    "dsl": spec_to_dsl(s),
                })
            })
            .collect();
        println!("{}", serde_json::Value::Array(doc));
    } else {
        let owned: Vec<ConnectiveSpec> = specs.into_iter().cloned().collect();
        print!("{}", specs_to_dsl(&owned));
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Check(args) => cmd_check(&cli, args),
        Command::Complete(args) => cmd_complete(&cli, args),
        Command::Verify(args) => cmd_verify(&cli, args),
        Command::Library(args) => cmd_library(&cli, args),
    }
}
