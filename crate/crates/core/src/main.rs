use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use layernet::checklist::{generate_checklist, render_lines, render_table, ItemStatus};
use layernet::consistency::{consistency_check, Verdict};
use layernet::faultsim::{
    enumerate_spofs, generate_fmea, parse_element, render_fmea_lines, render_fmea_table,
    run_scenario, FaultError, FaultScenario,
};
use layernet::io::{export_drawing, export_logic_facts, parse_document, serialize_model};
use layernet::model::render_cardinality_table;
use layernet::paths::{realize_link, Exclusions};
use layernet::structure::validate_structure;
use layernet::{LayerId, LayeredModel};

#[derive(Parser)]
#[command(
    name = "layernet",
    version,
    about = "Analyse layered models of distributed systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check structural well-formedness.
    Validate {
        model: PathBuf,
        /// Treat empty layers and link sets as violations.
        #[arg(long)]
        strict: bool,
    },
    /// Run the full consistency check.
    Check {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = CheckFormat::Kv)]
        format: CheckFormat,
    },
    /// Generate the requirements-coverage checklist.
    Checklist {
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TableFormat::Table)]
        format: TableFormat,
    },
    /// Print per-layer cardinalities.
    Stats { model: PathBuf },
    /// Show how a link is carried by the layers beneath it.
    Realize {
        model: PathBuf,
        /// Layer name or number.
        layer: LayerId,
        a: String,
        b: String,
    },
    /// Remove elements and report the propagated failures.
    Inject {
        model: PathBuf,
        /// `comp:ID`, `link:LAYER:A-B` or a bare component id.
        #[arg(long = "remove", required = true, num_args = 1..)]
        remove: Vec<String>,
    },
    /// Single-fault effects analysis for every element.
    Fmea {
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TableFormat::Table)]
        format: TableFormat,
    },
    /// List single points of failure of one requirement.
    Spof {
        model: PathBuf,
        #[arg(long)]
        requirement: String,
    },
    /// Write the model in another format.
    Export {
        model: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckFormat {
    Kv,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Table,
    Lines,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Facts,
    Drawing,
    Canonical,
}

/// Failure that has already been reported and only needs an exit status.
struct Exit(u8);

fn load(path: &Path) -> Result<LayeredModel, Exit> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        Exit(2)
    })?;
    match parse_document(&text) {
        Ok(parsed) => {
            for w in &parsed.warnings {
                eprintln!("{}:{w}", path.display());
            }
            Ok(parsed.model)
        }
        Err(e) => {
            eprintln!("{}:{e}", path.display());
            Err(Exit(2))
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Exit> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| {
            eprintln!("error: writing {}: {e}", p.display());
            Exit(2)
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn status(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

fn fault_exit(e: &FaultError) -> u8 {
    match e {
        FaultError::NotAccessible(_) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<u8, Exit> {
    let code = match cli.command {
        Command::Validate { model, strict } => {
            let m = load(&model)?;
            let report = validate_structure(&m, strict);
            print!("{}", report.render());
            status(report.is_valid())
        }
        Command::Check { model, format } => {
            let m = load(&model)?;
            let report = consistency_check(&m);
            match format {
                CheckFormat::Kv => print!("{}", report.render()),
                CheckFormat::Tsv => print!("{}", report.render_tsv()),
            }
            status(report.verdict != Verdict::Inconsistent)
        }
        Command::Checklist {
            model,
            output,
            format,
        } => {
            let m = load(&model)?;
            let items = generate_checklist(&m);
            let text = match format {
                TableFormat::Table => render_table(&items),
                TableFormat::Lines => render_lines(&items),
            };
            emit(output.as_deref(), &text)?;
            status(items.iter().all(|i| i.status == ItemStatus::Covered))
        }
        Command::Stats { model } => {
            let m = load(&model)?;
            print!("{}", render_cardinality_table(&m.cardinality_report()));
            0
        }
        Command::Realize { model, layer, a, b } => {
            let m = load(&model)?;
            match realize_link(&m, layer, &a, &b, &Exclusions::none()) {
                Ok(Some(tree)) => {
                    print!("{}", tree.render());
                    0
                }
                Ok(None) => {
                    println!("link:{}:{a}-{b} is not realizable", layer.index());
                    1
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Command::Inject { model, remove } => {
            let m = load(&model)?;
            let mut scenario = FaultScenario::new();
            for r in &remove {
                match parse_element(&m, r) {
                    Ok(e) => scenario = scenario.remove(e),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return Ok(2);
                    }
                }
            }
            match run_scenario(&m, &scenario) {
                Ok((report, summary)) => {
                    print!("{summary}");
                    status(
                        report.broken_requirements.is_empty()
                            && report.unmet_requirements.is_empty(),
                    )
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Command::Fmea {
            model,
            output,
            format,
        } => {
            let m = load(&model)?;
            match generate_fmea(&m) {
                Ok(rows) => {
                    let text = match format {
                        TableFormat::Table => render_fmea_table(&rows),
                        TableFormat::Lines => render_fmea_lines(&rows),
                    };
                    emit(output.as_deref(), &text)?;
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Command::Spof { model, requirement } => {
            let m = load(&model)?;
            let Some(req) = m.requirement(&requirement) else {
                eprintln!("error: {}", FaultError::UnknownRequirement(requirement));
                return Ok(2);
            };
            match enumerate_spofs(&m, req) {
                Ok(spofs) => {
                    for e in &spofs {
                        println!("{e}");
                    }
                    status(spofs.is_empty())
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    fault_exit(&e)
                }
            }
        }
        Command::Export { model, format } => {
            let m = load(&model)?;
            match format {
                ExportFormat::Facts => match export_logic_facts(&m) {
                    Ok(text) => {
                        print!("{text}");
                        0
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        2
                    }
                },
                ExportFormat::Drawing => {
                    print!("{}", export_drawing(&m));
                    0
                }
                ExportFormat::Canonical => {
                    print!("{}", serialize_model(&m));
                    0
                }
            }
        }
    };
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) | Err(Exit(code)) => ExitCode::from(code),
    }
}
