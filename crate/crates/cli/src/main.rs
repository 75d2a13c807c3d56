use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qracvqc::analysis::{classify_patterns_with_grid, write_pattern_report, DEFAULT_GRID};
use qracvqc::data::{self, load_csv};
use qracvqc::qrac::{hamming_distance_monotonicity, helstrom_success, min_success, nayak_check, optimize_codebook, Codebook};
use qracvqc_cli::config::builtin_table;
use qracvqc_cli::report::emit_table;
use qracvqc_cli::{run_experiment, ExperimentConfig, RunOptions, Summary};

#[derive(Parser)]
#[command(name = "qracvqc", version, about = "Variational quantum classifiers with quantum random access codes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Overrides every config's seed list with one seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Dataset directory (else QRACVQC_DATA_DIR, else ./data).
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Evaluate with this many measurement shots instead of exact expectations.
    #[arg(long, global = true)]
    shots: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run { config: PathBuf },
    /// Run every *.json config in a directory and write table.csv.
    Sweep { dir: PathBuf },
    #[command(subcommand)]
    Codebook(CodebookCmd),
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    #[command(subcommand)]
    Data(DataCmd),
}

#[derive(Subcommand)]
enum CodebookCmd {
    /// Search for an (n, m) code and write it as JSON.
    Optimize {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 300)]
        iterations: usize,
    },
    /// Report per-bit success, the Nayak check and Hamming monotonicity.
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    /// Best single-plane accuracy for every one-qubit labelling pattern.
    Patterns {
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
}

#[derive(Subcommand)]
enum DataCmd {
    /// Row counts and class balance of a bundled table.
    Inspect { source: String },
}

fn opts(g: &Global) -> RunOptions {
    RunOptions { data_dir: g.data_dir.clone(), out_dir: g.out.clone(), seed: g.seed, shots: g.shots }
}

fn print_summary(s: &Summary) {
    println!(
        "{}: qubits {} params {} train {:.3} ± {:.3} test {:.3} ± {:.3} f1 {:.3} ± {:.3}",
        s.name, s.qubits, s.parameters, s.train.0, s.train.1, s.test.0, s.test.1, s.f1.0, s.f1.1
    );
}

fn write_or_print(out: Option<&PathBuf>, name: &str, text: &str) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let p = dir.join(name);
            std::fs::write(&p, text)?;
            println!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let g = &cli.global;
    match &cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(config).with_context(|| format!("loading {}", config.display()))?;
            print_summary(&run_experiment(cfg, &opts(g))?);
        }
        Command::Sweep { dir } => {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "json"))
                .collect();
            paths.sort();
            if paths.is_empty() {
                bail!("no configs in {}", dir.display());
            }
            // Validate everything before any training starts.
            let configs = paths
                .iter()
                .map(|p| ExperimentConfig::load(p).and_then(|c| c.validate().map(|_| c)).with_context(|| p.display().to_string()))
                .collect::<Result<Vec<_>>>()?;
            let mut summaries = Vec::new();
            for c in configs {
                let s = run_experiment(c, &opts(g))?;
                print_summary(&s);
                summaries.push(s);
            }
            if let Some(out) = &g.out {
                std::fs::create_dir_all(out)?;
                emit_table(&summaries, &out.join("table.csv"))?;
            }
        }
        Command::Codebook(CodebookCmd::Optimize { n, m, restarts, iterations }) => {
            let c = optimize_codebook(*n, *m, g.seed.unwrap_or(0), *restarts, *iterations)?;
            eprintln!("min success {:.6}", min_success(&c)?);
            write_or_print(g.out.as_ref(), &format!("code_{n}_{m}.json"), &(c.to_json()? + "\n"))?;
        }
        Command::Codebook(CodebookCmd::Verify { file }) => {
            let c = Codebook::from_json(&std::fs::read_to_string(file)?)?;
            for i in 0..c.n_bits() {
                println!("bit {i}: {:.6}", helstrom_success(&c, i)?);
            }
            let p = min_success(&c)?;
            println!("min {p:.6}");
            println!("nayak {}", if p >= 0.5 && nayak_check(c.n_bits(), c.m_qubits(), p)? { "ok" } else { "violated" });
            println!("hamming monotone {}", hamming_distance_monotonicity(&c));
        }
        Command::Analyze(AnalyzeCmd::Patterns { grid }) => {
            let results = classify_patterns_with_grid(*grid)?;
            let mut buf = Vec::new();
            write_pattern_report(&mut buf, &results)?;
            write_or_print(g.out.as_ref(), "patterns.csv", &String::from_utf8(buf)?)?;
        }
        Command::Data(DataCmd::Inspect { source }) => {
            let (file, schema) = builtin_table(source)?;
            let path = data::data_dir(g.data_dir.as_deref()).join(file);
            let t = load_csv(&path, &schema).with_context(|| path.display().to_string())?;
            let (neg, pos) = t.class_counts();
            println!("{}: parsed {} dropped {} kept {} (+1: {pos}, -1: {neg})", path.display(), t.parsed, t.dropped, t.len());
            for c in &schema.columns {
                println!("  {}", c.name);
            }
        }
    }
    Ok(())
}
