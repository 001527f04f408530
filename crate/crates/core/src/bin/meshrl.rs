use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use meshrl::agents::UpdateRule;
use meshrl::datagen::{generate_dataset, read_csv, split_dataset, write_csv, Profile, TraceRecord};
use meshrl::harness::{
    emit_report, load_run, run_all, save_run, validate_best, ExperimentConfig, Paradigm,
};
use meshrl::mesh_sim::BackendConfig;
use meshrl::surrogate::{evaluate_mse, ridge_fit, save_model, train_surrogate, TrainingHyper};
use meshrl::{Error, Result};

#[derive(Parser)]
#[command(name = "meshrl", version, about = "Circuit-breaker tuning with learned surrogates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample configurations of a profile and simulate them into a CSV.
    Datagen {
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 2000)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON file with simulator backend settings.
        #[arg(long)]
        backend: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a surrogate network on a CSV dataset.
    TrainSurrogate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0.8)]
        split: f64,
        #[arg(long, default_value_t = 1e-5)]
        lr: f64,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 64)]
        batch: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Profile the data was drawn from; inferred from the rows if omitted.
        #[arg(long)]
        profile: Option<String>,
        /// Also fit a linear baseline on the same split (only `ridge`).
        #[arg(long)]
        baseline: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train agents against surrogates and record a run file.
    TrainAgent {
        /// JSON experiment config; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        paradigm: Option<String>,
        #[arg(long, value_delimiter = ',')]
        surrogate: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        profile: Vec<String>,
        /// Use the simulator itself as the environment.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        interactions: Option<usize>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        desk_scale: bool,
        #[arg(long)]
        update_rule: Option<String>,
        #[arg(long)]
        snet_aux: bool,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay each repeat's best window through the simulator.
    Validate {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write summaries and per-epoch curves of a run.
    Report {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn infer_profile(records: &[TraceRecord]) -> Result<Profile> {
    Profile::all()
        .into_iter()
        .find(|p| records.iter().all(|r| p.contains(&r.inputs())))
        .ok_or_else(|| Error::validation("profile", "no preset contains every row; pass --profile"))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Datagen { profile, size, seed, backend, out } => {
            let profile = Profile::by_name(&profile)?;
            let backend = match backend {
                Some(path) => read_json(&path)?,
                None => BackendConfig::default(),
            };
            let records = generate_dataset(&profile, size, seed, &backend)?;
            write_csv(&records, &out)?;
            println!("wrote {} {} rows to {}", records.len(), profile.name, out.display());
        }
        Command::TrainSurrogate {
            data,
            split,
            lr,
            epochs,
            batch,
            seed,
            profile,
            baseline,
            lambda,
            out,
        } => {
            let records = read_csv(&data)?;
            let profile = match profile {
                Some(name) => Profile::by_name(&name)?,
                None => infer_profile(&records)?,
            };
            let (train, test) = split_dataset(&records, split, seed)?;
            let hyper = TrainingHyper {
                learning_rate: lr,
                epochs,
                batch_size: batch,
                seed,
            };
            let (model, curves) = train_surrogate(&train, &test, &hyper, &profile.name)?;
            save_model(&model, &out)?;
            let mut summary = json!({
                "profile": profile.name,
                "train_rows": train.len(),
                "test_rows": test.len(),
                "best_epoch": curves.best_epoch,
                "test_mse": curves.best_test_mse,
            });
            match baseline.as_deref() {
                None => {}
                Some("ridge") => {
                    let ridge = ridge_fit(&train, lambda)?;
                    let mse = evaluate_mse(|x| Ok(ridge.predict(x)), &test, &model.scaler)?;
                    summary["ridge_test_mse"] = json!(mse);
                }
                Some(other) => {
                    return Err(Error::validation("baseline", format!("unknown baseline {other:?}")))
                }
            }
            println!("{summary}");
        }
        Command::TrainAgent {
            config,
            paradigm,
            surrogate,
            profile,
            oracle,
            epochs,
            interactions,
            repeats,
            seed,
            beta,
            desk_scale,
            update_rule,
            snet_aux,
            alpha,
            out,
        } => {
            let mut c: ExperimentConfig = match config {
                Some(path) => read_json(&path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(p) = paradigm {
                c.paradigm = Paradigm::parse(&p)?;
            }
            if !surrogate.is_empty() {
                c.surrogates = surrogate;
            }
            if !profile.is_empty() {
                c.profiles = profile;
            }
            c.oracle |= oracle;
            c.desk_scale |= desk_scale;
            c.snet_aux |= snet_aux;
            c.epochs = epochs.unwrap_or(c.epochs);
            c.interactions = interactions.unwrap_or(c.interactions);
            c.repeats = repeats.unwrap_or(c.repeats);
            c.seed = seed.unwrap_or(c.seed);
            c.beta = beta.unwrap_or(c.beta);
            c.alpha = alpha.unwrap_or(c.alpha);
            if let Some(rule) = update_rule {
                c.update_rule = match rule.as_str() {
                    "qreg" => UpdateRule::QRegression,
                    "reinforce" => UpdateRule::Reinforce,
                    other => {
                        return Err(Error::validation("update_rule", format!("unknown rule {other:?}")))
                    }
                };
            }
            let run = run_all(&c)?;
            save_run(&run, &out)?;
            for r in &run.reports {
                println!(
                    "repeat {}: simulated ratio {:.4} at epoch {} ({:.1}s)",
                    r.repeat, r.simulated_ratio, r.best_epoch, r.wall_clock_s
                );
            }
            println!("mean simulated ratio {:.4}", run.aggregate()?.simulated_ratio);
        }
        Command::Validate { run, seed } => {
            let mut file = load_run(&run)?;
            let seed = seed.unwrap_or(file.config.seed);
            for i in 0..file.reports.len() {
                let v = validate_best(&file.reports[i], &file.config, seed)?;
                file.reports[i].validated_ratio = Some(v);
                println!(
                    "repeat {}: simulated {:.4} validated {:.4}",
                    file.reports[i].repeat, file.reports[i].simulated_ratio, v
                );
            }
            save_run(&file, &run)?;
        }
        Command::Report { run, out } => {
            let file = load_run(&run)?;
            let agg = emit_report(&file, &out)?;
            match agg.validated_ratio {
                Some(v) => println!(
                    "mean over {} repeats: simulated {:.4} validated {:.4}",
                    agg.repeats, agg.simulated_ratio, v
                ),
                None => println!(
                    "mean over {} repeats: simulated {:.4}",
                    agg.repeats, agg.simulated_ratio
                ),
            }
        }
    }
    Ok(())
}
