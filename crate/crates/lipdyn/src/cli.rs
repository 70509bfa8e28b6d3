//! Command-line entry point.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lipdyn_core::eval::{cross_validate, synth_dataset, synth_subjects, SubjectData};
use lipdyn_core::pipeline::{clip_windows, RawWindow};
use lipdyn_core::verifier::{enroll, fit_model, verify, ContinuousVerifier};

use crate::config::Config;
use crate::dataset::{extract_frames, load_dataset, write_synth_dataset};
use crate::error::{CliError, Result};
use crate::features::{check_window_header, read_window_file, write_window_file, FeatureReader};
use crate::model_file::{load_model, save_model};
use crate::report::{format_attacks, format_pr, format_report};
use crate::template_file::{load_template, save_template};

#[derive(Debug, Parser)]
#[command(name = "lipdyn", version, about = "Lip-dynamics feature extraction and verification")]
struct Cli {
    /// TOML configuration; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    dump_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Landmark file and frames directory to a feature window file.
    Extract {
        #[arg(long)]
        landmarks: PathBuf,
        /// Directory the `img` paths are relative to; defaults to the landmark file's directory.
        #[arg(long)]
        frames: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Feature window files, one per subject (named by file stem), to a model.
    Train {
        #[arg(long = "features", required = true, num_args = 1..)]
        features: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Trailing windows per subject held out to choose the threshold.
        #[arg(long, default_value_t = 5)]
        holdout: usize,
    },
    /// Subject windows to a template.
    Enroll {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Defaults to the feature file stem.
        #[arg(long)]
        subject: Option<String>,
    },
    /// One `accept <score>` or `reject <score>` line per window.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        features: PathBuf,
        /// Append the majority decision over the last five windows.
        #[arg(long)]
        continuous: bool,
    },
    /// Cross-validated metrics, attack rates and PR points.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        pr_out: Option<PathBuf>,
    },
    /// Success rate of one attack scenario.
    Attack {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        scenario: Scenario,
        /// Deepfake blend weight.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Writes a synthetic dataset of landmark files and PNG frames.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        subjects: Option<usize>,
        #[arg(long)]
        windows: Option<usize>,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Dataset directory; without it the synthetic dataset is generated in memory.
    #[arg(long)]
    dataset: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scenario {
    Mimic,
    Static,
    Deepfake,
}

/// Runs one command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            let _ = writeln!(err, "{}", CliError::Usage(first).diagnostic());
            return 1;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", e.diagnostic());
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg = cfg.with_seed(seed);
        cfg.validate()?;
    }
    let stdout_err = |e| CliError::io(Path::new("<stdout>"), e);
    if cli.dump_config {
        return out.write_all(cfg.dump().as_bytes()).map_err(stdout_err);
    }
    let Some(command) = cli.command else {
        return Err(CliError::Usage("no subcommand given".into()));
    };
    match command {
        Command::Extract { landmarks, frames, out: dest } => {
            let dir = frames.unwrap_or_else(|| landmarks.parent().unwrap_or(Path::new(".")).to_path_buf());
            let features = extract_frames(&landmarks, &dir, &cfg.pipeline)?;
            let windows = clip_windows(&features, &cfg.pipeline).map_err(|e| CliError::from(e).at(&landmarks))?;
            write_window_file(&dest, &windows)?;
            writeln!(out, "frames={} windows={}", features.len(), windows.len()).map_err(stdout_err)
        }
        Command::Train { features, out: dest, holdout } => {
            let model = train(&features, holdout, &cfg)?;
            save_model(&dest, &model)?;
            writeln!(
                out,
                "version={:016x} threshold={} train_loss={} val_loss={}",
                model.version,
                model.threshold,
                model.report.train_loss,
                model.report.val_loss.map_or("absent".to_string(), |v| v.to_string())
            )
            .map_err(stdout_err)
        }
        Command::Enroll { model, features, out: dest, subject } => {
            let m = load_model(&model)?;
            let windows = read_window_file(&features)?;
            let subject = subject.unwrap_or_else(|| stem(&features));
            let created = format!("enrolled from {}", features.display());
            let t = enroll(&m, &subject, &windows, m.threshold, &created).map_err(|e| CliError::from(e).at(&features))?;
            save_template(&dest, &t)?;
            writeln!(out, "subject={} windows={} tau={}", t.subject, t.gallery.len(), t.tau).map_err(stdout_err)
        }
        Command::Verify { model, template, features, continuous } => {
            let m = load_model(&model)?;
            let t = load_template(&template)?;
            let reader = FeatureReader::open(&features)?;
            check_window_header(&reader.header, &features)?;
            let mut smoother = ContinuousVerifier::default();
            for row in reader {
                let window = RawWindow::from_slice(&row?).map_err(|e| CliError::from(e).at(&features))?;
                let d = verify(&t, &window, &m).map_err(|e| CliError::from(e).at(&template))?;
                let word = |a: bool| if a { "accept" } else { "reject" };
                if continuous {
                    writeln!(out, "{} {} {}", word(d.accept), d.score, word(smoother.push(d.accept)))
                } else {
                    writeln!(out, "{} {}", word(d.accept), d.score)
                }
                .map_err(stdout_err)?;
            }
            Ok(())
        }
        Command::Evaluate { data, out: dest, pr_out } => {
            let subjects = dataset(&data, &cfg)?;
            let report = cross_validate(&subjects, &cfg.pipeline, &cfg.train, &cfg.eval)?;
            let text = format_report(&report);
            match dest {
                Some(p) => std::fs::write(&p, text).map_err(|e| CliError::io(&p, e))?,
                None => out.write_all(text.as_bytes()).map_err(stdout_err)?,
            }
            if let Some(p) = pr_out {
                std::fs::write(&p, format_pr(&report.pr_curve)).map_err(|e| CliError::io(&p, e))?;
            }
            Ok(())
        }
        Command::Attack { data, scenario, alpha } => {
            if let Some(a) = alpha {
                cfg.eval.deepfake_alpha = a;
                cfg.validate()?;
            }
            let subjects = dataset(&data, &cfg)?;
            let report = cross_validate(&subjects, &cfg.pipeline, &cfg.train, &cfg.eval)?;
            let a = &report.attacks;
            let (name, rate) = match scenario {
                Scenario::Mimic => ("mimic", a.mimic),
                Scenario::Static => ("static_photo", a.static_photo),
                Scenario::Deepfake => ("deepfake", a.deepfake),
            };
            let mut text = format!("scenario={name}\ncontrol={}\nsuccess_rate={rate}\n", a.control);
            format_attacks(&mut text, "attack.", a);
            out.write_all(text.as_bytes()).map_err(stdout_err)
        }
        Command::Synth { out: dest, subjects, windows } => {
            let n = subjects.unwrap_or(cfg.synth.subjects);
            let w = windows.unwrap_or(cfg.synth.windows);
            let list = synth_subjects(n, cfg.synth.seed)?;
            let frames = cfg.pipeline.window.frames_for(w) as u64;
            write_synth_dataset(&dest, &list, frames)?;
            writeln!(out, "subjects={n} frames={frames}").map_err(stdout_err)
        }
    }
}

fn stem(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    name.split('.').next().unwrap_or_default().to_string()
}

fn dataset(data: &DataArgs, cfg: &Config) -> Result<Vec<SubjectData>> {
    match &data.dataset {
        Some(root) => load_dataset(root, &cfg.pipeline),
        None => Ok(synth_dataset(cfg.synth.subjects, cfg.synth.windows, cfg.synth.seed, &cfg.pipeline)?),
    }
}

fn train(files: &[PathBuf], holdout: usize, cfg: &Config) -> Result<lipdyn_core::verifier::Model> {
    let mut names: Vec<String> = Vec::new();
    let (mut tw, mut tl, mut vw, mut vl) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for path in files {
        let name = stem(path);
        if names.contains(&name) {
            return Err(CliError::Usage(format!("two feature files for subject {name:?}")));
        }
        let windows = read_window_file(path)?;
        if windows.len() < holdout + 2 || holdout == 0 {
            return Err(CliError::from(lipdyn_core::Error::InsufficientData {
                subject: name,
                have: windows.len(),
                need: holdout.max(1) + 2,
            })
            .at(path));
        }
        let label = names.len();
        names.push(name);
        let cut = windows.len() - holdout;
        for (i, w) in windows.into_iter().enumerate() {
            if i < cut {
                tw.push(w);
                tl.push(label);
            } else {
                vw.push(w);
                vl.push(label);
            }
        }
    }
    if names.len() < 2 {
        return Err(CliError::Usage("training needs feature files of at least 2 subjects".into()));
    }
    Ok(fit_model(&tw, &tl, &vw, &vl, &cfg.train)?)
}

