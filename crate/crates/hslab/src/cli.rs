//! Command-line driver. [`run`] parses arguments, executes one subcommand
//! and maps the outcome to an exit code: 0 on success, 2 for usage and
//! configuration errors, 3 for data and contract errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hslab_core::mutual_info::{group_mean_activation, mutual_information, normalized_mi, MiConfig};
use hslab_core::neuron::{
    compute_rds, gic_from_accuracies, intervene, partition_neurons, random_removal_sweep,
    tau_sweep, GicReport, NeuronPartition, RdsMode, RemovalSize, DEFAULT_DEACTIVATION_VALUE,
    DEFAULT_RDS_EPSILON,
};
use hslab_core::probe::{evaluate, train_probe};
use hslab_core::seed::derive_seed;
use hslab_core::synthetic::{
    compositional_groups, gen_clusters, gen_compositional, gen_layer_series,
};
use hslab_core::{
    pair_by_id, split, LabeledMatrix, NeuronGroup, NeuronSet, PlantSpec, ProbeModel, SplitSpec,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{read_config, ProbeSection, RunConfig, ScdiSection};
use crate::error::{CliError, Result};
use crate::hsds::{read_hsds, write_hsds};
use crate::model_io::{load_model, save_model};
use crate::pipeline;
use crate::report::{self, num, write_csv, Envelope};
use crate::sweep::scdi_sweep;

#[derive(Debug, Parser)]
#[command(
    name = "hslab",
    version,
    about = "Layer decoupling metrics, probes and neuron-group interventions"
)]
pub struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// JSON report path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Optional CSV projection of the report.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Global seed; stage seeds are derived from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON configuration (required by `replicate`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Leave the generation time out of the report.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// S-CDI and its components for each layer file.
    Scdi {
        #[arg(long, num_args = 1.., required = true)]
        layers: Vec<PathBuf>,
        #[arg(long)]
        k_samples: Option<usize>,
    },
    /// Split a layer file, train a probe and save it.
    ProbeTrain {
        #[arg(long)]
        data: PathBuf,
        /// Where to write the trained probe.
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0.7)]
        train_fraction: f64,
        /// Also write the held-out rows as HSDS.
        #[arg(long)]
        test_out: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        hidden_dim: Option<usize>,
    },
    /// Evaluate a saved probe on a layer file.
    ProbeEval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Dominance scores and the three-way neuron partition.
    Rds {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = DEFAULT_RDS_EPSILON)]
        epsilon: f64,
        /// Use raw signed activations instead of magnitudes.
        #[arg(long)]
        signed: bool,
    },
    /// Deactivate one neuron set and re-evaluate a saved probe.
    Intervene {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Explicit indices, e.g. `0,3,8-11`.
        #[arg(long, value_parser = parse_indices, conflicts_with = "group", required_unless_present = "group")]
        neurons: Option<NeuronSet>,
        /// RDS group computed from the data's own pairs at `--tau`.
        #[arg(long, value_parser = parse_group)]
        group: Option<NeuronGroup>,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value_t = DEFAULT_DEACTIVATION_VALUE, allow_negative_numbers = true)]
        deactivation_value: f32,
    },
    /// Group impact coefficient from saved accuracy reports.
    Gic {
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        individual: Vec<PathBuf>,
        #[arg(long)]
        union: PathBuf,
    },
    /// Normalized mutual information between group mean activations.
    Mi {
        #[arg(long)]
        data: PathBuf,
        /// `NAME=INDICES`, given at least twice.
        #[arg(long = "group", value_parser = parse_named_group, required = true, num_args = 1)]
        groups: Vec<(String, NeuronSet)>,
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Interventions for every RDS group across a grid of τ values.
    TauSweep {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5])]
        tau: Vec<f64>,
        /// Long-format CSV of accuracy drops.
        #[arg(long)]
        heatmap: Option<PathBuf>,
        #[arg(long)]
        signed: bool,
        #[arg(long, default_value_t = DEFAULT_DEACTIVATION_VALUE, allow_negative_numbers = true)]
        deactivation_value: f32,
    },
    /// Mean metrics after deactivating random neuron sets, per layer.
    RandomRemoval {
        /// Probe per layer, paired with `--data` in order.
        #[arg(long, num_args = 1.., required = true)]
        model: Vec<PathBuf>,
        #[arg(long, num_args = 1.., required = true)]
        data: Vec<PathBuf>,
        #[arg(long, conflicts_with = "count")]
        fraction: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_DEACTIVATION_VALUE, allow_negative_numbers = true)]
        deactivation_value: f32,
    },
    /// Generate planted synthetic layer files plus a ground-truth sidecar.
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<SynthKind>,
        /// Requested S-CDI rank per layer (series only).
        #[arg(long, value_delimiter = ',')]
        ranks: Option<Vec<usize>>,
    },
    /// The whole pipeline from a `--config` file.
    Replicate {
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        k_samples: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        deactivation_value: Option<f32>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    Clusters,
    Compositional,
    #[default]
    Series,
}

/// `synth --config` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub kind: SynthKind,
    pub plant: PlantSpec,
    pub ranks: Vec<usize>,
    pub offset_step: f64,
    /// τ written into the generated `run.json`.
    pub tau: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            kind: SynthKind::Series,
            plant: PlantSpec {
                m_rows: 2000,
                d_dims: 64,
                class_gap: 6.0,
                planted_center: DEFAULT_DEACTIVATION_VALUE.into(),
                signal_idx: (0..16).collect(),
                compositional: true,
                ..PlantSpec::default()
            },
            ranks: vec![1, 3, 0, 4, 2],
            offset_step: 2.0,
            tau: 1.0,
        }
    }
}

/// Parses `0,3,8-11` into a neuron set.
pub fn parse_indices(s: &str) -> std::result::Result<NeuronSet, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || format!("invalid index or range {part:?}");
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (
                    a.trim().parse().map_err(|_| bad())?,
                    b.trim().parse().map_err(|_| bad())?,
                );
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out.into())
}

fn parse_named_group(s: &str) -> std::result::Result<(String, NeuronSet), String> {
    let (name, idx) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=INDICES, got {s:?}"))?;
    Ok((name.to_string(), parse_indices(idx)?))
}

fn parse_group(s: &str) -> std::result::Result<NeuronGroup, String> {
    NeuronGroup::from_name(s)
        .ok_or_else(|| format!("expected RegretD, Non-RegretD or DualD, got {s:?}"))
}

struct Output<'a> {
    global: &'a GlobalArgs,
    command: &'a str,
}

impl Output<'_> {
    fn json<T: Serialize>(&self, result: &T) -> Result<()> {
        let text = Envelope::new(self.command, result, !self.global.no_timestamp).to_json();
        match &self.global.out {
            Some(p) => report::write_text(p, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn csv(&self, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        match &self.global.csv {
            Some(p) => write_csv(p, header, rows),
            None => Ok(()),
        }
    }
}

fn load(path: &Path) -> Result<LabeledMatrix> {
    read_hsds(path).map_err(|e| CliError::from(e).at(path))
}

fn load_probe(path: &Path) -> Result<ProbeModel> {
    load_model(path).map_err(|e| CliError::from(e).at(path))
}

fn no_config(global: &GlobalArgs, command: &str) -> Result<()> {
    match &global.config {
        Some(_) => Err(CliError::Usage(format!("{command} does not take --config"))),
        None => Ok(()),
    }
}

fn rds_mode(signed: bool) -> RdsMode {
    if signed {
        RdsMode::Signed
    } else {
        RdsMode::Absolute
    }
}

fn partition_from_pairs(
    data: &LabeledMatrix,
    epsilon: f64,
    mode: RdsMode,
    tau: f64,
) -> Result<(hslab_core::RdsScores, NeuronPartition)> {
    let scores = compute_rds(&pair_by_id(data)?, epsilon, mode)?;
    let partition = partition_neurons(&scores, tau)?;
    Ok((scores, partition))
}

/// Pulls an accuracy out of a saved report: a bare number, an object with
/// `accuracy`, or either of those nested under the keys our own reports
/// use (`result`, `intervention`, `report`, `test`).
fn accuracy_of(v: &serde_json::Value) -> Option<f64> {
    match v {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::Object(map) => map
            .get("accuracy")
            .and_then(serde_json::Value::as_f64)
            .or_else(|| {
                ["result", "intervention", "report", "test"]
                    .iter()
                    .find_map(|k| map.get(*k).and_then(accuracy_of))
            }),
        _ => None,
    }
}

fn read_accuracy(path: &Path) -> Result<f64> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })?;
    accuracy_of(&value).ok_or_else(|| CliError::InvalidReport {
        path: path.to_path_buf(),
        message: "no accuracy value found".into(),
    })
}

fn eval_row(r: &hslab_core::EvalReport) -> Vec<String> {
    vec![
        num(r.accuracy),
        num(r.sensitivity),
        num(r.specificity),
        num(r.precision),
        num(r.f1),
        r.confusion.tp.to_string(),
        r.confusion.fp.to_string(),
        r.confusion.tn.to_string(),
        r.confusion.fn_.to_string(),
    ]
}

const EVAL_HEADER: [&str; 9] = [
    "accuracy",
    "sensitivity",
    "specificity",
    "precision",
    "f1",
    "TP",
    "FP",
    "TN",
    "FN",
];

fn execute(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let seed = g.seed;
    match cli.command {
        Command::Scdi { layers, k_samples } => {
            let out = Output {
                global: g,
                command: "scdi",
            };
            let mut section: ScdiSection = match &g.config {
                Some(p) => read_config(p)?,
                None => ScdiSection::default(),
            };
            if let Some(k) = k_samples {
                section.k_samples = k;
            }
            let cfg = section.with_seed(derive_seed(seed.unwrap_or(0), "scdi"));
            cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let reports = scdi_sweep(&layers, &cfg)?;
            out.csv(&report::SCDI_HEADER, report::scdi_rows(&reports))?;
            out.json(&json!({ "config": cfg, "layers": reports }))
        }
        Command::ProbeTrain {
            data,
            model,
            train_fraction,
            test_out,
            epochs,
            hidden_dim,
        } => {
            let out = Output {
                global: g,
                command: "probe-train",
            };
            let section: ProbeSection = match &g.config {
                Some(p) => read_config(p)?,
                None => ProbeSection::default(),
            };
            let root = seed.unwrap_or(0);
            let mut cfg = section.with_seed(derive_seed(root, "probe"));
            if let Some(e) = epochs {
                cfg.epochs = e;
            }
            if hidden_dim.is_some() {
                cfg.hidden_dim = hidden_dim;
            }
            let spec = SplitSpec {
                train_fraction,
                seed: derive_seed(root, "split"),
                balanced: true,
            };
            cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            spec.validate()
                .map_err(|e| CliError::Usage(e.to_string()))?;

            let m = load(&data)?;
            let (train, test) = split(&m, &spec).map_err(|e| CliError::from(e).at(&data))?;
            let initial_loss = ProbeModel::init(train.cols(), cfg)?.mean_loss(&train)?;
            let probe = train_probe(&train, &cfg)?;
            let final_loss = probe.mean_loss(&train)?;
            let eval = evaluate(&probe, &test)?;
            save_model(&probe, &model).map_err(|e| CliError::from(e).at(&model))?;
            if let Some(p) = &test_out {
                write_hsds(&test, p).map_err(|e| CliError::from(e).at(p))?;
            }
            out.csv(&EVAL_HEADER, [eval_row(&eval)])?;
            out.json(&json!({
                "seed": root,
                "config": cfg,
                "split": spec,
                "train_rows": train.rows(),
                "test_rows": test.rows(),
                "initial_train_loss": initial_loss,
                "final_train_loss": final_loss,
                "test": eval,
            }))
        }
        Command::ProbeEval { model, data } => {
            no_config(g, "probe-eval")?;
            let out = Output {
                global: g,
                command: "probe-eval",
            };
            let probe = load_probe(&model)?;
            let eval = evaluate(&probe, &load(&data)?).map_err(|e| CliError::from(e).at(&data))?;
            out.csv(&EVAL_HEADER, [eval_row(&eval)])?;
            out.json(&eval)
        }
        Command::Rds {
            data,
            tau,
            epsilon,
            signed,
        } => {
            no_config(g, "rds")?;
            let out = Output {
                global: g,
                command: "rds",
            };
            let m = load(&data)?;
            let pairs = pair_by_id(&m).map_err(|e| CliError::from(e).at(&data))?;
            let scores = compute_rds(&pairs, epsilon, rds_mode(signed))?;
            let partition =
                partition_neurons(&scores, tau).map_err(|e| CliError::Usage(e.to_string()))?;
            let group_of = |j: usize| {
                NeuronGroup::ALL
                    .into_iter()
                    .find(|&gr| partition.group(gr).contains(j))
                    .map_or("", NeuronGroup::name)
            };
            out.csv(
                &["neuron", "score", "group"],
                scores
                    .scores
                    .iter()
                    .enumerate()
                    .map(|(j, s)| vec![j.to_string(), num(*s), group_of(j).to_string()]),
            )?;
            out.json(&json!({
                "pairs": pairs.rows(),
                "diagnostics": pairs.diagnostics,
                "scores": scores,
                "partition": partition,
            }))
        }
        Command::Intervene {
            model,
            data,
            neurons,
            group,
            tau,
            name,
            deactivation_value,
        } => {
            no_config(g, "intervene")?;
            let out = Output {
                global: g,
                command: "intervene",
            };
            let probe = load_probe(&model)?;
            let m = load(&data)?;
            let (set, default_name) = match (neurons, group) {
                (Some(set), _) => (set, "custom".to_string()),
                (None, Some(gr)) => {
                    let (_, p) =
                        partition_from_pairs(&m, DEFAULT_RDS_EPSILON, RdsMode::Absolute, tau)?;
                    (p.group(gr).clone(), gr.name().to_string())
                }
                (None, None) => unreachable!("clap requires one of --neurons/--group"),
            };
            let baseline = evaluate(&probe, &m)?;
            let result = intervene(
                &probe,
                &m,
                name.as_deref().unwrap_or(&default_name),
                &set,
                &baseline,
                deactivation_value,
            )?;
            out.csv(
                &report::INTERVENTION_HEADER,
                [report::result_row(None, &result, None)],
            )?;
            out.json(&json!({ "neurons": set, "intervention": result }))
        }
        Command::Gic {
            baseline,
            individual,
            union,
        } => {
            no_config(g, "gic")?;
            let out = Output {
                global: g,
                command: "gic",
            };
            let base = read_accuracy(&baseline)?;
            let accs = individual
                .iter()
                .map(|p| read_accuracy(p))
                .collect::<Result<Vec<_>>>()?;
            let u = read_accuracy(&union)?;
            let value = gic_from_accuracies(base, &accs, u)?;
            let report = GicReport {
                groups: individual.iter().map(|p| p.display().to_string()).collect(),
                baseline_accuracy: base,
                union_accuracy: u,
                individual_accuracies: accs,
                gic: value,
            };
            out.json(&report)
        }
        Command::Mi { data, groups, bins } => {
            no_config(g, "mi")?;
            let out = Output {
                global: g,
                command: "mi",
            };
            if groups.len() < 2 {
                return Err(CliError::Usage(
                    "mi needs at least two --group values".into(),
                ));
            }
            let cfg = MiConfig {
                bins: bins.unwrap_or(MiConfig::default().bins),
            };
            cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let m = load(&data)?;
            let means = groups
                .iter()
                .map(|(_, s)| group_mean_activation(&m, s))
                .collect::<hslab_core::Result<Vec<_>>>()?;
            let mut rows = Vec::new();
            for i in 0..groups.len() {
                for j in i + 1..groups.len() {
                    let est = mutual_information(&means[i], &means[j], &cfg)?;
                    rows.push(json!({
                        "group_a": groups[i].0,
                        "group_b": groups[j].0,
                        "normalized_mi": normalized_mi(&means[i], &means[j], &cfg).ok(),
                        "mutual_information": est.mutual_information,
                        "entropy_a": est.entropy_a,
                        "entropy_b": est.entropy_b,
                    }));
                }
            }
            out.csv(
                &["group_a", "group_b", "normalized_mi"],
                rows.iter().map(|r| {
                    vec![
                        r["group_a"].as_str().unwrap_or_default().to_string(),
                        r["group_b"].as_str().unwrap_or_default().to_string(),
                        r["normalized_mi"].as_f64().map(num).unwrap_or_default(),
                    ]
                }),
            )?;
            out.json(&json!({ "bins": cfg.bins, "pairs": rows }))
        }
        Command::TauSweep {
            model,
            data,
            tau,
            heatmap,
            signed,
            deactivation_value,
        } => {
            no_config(g, "tau-sweep")?;
            let out = Output {
                global: g,
                command: "tau-sweep",
            };
            if let Some(t) = tau.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
                return Err(CliError::Usage(format!(
                    "tau values must be positive, got {t}"
                )));
            }
            let probe = load_probe(&model)?;
            let m = load(&data)?;
            let scores = compute_rds(&pair_by_id(&m)?, DEFAULT_RDS_EPSILON, rds_mode(signed))?;
            let sweep = tau_sweep(
                &scores,
                &probe,
                &m,
                &tau,
                derive_seed(seed.unwrap_or(0), "tau-sweep"),
                deactivation_value,
            )?;
            out.csv(&report::INTERVENTION_HEADER, report::sweep_rows(&sweep))?;
            if let Some(p) = &heatmap {
                write_csv(p, &report::HEATMAP_HEADER, report::heatmap_rows(&sweep))?;
            }
            out.json(&json!({ "scores": scores, "sweep": sweep }))
        }
        Command::RandomRemoval {
            model,
            data,
            fraction,
            count,
            trials,
            deactivation_value,
        } => {
            no_config(g, "random-removal")?;
            let out = Output {
                global: g,
                command: "random-removal",
            };
            if model.len() != data.len() {
                return Err(CliError::Usage(format!(
                    "got {} --model files but {} --data files",
                    model.len(),
                    data.len()
                )));
            }
            let size = match (fraction, count) {
                (_, Some(c)) => RemovalSize::Count(c),
                (Some(f), None) => RemovalSize::Fraction(f),
                (None, None) => RemovalSize::default(),
            };
            let probes = model
                .iter()
                .map(|p| load_probe(p))
                .collect::<Result<Vec<_>>>()?;
            let sets = data.iter().map(|p| load(p)).collect::<Result<Vec<_>>>()?;
            let layers: Vec<(&ProbeModel, &LabeledMatrix)> = probes.iter().zip(&sets).collect();
            let reports = random_removal_sweep(
                &layers,
                size,
                trials,
                derive_seed(seed.unwrap_or(0), "removal"),
                deactivation_value,
            )?;
            out.csv(&report::REMOVAL_HEADER, report::removal_rows(&reports))?;
            out.json(&json!({ "size": size, "layers": reports }))
        }
        Command::Synth {
            out_dir,
            kind,
            ranks,
        } => {
            let out = Output {
                global: g,
                command: "synth",
            };
            let mut cfg: SynthConfig = match &g.config {
                Some(p) => read_config(p)?,
                None => SynthConfig::default(),
            };
            if let Some(k) = kind {
                cfg.kind = k;
            }
            if let Some(r) = ranks {
                cfg.ranks = r;
            }
            if let Some(s) = seed {
                cfg.plant.seed = s;
            }
            cfg.plant
                .validate()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let summary = synthesize(&out_dir, &cfg)?;
            out.json(&summary)
        }
        Command::Replicate {
            tau,
            bins,
            k_samples,
            deactivation_value,
        } => {
            let out = Output {
                global: g,
                command: "replicate",
            };
            let path = g
                .config
                .as_ref()
                .ok_or_else(|| CliError::Usage("replicate requires --config".into()))?;
            let mut cfg = RunConfig::load(path)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = tau {
                cfg.tau = t;
            }
            if let Some(b) = bins {
                cfg.mi.bins = b;
            }
            if let Some(k) = k_samples {
                cfg.scdi.k_samples = k;
            }
            if let Some(v) = deactivation_value {
                cfg.deactivation_value = v;
            }
            cfg.validate().map_err(|message| CliError::Config {
                path: path.clone(),
                message,
            })?;
            let result = pipeline::replicate(&cfg)?;
            out.csv(&pipeline::CSV_HEADER, pipeline::intervention_rows(&result))?;
            out.json(&result)
        }
    }
}

fn synthesize(dir: &Path, cfg: &SynthConfig) -> Result<serde_json::Value> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let write = |m: &LabeledMatrix, name: &str| -> Result<String> {
        let p = dir.join(name);
        write_hsds(m, &p).map_err(|e| CliError::from(e).at(&p))?;
        Ok(name.to_string())
    };
    let spec = &cfg.plant;
    let (files, truth, run) = match cfg.kind {
        SynthKind::Clusters => {
            let name = write(&gen_clusters(spec)?, "clusters.hsds")?;
            let truth = json!({ "kind": "clusters", "plant": spec, "planted_columns": spec.planted_columns()? });
            (vec![name], truth, None)
        }
        SynthKind::Compositional => {
            let (a, b) = compositional_groups(spec)?;
            let name = write(&gen_compositional(spec, &a, &b)?, "compositional.hsds")?;
            let truth =
                json!({ "kind": "compositional", "plant": spec, "group_a": a, "group_b": b });
            let run =
                json!({ "layers": [name.clone()], "tau": cfg.tau, "groups": { "A": a, "B": b } });
            (vec![name], truth, Some(run))
        }
        SynthKind::Series => {
            if cfg.ranks.is_empty() {
                return Err(CliError::Usage("series needs at least one rank".into()));
            }
            let (layers, truth) = gen_layer_series(&cfg.ranks, spec, cfg.offset_step)?;
            let names = layers
                .iter()
                .enumerate()
                .map(|(l, m)| write(m, &format!("layer_{l:02}.hsds")))
                .collect::<Result<Vec<_>>>()?;
            let mut run = json!({ "layers": names, "tau": cfg.tau });
            if let (Some(a), Some(b)) = (&truth.group_a, &truth.group_b) {
                run["groups"] = json!({ "A": a, "B": b });
            }
            let truth = json!({ "kind": "series", "plant": spec, "offset_step": cfg.offset_step, "truth": truth });
            (names, truth, Some(run))
        }
    };
    let dump = |name: &str, v: &serde_json::Value| {
        let mut text = serde_json::to_string_pretty(v).expect("json serializes");
        text.push('\n');
        report::write_text(&dir.join(name), &text)
    };
    dump("truth.json", &truth)?;
    if let Some(run) = &run {
        dump("run.json", run)?;
    }
    Ok(json!({
        "out_dir": dir.display().to_string(),
        "files": files,
        "truth": "truth.json",
        "run_config": run.as_ref().map(|_| "run.json"),
    }))
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("HSLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "HSLAB_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    // A pool that already exists (repeated in-process runs) is kept.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match configure_threads().and_then(|()| execute(cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("hslab: {}: {e}", e.name());
            e.exit_code()
        }
    }
}
