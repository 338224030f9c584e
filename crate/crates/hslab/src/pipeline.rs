//! The end-to-end run: S-CDI sweep, layer selection, probing, RDS groups,
//! interventions and mutual information, consolidated into one report.

use std::collections::BTreeMap;

use hslab_core::mutual_info::{group_mean_activation, normalized_mi};
use hslab_core::neuron::{
    compute_rds, gic, group_interventions, intervene, partition_neurons, random_group,
    random_removal, tau_sweep, GicReport, GroupInterventions, InterventionResult, RemovalReport,
    TauSweep,
};
use hslab_core::probe::{evaluate, train_probe};
use hslab_core::seed::{self, derive_indexed, derive_seed};
use hslab_core::{pair_by_id, split, EvalReport, NeuronGroup, NeuronSet, ProbeModel, RdsScores};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result, StageExt};
use crate::report::{self, INTERVENTION_HEADER};
use crate::sweep::{argmin_layer, load_layers, score_layers, Layer, LayerReport};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSummary {
    pub train_rows: usize,
    pub test_rows: usize,
    pub baseline: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CustomGroups {
    pub singles: Vec<InterventionResult>,
    pub pairs: Vec<(InterventionResult, GicReport)>,
    pub random_controls: Vec<InterventionResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiRow {
    pub group_a: String,
    pub group_b: String,
    /// Absent when either group is empty or has constant mean activation.
    pub normalized_mi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateReport {
    pub seed: u64,
    pub tau: f64,
    pub deactivation_value: f32,
    pub layers: Vec<LayerReport>,
    pub selected_layer: usize,
    pub probe: ProbeSummary,
    pub random_removal: Vec<RemovalReport>,
    pub rds: RdsScores,
    pub interventions: GroupInterventions,
    pub custom_groups: Option<CustomGroups>,
    pub mi_bins: usize,
    pub mutual_information: Vec<MiRow>,
    pub tau_sweep: Option<TauSweep>,
}

struct LayerProbe {
    model: ProbeModel,
    train_rows: usize,
    test: hslab_core::LabeledMatrix,
}

fn fit_layer(layer: &Layer, cfg: &RunConfig) -> Result<LayerProbe> {
    let l = layer.index as u64;
    let spec = cfg.split.with_seed(derive_indexed(cfg.seed, "split", l));
    let (train, test) = split(&layer.data, &spec).map_err(|e| CliError::from(e).at(&layer.path))?;
    let probe_cfg = cfg.probe.with_seed(derive_indexed(cfg.seed, "probe", l));
    let model = train_probe(&train, &probe_cfg).map_err(|e| CliError::from(e).at(&layer.path))?;
    Ok(LayerProbe {
        model,
        train_rows: train.rows(),
        test,
    })
}

fn custom_groups(
    groups: &BTreeMap<String, NeuronSet>,
    model: &ProbeModel,
    test: &hslab_core::LabeledMatrix,
    baseline: &EvalReport,
    cfg: &RunConfig,
) -> Result<CustomGroups> {
    let value = cfg.deactivation_value;
    let singles = groups
        .iter()
        .map(|(name, set)| intervene(model, test, name, set, baseline, value))
        .collect::<hslab_core::Result<Vec<_>>>()?;
    let mut rng = seed::rng(derive_seed(cfg.seed, "custom-controls"));
    let mut pairs = Vec::new();
    let mut random_controls = Vec::new();
    let named: Vec<(&String, &NeuronSet)> = groups.iter().collect();
    for i in 0..named.len() {
        for j in i + 1..named.len() {
            let union = named[i].1.union(named[j].1);
            let name = format!("{}+{}", named[i].0, named[j].0);
            let joint = intervene(model, test, &name, &union, baseline, value)?;
            let g = gic(
                baseline.accuracy,
                &[singles[i].clone(), singles[j].clone()],
                &joint,
            )?;
            pairs.push((joint, g));
            let control = random_group(test.cols(), union.len(), &mut rng)?;
            let control_name = format!("Random[{name}]");
            random_controls.push(intervene(
                model,
                test,
                &control_name,
                &control,
                baseline,
                value,
            )?);
        }
    }
    Ok(CustomGroups {
        singles,
        pairs,
        random_controls,
    })
}

fn mi_table(
    data: &hslab_core::LabeledMatrix,
    groups: &[(String, NeuronSet)],
    cfg: &RunConfig,
) -> Vec<MiRow> {
    let means: Vec<hslab_core::Result<Vec<f64>>> = groups
        .iter()
        .map(|(_, set)| group_mean_activation(data, set))
        .collect();
    let mut rows = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            let value = match (&means[i], &means[j]) {
                (Ok(a), Ok(b)) => normalized_mi(a, b, &cfg.mi),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            };
            rows.push(MiRow {
                group_a: groups[i].0.clone(),
                group_b: groups[j].0.clone(),
                normalized_mi: value.as_ref().ok().copied(),
                error: value.err().map(|e| e.name()),
            });
        }
    }
    rows
}

/// Runs every stage. Seeds for each stage derive from `cfg.seed`, so one
/// number reproduces the whole report.
pub fn replicate(cfg: &RunConfig) -> Result<ReplicateReport> {
    cfg.validate()
        .map_err(|message| CliError::Usage(format!("config: {message}")))?;

    let layers = load_layers(&cfg.layers).stage("load")?;
    let scdi_cfg = cfg.scdi.with_seed(derive_seed(cfg.seed, "scdi"));
    let layer_reports = score_layers(&layers, &scdi_cfg).stage("scdi")?;
    let selected = argmin_layer(&layer_reports).expect("at least one layer");

    let probes: Vec<LayerProbe> = layers
        .par_iter()
        .map(|l| fit_layer(l, cfg))
        .collect::<Result<_>>()
        .stage("probe")?;

    let removal = layers
        .par_iter()
        .zip(&probes)
        .map(|(l, p)| {
            random_removal(
                l.index,
                &p.model,
                &p.test,
                cfg.removal.size,
                cfg.removal.trials,
                derive_seed(cfg.seed, "removal"),
                cfg.deactivation_value,
            )
        })
        .collect::<hslab_core::Result<Vec<_>>>()
        .stage("random-removal")?;

    let layer = &layers[selected];
    let LayerProbe {
        model,
        train_rows,
        test,
    } = &probes[selected];
    let baseline = evaluate(model, test).stage("probe")?;

    let pairs = pair_by_id(&layer.data)
        .map_err(|e| CliError::from(e).at(&layer.path))
        .stage("rds")?;
    let scores = compute_rds(&pairs, cfg.rds.epsilon, cfg.rds.mode).stage("rds")?;
    let partition = partition_neurons(&scores, cfg.tau).stage("rds")?;

    let mut control_rng = seed::rng(derive_seed(cfg.seed, "controls"));
    let interventions = group_interventions(
        &partition,
        model,
        test,
        &baseline,
        &mut control_rng,
        cfg.deactivation_value,
    )
    .stage("interventions")?;

    for (name, set) in &cfg.groups {
        set.check_bounds(test.cols())
            .map_err(|e| CliError::Usage(format!("group {name:?}: {e}")))?;
    }
    let custom = if cfg.groups.is_empty() {
        None
    } else {
        Some(custom_groups(&cfg.groups, model, test, &baseline, cfg).stage("groups")?)
    };

    let mut mi_groups: Vec<(String, NeuronSet)> = NeuronGroup::ALL
        .iter()
        .map(|&g| (g.name().to_string(), partition.group(g).clone()))
        .collect();
    mi_groups.extend(cfg.groups.iter().map(|(n, s)| (n.clone(), s.clone())));
    let mutual_information = mi_table(&layer.data, &mi_groups, cfg);

    let sweep = if cfg.tau_grid.is_empty() {
        None
    } else {
        Some(
            tau_sweep(
                &scores,
                model,
                test,
                &cfg.tau_grid,
                derive_seed(cfg.seed, "tau-sweep"),
                cfg.deactivation_value,
            )
            .stage("tau-sweep")?,
        )
    };

    Ok(ReplicateReport {
        seed: cfg.seed,
        tau: cfg.tau,
        deactivation_value: cfg.deactivation_value,
        layers: layer_reports,
        selected_layer: layer.index,
        probe: ProbeSummary {
            train_rows: *train_rows,
            test_rows: test.rows(),
            baseline,
        },
        random_removal: removal,
        rds: scores,
        interventions,
        custom_groups: custom,
        mi_bins: cfg.mi.bins,
        mutual_information,
        tau_sweep: sweep,
    })
}

// A lone group's coefficient reduces to its accuracy ratio.
fn single_row(tau: Option<f64>, s: &InterventionResult) -> Vec<String> {
    let ratio = s.report.accuracy / s.baseline.accuracy;
    report::result_row(tau, s, ratio.is_finite().then_some(ratio))
}

/// Every evaluated deactivation as one table: the RDS groups and their
/// controls at the configured τ, the configured groups, then the sweep.
pub fn intervention_rows(r: &ReplicateReport) -> Vec<Vec<String>> {
    let tau = Some(r.tau);
    let i = &r.interventions;
    let mut rows: Vec<Vec<String>> = Vec::new();
    rows.extend(i.singles.iter().map(|s| single_row(tau, s)));
    rows.extend(
        i.pairs
            .iter()
            .map(|(u, g)| report::result_row(tau, u, Some(g.gic))),
    );
    rows.extend(
        i.random_controls
            .iter()
            .map(|c| report::result_row(tau, c, None)),
    );
    if let Some(c) = &r.custom_groups {
        rows.extend(c.singles.iter().map(|s| single_row(None, s)));
        rows.extend(
            c.pairs
                .iter()
                .map(|(u, g)| report::result_row(None, u, Some(g.gic))),
        );
        rows.extend(
            c.random_controls
                .iter()
                .map(|s| report::result_row(None, s, None)),
        );
    }
    if let Some(s) = &r.tau_sweep {
        rows.extend(report::sweep_rows(s));
    }
    rows
}

pub const CSV_HEADER: [&str; 9] = INTERVENTION_HEADER;
