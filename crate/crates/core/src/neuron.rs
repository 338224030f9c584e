//! Regret dominance scores, neuron grouping and deactivation experiments.
//!
//! Neurons are scored by the share of activation mass they carry on regret
//! rows relative to the paired non-regret rows, then split at `μ ± τσ` into
//! `RegretD`, `Non-RegretD` and `DualD`. Group importance is measured by
//! overwriting a group's activations (with −1 by default) in the evaluation
//! data and re-scoring the already trained probe; the probe is never
//! retrained.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::PairedActivations;
use crate::error::{Error, Result};
use crate::matrix::{LabeledMatrix, NeuronSet};
use crate::probe::{evaluate, EvalReport, ProbeModel};
use crate::seed::{self, Rng};

/// Value written into deactivated neurons unless configured otherwise.
pub const DEFAULT_DEACTIVATION_VALUE: f32 = -1.0;
pub const DEFAULT_RDS_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RdsMode {
    /// `|z_r| / (|z_r| + |z_n| + ε)`, always in `[0, 1)`.
    #[default]
    Absolute,
    /// `z_r / (z_r + z_n + ε)` on raw signed activations; unbounded.
    Signed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdsScores {
    pub scores: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub epsilon: f64,
    pub mode: RdsMode,
}

impl RdsScores {
    /// Wraps precomputed scores, deriving mean and population std.
    pub fn from_scores(scores: Vec<f64>, epsilon: f64, mode: RdsMode) -> Self {
        let (mean, std) = mean_std(&scores);
        Self {
            scores,
            mean,
            std,
            epsilon,
            mode,
        }
    }
}

/// Mean and population standard deviation, shifted by the first element so
/// that identical inputs give exactly that value and zero spread.
fn mean_std(x: &[f64]) -> (f64, f64) {
    let Some(&x0) = x.first() else {
        return (0.0, 0.0);
    };
    let n = x.len() as f64;
    let shift = x.iter().map(|v| v - x0).sum::<f64>() / n;
    let var = x
        .iter()
        .map(|v| (v - x0 - shift) * (v - x0 - shift))
        .sum::<f64>()
        / n;
    (x0 + shift, libm::sqrt(var))
}

/// Per-neuron mean dominance ratio over paired rows.
pub fn compute_rds(pa: &PairedActivations, epsilon: f64, mode: RdsMode) -> Result<RdsScores> {
    let (r, n) = (&pa.regret, &pa.non_regret);
    if r.rows() != n.rows() || r.cols() != n.cols() {
        return Err(Error::ShapeMismatch {
            expected: r.rows() * r.cols(),
            found: n.rows() * n.cols(),
        });
    }
    let mut sums = alloc::vec![0.0f64; r.cols()];
    for (rr, nr) in r.iter_rows().zip(n.iter_rows()) {
        for ((s, &a), &b) in sums.iter_mut().zip(rr).zip(nr) {
            let (a, b) = (f64::from(a), f64::from(b));
            *s += match mode {
                RdsMode::Absolute => {
                    let (a, b) = (libm::fabs(a), libm::fabs(b));
                    a / (a + b + epsilon)
                }
                RdsMode::Signed => a / (a + b + epsilon),
            };
        }
    }
    let m = r.rows() as f64;
    let scores = sums.into_iter().map(|s| s / m).collect();
    Ok(RdsScores::from_scores(scores, epsilon, mode))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NeuronGroup {
    #[serde(rename = "RegretD")]
    Regret,
    #[serde(rename = "Non-RegretD")]
    NonRegret,
    #[serde(rename = "DualD")]
    Dual,
}

impl NeuronGroup {
    pub const ALL: [NeuronGroup; 3] = [
        NeuronGroup::Regret,
        NeuronGroup::NonRegret,
        NeuronGroup::Dual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NeuronGroup::Regret => "RegretD",
            NeuronGroup::NonRegret => "Non-RegretD",
            NeuronGroup::Dual => "DualD",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronPartition {
    pub regret_d: NeuronSet,
    pub non_regret_d: NeuronSet,
    pub dual_d: NeuronSet,
    pub tau: f64,
    /// Scores strictly above this go to `RegretD`.
    pub upper: f64,
    /// Scores strictly below this go to `Non-RegretD`.
    pub lower: f64,
}

impl NeuronPartition {
    pub fn group(&self, g: NeuronGroup) -> &NeuronSet {
        match g {
            NeuronGroup::Regret => &self.regret_d,
            NeuronGroup::NonRegret => &self.non_regret_d,
            NeuronGroup::Dual => &self.dual_d,
        }
    }

    pub fn dim(&self) -> usize {
        self.regret_d.len() + self.non_regret_d.len() + self.dual_d.len()
    }
}

/// Thresholds scores at `μ ± τσ` with strict inequalities; boundary scores
/// land in `DualD`.
pub fn partition_neurons(scores: &RdsScores, tau: f64) -> Result<NeuronPartition> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "tau must be positive, got {tau}"
        )));
    }
    let spread = tau * scores.std;
    let upper = scores.mean + spread;
    let lower = scores.mean - spread;
    let (mut regret, mut non_regret, mut dual) = (Vec::new(), Vec::new(), Vec::new());
    for (k, &s) in scores.scores.iter().enumerate() {
        if s > upper {
            regret.push(k);
        } else if s < lower {
            non_regret.push(k);
        } else {
            dual.push(k);
        }
    }
    Ok(NeuronPartition {
        regret_d: regret.into(),
        non_regret_d: non_regret.into(),
        dual_d: dual.into(),
        tau,
        upper,
        lower,
    })
}

/// Copy of `m` with every column in `set` overwritten by `value`.
pub fn deactivate(m: &LabeledMatrix, set: &NeuronSet, value: f32) -> Result<LabeledMatrix> {
    set.check_bounds(m.cols())?;
    let mut out = m.clone();
    let cols = out.cols();
    for row in out.data_mut().as_mut_slice().chunks_exact_mut(cols) {
        for j in set.iter() {
            row[j] = value;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterventionResult {
    pub group_name: String,
    pub group_size: usize,
    pub report: EvalReport,
    pub baseline: EvalReport,
}

impl InterventionResult {
    pub fn accuracy_drop(&self) -> f64 {
        self.baseline.accuracy - self.report.accuracy
    }
}

/// Evaluates the trained probe on `test` with `set` deactivated.
pub fn intervene(
    model: &ProbeModel,
    test: &LabeledMatrix,
    group_name: &str,
    set: &NeuronSet,
    baseline: &EvalReport,
    value: f32,
) -> Result<InterventionResult> {
    let report = if set.is_empty() {
        evaluate(model, test)?
    } else {
        evaluate(model, &deactivate(test, set, value)?)?
    };
    Ok(InterventionResult {
        group_name: group_name.to_string(),
        group_size: set.len(),
        report,
        baseline: *baseline,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GicReport {
    pub groups: Vec<String>,
    pub baseline_accuracy: f64,
    pub union_accuracy: f64,
    pub individual_accuracies: Vec<f64>,
    pub gic: f64,
}

impl GicReport {
    /// Recomputes the coefficient from the stored accuracies.
    pub fn recompute(&self) -> Result<f64> {
        gic_from_accuracies(
            self.baseline_accuracy,
            &self.individual_accuracies,
            self.union_accuracy,
        )
    }
}

/// Group impact coefficient from raw accuracies.
///
/// One group: `union / baseline`. Several groups: `union / mean(individual)`.
pub fn gic_from_accuracies(baseline: f64, individual: &[f64], union: f64) -> Result<f64> {
    let denominator = match individual.len() {
        0 => return Err(Error::EmptyGroup),
        1 => baseline,
        n => individual.iter().sum::<f64>() / n as f64,
    };
    if denominator.is_nan() || denominator <= 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(union / denominator)
}

pub fn gic(
    baseline_accuracy: f64,
    individual: &[InterventionResult],
    union: &InterventionResult,
) -> Result<GicReport> {
    if baseline_accuracy.is_nan() || baseline_accuracy <= 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let individual_accuracies: Vec<f64> = individual.iter().map(|r| r.report.accuracy).collect();
    let gic = gic_from_accuracies(
        baseline_accuracy,
        &individual_accuracies,
        union.report.accuracy,
    )?;
    Ok(GicReport {
        groups: individual.iter().map(|r| r.group_name.clone()).collect(),
        baseline_accuracy,
        union_accuracy: union.report.accuracy,
        individual_accuracies,
        gic,
    })
}

/// `count` distinct neuron indices drawn uniformly from `0..dim`.
pub fn random_group(dim: usize, count: usize, rng: &mut Rng) -> Result<NeuronSet> {
    if count > dim {
        return Err(Error::CountExceedsDimension { count, dim });
    }
    Ok(rand::seq::index::sample(rng, dim, count).into_vec().into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalSize {
    Count(usize),
    /// Fraction of the layer width, rounded down.
    Fraction(f64),
}

impl Default for RemovalSize {
    fn default() -> Self {
        RemovalSize::Fraction(0.5)
    }
}

impl RemovalSize {
    pub fn resolve(self, dim: usize) -> Result<usize> {
        match self {
            RemovalSize::Count(c) if c > dim => Err(Error::CountExceedsDimension { count: c, dim }),
            RemovalSize::Count(c) => Ok(c),
            RemovalSize::Fraction(f) if (0.0..=1.0).contains(&f) => {
                Ok(libm::floor(f * dim as f64) as usize)
            }
            RemovalSize::Fraction(f) => Err(Error::InvalidConfig(format!(
                "removal fraction must lie in [0, 1], got {f}"
            ))),
        }
    }
}

/// Mean of each rate over several evaluations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub precision: f64,
    pub f1: f64,
}

impl MeanMetrics {
    pub fn of(reports: &[EvalReport]) -> Self {
        let n = reports.len().max(1) as f64;
        let mut m = MeanMetrics::default();
        for r in reports {
            m.accuracy += r.accuracy;
            m.sensitivity += r.sensitivity;
            m.specificity += r.specificity;
            m.precision += r.precision;
            m.f1 += r.f1;
        }
        m.accuracy /= n;
        m.sensitivity /= n;
        m.specificity /= n;
        m.precision /= n;
        m.f1 /= n;
        m
    }
}

impl From<EvalReport> for MeanMetrics {
    fn from(r: EvalReport) -> Self {
        Self::of(&[r])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalReport {
    pub layer: usize,
    pub removed: usize,
    pub trials: usize,
    pub baseline: EvalReport,
    pub mean: MeanMetrics,
}

/// Random-removal robustness for one layer: `trials` independent random
/// neuron sets of the resolved size, each deactivated and evaluated.
pub fn random_removal(
    layer: usize,
    model: &ProbeModel,
    test: &LabeledMatrix,
    size: RemovalSize,
    trials: usize,
    seed: u64,
    value: f32,
) -> Result<RemovalReport> {
    if model.input_dim() != test.cols() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            found: test.cols(),
        });
    }
    let removed = size.resolve(test.cols())?;
    let baseline = evaluate(model, test)?;
    let mut rng = seed::rng(seed::derive_indexed(seed, "random-removal", layer as u64));
    let mut reports = Vec::with_capacity(trials);
    for _ in 0..trials {
        let set = random_group(test.cols(), removed, &mut rng)?;
        reports.push(intervene(model, test, "random", &set, &baseline, value)?.report);
    }
    Ok(RemovalReport {
        layer,
        removed,
        trials,
        baseline,
        mean: if reports.is_empty() {
            baseline.into()
        } else {
            MeanMetrics::of(&reports)
        },
    })
}

/// [`random_removal`] over several `(model, test set)` layers.
pub fn random_removal_sweep(
    layers: &[(&ProbeModel, &LabeledMatrix)],
    size: RemovalSize,
    trials: usize,
    seed: u64,
    value: f32,
) -> Result<Vec<RemovalReport>> {
    layers
        .iter()
        .enumerate()
        .map(|(l, (model, test))| random_removal(l, model, test, size, trials, seed, value))
        .collect()
}

/// The single groups, pairwise unions and pairwise-size random controls
/// evaluated at each τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupInterventions {
    pub partition: NeuronPartition,
    pub singles: Vec<InterventionResult>,
    /// Unions in order RegretD+Non-RegretD, RegretD+DualD, Non-RegretD+DualD,
    /// each with its GIC.
    pub pairs: Vec<(InterventionResult, GicReport)>,
    /// `RandomD1..3`, sized like the corresponding pair.
    pub random_controls: Vec<InterventionResult>,
}

/// The three pairwise unions of the RDS groups in reporting order.
pub const GROUP_PAIRS: [(NeuronGroup, NeuronGroup); 3] = [
    (NeuronGroup::Regret, NeuronGroup::NonRegret),
    (NeuronGroup::Regret, NeuronGroup::Dual),
    (NeuronGroup::NonRegret, NeuronGroup::Dual),
];

/// Runs every single-group and pairwise deactivation for one partition.
pub fn group_interventions(
    partition: &NeuronPartition,
    model: &ProbeModel,
    test: &LabeledMatrix,
    baseline: &EvalReport,
    rng: &mut Rng,
    value: f32,
) -> Result<GroupInterventions> {
    let singles = NeuronGroup::ALL
        .iter()
        .map(|&g| intervene(model, test, g.name(), partition.group(g), baseline, value))
        .collect::<Result<Vec<_>>>()?;

    let mut pairs = Vec::with_capacity(3);
    let mut random_controls = Vec::with_capacity(3);
    for (i, &(a, b)) in GROUP_PAIRS.iter().enumerate() {
        let set = partition.group(a).union(partition.group(b));
        let name = format!("{}+{}", a.name(), b.name());
        let union = intervene(model, test, &name, &set, baseline, value)?;
        let ia = &singles[a as usize];
        let ib = &singles[b as usize];
        let report = gic(baseline.accuracy, &[ia.clone(), ib.clone()], &union)?;
        pairs.push((union, report));

        let control = random_group(test.cols(), set.len(), rng)?;
        random_controls.push(intervene(
            model,
            test,
            &format!("RandomD{}", i + 1),
            &control,
            baseline,
            value,
        )?);
    }
    Ok(GroupInterventions {
        partition: partition.clone(),
        singles,
        pairs,
        random_controls,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSweepRow {
    pub tau: f64,
    pub group: String,
    pub count: usize,
    pub report: EvalReport,
    /// Baseline accuracy minus post-deactivation accuracy.
    pub accuracy_drop: f64,
    /// Absent for random controls.
    pub gic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSweep {
    pub baseline: EvalReport,
    pub rows: Vec<TauSweepRow>,
}

/// Repartitions at each τ and records every group intervention.
///
/// Random controls at grid point `i` use a generator seeded from
/// `(seed, i)`, so each τ row is independent of the rest of the grid.
pub fn tau_sweep(
    scores: &RdsScores,
    model: &ProbeModel,
    test: &LabeledMatrix,
    tau_grid: &[f64],
    seed: u64,
    value: f32,
) -> Result<TauSweep> {
    if tau_grid.is_empty() {
        return Err(Error::InvalidConfig("tau grid is empty".into()));
    }
    if scores.scores.len() != test.cols() {
        return Err(Error::DimensionMismatch {
            expected: test.cols(),
            found: scores.scores.len(),
        });
    }
    let baseline = evaluate(model, test)?;
    let mut rows = Vec::new();
    for (i, &tau) in tau_grid.iter().enumerate() {
        let partition = partition_neurons(scores, tau)?;
        let mut rng = seed::rng(seed::derive_indexed(seed, "tau-sweep", i as u64));
        let g = group_interventions(&partition, model, test, &baseline, &mut rng, value)?;
        let row = |r: &InterventionResult, gic: Option<f64>| TauSweepRow {
            tau,
            group: r.group_name.clone(),
            count: r.group_size,
            report: r.report,
            accuracy_drop: r.accuracy_drop(),
            gic,
        };
        for s in &g.singles {
            let single_gic =
                gic_from_accuracies(baseline.accuracy, &[s.report.accuracy], s.report.accuracy)
                    .ok();
            rows.push(row(s, single_gic));
        }
        for (union, report) in &g.pairs {
            rows.push(row(union, Some(report.gic)));
        }
        for c in &g.random_controls {
            rows.push(row(c, None));
        }
    }
    Ok(TauSweep { baseline, rows })
}
