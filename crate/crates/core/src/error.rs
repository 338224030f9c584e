use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Contract violations raised by the analysis routines.
///
/// Every variant has a stable machine-readable name, see [`Error::name`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix data has {found} values, expected {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("{what} has length {found}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("label {value} at row {row} is not 0 or 1")]
    LabelOutOfRange { row: usize, value: u8 },
    #[error("non-finite activation at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },
    #[error("need at least {required} rows, got {rows}")]
    TooFewRows { rows: usize, required: usize },
    #[error("row {row} has zero norm")]
    ZeroNormRow { row: usize },
    #[error("class {class} has {count} rows, need at least {required}")]
    ClassTooSmall {
        class: u8,
        count: usize,
        required: usize,
    },
    #[error("only one class present")]
    SingleClass,
    #[error("inter-class entanglement {inter_entanglement} saturates the separability ratio")]
    EntanglementSaturated { inter_entanglement: f64 },
    #[error("input has dimension {found}, model expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("training set contains a single class")]
    SingleClassTrainingSet,
    #[error("non-finite training loss in epoch {epoch}")]
    DivergenceDetected { epoch: usize },
    #[error("neuron index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("neuron group is empty")]
    EmptyGroup,
    #[error("cannot draw {count} neurons from dimension {dim}")]
    CountExceedsDimension { count: usize, dim: usize },
    #[error("ratio denominator is zero")]
    ZeroDenominator,
    #[error("entropy of an input is zero; normalized mutual information undefined")]
    DegenerateEntropy,
    #[error("neuron groups overlap at index {index}")]
    OverlappingGroups { index: usize },
    #[error("matrix has no pair ids")]
    MissingPairIds,
    #[error("no pair id owns both a regret and a non-regret row")]
    NoPairs,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Stable identifier used in command-line diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::EmptyMatrix => "EmptyMatrix",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::LabelOutOfRange { .. } => "LabelOutOfRange",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::TooFewRows { .. } => "TooFewRows",
            Error::ZeroNormRow { .. } => "ZeroNormRow",
            Error::ClassTooSmall { .. } => "ClassTooSmall",
            Error::SingleClass => "SingleClass",
            Error::EntanglementSaturated { .. } => "EntanglementSaturated",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::EmptyTestSet => "EmptyTestSet",
            Error::SingleClassTrainingSet => "SingleClassTrainingSet",
            Error::DivergenceDetected { .. } => "DivergenceDetected",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::EmptyGroup => "EmptyGroup",
            Error::CountExceedsDimension { .. } => "CountExceedsDimension",
            Error::ZeroDenominator => "ZeroDenominator",
            Error::DegenerateEntropy => "DegenerateEntropy",
            Error::OverlappingGroups { .. } => "OverlappingGroups",
            Error::MissingPairIds => "MissingPairIds",
            Error::NoPairs => "NoPairs",
            Error::InvalidConfig(_) => "InvalidConfig",
        }
    }
}
