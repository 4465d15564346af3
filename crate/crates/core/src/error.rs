//! Error types shared across the crate.

use thiserror::Error;

/// Every failure mode of the pipeline.
///
/// Variants are grouped by how the CLI maps them to exit codes: input problems
/// (exit 2), resource and solver problems (exit 3), and mathematical
/// verification failures, which are not errors at all — they are recorded in
/// the certificate and reported via [`ActionCheck`] or transcript flags.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("group closure exceeded the enumeration bound of {bound} elements")]
    EnumerationBound { bound: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("action rejected: {0}")]
    ActionRejected(ActionCheck),

    #[error("unsupported finite Coxeter block: {0}")]
    UnsupportedBlock(String),

    #[error("solver failed after {restarts} restarts: {message} (best residual {best_residual:.3e})")]
    Solver {
        message: String,
        best_residual: f64,
        restarts: usize,
    },

    #[error("realization error: {0}")]
    Realization(String),

    #[error("semantic error: {0}")]
    Semantic(String),

    #[error("job error: {0}")]
    Job(String),

    #[error("certificate emission error: missing stages {0:?}")]
    IncompleteCertificate(Vec<String>),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

/// The first condition that failed while validating a surface action.
///
/// The three generator images must be involutions, the pairwise products must
/// have exactly the orders given by the signature, each edge dihedral must map
/// injectively (this is torsion-freeness of the kernel), and the images must
/// generate the whole group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionCheck {
    ImageNotInGroup { which: usize },
    NotInvolution { which: usize, order: u64 },
    EdgeOrder { faces: (usize, usize), expected: u64, got: u64 },
    EdgeDihedral { faces: (usize, usize), expected: u64, got: u64 },
    NotSurjective { got: u64, want: u64 },
}

impl std::fmt::Display for ActionCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ActionCheck::ImageNotInGroup { which } => {
                write!(f, "image a{which} is not an element of the group")
            }
            ActionCheck::NotInvolution { which, order } => {
                write!(f, "image a{which} is not an involution (order {order})")
            }
            ActionCheck::EdgeOrder { faces: (i, j), expected, got } => write!(
                f,
                "dihedral injectivity failed on edge (r{i}, r{j}): product order {got}, expected {expected}"
            ),
            ActionCheck::EdgeDihedral { faces: (i, j), expected, got } => write!(
                f,
                "dihedral injectivity failed on edge (r{i}, r{j}): subgroup order {got}, expected {expected}"
            ),
            ActionCheck::NotSurjective { got, want } => {
                write!(f, "images do not generate the group: closure has order {got} of {want}")
            }
        }
    }
}
