use thiserror::Error;

/// Error taxonomy shared across the crate.
///
/// The CLI maps these onto exit codes: validation-class errors exit 1,
/// capacity breaches exit 3, and internal invariant violations (a lemma
/// that "cannot" fail reporting failure) exit 2 like any audit failure.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad connection set, bad partition, non-bijective
    /// image table, degree mismatch, unparsable file.
    #[error("validation error: {0}")]
    Validation(String),

    /// An operation's precondition does not hold for this input
    /// (e.g. a stability criterion applied to a bipartite graph).
    #[error("not applicable: {0}")]
    Applicability(String),

    /// A configured limit was exceeded: vertex cap, group-order cap,
    /// element-enumeration cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A set handed to an orbit computation is not invariant under the group.
    #[error("invariance violation: {0}")]
    Invariance(String),

    /// A claimed subgroup is not contained in the ambient group.
    #[error("containment violation: {0}")]
    Containment(String),

    /// A structural fact that is a theorem failed to hold; this always
    /// signals a bug in the implementation, never in the input.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
