use crate::certificate::Violation;
use crate::zk::Reject;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Dimension or structural problems with matrices and assignments.
    #[error("shape error: {0}")]
    Shape(String),

    /// A weight falls outside the declared magnitude bound.
    #[error("entry {value} at ({row},{col}) exceeds the {bits}-bit magnitude bound")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: i64,
        bits: u32,
    },

    /// Text inputs (matrix files, proof files) that do not scan.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Instance exceeds a hard resource bound (oracle size, i64 headroom).
    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    /// Certificate fields disagree on dimensions.
    #[error("certificate shape error: {0}")]
    CertificateShape(String),

    /// Certificate is well-formed but one optimality condition fails.
    #[error("certificate rejected: {0}")]
    CertificateRejected(Violation),

    /// Secret values would not fit the field alongside the statistical mask.
    #[error(
        "bit budget exceeded: {value_bits} value bits + {security_bits} mask bits \
         do not fit a {field_bits}-bit field"
    )]
    BitBudget {
        value_bits: u32,
        security_bits: u32,
        field_bits: u32,
    },

    /// A slack does not fit the range-proof width.
    #[error("width overflow: slack {value} does not fit {width} bits")]
    WidthOverflow { value: i64, width: u32 },

    /// Proof bytes or counts that cannot be decoded at all.
    #[error("malformed proof: {0}")]
    MalformedProof(String),

    /// Proof decoded fine but the statement does not verify.
    #[error("proof rejected: {0}")]
    ProofRejected(Reject),

    /// An invariant the code maintains itself was observed broken.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
