use std::path::PathBuf;

/// Errors produced by mesh construction, assembly, and the block solver.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-manifold mesh: edge ({0}, {1}) is shared by more than two triangles")]
    NonManifold(usize, usize),

    #[error("duplicate triangle at index {0} (same vertices as triangle {1})")]
    DuplicateTriangle(usize, usize),

    #[error("degenerate triangle {0}: zero area")]
    DegenerateTriangle(usize),

    #[error("structure violation: top-right block magnitude exp({log_top_right:.6e}) exceeds {tol:e} * max|M| (max log {log_max:.6e})")]
    StructureViolation {
        log_top_right: f64,
        log_max: f64,
        tol: f64,
    },

    #[error("diagonal block is not positive definite at z-index {0}")]
    NotPositiveDefinite(usize),

    #[error("singular diagonal block {block} (size {size})")]
    SingularBlock { block: usize, size: usize },

    #[error("block {block} has size {size}, above the dense block limit {limit}")]
    BlockTooLarge {
        block: usize,
        size: usize,
        limit: usize,
    },

    #[error("singular fitting operator at dof {0}")]
    SingularOperator(usize),

    #[error("floating-point overflow while materializing {0}")]
    Overflow(String),

    #[error("parse error in {what}: {msg}")]
    Parse { what: String, msg: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(what: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            what: what.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
