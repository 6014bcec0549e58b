use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("unsupported basis set `{0}`")]
    UnsupportedBasis(String),

    #[error("element {element} is not available in basis {basis}")]
    UnsupportedElement { element: String, basis: String },

    #[error("invalid molecule: {0}")]
    InvalidMolecule(String),

    #[error("odd electron count {0}: only closed-shell systems are supported")]
    OddElectronCount(usize),

    #[error(
        "SCF not converged after {iterations} iterations \
         (energy {energy:.10} Ha, commutator residual {residual:.3e})"
    )]
    ScfNotConverged {
        iterations: usize,
        energy: f64,
        residual: f64,
    },

    #[error("overlap matrix is nearly linearly dependent (smallest eigenvalue {0:.3e})")]
    LinearDependence(f64),

    #[error("invalid fragment partition: {0}")]
    InvalidPartition(String),

    #[error("mean-field density matrix is not idempotent (max deviation {0:.3e})")]
    NotIdempotent(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(
        "embedding space has {n_spin_orbitals} spin-orbitals, above the \
         exact-diagonalization limit of {limit}; use an active space or the VQE solver"
    )]
    SpaceTooLarge { n_spin_orbitals: usize, limit: usize },

    #[error("chemical potential search failed: {0}")]
    ChemicalPotential(String),

    #[error("invalid circuit: {0}")]
    Circuit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no shots survived post-selection ({0})")]
    Starvation(String),

    #[error("optimizer failed: {0}")]
    Optimizer(String),

    #[error("legs computed with different methods: `{0}` vs `{1}`")]
    MethodMismatch(String, String),

    #[error("config error: {0}")]
    Config(String),

    #[error("analysis error: {0}")]
    Analysis(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
