use cho_adiabatic::AdiabaticError;
use cho_isoso::IsosoError;
use cho_markov::MarkovError;
use cho_model::ModelError;
use cho_perturbation::PerturbationError;
use cho_transport::TransportError;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    /// 2 for anything the user can fix in the input, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Io(_) => 2,
            ExperimentError::Numeric(_) => 3,
        }
    }
}

impl From<ModelError> for ExperimentError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidParams(_) => ExperimentError::Config(e.to_string()),
            _ => ExperimentError::Numeric(e.to_string()),
        }
    }
}

impl From<TransportError> for ExperimentError {
    fn from(e: TransportError) -> Self {
        match e {
            TransportError::InvalidConfig(_) => ExperimentError::Config(e.to_string()),
            TransportError::Model(m) => m.into(),
            _ => ExperimentError::Numeric(e.to_string()),
        }
    }
}

impl From<AdiabaticError> for ExperimentError {
    fn from(e: AdiabaticError) -> Self {
        match e {
            AdiabaticError::InvalidInput(_)
            | AdiabaticError::NonSmoothProfile
            | AdiabaticError::SupercriticalExcursion { .. } => ExperimentError::Config(e.to_string()),
            AdiabaticError::Transport(t) => t.into(),
            AdiabaticError::Model(m) => m.into(),
            _ => ExperimentError::Numeric(e.to_string()),
        }
    }
}

impl From<IsosoError> for ExperimentError {
    fn from(e: IsosoError) -> Self {
        match e {
            IsosoError::InvalidCase { .. } => ExperimentError::Config(e.to_string()),
            IsosoError::Model(m) => m.into(),
            _ => ExperimentError::Numeric(e.to_string()),
        }
    }
}

impl From<MarkovError> for ExperimentError {
    fn from(e: MarkovError) -> Self {
        match e {
            MarkovError::InvalidInput(_) => ExperimentError::Config(e.to_string()),
            MarkovError::Transport(t) => t.into(),
            _ => ExperimentError::Numeric(e.to_string()),
        }
    }
}

impl From<PerturbationError> for ExperimentError {
    fn from(e: PerturbationError) -> Self {
        match e {
            PerturbationError::InvalidConfig(_) => ExperimentError::Config(e.to_string()),
            PerturbationError::Io(s) => ExperimentError::Io(std::io::Error::other(s)),
            _ => ExperimentError::Numeric(e.to_string()),
        }
    }
}
