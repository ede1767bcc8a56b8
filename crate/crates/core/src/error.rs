use thiserror::Error;

/// Error type shared by all modules.
///
/// Variants are grouped into two broad classes used by callers to pick exit
/// codes: input/configuration problems ([`Error::is_validation`]) and
/// numerical failures encountered during otherwise valid computations.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input: bad norms, empty grids, inconsistent dimensions,
    /// out-of-range parameters, malformed configuration.
    #[error("validation error: {0}")]
    Validation(String),

    /// A linear system could not be solved; carries the estimated reciprocal
    /// condition number (ratio of smallest to largest pivot magnitude).
    #[error("singular linear system (reciprocal condition estimate {rcond:.3e})")]
    SingularSystem { rcond: f64 },

    /// An iterative solver ran out of iterations; carries the last residual
    /// and the final iterate formatted for diagnostics.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e}); last iterate: {last}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        last: String,
    },

    /// Adaptive integration drove the step size below the representable
    /// minimum, usually a sign of a stiff or inconsistent system.
    #[error("step size underflow at t = {t:.6e} (step {step:.3e})")]
    StepUnderflow { t: f64, step: f64 },
}

impl Error {
    /// Build a validation error from anything displayable.
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_partition_variants() {
        assert!(Error::validation("x").is_validation());
        assert!(!Error::SingularSystem { rcond: 1e-18 }.is_validation());
        assert!(!Error::StepUnderflow { t: 0.0, step: 1e-300 }.is_validation());
    }

    #[test]
    fn messages_carry_diagnostics() {
        let e = Error::NonConvergence {
            iterations: 200,
            residual: 3.2e-2,
            last: "gamma_s = 1.0".into(),
        };
        let msg = e.to_string();
        assert!(msg.contains("200"));
        assert!(msg.contains("gamma_s"));
    }
}
