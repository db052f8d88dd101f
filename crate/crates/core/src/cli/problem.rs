//! Problem files: one JSON document with `"schema": 1`.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "channel": { "standard": { "kind": "dephasing", "p": 0.3 } },
//!   "constraint": { "observable": { "diagonal": [0, 1] }, "energy": 0.4 },
//!   "solver": { "gap_tol": 1e-6 },
//!   "units": "nats"
//! }
//! ```
//!
//! Channels are `{"standard": ...}`, `{"kraus": [...]}` or
//! `{"gaussian": ...}`. Observables are `"number_operator"`,
//! `{"diagonal": [...]}` or `{"matrix": [...]}`. Complex entries are always
//! `[re, im]` pairs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::capacity::{ConstraintSpec, SolverOptions};
use crate::channel::{
    build_standard, gaussian_classical_noise, GaussianNoiseSpec, KrausChannel, StandardChannel,
};
use crate::error::Error;

use super::CliError;
use crate::linalg::{ComplexMatrix, C64};
use crate::observable::ConstraintObservable;
use crate::state::DensityMatrix;

pub const SCHEMA_VERSION: u32 = 1;

/// Complex matrix as rows of `[re, im]` pairs.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelSpec {
    Standard(StandardChannel),
    Kraus(Vec<MatrixRows>),
    Gaussian(GaussianNoiseSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableSpec {
    NumberOperator,
    Diagonal(Vec<f64>),
    Matrix(MatrixRows),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSection {
    pub observable: ObservableSpec,
    pub energy: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    /// Converts a value in nats.
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub energies: Vec<f64>,
    #[serde(default)]
    pub cutoffs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: u32,
    pub channel: ChannelSpec,
    pub constraint: ConstraintSection,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub units: Units,
    /// Input state for `info`.
    #[serde(default)]
    pub state: Option<MatrixRows>,
    /// Ensemble size for `holevo` and `sweep`.
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let p: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            CliError::Input(format!(
                "problem file field `{}` (line {}, column {}): {}",
                e.path(),
                inner.line(),
                inner.column(),
                inner
            ))
        })?;
        if p.schema != SCHEMA_VERSION {
            return Err(CliError::Input(format!(
                "problem file field `schema`: unsupported version {}, expected {SCHEMA_VERSION}",
                p.schema
            )));
        }
        Ok(p)
    }

    /// Parsed file plus its raw bytes (for the input digest).
    pub fn read(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| CliError::Input(format!("{} is not UTF-8: {e}", path.display())))?;
        Ok((Self::parse(text)?, bytes))
    }

    pub fn build_channel(&self) -> Result<KrausChannel, CliError> {
        match &self.channel {
            ChannelSpec::Standard(s) => {
                build_standard(s).map_err(|e| field_error("channel.standard", e))
            }
            ChannelSpec::Kraus(ops) => {
                let mut mats = Vec::with_capacity(ops.len());
                for (k, rows) in ops.iter().enumerate() {
                    mats.push(
                        matrix_from_rows(rows)
                            .map_err(|e| field_error(&format!("channel.kraus[{k}]"), e))?,
                    );
                }
                KrausChannel::new(mats).map_err(|e| field_error("channel.kraus", e))
            }
            ChannelSpec::Gaussian(g) => self.build_gaussian(g.cutoff),
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.channel, ChannelSpec::Gaussian(_))
    }

    /// The Gaussian channel of the file at another cutoff.
    pub fn build_gaussian(&self, cutoff: usize) -> Result<KrausChannel, CliError> {
        let ChannelSpec::Gaussian(g) = &self.channel else {
            return Err(CliError::Input(
                "problem file field `channel`: cutoffs apply only to gaussian channels".into(),
            ));
        };
        let spec = GaussianNoiseSpec {
            cutoff,
            ..g.clone()
        };
        gaussian_classical_noise(&spec).map_err(|e| field_error("channel.gaussian", e))
    }

    pub fn build_observable(&self, dim: usize) -> Result<ConstraintObservable, CliError> {
        let field = "constraint.observable";
        let mismatch = |found| {
            field_error(
                field,
                Error::DimensionMismatch {
                    expected: dim,
                    found,
                },
            )
        };
        let f = match &self.constraint.observable {
            ObservableSpec::NumberOperator => ConstraintObservable::number_operator(dim),
            ObservableSpec::Diagonal(d) => {
                if d.len() != dim {
                    return Err(mismatch(d.len()));
                }
                ConstraintObservable::from_real_diagonal(d)
            }
            ObservableSpec::Matrix(rows) => {
                let m = matrix_from_rows(rows).map_err(|e| field_error(field, e))?;
                if m.nrows() != dim {
                    return Err(mismatch(m.nrows()));
                }
                ConstraintObservable::from_matrix(m)
            }
        };
        f.map_err(|e| field_error(field, e))
    }

    /// Constraint at the file's energy, or at `energy` when given.
    pub fn build_constraint(
        &self,
        dim: usize,
        energy: Option<f64>,
    ) -> Result<ConstraintSpec, CliError> {
        let f = self.build_observable(dim)?;
        ConstraintSpec::new(f, energy.unwrap_or(self.constraint.energy)).map_err(CliError::from)
    }

    pub fn build_state(&self, dim: usize) -> Result<Option<DensityMatrix>, CliError> {
        let Some(rows) = &self.state else {
            return Ok(None);
        };
        let m = matrix_from_rows(rows).map_err(|e| field_error("state", e))?;
        if m.nrows() != dim {
            return Err(field_error(
                "state",
                Error::DimensionMismatch {
                    expected: dim,
                    found: m.nrows(),
                },
            ));
        }
        DensityMatrix::new(m)
            .map(Some)
            .map_err(|e| field_error("state", e))
    }
}

fn field_error(field: &str, e: Error) -> CliError {
    CliError::Input(format!("problem file field `{field}`: {e}"))
}

pub fn matrix_from_rows(rows: &MatrixRows) -> Result<ComplexMatrix, Error> {
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|[re, im]| C64::new(*re, *im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows)
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> MatrixRows {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_minimal_file() {
        let p = ProblemFile::parse(
            r#"{"schema": 1,
                "channel": {"standard": {"kind": "identity", "dim": 2}},
                "constraint": {"observable": "number_operator", "energy": 0.3}}"#,
        )
        .unwrap();
        assert_eq!(p.units, Units::Nats);
        assert_eq!(p.solver, SolverOptions::default());
        let ch = p.build_channel().unwrap();
        let c = p.build_constraint(ch.dim_in(), None).unwrap();
        assert_eq!(c.energy(), 0.3);
    }

    #[test]
    fn errors_name_the_field() {
        let err = ProblemFile::parse(
            r#"{"schema": 1,
                "channel": {"standard": {"kind": "dephasing", "p": "x"}},
                "constraint": {"observable": "number_operator", "energy": 0.3}}"#,
        )
        .unwrap_err();
        let CliError::Input(msg) = err else { panic!() };
        assert!(msg.contains("channel.standard"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");

        let err = ProblemFile::parse(
            r#"{"schema": 2, "channel": {"standard": {"kind": "identity", "dim": 2}},
                "constraint": {"observable": "number_operator", "energy": 0.3}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Input(m) if m.contains("schema")));
    }

    #[test]
    fn matrices_round_trip_bit_exactly() {
        let rows = vec![
            vec![[0.1, -0.2], [1.0 / 3.0, 0.0]],
            vec![[0.0, 1e-300], [2.5, 7.0]],
        ];
        let m = matrix_from_rows(&rows).unwrap();
        assert_eq!(matrix_to_rows(&m), rows);
        let json = serde_json::to_string(&rows).unwrap();
        let back: MatrixRows = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rows);
    }
}
