//! Time-dependent product formulas, multi-product formulas and their error bounds.

pub mod bounds;
pub mod error;
pub mod fit;
pub mod floquet;
pub mod hamiltonian;
pub mod linalg;
pub mod mpf;
pub mod oracle;
pub mod pauli;
pub mod product_formula;
pub mod quad;
pub mod resources;
pub mod time_functions;

pub use error::{Error, Result};
pub use hamiltonian::{models, Hamiltonian, Operator, OperatorCurve};
pub use linalg::{OperatorMatrix, Pauli, C64};
pub use pauli::PauliSum;
pub use product_formula::{suzuki_plan, Family, Stage, StagePlan};
pub use time_functions::{CurveShape, Periodicity, ScalarCurve};
pub use bounds::BoundReport;
pub use floquet::{FloquetSpace, FourierHamiltonian};
pub use mpf::MpfPlan;
pub use resources::{BoundSource, ResourceRow};
