//! Time evolution of rotational wave packets through pulse trains.

mod ode;
mod plan;
mod state;
mod sudden;
mod train;

pub use ode::{integrate, OdeOptions, OdeStats};
pub use plan::{default_level_max, BasisPlan, TRUNCATION_LIMIT};
pub use state::{State, SuddenMethod};
pub use train::{run_train, Engine};
