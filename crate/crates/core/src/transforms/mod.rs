//! Truth-preserving rewrites of quantified sentences.
//!
//! Every variable a transform introduces contains `$`, which user input may
//! not use, so renamed copies never collide with existing names.

mod alternating;
mod naming;
mod power;
mod universal;
mod zeta;

pub use alternating::{index_sets, normalize_alternating, omega, AlternatingSentence};
pub use power::{
    fits_power_translation, gamma_columns, gamma_name, power_csp_to_qcsp, power_domain, power_language,
    power_relation, power_width, qcsp_to_power_csp, qcsp_to_power_csp_in, DecodedSentence, GammaColumn,
};
pub use universal::{eliminate_universals, move_universals_left, reduce_universal_count};
pub use zeta::{zeta, zeta_with};
