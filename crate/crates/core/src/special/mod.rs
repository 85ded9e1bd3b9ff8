//! Special functions used by the closed-form metrics.

mod foxh;
mod gamma;
mod hypergeometric;
mod qfunc;

pub use foxh::{fox_h, fox_h_detailed, ContourConfig, ContourPlacement, FoxHEvaluation, FoxHParams};
pub use gamma::{beta, digamma, gamma, ln_gamma, log_gamma_complex, recip_gamma, EULER_GAMMA};
pub use hypergeometric::gauss_2f1;
pub use qfunc::q_function;
