//! Nome construction and every q-dependent building block: agiles, theta
//! functions, the prefactor-free eta product, the M-series and exact
//! q-expansions.
//!
//! Convention: `eta_paper(m)` is Π_{n≥1}(1 − q^{mn}) with no q^{m/24}
//! prefactor. The standard Dedekind eta appears only in the j-invariant.

mod expansion;
mod nome;
mod products;
mod theta;

pub use expansion::{agile_qexpansion, eta_qexpansion, theta_qexpansion};
pub use nome::{make_nome, Nome};
pub use products::{agile, agile_star, eta_log_derivative, eta_paper, tau_star, AgileSpec};
pub use theta::{
    bilateral_sum, m_series, theta2, theta3, theta_general, theta_log_derivative, theta_powersum,
    ThetaSpec,
};
