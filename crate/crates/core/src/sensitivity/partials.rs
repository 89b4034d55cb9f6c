use crate::models::FluxModel;
use crate::numerics::quadrature::gauss16;

/// Partials of the Rankine-Hugoniot speed Λ(u⁺, u⁻) with respect to the
/// right state u⁺ and the left state u⁻:
/// ∫₀¹ s f″(u⁻ + s(u⁺ − u⁻)) ds and ∫₀¹ (1 − s) f″(u⁻ + s(u⁺ − u⁻)) ds.
pub fn lambda_partials(flux: &FluxModel, u_plus: f64, u_minus: f64) -> (f64, f64) {
    let (mut dp, mut dm) = (0.0, 0.0);
    for (s, w) in gauss16().mapped(0.0, 1.0) {
        let f2 = flux.d2(u_minus + s * (u_plus - u_minus));
        dp += w * s * f2;
        dm += w * (1.0 - s) * f2;
    }
    (dp, dm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Polynomial;

    #[test]
    fn burgers_halves() {
        let (p, m) = lambda_partials(&FluxModel::burgers(), 3.0, -1.0);
        assert!((p - 0.5).abs() < 1e-15 && (m - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quartic_closed_form() {
        let f = FluxModel::new(Polynomial::new(vec![0.0, 0.0, 0.0, 0.0, 0.25]), (0.1, 2.0)).unwrap();
        let (p, m) = lambda_partials(&f, 1.0, 0.0);
        assert!((p - 0.75).abs() < 1e-14);
        assert!((m - 0.25).abs() < 1e-14);
    }
}
