//! Synthetic reverse water-gas shift flowsheet oracle.
//!
//! A binary CO2/H2 feed is compressed to 20 bar, heated to the reaction
//! temperature, equilibrated over CO2 + H2 <=> CO + H2O, and cooled with
//! full water knockout. Because the shift is equimolar, the equilibrium
//! extent follows from a quadratic whose root is polished by Newton steps.
//! All outputs are specific to one kilogram of feed.

use crate::consts::{heat_capacity, molar_mass, WATER_LATENT_HEAT};

/// Reaction endotherm, kJ/mol.
const REACTION_HEAT: f64 = 41.0;
/// Operating pressure of the synthesis loop, bar.
pub const OPERATING_PRESSURE: f64 = 20.0;
/// Isothermal-equivalent compression work coefficient: R T0 / efficiency,
/// J/mol per ln(pressure ratio).
const COMPRESSION_COEF: f64 = 8.314 * 298.15 / 0.72;
/// Temperature after the product cooler, deg C.
const CONDENSER_T: f64 = 40.0;

#[derive(Debug, Clone, Copy)]
pub struct RwgsInput {
    /// Reactor temperature, deg C.
    pub t_celsius: f64,
    /// H2 mass fraction of the feed (balance CO2).
    pub w_h2: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RwgsOutput {
    /// CO mass fraction of the dry syngas outlet.
    pub w_co: f64,
    /// H2 mass fraction of the dry syngas outlet.
    pub w_h2: f64,
    /// CO2 mass fraction of the dry syngas outlet.
    pub w_co2: f64,
    /// Syngas outlet mass per kg feed.
    pub yield_syngas: f64,
    /// Condensed water per kg feed.
    pub yield_water: f64,
    /// Heating and reaction demand, kWh per kg feed (negative).
    pub duty_heating: f64,
    /// Cooling and condensation release, kWh per kg feed (positive).
    pub duty_cooling: f64,
    /// Compression work, kWh per kg feed (negative).
    pub specific_work: f64,
    /// Molar reaction extent per kg feed.
    pub extent: f64,
    /// Equilibrium residual K*(a-x)(b-x) - x^2 at the solution.
    pub residual: f64,
}

impl RwgsOutput {
    /// Network output order: syngas CO and H2 fractions, water yield, both
    /// duties, and the specific work.
    pub fn to_network_outputs(&self) -> Vec<f64> {
        vec![
            self.w_co,
            self.w_h2,
            self.yield_water,
            self.duty_heating,
            self.duty_cooling,
            self.specific_work,
        ]
    }

    pub fn output_names() -> Vec<String> {
        [
            "w_co_syngas",
            "w_h2_syngas",
            "yield_water",
            "duty_heating",
            "duty_cooling",
            "specific_work",
        ]
        .map(str::to_string)
        .to_vec()
    }
}

/// Equilibrium constant of the reverse shift at temperature `t_kelvin`.
pub fn rwgs_equilibrium_constant(t_kelvin: f64) -> f64 {
    (4.33 - 4577.8 / t_kelvin).exp()
}

/// Evaluates the shift loop at one operating point.
pub fn rwgs_oracle(input: RwgsInput) -> RwgsOutput {
    let RwgsInput { t_celsius, w_h2 } = input;
    let t_kelvin = t_celsius + 273.15;
    let k = rwgs_equilibrium_constant(t_kelvin);

    // Moles per kg feed.
    let b = 1000.0 * w_h2 / molar_mass::H2;
    let a = 1000.0 * (1.0 - w_h2) / molar_mass::CO2;

    // K (a - x)(b - x) = x^2 with 0 < x < min(a, b).
    let qa = k - 1.0;
    let qb = -k * (a + b);
    let qc = k * a * b;
    let mut x = if qa.abs() < 1e-12 {
        -qc / qb
    } else {
        (-qb - (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa)
    };
    let upper = a.min(b);
    x = x.clamp(1e-12, upper * (1.0 - 1e-12));
    for _ in 0..50 {
        let f = k * (a - x) * (b - x) - x * x;
        let df = -k * ((a - x) + (b - x)) - 2.0 * x;
        let step = f / df;
        let next = (x - step).clamp(1e-15, upper * (1.0 - 1e-15));
        if (next - x).abs() < 1e-15 * upper {
            x = next;
            break;
        }
        x = next;
    }
    let residual = k * (a - x) * (b - x) - x * x;

    let n_co2 = a - x;
    let n_h2 = b - x;
    let m_water = x * molar_mass::H2O / 1000.0;
    let m_syngas = 1.0 - m_water;

    // Feed heating to reaction temperature plus the endotherm.
    let sensible_in = (a * heat_capacity::CO2 + b * heat_capacity::H2) * (t_celsius - 25.0);
    let duty_heating = -(sensible_in + REACTION_HEAT * x) / 3600.0;
    // Product cooling with total water condensation.
    let sensible_out = (n_co2 * heat_capacity::CO2
        + n_h2 * heat_capacity::H2
        + x * heat_capacity::CO
        + x * heat_capacity::H2O_GAS)
        * (t_celsius - CONDENSER_T);
    let duty_cooling = (sensible_out + WATER_LATENT_HEAT * m_water) / 3600.0;
    let n_total = a + b;
    let specific_work =
        -COMPRESSION_COEF * n_total * (OPERATING_PRESSURE).ln() / 3.6e6;

    RwgsOutput {
        w_co: x * molar_mass::CO / 1000.0 / m_syngas,
        w_h2: n_h2 * molar_mass::H2 / 1000.0 / m_syngas,
        w_co2: n_co2 * molar_mass::CO2 / 1000.0 / m_syngas,
        yield_syngas: m_syngas,
        yield_water: m_water,
        duty_heating,
        duty_cooling,
        specific_work,
        extent: x,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_constant_reference() {
        let k = rwgs_equilibrium_constant(1123.0);
        assert!((k - 1.289).abs() < 1e-3, "K = {k}");
    }

    #[test]
    fn equilibrium_residual_is_tiny() {
        for &t in &[850.0, 900.0, 1000.0] {
            for &w in &[0.02, 0.1, 0.25] {
                let out = rwgs_oracle(RwgsInput { t_celsius: t, w_h2: w });
                let scale = out.extent * out.extent;
                assert!(
                    out.residual.abs() <= 1e-9 * scale.max(1.0),
                    "t={t} w={w}: residual {}",
                    out.residual
                );
            }
        }
    }

    #[test]
    fn mass_is_conserved() {
        let out = rwgs_oracle(RwgsInput { t_celsius: 900.0, w_h2: 0.12 });
        assert!((out.yield_syngas + out.yield_water - 1.0).abs() < 1e-12);
        let fractions = out.w_co + out.w_h2 + out.w_co2;
        assert!((fractions - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conversion_rises_with_temperature() {
        let cold = rwgs_oracle(RwgsInput { t_celsius: 850.0, w_h2: 0.1 });
        let hot = rwgs_oracle(RwgsInput { t_celsius: 1000.0, w_h2: 0.1 });
        assert!(hot.extent > cold.extent);
        assert!(hot.w_co > cold.w_co);
    }

    #[test]
    fn energy_signs() {
        let out = rwgs_oracle(RwgsInput { t_celsius: 900.0, w_h2: 0.12 });
        assert!(out.duty_heating < 0.0);
        assert!(out.duty_cooling > 0.0);
        assert!(out.specific_work < 0.0);
    }
}
