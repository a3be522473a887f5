//! Physical constants and unit helpers shared across the crate.
//!
//! Interface units are kg/h for mass flows, kW for heat and power, kWh/kg
//! for specific duties, $/yr for costs, and degrees Celsius for interface
//! temperatures. Temperatures are converted to Kelvin at the point of use.

/// Molar masses in kg/kmol (equivalently g/mol).
pub mod molar_mass {
    pub const H2: f64 = 2.016;
    pub const O2: f64 = 31.998;
    pub const N2: f64 = 28.014;
    pub const H2O: f64 = 18.015;
    pub const CO: f64 = 28.010;
    pub const CO2: f64 = 44.009;
    pub const CH4: f64 = 16.043;
    pub const C: f64 = 12.011;
    pub const H: f64 = 1.008;
    pub const O: f64 = 15.999;

    /// Molar mass of the n-alkane C_n H_{2n+2}.
    pub fn alkane(n: usize) -> f64 {
        let n = n as f64;
        n * C + (2.0 * n + 2.0) * H
    }
}

/// Standard enthalpies of formation at 298.15 K in kJ/mol (gas phase).
pub mod enthalpy_of_formation {
    pub const CO: f64 = -110.53;
    pub const CO2: f64 = -393.52;
    pub const H2O_GAS: f64 = -241.83;
    pub const CH4: f64 = -74.87;
    pub const H2: f64 = 0.0;
    pub const O2: f64 = 0.0;
}

/// Mean molar heat capacities over the relevant temperature ranges in
/// kJ/(mol K). Coarse constants; the synthetic process models only need a
/// smooth, directionally correct energy balance.
pub mod heat_capacity {
    pub const CO: f64 = 0.031;
    pub const CO2: f64 = 0.050;
    pub const H2: f64 = 0.030;
    pub const H2O_GAS: f64 = 0.038;
    pub const CH4: f64 = 0.055;
    pub const O2: f64 = 0.033;
    pub const N2: f64 = 0.031;
    /// Per CH_xO_y monomer unit of decomposed biomass.
    pub const BIOMASS_UNIT: f64 = 0.040;
}

/// Mass of CO2 released per unit mass of carbon-bearing species on complete
/// oxidation: one mole of CO2 per mole of carbon.
pub mod oxidation_ratio {
    use super::molar_mass;

    /// kg CO2 per kg CO.
    pub fn co() -> f64 {
        molar_mass::CO2 / molar_mass::CO
    }

    /// kg CO2 per kg CH4.
    pub fn ch4() -> f64 {
        molar_mass::CO2 / molar_mass::CH4
    }

    /// kg CO2 per kg of the n-alkane C_n H_{2n+2}.
    pub fn alkane(n: usize) -> f64 {
        n as f64 * molar_mass::CO2 / molar_mass::alkane(n)
    }
}

/// Latent heat of vaporization of water, kJ/kg, at near-ambient pressure.
pub const WATER_LATENT_HEAT: f64 = 2257.0;

/// Kelvin offset of the Celsius scale.
pub const CELSIUS_OFFSET: f64 = 273.15;

/// Convert a temperature from degrees Celsius to Kelvin.
pub fn celsius_to_kelvin(t_c: f64) -> f64 {
    t_c + CELSIUS_OFFSET
}

/// Convert kJ per hour to kW.
pub fn kj_per_hour_to_kw(kj_h: f64) -> f64 {
    kj_h / 3600.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alkane_molar_masses() {
        assert!((molar_mass::alkane(1) - 16.043).abs() < 1e-9);
        assert!((molar_mass::alkane(8) - 114.232).abs() < 1e-9);
    }

    #[test]
    fn oxidation_ratios_match_stoichiometry() {
        assert!((oxidation_ratio::co() - 1.5712).abs() < 1e-3);
        assert!((oxidation_ratio::ch4() - 2.7432).abs() < 1e-3);
        // Complete oxidation of octane: 8 CO2 per C8H18.
        let r = oxidation_ratio::alkane(8);
        assert!((r - 8.0 * 44.009 / 114.232).abs() < 1e-12);
    }

    #[test]
    fn temperature_conversion() {
        assert!((celsius_to_kelvin(25.0) - 298.15).abs() < 1e-12);
    }
}
