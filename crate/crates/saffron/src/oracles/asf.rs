//! Anderson-Schulz-Flory chain growth model for Fischer-Tropsch products.
//!
//! The chain growth probability is a smooth correlation in reactor
//! temperature, pressure, and feed composition; the resulting mass
//! distribution over n-alkanes follows the classical single-parameter
//! polymerization statistics, with everything past C30 folded into the
//! last bin.

use crate::consts::{celsius_to_kelvin, molar_mass};

/// Number of explicit alkane bins; heavier chains lump into bin 30.
pub const N_ALKANES: usize = 30;

/// Chain growth probability as a function of reactor temperature (deg C),
/// pressure (bar), and the H2 mass fraction of the fresh CO/H2 feed.
///
/// Composition enters through the CO mole fraction of the binary feed;
/// growth increases with CO-rich feeds, lower temperatures, and higher
/// pressures. The result is clamped to (0, 1).
pub fn chain_growth_probability(t_celsius: f64, p_bar: f64, w_h2_feed: f64) -> f64 {
    let n_h2 = w_h2_feed / molar_mass::H2;
    let n_co = (1.0 - w_h2_feed) / molar_mass::CO;
    let y_co = n_co / (n_co + n_h2);
    let feed = 0.2332 * y_co + 0.633;
    let temp = 1.0 - 0.0039 * (celsius_to_kelvin(t_celsius) - 533.0);
    let pressure = 1.0 + 0.018 * (p_bar / 30.0).ln();
    (feed * temp * pressure).clamp(1e-6, 1.0 - 1e-6)
}

/// Mass fraction of the n-alkane C_n H_{2n+2} in the hydrocarbon product
/// for chain growth probability `alpha`.
pub fn asf_mass_fraction(n: usize, alpha: f64) -> f64 {
    let g = 1.0 - alpha;
    n as f64 * g * g * alpha.powi(n as i32 - 1)
}

/// Combined mass fraction of all chains longer than C30.
pub fn asf_tail_fraction(alpha: f64) -> f64 {
    alpha.powi(N_ALKANES as i32) * ((N_ALKANES as f64 + 1.0) - N_ALKANES as f64 * alpha)
}

/// Mass fractions of C1..C30 where the C30 bin absorbs the heavy tail;
/// the result sums to one exactly (up to rounding).
pub fn asf_weight_fractions(alpha: f64) -> [f64; N_ALKANES] {
    let mut w = [0.0; N_ALKANES];
    for (i, slot) in w.iter_mut().enumerate() {
        *slot = asf_mass_fraction(i + 1, alpha);
    }
    w[N_ALKANES - 1] += asf_tail_fraction(alpha);
    w
}

/// Product slate aggregated into fuel cuts by carbon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuelCuts {
    /// C1.
    pub methane: f64,
    /// C2..C4.
    pub lpg: f64,
    /// C5..C7.
    pub naphtha: f64,
    /// C8..C16.
    pub kerosene: f64,
    /// C17..C30 including the heavy tail.
    pub heavy: f64,
}

/// Aggregates the ASF distribution into standard fuel cuts.
pub fn lumped_fractions(alpha: f64) -> FuelCuts {
    let w = asf_weight_fractions(alpha);
    let sum = |range: std::ops::RangeInclusive<usize>| -> f64 {
        range.map(|n| w[n - 1]).sum()
    };
    FuelCuts {
        methane: w[0],
        lpg: sum(2..=4),
        naphtha: sum(5..=7),
        kerosene: sum(8..=16),
        heavy: sum(17..=30),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribution_sums_to_one() {
        for &alpha in &[0.3, 0.6, 0.8, 0.85, 0.95] {
            let total: f64 = asf_weight_fractions(alpha).iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "alpha {alpha}: sum {total}");
        }
    }

    #[test]
    fn octane_fraction_reference_value() {
        let w8 = asf_mass_fraction(8, 0.8);
        assert!((w8 - 0.06711).abs() < 1e-5, "w8 = {w8}");
    }

    #[test]
    fn kerosene_cut_reference_value() {
        let cuts = lumped_fractions(0.85);
        assert!((cuts.kerosene - 0.4047).abs() < 1e-4, "kerosene = {}", cuts.kerosene);
    }

    #[test]
    fn growth_probability_reference_point() {
        let a = chain_growth_probability(220.0, 30.0, 0.12);
        assert!((a - 0.8245).abs() < 1e-3, "alpha = {a}");
    }

    #[test]
    fn growth_probability_trends() {
        let base = chain_growth_probability(220.0, 30.0, 0.12);
        assert!(chain_growth_probability(260.0, 30.0, 0.12) < base);
        assert!(chain_growth_probability(220.0, 50.0, 0.12) > base);
        assert!(chain_growth_probability(220.0, 30.0, 0.15) < base);
    }

    #[test]
    fn cuts_cover_distribution() {
        let cuts = lumped_fractions(0.8);
        let total = cuts.methane + cuts.lpg + cuts.naphtha + cuts.kerosene + cuts.heavy;
        assert!((total - 1.0).abs() < 1e-12);
    }
}
