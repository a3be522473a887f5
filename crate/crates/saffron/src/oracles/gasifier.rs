//! Synthetic biomass gasification flowsheet oracle.
//!
//! One kilogram of biomass is decomposed at 450 deg C, gasified with steam,
//! CO2, and sub-stoichiometric O2 at the reactor temperature, stripped of
//! solids, cooled to 300 deg C, and water-scrubbed. The gas phase reaches
//! simultaneous water-gas shift and steam methane reforming equilibrium at
//! one bar, solved by an outer bisection on methane with an exact inner
//! shift quadratic. Elemental and total mass balances close exactly; ash,
//! nitrogen (as ammonia), char, and tar yields are smooth functions of the
//! feedstock and temperature.
//!
//! Yields and duties are specific to one kilogram of total process inlet,
//! which includes the scrubber water coupled at 0.3 kg per kg biomass.

use crate::consts::{enthalpy_of_formation as hf, heat_capacity as cp, molar_mass, WATER_LATENT_HEAT};

/// Scrubber water per kg of biomass, mirrored by the flowsheet coupling.
pub const SCRUBBER_WATER_RATIO: f64 = 0.3;
/// Pyrolysis endotherm, kJ per gram of biomass.
const PYROLYSIS_HEAT: f64 = 0.3;
/// Temperature of the decomposition stage, deg C.
const DECOMPOSITION_T: f64 = 450.0;
/// Gas cooldown target upstream of the scrubber, deg C.
const COOLDOWN_T: f64 = 300.0;
/// Ammonia gas-phase heat capacity, kJ/(mol K).
const CP_NH3: f64 = 0.037;
/// Tar vapor heat capacity, kJ/(mol K).
const CP_TAR: f64 = 0.2;
/// Char heat capacity, kJ/(mol K).
const CP_CHAR: f64 = 0.020;
/// Ammonia enthalpy of formation, kJ/mol.
const HF_NH3: f64 = -45.9;
/// Water vapor pressure at the 40 deg C scrubber outlet, bar. The product
/// gas leaves water-saturated; the rest of the equilibrium moisture
/// condenses into the waste water stream.
const SCRUBBER_VAPOR_PRESSURE: f64 = 0.0738;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiomassKind {
    Pine,
    Miscanthus,
    WheatStraw,
}

/// Feedstock data: organic formula CH_x O_y, molar mass, heating value, and
/// inert fractions.
struct BiomassData {
    /// H per C in the organic fraction.
    x: f64,
    /// O per C in the organic fraction.
    y: f64,
    /// Molar mass of the CH_x O_y unit, g/mol.
    molar_mass: f64,
    /// Lower heating value, kWh/kg.
    lhv: f64,
    /// Ash mass fraction.
    ash: f64,
    /// Fuel-bound nitrogen mass fraction, released as ammonia.
    nitrogen: f64,
}

impl BiomassKind {
    fn data(self) -> BiomassData {
        match self {
            BiomassKind::Pine => BiomassData {
                x: 1.44,
                y: 0.60,
                molar_mass: 23.06192,
                lhv: 4.9,
                ash: 0.005,
                nitrogen: 0.002,
            },
            BiomassKind::Miscanthus => BiomassData {
                x: 1.47,
                y: 0.63,
                molar_mass: 23.57213,
                lhv: 4.7,
                ash: 0.025,
                nitrogen: 0.004,
            },
            BiomassKind::WheatStraw => BiomassData {
                x: 1.45,
                y: 0.65,
                molar_mass: 23.87195,
                lhv: 4.5,
                ash: 0.055,
                nitrogen: 0.006,
            },
        }
    }

    /// One-hot encoding in fixed (pine, miscanthus, wheat straw) order.
    pub fn one_hot(self) -> [f64; 3] {
        match self {
            BiomassKind::Pine => [1.0, 0.0, 0.0],
            BiomassKind::Miscanthus => [0.0, 1.0, 0.0],
            BiomassKind::WheatStraw => [0.0, 0.0, 1.0],
        }
    }

    pub fn all() -> [BiomassKind; 3] {
        [BiomassKind::Pine, BiomassKind::Miscanthus, BiomassKind::WheatStraw]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GasifierInput {
    pub biomass: BiomassKind,
    /// Steam to biomass mass ratio.
    pub steam_ratio: f64,
    /// CO2 to biomass mass ratio.
    pub co2_ratio: f64,
    /// O2 to biomass mass ratio.
    pub o2_ratio: f64,
    /// Gasifier temperature, deg C.
    pub t_celsius: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct GasifierOutput {
    /// Clean gas composition (balance is water vapor).
    pub w_co: f64,
    pub w_co2: f64,
    pub w_h2: f64,
    pub w_ch4: f64,
    pub w_h2o: f64,
    /// Waste water composition (balance is water).
    pub w_nh3: f64,
    pub w_tar: f64,
    /// Char fraction of the solids outlet (balance is ash).
    pub w_char: f64,
    /// Waste water outlet mass per kg of total inlet.
    pub yield_waste_water: f64,
    /// Solids outlet mass per kg of total inlet.
    pub yield_solids: f64,
    /// Gas outlet mass per kg of total inlet.
    pub yield_gas: f64,
    /// Decomposition and agent preheat demand, kWh per kg inlet (negative).
    pub duty_decomposition: f64,
    /// Net reactor heat at temperature, kWh per kg inlet (either sign).
    pub duty_reactor: f64,
    /// Gas cooldown release, kWh per kg inlet (positive).
    pub duty_cooldown: f64,
    /// Worst equilibrium residual in log units at the solution.
    pub residual: f64,
}

impl GasifierOutput {
    /// Network output order: gas CO, CO2, H2, CH4 fractions, waste water
    /// ammonia and tar fractions, solids char fraction, waste water and
    /// solids yields, and the three duties.
    pub fn to_network_outputs(&self) -> Vec<f64> {
        vec![
            self.w_co,
            self.w_co2,
            self.w_h2,
            self.w_ch4,
            self.w_nh3,
            self.w_tar,
            self.w_char,
            self.yield_waste_water,
            self.yield_solids,
            self.duty_decomposition,
            self.duty_reactor,
            self.duty_cooldown,
        ]
    }

    pub fn output_names() -> Vec<String> {
        [
            "w_co_gas",
            "w_co2_gas",
            "w_h2_gas",
            "w_ch4_gas",
            "w_nh3_waste",
            "w_tar_waste",
            "w_char_solids",
            "yield_waste_water",
            "yield_solids",
            "duty_decomposition",
            "duty_reactor",
            "duty_cooldown",
        ]
        .map(str::to_string)
        .to_vec()
    }
}

/// Water-gas shift equilibrium constant (CO + H2O -> CO2 + H2).
fn k_wgs(t_kelvin: f64) -> f64 {
    (4577.8 / t_kelvin - 4.33).exp()
}

/// Steam methane reforming equilibrium constant (CH4 + H2O -> CO + 3 H2)
/// in bar^2.
fn k_smr(t_kelvin: f64) -> f64 {
    (30.114 - 26830.0 / t_kelvin).exp()
}

/// Gas-phase mole vector at equilibrium.
#[derive(Debug, Clone, Copy)]
struct GasMoles {
    co: f64,
    co2: f64,
    h2: f64,
    h2o: f64,
    ch4: f64,
}

impl GasMoles {
    fn total(&self) -> f64 {
        self.co + self.co2 + self.h2 + self.h2o + self.ch4
    }

    fn mass(&self) -> f64 {
        (self.co * molar_mass::CO
            + self.co2 * molar_mass::CO2
            + self.h2 * molar_mass::H2
            + self.h2o * molar_mass::H2O
            + self.ch4 * molar_mass::CH4)
            / 1000.0
    }
}

/// Solves the shift quadratic for fixed methane: distributes the remaining
/// C, H, O pools over CO, CO2, H2, H2O at shift equilibrium.
fn shift_split(c: f64, h: f64, o: f64, k: f64) -> GasMoles {
    // With n_CO = v: n_CO2 = c - v, n_H2O = o - 2c + v, n_H2 = h/2 - o + 2c - v.
    let lo = (2.0 * c - o).max(0.0);
    let b = h / 2.0 - o + 2.0 * c;
    let hi = c.min(b);
    if hi <= lo {
        let v = 0.5 * (lo + hi);
        return GasMoles {
            co: v,
            co2: (c - v).max(0.0),
            h2: (b - v).max(0.0),
            h2o: (o - 2.0 * c + v).max(0.0),
            ch4: 0.0,
        };
    }
    let span = hi - lo;
    let v_min = lo + 1e-12 * span;
    let v_max = hi - 1e-12 * span;
    let qa = 1.0 - k;
    let qb = -(c + b + k * (o - 2.0 * c));
    let qc = c * b;
    let mut v = if qa.abs() < 1e-12 * (1.0 + k) {
        -qc / qb
    } else {
        let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
        let r1 = (-qb - disc) / (2.0 * qa);
        let r2 = (-qb + disc) / (2.0 * qa);
        if r1 > lo && r1 < hi {
            r1
        } else {
            r2
        }
    };
    v = v.max(v_min).min(v_max);
    // Newton polish of the quadratic residual; f is strictly decreasing on
    // the window, so the clamped iteration converges to the interior root.
    for _ in 0..60 {
        let f = (c - v) * (b - v) - k * v * (o - 2.0 * c + v);
        let df = -(b - v) - (c - v) - k * (o - 2.0 * c + v) - k * v;
        let next = (v - f / df).max(v_min).min(v_max);
        if (next - v).abs() < 1e-16 * (1.0 + v) {
            v = next;
            break;
        }
        v = next;
    }
    GasMoles {
        co: v,
        co2: c - v,
        h2: h / 2.0 - o + 2.0 * c - v,
        h2o: o - 2.0 * c + v,
        ch4: 0.0,
    }
}

/// Reforming residual in log units; positive means methane must grow.
fn smr_residual(g: &GasMoles, k: f64) -> f64 {
    let n = g.total();
    (g.co * g.h2.powi(3)).max(1e-300).ln()
        - (k * g.ch4 * g.h2o * n * n).max(1e-300).ln()
}

/// Equilibrates the C/H/O pools over the five gas species.
fn equilibrate(c: f64, h: f64, o: f64, t_kelvin: f64) -> (GasMoles, f64) {
    let kw = k_wgs(t_kelvin);
    let ks = k_smr(t_kelvin);
    let eps = 1e-12 * c;
    // Methane window: enough CH4 to absorb carbon the oxygen pool cannot
    // carry, bounded by the carbon and hydrogen pools and by keeping the
    // residual H pool large enough that the shift split stays feasible.
    let lo = (c - o).max(0.0) + eps;
    let hi = c.min(h / 4.0).min((h + 4.0 * c - 2.0 * o) / 8.0) - 1e-9 * c;
    let eval = |m: f64| -> (GasMoles, f64) {
        let mut g = shift_split(c - m, h - 4.0 * m, o, kw);
        g.ch4 = m;
        let r = smr_residual(&g, ks);
        (g, r)
    };
    if hi <= lo {
        return eval(lo);
    }
    let (mut best, r_lo) = eval(lo);
    if r_lo <= 0.0 {
        return (best, r_lo);
    }
    let (g_hi, r_hi) = eval(hi);
    if r_hi >= 0.0 {
        return (g_hi, r_hi);
    }
    let (mut a, mut bnd) = (lo, hi);
    let mut residual = r_lo;
    for _ in 0..200 {
        let mid = 0.5 * (a + bnd);
        let (g, r) = eval(mid);
        best = g;
        residual = r;
        if r > 0.0 {
            a = mid;
        } else {
            bnd = mid;
        }
        if bnd - a < 1e-17 * c {
            break;
        }
    }
    (best, residual)
}

/// Evaluates the gasifier at one operating point.
pub fn gasifier_oracle(input: GasifierInput) -> GasifierOutput {
    let GasifierInput { biomass, steam_ratio, co2_ratio, o2_ratio, t_celsius } = input;
    let data = biomass.data();
    let t_kelvin = t_celsius + 273.15;

    // Grams per kg of biomass.
    let m_ash = 1000.0 * data.ash;
    let m_n = 1000.0 * data.nitrogen;
    let m_org = 1000.0 - m_ash - m_n;
    let n_org = m_org / data.molar_mass;
    let n_nh3 = m_n / 14.007;
    let m_nh3 = n_nh3 * 17.031;

    // Char and tar yields decline smoothly with temperature.
    let progress = (t_celsius - 800.0) / 500.0;
    let char_c_fraction = 0.05 - 0.04 * progress;
    let tar_fraction = 0.017 - 0.015 * progress;
    let n_char = char_c_fraction * n_org;
    let m_char = n_char * molar_mass::C;
    let m_tar = tar_fraction * m_org;
    let n_tar = m_tar / 120.195;

    let n_steam = 1000.0 * steam_ratio / molar_mass::H2O;
    let n_co2_in = 1000.0 * co2_ratio / molar_mass::CO2;
    let n_o2 = 1000.0 * o2_ratio / molar_mass::O2;

    // Elemental pools entering the gas-phase equilibrium.
    let c_pool = n_org - n_char - 9.0 * n_tar + n_co2_in;
    let h_pool = data.x * n_org - 3.0 * n_nh3 - 12.0 * n_tar + 2.0 * n_steam;
    let o_pool = data.y * n_org + n_steam + 2.0 * n_co2_in + 2.0 * n_o2;
    let (raw_gas, residual) = equilibrate(c_pool, h_pool, o_pool, t_kelvin);

    // Scrubber: gas leaves saturated at 40 deg C and 1 bar; surplus
    // moisture condenses into the waste water.
    let mut gas = raw_gas;
    let n_dry = raw_gas.total() - raw_gas.h2o;
    let n_h2o_sat = n_dry * SCRUBBER_VAPOR_PRESSURE / (1.0 - SCRUBBER_VAPOR_PRESSURE);
    gas.h2o = raw_gas.h2o.min(n_h2o_sat);
    let m_condensate = (raw_gas.h2o - gas.h2o) * molar_mass::H2O;

    let m_gas = gas.mass() * 1000.0;
    let m_scrub = 1000.0 * SCRUBBER_WATER_RATIO;
    let m_waste = m_scrub + m_nh3 + m_tar + m_condensate;
    let m_solids = m_char + m_ash;
    let m_inlet = 1000.0 * (1.0 + steam_ratio + co2_ratio + o2_ratio + SCRUBBER_WATER_RATIO);

    // Formation enthalpies backed out of the heating values so combustion
    // accounting stays consistent with the component data.
    let hf_biomass =
        hf::CO2 + (data.x / 2.0) * hf::H2O_GAS + data.lhv * 3.6 * data.molar_mass;
    let hf_char = hf::CO2 + 9.1 * 3.6 * molar_mass::C;
    let hf_tar = 9.0 * hf::CO2 + 6.0 * hf::H2O_GAS + 10.5 * 3.6 * 120.195;

    // Decomposition and preheat of all agents to 450 deg C.
    let dt_pre = DECOMPOSITION_T - 25.0;
    let steam_heat = molar_mass::H2O * 4.18e-3 * 75.0
        + WATER_LATENT_HEAT * molar_mass::H2O / 1000.0
        + cp::H2O_GAS * (DECOMPOSITION_T - 100.0);
    let q_decomp = -(n_org * cp::BIOMASS_UNIT * dt_pre
        + PYROLYSIS_HEAT * 1000.0
        + n_steam * steam_heat
        + n_co2_in * cp::CO2 * dt_pre
        + n_o2 * cp::O2 * dt_pre);

    // Reactor: formation enthalpy change plus heating products to T.
    let h_products = raw_gas.co * hf::CO
        + raw_gas.co2 * hf::CO2
        + raw_gas.h2o * hf::H2O_GAS
        + raw_gas.ch4 * hf::CH4
        + n_char * hf_char
        + n_tar * hf_tar
        + n_nh3 * HF_NH3;
    let h_inputs = n_org * hf_biomass + n_steam * hf::H2O_GAS + n_co2_in * hf::CO2;
    let dt_rx = t_celsius - DECOMPOSITION_T;
    let sensible_rx = (raw_gas.co * cp::CO
        + raw_gas.co2 * cp::CO2
        + raw_gas.h2 * cp::H2
        + raw_gas.h2o * cp::H2O_GAS
        + raw_gas.ch4 * cp::CH4
        + n_char * CP_CHAR
        + n_tar * CP_TAR
        + n_nh3 * CP_NH3)
        * dt_rx;
    let q_reactor = -((h_products - h_inputs) + sensible_rx);

    // Cooling the solids-free gas from T to 300 deg C, ahead of the
    // scrubber. Scrubber condensation heat is discarded below the
    // recoverable temperature level.
    let q_cool = (raw_gas.co * cp::CO
        + raw_gas.co2 * cp::CO2
        + raw_gas.h2 * cp::H2
        + raw_gas.h2o * cp::H2O_GAS
        + raw_gas.ch4 * cp::CH4
        + n_nh3 * CP_NH3
        + n_tar * CP_TAR)
        * (t_celsius - COOLDOWN_T);

    let per_kg = |kj: f64| kj / 3600.0 / (m_inlet / 1000.0);

    GasifierOutput {
        w_co: gas.co * molar_mass::CO / m_gas,
        w_co2: gas.co2 * molar_mass::CO2 / m_gas,
        w_h2: gas.h2 * molar_mass::H2 / m_gas,
        w_ch4: gas.ch4 * molar_mass::CH4 / m_gas,
        w_h2o: gas.h2o * molar_mass::H2O / m_gas,
        w_nh3: m_nh3 / m_waste,
        w_tar: m_tar / m_waste,
        w_char: m_char / m_solids,
        yield_waste_water: m_waste / m_inlet,
        yield_solids: m_solids / m_inlet,
        yield_gas: m_gas / m_inlet,
        duty_decomposition: per_kg(q_decomp),
        duty_reactor: per_kg(q_reactor),
        duty_cooldown: per_kg(q_cool),
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> GasifierInput {
        GasifierInput {
            biomass: BiomassKind::Pine,
            steam_ratio: 0.4,
            co2_ratio: 0.2,
            o2_ratio: 0.15,
            t_celsius: 950.0,
        }
    }

    #[test]
    fn mass_closes_exactly() {
        for kind in BiomassKind::all() {
            for &(s, c, o, t) in &[
                (0.01, 0.0, 0.05, 800.0),
                (1.0, 1.0, 0.3, 1300.0),
                (0.4, 0.2, 0.15, 950.0),
                (0.05, 0.8, 0.07, 1100.0),
            ] {
                let out = gasifier_oracle(GasifierInput {
                    biomass: kind,
                    steam_ratio: s,
                    co2_ratio: c,
                    o2_ratio: o,
                    t_celsius: t,
                });
                let total = out.yield_gas + out.yield_waste_water + out.yield_solids;
                assert!(
                    (total - 1.0).abs() < 1e-9,
                    "{kind:?} s={s} c={c} o={o} t={t}: closure {total}"
                );
            }
        }
    }

    #[test]
    fn equilibrium_residuals_are_small() {
        for kind in BiomassKind::all() {
            for &t in &[800.0, 1000.0, 1300.0] {
                let out = gasifier_oracle(GasifierInput {
                    biomass: kind,
                    steam_ratio: 0.3,
                    co2_ratio: 0.1,
                    o2_ratio: 0.2,
                    t_celsius: t,
                });
                assert!(out.residual.abs() < 1e-9, "{kind:?} t={t}: {}", out.residual);
            }
        }
    }

    #[test]
    fn gas_fractions_close() {
        let out = gasifier_oracle(base());
        let sum = out.w_co + out.w_co2 + out.w_h2 + out.w_ch4 + out.w_h2o;
        assert!((sum - 1.0).abs() < 1e-12, "gas sum {sum}");
        assert!(out.w_ch4 >= 0.0 && out.w_ch4 < 0.05);
    }

    #[test]
    fn steam_raises_hydrogen() {
        let dry = gasifier_oracle(GasifierInput { steam_ratio: 0.05, ..base() });
        let wet = gasifier_oracle(GasifierInput { steam_ratio: 0.9, ..base() });
        assert!(wet.w_h2 > dry.w_h2);
    }

    #[test]
    fn oxygen_drives_exotherm() {
        let lean = gasifier_oracle(GasifierInput { o2_ratio: 0.05, ..base() });
        let rich = gasifier_oracle(GasifierInput { o2_ratio: 0.3, ..base() });
        assert!(rich.duty_reactor > lean.duty_reactor);
    }

    #[test]
    fn temperature_shifts_to_carbon_monoxide() {
        let cool = gasifier_oracle(GasifierInput { t_celsius: 800.0, ..base() });
        let hot = gasifier_oracle(GasifierInput { t_celsius: 1300.0, ..base() });
        assert!(hot.w_co > cool.w_co);
        assert!(hot.w_ch4 < cool.w_ch4);
    }

    #[test]
    fn duty_signs() {
        let out = gasifier_oracle(base());
        assert!(out.duty_decomposition < 0.0);
        assert!(out.duty_cooldown > 0.0);
    }

    #[test]
    fn feedstocks_differ() {
        let pine = gasifier_oracle(base());
        let straw = gasifier_oracle(GasifierInput {
            biomass: BiomassKind::WheatStraw,
            ..base()
        });
        assert!(straw.yield_solids > pine.yield_solids);
        assert!(straw.w_nh3 > pine.w_nh3);
    }
}
