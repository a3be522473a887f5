//! Ready-made superstructures: minimal shapes for unit tests and the full
//! biomass-and-CO2-to-fuel flowsheet at component-resolved granularity.
//!
//! The full flowsheet couples gasification of three biomass types, reverse
//! water-gas shift, autothermal reforming, three electrolysis variants, air
//! separation, direct air capture, acid-gas removal, CO2 storage, and a
//! Fischer-Tropsch reactor producing n-alkanes up to C30. It is the shape
//! used by validation and lumping tests; the solvable desk-scale scenario
//! ships as `scenarios/ft_saf_desk.toml` with hydrocarbons lumped into
//! boiling-range groups.

use std::collections::BTreeMap;

use crate::consts::molar_mass;

use super::{
    CapexBasis, ComponentSpec, ConnectionSpec, FlowCoupling, Formula, Globals, HeatPortMode,
    HeatPortSpec, InputBinding, InputTarget, LinearProcess, OutputBinding, OutputTarget, PortSel,
    PortSpec, ProcessKind, ProcessSpec, SourceData, SuperstructureSpec, SurrogateProcess, Tag,
    TemperatureSpec,
};

fn comp(id: &str, molar_mass: f64, lhv: f64, tags: &[Tag]) -> ComponentSpec {
    ComponentSpec {
        id: id.to_string(),
        molar_mass,
        lhv,
        tags: tags.to_vec(),
        source: None,
        formula: None,
    }
}

fn source(mut c: ComponentSpec, cost: f64, emission: f64) -> ComponentSpec {
    c.tags.push(Tag::Source);
    c.source = Some(SourceData { cost, emission });
    c
}

fn with_formula(mut c: ComponentSpec, f: Formula) -> ComponentSpec {
    c.formula = Some(f);
    c
}

fn port(index: usize, allowed: Option<&[&str]>) -> PortSpec {
    PortSpec {
        index,
        allowed: allowed.map(|list| list.iter().map(|s| s.to_string()).collect()),
    }
}

fn sel(s: &str) -> PortSel {
    s.parse().unwrap()
}

fn conn(from: &str, to: &str) -> ConnectionSpec {
    ConnectionSpec {
        from: from.parse().unwrap(),
        to: to.parse().unwrap(),
    }
}

fn default_globals() -> Globals {
    Globals {
        operating_hours: 8760.0,
        interest_rate: 0.07,
        lifetime_years: 20.0,
        electricity_price: 0.07,
        heat_price: 0.03,
        electricity_emission: 0.10,
        heat_emission: 0.20,
        delta_t_min: 10.0,
        flow_cap: 60_000.0,
        big_m_heat: None,
    }
}

/// One process, one inlet, one outlet, two components, no connections.
/// `feed` is purchasable; the converter turns it into `prod`.
pub fn single_converter_spec() -> SuperstructureSpec {
    let components = vec![
        source(comp("feed", 30.0, 0.0, &[]), 0.05, 0.2),
        comp("prod", 30.0, 10.0, &[Tag::KeyEligible]),
    ];
    let converter = ProcessSpec {
        id: "Converter".to_string(),
        inlet_ports: vec![port(1, None)],
        outlet_ports: vec![port(1, None)],
        heat_ports: vec![],
        kind: ProcessKind::Linear(LinearProcess {
            stoich: BTreeMap::from([("feed".to_string(), -1.0), ("prod".to_string(), 1.0)]),
            key_component: "prod".to_string(),
            specific_work: -0.5,
            capex: CapexBasis::PerScale(1000.0),
        }),
    };
    SuperstructureSpec {
        components,
        processes: vec![converter],
        connections: vec![],
        globals: default_globals(),
        rules: Default::default(),
    }
}

/// Water electrolysis in isolation, with the coefficient convention where
/// the key component carries a fractional coefficient: per 9 kg of water,
/// 1 kg hydrogen and 8 kg oxygen.
pub fn electrolysis_unit_spec() -> SuperstructureSpec {
    let components = vec![
        source(comp("h2o", molar_mass::H2O, 0.0, &[]), 0.002, 0.0),
        comp("h2", molar_mass::H2, 33.3, &[Tag::KeyEligible]),
        comp("o2", molar_mass::O2, 0.0, &[Tag::KeyEligible]),
    ];
    let cell = ProcessSpec {
        id: "Electrolysis".to_string(),
        inlet_ports: vec![port(1, Some(&["h2o"]))],
        outlet_ports: vec![port(1, Some(&["h2"])), port(2, Some(&["o2"]))],
        heat_ports: vec![],
        kind: ProcessKind::Linear(LinearProcess {
            stoich: BTreeMap::from([
                ("h2o".to_string(), -1.0),
                ("h2".to_string(), 1.0 / 9.0),
                ("o2".to_string(), 8.0 / 9.0),
            ]),
            key_component: "h2".to_string(),
            specific_work: -53.0,
            capex: CapexBasis::PerScale(30_000.0),
        }),
    };
    SuperstructureSpec {
        components,
        processes: vec![cell],
        connections: vec![],
        globals: default_globals(),
        rules: Default::default(),
    }
}

/// Two chained converters sharing three unrestricted components, used by
/// splitter-equation counting tests.
pub fn chain_spec() -> SuperstructureSpec {
    let components = vec![
        source(comp("a", 20.0, 0.0, &[]), 0.1, 0.1),
        comp("b", 20.0, 0.0, &[Tag::KeyEligible]),
        comp("c", 20.0, 0.0, &[Tag::KeyEligible]),
    ];
    let first = ProcessSpec {
        id: "First".to_string(),
        inlet_ports: vec![port(1, None)],
        outlet_ports: vec![port(1, None)],
        heat_ports: vec![],
        kind: ProcessKind::Linear(LinearProcess {
            stoich: BTreeMap::from([("a".to_string(), -1.0), ("b".to_string(), 1.0)]),
            key_component: "b".to_string(),
            specific_work: 0.0,
            capex: CapexBasis::PerScale(100.0),
        }),
    };
    let second = ProcessSpec {
        id: "Second".to_string(),
        inlet_ports: vec![port(1, None)],
        outlet_ports: vec![port(1, None)],
        heat_ports: vec![],
        kind: ProcessKind::Linear(LinearProcess {
            stoich: BTreeMap::from([("b".to_string(), -1.0), ("c".to_string(), 1.0)]),
            key_component: "c".to_string(),
            specific_work: 0.0,
            capex: CapexBasis::PerScale(100.0),
        }),
    };
    SuperstructureSpec {
        components,
        processes: vec![first, second],
        connections: vec![conn("First.out1", "Second.in1")],
        globals: default_globals(),
        rules: Default::default(),
    }
}

/// Two production routes with different cost and emission profiles feeding a
/// shared blending step. All ports carry single components, so the model is
/// a pure MILP; used by Pareto-sweep and solver tests.
pub fn two_route_spec() -> SuperstructureSpec {
    let components = vec![
        source(comp("feed_a", 30.0, 0.0, &[]), 0.02, 2.0),
        source(comp("feed_b", 30.0, 0.0, &[]), 0.30, 0.1),
        comp("prod", 30.0, 10.0, &[Tag::KeyEligible]),
    ];
    let route = |id: &str, feed: &str, work: f64, capex: f64| ProcessSpec {
        id: id.to_string(),
        inlet_ports: vec![port(1, Some(&[feed]))],
        outlet_ports: vec![port(1, Some(&["prod"]))],
        heat_ports: vec![],
        kind: ProcessKind::Linear(LinearProcess {
            stoich: BTreeMap::from([(feed.to_string(), -1.0), ("prod".to_string(), 1.0)]),
            key_component: "prod".to_string(),
            specific_work: work,
            capex: CapexBasis::PerScale(capex),
        }),
    };
    let blend = ProcessSpec {
        id: "Blend".to_string(),
        inlet_ports: vec![port(1, Some(&["prod"]))],
        outlet_ports: vec![port(1, Some(&["prod"]))],
        heat_ports: vec![],
        kind: ProcessKind::Linear(LinearProcess {
            stoich: BTreeMap::new(),
            key_component: "prod".to_string(),
            specific_work: 0.0,
            capex: CapexBasis::PerScale(10.0),
        }),
    };
    let mut spec = SuperstructureSpec {
        components,
        processes: vec![
            route("RouteA", "feed_a", -0.2, 500.0),
            route("RouteB", "feed_b", -0.1, 2000.0),
            blend,
        ],
        connections: vec![
            conn("RouteA.out1", "Blend.in1"),
            conn("RouteB.out1", "Blend.in1"),
        ],
        globals: default_globals(),
        rules: Default::default(),
    };
    spec.rules.production_targets.push(super::ProductionTarget {
        port: "Blend.out1".parse().unwrap(),
        rate: 100.0,
    });
    spec
}

/// Identifier of the n-alkane with `n` carbons within the full flowsheet.
pub fn alkane_id(n: usize) -> String {
    format!("c{n}")
}

fn alkane_component(n: usize) -> ComponentSpec {
    let mut tags = vec![Tag::Hydrocarbon];
    match n {
        5..=7 => tags.push(Tag::Gasoline),
        8..=16 => tags.push(Tag::Kerosene),
        17..=30 => tags.push(Tag::Diesel),
        _ => {}
    }
    // Heating value declines gently with chain length.
    let lhv = 11.3 + 2.6 / n as f64;
    let mut c = comp(&alkane_id(n), molar_mass::alkane(n), lhv, &tags);
    c.formula = Some(Formula {
        c: n as f64,
        h: 2.0 * n as f64 + 2.0,
        o: 0.0,
    });
    c
}

/// All 47 components of the full flowsheet.
pub fn full_component_set() -> Vec<ComponentSpec> {
    let mut components: Vec<ComponentSpec> = Vec::new();
    for n in 1..=30 {
        let mut c = alkane_component(n);
        if n == 1 {
            // Methane doubles as purchasable natural gas for reforming.
            c = source(c, 0.25, 0.35);
            c.tags.push(Tag::KeyEligible);
        }
        components.push(c);
    }
    components.extend([
        with_formula(
            source(comp("pine", 23.06192, 4.9, &[Tag::Biomass]), 0.08, -1.7788),
            Formula { c: 1.0, h: 1.44, o: 0.60 },
        ),
        with_formula(
            source(comp("miscanthus", 23.57213, 4.7, &[Tag::Biomass]), 0.06, -1.7004),
            Formula { c: 1.0, h: 1.47, o: 0.63 },
        ),
        with_formula(
            source(comp("wheat_straw", 23.87195, 4.5, &[Tag::Biomass]), 0.04, -1.6314),
            Formula { c: 1.0, h: 1.45, o: 0.65 },
        ),
        comp("ash", 60.08, 0.0, &[]),
        source(comp("h2o", molar_mass::H2O, 0.0, &[]), 0.002, 0.0),
        comp("h2o_waste", molar_mass::H2O, 0.0, &[]),
        comp("nh3", 17.031, 0.0, &[]),
        with_formula(
            comp("h2", molar_mass::H2, 33.3, &[Tag::KeyEligible]),
            Formula { c: 0.0, h: 2.0, o: 0.0 },
        ),
        with_formula(
            comp("o2", molar_mass::O2, 0.0, &[Tag::KeyEligible]),
            Formula { c: 0.0, h: 0.0, o: 2.0 },
        ),
        comp("n2", molar_mass::N2, 0.0, &[]),
        source(comp("air", 28.96, 0.0, &[]), 0.0, 0.0),
        with_formula(
            comp("co", molar_mass::CO, 2.8, &[Tag::KeyEligible]),
            Formula { c: 1.0, h: 0.0, o: 1.0 },
        ),
        with_formula(
            source(comp("co2", molar_mass::CO2, 0.0, &[Tag::KeyEligible]), 0.035, 0.0),
            Formula { c: 1.0, h: 0.0, o: 2.0 },
        ),
        with_formula(
            source(comp("co2_atm", molar_mass::CO2, 0.0, &[]), 0.0, -1.0),
            Formula { c: 1.0, h: 0.0, o: 2.0 },
        ),
        with_formula(comp("char", 12.011, 9.1, &[]), Formula { c: 1.0, h: 0.0, o: 0.0 }),
        with_formula(
            comp("tar", 120.195, 10.5, &[]),
            Formula { c: 9.0, h: 12.0, o: 0.0 },
        ),
        source(comp("olivine", 140.69, 0.0, &[]), 0.15, 0.05),
    ]);
    components
}

/// Mass-based stoichiometry of water electrolysis per kg of hydrogen.
pub fn electrolysis_stoich() -> BTreeMap<String, f64> {
    let water_per_h2 = molar_mass::H2O / molar_mass::H2;
    BTreeMap::from([
        ("h2o".to_string(), -water_per_h2),
        ("h2".to_string(), 1.0),
        ("o2".to_string(), water_per_h2 - 1.0),
    ])
}

/// Mass-based stoichiometry of autothermal reforming of methane per kg of
/// CO produced. Blends steam reforming with partial combustion and a small
/// shift contribution; exactly mass balanced.
pub fn atr_stoich() -> BTreeMap<String, f64> {
    // Per mol CH4: 0.78 steam reforming (CH4 + H2O -> CO + 3 H2),
    // 0.22 combustion (CH4 + 2 O2 -> CO2 + 2 H2O), 0.05 water-gas shift
    // of the produced CO (CO + H2O -> CO2 + H2).
    let smr = 0.78;
    let cmb = 0.22;
    let wgs = 0.05;
    let n_co = smr - wgs;
    let n_h2 = 3.0 * smr + wgs;
    let n_co2 = cmb + wgs;
    let n_h2o = -smr + 2.0 * cmb - wgs;
    let n_o2 = -2.0 * cmb;
    let m_co = n_co * molar_mass::CO;
    BTreeMap::from([
        (alkane_id(1), -molar_mass::CH4 / m_co),
        ("h2".to_string(), n_h2 * molar_mass::H2 / m_co),
        ("co2".to_string(), n_co2 * molar_mass::CO2 / m_co),
        ("h2o".to_string(), n_h2o * molar_mass::H2O / m_co),
        ("o2".to_string(), n_o2 * molar_mass::O2 / m_co),
        ("co".to_string(), 1.0),
    ])
}

/// Mass-based stoichiometry of cryogenic air separation per kg of oxygen,
/// with air as a pseudo-component of 23.1 wt% oxygen.
pub fn air_separation_stoich() -> BTreeMap<String, f64> {
    let o2_frac = 0.231;
    BTreeMap::from([
        ("air".to_string(), -1.0 / o2_frac),
        ("o2".to_string(), 1.0),
        ("n2".to_string(), 1.0 / o2_frac - 1.0),
    ])
}

fn electrolysis_process(id: &str, work: f64, capex: f64, heat: HeatPortSpec) -> ProcessSpec {
    ProcessSpec {
        id: id.to_string(),
        inlet_ports: vec![port(1, Some(&["h2o"]))],
        outlet_ports: vec![port(1, Some(&["h2"])), port(2, Some(&["o2"]))],
        heat_ports: vec![heat],
        kind: ProcessKind::Linear(LinearProcess {
            stoich: electrolysis_stoich(),
            key_component: "h2".to_string(),
            specific_work: work,
            capex: CapexBasis::PerScale(capex),
        }),
    }
}

fn hot(index: usize, t: f64, q: f64) -> HeatPortSpec {
    HeatPortSpec {
        index,
        mode: HeatPortMode::Hot,
        temperature: TemperatureSpec::Fixed(t),
        specific_duty: Some(q),
    }
}

fn cold(index: usize, t: f64, q: f64) -> HeatPortSpec {
    HeatPortSpec {
        index,
        mode: HeatPortMode::Cold,
        temperature: TemperatureSpec::Fixed(t),
        specific_duty: Some(q),
    }
}

fn in_binding(input: usize, target: InputTarget) -> InputBinding {
    InputBinding { input, target }
}

fn out_binding(output: usize, target: OutputTarget) -> OutputBinding {
    OutputBinding { output, target }
}

fn w_out(port: usize, component: &str) -> OutputTarget {
    OutputTarget::MassFraction {
        port,
        component: component.to_string(),
    }
}

/// The full component-resolved flowsheet: 47 components, 11 processes, and
/// every admissible routing between them.
pub fn full_ft_saf_spec() -> SuperstructureSpec {
    let components = full_component_set();

    let gasification = ProcessSpec {
        id: "Gasification".to_string(),
        inlet_ports: vec![
            port(1, Some(&["pine", "miscanthus", "wheat_straw"])),
            port(2, Some(&["h2o"])),
            port(3, Some(&["o2"])),
            port(4, Some(&["co2"])),
            port(5, Some(&["h2o"])),
        ],
        outlet_ports: vec![
            port(1, Some(&["co", "co2", "h2", "h2o", "c1"])),
            port(2, Some(&["h2o", "nh3", "tar"])),
            port(3, Some(&["ash", "char", "olivine"])),
        ],
        heat_ports: vec![
            HeatPortSpec {
                index: 1,
                mode: HeatPortMode::Cold,
                temperature: TemperatureSpec::Fixed(450.0),
                specific_duty: None,
            },
            HeatPortSpec {
                index: 2,
                mode: HeatPortMode::Dual,
                temperature: TemperatureSpec::FromInput { input: 7 },
                specific_duty: None,
            },
            HeatPortSpec {
                index: 3,
                mode: HeatPortMode::Hot,
                temperature: TemperatureSpec::Fixed(300.0),
                specific_duty: None,
            },
        ],
        kind: ProcessKind::Surrogate(SurrogateProcess {
            network_id: "gasification".to_string(),
            input_bindings: vec![
                in_binding(1, InputTarget::OneHot { component: "pine".to_string() }),
                in_binding(2, InputTarget::OneHot { component: "miscanthus".to_string() }),
                in_binding(3, InputTarget::OneHot { component: "wheat_straw".to_string() }),
                in_binding(4, InputTarget::FlowRatio { numerator: sel("in2"), denominator: sel("in1") }),
                in_binding(5, InputTarget::FlowRatio { numerator: sel("in4"), denominator: sel("in1") }),
                in_binding(6, InputTarget::FlowRatio { numerator: sel("in3"), denominator: sel("in1") }),
                in_binding(7, InputTarget::Temperature { heat_port: 2 }),
            ],
            output_bindings: vec![
                out_binding(1, w_out(1, "co")),
                out_binding(2, w_out(1, "co2")),
                out_binding(3, w_out(1, "h2")),
                out_binding(4, w_out(1, "c1")),
                out_binding(5, w_out(2, "nh3")),
                out_binding(6, w_out(2, "tar")),
                out_binding(7, w_out(3, "char")),
                out_binding(8, OutputTarget::PortYield { port: 2 }),
                out_binding(9, OutputTarget::PortYield { port: 3 }),
                out_binding(10, OutputTarget::SpecificDuty { heat_port: 1 }),
                out_binding(11, OutputTarget::SpecificDuty { heat_port: 2 }),
                out_binding(12, OutputTarget::SpecificDuty { heat_port: 3 }),
            ],
            capex_per_inlet_flow: 12_000.0,
            flow_couplings: vec![FlowCoupling {
                port: sel("in5"),
                reference: sel("in1"),
                ratio: 0.3,
            }],
        }),
    };

    let rwgs = ProcessSpec {
        id: "RWGS".to_string(),
        inlet_ports: vec![port(1, Some(&["co2", "h2"]))],
        outlet_ports: vec![
            port(1, Some(&["co", "co2", "h2"])),
            port(2, Some(&["h2o"])),
        ],
        heat_ports: vec![
            HeatPortSpec {
                index: 1,
                mode: HeatPortMode::Cold,
                temperature: TemperatureSpec::FromInput { input: 1 },
                specific_duty: None,
            },
            HeatPortSpec {
                index: 2,
                mode: HeatPortMode::Hot,
                temperature: TemperatureSpec::Fixed(300.0),
                specific_duty: None,
            },
        ],
        kind: ProcessKind::Surrogate(SurrogateProcess {
            network_id: "rwgs".to_string(),
            input_bindings: vec![
                in_binding(1, InputTarget::Temperature { heat_port: 1 }),
                in_binding(2, InputTarget::MassFraction { port: sel("in1"), component: "h2".to_string() }),
            ],
            output_bindings: vec![
                out_binding(1, w_out(1, "co")),
                out_binding(2, w_out(1, "h2")),
                out_binding(3, OutputTarget::PortYield { port: 2 }),
                out_binding(4, OutputTarget::SpecificDuty { heat_port: 1 }),
                out_binding(5, OutputTarget::SpecificDuty { heat_port: 2 }),
                out_binding(6, OutputTarget::SpecificWork),
            ],
            capex_per_inlet_flow: 1500.0,
            flow_couplings: vec![],
        }),
    };

    let ft_out1: Vec<String> = (1..=30)
        .map(alkane_id)
        .chain(["h2o_waste".to_string()])
        .collect();
    let ft_out1_refs: Vec<&str> = ft_out1.iter().map(|s| s.as_str()).collect();
    let mut ft_outputs: Vec<OutputBinding> = Vec::new();
    // Fractions of C2..C30 at the product port; C1 closes the fraction sum.
    for n in 2..=30 {
        ft_outputs.push(out_binding(n - 1, w_out(1, &alkane_id(n))));
    }
    ft_outputs.push(out_binding(30, w_out(1, "h2o_waste")));
    ft_outputs.push(out_binding(31, w_out(2, "h2")));
    ft_outputs.push(out_binding(32, w_out(2, "c1")));
    ft_outputs.push(out_binding(33, OutputTarget::PortYield { port: 2 }));
    ft_outputs.push(out_binding(34, OutputTarget::PortYield { port: 3 }));
    ft_outputs.push(out_binding(35, OutputTarget::SpecificDuty { heat_port: 1 }));
    ft_outputs.push(out_binding(36, OutputTarget::SpecificDuty { heat_port: 2 }));
    ft_outputs.push(out_binding(37, OutputTarget::SpecificWork));

    let ft = ProcessSpec {
        id: "FT".to_string(),
        inlet_ports: vec![port(1, Some(&["co", "h2"]))],
        outlet_ports: vec![
            port(1, Some(&ft_out1_refs)),
            port(2, Some(&["co", "h2", "c1"])),
            port(3, Some(&["h2o"])),
        ],
        heat_ports: vec![
            HeatPortSpec {
                index: 1,
                mode: HeatPortMode::Hot,
                temperature: TemperatureSpec::FromInput { input: 1 },
                specific_duty: None,
            },
            HeatPortSpec {
                index: 2,
                mode: HeatPortMode::Hot,
                temperature: TemperatureSpec::Fixed(40.0),
                specific_duty: None,
            },
        ],
        kind: ProcessKind::Surrogate(SurrogateProcess {
            network_id: "ft".to_string(),
            input_bindings: vec![
                in_binding(1, InputTarget::Temperature { heat_port: 1 }),
                in_binding(2, InputTarget::Pressure),
                in_binding(3, InputTarget::MassFraction { port: sel("in1"), component: "h2".to_string() }),
            ],
            output_bindings: ft_outputs,
            capex_per_inlet_flow: 8000.0,
            flow_couplings: vec![],
        }),
    };

    let aec = electrolysis_process("AEC", -53.0, 30_000.0, hot(1, 70.0, 3.0));
    let pemec = electrolysis_process("PEMEC", -55.0, 40_000.0, hot(1, 65.0, 3.5));
    let soec = electrolysis_process("SOEC", -40.0, 55_000.0, cold(1, 150.0, -8.0));

    let atr = ProcessSpec {
        id: "ATR".to_string(),
        inlet_ports: vec![
            port(1, Some(&["c1"])),
            port(2, Some(&["h2o"])),
            port(3, Some(&["o2"])),
        ],
        outlet_ports: vec![port(1, Some(&["co", "h2", "co2"]))],
        heat_ports: vec![hot(1, 300.0, 0.55)],
        kind: ProcessKind::Linear(LinearProcess {
            stoich: atr_stoich(),
            key_component: "co".to_string(),
            specific_work: -0.12,
            capex: CapexBasis::PerScale(4000.0),
        }),
    };

    let dac = ProcessSpec {
        id: "DAC".to_string(),
        inlet_ports: vec![port(1, Some(&["co2_atm"]))],
        outlet_ports: vec![port(1, Some(&["co2"]))],
        heat_ports: vec![cold(1, 100.0, -1.6)],
        kind: ProcessKind::Linear(LinearProcess {
            stoich: BTreeMap::from([
                ("co2_atm".to_string(), -1.0),
                ("co2".to_string(), 1.0),
            ]),
            key_component: "co2".to_string(),
            specific_work: -0.25,
            capex: CapexBasis::PerScale(9000.0),
        }),
    };

    let crd = ProcessSpec {
        id: "CRD".to_string(),
        inlet_ports: vec![port(1, Some(&["air"]))],
        outlet_ports: vec![port(1, Some(&["o2"])), port(2, Some(&["n2"]))],
        heat_ports: vec![],
        kind: ProcessKind::Linear(LinearProcess {
            stoich: air_separation_stoich(),
            key_component: "o2".to_string(),
            specific_work: -0.30,
            capex: CapexBasis::PerScale(2500.0),
        }),
    };

    let agr = ProcessSpec {
        id: "AGR".to_string(),
        inlet_ports: vec![port(1, Some(&["co", "co2", "h2", "h2o", "c1"]))],
        outlet_ports: vec![
            port(1, Some(&["co", "h2"])),
            port(2, Some(&["co2"])),
            port(3, Some(&["h2o"])),
            port(4, Some(&["c1"])),
        ],
        heat_ports: vec![cold(1, 130.0, -1.0)],
        kind: ProcessKind::Linear(LinearProcess {
            stoich: BTreeMap::new(),
            key_component: "co2".to_string(),
            specific_work: -0.15,
            capex: CapexBasis::PerInletFlow(500.0),
        }),
    };

    let cs = ProcessSpec {
        id: "CS".to_string(),
        inlet_ports: vec![port(1, Some(&["co2"]))],
        outlet_ports: vec![port(1, Some(&["co2"]))],
        heat_ports: vec![],
        kind: ProcessKind::Linear(LinearProcess {
            stoich: BTreeMap::new(),
            key_component: "co2".to_string(),
            specific_work: -0.12,
            capex: CapexBasis::PerScale(300.0),
        }),
    };

    let connections = vec![
        conn("Gasification.out1", "AGR.in1"),
        conn("RWGS.out1", "AGR.in1"),
        conn("ATR.out1", "AGR.in1"),
        conn("AGR.out1", "FT.in1"),
        conn("AGR.out2", "CS.in1"),
        conn("AGR.out2", "RWGS.in1"),
        conn("AGR.out2", "Gasification.in4"),
        conn("AEC.out1", "FT.in1"),
        conn("AEC.out1", "RWGS.in1"),
        conn("AEC.out2", "Gasification.in3"),
        conn("PEMEC.out1", "FT.in1"),
        conn("PEMEC.out1", "RWGS.in1"),
        conn("PEMEC.out2", "Gasification.in3"),
        conn("SOEC.out1", "FT.in1"),
        conn("SOEC.out1", "RWGS.in1"),
        conn("SOEC.out2", "Gasification.in3"),
        conn("CRD.out1", "Gasification.in3"),
        conn("CRD.out1", "ATR.in3"),
        conn("DAC.out1", "RWGS.in1"),
        conn("DAC.out1", "CS.in1"),
        conn("DAC.out1", "Gasification.in4"),
    ];

    let mut spec = SuperstructureSpec {
        components,
        processes: vec![
            gasification,
            rwgs,
            ft,
            aec,
            pemec,
            soec,
            atr,
            dac,
            crd,
            agr,
            cs,
        ],
        connections,
        globals: default_globals(),
        rules: Default::default(),
    };
    spec.rules.production_targets.push(super::ProductionTarget {
        port: "FT.out1".parse().unwrap(),
        rate: 3000.0,
    });
    spec.rules.dominance.push(super::DominanceRule {
        port: "FT.out1".parse().unwrap(),
        lesser: vec![
            super::CompSelector::Tagged(Tag::Gasoline),
            super::CompSelector::Id("h2o_waste".to_string()),
        ],
        greater: vec![super::CompSelector::Tagged(Tag::Kerosene)],
    });
    spec.rules.dominance.push(super::DominanceRule {
        port: "FT.out1".parse().unwrap(),
        lesser: vec![
            super::CompSelector::Tagged(Tag::Diesel),
            super::CompSelector::Id("h2o_waste".to_string()),
        ],
        greater: vec![super::CompSelector::Tagged(Tag::Kerosene)],
    });
    // Sequestered CO2 and landfilled solids are not booked as oxidized;
    // purged CO is attributed to the fuel product.
    spec.rules.combustion_exempt.push("CS.out1".parse().unwrap());
    spec.rules
        .combustion_exempt
        .push("Gasification.out3".parse().unwrap());
    spec.rules.purge = Some(super::PurgeSpec {
        port: "FT.out2".parse().unwrap(),
        component: "co".to_string(),
    });
    spec
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_spec_has_expected_sizes() {
        let spec = full_ft_saf_spec();
        assert_eq!(spec.components.len(), 47);
        assert_eq!(spec.processes.len(), 11);
    }

    #[test]
    fn conversion_stoichiometries_balance_mass() {
        for stoich in [electrolysis_stoich(), atr_stoich(), air_separation_stoich()] {
            let total: f64 = stoich.values().sum();
            // Positive products exactly offset consumed reactants.
            let scale: f64 = stoich.values().map(|v| v.abs()).sum();
            assert!(total.abs() / scale < 1e-12, "imbalance {total}");
        }
    }
}
