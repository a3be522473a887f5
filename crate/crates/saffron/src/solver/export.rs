//! Model writers and readers for two interchange formats.
//!
//! The lp-text dialect follows the common LP-file shape (Minimize, Subject
//! To, Bounds, Binaries) with the registered products written as quadratic
//! constraint rows `[ a * b ] - z = 0`. MPS output uses fixed sections with
//! QCMATRIX blocks per product row. Both writers embed variable order,
//! constraint families, and objective handles in structured comments, so the
//! paired reader reconstructs the exact in-memory model, byte-for-byte
//! reproducible across runs.

use std::fmt::Write as _;

use thiserror::Error;

use crate::algebra::{Family, ModelIR, Sense, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    LpText,
    Mps,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown variable `{0}` referenced before declaration")]
    UnknownVar(String),
    #[error("quadratic row `{0}` is not of the supported `[ a * b ] - z = 0` shape")]
    UnsupportedQuadratic(String),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

macro_rules! family_table {
    ($($v:ident),* $(,)?) => {
        fn family_name(f: Family) -> &'static str {
            match f { $(Family::$v => stringify!($v)),* }
        }
        fn family_from_name(s: &str) -> Option<Family> {
            match s { $(stringify!($v) => Some(Family::$v),)* _ => None }
        }
    };
}

family_table!(
    InletPortTotal,
    InletPortComponent,
    NonSourceZero,
    ProcessInletTotal,
    ProcessInletComponent,
    OutletPortTotal,
    OutletPortComponent,
    ConnectionComposition,
    SinkComposition,
    ProcessOutletTotal,
    ProcessOutletComponent,
    MassConservation,
    Conversion,
    ScaleDefinition,
    FractionSumInletPort,
    FractionSumOutletPort,
    FractionSumProcessInlet,
    FractionSumProcessOutlet,
    FractionSumConnection,
    WorkDefinition,
    WorkBalance,
    DutyDefinition,
    HotPortBalance,
    ColdPortBalance,
    HeatLinkCap,
    HeatLinkRequiresHot,
    HeatLinkRequiresCold,
    ApproachTemperature,
    DualSourceSide,
    DualSinkSide,
    DualSignUpper,
    DualSignLower,
    DualSelfExclusion,
    CostTotal,
    CapitalCost,
    ComponentCost,
    ElectricityCost,
    HeatCost,
    EmissionTotal,
    SourceEmission,
    SinkEmission,
    ProductionTarget,
    Dominance,
    ConnectionBlocking,
    ActivationGate,
    FlowCouplingRow,
    SurrogateInput,
    OneHotSum,
    SurrogateOutput,
    SupplyCap,
    ReluEncoding,
    ScalerRow,
);

/// Shortest exact decimal form of an f64.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn check_unique_names(model: &ModelIR) {
    let mut names: Vec<&str> = model.cons.iter().map(|c| c.name.as_str()).collect();
    names.sort_unstable();
    for pair in names.windows(2) {
        assert_ne!(
            pair[0], pair[1],
            "exported models need unique constraint names"
        );
    }
}

fn write_terms(out: &mut String, coeffs: &[(usize, f64)], model: &ModelIR) {
    for &(j, c) in coeffs {
        let (sign, mag) = if c < 0.0 { ('-', -c) } else { ('+', c) };
        let _ = write!(out, " {sign} {} {}", num(mag), model.label(j));
    }
}

/// Renders the model in the lp-text dialect.
pub fn write_lp_text(model: &ModelIR) -> String {
    check_unique_names(model);
    let mut out = String::new();
    out.push_str("\\ saffron lp-text v1\n");
    for v in &model.vars {
        let kind = match v.kind {
            VarKind::Continuous => "continuous",
            VarKind::Binary => "binary",
        };
        let _ = writeln!(out, "\\ var {} {} {} {}", v.label, kind, num(v.lo), num(v.hi));
    }
    if let Some(id) = model.handles.total_cost {
        let _ = writeln!(out, "\\ handle total_cost {}", model.label(id));
    }
    if let Some(id) = model.handles.co2_total {
        let _ = writeln!(out, "\\ handle co2_total {}", model.label(id));
    }
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, &model.objective, model);
    out.push_str("\nSubject To\n");
    for con in &model.cons {
        let _ = writeln!(out, "\\ fam {}", family_name(con.family));
        let _ = write!(out, " {}:", con.name);
        write_terms(&mut out, &con.coeffs, model);
        let _ = writeln!(out, " {} {}", con.sense, num(con.rhs));
    }
    for (i, bl) in model.bilinears.iter().enumerate() {
        let _ = writeln!(
            out,
            " qb{i}: [ 1 {} * {} ] - 1 {} = 0",
            model.label(bl.a),
            model.label(bl.b),
            model.label(bl.product)
        );
    }
    out.push_str("Bounds\n");
    for v in &model.vars {
        let _ = writeln!(out, " {} <= {} <= {}", num(v.lo), v.label, num(v.hi));
    }
    let binaries: Vec<&str> = model
        .vars
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.label.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for b in binaries {
            let _ = writeln!(out, " {b}");
        }
    }
    out.push_str("End\n");
    out
}

/// Parses the lp-text dialect back into a model.
pub fn read_lp_text(text: &str) -> Result<ModelIR, ParseError> {
    let mut model = ModelIR::default();
    let mut handles: Vec<(String, String)> = Vec::new();
    let mut pending_family: Option<Family> = None;

    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Objective,
        Constraints,
        Bounds,
        Binaries,
        Done,
    }
    let mut section = Section::Preamble;

    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('\\') {
            let toks: Vec<&str> = comment.split_whitespace().collect();
            match toks.first().copied() {
                Some("var") => {
                    if toks.len() != 5 {
                        return Err(syntax(ln + 1, "var comment needs 4 fields"));
                    }
                    let kind = match toks[2] {
                        "continuous" => VarKind::Continuous,
                        "binary" => VarKind::Binary,
                        other => return Err(syntax(ln + 1, format!("bad kind `{other}`"))),
                    };
                    let lo: f64 = toks[3]
                        .parse()
                        .map_err(|_| syntax(ln + 1, "bad lower bound"))?;
                    let hi: f64 = toks[4]
                        .parse()
                        .map_err(|_| syntax(ln + 1, "bad upper bound"))?;
                    model.push_var(kind, lo, hi, toks[1].to_string());
                }
                Some("handle") if toks.len() == 3 => {
                    handles.push((toks[1].to_string(), toks[2].to_string()));
                }
                Some("fam") if toks.len() == 2 => {
                    pending_family = Some(
                        family_from_name(toks[1])
                            .ok_or_else(|| syntax(ln + 1, format!("unknown family {}", toks[1])))?,
                    );
                }
                _ => {}
            }
            continue;
        }
        match line {
            "Minimize" => {
                section = Section::Objective;
                continue;
            }
            "Subject To" => {
                section = Section::Constraints;
                continue;
            }
            "Bounds" => {
                section = Section::Bounds;
                continue;
            }
            "Binaries" => {
                section = Section::Binaries;
                continue;
            }
            "End" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Objective | Section::Constraints => {
                let (name, rest) = line
                    .split_once(':')
                    .ok_or_else(|| syntax(ln + 1, "expected `name:` prefix"))?;
                let toks: Vec<&str> = rest.split_whitespace().collect();
                let mut coeffs: Vec<(usize, f64)> = Vec::new();
                let mut quad: Option<(usize, usize)> = None;
                let mut sense: Option<Sense> = None;
                let mut rhs = 0.0;
                let mut i = 0;
                let mut sign = 1.0;
                while i < toks.len() {
                    match toks[i] {
                        "+" => {
                            sign = 1.0;
                            i += 1;
                        }
                        "-" => {
                            sign = -1.0;
                            i += 1;
                        }
                        "[" => {
                            // [ coef a * b ]
                            if i + 5 >= toks.len()
                                || toks[i + 3] != "*"
                                || toks[i + 5] != "]"
                            {
                                return Err(ParseError::UnsupportedQuadratic(
                                    name.trim().to_string(),
                                ));
                            }
                            let coef: f64 = toks[i + 1]
                                .parse()
                                .map_err(|_| syntax(ln + 1, "bad quad coefficient"))?;
                            if (coef - 1.0).abs() > 1e-12 || sign < 0.0 {
                                return Err(ParseError::UnsupportedQuadratic(
                                    name.trim().to_string(),
                                ));
                            }
                            let a = model
                                .var_id(toks[i + 2])
                                .ok_or_else(|| ParseError::UnknownVar(toks[i + 2].into()))?;
                            let b = model
                                .var_id(toks[i + 4])
                                .ok_or_else(|| ParseError::UnknownVar(toks[i + 4].into()))?;
                            quad = Some((a, b));
                            i += 6;
                        }
                        "<=" | ">=" | "=" => {
                            sense = Some(match toks[i] {
                                "<=" => Sense::Le,
                                ">=" => Sense::Ge,
                                _ => Sense::Eq,
                            });
                            rhs = toks
                                .get(i + 1)
                                .and_then(|t| t.parse().ok())
                                .ok_or_else(|| syntax(ln + 1, "bad rhs"))?;
                            i += 2;
                        }
                        tok => {
                            let coef: f64 = tok
                                .parse()
                                .map_err(|_| syntax(ln + 1, format!("bad token `{tok}`")))?;
                            let var = toks
                                .get(i + 1)
                                .ok_or_else(|| syntax(ln + 1, "dangling coefficient"))?;
                            let id = model
                                .var_id(var)
                                .ok_or_else(|| ParseError::UnknownVar(var.to_string()))?;
                            coeffs.push((id, sign * coef));
                            sign = 1.0;
                            i += 2;
                        }
                    }
                }
                if section == Section::Objective {
                    model.objective = coeffs;
                } else if let Some((a, b)) = quad {
                    // Product registration row: shape is fixed by the writer.
                    if coeffs.len() != 1 || (coeffs[0].1 + 1.0).abs() > 1e-12 || rhs != 0.0 {
                        return Err(ParseError::UnsupportedQuadratic(name.trim().to_string()));
                    }
                    push_product(&mut model, a, b, coeffs[0].0);
                } else {
                    let family = pending_family.take().unwrap_or(Family::MassConservation);
                    let sense =
                        sense.ok_or_else(|| syntax(ln + 1, "constraint without sense"))?;
                    model.push_con(name.trim().to_string(), family, coeffs, sense, rhs);
                }
            }
            // Bounds, kinds, and order came from the var comments.
            Section::Bounds | Section::Binaries | Section::Preamble | Section::Done => {}
        }
    }
    resolve_handles(&mut model, &handles)?;
    Ok(model)
}

fn push_product(model: &mut ModelIR, a: usize, b: usize, product: usize) {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let exactness = if model.vars[a].kind == VarKind::Binary
        || model.vars[b].kind == VarKind::Binary
    {
        crate::algebra::Exactness::BinaryFactor
    } else {
        crate::algebra::Exactness::McCormick
    };
    model.bilinears.push(crate::algebra::Bilinear {
        product,
        a,
        b,
        exactness,
    });
}

fn resolve_handles(model: &mut ModelIR, handles: &[(String, String)]) -> Result<(), ParseError> {
    for (key, label) in handles {
        let id = model
            .var_id(label)
            .ok_or_else(|| ParseError::UnknownVar(label.clone()))?;
        match key.as_str() {
            "total_cost" => model.handles.total_cost = Some(id),
            "co2_total" => model.handles.co2_total = Some(id),
            _ => {}
        }
    }
    Ok(())
}

/// Renders the model as fixed-section MPS with QCMATRIX product blocks.
pub fn write_mps(model: &ModelIR) -> String {
    check_unique_names(model);
    let mut out = String::new();
    out.push_str("* saffron mps v1\n");
    for v in &model.vars {
        let kind = match v.kind {
            VarKind::Continuous => "continuous",
            VarKind::Binary => "binary",
        };
        let _ = writeln!(out, "* var {} {} {} {}", v.label, kind, num(v.lo), num(v.hi));
    }
    for con in &model.cons {
        let _ = writeln!(out, "* fam {} {}", con.name, family_name(con.family));
    }
    if let Some(id) = model.handles.total_cost {
        let _ = writeln!(out, "* handle total_cost {}", model.label(id));
    }
    if let Some(id) = model.handles.co2_total {
        let _ = writeln!(out, "* handle co2_total {}", model.label(id));
    }
    out.push_str("NAME saffron\nROWS\n N OBJ\n");
    for con in &model.cons {
        let tag = match con.sense {
            Sense::Le => 'L',
            Sense::Ge => 'G',
            Sense::Eq => 'E',
        };
        let _ = writeln!(out, " {tag} {}", con.name);
    }
    for i in 0..model.bilinears.len() {
        let _ = writeln!(out, " E qb{i}");
    }

    // Row-wise coefficients flipped to per-column lists.
    let mut col_entries: Vec<Vec<(String, f64)>> = vec![Vec::new(); model.vars.len()];
    for con in &model.cons {
        for &(j, c) in &con.coeffs {
            col_entries[j].push((con.name.clone(), c));
        }
    }
    for (i, bl) in model.bilinears.iter().enumerate() {
        col_entries[bl.product].push((format!("qb{i}"), -1.0));
    }
    let mut obj = vec![0.0; model.vars.len()];
    for &(j, c) in &model.objective {
        obj[j] += c;
    }

    out.push_str("COLUMNS\n");
    let mut in_int = false;
    for (j, v) in model.vars.iter().enumerate() {
        let want_int = v.kind == VarKind::Binary;
        if want_int != in_int {
            let marker = if want_int { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, " MARKER 'MARKER' {marker}");
            in_int = want_int;
        }
        let _ = writeln!(out, " {} OBJ {}", v.label, num(obj[j]));
        for (row, c) in &col_entries[j] {
            let _ = writeln!(out, " {} {} {}", v.label, row, num(*c));
        }
    }
    if in_int {
        out.push_str(" MARKER 'MARKER' 'INTEND'\n");
    }

    out.push_str("RHS\n");
    for con in &model.cons {
        if con.rhs != 0.0 {
            let _ = writeln!(out, " RHS {} {}", con.name, num(con.rhs));
        }
    }
    out.push_str("BOUNDS\n");
    for v in &model.vars {
        let _ = writeln!(out, " LO BND {} {}", v.label, num(v.lo));
        let _ = writeln!(out, " UP BND {} {}", v.label, num(v.hi));
    }
    for (i, bl) in model.bilinears.iter().enumerate() {
        let _ = writeln!(out, "QCMATRIX qb{i}");
        if bl.a == bl.b {
            let _ = writeln!(out, " {} {} 1", model.label(bl.a), model.label(bl.b));
        } else {
            let _ = writeln!(out, " {} {} 0.5", model.label(bl.a), model.label(bl.b));
            let _ = writeln!(out, " {} {} 0.5", model.label(bl.b), model.label(bl.a));
        }
    }
    out.push_str("ENDATA\n");
    out
}

/// Parses the MPS form back into a model.
pub fn read_mps(text: &str) -> Result<ModelIR, ParseError> {
    let mut model = ModelIR::default();
    let mut handles: Vec<(String, String)> = Vec::new();
    let mut families: Vec<(String, Family)> = Vec::new();
    // Row name -> (sense, order); coefficient and rhs stores keyed by name.
    let mut rows: Vec<(String, Sense)> = Vec::new();
    let mut row_index: std::collections::BTreeMap<String, usize> = Default::default();
    let mut row_coeffs: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut row_rhs: Vec<f64> = Vec::new();
    let mut objective: Vec<(usize, f64)> = Vec::new();
    let mut quads: Vec<(String, Vec<(usize, usize, f64)>)> = Vec::new();

    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Rows,
        Columns,
        Rhs,
        Bounds,
        Qc(usize),
    }
    let mut section = Section::None;

    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('*') {
            let toks: Vec<&str> = comment.split_whitespace().collect();
            match toks.first().copied() {
                Some("var") if toks.len() == 5 => {
                    let kind = match toks[2] {
                        "continuous" => VarKind::Continuous,
                        "binary" => VarKind::Binary,
                        other => return Err(syntax(ln + 1, format!("bad kind `{other}`"))),
                    };
                    let lo: f64 = toks[3]
                        .parse()
                        .map_err(|_| syntax(ln + 1, "bad lower bound"))?;
                    let hi: f64 = toks[4]
                        .parse()
                        .map_err(|_| syntax(ln + 1, "bad upper bound"))?;
                    model.push_var(kind, lo, hi, toks[1].to_string());
                }
                Some("fam") if toks.len() == 3 => {
                    let fam = family_from_name(toks[2])
                        .ok_or_else(|| syntax(ln + 1, format!("unknown family {}", toks[2])))?;
                    families.push((toks[1].to_string(), fam));
                }
                Some("handle") if toks.len() == 3 => {
                    handles.push((toks[1].to_string(), toks[2].to_string()));
                }
                _ => {}
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "NAME" => continue,
            "ROWS" => {
                section = Section::Rows;
                continue;
            }
            "COLUMNS" => {
                section = Section::Columns;
                continue;
            }
            "RHS" if toks.len() == 1 => {
                section = Section::Rhs;
                continue;
            }
            "BOUNDS" => {
                section = Section::Bounds;
                continue;
            }
            "QCMATRIX" => {
                let name = toks
                    .get(1)
                    .ok_or_else(|| syntax(ln + 1, "QCMATRIX without row"))?;
                quads.push((name.to_string(), Vec::new()));
                section = Section::Qc(quads.len() - 1);
                continue;
            }
            "ENDATA" => {
                section = Section::None;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(syntax(ln + 1, "ROWS entries need sense and name"));
                }
                match toks[0] {
                    "N" => {}
                    s => {
                        let sense = match s {
                            "L" => Sense::Le,
                            "G" => Sense::Ge,
                            "E" => Sense::Eq,
                            other => {
                                return Err(syntax(ln + 1, format!("bad row sense `{other}`")))
                            }
                        };
                        row_index.insert(toks[1].to_string(), rows.len());
                        rows.push((toks[1].to_string(), sense));
                        row_coeffs.push(Vec::new());
                        row_rhs.push(0.0);
                    }
                }
            }
            Section::Columns => {
                if toks[0] == "MARKER" {
                    continue;
                }
                if toks.len() != 3 {
                    return Err(syntax(ln + 1, "COLUMNS entries need var row value"));
                }
                let var = model
                    .var_id(toks[0])
                    .ok_or_else(|| ParseError::UnknownVar(toks[0].to_string()))?;
                let val: f64 = toks[2]
                    .parse()
                    .map_err(|_| syntax(ln + 1, "bad coefficient"))?;
                if toks[1] == "OBJ" {
                    if val != 0.0 {
                        objective.push((var, val));
                    }
                } else {
                    let r = *row_index
                        .get(toks[1])
                        .ok_or_else(|| syntax(ln + 1, format!("unknown row {}", toks[1])))?;
                    row_coeffs[r].push((var, val));
                }
            }
            Section::Rhs => {
                if toks.len() != 3 || toks[0] != "RHS" {
                    return Err(syntax(ln + 1, "RHS entries need RHS row value"));
                }
                let r = *row_index
                    .get(toks[1])
                    .ok_or_else(|| syntax(ln + 1, format!("unknown row {}", toks[1])))?;
                row_rhs[r] = toks[2]
                    .parse()
                    .map_err(|_| syntax(ln + 1, "bad rhs value"))?;
            }
            Section::Bounds => {
                // Bounds and kinds already came from the var comments.
            }
            Section::Qc(q) => {
                if toks.len() != 3 {
                    return Err(syntax(ln + 1, "QCMATRIX entries need var var value"));
                }
                let a = model
                    .var_id(toks[0])
                    .ok_or_else(|| ParseError::UnknownVar(toks[0].to_string()))?;
                let b = model
                    .var_id(toks[1])
                    .ok_or_else(|| ParseError::UnknownVar(toks[1].to_string()))?;
                let v: f64 = toks[2]
                    .parse()
                    .map_err(|_| syntax(ln + 1, "bad QCMATRIX value"))?;
                quads[q].1.push((a, b, v));
            }
            Section::None => {}
        }
    }

    let fam_of = |name: &str| {
        families
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, f)| f)
            .unwrap_or(Family::MassConservation)
    };
    // Quadratic rows become product registrations, everything else becomes
    // a linear constraint in declaration order.
    let quad_names: std::collections::BTreeSet<&str> =
        quads.iter().map(|(n, _)| n.as_str()).collect();
    for (r, (name, sense)) in rows.iter().enumerate() {
        if quad_names.contains(name.as_str()) {
            if *sense != Sense::Eq || row_coeffs[r].len() != 1 || row_rhs[r] != 0.0 {
                return Err(ParseError::UnsupportedQuadratic(name.clone()));
            }
            let (product, c) = row_coeffs[r][0];
            if (c + 1.0).abs() > 1e-12 {
                return Err(ParseError::UnsupportedQuadratic(name.clone()));
            }
            let entries = &quads.iter().find(|(n, _)| n == name).unwrap().1;
            let (a, b) = match entries.as_slice() {
                [(a, b, v)] if (*v - 1.0).abs() < 1e-12 && a == b => (*a, *b),
                [(a1, b1, v1), (a2, b2, v2)]
                    if (*v1 - 0.5).abs() < 1e-12
                        && (*v2 - 0.5).abs() < 1e-12
                        && a1 == b2
                        && b1 == a2 =>
                {
                    (*a1, *b1)
                }
                _ => return Err(ParseError::UnsupportedQuadratic(name.clone())),
            };
            push_product(&mut model, a, b, product);
        } else {
            model.push_con(
                name.clone(),
                fam_of(name),
                row_coeffs[r].clone(),
                *sense,
                row_rhs[r],
            );
        }
    }
    model.objective = objective;
    resolve_handles(&mut model, &handles)?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Family, ModelIR, Sense, VarKind};

    fn toy_model() -> ModelIR {
        let mut m = ModelIR::default();
        let y = m.push_var(VarKind::Binary, 0.0, 1.0, "pick[A]".into());
        let f = m.push_var(VarKind::Continuous, 0.0, 12.5, "flow[A.out1]".into());
        let w = m.push_var(VarKind::Continuous, 0.0, 1.0, "w[A.out1,h2]".into());
        let k = m.push_var(VarKind::Continuous, -1e4, 1e4, "k[total]".into());
        let zwf = m.product_of(w, f);
        let zyf = m.product_of(y, f);
        m.push_con(
            "demand".into(),
            Family::ProductionTarget,
            vec![(zwf, 1.0)],
            Sense::Ge,
            2.0,
        );
        m.push_con(
            "gate".into(),
            Family::ActivationGate,
            vec![(f, 1.0), (y, -12.5)],
            Sense::Le,
            0.0,
        );
        m.push_con(
            "cost".into(),
            Family::CostTotal,
            vec![(k, 1.0), (zyf, -3.25), (y, -100.0)],
            Sense::Eq,
            0.0,
        );
        m.objective = vec![(k, 1.0)];
        m.handles.total_cost = Some(k);
        m
    }

    #[test]
    fn lp_text_round_trips_identically() {
        let m = toy_model();
        let text = write_lp_text(&m);
        let back = read_lp_text(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn mps_round_trips_identically() {
        let m = toy_model();
        let text = write_mps(&m);
        let back = read_mps(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn empty_model_round_trips_through_both_formats() {
        let m = ModelIR::default();
        let lp = write_lp_text(&m);
        assert!(lp.starts_with("\\ saffron lp-text v1"));
        assert_eq!(read_lp_text(&lp).unwrap(), m);
        let mps = write_mps(&m);
        assert!(mps.starts_with("* saffron mps v1"));
        assert_eq!(read_mps(&mps).unwrap(), m);
    }

    #[test]
    fn output_bytes_are_stable_across_runs() {
        let a = write_lp_text(&toy_model());
        let b = write_lp_text(&toy_model());
        assert_eq!(a, b);
        let c = write_mps(&toy_model());
        let d = write_mps(&toy_model());
        assert_eq!(c, d);
    }

    #[test]
    fn malformed_input_names_the_line() {
        let text = "\\ saffron lp-text v1\nMinimize\n obj: bogus\n";
        match read_lp_text(text) {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn assembled_fixture_round_trips() {
        use crate::core_model::fixtures::two_route_spec;
        use crate::core_model::IndexedSpec;
        let spec = two_route_spec();
        let idx = IndexedSpec::resolve(&spec).unwrap();
        let m = crate::algebra::assemble_model(
            &idx,
            &std::collections::BTreeMap::new(),
            crate::algebra::EmitOptions::default(),
        )
        .unwrap();
        let lp = read_lp_text(&write_lp_text(&m)).unwrap();
        assert_eq!(m, lp);
        let mps = read_mps(&write_mps(&m)).unwrap();
        assert_eq!(m, mps);
    }
}
