//! Translation of a flowsheet specification into a flat optimization model:
//! variables, linear constraint families, and registered bilinear products.

mod emit;
mod ir;

pub use emit::{assemble_model, oxidation_factor, Builder, EmitOptions};
pub use ir::{
    product_bounds, AssembleError, Bilinear, Exactness, Family, LinCon, ModelHandles, ModelIR,
    Sense, Var, VarId, VarKind,
};
