//! Synthetic process models used to generate surrogate training data.

pub mod asf;
pub mod dataset;
pub mod ft;
pub mod gasifier;
pub mod rwgs;

pub use asf::{asf_weight_fractions, chain_growth_probability, lumped_fractions};
pub use dataset::{generate_dataset, lhs_sample, write_csv, Dataset, DatasetConfig};
pub use ft::{ft_oracle, FtInput, FtOutput};
pub use gasifier::{gasifier_oracle, GasifierInput, GasifierOutput};
pub use rwgs::{rwgs_equilibrium_constant, rwgs_oracle, RwgsInput, RwgsOutput};
