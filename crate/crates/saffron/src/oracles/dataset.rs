//! Deterministic training-set generation for the process oracles.
//!
//! Sampling uses latin hypercube stratification over the continuous input
//! box with every corner of the box injected first, so column-wise minima
//! and maxima of a generated set recover the exact design ranges. The
//! categorical biomass input cycles through its three levels. All
//! randomness flows from a single seed, so a given configuration always
//! produces the same bytes on disk.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ft::{ft_oracle, FtInput, FtOutput};
use super::gasifier::{gasifier_oracle, BiomassKind, GasifierInput, GasifierOutput};
use super::rwgs::{rwgs_oracle, RwgsInput, RwgsOutput};

/// Which synthetic flowsheet a dataset is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Gasification,
    ReverseShift,
    FischerTropsch,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Gasification => "gasification",
            OracleKind::ReverseShift => "rwgs",
            OracleKind::FischerTropsch => "ft",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "gasification" => Some(OracleKind::Gasification),
            "rwgs" => Some(OracleKind::ReverseShift),
            "ft" => Some(OracleKind::FischerTropsch),
            _ => None,
        }
    }

    /// Design ranges of the continuous inputs, excluding the categorical
    /// biomass selector.
    pub fn continuous_box(self) -> Vec<(f64, f64)> {
        match self {
            OracleKind::Gasification => vec![
                (0.01, 1.0),
                (0.0, 1.0),
                (0.05, 0.3),
                (800.0, 1300.0),
            ],
            OracleKind::ReverseShift => vec![(850.0, 1000.0), (0.02, 0.25)],
            OracleKind::FischerTropsch => {
                vec![(200.0, 300.0), (30.0, 55.0), (0.115, 0.15)]
            }
        }
    }

    /// Full network input box including one-hot selector dimensions.
    pub fn input_box(self) -> Vec<(f64, f64)> {
        let mut bx = Vec::new();
        if self == OracleKind::Gasification {
            bx.extend([(0.0, 1.0); 3]);
        }
        bx.extend(self.continuous_box());
        bx
    }

    pub fn input_names(self) -> Vec<String> {
        match self {
            OracleKind::Gasification => [
                "biomass_pine",
                "biomass_miscanthus",
                "biomass_wheat_straw",
                "steam_ratio",
                "co2_ratio",
                "o2_ratio",
                "t_gasifier",
            ]
            .map(str::to_string)
            .to_vec(),
            OracleKind::ReverseShift => {
                ["t_reactor", "w_h2_in"].map(str::to_string).to_vec()
            }
            OracleKind::FischerTropsch => {
                ["t_reactor", "p_reactor", "w_h2_in"].map(str::to_string).to_vec()
            }
        }
    }

    pub fn output_names(self) -> Vec<String> {
        match self {
            OracleKind::Gasification => GasifierOutput::output_names(),
            OracleKind::ReverseShift => RwgsOutput::output_names(),
            OracleKind::FischerTropsch => FtOutput::output_names(),
        }
    }

    pub fn n_inputs(self) -> usize {
        self.input_box().len()
    }

    pub fn n_outputs(self) -> usize {
        self.output_names().len()
    }

    /// Evaluates the underlying flowsheet on one full input row.
    pub fn evaluate(self, x: &[f64]) -> Vec<f64> {
        match self {
            OracleKind::Gasification => {
                let kinds = BiomassKind::all();
                let which = (0..3)
                    .max_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap())
                    .unwrap();
                gasifier_oracle(GasifierInput {
                    biomass: kinds[which],
                    steam_ratio: x[3],
                    co2_ratio: x[4],
                    o2_ratio: x[5],
                    t_celsius: x[6],
                })
                .to_network_outputs()
            }
            OracleKind::ReverseShift => {
                rwgs_oracle(RwgsInput { t_celsius: x[0], w_h2: x[1] }).to_network_outputs()
            }
            OracleKind::FischerTropsch => {
                ft_oracle(FtInput { t_celsius: x[0], p_bar: x[1], w_h2: x[2] })
                    .to_network_outputs()
            }
        }
    }

    /// Sample counts matching the reference study scale.
    pub fn default_samples(self) -> usize {
        match self {
            OracleKind::Gasification => 75_000,
            OracleKind::ReverseShift => 50_000,
            OracleKind::FischerTropsch => 10_000,
        }
    }

    /// Reduced sample counts for desk-scale runs and tests.
    pub fn desk_samples(self) -> usize {
        match self {
            OracleKind::Gasification => 12_000,
            OracleKind::ReverseShift => 4_000,
            OracleKind::FischerTropsch => 3_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DatasetConfig {
    pub kind: OracleKind,
    pub samples: usize,
    pub seed: u64,
}

/// In-memory dataset with one input row and one output row per sample.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub input_names: Vec<String>,
    pub output_names: Vec<String>,
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Column-wise input ranges; recovers the design box when corner
    /// samples are present.
    pub fn input_box(&self) -> Vec<(f64, f64)> {
        let d = self.input_names.len();
        let mut bx = vec![(f64::INFINITY, f64::NEG_INFINITY); d];
        for row in &self.inputs {
            for (j, &v) in row.iter().enumerate() {
                bx[j].0 = bx[j].0.min(v);
                bx[j].1 = bx[j].1.max(v);
            }
        }
        bx
    }

    /// Deterministic shuffled split into train and test subsets.
    pub fn split(&self, train_fraction: f64, seed: u64) -> (Dataset, Dataset) {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        idx.shuffle(&mut rng);
        let cut = ((self.len() as f64) * train_fraction).round() as usize;
        let take = |ids: &[usize]| Dataset {
            input_names: self.input_names.clone(),
            output_names: self.output_names.clone(),
            inputs: ids.iter().map(|&i| self.inputs[i].clone()).collect(),
            outputs: ids.iter().map(|&i| self.outputs[i].clone()).collect(),
        };
        (take(&idx[..cut]), take(&idx[cut..]))
    }
}

/// Latin hypercube sample of `n` rows over `bx`, with each corner of the
/// box repeated `corner_copies` times at the front when `n` is large
/// enough to afford them.
pub fn lhs_sample(
    rng: &mut ChaCha8Rng,
    n: usize,
    bx: &[(f64, f64)],
    corner_copies: usize,
) -> Vec<Vec<f64>> {
    let d = bx.len();
    let mut rows = Vec::with_capacity(n);
    let n_corners = (1usize << d) * corner_copies;
    if n >= 2 * n_corners {
        for corner in 0..(1usize << d) {
            let row: Vec<f64> = (0..d)
                .map(|j| if corner >> j & 1 == 1 { bx[j].1 } else { bx[j].0 })
                .collect();
            for _ in 0..corner_copies {
                rows.push(row.clone());
            }
        }
    }
    let m = n - rows.len();
    let mut strata: Vec<Vec<usize>> = Vec::with_capacity(d);
    for _ in 0..d {
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(rng);
        strata.push(perm);
    }
    for i in 0..m {
        let row: Vec<f64> = (0..d)
            .map(|j| {
                let u: f64 = rng.random();
                let frac = (strata[j][i] as f64 + u) / m as f64;
                bx[j].0 + (bx[j].1 - bx[j].0) * frac
            })
            .collect();
        rows.push(row);
    }
    rows
}

/// Generates a dataset by sampling the input box and evaluating the
/// oracle on every row.
pub fn generate_dataset(config: &DatasetConfig) -> Dataset {
    let kind = config.kind;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let corner_copies = if kind == OracleKind::Gasification { 3 } else { 1 };
    let cont = lhs_sample(&mut rng, config.samples, &kind.continuous_box(), corner_copies);
    let mut inputs = Vec::with_capacity(config.samples);
    for (i, row) in cont.into_iter().enumerate() {
        let mut full = Vec::with_capacity(kind.n_inputs());
        if kind == OracleKind::Gasification {
            full.extend(BiomassKind::all()[i % 3].one_hot());
        }
        full.extend(row);
        inputs.push(full);
    }
    let outputs = inputs.iter().map(|x| kind.evaluate(x)).collect();
    Dataset {
        input_names: kind.input_names(),
        output_names: kind.output_names(),
        inputs,
        outputs,
    }
}

/// Writes a dataset as CSV with `in:`/`out:` prefixed headers and twelve
/// significant digits, so regeneration is byte-identical.
pub fn write_csv(dataset: &Dataset, path: &Path) -> std::io::Result<()> {
    let mut buf = String::new();
    let header: Vec<String> = dataset
        .input_names
        .iter()
        .map(|n| format!("in:{n}"))
        .chain(dataset.output_names.iter().map(|n| format!("out:{n}")))
        .collect();
    buf.push_str(&header.join(","));
    buf.push('\n');
    for (xin, xout) in dataset.inputs.iter().zip(&dataset.outputs) {
        let cells: Vec<String> =
            xin.iter().chain(xout).map(|v| format!("{v:.12e}")).collect();
        buf.push_str(&cells.join(","));
        buf.push('\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(buf.as_bytes())
}

/// Reads a CSV written by [`write_csv`], splitting columns by header
/// prefix.
pub fn read_csv(path: &Path) -> std::io::Result<Dataset> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidData, "empty csv"))?;
    let mut input_names = Vec::new();
    let mut output_names = Vec::new();
    for cell in header.split(',') {
        if let Some(name) = cell.strip_prefix("in:") {
            input_names.push(name.to_string());
        } else if let Some(name) = cell.strip_prefix("out:") {
            output_names.push(name.to_string());
        } else {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("column {cell:?} lacks in:/out: prefix"),
            ));
        }
    }
    let n_in = input_names.len();
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        let vals = vals.map_err(|e| {
            std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("row {}: {e}", lineno + 2),
            )
        })?;
        if vals.len() != n_in + output_names.len() {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("row {}: expected {} cells", lineno + 2, n_in + output_names.len()),
            ));
        }
        inputs.push(vals[..n_in].to_vec());
        outputs.push(vals[n_in..].to_vec());
    }
    Ok(Dataset { input_names, output_names, inputs, outputs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let config = DatasetConfig { kind: OracleKind::ReverseShift, samples: 64, seed: 7 };
        let a = generate_dataset(&config);
        let b = generate_dataset(&config);
        assert_eq!(a.inputs, b.inputs);
        assert_eq!(a.outputs, b.outputs);
        let c = generate_dataset(&DatasetConfig { seed: 8, ..config });
        assert_ne!(a.inputs, c.inputs);
    }

    #[test]
    fn corners_recover_design_box() {
        for kind in [
            OracleKind::Gasification,
            OracleKind::ReverseShift,
            OracleKind::FischerTropsch,
        ] {
            let ds = generate_dataset(&DatasetConfig { kind, samples: 300, seed: 1 });
            let bx = ds.input_box();
            let expect = kind.input_box();
            for (j, ((lo, hi), (elo, ehi))) in bx.iter().zip(&expect).enumerate() {
                assert!((lo - elo).abs() < 1e-12, "{kind:?} dim {j} lo {lo} vs {elo}");
                assert!((hi - ehi).abs() < 1e-12, "{kind:?} dim {j} hi {hi} vs {ehi}");
            }
        }
    }

    #[test]
    fn stratification_covers_every_bin() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bx = [(0.0, 1.0), (10.0, 20.0)];
        let rows = lhs_sample(&mut rng, 40, &bx, 0);
        assert_eq!(rows.len(), 40);
        for j in 0..2 {
            let mut hit = vec![false; 40];
            for row in &rows {
                let frac = (row[j] - bx[j].0) / (bx[j].1 - bx[j].0);
                hit[((frac * 40.0) as usize).min(39)] = true;
            }
            assert!(hit.iter().all(|&h| h), "dim {j} missed a stratum");
        }
    }

    #[test]
    fn biomass_levels_cycle() {
        let ds = generate_dataset(&DatasetConfig {
            kind: OracleKind::Gasification,
            samples: 99,
            seed: 2,
        });
        for (i, row) in ds.inputs.iter().enumerate() {
            let one_hot: Vec<f64> = row[..3].to_vec();
            assert_eq!(one_hot.iter().sum::<f64>(), 1.0);
            assert_eq!(one_hot[i % 3], 1.0);
        }
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path_a = dir.path().join("a.csv");
        let path_b = dir.path().join("b.csv");
        let config = DatasetConfig { kind: OracleKind::FischerTropsch, samples: 50, seed: 11 };
        write_csv(&generate_dataset(&config), &path_a).unwrap();
        let back = read_csv(&path_a).unwrap();
        assert_eq!(back.len(), 50);
        assert_eq!(back.output_names, config.kind.output_names());
        write_csv(&back, &path_b).unwrap();
        assert_eq!(fs::read(&path_a).unwrap(), fs::read(&path_b).unwrap());
    }

    #[test]
    fn split_partitions_without_overlap() {
        let ds = generate_dataset(&DatasetConfig {
            kind: OracleKind::ReverseShift,
            samples: 100,
            seed: 5,
        });
        let (train, test) = ds.split(0.8, 42);
        assert_eq!(train.len(), 80);
        assert_eq!(test.len(), 20);
        let mut seen: Vec<Vec<u8>> = train
            .inputs
            .iter()
            .chain(&test.inputs)
            .map(|r| r.iter().flat_map(|v| v.to_le_bytes()).collect())
            .collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 100);
    }
}
