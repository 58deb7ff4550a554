//! Named experiment configurations shipped as TOML files under `presets/`.

use crate::config::ConfigFile;
use crate::error::{Error, Result};

macro_rules! preset {
    ($name:literal) => {
        ($name, include_str!(concat!("../presets/", $name, ".toml")))
    };
}

const PRESETS: &[(&str, &str)] = &[
    preset!("table1-sbgd21-n30"),
    preset!("table2-sbgd21-n30"),
    preset!("table2-gd08-n30"),
    preset!("table2-adam01-n30"),
    preset!("table2-gdbt-n30"),
    preset!("table3-ackley-n20"),
    preset!("table3-rastrigin-n20"),
    preset!("table-2d-ackley-b10-sbgd-n100"),
    preset!("table-2d-ackley-b10-gdbt-n100"),
    preset!("table-2d-rastrigin-b0-sbgd-n100"),
    preset!("table-2d-rastrigin-b0-gdbt-n100"),
    preset!("table-2d-dropwave-sbgd-n30"),
    preset!("table-2d-dropwave-gdbt-n30"),
    preset!("table-2d-rosenbrock-sbgd-n30"),
    preset!("table-2d-rosenbrock-gdbt-n30"),
    preset!("table-2d-rastrigin-shifted-sbgd21-n30"),
    preset!("table-2d-rastrigin-shifted-adam02-n30"),
    preset!("table-20d-rastrigin-loss-b5-sbgd21-n50"),
    preset!("table-20d-rastrigin-loss-b5-gdbt-n50"),
    preset!("table-20d-rastrigin-loss-b5-adam-n50"),
    preset!("table-20d-ackley-loss-b5-sbgd21-n50"),
    preset!("table-20d-ackley-loss-b5-gdbt-n50"),
    preset!("table-20d-ackley-loss-b5-adam-n50"),
    preset!("table-20d-ackley-precond-n50"),
    preset!("table-20d-rastrigin-precond-n50"),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

/// Raw TOML text of a preset.
pub fn source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Parses a preset; the error lists every available name.
pub fn load(name: &str) -> Result<ConfigFile> {
    match source(name) {
        Some(text) => ConfigFile::from_toml(text),
        None => Err(Error::Config(format!(
            "unknown preset `{name}`; available presets: {}",
            names().collect::<Vec<_>>().join(", ")
        ))),
    }
}
