//! Scenarios bundled with the library.

use super::{ScenarioConfig, SimError};

pub const TABLE1: &str = include_str!("../../scenarios/table1.json");
pub const TABLE1_GOLDEN: &str = include_str!("../../scenarios/table1.golden.tsv");
pub const SOAK50: &str = include_str!("../../scenarios/soak50.json");
pub const ATTACKS_ALL: &str = include_str!("../../scenarios/attacks_all.json");

pub const NAMES: [&str; 3] = ["table1", "soak50", "attacks_all"];

pub fn source(name: &str) -> Option<&'static str> {
    match name {
        "table1" => Some(TABLE1),
        "soak50" => Some(SOAK50),
        "attacks_all" => Some(ATTACKS_ALL),
        _ => None,
    }
}

pub fn builtin(name: &str) -> Option<Result<ScenarioConfig, SimError>> {
    source(name).map(ScenarioConfig::from_json)
}
