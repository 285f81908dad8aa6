#![allow(dead_code)]

use minic::{load, CheckedProgram};

pub fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/c/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn checked(name: &str) -> CheckedProgram {
    load(&fixture(name)).unwrap_or_else(|e| panic!("{}", e.render(name)))
}

pub const FIXTURES: &[&str] = &[
    "distribute_candies_buggy.c",
    "distribute_candies_fixed.c",
    "distribute_candies_deepseek.c",
    "furthest_distance_deepseek.c",
    "distance_traveled_granite.c",
    "distance_traveled_fixed.c",
    "make_integer_zero_qwen.c",
];
