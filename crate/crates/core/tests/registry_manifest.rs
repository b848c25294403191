//! The registry must match the checked-in list of result ids exactly, in order.

use std::time::{Duration, Instant};

use qme::ensembles::RngSeed;
use qme::suite::{lookup, registry, run_all, suite_ids};

const MANIFEST: &str = include_str!("data/registry_manifest.txt");

fn manifest() -> Vec<&'static str> {
    MANIFEST.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect()
}

#[test]
fn registry_matches_manifest() {
    let ids: Vec<&str> = suite_ids().collect();
    assert_eq!(ids, manifest());
}

#[test]
fn ids_are_unique_and_described() {
    let mut seen = std::collections::HashSet::new();
    for c in registry() {
        assert!(seen.insert(c.id), "duplicate id {}", c.id);
        assert!(!c.description.is_empty(), "{} has no description", c.id);
    }
    assert!(lookup("canary").is_ok());
    assert!(!suite_ids().any(|id| id == "canary"));
}

#[test]
fn smoke_run_is_fast() {
    let start = Instant::now();
    let reports = run_all(1, &[2, 3, 4, 5], RngSeed(42)).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(reports.len(), manifest().len());
    assert!(elapsed < Duration::from_secs(1), "one-trial run took {elapsed:?}");
}

#[test]
fn empty_dims_is_a_config_error() {
    assert!(matches!(run_all(10, &[], RngSeed(1)), Err(qme::QmeError::Config(_))));
}
