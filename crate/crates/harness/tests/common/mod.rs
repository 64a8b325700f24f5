#![allow(dead_code)]

pub mod transport;

use std::path::{Path, PathBuf};

use opinion_harness::manifest::RunManifest;

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// The shipped mock manifest with output and cache redirected under `tmp`.
pub fn mock_manifest(tmp: &Path) -> RunManifest {
    let mut m = RunManifest::load(&repo_root().join("data/manifests/mock.toml")).unwrap();
    m.out_dir = tmp.join("runs");
    m.cache_dir = tmp.join("cache");
    m.check().unwrap();
    m
}

/// Every bundle file under `dir` as (relative path, bytes), sorted. The
/// ledger holds timings and is left out.
pub fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else if p.file_name().is_some_and(|n| n != "ledger.jsonl") {
                out.push((p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}
