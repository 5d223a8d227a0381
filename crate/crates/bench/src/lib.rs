//! Fixed benchmark inputs shared by the criterion benches.

use rsfa_core::io::generate;
use rsfa_core::{GridPoint, Instance};

/// General-position instance with `n` terminals and `m` roots.
pub fn scattered(n: usize, m: usize, seed: u64) -> Instance {
    generate(n, m, 4 * (n + m) as i64, seed, true).expect("coordinate range fits general position")
}

/// Single-root instance on `v` columns and `h` rows, one terminal per column.
pub fn strip(v: usize, h: usize) -> Instance {
    let points = (1..v as i64).map(|x| GridPoint::new(x, 1 + (x * 7) % (h as i64 - 1).max(1))).collect();
    Instance::rsa(points).expect("distinct columns")
}
