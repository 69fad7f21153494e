//! Workloads shared by the benchmarks.

use jointrisk::ScenarioSet;

/// `m` equally weighted scenarios in dimension `dim` with distinct,
/// deterministically scrambled losses in (0, 10).
pub fn scrambled(dim: usize, m: usize) -> ScenarioSet {
    let rows = (0..m)
        .map(|k| {
            (0..dim)
                .map(|i| {
                    let r = (k * (2 * i + 3) * 7919 + i * 104_729) % m;
                    10.0 * (r as f64 + 0.5) / m as f64
                })
                .collect()
        })
        .collect();
    ScenarioSet::from_rows(rows).expect("generated rows are well formed")
}
