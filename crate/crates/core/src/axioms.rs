//! The six copula-based axioms as randomized, seeded property checks on Γ.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::copula::Copula;
use crate::error::{Result, RiskError};
use crate::portfolio::ScenarioSet;
use crate::scalar::{gamma_survival_form, JointRiskSpec};

/// Relative tolerance for value identities.
pub const AXIOM_REL_TOL: f64 = 1e-9;
/// Absolute floor under the relative tolerance.
pub const AXIOM_ABS_TOL: f64 = 1e-12;

const MAX_ROWS: usize = 20;
const CLAMP_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axiom {
    /// Copula-based positive homogeneity.
    A1,
    /// Copula-based monotonicity.
    A2,
    /// Copula-based π-comonotone additivity.
    A3,
    /// Copula-based continuity from below.
    A4,
    /// Copula-based d-monotonicity.
    A5,
    /// Copula-based distribution invariance.
    A6,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::A1,
        Axiom::A2,
        Axiom::A3,
        Axiom::A4,
        Axiom::A5,
        Axiom::A6,
    ];

    pub fn description(self) -> &'static str {
        match self {
            Axiom::A1 => "positive homogeneity",
            Axiom::A2 => "monotonicity",
            Axiom::A3 => "pi-comonotone additivity",
            Axiom::A4 => "continuity from below",
            Axiom::A5 => "d-monotonicity",
            Axiom::A6 => "distribution invariance",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The instance behind the worst violation of one axiom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub trial: usize,
    pub detail: String,
    pub lhs: f64,
    pub rhs: f64,
    /// The scenario matrix of the trial, row by row.
    pub scenarios: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    pub passed: bool,
    pub checks: usize,
    /// Largest amount by which a check missed, before the tolerance; 0 when
    /// every check held exactly.
    pub worst_violation: f64,
    /// Present when the axiom failed.
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub seed: u64,
    pub trials: usize,
    pub dim: usize,
    pub copula: String,
    pub rel_tol: f64,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn outcome(&self, axiom: Axiom) -> &AxiomOutcome {
        self.outcomes
            .iter()
            .find(|o| o.axiom == axiom)
            .expect("every axiom is reported")
    }

    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

/// One check: `gap` is how far the relation missed (≤ 0 when it holds) and
/// `scale` sets the tolerance.
#[derive(Debug, Clone)]
struct Check {
    axiom: Axiom,
    gap: f64,
    scale: f64,
    detail: String,
    lhs: f64,
    rhs: f64,
}

impl Check {
    fn equal(axiom: Axiom, lhs: f64, rhs: f64, detail: impl Into<String>) -> Self {
        Self {
            axiom,
            gap: (lhs - rhs).abs(),
            scale: lhs.abs().max(rhs.abs()),
            detail: detail.into(),
            lhs,
            rhs,
        }
    }

    /// lhs ≤ rhs.
    fn at_most(axiom: Axiom, lhs: f64, rhs: f64, detail: impl Into<String>) -> Self {
        Self {
            axiom,
            gap: lhs - rhs,
            scale: lhs.abs().max(rhs.abs()),
            detail: detail.into(),
            lhs,
            rhs,
        }
    }

    fn holds(&self) -> bool {
        self.gap <= (AXIOM_REL_TOL * self.scale).max(AXIOM_ABS_TOL)
    }
}

/// A random nonnegative instance: at most 20 scenarios with losses k/10,
/// k ∈ {1, …, 35}, and equal weights.
pub fn random_instance(rng: &mut impl Rng, dim: usize) -> ScenarioSet {
    let m = rng.random_range(1..=MAX_ROWS);
    let rows = (0..m)
        .map(|_| {
            (0..dim)
                .map(|_| f64::from(rng.random_range(1..=35u32)) / 10.0)
                .collect()
        })
        .collect();
    ScenarioSet::from_rows(rows).expect("generated rows are well formed")
}

/// A rank-preserving nonnegative increase of every marginal: distinct values
/// v_1 < … < v_k move to w_1 < … < w_k with w_j ≥ v_j.
///
/// With `comonotone` the increments w_j − v_j are non-decreasing in j, so the
/// increase is comonotone with the marginal; otherwise each value moves up
/// independently, by less than the gap to the next value.
fn rank_preserving_increase(
    s: &ScenarioSet,
    rng: &mut impl Rng,
    comonotone: bool,
) -> Result<ScenarioSet> {
    let mut maps = Vec::with_capacity(s.dim());
    for i in 0..s.dim() {
        let values = s.marginal(i)?.breakpoints;
        let mut shifted: Vec<f64> = Vec::with_capacity(values.len());
        let mut delta = 0.0;
        for (j, &v) in values.iter().enumerate() {
            let step = if rng.random_bool(0.3) {
                0.0
            } else {
                rng.random_range(0.0..1.0)
            };
            let w = if comonotone {
                delta += step;
                v + delta
            } else {
                // stay below the next original value so ranks are kept
                let gap = values.get(j + 1).map_or(1.0, |&next| next - v);
                v + 0.9 * step * gap
            };
            shifted.push(w);
        }
        maps.push((values, shifted));
    }
    s.map_values(|i, x| {
        let (values, shifted) = &maps[i];
        let j = values.partition_point(|&v| v < x);
        shifted[j]
    })
}

fn run_trial(
    spec: &JointRiskSpec,
    dim: usize,
    seed: u64,
    trial: usize,
) -> Result<(ScenarioSet, Vec<Check>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let x = random_instance(&mut rng, dim);
    let gamma = |s: &ScenarioSet| gamma_survival_form(s, spec);
    let base = gamma(&x)?;
    let mut checks = Vec::new();

    // A1
    let c: Vec<f64> = (0..dim).map(|_| rng.random_range(0.1..5.0)).collect();
    let scaled = x.map_values(|i, v| c[i] * v)?;
    let factor: f64 = c.iter().product();
    checks.push(Check::equal(
        Axiom::A1,
        gamma(&scaled)?,
        factor * base,
        format!("scaling by {c:?}"),
    ));

    // A2
    let y = rank_preserving_increase(&x, &mut rng, false)?;
    checks.push(Check::at_most(
        Axiom::A2,
        base,
        gamma(&y)?,
        "Gamma(X) <= Gamma(Y) for a rank-preserving Y >= X",
    ));

    // A5 on a comonotone-coupled pair X ≤ Y
    let y = rank_preserving_increase(&x, &mut rng, true)?;
    let gy = gamma(&y)?;
    let mut increment = 0.0;
    for mask in 0u64..(1u64 << dim) {
        let pick: Vec<bool> = (0..dim).map(|i| mask >> i & 1 == 1).collect();
        let lower = pick.iter().filter(|&&p| !p).count();
        let term = gamma(&x.mix_columns(&y, &pick)?)?;
        if lower % 2 == 0 {
            increment += term;
        } else {
            increment -= term;
        }
    }
    checks.push(Check {
        axiom: Axiom::A5,
        gap: -increment,
        scale: gy.abs().max(base.abs()),
        detail: "mixed 2^d increment of Gamma between X and Y".into(),
        lhs: increment,
        rhs: 0.0,
    });

    // A3: X = Y + Z with Y = X ∧ c + λ(X − X ∧ c) componentwise
    let lambda = rng.random_range(0.0..1.0);
    let cut: Vec<f64> = (0..dim)
        .map(|i| {
            let ss = x.marginal(i).expect("index in range");
            ss.breakpoints[rng.random_range(0..ss.len())]
        })
        .collect();
    // Y ≤ X is enforced so that Z = X − Y stays nonnegative after rounding
    let (ya, za) = x.pi_comonotone_split_with(|i, v| {
        let low = v.min(cut[i]);
        (low + lambda * (v - low)).min(v)
    })?;
    let sum = ya.add(&za)?;
    let mut parts = 0.0;
    for mask in 0u64..(1u64 << dim) {
        let pick: Vec<bool> = (0..dim).map(|i| mask >> i & 1 == 1).collect();
        parts += gamma(&ya.mix_columns(&za, &pick)?)?;
    }
    checks.push(Check::equal(
        Axiom::A3,
        gamma(&sum)?,
        parts,
        format!("split with lambda = {lambda}, cut = {cut:?}"),
    ));

    // A4: X ∧ a_k increases to X along a clamp sequence
    let maxima: Vec<f64> = (0..dim).map(|i| x.column(i).fold(0.0, f64::max)).collect();
    let mut prev = 0.0;
    for k in 1..=CLAMP_STEPS {
        let t = k as f64 / CLAMP_STEPS as f64;
        let clamped = x.map_values(|i, v| v.min(t * maxima[i]))?;
        let g = gamma(&clamped)?;
        checks.push(Check::at_most(
            Axiom::A4,
            prev,
            g,
            format!("clamp sequence not non-decreasing at step {k}"),
        ));
        checks.push(Check::at_most(
            Axiom::A4,
            g,
            base,
            format!("clamp at step {k} exceeds Gamma(X)"),
        ));
        prev = g;
    }
    checks.push(Check::equal(
        Axiom::A4,
        prev,
        base,
        "clamp sequence limit differs from Gamma(X)",
    ));

    // A6: relabeled scenarios and a split scenario carry the same distribution
    let mut order: Vec<usize> = (0..x.len()).collect();
    for k in (1..order.len()).rev() {
        order.swap(k, rng.random_range(0..=k));
    }
    checks.push(Check::equal(
        Axiom::A6,
        gamma(&x.permuted(&order)?)?,
        base,
        format!("scenario permutation {order:?}"),
    ));
    let k = rng.random_range(0..x.len());
    let fraction = rng.random_range(0.05..0.95);
    checks.push(Check::equal(
        Axiom::A6,
        gamma(&x.split_scenario(k, fraction)?)?,
        base,
        format!("scenario {k} split with fraction {fraction}"),
    ));

    Ok((x, checks))
}

/// Runs every axiom check on `trials` seeded random instances.
///
/// The spec is built once from `copula` through `factory`. Trials run in
/// parallel; each draws from its own ChaCha8 stream, so the report depends
/// only on the seed.
pub fn axiom_suite(
    factory: &(dyn Fn(&Copula) -> Result<JointRiskSpec> + Sync),
    copula: &Copula,
    seed: u64,
    trials: usize,
) -> Result<AxiomReport> {
    let dim = copula.dim();
    let spec = factory(copula)?;
    if spec.dim() != dim {
        return Err(RiskError::DimensionMismatch {
            expected: dim,
            found: spec.dim(),
        });
    }
    let results = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(&spec, dim, seed, t))
        .collect::<Result<Vec<_>>>()?;

    let mut outcomes: Vec<AxiomOutcome> = Axiom::ALL
        .iter()
        .map(|&axiom| AxiomOutcome {
            axiom,
            passed: true,
            checks: 0,
            worst_violation: 0.0,
            witness: None,
        })
        .collect();
    let mut worst_failing = vec![f64::NEG_INFINITY; Axiom::ALL.len()];
    for (trial, (x, checks)) in results.iter().enumerate() {
        for check in checks {
            let slot = Axiom::ALL
                .iter()
                .position(|&a| a == check.axiom)
                .expect("known axiom");
            let out = &mut outcomes[slot];
            out.checks += 1;
            out.worst_violation = out.worst_violation.max(check.gap.max(0.0));
            if !check.holds() {
                out.passed = false;
                if check.gap > worst_failing[slot] {
                    worst_failing[slot] = check.gap;
                    out.witness = Some(Witness {
                        trial,
                        detail: check.detail.clone(),
                        lhs: check.lhs,
                        rhs: check.rhs,
                        scenarios: x.rows().map(<[f64]>::to_vec).collect(),
                    });
                }
            }
        }
    }
    Ok(AxiomReport {
        seed,
        trials,
        dim,
        copula: copula.label(),
        rel_tol: AXIOM_REL_TOL,
        outcomes,
    })
}
