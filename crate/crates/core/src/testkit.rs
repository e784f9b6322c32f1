//! Random valid structures, cone points, and the packaged lemma checks.
//!
//! Everything is deterministic given a seed (ChaCha8).

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::index_set::IndexSet;
use crate::linalg::Vector;
use crate::maps::{alpha_apply, alpha_inverse_apply, beta_apply, beta_inverse_apply, phi_inverse_apply, phi_matrix};
use crate::realization::{epsilon_bound, r_threshold, refine};
use crate::scalar::Scalar;
use crate::structure::{ConeStructure, DerivedIndexData};

/// Largest dimension the generator accepts; lattices are enumerated.
pub const MAX_GENERATOR_DIM: usize = 16;

/// Named small structures used across tests and docs.
pub mod fixtures {
    use crate::index_set::IndexSet;
    use crate::structure::{candidate_from_pieces, ConeStructure, StructureCandidate};

    fn set(e: &[u64]) -> IndexSet {
        IndexSet::from_one_based(e, 2).expect("fixture indices in range")
    }

    /// The standard orthant in dimension 2: all subsets, `E^>_S = S`.
    pub fn orth2() -> ConeStructure {
        ConeStructure::orthant(2)
    }

    /// Lexicographic cone: `x = 0` or `x_1 > 0`.
    pub fn lex2() -> ConeStructure {
        ConeStructure::from_pieces(2, &[(set(&[]), set(&[])), (set(&[1, 2]), set(&[1]))]).expect("LEX2 is valid")
    }

    /// A lattice/partition-valid candidate that violates RV2 at `({1}, {1,2})`.
    pub fn bad2() -> StructureCandidate {
        candidate_from_pieces(2, &[(set(&[]), set(&[])), (set(&[1]), set(&[1])), (set(&[1, 2]), set(&[]))])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerationError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("no valid structure after {0} attempts")]
    GenerationExhausted(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub n: usize,
    /// Number of random subsets thrown into the lattice before closing.
    pub lattice_seeds: usize,
    pub seed: u64,
    pub max_retries: usize,
}

impl GeneratorConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        GeneratorConfig { n, lattice_seeds: 3, seed, max_retries: 100 }
    }
}

/// Closes `{∅, full} ∪ seeds` under union and intersection.
pub fn lattice_closure(n: usize, seeds: &[IndexSet]) -> Vec<IndexSet> {
    let mut members: BTreeSet<IndexSet> = [IndexSet::EMPTY, IndexSet::full(n)].into_iter().collect();
    let mut pending: Vec<IndexSet> = seeds.to_vec();
    while let Some(s) = pending.pop() {
        if !members.insert(s) {
            continue;
        }
        for &t in members.iter() {
            for u in [s.union(t), s.intersection(t)] {
                if !members.contains(&u) {
                    pending.push(u);
                }
            }
        }
    }
    members.into_iter().collect()
}

/// Draws a valid structure through the `P`-parametrization: choose each
/// `P_i ⊇ Z_i` in the lattice, set `E^>_S = {i ∈ S : S ⊆ P_i}` (RV1 holds by
/// construction) and reject on RV2.
pub fn random_structure(cfg: &GeneratorConfig) -> Result<ConeStructure, GenerationError> {
    if cfg.n == 0 || cfg.n > MAX_GENERATOR_DIM {
        return Err(GenerationError::InvalidConfig(format!("n = {} outside 1..={MAX_GENERATOR_DIM}", cfg.n)));
    }
    if cfg.max_retries == 0 {
        return Err(GenerationError::InvalidConfig("max_retries must be at least 1".into()));
    }
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.max_retries {
        let seeds: Vec<IndexSet> = (0..cfg.lattice_seeds)
            .map(|_| IndexSet::from_bits(rng.gen::<u64>()).intersection(IndexSet::full(n)))
            .collect();
        let lattice = lattice_closure(n, &seeds);
        let z: Vec<IndexSet> = (0..n)
            .map(|i| lattice.iter().filter(|s| !s.contains(i)).fold(IndexSet::EMPTY, |a, s| a.union(*s)))
            .collect();
        let p: Vec<IndexSet> = (0..n)
            .map(|i| {
                let above: Vec<IndexSet> = lattice.iter().copied().filter(|s| z[i].is_subset(*s)).collect();
                *above.choose(&mut rng).expect("the full set lies above Z_i")
            })
            .collect();
        let pieces: Vec<(IndexSet, IndexSet)> =
            lattice.iter().map(|&s| (s, IndexSet::from_indices(s.iter().filter(|&i| s.is_subset(p[i]))))).collect();
        let rv2 = pieces
            .iter()
            .all(|&(s1, _)| pieces.iter().all(|&(s2, e2)| s2.is_subset(s1) || !e2.difference(s1).is_empty()));
        if rv2 {
            return Ok(ConeStructure::from_pieces(n, &pieces).expect("generator output is valid"));
        }
    }
    Err(GenerationError::GenerationExhausted(cfg.max_retries))
}

/// Rational with numerator in `lo..=hi` and denominator in `1..=10`.
pub fn random_rational<S: Scalar, R: Rng>(rng: &mut R, lo: i64, hi: i64) -> S {
    S::from_ratio(rng.gen_range(lo..=hi), rng.gen_range(1..=10))
}

pub fn sample_cone_point<S: Scalar>(s: &ConeStructure, seed: u64) -> Vector<S> {
    sample_cone_point_with(s, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Picks a lattice member `S` uniformly, then positive values on `E^>_S`,
/// arbitrary values (zero and negatives included) on `E^*_S`, zero elsewhere.
pub fn sample_cone_point_with<S: Scalar, R: Rng>(s: &ConeStructure, rng: &mut R) -> Vector<S> {
    let (set, e_pos) = s.pieces().nth(rng.gen_range(0..s.lattice().len())).expect("nonempty lattice");
    let entries = (0..s.n())
        .map(|i| {
            if e_pos.contains(i) {
                random_rational(rng, 1, 20)
            } else if set.contains(i) {
                random_rational(rng, -20, 20)
            } else {
                S::zero()
            }
        })
        .collect();
    Vector::new(entries)
}

/// A point of `U⁺`: positive on a uniformly chosen lattice member.
pub fn sample_u_point<S: Scalar, R: Rng>(s: &ConeStructure, rng: &mut R) -> Vector<S> {
    let set = *s.lattice().choose(rng).expect("nonempty lattice");
    Vector::new((0..s.n()).map(|i| if set.contains(i) { random_rational(rng, 1, 20) } else { S::zero() }).collect())
}

fn sample_vector<S: Scalar, R: Rng>(rng: &mut R, n: usize, lo: i64) -> Vector<S> {
    Vector::new((0..n).map(|_| if rng.gen_bool(0.4) { S::zero() } else { random_rational(rng, lo, 20) }).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LemmaClause {
    SupportUnderAlpha,
    SupportUnderBetaAlpha,
    AlphaImageInU,
    BetaImageInV,
    ThresholdPreimageInU,
    PreimageNondecreasing,
    EpsilonBoundNonneg,
    RefinementNested,
    AlphaRoundTrip,
    BetaRoundTrip,
}

impl LemmaClause {
    pub const ALL: [LemmaClause; 10] = [
        LemmaClause::SupportUnderAlpha,
        LemmaClause::SupportUnderBetaAlpha,
        LemmaClause::AlphaImageInU,
        LemmaClause::BetaImageInV,
        LemmaClause::ThresholdPreimageInU,
        LemmaClause::PreimageNondecreasing,
        LemmaClause::EpsilonBoundNonneg,
        LemmaClause::RefinementNested,
        LemmaClause::AlphaRoundTrip,
        LemmaClause::BetaRoundTrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaClause::SupportUnderAlpha => "support: S_z = S_alpha(z)",
            LemmaClause::SupportUnderBetaAlpha => "support: S_z = S_beta(alpha(z))",
            LemmaClause::AlphaImageInU => "positivity: alpha(z >= 0) in U+",
            LemmaClause::BetaImageInV => "positivity: beta(U+) in V+",
            LemmaClause::ThresholdPreimageInU => "threshold: beta^-1 at R, 2R, 4R in U+",
            LemmaClause::PreimageNondecreasing => "threshold: beta^-1 nondecreasing in R",
            LemmaClause::EpsilonBoundNonneg => "threshold: alpha^-1 at eps, eps/2, eps/4 >= 0",
            LemmaClause::RefinementNested => "refinement: refined stage contains old stage and target",
            LemmaClause::AlphaRoundTrip => "round-trip: alpha^-1(alpha(z)) = z",
            LemmaClause::BetaRoundTrip => "round-trip: beta^-1(beta(z)) = z",
        }
    }
}

impl fmt::Display for LemmaClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseTally {
    pub clause: LemmaClause,
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub seed: u64,
    pub trials: usize,
    pub tallies: Vec<ClauseTally>,
}

impl LemmaReport {
    fn new(seed: u64, trials: usize) -> Self {
        let tallies = LemmaClause::ALL
            .iter()
            .map(|&clause| ClauseTally { clause, passed: 0, failed: 0, first_failure: None })
            .collect();
        LemmaReport { seed, trials, tallies }
    }

    fn record(&mut self, clause: LemmaClause, ok: bool, witness: impl FnOnce() -> String) {
        let t = self.tallies.iter_mut().find(|t| t.clause == clause).expect("all clauses tallied");
        if ok {
            t.passed += 1;
        } else {
            t.failed += 1;
            t.first_failure.get_or_insert_with(witness);
        }
    }

    pub fn all_passed(&self) -> bool {
        self.tallies.iter().all(|t| t.failed == 0)
    }

    pub fn failures(&self) -> usize {
        self.tallies.iter().map(|t| t.failed).sum()
    }

    pub fn tally(&self, clause: LemmaClause) -> &ClauseTally {
        self.tallies.iter().find(|t| t.clause == clause).expect("all clauses tallied")
    }

    /// Adds another report's counts into this one.
    pub fn merge(&mut self, other: &LemmaReport) {
        self.trials += other.trials;
        for t in &other.tallies {
            let mine = self.tallies.iter_mut().find(|m| m.clause == t.clause).expect("same clause set");
            mine.passed += t.passed;
            mine.failed += t.failed;
            if mine.first_failure.is_none() {
                mine.first_failure.clone_from(&t.first_failure);
            }
        }
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {} trials {}", self.seed, self.trials)?;
        for t in &self.tallies {
            let status = if t.failed == 0 { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {} ({} passed, {} failed)", t.clause, t.passed, t.failed)?;
            if let Some(w) = &t.first_failure {
                writeln!(f, "  first failure: {w}")?;
            }
        }
        Ok(())
    }
}

/// Runs every lemma clause `trials` times on random inputs drawn from
/// `seed`. All checks are exact.
pub fn run_lemma_suite<S: Scalar>(s: &ConeStructure, trials: usize, seed: u64) -> LemmaReport {
    let d = s.derive();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LemmaReport::new(seed, trials);
    for _ in 0..trials {
        lemma_trial::<S, _>(s, &d, &mut rng, &mut report);
    }
    report
}

fn lemma_trial<S: Scalar, R: Rng>(s: &ConeStructure, d: &DerivedIndexData, rng: &mut R, report: &mut LemmaReport) {
    let n = s.n();
    let eps: S = S::from_ratio(rng.gen_range(1..=10), rng.gen_range(1..=100));
    let big_r: S = S::from_ratio(rng.gen_range(1..=100), rng.gen_range(1..=10));

    let z: Vector<S> = sample_vector(rng, n, -20);
    let az = alpha_apply(d, &eps, &z).expect("ε > 0");
    let beta_az = beta_apply(d, &big_r, &az).expect("R > 0");
    let sz = s.support_closure(&z);
    report.record(LemmaClause::SupportUnderAlpha, s.support_closure(&az) == sz, || format!("z = {z:?}, ε = {eps}"));
    report.record(LemmaClause::SupportUnderBetaAlpha, s.support_closure(&beta_az) == sz, || {
        format!("z = {z:?}, ε = {eps}, R = {big_r}")
    });
    report.record(LemmaClause::AlphaRoundTrip, alpha_inverse_apply(d, &eps, &az).expect("ε > 0") == z, || {
        format!("z = {z:?}, ε = {eps}")
    });
    let bz = beta_apply(d, &big_r, &z).expect("R > 0");
    report.record(LemmaClause::BetaRoundTrip, beta_inverse_apply(d, &big_r, &bz).expect("R > 0") == z, || {
        format!("z = {z:?}, R = {big_r}")
    });

    let z_pos: Vector<S> = sample_vector(rng, n, 0);
    let a_pos = alpha_apply(d, &eps, &z_pos).expect("ε > 0");
    report.record(LemmaClause::AlphaImageInU, s.member_u(&a_pos), || format!("z = {z_pos:?}, ε = {eps}"));
    let u: Vector<S> = sample_u_point(s, rng);
    for y in [&u, &a_pos] {
        let by = beta_apply(d, &big_r, y).expect("R > 0");
        report.record(LemmaClause::BetaImageInV, s.member_v(&by).is_some(), || format!("u = {y:?}, R = {big_r}"));
    }

    let x: Vector<S> = sample_cone_point_with(s, rng);
    let r_star = r_threshold(s, d, &x).expect("sampled point lies in V+");
    let preimages: Vec<Vector<S>> = [1, 2, 4]
        .iter()
        .map(|&k| beta_inverse_apply(d, &r_star.mul_ref(&S::from_i64(k)), &x).expect("R > 0"))
        .collect();
    report.record(LemmaClause::ThresholdPreimageInU, preimages.iter().all(|y| s.member_u(y)), || {
        format!("x = {x:?}, R* = {r_star}")
    });
    let nondecreasing = preimages.windows(2).all(|w| w[0].iter().zip(w[1].iter()).all(|(lo, hi)| lo <= hi));
    report.record(LemmaClause::PreimageNondecreasing, nondecreasing, || format!("x = {x:?}, R* = {r_star}"));

    if !u.is_zero() {
        let e_star = epsilon_bound(&u, n).expect("nonzero");
        let ok = [1, 2, 4].iter().all(|&k| {
            let e = e_star.div_ref(&S::from_i64(k));
            alpha_inverse_apply(d, &e, &u).expect("ε > 0").is_nonneg()
        });
        report.record(LemmaClause::EpsilonBoundNonneg, ok, || format!("u = {u:?}, ε* = {e_star}"));
    }

    let floor = big_r.clone() + S::one();
    let extra = [x.clone()];
    let nested = match refine(s, d, &big_r, &eps, &floor, &extra) {
        Ok((r2, e2)) => {
            let phi1 = phi_matrix(d, &big_r, &eps).expect("positive parameters");
            let old_cone_inside = (0..n)
                .all(|j| phi_inverse_apply(d, &r2, &e2, &phi1.column(j)).expect("positive parameters").is_nonneg());
            let target_inside = phi_inverse_apply(d, &r2, &e2, &x).expect("positive parameters").is_nonneg();
            old_cone_inside && target_inside && r2 > floor && e2 < eps
        }
        Err(_) => false,
    };
    report.record(LemmaClause::RefinementNested, nested, || format!("R1 = {big_r}, ε1 = {eps}, x = {x:?}"));
}
