//! Integer simplicial systems from rational chains.
//!
//! Each connecting map `ψ_i` is replaced by `N_i ψ_i` with `N_i` the lcm of
//! its entry denominators times a scheduled prime. Positive scalings do not
//! change the ordered limit, and cycling through a prime list makes every
//! listed prime appear infinitely often as the chain is extended.

use std::fmt;

use thiserror::Error;

use crate::linalg::Matrix;
use crate::realization::{verify_chain, ChainReport, RealizationChain};
use crate::scalar::Scalar;

pub const DEFAULT_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegerizeError {
    #[error("chain failed verification:\n{0}")]
    InvalidChain(ChainReport),
    #[error("prime schedule must be a nonempty list of primes (got {0:?})")]
    InvalidPrimes(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerChain<S> {
    /// `scalars[i] · ψ_{i+1}`, integer-valued and nonnegative.
    pub connecting: Vec<Matrix<S>>,
    pub scalars: Vec<S>,
    /// The cycled prime list; map `i` (0-based) uses `primes[i % len]`.
    pub primes: Vec<u64>,
}

impl<S: Scalar> IntegerChain<S> {
    /// The prime applied at each connecting map.
    pub fn prime_schedule(&self) -> Vec<u64> {
        schedule(&self.primes, self.connecting.len())
    }
}

fn schedule(primes: &[u64], len: usize) -> Vec<u64> {
    if primes.is_empty() {
        return vec![];
    }
    (0..len).map(|i| primes[i % primes.len()]).collect()
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn denominator_lcm<S: Scalar>(m: &Matrix<S>) -> S {
    m.entries().fold(S::one(), |acc, x| acc.integer_lcm(&x.denominator()))
}

/// Scales each map by the lcm of its denominators times its scheduled prime.
/// Does not look at where the maps came from; see [`integerize_chain`].
pub fn integerize_maps<S: Scalar>(maps: &[Matrix<S>], primes: &[u64]) -> Result<IntegerChain<S>, IntegerizeError> {
    if primes.is_empty() || !primes.iter().all(|&p| is_prime(p)) {
        return Err(IntegerizeError::InvalidPrimes(primes.to_vec()));
    }
    let (scalars, connecting) = maps
        .iter()
        .zip(schedule(primes, maps.len()))
        .map(|(psi, p)| {
            let scalar = denominator_lcm(psi).mul_ref(&S::from_i64(p as i64));
            let m = psi.scale(&scalar);
            (scalar, m)
        })
        .unzip();
    Ok(IntegerChain { connecting, scalars, primes: primes.to_vec() })
}

/// Integerizes a chain after checking it with [`verify_chain`].
pub fn integerize_chain<S: Scalar>(
    c: &RealizationChain<S>,
    primes: &[u64],
) -> Result<IntegerChain<S>, IntegerizeError> {
    if primes.is_empty() || !primes.iter().all(|&p| is_prime(p)) {
        return Err(IntegerizeError::InvalidPrimes(primes.to_vec()));
    }
    let report = verify_chain(c.structure(), c);
    if !report.passed() {
        return Err(IntegerizeError::InvalidChain(report));
    }
    integerize_maps(c.connecting(), primes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntegerClause {
    Count,
    PrimeList,
    ScalarPositive,
    Integrality,
    Nonnegativity,
    Reconstruction,
    ScheduleDivisibility,
}

impl IntegerClause {
    pub fn name(self) -> &'static str {
        match self {
            IntegerClause::Count => "count",
            IntegerClause::PrimeList => "prime-list",
            IntegerClause::ScalarPositive => "scalar-positive",
            IntegerClause::Integrality => "integrality",
            IntegerClause::Nonnegativity => "nonnegativity",
            IntegerClause::Reconstruction => "reconstruction",
            IntegerClause::ScheduleDivisibility => "schedule-divisibility",
        }
    }
}

impl fmt::Display for IntegerClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerFailure {
    /// 1-based connecting-map index; 0 for chain-wide failures.
    pub index: usize,
    pub clause: IntegerClause,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntegerReport {
    pub failures: Vec<IntegerFailure>,
    /// For each listed prime, the number of connecting maps scheduled to it.
    pub coverage: Vec<(u64, usize)>,
}

impl IntegerReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn has(&self, index: usize, clause: IntegerClause) -> bool {
        self.failures.iter().any(|f| f.index == index && f.clause == clause)
    }

    fn fail(&mut self, index: usize, clause: IntegerClause, detail: impl Into<String>) {
        self.failures.push(IntegerFailure { index, clause, detail: detail.into() });
    }
}

impl fmt::Display for IntegerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            writeln!(f, "pass")?;
        }
        for x in &self.failures {
            writeln!(f, "map {}: {} ({})", x.index, x.clause, x.detail)?;
        }
        for (p, count) in &self.coverage {
            writeln!(f, "prime {p}: scheduled on {count} map(s)")?;
        }
        Ok(())
    }
}

/// Checks `ic` against the rational chain it claims to come from.
pub fn verify_integer_chain<S: Scalar>(ic: &IntegerChain<S>, c: &RealizationChain<S>) -> IntegerReport {
    let mut report = IntegerReport::default();
    let k = c.connecting().len();
    if ic.connecting.len() != k || ic.scalars.len() != k {
        report.fail(
            0,
            IntegerClause::Count,
            format!("{k} rational maps, {} integer maps, {} scalars", ic.connecting.len(), ic.scalars.len()),
        );
        return report;
    }
    if ic.primes.is_empty() || !ic.primes.iter().all(|&p| is_prime(p)) {
        report.fail(0, IntegerClause::PrimeList, format!("{:?}", ic.primes));
        return report;
    }
    let sched = ic.prime_schedule();
    for (i, ((m, scalar), psi)) in ic.connecting.iter().zip(&ic.scalars).zip(c.connecting()).enumerate() {
        let index = i + 1;
        if !scalar.is_positive() || !scalar.is_integer() {
            report.fail(index, IntegerClause::ScalarPositive, format!("scalar {scalar}"));
            continue;
        }
        if let Some(x) = m.entries().find(|x| !x.is_integer()) {
            report.fail(index, IntegerClause::Integrality, format!("entry {x}"));
        }
        if !m.is_entrywise_nonneg() {
            report.fail(index, IntegerClause::Nonnegativity, "negative entry");
        }
        if m.dim() != psi.dim() || *m != psi.scale(scalar) {
            report.fail(index, IntegerClause::Reconstruction, "matrix ≠ scalar · ψ");
        }
        let p = S::from_i64(sched[i] as i64);
        if !scalar.div_ref(&p).is_integer() {
            report.fail(index, IntegerClause::ScheduleDivisibility, format!("{} ∤ {scalar}", sched[i]));
        }
    }
    let mut seen = Vec::new();
    for &p in &ic.primes {
        if !seen.contains(&p) {
            seen.push(p);
            report.coverage.push((p, sched.iter().filter(|&&q| q == p).count()));
        }
    }
    report
}
