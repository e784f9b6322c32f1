//! Combinatorial description of a finite-dimensional ordered vector space
//! with interpolation.
//!
//! The positive cone is
//! `V⁺ = ⋃_{S ∈ 𝒮} 0^{S^c} · F_{>0}^{E^>_S} · F^{E^*_S}` where `𝒮` is a
//! sublattice of subsets of `{1..n}` and `S = E^>_S ⊔ E^*_S` for each `S`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::index_set::{IndexSet, MAX_DIM};
use crate::linalg::Vector;
use crate::scalar::Scalar;

/// One entry of an unvalidated structure: a lattice member with its
/// strictly-positive and free coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PieceSpec {
    pub set: IndexSet,
    pub e_pos: IndexSet,
    pub e_free: IndexSet,
}

impl PieceSpec {
    pub fn new(set: IndexSet, e_pos: IndexSet, e_free: IndexSet) -> Self {
        PieceSpec { set, e_pos, e_free }
    }
}

/// Raw structure data as read from a file, before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureCandidate {
    pub n: usize,
    pub pieces: Vec<PieceSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clause {
    LatticeEmptySet,
    LatticeFullSet,
    UnionClosure,
    IntersectionClosure,
    Partition,
    Rv1,
    Rv2,
}

impl Clause {
    pub fn name(self) -> &'static str {
        match self {
            Clause::LatticeEmptySet => "lattice-contains-empty",
            Clause::LatticeFullSet => "lattice-contains-full",
            Clause::UnionClosure => "union-closure",
            Clause::IntersectionClosure => "intersection-closure",
            Clause::Partition => "partition",
            Clause::Rv1 => "RV1",
            Clause::Rv2 => "RV2",
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    pub witnesses: Vec<IndexSet>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn of_clause(&self, clause: Clause) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.clause == clause)
    }

    pub fn cites(&self, clause: Clause, witnesses: &[IndexSet]) -> bool {
        self.of_clause(clause).any(|v| v.witnesses == witnesses)
    }

    fn push(&mut self, clause: Clause, witnesses: Vec<IndexSet>, detail: String) {
        self.violations.push(Violation { clause, witnesses, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            write!(f, "{}:", v.clause)?;
            for w in &v.witnesses {
                write!(f, " {w}")?;
            }
            writeln!(f, " ({})", v.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("invalid structure:\n{0}")]
    Invalid(ValidationReport),
}

fn check_well_formed(c: &StructureCandidate) -> Result<(), StructureError> {
    if c.n == 0 || c.n > MAX_DIM {
        return Err(StructureError::Malformed(format!("dimension n = {} outside 1..={MAX_DIM}", c.n)));
    }
    let full = IndexSet::full(c.n);
    let mut seen = HashMap::new();
    for (k, p) in c.pieces.iter().enumerate() {
        for (field, s) in [("S", p.set), ("e_pos", p.e_pos), ("e_free", p.e_free)] {
            if !s.is_subset(full) {
                return Err(StructureError::Malformed(format!("sets[{k}]: {field} has an index outside 1..={}", c.n)));
            }
        }
        if let Some(prev) = seen.insert(p.set, k) {
            return Err(StructureError::Malformed(format!(
                "sets[{k}]: duplicate entry for S = {} (first at sets[{prev}])",
                p.set
            )));
        }
    }
    Ok(())
}

/// `E^≥_S = E^>_S ∪ S^c`.
fn e_geq(n: usize, set: IndexSet, e_pos: IndexSet) -> IndexSet {
    e_pos.union(set.complement(n))
}

/// Checks every clause of the combinatorial description and lists each
/// violation with its witnesses. Only structural garbage (bad dimension,
/// out-of-range index, duplicate lattice entry) is an error.
pub fn validate_structure(c: &StructureCandidate) -> Result<ValidationReport, StructureError> {
    check_well_formed(c)?;
    let n = c.n;
    let mut report = ValidationReport::default();
    let mut pieces = c.pieces.clone();
    pieces.sort_by_key(|p| p.set);
    let lookup: HashMap<IndexSet, &PieceSpec> = pieces.iter().map(|p| (p.set, p)).collect();

    if !lookup.contains_key(&IndexSet::EMPTY) {
        report.push(Clause::LatticeEmptySet, vec![], "∅ is not in the lattice".into());
    }
    if !lookup.contains_key(&IndexSet::full(n)) {
        report.push(Clause::LatticeFullSet, vec![], format!("{} is not in the lattice", IndexSet::full(n)));
    }

    for (a, pa) in pieces.iter().enumerate() {
        for pb in &pieces[a + 1..] {
            let (s1, s2) = (pa.set, pb.set);
            let u = s1.union(s2);
            if !lookup.contains_key(&u) {
                report.push(Clause::UnionClosure, vec![s1, s2], format!("union {u} missing"));
            }
            let i = s1.intersection(s2);
            if !lookup.contains_key(&i) {
                report.push(Clause::IntersectionClosure, vec![s1, s2], format!("intersection {i} missing"));
            }
        }
    }

    for p in &pieces {
        if !p.e_pos.is_disjoint(p.e_free) {
            report.push(
                Clause::Partition,
                vec![p.set],
                format!("e_pos and e_free share {}", p.e_pos.intersection(p.e_free)),
            );
        } else if p.e_pos.union(p.e_free) != p.set {
            report.push(
                Clause::Partition,
                vec![p.set],
                format!("e_pos ∪ e_free = {} differs from S", p.e_pos.union(p.e_free)),
            );
        }
    }

    for (a, pa) in pieces.iter().enumerate() {
        for pb in &pieces[a + 1..] {
            let Some(pu) = lookup.get(&pa.set.union(pb.set)) else {
                continue;
            };
            let lhs = e_geq(n, pu.set, pu.e_pos);
            let rhs = e_geq(n, pa.set, pa.e_pos).intersection(e_geq(n, pb.set, pb.e_pos));
            if lhs != rhs {
                report.push(
                    Clause::Rv1,
                    vec![pa.set, pb.set],
                    format!("E≥ of union is {lhs}, intersection of E≥ is {rhs}"),
                );
            }
        }
    }

    for p1 in &pieces {
        for p2 in &pieces {
            if !p2.set.is_subset(p1.set) && p2.e_pos.difference(p1.set).is_empty() {
                report.push(
                    Clause::Rv2,
                    vec![p1.set, p2.set],
                    format!("S2 ⊄ S1 but E>_S2 \\ S1 = ∅ (E>_S2 = {})", p2.e_pos),
                );
            }
        }
    }

    Ok(report)
}

/// `Z_i` and `P_i` for every index, computed as unions over the listed
/// lattice members (no validity assumed).
fn z_and_p(n: usize, pieces: &[(IndexSet, IndexSet)]) -> (Vec<IndexSet>, Vec<IndexSet>) {
    let mut z = vec![IndexSet::EMPTY; n];
    let mut p = vec![IndexSet::EMPTY; n];
    for &(set, e_pos) in pieces {
        let geq = e_geq(n, set, e_pos);
        for i in 0..n {
            if !set.contains(i) {
                z[i] = z[i].union(set);
            }
            if geq.contains(i) {
                p[i] = p[i].union(set);
            }
        }
    }
    (z, p)
}

/// Whether `E^>_S = {i ∈ S : S ⊆ P_i}` for every listed `S` and
/// `Z_i ⊆ P_i` for every `i`. On candidates that pass the lattice and
/// partition clauses this is equivalent to RV1.
pub fn satisfies_p_parametrization(c: &StructureCandidate) -> bool {
    let pieces: Vec<_> = c.pieces.iter().map(|p| (p.set, p.e_pos)).collect();
    let (z, p) = z_and_p(c.n, &pieces);
    if (0..c.n).any(|i| !z[i].is_subset(p[i])) {
        return false;
    }
    pieces.iter().all(|&(set, e_pos)| {
        let expected = IndexSet::from_indices(set.iter().filter(|&i| set.is_subset(p[i])));
        expected == e_pos
    })
}

/// A validated cone structure. Lattice members are kept in canonical order
/// (cardinality, then lexicographic); `E^0_S = S^c` is never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeStructure {
    n: usize,
    lattice: Vec<IndexSet>,
    e_pos: Vec<IndexSet>,
}

impl ConeStructure {
    pub fn new(candidate: &StructureCandidate) -> Result<Self, StructureError> {
        let report = validate_structure(candidate)?;
        if !report.is_valid() {
            return Err(StructureError::Invalid(report));
        }
        let mut pieces: Vec<_> = candidate.pieces.iter().map(|p| (p.set, p.e_pos)).collect();
        pieces.sort_by_key(|p| p.0);
        Ok(ConeStructure {
            n: candidate.n,
            lattice: pieces.iter().map(|p| p.0).collect(),
            e_pos: pieces.iter().map(|p| p.1).collect(),
        })
    }

    /// Convenience constructor from `(S, E^>_S)` pairs with `E^*_S = S \ E^>_S`.
    pub fn from_pieces(n: usize, pieces: &[(IndexSet, IndexSet)]) -> Result<Self, StructureError> {
        Self::new(&candidate_from_pieces(n, pieces))
    }

    /// The full lattice with `E^>_S = S`: the standard simplicial cone.
    pub fn orthant(n: usize) -> Self {
        assert!((1..=16).contains(&n), "orthant structure enumerates 2^n sets");
        let mut lattice: Vec<IndexSet> = (0..1u64 << n).map(IndexSet::from_bits).collect();
        lattice.sort();
        ConeStructure { n, e_pos: lattice.clone(), lattice }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lattice(&self) -> &[IndexSet] {
        &self.lattice
    }

    /// `(S, E^>_S)` in canonical order.
    pub fn pieces(&self) -> impl Iterator<Item = (IndexSet, IndexSet)> + '_ {
        self.lattice.iter().copied().zip(self.e_pos.iter().copied())
    }

    pub fn contains(&self, set: IndexSet) -> bool {
        self.position(set).is_some()
    }

    fn position(&self, set: IndexSet) -> Option<usize> {
        self.lattice.binary_search(&set).ok()
    }

    pub fn e_pos(&self, set: IndexSet) -> Option<IndexSet> {
        self.position(set).map(|k| self.e_pos[k])
    }

    pub fn e_free(&self, set: IndexSet) -> Option<IndexSet> {
        self.e_pos(set).map(|e| set.difference(e))
    }

    pub fn e_geq(&self, set: IndexSet) -> Option<IndexSet> {
        self.e_pos(set).map(|e| e_geq(self.n, set, e))
    }

    pub fn to_candidate(&self) -> StructureCandidate {
        let pieces: Vec<_> = self.pieces().collect();
        candidate_from_pieces(self.n, &pieces)
    }

    pub fn derive(&self) -> DerivedIndexData {
        DerivedIndexData::new(self)
    }

    /// `S_x`: the smallest lattice member containing `supp(x)`.
    pub fn support_closure<S: Scalar>(&self, x: &Vector<S>) -> IndexSet {
        let supp = support(x);
        self.lattice.iter().filter(|s| supp.is_subset(**s)).fold(IndexSet::full(self.n), |acc, s| acc.intersection(*s))
    }

    /// Membership in `V⁺`. Returns the first witnessing `S` in canonical
    /// lattice order.
    pub fn member_v<S: Scalar>(&self, x: &Vector<S>) -> Option<IndexSet> {
        assert_eq!(x.len(), self.n, "vector length must match the dimension");
        let supp = support(x);
        self.pieces()
            .find(|&(set, e_pos)| supp.is_subset(set) && e_pos.iter().all(|i| x[i].is_positive()))
            .map(|(set, _)| set)
    }

    /// Membership in `U⁺ = ⋃_S F_{>0}^S 0^{S^c}`.
    pub fn member_u<S: Scalar>(&self, x: &Vector<S>) -> bool {
        assert_eq!(x.len(), self.n, "vector length must match the dimension");
        self.contains(support(x)) && x.iter().all(|v| v.is_nonneg())
    }
}

pub fn candidate_from_pieces(n: usize, pieces: &[(IndexSet, IndexSet)]) -> StructureCandidate {
    StructureCandidate {
        n,
        pieces: pieces.iter().map(|&(set, e_pos)| PieceSpec::new(set, e_pos, set.difference(e_pos))).collect(),
    }
}

/// Indices of the nonzero coordinates.
pub fn support<S: Scalar>(x: &Vector<S>) -> IndexSet {
    IndexSet::from_indices(x.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, _)| i))
}

/// `Z_i`, `P_i`, the α-blocks `B_Z` and the evaluation orders that drive the
/// structured matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedIndexData {
    n: usize,
    z: Vec<IndexSet>,
    p: Vec<IndexSet>,
    /// `(Z, B_Z)` in nonincreasing `|Z|` order.
    blocks: Vec<(IndexSet, IndexSet)>,
    beta_order: Vec<usize>,
}

impl DerivedIndexData {
    pub fn new(s: &ConeStructure) -> Self {
        let n = s.n();
        let pieces: Vec<_> = s.pieces().collect();
        let (z, p) = z_and_p(n, &pieces);

        let mut zs: Vec<IndexSet> = z.clone();
        zs.sort_by(IndexSet::descending_cmp);
        zs.dedup();
        let blocks = zs.into_iter().map(|zv| (zv, IndexSet::from_indices((0..n).filter(|&i| z[i] == zv)))).collect();

        let mut beta_order: Vec<usize> = (0..n).collect();
        beta_order.sort_by(|&a, &b| p[a].descending_cmp(&p[b]).then(a.cmp(&b)));

        DerivedIndexData { n, z, p, blocks, beta_order }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `Z_i = ⋃{S ∈ 𝒮 : i ∉ S}`, 0-based `i`.
    pub fn z(&self, i: usize) -> IndexSet {
        self.z[i]
    }

    /// `P_i = ⋃{S ∈ 𝒮 : i ∈ E^≥_S}`, 0-based `i`.
    pub fn p(&self, i: usize) -> IndexSet {
        self.p[i]
    }

    pub fn blocks(&self) -> &[(IndexSet, IndexSet)] {
        &self.blocks
    }

    pub fn block(&self, zv: IndexSet) -> Option<IndexSet> {
        self.blocks.iter().find(|(k, _)| *k == zv).map(|(_, b)| *b)
    }

    pub fn alpha_block_order(&self) -> Vec<IndexSet> {
        self.blocks.iter().map(|(zv, _)| *zv).collect()
    }

    /// Permutation of `0..n` with `|P_i|` nonincreasing.
    pub fn beta_order(&self) -> &[usize] {
        &self.beta_order
    }

    /// Whether column `j` enters row `i` of `α^ε`.
    pub fn alpha_couples(&self, i: usize, j: usize) -> bool {
        !self.z[i].contains(j)
    }

    /// Whether column `j` enters row `i` of `β^R` off the diagonal.
    pub fn beta_couples(&self, i: usize, j: usize) -> bool {
        !self.p[i].contains(j) && self.p[j] != self.p[i]
    }

    /// Checks the derived invariants against the structure; returns the
    /// first failure as text.
    pub fn check_invariants(&self, s: &ConeStructure) -> Result<(), String> {
        for i in 0..self.n {
            let (zi, pi) = (self.z[i], self.p[i]);
            if !s.contains(zi) || !s.contains(pi) {
                return Err(format!("Z_{0} or P_{0} outside the lattice", i + 1));
            }
            if zi.contains(i) {
                return Err(format!("{} ∈ Z_{}", i + 1, i + 1));
            }
            if !s.e_geq(pi).is_some_and(|g| g.contains(i)) {
                return Err(format!("{} ∉ E≥ of P_{}", i + 1, i + 1));
            }
            if !zi.is_subset(pi) {
                return Err(format!("Z_{0} ⊄ P_{0}", i + 1));
            }
            for j in 0..self.n {
                if zi.contains(j) == zi.is_subset(self.z[j]) {
                    return Err(format!("j ∉ Z_i ⇔ Z_i ⊆ Z_j fails at i={}, j={}", i + 1, j + 1));
                }
                if !pi.contains(j) && !pi.is_subset(self.p[j]) {
                    return Err(format!("j ∉ P_i ⇒ P_i ⊆ P_j fails at i={}, j={}", i + 1, j + 1));
                }
            }
        }
        Ok(())
    }
}
