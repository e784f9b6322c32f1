//! Inductive-limit realization of `(F^n, V⁺)` by simplicial cones.
//!
//! Stage `i` of a chain is `φ_i = β^{R_i} α^{ε_i}`; the stage cone is
//! `φ_i(F^n_{≥0})`. Consecutive cones are nested, witnessed by the connecting
//! maps `ψ_i = φ_{i+1}^{-1} φ_i` being entrywise nonnegative. Thresholds for
//! `R` and `ε` are computed in closed form, so construction is deterministic.

use std::fmt;

use thiserror::Error;

use crate::linalg::{Matrix, Vector};
use crate::maps::{
    alpha_apply, beta_apply, beta_inverse_apply, phi_inverse_apply, phi_matrix, require_positive, MapError,
};
use crate::scalar::Scalar;
use crate::structure::{ConeStructure, DerivedIndexData};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("vector {0} is not in the positive cone")]
    NotInCone(String),
    #[error("zero vector: every ε works")]
    ZeroVector,
    #[error(transparent)]
    Parameter(#[from] MapError),
    #[error("R floor {floor} must exceed R1 = {r1}")]
    FloorTooLow { r1: String, floor: String },
    #[error("chain needs at least one stage")]
    EmptyChain,
    #[error("order violation: {0} is not in the positive cone")]
    OrderViolation(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// One stage `(R_i, ε_i, φ_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage<S> {
    pub big_r: S,
    pub epsilon: S,
    pub phi: Matrix<S>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationChain<S> {
    structure: ConeStructure,
    derived: DerivedIndexData,
    stages: Vec<Stage<S>>,
    connecting: Vec<Matrix<S>>,
}

/// `m / (4nM)` with `m`, `M` the least and greatest `|y_i|` over `supp(y)`.
/// For `y ∈ U⁺` and every `ε` at most this value, `(α^ε)^{-1}(y) ≥ 0`.
pub fn epsilon_bound<S: Scalar>(y: &Vector<S>, n: usize) -> Result<S, RealizeError> {
    let magnitudes: Vec<S> = y.iter().filter(|v| !v.is_zero()).map(|v| v.abs()).collect();
    let (Some(m), Some(big_m)) = (magnitudes.iter().min(), magnitudes.iter().max()) else {
        return Err(RealizeError::ZeroVector);
    };
    let denom = S::from_i64(4 * n as i64).mul_ref(big_m);
    Ok(m.div_ref(&denom))
}

/// Least `R*` (by the closed-form induction over `E^*_{S_x}`) with
/// `(β^R)^{-1}(x) ∈ U⁺` for every `R ≥ R*`.
///
/// Each free index `i`, taken in nonincreasing `|P_i|` order, contributes
/// `1 + max(0, −x_i / x_{j₀})` where `j₀` is the least element of
/// `E^>_{S_x} \ P_i`.
pub fn r_threshold<S: Scalar>(s: &ConeStructure, d: &DerivedIndexData, x: &Vector<S>) -> Result<S, RealizeError> {
    check_len(s.n(), x.len())?;
    let witness = s.member_v(x).ok_or_else(|| RealizeError::NotInCone(format!("{x:?}")))?;
    let sx = s.support_closure(x);
    debug_assert_eq!(witness, sx, "a cone point lies in the piece of its support closure");
    let e_pos = s.e_pos(sx).expect("support closure is a lattice member");
    let e_free = sx.difference(e_pos);

    let mut threshold = S::one();
    for &i in d.beta_order().iter().filter(|&&i| e_free.contains(i)) {
        let j0 = e_pos.difference(d.p(i)).first().expect("E>_{S_x} \\ P_i is nonempty for a valid structure");
        let mut candidate = S::one();
        if x[i].is_negative() {
            candidate += (-x[i].clone()).div_ref(&x[j0]);
        }
        if candidate > threshold {
            threshold = candidate;
        }
    }
    Ok(threshold)
}

/// Given stage parameters `(R1, ε1)`, picks `(R2, ε2)` with `R2 > R_floor`,
/// `ε2 < ε1` such that the old stage cone and every vector in `extra` land
/// inside `β^{R2} α^{ε2}(F^n_{≥0})`.
pub fn refine<S: Scalar>(
    s: &ConeStructure,
    d: &DerivedIndexData,
    r1: &S,
    eps1: &S,
    r_floor: &S,
    extra: &[Vector<S>],
) -> Result<(S, S), RealizeError> {
    require_positive("R1", r1)?;
    require_positive("epsilon1", eps1)?;
    if r_floor <= r1 {
        return Err(RealizeError::FloorTooLow { r1: r1.to_string(), floor: r_floor.to_string() });
    }
    let n = s.n();
    let mut targets: Vec<Vector<S>> = (0..n)
        .map(|i| {
            let a = alpha_apply(d, eps1, &Vector::basis(n, i))?;
            beta_apply(d, r1, &a)
        })
        .collect::<Result<_, _>>()?;
    for v in extra {
        check_len(n, v.len())?;
        if s.member_v(v).is_none() {
            return Err(RealizeError::NotInCone(format!("{v:?}")));
        }
        targets.push(v.clone());
    }

    let mut r2 = r_floor.clone();
    for v in &targets {
        let t = r_threshold(s, d, v)?;
        if t > r2 {
            r2 = t;
        }
    }
    r2 += S::one();

    let mut eps2 = eps1.div_ref(&S::from_i64(2));
    for v in targets.iter().filter(|v| !v.is_zero()) {
        let y = beta_inverse_apply(d, &r2, v)?;
        let bound = epsilon_bound(&y, n)?;
        if bound < eps2 {
            eps2 = bound;
        }
    }
    Ok((r2, eps2))
}

fn check_len(expected: usize, found: usize) -> Result<(), RealizeError> {
    if expected == found {
        Ok(())
    } else {
        Err(RealizeError::DimensionMismatch { expected, found })
    }
}

/// Builds a `k`-stage chain starting from `(R1, ε1)`. Stage `i + 1` comes
/// from [`refine`] with `R_floor = max(R_i + 1, i + 1)`.
pub fn build_chain<S: Scalar>(
    s: &ConeStructure,
    k: usize,
    r1: &S,
    eps1: &S,
) -> Result<RealizationChain<S>, RealizeError> {
    if k == 0 {
        return Err(RealizeError::EmptyChain);
    }
    let mut chain = RealizationChain::first_stage(s, r1, eps1)?;
    while chain.len() < k {
        chain.extend()?;
    }
    Ok(chain)
}

impl<S: Scalar> RealizationChain<S> {
    fn first_stage(s: &ConeStructure, r1: &S, eps1: &S) -> Result<Self, RealizeError> {
        let derived = s.derive();
        let phi = phi_matrix(&derived, r1, eps1)?;
        Ok(RealizationChain {
            structure: s.clone(),
            derived,
            stages: vec![Stage { big_r: r1.clone(), epsilon: eps1.clone(), phi }],
            connecting: vec![],
        })
    }

    /// Assembles a chain from stored parts without checking anything; run
    /// [`verify_chain`] before trusting it.
    pub fn from_parts(structure: ConeStructure, stages: Vec<Stage<S>>, connecting: Vec<Matrix<S>>) -> Self {
        let derived = structure.derive();
        RealizationChain { structure, derived, stages, connecting }
    }

    pub fn structure(&self) -> &ConeStructure {
        &self.structure
    }

    pub fn derived(&self) -> &DerivedIndexData {
        &self.derived
    }

    pub fn stages(&self) -> &[Stage<S>] {
        &self.stages
    }

    /// 1-based stage lookup.
    pub fn stage(&self, index: usize) -> Option<&Stage<S>> {
        index.checked_sub(1).and_then(|k| self.stages.get(k))
    }

    pub fn connecting(&self) -> &[Matrix<S>] {
        &self.connecting
    }

    pub fn connecting_mut(&mut self) -> &mut [Matrix<S>] {
        &mut self.connecting
    }

    pub fn stages_mut(&mut self) -> &mut [Stage<S>] {
        &mut self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Largest entry size in bits across all stage and connecting matrices.
    pub fn max_entry_bits(&self) -> u64 {
        self.stages
            .iter()
            .map(|s| &s.phi)
            .chain(&self.connecting)
            .flat_map(|m| m.entries())
            .map(|x| x.bits())
            .max()
            .unwrap_or(0)
    }

    /// `φ_i^{-1}(x)` for 1-based stage `index`.
    pub fn stage_coordinates(&self, index: usize, x: &Vector<S>) -> Result<Vector<S>, RealizeError> {
        check_len(self.structure.n(), x.len())?;
        let st = self.stage(index).expect("stage index in range");
        Ok(phi_inverse_apply(&self.derived, &st.big_r, &st.epsilon, x)?)
    }

    /// Smallest 1-based stage whose cone contains `x`, if any.
    pub fn containing_stage(&self, x: &Vector<S>) -> Result<Option<usize>, RealizeError> {
        for index in 1..=self.len() {
            if self.stage_coordinates(index, x)?.is_nonneg() {
                return Ok(Some(index));
            }
        }
        Ok(None)
    }

    /// Appends one stage exactly as [`build_chain`] would.
    pub fn extend(&mut self) -> Result<(), RealizeError> {
        self.extend_with(&[])
    }

    /// Appends one stage refined from the last one, also absorbing `extra`.
    fn extend_with(&mut self, extra: &[Vector<S>]) -> Result<(), RealizeError> {
        let k = self.len();
        let last = self.stages.last().ok_or(RealizeError::EmptyChain)?;
        let one = S::one();
        let by_r = last.big_r.clone() + one.clone();
        let by_index = S::from_i64(k as i64 + 1);
        let floor = if by_r > by_index { by_r } else { by_index };
        let (r2, eps2) = refine(&self.structure, &self.derived, &last.big_r, &last.epsilon, &floor, extra)?;
        let phi = phi_matrix(&self.derived, &r2, &eps2)?;
        let n = self.structure.n();
        let cols = (0..n)
            .map(|j| phi_inverse_apply(&self.derived, &r2, &eps2, &last.phi.column(j)))
            .collect::<Result<Vec<_>, _>>()?;
        let psi = Matrix::from_columns(&cols).expect("n columns of length n");
        self.stages.push(Stage { big_r: r2, epsilon: eps2, phi });
        self.connecting.push(psi);
        Ok(())
    }

    /// In-place form of [`absorb`].
    pub fn absorb_in_place(&mut self, x: &Vector<S>) -> Result<usize, RealizeError> {
        check_len(self.structure.n(), x.len())?;
        if self.structure.member_v(x).is_none() {
            return Err(RealizeError::NotInCone(format!("{x:?}")));
        }
        if let Some(index) = self.containing_stage(x)? {
            return Ok(index);
        }
        self.extend_with(std::slice::from_ref(x))?;
        Ok(self.len())
    }
}

/// Returns a chain (extended by at most one stage) one of whose stage cones
/// contains `x`, with the 1-based index of the smallest such stage.
pub fn absorb<S: Scalar>(
    chain: &RealizationChain<S>,
    x: &Vector<S>,
) -> Result<(RealizationChain<S>, usize), RealizeError> {
    let mut out = chain.clone();
    let index = out.absorb_in_place(x)?;
    Ok((out, index))
}

/// Finds `b` with `a1, a2 ≤ b ≤ c1, c2`.
///
/// The four differences `c_k − a_j` are absorbed into a common stage `i`;
/// in the coordinates `w = φ_i^{-1}` the orthant order is entrywise, so
/// `b = φ_i(max(w(a1), w(a2)))` works.
pub fn interpolate<S: Scalar>(
    chain: &RealizationChain<S>,
    a: [&Vector<S>; 2],
    c: [&Vector<S>; 2],
) -> Result<(Vector<S>, RealizationChain<S>), RealizeError> {
    let s = chain.structure();
    for v in a.iter().chain(c.iter()) {
        check_len(s.n(), v.len())?;
    }
    let mut diffs = Vec::with_capacity(4);
    for (k, ck) in c.iter().enumerate() {
        for (j, aj) in a.iter().enumerate() {
            let diff = ck.sub(aj);
            if s.member_v(&diff).is_none() {
                return Err(RealizeError::OrderViolation(format!("c{} - a{} = {diff:?}", k + 1, j + 1)));
            }
            diffs.push(diff);
        }
    }
    let mut out = chain.clone();
    let mut stage = 1;
    for diff in &diffs {
        stage = stage.max(out.absorb_in_place(diff)?);
    }
    let w1 = out.stage_coordinates(stage, a[0])?;
    let w2 = out.stage_coordinates(stage, a[1])?;
    let b = out.stage(stage).expect("stage exists").phi.mul_vec(&w1.max(&w2)).expect("dimension checked");
    Ok((b, out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChainClause {
    StructureMismatch,
    Dimension,
    ConnectingCount,
    ParametersPositive,
    ParameterMonotonicity,
    Invertible,
    PhiReconstruction,
    ColumnsInCone,
    ConnectingNonneg,
    ConnectingIdentity,
}

impl ChainClause {
    pub fn name(self) -> &'static str {
        match self {
            ChainClause::StructureMismatch => "structure-mismatch",
            ChainClause::Dimension => "dimension",
            ChainClause::ConnectingCount => "connecting-count",
            ChainClause::ParametersPositive => "parameters-positive",
            ChainClause::ParameterMonotonicity => "parameter-monotonicity",
            ChainClause::Invertible => "invertible",
            ChainClause::PhiReconstruction => "phi-reconstruction",
            ChainClause::ColumnsInCone => "columns-in-cone",
            ChainClause::ConnectingNonneg => "connecting-nonneg",
            ChainClause::ConnectingIdentity => "connecting-identity",
        }
    }
}

impl fmt::Display for ChainClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainFailure {
    /// 1-based stage (or connecting map) index; 0 for chain-wide failures.
    pub stage: usize,
    pub clause: ChainClause,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainReport {
    pub failures: Vec<ChainFailure>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn has(&self, stage: usize, clause: ChainClause) -> bool {
        self.failures.iter().any(|f| f.stage == stage && f.clause == clause)
    }

    fn fail(&mut self, stage: usize, clause: ChainClause, detail: impl Into<String>) {
        self.failures.push(ChainFailure { stage, clause, detail: detail.into() });
    }
}

impl fmt::Display for ChainReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return writeln!(f, "pass");
        }
        for x in &self.failures {
            writeln!(f, "stage {}: {} ({})", x.stage, x.clause, x.detail)?;
        }
        Ok(())
    }
}

/// Checks every stage and connecting map of `c` against `s`. Never fails;
/// problems are listed in the report.
pub fn verify_chain<S: Scalar>(s: &ConeStructure, c: &RealizationChain<S>) -> ChainReport {
    let mut report = ChainReport::default();
    if c.structure() != s {
        report.fail(0, ChainClause::StructureMismatch, "chain was built for a different structure");
        return report;
    }
    let n = s.n();
    let d = c.derived();
    if c.is_empty() {
        report.fail(0, ChainClause::Dimension, "chain has no stages");
        return report;
    }
    if c.connecting().len() + 1 != c.len() {
        report.fail(
            0,
            ChainClause::ConnectingCount,
            format!("{} stages but {} connecting maps", c.len(), c.connecting().len()),
        );
    }
    let dims_ok =
        c.stages().iter().map(|st| st.phi.dim()).chain(c.connecting().iter().map(|m| m.dim())).all(|k| k == n);
    if !dims_ok {
        report.fail(0, ChainClause::Dimension, format!("matrices must be {n}×{n}"));
        return report;
    }

    for (k, st) in c.stages().iter().enumerate() {
        let index = k + 1;
        if !st.big_r.is_positive() || !st.epsilon.is_positive() {
            report.fail(index, ChainClause::ParametersPositive, format!("R = {}, ε = {}", st.big_r, st.epsilon));
            continue;
        }
        if let Some(prev) = k.checked_sub(1).map(|p| &c.stages()[p]) {
            if st.big_r <= prev.big_r || st.epsilon >= prev.epsilon {
                report.fail(index, ChainClause::ParameterMonotonicity, "R must increase and ε decrease strictly");
            }
        }
        if st.phi.determinant().is_zero() {
            report.fail(index, ChainClause::Invertible, "det φ = 0");
        }
        let rebuilt = phi_matrix(d, &st.big_r, &st.epsilon).expect("parameters checked positive");
        if rebuilt != st.phi {
            report.fail(index, ChainClause::PhiReconstruction, "φ ≠ β^R α^ε");
        }
        for j in 0..n {
            let col = st.phi.column(j);
            if s.member_v(&col).is_none() {
                report.fail(index, ChainClause::ColumnsInCone, format!("column {} = {col:?}", j + 1));
            }
        }
    }

    for (k, psi) in c.connecting().iter().enumerate() {
        let index = k + 1;
        if !psi.is_entrywise_nonneg() {
            report.fail(index, ChainClause::ConnectingNonneg, format!("ψ_{index} has a negative entry"));
        }
        if let (Some(lo), Some(hi)) = (c.stages().get(k), c.stages().get(k + 1)) {
            if hi.phi.mul(psi).expect("dimension checked") != lo.phi {
                report.fail(index, ChainClause::ConnectingIdentity, format!("φ_{} ψ_{index} ≠ φ_{index}", index + 1));
            }
        }
    }
    report
}
