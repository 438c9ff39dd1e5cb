//! Problem instances, complementary bases, dictionaries, pivot-candidate
//! classification and matrix-class certificates.
//!
//! Index convention: variables are numbered `1..=2n`, where `i` and `i + n`
//! are complementary (`w_i` and `z_i`). The constraint matrix is
//! `A = [I  -M]`, so a complementary basis picks exactly one column of each
//! pair.

use crate::lpexact::{solve_lp, LPOutcome, LinearProgram, VarSign};
use crate::ratcore::{rat_int, RatMatrix, RatVector, Rational, Singular};
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Parametric LCP instance `w - Mz = q + Qθ` over `θ ∈ ℝ^d`.
#[derive(Clone, Debug)]
pub struct PLCP {
    n: usize,
    d: usize,
    m: RatMatrix,
    q: RatVector,
    qmat: RatMatrix,
    /// Cached `[I  -M]`, n×2n.
    a: RatMatrix,
}

/// Instance validation failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// `Q` must have full column rank equal to the parameter dimension.
    RankError { expected: usize, actual: usize },
    DimensionMismatch(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::RankError { expected, actual } => {
                write!(f, "parameter matrix must have rank {expected}, got {actual}")
            }
            ModelError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
        }
    }
}

impl std::error::Error for ModelError {}

impl PLCP {
    pub fn new(m: RatMatrix, q: RatVector, qmat: RatMatrix) -> Result<Self, ModelError> {
        let n = m.nrows();
        if n == 0 || m.ncols() != n {
            return Err(ModelError::DimensionMismatch(format!(
                "M must be square and nonempty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if q.len() != n {
            return Err(ModelError::DimensionMismatch(format!(
                "q has length {}, expected {n}",
                q.len()
            )));
        }
        if qmat.nrows() != n || qmat.ncols() == 0 {
            return Err(ModelError::DimensionMismatch(format!(
                "Q must be {n}xd with d >= 1, got {}x{}",
                qmat.nrows(),
                qmat.ncols()
            )));
        }
        let d = qmat.ncols();
        let rank = qmat.rank();
        if rank != d {
            return Err(ModelError::RankError { expected: d, actual: rank });
        }
        let a = RatMatrix::identity(n).hstack(&m.neg());
        Ok(PLCP { n, d, m, q, qmat, a })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn param_dim(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> &RatMatrix {
        &self.m
    }

    pub fn q(&self) -> &RatVector {
        &self.q
    }

    pub fn qmat(&self) -> &RatMatrix {
        &self.qmat
    }

    /// The full constraint matrix `[I  -M]`.
    pub fn a(&self) -> &RatMatrix {
        &self.a
    }

    /// Column `j` (1-based, `1..=2n`) of `[I  -M]`.
    pub fn a_col(&self, j: usize) -> RatVector {
        self.a.col_vec(j)
    }
}

/// Complement of column index `i` in `1..=2n`.
pub fn complement(i: usize, n: usize) -> usize {
    assert!(i >= 1 && i <= 2 * n, "index {i} out of range 1..={}", 2 * n);
    if i <= n {
        i + n
    } else {
        i - n
    }
}

/// A complementary index set of size n (sorted, 1-based).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Basis {
    indices: Vec<usize>,
}

/// Attempted to build a basis from a non-complementary index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotComplementary(pub Vec<usize>);

impl fmt::Display for NotComplementary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "index set {:?} is not complementary", self.0)
    }
}

impl std::error::Error for NotComplementary {}

impl Basis {
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self, NotComplementary> {
        indices.sort_unstable();
        indices.dedup();
        if indices.len() != n {
            return Err(NotComplementary(indices));
        }
        for i in 1..=n {
            let has_w = indices.binary_search(&i).is_ok();
            let has_z = indices.binary_search(&(i + n)).is_ok();
            if has_w == has_z {
                return Err(NotComplementary(indices));
            }
        }
        Ok(Basis { indices })
    }

    /// The all-slack basis `{1, …, n}`.
    pub fn slack(n: usize) -> Self {
        Basis { indices: (1..=n).collect() }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Position (1-based) of global index `i` within the sorted basis.
    pub fn position(&self, i: usize) -> Option<usize> {
        self.indices.binary_search(&i).ok().map(|p| p + 1)
    }

    /// Sorted complement `N = {1..2n} \ B`.
    pub fn nonbasic(&self) -> Vec<usize> {
        let n = self.indices.len();
        (1..=2 * n).filter(|i| !self.contains(*i)).collect()
    }

    /// Replace `i` by its complement.
    pub fn diagonal_pivot(&self, i: usize) -> Basis {
        let n = self.indices.len();
        debug_assert!(self.contains(i));
        let mut v: Vec<usize> =
            self.indices.iter().copied().filter(|&k| k != i).collect();
        v.push(complement(i, n));
        v.sort_unstable();
        Basis { indices: v }
    }

    /// Replace `i` and `j` by their complements.
    pub fn exchange_pivot(&self, i: usize, j: usize) -> Basis {
        let n = self.indices.len();
        debug_assert!(self.contains(i) && self.contains(j) && i != j);
        let mut v: Vec<usize> =
            self.indices.iter().copied().filter(|&k| k != i && k != j).collect();
        v.push(complement(i, n));
        v.push(complement(j, n));
        v.sort_unstable();
        Basis { indices: v }
    }
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Basis inverse and dictionary of a complementary basis.
///
/// Rows of `beta` and `dict` are ordered by the sorted basis indices, columns
/// of `dict` by the sorted nonbasic indices.
#[derive(Clone, Debug)]
pub struct DictionaryView {
    basis: Basis,
    nonbasic: Vec<usize>,
    beta: RatMatrix,
    dict: RatMatrix,
}

impl DictionaryView {
    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn beta(&self) -> &RatMatrix {
        &self.beta
    }

    pub fn dict(&self) -> &RatMatrix {
        &self.dict
    }

    /// Row of the basis inverse owned by global basic index `i`.
    pub fn beta_row(&self, i: usize) -> RatVector {
        let pos = self.basis.position(i).expect("index not in basis");
        self.beta.row_vec(pos)
    }

    /// Dictionary entry `D[i, k]` for basic `i` and nonbasic `k`.
    pub fn d_entry(&self, i: usize, k: usize) -> &Rational {
        let row = self.basis.position(i).expect("row index not in basis");
        let col = self
            .nonbasic
            .binary_search(&k)
            .map(|p| p + 1)
            .expect("column index not nonbasic");
        self.dict.at(row, col)
    }
}

/// Exact inverse and dictionary `D = -A_B⁻¹ A_N` of a complementary basis.
pub fn dictionary(p: &PLCP, basis: &Basis) -> Result<DictionaryView, Singular> {
    let a_b = p.a().select_columns(basis.indices());
    let beta = a_b.invert()?;
    let nonbasic = basis.nonbasic();
    let a_n = p.a().select_columns(&nonbasic);
    let dict = beta.matmul(&a_n).neg();
    Ok(DictionaryView { basis: basis.clone(), nonbasic, beta, dict })
}

/// How the facet of a cone at basic index `i` connects to other cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FacetClass {
    /// The unique adjacent cone is reached by swapping `i` for its complement.
    Diagonal(Basis),
    /// Candidate cones reached by swapping two pairs; each still needs a
    /// region adjacency check.
    Exchange(Vec<Basis>),
    /// The facet lies on the boundary of the union of complementary cones.
    Boundary,
}

/// A negative diagonal dictionary entry, impossible for matrices whose
/// principal pivot transforms stay sign-consistent (anything certified
/// sufficient). Surfaced instead of swallowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonSufficientSignal {
    pub basis: Basis,
    pub index: usize,
}

impl fmt::Display for NonSufficientSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "negative diagonal dictionary entry at basis {} index {}; matrix is not sufficient",
            self.basis, self.index
        )
    }
}

impl std::error::Error for NonSufficientSignal {}

/// Classifies the facet of `C(B)` at basic index `i` by dictionary signs.
///
/// Exchange candidates whose column swap would be singular are skipped; the
/// swap is singular exactly when the 2×2 dictionary minor on rows `{i, j}`
/// and columns `{ī, j̄}` vanishes.
pub fn classify_facet(
    p: &PLCP,
    dv: &DictionaryView,
    i: usize,
) -> Result<FacetClass, NonSufficientSignal> {
    let n = p.order();
    let ibar = complement(i, n);
    let dii = dv.d_entry(i, ibar);
    if dii.is_positive() {
        return Ok(FacetClass::Diagonal(dv.basis().diagonal_pivot(i)));
    }
    if dii.is_negative() {
        return Err(NonSufficientSignal { basis: dv.basis().clone(), index: i });
    }
    let mut candidates = Vec::new();
    for &j in dv.basis().indices() {
        if j == i {
            continue;
        }
        if dv.d_entry(j, ibar).is_negative() {
            let jbar = complement(j, n);
            // Minor = D[i,ī]·D[j,j̄] − D[i,j̄]·D[j,ī]; here D[i,ī] = 0.
            if !dv.d_entry(i, jbar).is_zero() {
                candidates.push(dv.basis().exchange_pivot(i, j));
            }
        }
    }
    if candidates.is_empty() {
        Ok(FacetClass::Boundary)
    } else {
        Ok(FacetClass::Exchange(candidates))
    }
}

/// A brute-force certificate cap was exceeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapExceeded {
    pub n: usize,
    pub cap: usize,
}

impl fmt::Display for CapExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "order {} exceeds the configured certificate cap {}", self.n, self.cap)
    }
}

impl std::error::Error for CapExceeded {}

/// All principal minors strictly positive, tested exhaustively.
pub fn is_p_matrix(m: &RatMatrix, cap: usize) -> Result<bool, CapExceeded> {
    assert_eq!(m.nrows(), m.ncols(), "is_p_matrix: matrix not square");
    let n = m.nrows();
    if n > cap {
        return Err(CapExceeded { n, cap });
    }
    for mask in 1u64..(1u64 << n) {
        let indices: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).map(|k| k + 1).collect();
        if !m.principal_submatrix(&indices).det().is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Positive semidefiniteness of the symmetric part, by exact symmetric
/// elimination with diagonal pivoting: no negative pivot may appear, and a
/// zero pivot forces its whole remaining row to vanish.
pub fn is_psd(m: &RatMatrix) -> bool {
    assert_eq!(m.nrows(), m.ncols(), "is_psd: matrix not square");
    let mut s = m.symmetric_part();
    let n = s.nrows();
    let mut active: Vec<usize> = (1..=n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| s.at(i, i).is_positive());
        match pivot {
            Some(pi) => {
                active.retain(|&i| i != pi);
                let piv = s.at(pi, pi).clone();
                for &r in &active {
                    if s.at(r, pi).is_zero() {
                        continue;
                    }
                    let factor = s.at(r, pi) / &piv;
                    for &c in &active {
                        let v = s.at(r, c) - &factor * s.at(pi, c);
                        s.set(r, c, v);
                    }
                }
            }
            None => {
                // Remaining diagonal is nonpositive.
                for &i in &active {
                    if s.at(i, i).is_negative() {
                        return false;
                    }
                }
                // All-zero diagonal: any off-diagonal residue is indefinite.
                for &i in &active {
                    for &j in &active {
                        if !s.at(i, j).is_zero() {
                            return false;
                        }
                    }
                }
                return true;
            }
        }
    }
    true
}

/// Positive definiteness: PSD symmetric part with full rank.
pub fn is_pd(m: &RatMatrix) -> bool {
    is_psd(m) && m.symmetric_part().rank() == m.nrows()
}

/// Outcome of a one-sided sufficiency search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SufficiencyCheck {
    Holds,
    /// A vector `z` with `z_i(Mz)_i ≤ 0` for all `i` and strict at some `i`.
    Fails(RatVector),
}

/// Exhaustive column-sufficiency test over the 3ⁿ sign patterns of `z`; the
/// conditions become linear once the orthant is fixed, and strictness is
/// decided by a max-slack LP clipped to the unit box.
pub fn is_column_sufficient_bruteforce(
    m: &RatMatrix,
    cap: usize,
) -> Result<SufficiencyCheck, CapExceeded> {
    assert_eq!(m.nrows(), m.ncols());
    let n = m.nrows();
    if n > cap {
        return Err(CapExceeded { n, cap });
    }
    let mut pattern = vec![0i8; n];
    let total = 3u64.pow(n as u32);
    for mask in 0..total {
        let mut rest = mask;
        for slot in pattern.iter_mut() {
            *slot = (rest % 3) as i8 - 1;
            rest /= 3;
        }
        // z and -z violate together; only patterns whose first nonzero is +.
        if pattern.iter().find(|&&s| s != 0).copied().unwrap_or(0) != 1 {
            continue;
        }
        for j in 0..n {
            if pattern[j] == 0 {
                continue;
            }
            if let Some(z) = orthant_violation(m, &pattern, j) {
                return Ok(SufficiencyCheck::Fails(z));
            }
        }
    }
    Ok(SufficiencyCheck::Holds)
}

/// Searches orthant `pattern` for `z` with `z_i (Mz)_i ≤ 0` everywhere and
/// strictly negative at `strict_j`. Returns the witness if one exists.
fn orthant_violation(m: &RatMatrix, pattern: &[i8], strict_j: usize) -> Option<RatVector> {
    let n = m.nrows();
    // Variables: v_k >= 0 for each k with pattern[k] != 0 (z_k = pattern[k]·v_k),
    // then t >= 0, then one slack per inequality row.
    let active: Vec<usize> = (0..n).filter(|&k| pattern[k] != 0).collect();
    let nv = active.len();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    let mut ineq = |coeffs: Vec<(usize, Rational)>, t_coeff: Rational, bound: Rational| {
        // Σ coeffs·v + t_coeff·t ≤ bound.
        let mut row = vec![Rational::zero(); nv + 1];
        for (var, c) in coeffs {
            row[var] += c;
        }
        row[nv] = t_coeff;
        rows.push(row);
        rhs.push(bound);
    };
    // sign constraints on (Mz)_i: pattern[i]=+1 → (Mz)_i ≤ 0; -1 → -(Mz)_i ≤ 0.
    for i in 0..n {
        if pattern[i] == 0 {
            continue;
        }
        let si = rat_int(pattern[i] as i64);
        let mut coeffs = Vec::new();
        for (vk, &k) in active.iter().enumerate() {
            let sk = rat_int(pattern[k] as i64);
            coeffs.push((vk, &si * m.at(i + 1, k + 1) * &sk));
        }
        let t_coeff = if i == strict_j { Rational::one() } else { Rational::zero() };
        ineq(coeffs, t_coeff, Rational::zero());
    }
    // strictness of z_j itself: v_j ≥ t.
    let vj = active.iter().position(|&k| k == strict_j).expect("strict index inactive");
    ineq(vec![(vj, rat_int(-1))], Rational::one(), Rational::zero());
    // unit box keeps the cone search bounded: v_k ≤ 1.
    for vk in 0..nv {
        ineq(vec![(vk, Rational::one())], Rational::zero(), Rational::one());
    }
    // Equality form with slack per row; maximize t.
    let nrows = rows.len();
    let total = nv + 1 + nrows;
    let mut a = RatMatrix::zeros(nrows, total);
    let mut b = RatVector::zeros(nrows);
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            a.set(r + 1, c + 1, v.clone());
        }
        a.set(r + 1, nv + 1 + r + 1, Rational::one());
        b.set(r + 1, rhs[r].clone());
    }
    let mut obj = RatVector::zeros(total);
    obj.set(nv + 1, rat_int(-1));
    let lp = LinearProgram::new(obj, a, b, vec![VarSign::NonNegative; total]);
    match solve_lp(&lp) {
        LPOutcome::Optimal { value, point } => {
            if (-value).is_positive() {
                let mut z = RatVector::zeros(n);
                for (vk, &k) in active.iter().enumerate() {
                    z.set(k + 1, rat_int(pattern[k] as i64) * point.at(vk + 1));
                }
                Some(z)
            } else {
                None
            }
        }
        LPOutcome::Unbounded => unreachable!("box-clipped slack LP is bounded"),
        LPOutcome::Infeasible => None,
    }
}

/// Row sufficiency is column sufficiency of the transpose; the witness, if
/// any, violates the transposed implication.
pub fn is_row_sufficient_bruteforce(
    m: &RatMatrix,
    cap: usize,
) -> Result<SufficiencyCheck, CapExceeded> {
    is_column_sufficient_bruteforce(&m.transpose(), cap)
}

/// Which side of sufficiency a witness violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SufficiencySide {
    Column,
    Row,
}

/// Concrete refutation of sufficiency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonSufficiencyWitness {
    pub side: SufficiencySide,
    pub z: RatVector,
}

/// Verdict of [`certify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SufficiencyCertificate {
    Psd,
    PMatrix,
    BruteForceSufficient,
    NotSufficient(NonSufficiencyWitness),
    Unknown,
}

impl SufficiencyCertificate {
    /// Whether the certificate establishes sufficiency.
    pub fn is_sufficient(&self) -> bool {
        matches!(
            self,
            SufficiencyCertificate::Psd
                | SufficiencyCertificate::PMatrix
                | SufficiencyCertificate::BruteForceSufficient
        )
    }
}

/// Configuration caps for the exhaustive certificate searches.
#[derive(Clone, Copy, Debug)]
pub struct CertCaps {
    pub p_matrix_cap: usize,
    pub bruteforce_cap: usize,
}

impl Default for CertCaps {
    fn default() -> Self {
        CertCaps { p_matrix_cap: 12, bruteforce_cap: 10 }
    }
}

/// Sufficiency certification: PSD test first, then the principal-minor
/// test, then the exhaustive search, each under its cap; `Unknown` when all
/// capped paths are exhausted without a verdict.
pub fn certify(m: &RatMatrix, caps: &CertCaps) -> SufficiencyCertificate {
    if is_psd(m) {
        return SufficiencyCertificate::Psd;
    }
    if let Ok(true) = is_p_matrix(m, caps.p_matrix_cap) {
        return SufficiencyCertificate::PMatrix;
    }
    let col = is_column_sufficient_bruteforce(m, caps.bruteforce_cap);
    match col {
        Ok(SufficiencyCheck::Fails(z)) => {
            return SufficiencyCertificate::NotSufficient(NonSufficiencyWitness {
                side: SufficiencySide::Column,
                z,
            })
        }
        Ok(SufficiencyCheck::Holds) => {}
        Err(_) => return SufficiencyCertificate::Unknown,
    }
    match is_row_sufficient_bruteforce(m, caps.bruteforce_cap) {
        Ok(SufficiencyCheck::Holds) => SufficiencyCertificate::BruteForceSufficient,
        Ok(SufficiencyCheck::Fails(z)) => {
            SufficiencyCertificate::NotSufficient(NonSufficiencyWitness {
                side: SufficiencySide::Row,
                z,
            })
        }
        Err(_) => SufficiencyCertificate::Unknown,
    }
}
