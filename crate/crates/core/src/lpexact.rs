//! Exact two-phase simplex and staged multi-objective resolution.
//!
//! LPs are minimizations over equality constraints with per-variable sign
//! restrictions; callers introduce slacks for inequalities. Pivoting uses
//! Bland's least-index rule, so termination holds on degenerate inputs
//! without any numeric perturbation inside the solver.

use crate::ratcore::{RatMatrix, RatVector, Rational};
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Sign restriction of a single LP variable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VarSign {
    NonNegative,
    Free,
}

/// `min objective·x  s.t.  a_eq·x = rhs`, with `signs[j]` restricting `x_j`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: RatVector,
    pub a_eq: RatMatrix,
    pub rhs: RatVector,
    pub signs: Vec<VarSign>,
}

impl LinearProgram {
    pub fn new(objective: RatVector, a_eq: RatMatrix, rhs: RatVector, signs: Vec<VarSign>) -> Self {
        assert_eq!(a_eq.ncols(), objective.len(), "objective length mismatch");
        assert_eq!(a_eq.nrows(), rhs.len(), "rhs length mismatch");
        assert_eq!(signs.len(), objective.len(), "signs length mismatch");
        LinearProgram { objective, a_eq, rhs, signs }
    }
}

/// Result of an exact LP solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LPOutcome {
    Optimal { value: Rational, point: RatVector },
    Infeasible,
    Unbounded,
}

impl LPOutcome {
    pub fn optimal_value(&self) -> Option<&Rational> {
        match self {
            LPOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn optimizer(&self) -> Option<&RatVector> {
        match self {
            LPOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

/// Stack of objectives minimized lexicographically over one feasible region.
#[derive(Clone, Debug)]
pub struct LexObjectiveStack {
    /// Stage objectives `c_0, c_1, …`; stage r is minimized subject to all
    /// earlier stages being pinned at zero.
    pub objectives: Vec<RatVector>,
    pub a_eq: RatMatrix,
    pub rhs: RatVector,
    pub signs: Vec<VarSign>,
}

/// Sign class of a lexicographic optimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LexVerdict {
    LexPositive,
    LexNegative,
    LexZero,
}

/// Outcome of a staged lexicographic minimization.
///
/// `stage`/`value` identify the first nonzero stage when the verdict was
/// reached by a finite stage optimum. An unbounded stage reports
/// `LexNegative` with the stage index and no finite value (the perturbed
/// objective decreases without bound for small perturbations). Synthetic
/// verdicts produced by callers of this module may carry neither field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexSign {
    pub verdict: LexVerdict,
    pub stage: Option<usize>,
    pub value: Option<Rational>,
}

impl LexSign {
    pub fn is_lex_positive(&self) -> bool {
        self.verdict == LexVerdict::LexPositive
    }
}

/// The shared feasible region of a lexicographic stack is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InfeasibleRegion;

impl fmt::Display for InfeasibleRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("feasible region of lexicographic stack is empty")
    }
}

impl std::error::Error for InfeasibleRegion {}

/// Solves the stack stage by stage: stage r minimizes `c_r` subject to the
/// region and `c_k·y = 0` for all k < r, stopping at the first nonzero stage
/// optimum. Also returns the number of stage LPs solved.
pub fn first_nonzero_objective(
    stack: &LexObjectiveStack,
) -> Result<(LexSign, usize), InfeasibleRegion> {
    let mut a = stack.a_eq.clone();
    let mut rhs = stack.rhs.clone();
    let mut solved = 0usize;
    for (r, c) in stack.objectives.iter().enumerate() {
        let lp = LinearProgram::new(c.clone(), a.clone(), rhs.clone(), stack.signs.clone());
        solved += 1;
        match solve_lp(&lp) {
            LPOutcome::Infeasible => {
                debug_assert_eq!(r, 0, "region became infeasible after a zero stage");
                return Err(InfeasibleRegion);
            }
            LPOutcome::Unbounded => {
                return Ok((
                    LexSign { verdict: LexVerdict::LexNegative, stage: Some(r), value: None },
                    solved,
                ));
            }
            LPOutcome::Optimal { value, .. } => {
                if value.is_positive() {
                    return Ok((
                        LexSign {
                            verdict: LexVerdict::LexPositive,
                            stage: Some(r),
                            value: Some(value),
                        },
                        solved,
                    ));
                }
                if value.is_negative() {
                    return Ok((
                        LexSign {
                            verdict: LexVerdict::LexNegative,
                            stage: Some(r),
                            value: Some(value),
                        },
                        solved,
                    ));
                }
                a = append_row(&a, c);
                rhs = rhs.concat(&RatVector::zeros(1));
            }
        }
    }
    Ok((LexSign { verdict: LexVerdict::LexZero, stage: None, value: None }, solved))
}

fn append_row(a: &RatMatrix, row: &RatVector) -> RatMatrix {
    let mut rows: Vec<Vec<Rational>> =
        (1..=a.nrows()).map(|i| a.row_vec(i).as_slice().to_vec()).collect();
    rows.push(row.as_slice().to_vec());
    RatMatrix::from_rows(rows)
}

/// Exact two-phase simplex with Bland's rule.
pub fn solve_lp(lp: &LinearProgram) -> LPOutcome {
    Standardized::build(lp).solve()
}

/// Standard-form expansion: free variables split into differences of
/// nonnegative pairs, rows normalized to nonnegative right-hand sides.
struct Standardized {
    /// For each standard column: (original variable 0-based, negated).
    cols: Vec<(usize, bool)>,
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    cost: Vec<Rational>,
    nvars: usize,
}

enum PricingResult {
    Optimal,
    Unbounded,
}

impl Standardized {
    fn build(lp: &LinearProgram) -> Self {
        let me = lp.a_eq.nrows();
        let nv = lp.a_eq.ncols();
        let mut cols = Vec::new();
        for (j, s) in lp.signs.iter().enumerate() {
            cols.push((j, false));
            if *s == VarSign::Free {
                cols.push((j, true));
            }
        }
        let mut a = vec![vec![Rational::zero(); cols.len()]; me];
        let mut cost = vec![Rational::zero(); cols.len()];
        for (cidx, &(j, negated)) in cols.iter().enumerate() {
            let col = lp.a_eq.col_vec(j + 1);
            for i in 0..me {
                a[i][cidx] =
                    if negated { -col.at(i + 1).clone() } else { col.at(i + 1).clone() };
            }
            let c = lp.objective.at(j + 1).clone();
            cost[cidx] = if negated { -c } else { c };
        }
        let mut b: Vec<Rational> = (1..=me).map(|i| lp.rhs.at(i).clone()).collect();
        for i in 0..me {
            if b[i].is_negative() {
                b[i] = -b[i].clone();
                for e in a[i].iter_mut() {
                    *e = -e.clone();
                }
            }
        }
        Standardized { cols, a, b, cost, nvars: nv }
    }

    fn solve(self) -> LPOutcome {
        let m = self.a.len();
        let n = self.cols.len();
        // Tableau columns: structural columns, artificials, rhs.
        let total = n + m;
        let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
        for i in 0..m {
            let mut row = Vec::with_capacity(total + 1);
            row.extend(self.a[i].iter().cloned());
            for k in 0..m {
                row.push(if k == i { Rational::one() } else { Rational::zero() });
            }
            row.push(self.b[i].clone());
            t.push(row);
        }
        let mut basis: Vec<usize> = (n..n + m).collect();

        // Phase 1: minimize the artificial total.
        let mut phase1_cost = vec![Rational::zero(); total];
        for e in phase1_cost.iter_mut().skip(n) {
            *e = Rational::one();
        }
        let banned_phase1 = vec![false; total];
        match run_simplex(&mut t, &mut basis, &phase1_cost, &banned_phase1, total) {
            PricingResult::Unbounded => unreachable!("phase 1 objective is bounded below by zero"),
            PricingResult::Optimal => {}
        }
        let phase1_value: Rational = basis
            .iter()
            .enumerate()
            .map(|(row, &col)| phase1_cost[col].clone() * t[row][total].clone())
            .fold(Rational::zero(), |acc, x| acc + x);
        if phase1_value.is_positive() {
            return LPOutcome::Infeasible;
        }

        // Drive leftover artificials out of the basis; drop redundant rows.
        let mut row = 0;
        while row < t.len() {
            if basis[row] >= n {
                let pivot_col = (0..n).find(|&j| !t[row][j].is_zero());
                match pivot_col {
                    Some(j) => {
                        pivot(&mut t, row, j, total);
                        basis[row] = j;
                        row += 1;
                    }
                    None => {
                        t.remove(row);
                        basis.remove(row);
                    }
                }
            } else {
                row += 1;
            }
        }

        // Phase 2 on the original cost; artificial columns never re-enter.
        let mut phase2_cost = vec![Rational::zero(); total];
        phase2_cost[..n].clone_from_slice(&self.cost);
        let mut banned = vec![false; total];
        for e in banned.iter_mut().skip(n) {
            *e = true;
        }
        match run_simplex(&mut t, &mut basis, &phase2_cost, &banned, total) {
            PricingResult::Unbounded => LPOutcome::Unbounded,
            PricingResult::Optimal => {
                let mut std_x = vec![Rational::zero(); n];
                for (row, &col) in basis.iter().enumerate() {
                    if col < n {
                        std_x[col] = t[row][total].clone();
                    }
                }
                let mut x = RatVector::zeros(self.nvars);
                for (cidx, &(j, negated)) in self.cols.iter().enumerate() {
                    let cur = x.at(j + 1).clone();
                    let v = if negated { cur - &std_x[cidx] } else { cur + &std_x[cidx] };
                    x.set(j + 1, v);
                }
                let mut value = Rational::zero();
                for (cidx, &(j, _)) in self.cols.iter().enumerate() {
                    let _ = j;
                    value += self.cost[cidx].clone() * std_x[cidx].clone();
                }
                LPOutcome::Optimal { value, point: x }
            }
        }
    }
}

/// Bland's rule: entering column is the least-index column with negative
/// reduced cost, the leaving row breaks ratio ties by least basic index.
fn run_simplex(
    t: &mut Vec<Vec<Rational>>,
    basis: &mut Vec<usize>,
    cost: &[Rational],
    banned: &[bool],
    rhs_col: usize,
) -> PricingResult {
    loop {
        let basic_cost: Vec<Rational> = basis.iter().map(|&c| cost[c].clone()).collect();
        let mut entering = None;
        for j in 0..rhs_col {
            if banned[j] || basis.contains(&j) {
                continue;
            }
            let mut reduced = cost[j].clone();
            for (row, bc) in basic_cost.iter().enumerate() {
                if !bc.is_zero() && !t[row][j].is_zero() {
                    reduced -= bc * &t[row][j];
                }
            }
            if reduced.is_negative() {
                entering = Some(j);
                break;
            }
        }
        let entering = match entering {
            Some(j) => j,
            None => return PricingResult::Optimal,
        };
        let mut leaving: Option<(usize, Rational)> = None;
        for row in 0..t.len() {
            if t[row][entering].is_positive() {
                let ratio = t[row][rhs_col].clone() / t[row][entering].clone();
                let better = match &leaving {
                    None => true,
                    Some((lrow, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && basis[row] < basis[*lrow])
                    }
                };
                if better {
                    leaving = Some((row, ratio));
                }
            }
        }
        let (leave_row, _) = match leaving {
            Some(l) => l,
            None => return PricingResult::Unbounded,
        };
        pivot(t, leave_row, entering, rhs_col);
        basis[leave_row] = entering;
    }
}

fn pivot(t: &mut [Vec<Rational>], row: usize, col: usize, rhs_col: usize) {
    let p = t[row][col].clone();
    debug_assert!(!p.is_zero());
    for j in 0..=rhs_col {
        t[row][j] = t[row][j].clone() / p.clone();
    }
    for r in 0..t.len() {
        if r != row && !t[r][col].is_zero() {
            let factor = t[r][col].clone();
            for j in 0..=rhs_col {
                let delta = factor.clone() * t[row][j].clone();
                t[r][j] = t[r][j].clone() - delta;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::{rat, rat_int};
    use proptest::prelude::*;

    fn lp(
        c: &[i64],
        a: &[&[i64]],
        b: &[i64],
        signs: &[VarSign],
    ) -> LinearProgram {
        let nv = c.len();
        let a_eq = if a.is_empty() {
            RatMatrix::zeros(0, nv)
        } else {
            RatMatrix::from_i64_rows(a)
        };
        LinearProgram::new(
            RatVector::from_i64(c),
            a_eq,
            RatVector::from_i64(b),
            signs.to_vec(),
        )
    }

    #[test]
    fn minimize_single_nonnegative_var() {
        let out = solve_lp(&lp(&[1], &[], &[], &[VarSign::NonNegative]));
        assert_eq!(
            out,
            LPOutcome::Optimal { value: rat_int(0), point: RatVector::from_i64(&[0]) }
        );
    }

    #[test]
    fn unbounded_direction_detected() {
        let out = solve_lp(&lp(&[-1], &[], &[], &[VarSign::NonNegative]));
        assert_eq!(out, LPOutcome::Unbounded);
    }

    #[test]
    fn inconsistent_equalities_are_infeasible() {
        // x1 + x2 = 1, x1 - x2 = 3 forces x2 = -1 < 0.
        let out = solve_lp(&lp(
            &[0, 0],
            &[&[1, 1], &[1, -1]],
            &[1, 3],
            &[VarSign::NonNegative, VarSign::NonNegative],
        ));
        assert_eq!(out, LPOutcome::Infeasible);
    }

    #[test]
    fn free_variables_take_negative_values() {
        // min x s.t. x + s = -3, s >= 0, x free: optimum unbounded below.
        let out = solve_lp(&lp(
            &[1, 0],
            &[&[1, 1]],
            &[-3],
            &[VarSign::Free, VarSign::NonNegative],
        ));
        assert_eq!(out, LPOutcome::Unbounded);
        // max x (min -x) of the same region: x = -3.
        let out = solve_lp(&lp(
            &[-1, 0],
            &[&[1, 1]],
            &[-3],
            &[VarSign::Free, VarSign::NonNegative],
        ));
        match out {
            LPOutcome::Optimal { value, point } => {
                assert_eq!(value, rat_int(3));
                assert_eq!(point.at(1), &rat_int(-3));
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_lp_terminates() {
        // Multiple redundant rows pinning the same vertex.
        let out = solve_lp(&lp(
            &[1, 1, 0, 0],
            &[&[1, 1, 1, 0], &[1, 1, 0, 1], &[2, 2, 1, 1]],
            &[1, 1, 2],
            &[VarSign::NonNegative; 4],
        ));
        match out {
            LPOutcome::Optimal { value, .. } => assert_eq!(value, rat_int(0)),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn stack_stage_zero_decides() {
        let stack = LexObjectiveStack {
            objectives: vec![RatVector::from_i64(&[1])],
            a_eq: RatMatrix::from_i64_rows(&[&[1]]),
            rhs: RatVector::from_i64(&[2]),
            signs: vec![VarSign::Free],
        };
        let (sign, solved) = first_nonzero_objective(&stack).unwrap();
        assert_eq!(sign.verdict, LexVerdict::LexPositive);
        assert_eq!(sign.stage, Some(0));
        assert_eq!(sign.value, Some(rat_int(2)));
        assert_eq!(solved, 1);
    }

    #[test]
    fn stack_second_stage_decides() {
        // c0 = (0,0) stays zero; c1 = (1,-1) over {y1+y2=1, y>=0} has min -1.
        let stack = LexObjectiveStack {
            objectives: vec![RatVector::from_i64(&[0, 0]), RatVector::from_i64(&[1, -1])],
            a_eq: RatMatrix::from_i64_rows(&[&[1, 1]]),
            rhs: RatVector::from_i64(&[1]),
            signs: vec![VarSign::NonNegative, VarSign::NonNegative],
        };
        let (sign, solved) = first_nonzero_objective(&stack).unwrap();
        assert_eq!(sign.verdict, LexVerdict::LexNegative);
        assert_eq!(sign.stage, Some(1));
        assert_eq!(sign.value, Some(rat_int(-1)));
        assert_eq!(solved, 2);
    }

    #[test]
    fn stack_all_zero_is_lex_zero() {
        let stack = LexObjectiveStack {
            objectives: vec![RatVector::from_i64(&[0, 0]), RatVector::from_i64(&[1, -1])],
            a_eq: RatMatrix::from_i64_rows(&[&[1, 1], &[1, -1]]),
            rhs: RatVector::from_i64(&[1, 0]),
            signs: vec![VarSign::NonNegative, VarSign::NonNegative],
        };
        // Region is the single point (1/2, 1/2): both objectives evaluate to 0.
        let (sign, solved) = first_nonzero_objective(&stack).unwrap();
        assert_eq!(sign.verdict, LexVerdict::LexZero);
        assert_eq!(solved, 2);
    }

    #[test]
    fn stack_infeasible_region_reported() {
        let stack = LexObjectiveStack {
            objectives: vec![RatVector::from_i64(&[1])],
            a_eq: RatMatrix::from_i64_rows(&[&[0]]),
            rhs: RatVector::from_i64(&[1]),
            signs: vec![VarSign::NonNegative],
        };
        assert_eq!(first_nonzero_objective(&stack), Err(InfeasibleRegion));
    }

    #[test]
    fn verdict_invariant_under_objective_scaling() {
        let region_a = RatMatrix::from_i64_rows(&[&[1, 1]]);
        let region_b = RatVector::from_i64(&[1]);
        let signs = vec![VarSign::NonNegative, VarSign::NonNegative];
        let base = LexObjectiveStack {
            objectives: vec![RatVector::from_i64(&[0, 0]), RatVector::from_i64(&[1, -1])],
            a_eq: region_a.clone(),
            rhs: region_b.clone(),
            signs: signs.clone(),
        };
        let scaled = LexObjectiveStack {
            objectives: vec![
                RatVector::from_i64(&[0, 0]),
                RatVector::from_vec(vec![rat(7, 3), rat(-7, 3)]),
            ],
            a_eq: region_a,
            rhs: region_b,
            signs,
        };
        let (s1, _) = first_nonzero_objective(&base).unwrap();
        let (s2, _) = first_nonzero_objective(&scaled).unwrap();
        assert_eq!(s1.verdict, s2.verdict);
        assert_eq!(s1.stage, s2.stage);
    }

    /// Dual of `min c·x s.t. Ax = b, x >= 0` is `max b·y s.t. Aᵀy <= c`.
    fn dual_of(a: &RatMatrix, b: &RatVector, c: &RatVector) -> LinearProgram {
        let m = a.nrows();
        let n = a.ncols();
        // Variables: y (m, free), s (n, slack >= 0); rows: Aᵀy + s = c.
        let mut rows = Vec::new();
        for j in 1..=n {
            let mut row = Vec::new();
            for i in 1..=m {
                row.push(a.at(i, j).clone());
            }
            for k in 1..=n {
                row.push(if k == j { Rational::one() } else { Rational::zero() });
            }
            rows.push(row);
        }
        let mut obj = Vec::new();
        for i in 1..=m {
            obj.push(-b.at(i).clone());
        }
        obj.extend(std::iter::repeat(Rational::zero()).take(n));
        let mut signs = vec![VarSign::Free; m];
        signs.extend(std::iter::repeat(VarSign::NonNegative).take(n));
        LinearProgram::new(
            RatVector::from_vec(obj),
            RatMatrix::from_rows(rows),
            c.clone(),
            signs,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn strong_duality_on_random_instances(
            av in proptest::collection::vec(-3i64..=3, 6),
            bv in proptest::collection::vec(-3i64..=3, 2),
            cv in proptest::collection::vec(-3i64..=3, 3),
        ) {
            let a = RatMatrix::from_rows(
                av.chunks(3).map(|r| r.iter().map(|&e| rat_int(e)).collect()).collect(),
            );
            let b = RatVector::from_i64(&bv);
            let c = RatVector::from_i64(&cv);
            let primal = LinearProgram::new(
                c.clone(),
                a.clone(),
                b.clone(),
                vec![VarSign::NonNegative; 3],
            );
            if let LPOutcome::Optimal { value, .. } = solve_lp(&primal) {
                let dual = dual_of(&a, &b, &c);
                match solve_lp(&dual) {
                    // Dual objective was negated to fit minimization.
                    LPOutcome::Optimal { value: dv, .. } => prop_assert_eq!(value, -dv),
                    other => prop_assert!(false, "dual not optimal: {:?}", other),
                }
            }
        }
    }
}
