//! Perturbed-space decision problems. The right-hand side is shifted by the
//! symbolic vector (ε, ε², …, εⁿ); a decision "positive for all sufficiently
//! small ε > 0" becomes the lexicographic sign of a stacked objective, and
//! each stack is resolved as a finite sequence of exact LPs over the dual of
//! the corresponding max-slack problem. The numeric ε is never materialized
//! on this path.

use crate::lpexact::{
    first_nonzero_objective, LexObjectiveStack, LexSign, LexVerdict, VarSign,
};
use crate::plcpmodel::{complement, Basis, DictionaryView, PLCP};
use crate::ratcore::{RatMatrix, RatVector, Rational};
use num_traits::One;
use std::fmt;

/// The symbolic shift (ε, ε², …, εⁿ), represented only through the objective
/// stack it induces: the ε⁰ coefficient of `(β(q+𝛆))ᵀy` is `βq`, and the εᵏ
/// coefficient is the k-th column of β.
#[derive(Clone, Copy, Debug)]
pub struct PerturbationSpec {
    n: usize,
}

impl PerturbationSpec {
    pub fn new(n: usize) -> Self {
        PerturbationSpec { n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Stage objectives for dual variables weighted by rows of `beta`.
    pub fn objective_stack(&self, beta: &RatMatrix, q: &RatVector) -> Vec<RatVector> {
        let mut stack = Vec::with_capacity(self.n + 1);
        stack.push(beta.mul_vec(q));
        for k in 1..=self.n {
            stack.push(beta.col_vec(k));
        }
        stack
    }
}

/// Dual feasible region of the perturbed facet problem at basic index `i`:
/// variables `y` indexed by the basis, `(βQ)ᵀy = 0`, `Σ_{j≠i} y_j = 1`,
/// `y_j ≥ 0` away from `i`, `y_i` free.
#[derive(Clone, Debug)]
pub struct DualRegionF {
    pub a_eq: RatMatrix,
    pub rhs: RatVector,
    pub signs: Vec<VarSign>,
}

/// Builds `F(i)`; with `free_index = None` every variable is nonnegative and
/// the normalization sums over the whole basis (the whole-region
/// full-dimensionality dual).
fn dual_region(p: &PLCP, dv: &DictionaryView, free_index: Option<usize>) -> DualRegionF {
    let n = p.order();
    let d = p.param_dim();
    let bq = dv.beta().matmul(p.qmat()); // n×d, rows by basis position
    let mut a = RatMatrix::zeros(d + 1, n);
    let mut rhs = RatVector::zeros(d + 1);
    for k in 1..=d {
        for pos in 1..=n {
            a.set(k, pos, bq.at(pos, k).clone());
        }
    }
    let free_pos = free_index.map(|i| dv.basis().position(i).expect("index not in basis"));
    for pos in 1..=n {
        if Some(pos) != free_pos {
            a.set(d + 1, pos, Rational::one());
        }
    }
    rhs.set(d + 1, Rational::one());
    let mut signs = vec![VarSign::NonNegative; n];
    if let Some(pos) = free_pos {
        signs[pos - 1] = VarSign::Free;
    }
    DualRegionF { a_eq: a, rhs, signs }
}

/// A staged verdict together with how many stage LPs it cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexDecision {
    pub sign: LexSign,
    pub stage_lps: usize,
}

impl LexDecision {
    fn synthetic(verdict: LexVerdict) -> Self {
        LexDecision { sign: LexSign { verdict, stage: None, value: None }, stage_lps: 0 }
    }
}

/// An adjacency stack resolved to exact zero, which contradicts the full
/// rank of the basis inverses feeding its objectives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyLexZero {
    pub basis: Basis,
    pub other: Basis,
}

impl fmt::Display for AdjacencyLexZero {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "adjacency stack for {} / {} resolved to lexicographic zero",
            self.basis, self.other
        )
    }
}

impl std::error::Error for AdjacencyLexZero {}

fn beta_row_times_qmat(p: &PLCP, dv: &DictionaryView, i: usize) -> RatVector {
    let row = dv.beta_row(i);
    let d = p.param_dim();
    let mut out = RatVector::zeros(d);
    for k in 1..=d {
        out.set(k, row.dot(&p.qmat().col_vec(k)));
    }
    out
}

/// Facet decision in the perturbed space: `LexPositive` exactly when the
/// inequality of basic index `i` supports a facet of the perturbed region
/// for all sufficiently small ε > 0.
///
/// Two degenerate routes are resolved without staging: a zero `β_i Q` row
/// means the inequality is constant over the parameter subspace (strictly
/// positive once perturbed, hence redundant), and an infeasible dual region
/// means the primal max-slack problem is unbounded (facet present).
pub fn redundancy_lexlp(p: &PLCP, dv: &DictionaryView, i: usize) -> LexDecision {
    if beta_row_times_qmat(p, dv, i).is_zero() {
        return LexDecision::synthetic(LexVerdict::LexNegative);
    }
    let region = dual_region(p, dv, Some(i));
    let stack = LexObjectiveStack {
        objectives: PerturbationSpec::new(p.order()).objective_stack(dv.beta(), p.q()),
        a_eq: region.a_eq,
        rhs: region.rhs,
        signs: region.signs,
    };
    match first_nonzero_objective(&stack) {
        Ok((sign, stage_lps)) => {
            if sign.verdict == LexVerdict::LexZero {
                log::warn!(
                    "facet stack for basis {} index {i} resolved to lexicographic zero",
                    dv.basis()
                );
            }
            LexDecision { sign, stage_lps }
        }
        Err(_) => LexDecision {
            sign: LexSign { verdict: LexVerdict::LexPositive, stage: None, value: None },
            stage_lps: 1,
        },
    }
}

/// Adjacency decision in the perturbed space for the exchange pair
/// `B'' = B \ {i,j} ∪ {ī,j̄}`: `LexPositive` exactly when the two perturbed
/// regions intersect with dimension d-1 for all sufficiently small ε > 0.
///
/// The shared hyperplane is pinned through the `B`-side row `i`; the
/// equivalent `B''`-side equality and its free dual variable are dropped.
pub fn adjacency_lexlp(
    p: &PLCP,
    dv_b: &DictionaryView,
    dv_b2: &DictionaryView,
    i: usize,
    j: usize,
) -> Result<LexDecision, AdjacencyLexZero> {
    let n = p.order();
    let d = p.param_dim();
    let jbar = complement(j, n);
    if beta_row_times_qmat(p, dv_b, i).is_zero() {
        // The pinned hyperplane misses the perturbed subspace entirely.
        return Ok(LexDecision::synthetic(LexVerdict::LexNegative));
    }

    let pos_i = dv_b.basis().position(i).expect("i not in B");
    let pos_jbar = dv_b2.basis().position(jbar).expect("j̄ not in B''");
    let x_positions: Vec<usize> = (1..=n).filter(|&pos| pos != pos_jbar).collect();
    let nv = n + x_positions.len();

    let bq = dv_b.beta().matmul(p.qmat());
    let bq2 = dv_b2.beta().matmul(p.qmat());
    let mut a = RatMatrix::zeros(d + 1, nv);
    let mut rhs = RatVector::zeros(d + 1);
    for k in 1..=d {
        for pos in 1..=n {
            a.set(k, pos, bq.at(pos, k).clone());
        }
        for (col, &pos) in x_positions.iter().enumerate() {
            a.set(k, n + col + 1, bq2.at(pos, k).clone());
        }
    }
    for pos in 1..=n {
        if pos != pos_i {
            a.set(d + 1, pos, Rational::one());
        }
    }
    for col in 0..x_positions.len() {
        a.set(d + 1, n + col + 1, Rational::one());
    }
    rhs.set(d + 1, Rational::one());
    let mut signs = vec![VarSign::NonNegative; nv];
    signs[pos_i - 1] = VarSign::Free;

    let pert = PerturbationSpec::new(n);
    let stack_b = pert.objective_stack(dv_b.beta(), p.q());
    let stack_b2 = pert.objective_stack(dv_b2.beta(), p.q());
    let objectives: Vec<RatVector> = stack_b
        .into_iter()
        .zip(stack_b2)
        .map(|(cy, cx)| {
            let mut c = RatVector::zeros(nv);
            for pos in 1..=n {
                c.set(pos, cy.at(pos).clone());
            }
            for (col, &pos) in x_positions.iter().enumerate() {
                c.set(n + col + 1, cx.at(pos).clone());
            }
            c
        })
        .collect();

    let stack = LexObjectiveStack { objectives, a_eq: a, rhs, signs };
    match first_nonzero_objective(&stack) {
        Ok((sign, stage_lps)) => {
            if sign.verdict == LexVerdict::LexZero {
                return Err(AdjacencyLexZero {
                    basis: dv_b.basis().clone(),
                    other: dv_b2.basis().clone(),
                });
            }
            Ok(LexDecision { sign, stage_lps })
        }
        Err(_) => Ok(LexDecision {
            sign: LexSign { verdict: LexVerdict::LexPositive, stage: None, value: None },
            stage_lps: 1,
        }),
    }
}

/// Whole-region decision: `LexPositive` exactly when the perturbed region of
/// the basis is full-dimensional for all sufficiently small ε > 0.
pub fn region_fulldim_lexlp(p: &PLCP, dv: &DictionaryView) -> LexDecision {
    let region = dual_region(p, dv, None);
    let stack = LexObjectiveStack {
        objectives: PerturbationSpec::new(p.order()).objective_stack(dv.beta(), p.q()),
        a_eq: region.a_eq,
        rhs: region.rhs,
        signs: region.signs,
    };
    match first_nonzero_objective(&stack) {
        Ok((sign, stage_lps)) => {
            if sign.verdict == LexVerdict::LexZero {
                log::warn!(
                    "full-dimension stack for basis {} resolved to lexicographic zero",
                    dv.basis()
                );
            }
            LexDecision { sign, stage_lps }
        }
        Err(_) => LexDecision {
            sign: LexSign { verdict: LexVerdict::LexPositive, stage: None, value: None },
            stage_lps: 1,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plcpmodel::dictionary;
    use crate::ratcore::rat_int;

    fn plcp(m: &[&[i64]], q: &[i64], qm: &[&[i64]]) -> PLCP {
        PLCP::new(
            RatMatrix::from_i64_rows(m),
            RatVector::from_i64(q),
            RatMatrix::from_i64_rows(qm),
        )
        .unwrap()
    }

    fn basis(v: &[usize], n: usize) -> Basis {
        Basis::new(v.to_vec(), n).unwrap()
    }

    fn line_instance() -> PLCP {
        plcp(&[&[1, -1], &[1, 1]], &[0, 0], &[&[1], &[-1]])
    }

    #[test]
    fn facets_of_the_shrinking_interval() {
        // Perturbed region of {1,2} is [-ε, ε²]: both endpoints are facets
        // for small ε even though the unperturbed region is a single point.
        let p = line_instance();
        let dv = dictionary(&p, &Basis::slack(2)).unwrap();
        assert_eq!(redundancy_lexlp(&p, &dv, 1).sign.verdict, LexVerdict::LexPositive);
        assert_eq!(redundancy_lexlp(&p, &dv, 2).sign.verdict, LexVerdict::LexPositive);
    }

    #[test]
    fn perturbed_halfline_keeps_one_facet() {
        // Basis {2,3}: perturbed region is θ ≤ -ε; the facet belongs to
        // index 3, the other row is strictly interior.
        let p = line_instance();
        let dv = dictionary(&p, &basis(&[2, 3], 2)).unwrap();
        assert_eq!(redundancy_lexlp(&p, &dv, 3).sign.verdict, LexVerdict::LexPositive);
        assert_eq!(redundancy_lexlp(&p, &dv, 2).sign.verdict, LexVerdict::LexNegative);

        // Mirror basis {1,4}: perturbed region θ ≥ ε².
        let dv = dictionary(&p, &basis(&[1, 4], 2)).unwrap();
        assert_eq!(redundancy_lexlp(&p, &dv, 4).sign.verdict, LexVerdict::LexPositive);
        assert_eq!(redundancy_lexlp(&p, &dv, 1).sign.verdict, LexVerdict::LexNegative);
    }

    #[test]
    fn orthant_shift_keeps_facets() {
        let p = plcp(&[&[1, 0], &[0, 1]], &[0, 0], &[&[1, 0], &[0, 1]]);
        let dv = dictionary(&p, &Basis::slack(2)).unwrap();
        for i in [1, 2] {
            let dec = redundancy_lexlp(&p, &dv, i);
            assert_eq!(dec.sign.verdict, LexVerdict::LexPositive, "facet {i}");
        }
    }

    #[test]
    fn stage_zero_matches_unperturbed_slack_value() {
        // M = I, q = (1,1), Q = (1,-1): region of {1,2} is [-1,1]. The
        // unperturbed max slack on either endpoint hyperplane is 2, so the
        // stage-0 optimum must be exactly 2 by strong duality.
        let p = plcp(&[&[1, 0], &[0, 1]], &[1, 1], &[&[1], &[-1]]);
        let dv = dictionary(&p, &Basis::slack(2)).unwrap();
        let dec = redundancy_lexlp(&p, &dv, 1);
        assert_eq!(dec.sign.verdict, LexVerdict::LexPositive);
        assert_eq!(dec.sign.stage, Some(0));
        assert_eq!(dec.sign.value, Some(rat_int(2)));
        assert_eq!(dec.stage_lps, 1);
    }

    #[test]
    fn constant_inequality_is_redundant_without_staging() {
        // Row 1 of the slack basis has β₁Q = 0 here: its inequality is the
        // constant 1 ≥ 0 over the subspace and never a facet.
        let p = plcp(
            &[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 1]],
            &[1, -5, 1],
            &[&[0], &[1], &[0]],
        );
        let dv = dictionary(&p, &Basis::slack(3)).unwrap();
        let dec = redundancy_lexlp(&p, &dv, 1);
        assert_eq!(dec.sign.verdict, LexVerdict::LexNegative);
        assert_eq!(dec.stage_lps, 0);
    }

    #[test]
    fn hyperplane_outside_region_is_negative_at_stage_zero() {
        // Basis {1,4} of the M = I halfline instance: rows θ ≥ -1 and
        // θ ≥ 0. The first hyperplane misses the region with slack -1.
        let p = plcp(&[&[1, 0], &[0, 1]], &[1, 0], &[&[1], &[-1]]);
        let dv = dictionary(&p, &basis(&[1, 4], 2)).unwrap();
        let dec = redundancy_lexlp(&p, &dv, 1);
        assert_eq!(dec.sign.verdict, LexVerdict::LexNegative);
        assert_eq!(dec.sign.stage, Some(0));
        assert_eq!(dec.sign.value, Some(rat_int(-1)));
        assert_eq!(redundancy_lexlp(&p, &dv, 4).sign.verdict, LexVerdict::LexPositive);
    }

    #[test]
    fn one_dimensional_facet_via_infeasible_dual() {
        // n = 1: the dual normalization row is unsatisfiable, which encodes
        // an unbounded primal slack — the endpoint is a facet.
        let p = plcp(&[&[1]], &[0], &[&[1]]);
        let dv = dictionary(&p, &Basis::slack(1)).unwrap();
        let dec = redundancy_lexlp(&p, &dv, 1);
        assert_eq!(dec.sign.verdict, LexVerdict::LexPositive);
        assert_eq!(dec.sign.stage, None);
    }

    #[test]
    fn adjacency_with_empty_neighbor_is_negative() {
        // Skew 2x2, d=1, Q=(1,1), q=(1,0): the perturbed region of {3,4}
        // is empty, so the exchange pair cannot be adjacent.
        let p = plcp(&[&[0, 1], &[-1, 0]], &[1, 0], &[&[1], &[1]]);
        let dv = dictionary(&p, &Basis::slack(2)).unwrap();
        let dv2 = dictionary(&p, &basis(&[3, 4], 2)).unwrap();
        let dec = adjacency_lexlp(&p, &dv, &dv2, 1, 2).unwrap();
        assert_eq!(dec.sign.verdict, LexVerdict::LexNegative);
    }

    #[test]
    fn adjacency_decided_at_stage_zero_when_unperturbed_value_positive() {
        // Skew 2x2, d=1, Q=(-1,2), q=(1,0): regions [0,1] and [1,∞) of the
        // exchange pair meet at θ=1 with unperturbed slack 2.
        let p = plcp(&[&[0, 1], &[-1, 0]], &[1, 0], &[&[-1], &[2]]);
        let dv = dictionary(&p, &Basis::slack(2)).unwrap();
        let dv2 = dictionary(&p, &basis(&[3, 4], 2)).unwrap();
        let dec = adjacency_lexlp(&p, &dv, &dv2, 1, 2).unwrap();
        assert_eq!(dec.sign.verdict, LexVerdict::LexPositive);
        assert_eq!(dec.sign.stage, Some(0));
        assert_eq!(dec.sign.value, Some(rat_int(2)));
    }

    #[test]
    fn adjacency_through_plane_is_positive() {
        // Skew 2x2, d=2, Q=I: the subspace is the whole plane and the two
        // quadrant cones share a genuine ray.
        let p = plcp(&[&[0, 1], &[-1, 0]], &[1, 0], &[&[1, 0], &[0, 1]]);
        let dv = dictionary(&p, &Basis::slack(2)).unwrap();
        let dv2 = dictionary(&p, &basis(&[3, 4], 2)).unwrap();
        let dec = adjacency_lexlp(&p, &dv, &dv2, 1, 2).unwrap();
        assert_eq!(dec.sign.verdict, LexVerdict::LexPositive);
    }

    #[test]
    fn adjacency_shortcut_on_constant_hyperplane() {
        // Pinned row has β₁Q = 0: the shared hyperplane misses the shifted
        // subspace, no staging needed.
        let p = plcp(
            &[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 1]],
            &[1, -5, 1],
            &[&[0], &[1], &[0]],
        );
        let dv = dictionary(&p, &Basis::slack(3)).unwrap();
        let dv2 = dictionary(&p, &basis(&[3, 4, 5], 3)).unwrap();
        let dec = adjacency_lexlp(&p, &dv, &dv2, 1, 2).unwrap();
        assert_eq!(dec.sign.verdict, LexVerdict::LexNegative);
        assert_eq!(dec.stage_lps, 0);
    }

    #[test]
    fn fulldim_detects_reachable_and_missed_cones() {
        let p = line_instance();
        for (b, expect) in [
            (basis(&[1, 2], 2), LexVerdict::LexPositive),
            (basis(&[2, 3], 2), LexVerdict::LexPositive),
            (basis(&[1, 4], 2), LexVerdict::LexPositive),
            // The shifted line misses this cone entirely.
            (basis(&[3, 4], 2), LexVerdict::LexNegative),
        ] {
            let dv = dictionary(&p, &b).unwrap();
            assert_eq!(region_fulldim_lexlp(&p, &dv).sign.verdict, expect, "basis {b}");
        }
    }

    #[test]
    fn stage_budget_never_exceeds_order_plus_one() {
        let p = line_instance();
        for b in [basis(&[1, 2], 2), basis(&[2, 3], 2), basis(&[1, 4], 2)] {
            let dv = dictionary(&p, &b).unwrap();
            for &i in b.indices() {
                assert!(redundancy_lexlp(&p, &dv, i).stage_lps <= p.order() + 1);
            }
        }
    }
}
