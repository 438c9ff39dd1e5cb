//! Unperturbed polyhedral computations in parameter space: facet and
//! redundancy tests, region adjacency, dimension, interior points and
//! membership. Everything here reasons about the original right-hand side,
//! with no symbolic perturbation.

use crate::lpexact::{solve_lp, LPOutcome, LinearProgram, VarSign};
use crate::plcpmodel::{complement, DictionaryView, PLCP};
use crate::ratcore::{rat_int, RatMatrix, RatVector, Rational};
use num_traits::{Signed, Zero};

/// Inequality description of a critical region: row `k` encodes
/// `normals[k]·θ + offsets[k] ≥ 0`, one row per basic index of the owning
/// basis (`β_j Q` and `β_j q`).
#[derive(Clone, Debug)]
pub struct RegionHRep {
    pub basis: crate::plcpmodel::Basis,
    pub normals: RatMatrix,
    pub offsets: RatVector,
}

impl RegionHRep {
    pub fn nrows(&self) -> usize {
        self.normals.nrows()
    }

    pub fn dim(&self) -> usize {
        self.normals.ncols()
    }

    pub fn rows(&self) -> Vec<(RatVector, Rational)> {
        (1..=self.nrows())
            .map(|k| (self.normals.row_vec(k), self.offsets.at(k).clone()))
            .collect()
    }
}

/// Region of a basis in parameter space: rows `β_j(Qθ + q) ≥ 0`.
pub fn region_from_dictionary(p: &PLCP, dv: &DictionaryView) -> RegionHRep {
    RegionHRep {
        basis: dv.basis().clone(),
        normals: dv.beta().matmul(p.qmat()),
        offsets: dv.beta().mul_vec(p.q()),
    }
}

/// One inequality row `normal·θ + offset ≥ 0`; `slacked` rows share the
/// max-slack variable.
struct SlackRow {
    normal: RatVector,
    offset: Rational,
    slacked: bool,
}

/// Builds `min -t` (or a pure feasibility problem when no row is slacked)
/// over θ free, t free, one nonnegative slack per inequality row:
/// `normal·θ + offset ≥ t` for slacked rows, `≥ 0` otherwise, plus
/// equality rows `normal·θ + offset = 0`.
fn build_slack_lp(d: usize, ineqs: &[SlackRow], eqs: &[(RatVector, Rational)]) -> LinearProgram {
    let use_t = ineqs.iter().any(|r| r.slacked);
    let t_cols = usize::from(use_t);
    let nv = d + t_cols + ineqs.len();
    let nrows = ineqs.len() + eqs.len();
    let mut a = RatMatrix::zeros(nrows, nv);
    let mut rhs = RatVector::zeros(nrows);
    for (r, row) in ineqs.iter().enumerate() {
        for k in 1..=d {
            a.set(r + 1, k, row.normal.at(k).clone());
        }
        if row.slacked {
            a.set(r + 1, d + 1, rat_int(-1));
        }
        a.set(r + 1, d + t_cols + r + 1, rat_int(-1));
        rhs.set(r + 1, -row.offset.clone());
    }
    for (e, (normal, offset)) in eqs.iter().enumerate() {
        let r = ineqs.len() + e;
        for k in 1..=d {
            a.set(r + 1, k, normal.at(k).clone());
        }
        rhs.set(r + 1, -offset.clone());
    }
    let mut objective = RatVector::zeros(nv);
    if use_t {
        objective.set(d + 1, rat_int(-1));
    }
    let mut signs = vec![VarSign::Free; d + t_cols];
    signs.extend(std::iter::repeat(VarSign::NonNegative).take(ineqs.len()));
    LinearProgram::new(objective, a, rhs, signs)
}

/// Max-slack outcome distilled to what the callers branch on.
enum SlackValue {
    Infeasible,
    Finite(Rational, RatVector),
    Unbounded,
}

fn solve_slack(d: usize, ineqs: &[SlackRow], eqs: &[(RatVector, Rational)]) -> SlackValue {
    let lp = build_slack_lp(d, ineqs, eqs);
    match solve_lp(&lp) {
        LPOutcome::Infeasible => SlackValue::Infeasible,
        LPOutcome::Unbounded => SlackValue::Unbounded,
        LPOutcome::Optimal { value, point } => {
            let theta = RatVector::from_vec(
                (1..=d).map(|k| point.at(k).clone()).collect(),
            );
            SlackValue::Finite(-value, theta)
        }
    }
}

/// Whether the hyperplane of basic index `i` supports a facet of the
/// unperturbed region: the max slack of the remaining rows restricted to
/// that hyperplane must be strictly positive. Unbounded slack counts as a
/// facet; an unreachable hyperplane does not.
pub fn facet_test_unperturbed(p: &PLCP, dv: &DictionaryView, i: usize) -> bool {
    let region = region_from_dictionary(p, dv);
    let pos = dv.basis().position(i).expect("index not in basis");
    let mut ineqs = Vec::new();
    let mut eqs = Vec::new();
    for k in 1..=region.nrows() {
        let row = (region.normals.row_vec(k), region.offsets.at(k).clone());
        if k == pos {
            eqs.push(row);
        } else {
            ineqs.push(SlackRow { normal: row.0, offset: row.1, slacked: true });
        }
    }
    match solve_slack(p.param_dim(), &ineqs, &eqs) {
        SlackValue::Infeasible => false,
        SlackValue::Unbounded => true,
        SlackValue::Finite(t, _) => t.is_positive(),
    }
}

/// Whether the regions of an exchange pair intersect with dimension `d-1`.
/// The shared hyperplane is pinned through the `B`-side row; the equivalent
/// `B''`-side equality is dropped.
pub fn adjacency_test_unperturbed(
    p: &PLCP,
    dv_b: &DictionaryView,
    dv_b2: &DictionaryView,
    i: usize,
    j: usize,
) -> bool {
    let n = p.order();
    let jbar = complement(j, n);
    let region_b = region_from_dictionary(p, dv_b);
    let region_b2 = region_from_dictionary(p, dv_b2);
    let mut ineqs = Vec::new();
    let mut eqs = Vec::new();
    let pos_i = dv_b.basis().position(i).expect("i not in B");
    for k in 1..=region_b.nrows() {
        let row = (region_b.normals.row_vec(k), region_b.offsets.at(k).clone());
        if k == pos_i {
            eqs.push(row);
        } else {
            ineqs.push(SlackRow { normal: row.0, offset: row.1, slacked: true });
        }
    }
    let pos_jbar = dv_b2.basis().position(jbar).expect("j̄ not in B''");
    for k in 1..=region_b2.nrows() {
        if k == pos_jbar {
            continue;
        }
        ineqs.push(SlackRow {
            normal: region_b2.normals.row_vec(k),
            offset: region_b2.offsets.at(k).clone(),
            slacked: true,
        });
    }
    match solve_slack(p.param_dim(), &ineqs, &eqs) {
        SlackValue::Infeasible => false,
        SlackValue::Unbounded => true,
        SlackValue::Finite(t, _) => t.is_positive(),
    }
}

/// Exact dimension of `{θ | ineqs ≥ 0, eqs = 0}`: -1 when empty, otherwise
/// the ambient dimension minus the rank of all equality normals, where an
/// inequality whose slack cannot leave zero is an implicit equality.
pub fn polyhedron_dimension(
    ineqs: &[(RatVector, Rational)],
    eqs: &[(RatVector, Rational)],
    d: usize,
) -> i64 {
    let plain: Vec<SlackRow> = ineqs
        .iter()
        .map(|(nrm, off)| SlackRow { normal: nrm.clone(), offset: off.clone(), slacked: false })
        .collect();
    if matches!(solve_slack(d, &plain, eqs), SlackValue::Infeasible) {
        return -1;
    }
    let mut equality_normals: Vec<RatVector> = eqs.iter().map(|(nrm, _)| nrm.clone()).collect();
    for k in 0..ineqs.len() {
        let rows: Vec<SlackRow> = ineqs
            .iter()
            .enumerate()
            .map(|(r, (nrm, off))| SlackRow {
                normal: nrm.clone(),
                offset: off.clone(),
                slacked: r == k,
            })
            .collect();
        match solve_slack(d, &rows, eqs) {
            SlackValue::Infeasible => unreachable!("feasibility already established"),
            SlackValue::Unbounded => {}
            SlackValue::Finite(t, _) => {
                debug_assert!(!t.is_negative());
                if t.is_zero() {
                    equality_normals.push(ineqs[k].0.clone());
                }
            }
        }
    }
    if equality_normals.is_empty() {
        return d as i64;
    }
    let rank = RatMatrix::from_rows(
        equality_normals.iter().map(|nrm| nrm.as_slice().to_vec()).collect(),
    )
    .rank();
    d as i64 - rank as i64
}

/// Dimension of a region's unperturbed parameter set.
pub fn region_dimension(region: &RegionHRep) -> i64 {
    polyhedron_dimension(&region.rows(), &[], region.dim())
}

/// Dimension of the intersection of two regions over the same parameters.
pub fn intersection_dimension(r1: &RegionHRep, r2: &RegionHRep) -> i64 {
    let mut rows = r1.rows();
    rows.extend(r2.rows());
    polyhedron_dimension(&rows, &[], r1.dim())
}

/// Default box half-width for extracting finite witness points from
/// unbounded max-slack problems.
pub fn default_witness_box() -> Rational {
    rat_int(1 << 30)
}

/// A point strictly inside the region, when the region is full-dimensional.
/// Truth comes from the unbounded/positive status of the max-slack problem;
/// the box only extracts a finite witness and grows when it proves too
/// small.
pub fn interior_point(region: &RegionHRep) -> Option<RatVector> {
    interior_point_boxed(region, &default_witness_box())
}

pub fn interior_point_boxed(region: &RegionHRep, box_r: &Rational) -> Option<RatVector> {
    let d = region.dim();
    let base: Vec<SlackRow> = region
        .rows()
        .into_iter()
        .map(|(nrm, off)| SlackRow { normal: nrm, offset: off, slacked: true })
        .collect();
    match solve_slack(d, &base, &[]) {
        SlackValue::Infeasible => None,
        SlackValue::Finite(t, theta) => t.is_positive().then_some(theta),
        SlackValue::Unbounded => {
            let mut r = box_r.clone();
            for _ in 0..4 {
                let mut rows: Vec<SlackRow> = region
                    .rows()
                    .into_iter()
                    .map(|(nrm, off)| SlackRow { normal: nrm, offset: off, slacked: true })
                    .collect();
                for k in 1..=d {
                    let mut plus = RatVector::zeros(d);
                    plus.set(k, rat_int(1));
                    let mut minus = RatVector::zeros(d);
                    minus.set(k, rat_int(-1));
                    rows.push(SlackRow { normal: plus, offset: r.clone(), slacked: false });
                    rows.push(SlackRow { normal: minus, offset: r.clone(), slacked: false });
                }
                if let SlackValue::Finite(t, theta) = solve_slack(d, &rows, &[]) {
                    if t.is_positive() {
                        return Some(theta);
                    }
                }
                r = &r * &r;
            }
            None
        }
    }
}

/// Exact membership test; `strict` demands positive slack in every row.
pub fn contains(region: &RegionHRep, theta: &RatVector, strict: bool) -> bool {
    for (normal, offset) in region.rows() {
        let slack = normal.dot(theta) + offset;
        if strict {
            if !slack.is_positive() {
                return false;
            }
        } else if slack.is_negative() {
            return false;
        }
    }
    true
}
