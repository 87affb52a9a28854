//! Finite abelian groups, subset-sum counts and the designs they carry.

mod design;
mod group;
mod subset_sum;

pub use design::{
    design_parameters, enumerated_verdict, is_design_subset_sums, verify_design, CoverageWitness,
    DesignCheckReport, DesignInstance, DesignParameters, SubsetSumDesignVerdict, VerdictMethod,
};
pub use group::{AbelianGroup, GroupElement, GroupInvariants};
pub use subset_sum::{
    brute_force_counts, brute_force_tally, count_labeled_subsets_with_sum, count_subsets_full,
    count_subsets_nonzero, label_sum, labeled_subsets_with_sum, subsets_with_sum,
};

pub use crate::arith::mobius;

/// exp(G), e(x) and #G[d] for every d | exp(G).
pub fn group_invariants(g: &AbelianGroup, x: &GroupElement) -> GroupInvariants {
    g.invariants(x)
}
