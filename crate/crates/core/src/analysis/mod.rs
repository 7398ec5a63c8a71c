//! Khintchine-type sums and their classification, the theorem-level
//! predictions, the `D_n` and `C(D_n)` cover constructions with their
//! Hausdorff cost, and box-counting estimates.

mod audit;
mod covers;
mod dimension;
mod sums;

pub use audit::{lemma_audit, rationals_in_six_dilate, AuditRow};
pub use covers::{
    block_census, build_cdn_cover, build_dn_cover, cover_cost, hs_upper_bound, nearby_rationals, BallCensus,
    BlockCensus, BlockCost, CoverCost, DnCover, HsBound, CANDIDATE_BUDGET,
};
pub use dimension::{
    approximant_dimension, box_dimension, layer_mass_profile, ApproximantDimension, BoxDimension, LayerProfile,
    LayerRow,
};
pub use sums::{
    classify_sum, condensation_verdict, dimension_bound, predict_hausdorff_null, predict_measure_zero, Method,
    Prediction, SumKind, SumSpec, SumVerdict, Trivalent, CONDENSED_TERMS,
};
