//! Executable ingredients of the convergence theory of metric Diophantine
//! approximation on fractal measures.
//!
//! * [`geometry`]: balls, slabs, exact rational simplices, the dyadic radii
//!   `r_n` and the greedy 3r covering lemma.
//! * [`ifs`]: self-similar iterated function systems with an open-set
//!   witness, their natural measure, and rigorous interval enclosures of ball
//!   and slab masses.
//! * [`diagnostics`]: empirical doubling, absolute-decay and Ahlfors
//!   regularity certificates.
//! * [`approx`]: approximation functions, rational enumeration by dyadic
//!   denominator block, and the layers `A_n`.
//! * [`analysis`]: Khintchine-type sums and their convergence verdicts,
//!   measure-zero and dimension predictions, the `D_n` / `C(D_n)` covers and
//!   box counting.

pub mod analysis;
pub mod approx;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod ifs;

pub use analysis::{
    box_dimension, build_cdn_cover, build_dn_cover, classify_sum, cover_cost, dimension_bound,
    hs_upper_bound, predict_hausdorff_null, predict_measure_zero, BoxDimension, CoverCost, Prediction, SumKind, SumSpec,
    SumVerdict, Trivalent,
};
pub use approx::{
    enumerate_rationals, is_psi_approximable, layer_membership, ApproxLayer, PsiFamily, Window,
    PsiFunction,
};
pub use diagnostics::{
    certify_decay, certify_doubling, certify_regularity, decay_alpha_from_regularity,
    DecayCertificate, DoublingCertificate, RegularityCertificate,
};
pub use error::{Error, Result};
pub use geometry::{
    greedy_cover, hyperplane_witness, simplex_volume_times_dfact, slab_of, AxisBox, Ball,
    DyadicScale, Hyperplane, HyperplaneWitness, RationalPoint, Simplex, Slab,
};
pub use ifs::{
    measure_of_ball, measure_of_slab_in_ball, sample_measure, similarity_dimension,
    IteratedFunctionSystem, MassInterval, OpenSet, SimilarityMap,
};
