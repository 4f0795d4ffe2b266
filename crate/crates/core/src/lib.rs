//! Design of two-level MPLS-over-transport networks with multilayer graphs.
//!
//! An [`Instance`] (transport topology, LSR candidates, multicast demands and
//! costs) is turned into a redundant multilayer graph by
//! [`synthesis::synthesize`]; [`optimizer::solve`] then selects the
//! minimum-cost subgraph that routes every demand within link and node
//! capacities.
//!
//! The model and solvers are generic over the money type
//! ([`scalar::Scalar`]). The aliases below fix it to exact integers, which is
//! what the instance file format uses.

pub mod io;
pub mod mlg;
pub mod optimizer;
pub mod routing;
pub mod scalar;
pub mod synthesis;

use num_rational::Ratio;

/// Money in minor currency units.
pub type Money = u64;

pub type MultiLayerGraph = mlg::MultiLayerGraph<Money>;
pub type Instance = synthesis::Instance<Money>;
pub type Design = optimizer::Design<Money>;
pub type DesignReport = io::DesignReport<Money>;

pub type RationalInstance = synthesis::Instance<Ratio<i64>>;
pub type RationalDesign = optimizer::Design<Ratio<i64>>;
pub type F64Instance = synthesis::Instance<f64>;
pub type F64Design = optimizer::Design<f64>;
