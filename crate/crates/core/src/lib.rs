//! Exact and Monte Carlo computations on step graphons: homomorphism
//! densities, edge-count distributions of samples, zero-edge probabilities,
//! container certificates, spectra, cut norms and verification suites.

pub mod bitgraph;
pub mod containers;
pub mod density;
pub mod distribution;
pub mod error;
pub mod graph;
pub mod graphon;
pub mod rng;
pub mod sampler;
pub mod scalar;
pub mod spectral;
pub mod verify;
pub mod witness;

pub use bitgraph::{BitGraph, VertexSet};
pub use containers::{ContainerCertificate, Delta};
pub use density::{hom_density, sample_graph_probability};
pub use distribution::{exact_xk, EdgeCountDistribution};
pub use error::{Error, Result};
pub use graph::{canonical_form, enumerate_gkm, named_graph, FamilyEntry, GraphClass, SmallGraph};
pub use graphon::{ExactGraphon, StepGraphon};
pub use rng::CounterRng;
pub use scalar::{Rational, Scalar};
