//! Multi-class joint source-channel coding: error exponents, a finite-length
//! class-partitioned codec over the BI-AWGN channel and a sphere-packing
//! style lower bound for two-class schemes.
//!
//! All exponents and rates are in nats unless a name says otherwise.

pub mod channel;
pub mod codec;
pub mod error;
pub mod exponents;
pub mod numeric;
pub mod par;
pub mod partition;
pub mod source;
pub mod sphere;

pub use channel::{ChannelSpec, Dmc, E0Curve, GallagerCurve, InputDistribution, InputPolicy};
pub use codec::{CodecConfig, DecoderMode, LinearCode, SimOptions, SimResult, SnrPoint};
pub use error::{Error, Result};
pub use exponents::{ExponentResult, ExponentSuite};
pub use par::Execution;
pub use partition::{PartitionSpec, RhoStar};
pub use source::{DiscreteSource, SourceChannelRatio};
pub use sphere::{two_class_lower_bound, TwoClassBound};
