//! Bloom filter storage and design calculus.
//!
//! A standard Bloom filter of `m` bits and `k` hashes is split into `d`
//! individual filters of `m/d` bits and `k/d` hashes each. Keeping the
//! probability `p` that a bit stays zero fixed, the split keeps capacity and
//! false-positive rate: `f_i = f_ind^d = f`.

mod bits;
mod codec;
mod design;
mod geometry;
mod ibf;

pub use codec::{FORMAT_VERSION, MAGIC};
pub use design::{
    design_standard, effective_fpr, overall_fpr, split_to_iterated, strategy_one_shrink,
    strategy_two_rehash, FprModel, LevelDesign, Rehashed, StandardBloomParams,
};
pub use geometry::FilterGeometry;
pub use ibf::{IteratedBloomFilter, COUNTER_MAX};
