//! Hierarchical names and their iterated-hash encoding.

mod chain;
mod cost;
mod name;
mod wire;

pub use chain::{iterate_chain, ChainState, EncodedName};
pub use cost::{
    max_iterated_hashes, max_standard_hashes, naming_bits, NamingScheme, BITS_PER_CHAR,
    MEAN_WORD_LENGTH,
};
pub use name::{HierarchicalName, SEPARATOR};
pub use wire::{decode_wire, decode_wire_levels, encode_wire};
