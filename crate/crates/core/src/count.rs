use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, One, ToPrimitive, Unsigned, Zero};

/// Scalar used for virus counts, channel weights and emitted numbers.
///
/// Native widths (`u32`, `u64`, `u128`) overflow-check every update; `BigUint`
/// never overflows. Replication compounds multiplicatively along host paths, so
/// pick the width to match the machine.
pub trait Count:
    Clone
    + Ord
    + Hash
    + Debug
    + Display
    + Zero
    + One
    + Unsigned
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Converts a small literal. Panics if `value` does not fit the type.
    fn of(value: u64) -> Self {
        Self::from_u64(value).expect("count literal out of range for this width")
    }
}

impl<T> Count for T where
    T: Clone
        + Ord
        + Hash
        + Debug
        + Display
        + Zero
        + One
        + Unsigned
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}
