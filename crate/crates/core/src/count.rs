use std::fmt::{Debug, Display};

use num_traits::{CheckedAdd, CheckedMul, NumCast, PrimInt, Unsigned};

/// Unsigned integer type used to count domain members.
///
/// Arithmetic is checked: an overflow surfaces as [`crate::Error::Overflow`]
/// instead of wrapping.
pub trait Counter:
    PrimInt + Unsigned + CheckedAdd + CheckedMul + Default + Debug + Display + Send + Sync + 'static
{
    fn from_usize(x: usize) -> Option<Self> {
        <Self as NumCast>::from(x)
    }
}

impl<T> Counter for T where
    T: PrimInt + Unsigned + CheckedAdd + CheckedMul + Default + Debug + Display + Send + Sync + 'static
{
}

/// `lo * (lo + 1) * ... * hi`, or one when the range is empty.
pub(crate) fn rising_product<C: Counter>(lo: usize, hi: usize) -> Option<C> {
    (lo..=hi).try_fold(C::one(), |acc, j| acc.checked_mul(&C::from_usize(j)?))
}
